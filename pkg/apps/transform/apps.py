from django.apps import AppConfig


class TransformConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.transform"
