from django.apps import AppConfig


class SoftinputConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.softinput"
