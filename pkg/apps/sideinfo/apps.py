from django.apps import AppConfig


class SideinfoConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.sideinfo"
