from django.apps import AppConfig


class SplitterConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.splitter"
