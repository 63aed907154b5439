from django.apps import AppConfig


class KeyframeConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.keyframe"
