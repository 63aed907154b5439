from django.apps import AppConfig


class QuantizerConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.quantizer"
