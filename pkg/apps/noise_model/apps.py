from django.apps import AppConfig


class NoiseModelConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.noise_model"
