from django.apps import AppConfig


class LdpcaConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "apps.ldpca"
