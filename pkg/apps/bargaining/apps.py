from django.apps import AppConfig


class BargainingConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'bargaining'
