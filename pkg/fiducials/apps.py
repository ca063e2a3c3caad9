from django.apps import AppConfig


class FiducialsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'fiducials'
    verbose_name = 'SIC-POVM fiducials'
