from django.apps import AppConfig


class DissociationConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'dissociation'
