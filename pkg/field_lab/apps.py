from django.apps import AppConfig


class FieldLabConfig(AppConfig):
    default_auto_field = "django.db.models.BigAutoField"
    name = "field_lab"
    verbose_name = "Free-field electrodynamics laboratory"
