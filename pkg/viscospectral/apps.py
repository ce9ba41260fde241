from django.apps import AppConfig


class ViscospectralConfig(AppConfig):
    name = "viscospectral"
    verbose_name = "Espectros viscoelásticos"
