"""Configura Django para pytest igual que manage.py"""
import os

import django

os.environ.setdefault("DJANGO_SETTINGS_MODULE", "viscospectral_proyecto.settings")
django.setup()
