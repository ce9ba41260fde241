#!/usr/bin/env python
"""
Utilidad de Django para viscospectral

    python manage.py spectrum --config problema.json --out salida/
    python manage.py test tests
"""
import os
import sys


def main():
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "viscospectral_proyecto.settings")
    try:
        from django.core.management import execute_from_command_line
    except ImportError as exc:
        raise ImportError(
            "No se pudo importar Django. ¿Está instalado (pip install -r requirements.txt) "
            "y activo el entorno virtual?"
        ) from exc
    execute_from_command_line(sys.argv)


if __name__ == "__main__":
    main()
