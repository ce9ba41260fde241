"""
Despacho de comandos: viscospectral <command> --config <path> --out <dir> [--dump-state]

Códigos de salida: 0 éxito, 1 configuración inválida, 2 fallo numérico o aserción violada.
"""
import logging
import os
import sys
from pathlib import Path
from typing import List, Optional, Union

import django
from django.apps import apps
from django.core.management import call_command
from django.core.management.base import CommandError

from .processors.emision import volcar_json

logger = logging.getLogger(__name__)

COMANDOS = ('spectrum', 'solve', 'oracle', 'compare', 'estimates', 'stability')


def _preparar_django() -> None:
    os.environ.setdefault("DJANGO_SETTINGS_MODULE", "viscospectral_proyecto.settings")
    if not apps.ready:
        django.setup()


def _error_de_uso(mensaje: str) -> int:
    sys.stderr.write(volcar_json({'error': mensaje, 'tipo': 'UsoInvalido', 'codigo': 1}, compacto=True) + '\n')
    return 1


def run(command: str, config_path: Union[str, Path], out_dir: Union[str, Path],
        dump_state: bool = False) -> int:
    """Ejecuta un comando y devuelve el código de salida"""
    if command not in COMANDOS:
        return _error_de_uso(f"comando desconocido '{command}'; opciones: {', '.join(COMANDOS)}")
    _preparar_django()
    logger.info(f"📊 {command}: config={config_path}, out={out_dir}")
    try:
        call_command(command, config=str(config_path), out=str(out_dir), dump_state=dump_state)
    except CommandError as e:
        return e.returncode
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv or argv[0] not in COMANDOS:
        return _error_de_uso(
            f"uso: viscospectral {{{','.join(COMANDOS)}}} --config <path> --out <dir> [--dump-state]"
        )
    _preparar_django()
    try:
        call_command(argv[0], *argv[1:])
    except CommandError as e:
        if e.__cause__ is None:
            # errores de argparse: los de dominio ya escribieron su JSON
            return _error_de_uso(str(e))
        return e.returncode
    return 0
