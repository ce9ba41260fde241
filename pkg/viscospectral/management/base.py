"""
Base común de los comandos de viscospectral

Todos comparten la interfaz `<command> --config <path> --out <dir> [--dump-state]`,
la carga del problema y la traducción de errores a códigos de salida.
"""
import logging
from typing import Any, Dict, Optional

import numpy as np
from django.core.management.base import BaseCommand, CommandError

from ..configuracion import ProblemInstance, cargar_configuracion, configuracion_por_defecto
from ..errores import ViscospectralError
from ..processors.emision import EmisorArtefactos, volcar_json

logger = logging.getLogger(__name__)


class ComandoViscospectral(BaseCommand):
    """
    Subclases implementan ejecutar(problema, emisor, options) y devuelven el
    resumen que se imprime en stdout como JSON compacto.
    """

    requires_system_checks = []
    requires_migrations_checks = False

    nombre = ''

    def add_arguments(self, parser):
        parser.add_argument(
            '--config',
            required=True,
            help='Archivo JSON con el problema (núcleo, operador, datos, forzamiento)'
        )
        parser.add_argument(
            '--out',
            required=True,
            help='Directorio de salida para CSV, reportes JSON y manifest.json'
        )
        parser.add_argument(
            '--dump-state',
            action='store_true',
            help='Incluir los estados de memoria w_k en las salidas'
        )

    def handle(self, *args, **options):
        self.config = configuracion_por_defecto()
        try:
            problema = cargar_configuracion(options['config'], self.config)
            emisor = EmisorArtefactos(options['out'])
            resumen = self.ejecutar(problema, emisor, options)
        except ViscospectralError as e:
            logger.error(f"❌ {self.nombre}: {e}")
            self.stderr.write(volcar_json(e.a_dict(), compacto=True))
            raise CommandError(str(e), returncode=e.codigo_salida) from e

        logger.info(f"✅ {self.nombre} completado")
        if resumen is not None:
            self.stdout.write(volcar_json(resumen, compacto=True))

    def ejecutar(self, problema: ProblemInstance, emisor: EmisorArtefactos,
                 options: Dict[str, Any]) -> Optional[Dict[str, Any]]:
        raise NotImplementedError

    def malla_traza(self, problema: ProblemInstance) -> np.ndarray:
        return np.linspace(0.0, problema.horizon, int(self.config.get('PUNTOS_TRAZA', 501)))
