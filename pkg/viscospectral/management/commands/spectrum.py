"""
Espectro completo del problema (requiere B = 0)

Salidas: spectrum.csv (n, kind, re, im), report.json con certificados, veredicto
de estabilidad y exponentes de ajuste asintótico, y manifest.json.
"""
import logging

from ...services.spectrum_solver import ESCALERA_A, asymptotic_fit, full_spectrum, spectrum_frame
from ..base import ComandoViscospectral

logger = logging.getLogger(__name__)


class Command(ComandoViscospectral):
    help = 'Calcula las N+2 raíces de cada modo y emite el CSV del espectro'
    nombre = 'spectrum'

    def ejecutar(self, problema, emisor, options):
        espectro = full_spectrum(problema.operator, problema.kernel)
        emisor.csv('spectrum.csv', spectrum_frame(espectro))

        reporte = dict(espectro.reporte)
        reporte['fit_exponents'] = asymptotic_fit(
            problema.kernel, tuple(self.config.get('ESCALERA_A', ESCALERA_A))
        )
        reporte['problem'] = problema.a_dict()
        emisor.json('report.json', reporte)
        emisor.cerrar()

        return {
            'command': self.nombre,
            'n_max': problema.n_max,
            'verdict': reporte['verdict'],
            'max_re': reporte['max_re'],
        }
