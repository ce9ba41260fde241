"""
Cotas en el dominio de Laplace y cociente de solubilidad

Salidas: estimates.json con el barrido de cotas, γ*, el ajuste de decaimiento
de ‖V‖, solvability_ratio del problema, la constante empírica d sobre problemas
aleatorios y, con B = 0, las cotas de normas de la serie; manifest.json.
"""
import logging

import numpy as np

from ...analizadores.estimates import (
    AnalizadorCotas,
    empirical_constant,
    solvability_ratio,
)
from ...errores import NotFound
from ...services.series_solver import PUNTOS_NORMA, serie_del_problema, series_norm_bounds
from ...services.spectrum_solver import full_spectrum
from ..base import ComandoViscospectral

logger = logging.getLogger(__name__)


class Command(ComandoViscospectral):
    help = 'Verifica las desigualdades escalares y el cociente de solubilidad'
    nombre = 'estimates'

    def ejecutar(self, problema, emisor, options):
        analizador = AnalizadorCotas(problema.kernel, problema.operator, self.config)
        try:
            gamma_star = analizador.contraction_threshold()
        except NotFound:
            gamma_star = None
        gamma = problema.weight
        if gamma is None:
            if gamma_star is None:
                raise NotFound("no hay umbral de contracción y la configuración no fija 'weight'")
            gamma = gamma_star + 1.0

        cotas = analizador.lemma_bound_scan(gamma)
        cotas['gamma_star'] = gamma_star

        espectro = None if problema.operator.tiene_b else full_spectrum(problema.operator, problema.kernel)
        razon = solvability_ratio(problema, gamma, espectro=espectro)
        empirica = empirical_constant(
            problema.kernel, problema.operator, gamma,
            n_problems=int(self.config.get('PROBLEMAS_ALEATORIOS', 50)),
            seed=int(self.config.get('SEMILLA', 20240611)),
            horizonte=problema.horizon,
            espectro=espectro,
        )

        reporte = {
            'bounds': cotas,
            'contraction_decay': analizador.contraction_decay_fit() if problema.kernel.N else None,
            'solvability': razon.a_dict(),
            'empirical': empirica,
            'problem': problema.a_dict(),
        }
        if espectro is not None:
            serie = serie_del_problema(espectro, problema.phi0, problema.phi1, problema.forcing)
            puntos = int(self.config.get('PUNTOS_NORMA', PUNTOS_NORMA))
            t = np.linspace(min(0.1, problema.horizon), problema.horizon, 50)
            reporte['series_norm_bounds'] = {
                f'p{p}': series_norm_bounds(serie, gamma, p, t_grid=t, puntos_norma=puntos) for p in (0, 1, 2)
            }
        emisor.json('estimates.json', reporte)
        emisor.cerrar()
        return {'command': self.nombre, 'gamma': gamma, 'gamma_star': gamma_star, 'ratio': razon.ratio,
                'empirical_d': empirica['d']}
