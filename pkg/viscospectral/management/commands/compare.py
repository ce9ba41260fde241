"""
Comparación serie de residuos vs oráculo RK4 (requiere B = 0)

Salidas: compare.csv (n, max_abs_diff), report.json y manifest.json.
Sale con código 2 si max_abs_diff supera TOLERANCIA_COMPARACION.
"""
import logging

import numpy as np
import pandas as pd

from ...errores import ComparacionFallida, HipotesisNoSatisfecha
from ...services.series_solver import eval_series_malla, serie_del_problema
from ...services.spectrum_solver import full_spectrum
from ...services.volterra_oracle import integrate_problem
from ..base import ComandoViscospectral

logger = logging.getLogger(__name__)


class Command(ComandoViscospectral):
    help = 'Compara la solución en serie con el oráculo de Volterra en norma del supremo'
    nombre = 'compare'

    def ejecutar(self, problema, emisor, options):
        if problema.operator.tiene_b:
            raise HipotesisNoSatisfecha("compare requires B=0")
        tolerancia = float(self.config.get('TOLERANCIA_COMPARACION', 1e-6))

        espectro = full_spectrum(problema.operator, problema.kernel)
        serie = serie_del_problema(espectro, problema.phi0, problema.phi1, problema.forcing)
        trazas = integrate_problem(problema.operator, problema.kernel, problema.phi0, problema.phi1,
                                   problema.forcing, problema.horizon, problema.dt)

        diferencias = []
        for traza in trazas:
            u_serie = eval_series_malla(serie, traza.t, 0)[traza.n - 1]
            diferencias.append(float(np.max(np.abs(u_serie - traza.u))))
        diferencias = np.array(diferencias)
        peor = int(np.argmax(diferencias)) + 1
        max_abs_diff = float(diferencias.max())

        emisor.csv('compare.csv', pd.DataFrame({'n': np.arange(1, problema.n_max + 1),
                                                'max_abs_diff': diferencias}))
        reporte = {
            'max_abs_diff': max_abs_diff,
            'worst_mode': peor,
            'tolerance': tolerancia,
            'dt': problema.dt,
            'horizon': problema.horizon,
            'pass': max_abs_diff <= tolerancia,
        }
        emisor.json('report.json', reporte)
        emisor.cerrar()

        logger.info(f"📊 Serie vs oráculo: max_abs_diff={max_abs_diff:.3e} (modo {peor})")
        if max_abs_diff > tolerancia:
            raise ComparacionFallida(max_abs_diff, tolerancia, peor)
        return {'command': self.nombre, 'max_abs_diff': max_abs_diff, 'pass': True}
