"""
Solución por serie de residuos (requiere B = 0)

Salidas: traces.csv (t, n, u, du, ddu), physical.csv (x, t, u) para el laplaciano
de Dirichlet, memory.csv con --dump-state, report.json y manifest.json.
"""
import logging

import numpy as np
import pandas as pd

from ...services.series_solver import (
    equation_residual,
    eval_series_malla,
    memory_states,
    physical_frame,
    serie_del_problema,
    trace_frame,
)
from ...services.spectrum_solver import full_spectrum
from ..base import ComandoViscospectral

logger = logging.getLogger(__name__)

PUNTOS_RESIDUO = 20


class Command(ComandoViscospectral):
    help = 'Resuelve el problema con la serie de residuos y emite las trazas por modo'
    nombre = 'solve'

    def ejecutar(self, problema, emisor, options):
        espectro = full_spectrum(problema.operator, problema.kernel)
        serie = serie_del_problema(espectro, problema.phi0, problema.phi1, problema.forcing)
        t = self.malla_traza(problema)

        emisor.csv('traces.csv', trace_frame(serie, t))
        if problema.operator.model == 'dirichlet_1d':
            x = np.linspace(0.0, np.pi, problema.x_grid)
            emisor.csv('physical.csv', physical_frame(serie, x, t))
        if options['dump_state'] and problema.kernel.N:
            emisor.csv('memory.csv', self._tabla_memoria(serie, t))

        t_residuo = np.linspace(min(0.1, problema.horizon), problema.horizon, PUNTOS_RESIDUO)
        residuo = float(np.max(np.abs(equation_residual(serie, t_residuo))))
        inicial = eval_series_malla(serie, [0.0], 0)[:, 0] - problema.phi0.como_arreglo().real
        reporte = {
            'equation_residual_max': residuo,
            'initial_condition_error': float(np.max(np.abs(inicial))),
            'problem': problema.a_dict(),
            'spectrum': espectro.reporte,
        }
        emisor.json('report.json', reporte)
        emisor.cerrar()

        if residuo > 1e-6:
            logger.warning(f"⚠️ Residuo de la ecuación {residuo:.3e} por encima de 1e-6")
        return {'command': self.nombre, 'n_max': problema.n_max, 'equation_residual_max': residuo}

    def _tabla_memoria(self, serie, t):
        filas = []
        for n in range(1, serie.n_max + 1):
            estados = memory_states(serie, n, t)
            columnas = {'t': t, 'n': n}
            columnas.update({f'w_{k}': fila for k, fila in enumerate(estados, start=1)})
            filas.append(pd.DataFrame(columnas))
        return pd.concat(filas, ignore_index=True)
