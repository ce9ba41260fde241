"""
Oráculo de Volterra por modo (RK4 sobre el estado aumentado; admite B ≠ 0)

Salidas: oracle.csv (t, n, u, du [, w_k con --dump-state]) sobre la malla de trazas,
report.json y manifest.json.
"""
import logging

import pandas as pd

from ...services.volterra_oracle import integrate_problem, submuestrear
from ..base import ComandoViscospectral

logger = logging.getLogger(__name__)


class Command(ComandoViscospectral):
    help = 'Integra cada modo con el oráculo RK4 y emite las trazas'
    nombre = 'oracle'

    def ejecutar(self, problema, emisor, options):
        trazas = integrate_problem(problema.operator, problema.kernel, problema.phi0, problema.phi1,
                                   problema.forcing, problema.horizon, problema.dt)
        t = self.malla_traza(problema)

        filas = []
        for traza in trazas:
            muestra = submuestrear(traza, t)
            columnas = {'t': muestra.t, 'n': muestra.n, 'u': muestra.u, 'du': muestra.v}
            if options['dump_state']:
                columnas.update({f'w_{k}': fila for k, fila in enumerate(muestra.w, start=1)})
            filas.append(pd.DataFrame(columnas))
        emisor.csv('oracle.csv', pd.concat(filas, ignore_index=True))

        emisor.json('report.json', {'problem': problema.a_dict(), 'steps': len(trazas[0].t) - 1})
        emisor.cerrar()
        return {'command': self.nombre, 'n_max': problema.n_max, 'dt': problema.dt}
