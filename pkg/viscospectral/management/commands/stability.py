"""
Veredicto de estabilidad del núcleo: índice Σc_j/γ_j frente a 1

stdout: {"classification": ..., "index": ...}; stability.json con el diagnóstico completo.
"""
from ...modelos.kernel_model import diagnostics
from ..base import ComandoViscospectral


class Command(ComandoViscospectral):
    help = 'Clasifica el núcleo como stable, unstable o boundary'
    nombre = 'stability'

    def ejecutar(self, problema, emisor, options):
        diagnostico = diagnostics(problema.kernel)
        emisor.json('stability.json', diagnostico.a_dict())
        emisor.cerrar()
        return {'classification': diagnostico.classification, 'index': diagnostico.stability_index}
