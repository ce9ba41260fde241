"""
Modelos de datos: núcleos, operadores diagonales y símbolos por modo
"""

from .kernel_model import KernelSpec, KernelTerm, KernelDiagnostics
from .operator_model import OperatorSpec, ModeVector, ForcingSpec, ForcingTerm
from .mode_symbol import ModeSymbol, PolySymbol

__all__ = [
    'KernelSpec',
    'KernelTerm',
    'KernelDiagnostics',
    'OperatorSpec',
    'ModeVector',
    'ForcingSpec',
    'ForcingTerm',
    'ModeSymbol',
    'PolySymbol',
]
