"""
Errores de viscospectral

Cada error lleva su código de salida para la CLI:
1 = configuración o datos inválidos, 2 = fallo numérico o aserción violada.
"""
from typing import Any, Dict, List, Optional, Tuple


class ViscospectralError(Exception):
    """Raíz de la jerarquía de errores del proyecto"""

    codigo_salida = 1

    def a_dict(self) -> Dict[str, Any]:
        """Representación JSON para stderr"""
        return {
            'error': str(self),
            'tipo': self.__class__.__name__,
            'codigo': self.codigo_salida,
        }


# ============================================================================
# ERRORES DE CONFIGURACIÓN Y DATOS (código 1)
# ============================================================================

class ConfiguracionInvalida(ViscospectralError):
    pass


class KernelSpecError(ConfiguracionInvalida):
    """Núcleo de Prony que viola las invariantes (γ creciente, c > 0, d ≥ 0)"""

    def __init__(self, mensaje: str, linea: Optional[int] = None):
        self.linea = linea
        if linea is not None:
            mensaje = f"línea {linea}: {mensaje}"
        super().__init__(mensaje)


class OperatorSpecError(ConfiguracionInvalida):
    pass


class ForcingSpecError(ConfiguracionInvalida):
    pass


class DimensionMismatch(ConfiguracionInvalida):
    pass


class InadmissibleProblem(ConfiguracionInvalida):
    pass


class HipotesisNoSatisfecha(ConfiguracionInvalida):
    """La operación exige una hipótesis del teorema (por ejemplo B = 0)"""
    pass


class ModelMismatch(ConfiguracionInvalida):
    pass


class MissingSpectrum(ConfiguracionInvalida):
    pass


class OutOfGrid(ConfiguracionInvalida):
    pass


class DomainRestriction(ConfiguracionInvalida):
    pass


class ConditioningRefusal(ConfiguracionInvalida):
    """Forma polinomial rechazada por mal condicionamiento (N > 40)"""
    pass


# ============================================================================
# FALLOS NUMÉRICOS (código 2)
# ============================================================================

class FalloNumerico(ViscospectralError):
    codigo_salida = 2


class PoleEvaluation(FalloNumerico):
    """Evaluación demasiado cerca de un polo -γ_j de la forma racional"""

    def __init__(self, lam: complex, gamma: float):
        self.lam = lam
        self.gamma = gamma
        super().__init__(
            f"λ={lam} está dentro de la tolerancia del polo -γ={-gamma}; "
            f"use la forma polinomial sin polos"
        )


class BracketFailure(FalloNumerico):
    def __init__(self, mensaje: str, intervalo: Tuple[float, float] = (float('nan'), float('nan')),
                 signos: Tuple[float, float] = (0.0, 0.0)):
        self.intervalo = intervalo
        self.signos = signos
        super().__init__(f"{mensaje} (intervalo={intervalo}, signos={signos})")


class NewtonDivergence(FalloNumerico):
    def __init__(self, mensaje: str, trayectoria: Optional[List[complex]] = None):
        self.trayectoria = list(trayectoria or [])
        super().__init__(mensaje)


class ConvergenceFailure(FalloNumerico):
    pass


class StepSizeTooLarge(FalloNumerico):
    pass


class InsufficientHorizon(FalloNumerico):
    pass


class NotFound(FalloNumerico):
    pass


class ParComplejoAusente(FalloNumerico):
    """Las N+2 raíces del modo son reales (a_n pequeño frente a la memoria)"""

    def __init__(self, n: int, raices: Optional[List[complex]] = None):
        self.n = n
        self.raices = list(raices or [])
        super().__init__(
            f"modo n={n}: las {len(self.raices) or 'N+2'} raíces son reales, no hay par complejo λ±"
        )


class SpectrumInvariantError(FalloNumerico):
    def __init__(self, n: int, mensaje: str):
        self.n = n
        super().__init__(f"modo n={n}: {mensaje}")


class BoundViolation(FalloNumerico, AssertionError):
    """Una desigualdad exacta falló en un punto de la malla"""

    def __init__(self, cota: str, lam: complex, n: Optional[int], lhs: float, rhs: float):
        self.cota = cota
        self.lam = lam
        self.n = n
        self.lhs = lhs
        self.rhs = rhs
        super().__init__(
            f"cota '{cota}' violada en λ={lam}, n={n}: {lhs!r} > {rhs!r}"
        )


class ComparacionFallida(FalloNumerico, AssertionError):
    """La serie y el oráculo difieren más que la tolerancia"""

    def __init__(self, max_abs_diff: float, tolerancia: float, n: int):
        self.max_abs_diff = max_abs_diff
        self.tolerancia = tolerancia
        self.n = n
        super().__init__(f"max_abs_diff={max_abs_diff:.3e} > {tolerancia:.1e} (modo n={n})")
