"""
Símbolo escalar por modo

l_n(λ) = λ² + a_n² + b_n - K̂(λ)·a_n² - Q̂(λ)·b_n y su forma polinomial
p_n(λ) = l_n(λ)·Π(λ+γ_k), libre de polos.
"""
import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from ..errores import ConditioningRefusal, OperatorSpecError
from .kernel_model import KernelSpec, laplace_hat, laplace_hat_prime
from .operator_model import OperatorSpec

logger = logging.getLogger(__name__)

MAX_GRADO_NUCLEO = 40

Numero = Union[complex, np.ndarray]


@dataclass(frozen=True)
class ModeSymbol:
    n: int
    a_sq: float
    b: float
    kernel: KernelSpec

    def __post_init__(self):
        if not self.a_sq > 0:
            raise OperatorSpecError(f"modo {self.n}: a²={self.a_sq} debe ser positivo")
        if self.b < 0:
            raise OperatorSpecError(f"modo {self.n}: b={self.b} debe ser no negativo")

    @classmethod
    def desde_operador(cls, op: OperatorSpec, kernel: KernelSpec, n: int) -> 'ModeSymbol':
        a_n, b_n = op.modo(n)
        return cls(n=n, a_sq=a_n ** 2, b=b_n, kernel=kernel)

    @property
    def a(self) -> float:
        return float(np.sqrt(self.a_sq))

    @property
    def pesos_memoria(self) -> np.ndarray:
        """a²c_k + b·d_k: peso de cada estado de memoria w_k"""
        return self.a_sq * self.kernel.c + self.b * self.kernel.d


@dataclass(frozen=True)
class PolySymbol:
    """Coeficientes de p_n en orden descendente, mónico, grado N+2"""
    coeficientes: Tuple[float, ...]
    n: int = 0

    @property
    def grado(self) -> int:
        return len(self.coeficientes) - 1

    def como_arreglo(self) -> np.ndarray:
        return np.array(self.coeficientes, dtype=float)

    def evaluar(self, lam: Numero) -> Numero:
        return np.polyval(self.como_arreglo(), lam)

    def evaluar_derivada(self, lam: Numero) -> Numero:
        return np.polyval(np.polyder(self.como_arreglo()), lam)


def l_eval(sym: ModeSymbol, lam: Numero) -> Numero:
    """l_n(λ); PoleEvaluation cerca de -γ_k"""
    lam_c = np.asarray(lam, dtype=complex)
    k_hat = laplace_hat(sym.kernel, lam_c, 'K')
    q_hat = laplace_hat(sym.kernel, lam_c, 'Q') if sym.b else 0.0
    valor = lam_c ** 2 + sym.a_sq + sym.b - k_hat * sym.a_sq - q_hat * sym.b
    return complex(valor) if lam_c.ndim == 0 else valor


def l_prime(sym: ModeSymbol, lam: Numero) -> Numero:
    """l_n'(λ) = 2λ + a²Σc_k/(λ+γ_k)² + b·Σd_k/(λ+γ_k)²"""
    lam_c = np.asarray(lam, dtype=complex)
    k_prima = laplace_hat_prime(sym.kernel, lam_c, 'K')
    q_prima = laplace_hat_prime(sym.kernel, lam_c, 'Q') if sym.b else 0.0
    valor = 2.0 * lam_c - k_prima * sym.a_sq - q_prima * sym.b
    return complex(valor) if lam_c.ndim == 0 else valor


def producto_lineal(gammas: np.ndarray) -> np.ndarray:
    """Coeficientes de Π(λ+γ_k) por convolución iterada"""
    coeficientes = np.array([1.0])
    for gamma in gammas:
        coeficientes = np.convolve(coeficientes, [1.0, gamma])
    return coeficientes


def to_polynomial(sym: ModeSymbol) -> PolySymbol:
    """
    p_n(λ) = (λ² + a² + b)·Π(λ+γ_k) - Σ_k (a²c_k + b·d_k)·Π_{j≠k}(λ+γ_j)

    Raises:
        ConditioningRefusal si N > 40
    """
    N = sym.kernel.N
    if N > MAX_GRADO_NUCLEO:
        raise ConditioningRefusal(
            f"forma polinomial rechazada para N={N} > {MAX_GRADO_NUCLEO}; use la forma racional"
        )

    gammas = sym.kernel.gammas
    coeficientes = np.convolve([1.0, 0.0, sym.a_sq + sym.b], producto_lineal(gammas))
    for k, peso in enumerate(sym.pesos_memoria):
        parcial = producto_lineal(np.delete(gammas, k))
        coeficientes[-len(parcial):] -= peso * parcial

    return PolySymbol(coeficientes=tuple(coeficientes.tolist()), n=sym.n)
