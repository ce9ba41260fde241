"""
Modelo de núcleos exponenciales (series de Prony)

K(t) = Σ c_j e^{-γ_j t} y Q(t) = Σ d_j e^{-γ_j t} sobre una malla γ compartida,
sus transformadas de Laplace, la función g(λ) = 1 - Σ c_k/(λ+γ_k) y los
diagnósticos de sumabilidad y estabilidad.
"""
import json
import logging
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errores import BracketFailure, KernelSpecError, PoleEvaluation

logger = logging.getLogger(__name__)

# Tolerancias
TOL_POLO = 1e-12            # relativa: |λ+γ_j| < TOL_POLO·max(1, γ_j)
TOL_BISECCION = 1e-13       # absoluta sobre la raíz x_k
MAX_ITER_BISECCION = 200
TOL_FRONTERA = 1e-9         # clasificación stable/unstable/boundary

Numero = Union[float, complex, np.ndarray]


@dataclass(frozen=True)
class KernelTerm:
    c: float
    d: float
    gamma: float


@dataclass(frozen=True)
class KernelSpec:
    """
    Truncación finita de los núcleos K y Q

    Args:
        terms: términos (c_j, d_j, γ_j) con γ estrictamente creciente
        truncada: True si el núcleo proviene de una familia infinita
                  (prony_family); activa la restricción p=2, t=0 de la serie forzada
    """
    terms: Tuple[KernelTerm, ...] = ()
    truncada: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'terms', tuple(self.terms))
        violacion = _primera_violacion(self.terms)
        if violacion is not None:
            raise KernelSpecError(violacion[1])

    @classmethod
    def from_arrays(cls, c: Sequence[float], gamma: Sequence[float],
                    d: Optional[Sequence[float]] = None, truncada: bool = False) -> 'KernelSpec':
        if d is None:
            d = [0.0] * len(c)
        if not (len(c) == len(gamma) == len(d)):
            raise KernelSpecError(
                f"longitudes distintas: c={len(c)}, d={len(d)}, gamma={len(gamma)}"
            )
        return cls(
            terms=tuple(KernelTerm(float(ci), float(di), float(gi)) for ci, di, gi in zip(c, d, gamma)),
            truncada=truncada,
        )

    @property
    def N(self) -> int:
        return len(self.terms)

    @cached_property
    def c(self) -> np.ndarray:
        return np.array([t.c for t in self.terms], dtype=float)

    @cached_property
    def d(self) -> np.ndarray:
        return np.array([t.d for t in self.terms], dtype=float)

    @cached_property
    def gammas(self) -> np.ndarray:
        return np.array([t.gamma for t in self.terms], dtype=float)

    def pesos(self, which: str = 'K') -> np.ndarray:
        if which == 'K':
            return self.c
        if which == 'Q':
            return self.d
        raise ValueError(f"núcleo desconocido: {which!r} (use 'K' o 'Q')")

    def escalar_c(self, factor: float) -> 'KernelSpec':
        """Copia con todos los c_j multiplicados por factor"""
        return KernelSpec.from_arrays(self.c * factor, self.gammas, self.d, truncada=self.truncada)

    def a_dict(self) -> Dict[str, Any]:
        return {'terms': [{'c': t.c, 'd': t.d, 'gamma': t.gamma} for t in self.terms]}


@dataclass(frozen=True)
class KernelDiagnostics:
    k_at_zero: float
    q_at_zero: float
    stability_index: float
    q_index: float
    classification: str

    def a_dict(self) -> Dict[str, Any]:
        return {
            'k_at_zero': self.k_at_zero,
            'q_at_zero': self.q_at_zero,
            'stability_index': self.stability_index,
            'q_index': self.q_index,
            'classification': self.classification,
        }


def _primera_violacion(terms: Sequence[KernelTerm]) -> Optional[Tuple[int, str]]:
    """Devuelve (índice, mensaje) del primer término inválido, o None"""
    anterior = 0.0
    for i, term in enumerate(terms):
        if not np.isfinite([term.c, term.d, term.gamma]).all():
            return i, f"término {i + 1}: valores no finitos"
        if term.gamma <= 0:
            return i, f"término {i + 1}: gamma={term.gamma} debe ser positivo"
        if term.c <= 0:
            return i, f"término {i + 1}: c={term.c} debe ser positivo"
        if term.d < 0:
            return i, f"término {i + 1}: d={term.d} debe ser no negativo"
        if i > 0 and term.gamma <= anterior:
            return i, (f"término {i + 1}: gamma={term.gamma} no es estrictamente "
                       f"mayor que {anterior}")
        anterior = term.gamma
    return None


def _lineas_gamma(texto: str) -> List[int]:
    """Número de línea de cada clave "gamma" del texto JSON, en orden"""
    return [texto.count('\n', 0, m.start()) + 1 for m in re.finditer(r'"gamma"\s*:', texto)]


def kernel_desde_json(fuente: Union[str, Dict[str, Any]], texto: Optional[str] = None) -> KernelSpec:
    """
    Carga un KernelSpec desde {"terms":[{"c":…, "d":…, "gamma":…}, …]}

    Args:
        fuente: texto JSON o diccionario ya decodificado
        texto: texto fuente completo (para anclar los errores a una línea
               cuando fuente es un diccionario extraído de un archivo mayor)

    Raises:
        KernelSpecError con la línea del término inválido
    """
    if isinstance(fuente, str):
        texto = fuente
        try:
            datos = json.loads(fuente)
        except json.JSONDecodeError as e:
            raise KernelSpecError(f"JSON inválido: {e.msg}", linea=e.lineno) from e
    else:
        datos = fuente

    if not isinstance(datos, dict) or not isinstance(datos.get('terms', []), list):
        raise KernelSpecError("se esperaba un objeto con la lista 'terms'")

    lineas = _lineas_gamma(texto) if texto else []
    terminos = []
    for i, bruto in enumerate(datos.get('terms', [])):
        linea = lineas[i] if i < len(lineas) else None
        try:
            terminos.append(KernelTerm(
                c=float(bruto['c']),
                d=float(bruto.get('d', 0.0)),
                gamma=float(bruto['gamma']),
            ))
        except (KeyError, TypeError, ValueError) as e:
            raise KernelSpecError(f"término {i + 1} mal formado: {e}", linea=linea) from e

    violacion = _primera_violacion(terminos)
    if violacion is not None:
        indice, mensaje = violacion
        raise KernelSpecError(mensaje, linea=lineas[indice] if indice < len(lineas) else None)
    return KernelSpec(terms=tuple(terminos))


# ============================================================================
# OPERACIONES
# ============================================================================

def eval_kernel(spec: KernelSpec, t: Numero, which: str = 'K') -> Numero:
    """K(t) o Q(t) = Σ w_j e^{-γ_j t}"""
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("eval_kernel requiere t ≥ 0")
    pesos = spec.pesos(which)
    if spec.N == 0:
        return 0.0 if t_arr.ndim == 0 else np.zeros_like(t_arr)
    valores = np.exp(-np.multiply.outer(t_arr, spec.gammas)) @ pesos
    return float(valores) if t_arr.ndim == 0 else valores


def _verificar_polos(spec: KernelSpec, lam: np.ndarray) -> None:
    if spec.N == 0:
        return
    distancia = np.abs(lam[..., None] + spec.gammas)
    cerca = distancia < TOL_POLO * np.maximum(1.0, spec.gammas)
    if np.any(cerca):
        indice = np.argwhere(cerca)[0]
        raise PoleEvaluation(complex(lam[tuple(indice[:-1])]), float(spec.gammas[indice[-1]]))


def laplace_hat(spec: KernelSpec, lam: Numero, which: str = 'K') -> Numero:
    """
    Transformada de Laplace Σ w_j/(λ+γ_j)

    Acepta escalares o arreglos de λ.

    Raises:
        PoleEvaluation si λ está a menos de TOL_POLO·max(1,γ_j) de -γ_j
    """
    lam_arr = np.asarray(lam, dtype=complex)
    _verificar_polos(spec, lam_arr)
    if spec.N == 0:
        return 0j if lam_arr.ndim == 0 else np.zeros_like(lam_arr)
    valores = (1.0 / (lam_arr[..., None] + spec.gammas)) @ spec.pesos(which)
    return complex(valores) if lam_arr.ndim == 0 else valores


def laplace_hat_prime(spec: KernelSpec, lam: Numero, which: str = 'K') -> Numero:
    """Derivada d/dλ de la transformada: -Σ w_j/(λ+γ_j)²"""
    lam_arr = np.asarray(lam, dtype=complex)
    _verificar_polos(spec, lam_arr)
    if spec.N == 0:
        return 0j if lam_arr.ndim == 0 else np.zeros_like(lam_arr)
    valores = -(1.0 / (lam_arr[..., None] + spec.gammas) ** 2) @ spec.pesos(which)
    return complex(valores) if lam_arr.ndim == 0 else valores


def diagnostics(spec: KernelSpec, boundary_tol: float = TOL_FRONTERA) -> KernelDiagnostics:
    """
    K(0), Q(0), índices Σc/γ y Σd/γ, y la clasificación de estabilidad

    stable si Σc_j/γ_j < 1 (espectro en el semiplano izquierdo), unstable si > 1,
    boundary si |Σc_j/γ_j - 1| ≤ boundary_tol.
    """
    if boundary_tol <= 0:
        raise ValueError("boundary_tol debe ser positivo")
    indice = float(np.sum(spec.c / spec.gammas)) if spec.N else 0.0
    if abs(indice - 1.0) <= boundary_tol:
        clasificacion = 'boundary'
    elif indice < 1.0:
        clasificacion = 'stable'
    else:
        clasificacion = 'unstable'
    return KernelDiagnostics(
        k_at_zero=float(np.sum(spec.c)),
        q_at_zero=float(np.sum(spec.d)),
        stability_index=indice,
        q_index=float(np.sum(spec.d / spec.gammas)) if spec.N else 0.0,
        classification=clasificacion,
    )


def g_eval(spec: KernelSpec, lam: float) -> float:
    """g(λ) = 1 - Σ c_k/(λ+γ_k)"""
    return float(np.real(1.0 - laplace_hat(spec, complex(lam), 'K')))


def _g_sin_guardia(spec: KernelSpec, lam: float) -> float:
    # solo se evalúa en puntos interiores de un intervalo entre polos
    return 1.0 - float(np.sum(spec.c / (lam + spec.gammas)))


def _biseccion_monotona(spec: KernelSpec, lo: float, hi: float) -> float:
    """Cero de g en (lo, hi), donde g es creciente y g(lo+) = -∞"""
    for _ in range(MAX_ITER_BISECCION):
        medio = 0.5 * (lo + hi)
        if medio <= lo or medio >= hi:
            break
        if _g_sin_guardia(spec, medio) < 0:
            lo = medio
        else:
            hi = medio
        if hi - lo <= TOL_BISECCION:
            break
    return 0.5 * (lo + hi)


def g_real_zeros(spec: KernelSpec) -> List[float]:
    """
    Ceros reales x_1 > x_2 > ... > x_N de g

    x_1 ∈ (-γ_1, +∞) y x_k ∈ (-γ_k, -γ_{k-1}) para k ≥ 2; g es estrictamente
    creciente entre polos consecutivos, de modo que hay exactamente un cero por intervalo.

    Raises:
        BracketFailure si no se localiza el cambio de signo
    """
    if spec.N < 1:
        raise ValueError("g_real_zeros requiere N ≥ 1")

    gammas = spec.gammas
    ceros = []

    # x_1: extremo superior expandido hasta que g > 0
    hi = 1.0
    while _g_sin_guardia(spec, hi) <= 0:
        hi *= 2.0
        if hi > 1e15:
            raise BracketFailure("no se encontró g > 0 a la derecha de -γ_1",
                                 intervalo=(-gammas[0], hi), signos=(-1.0, -1.0))
    intervalos = [(-gammas[0], hi)]
    intervalos += [(-gammas[k], -gammas[k - 1]) for k in range(1, spec.N)]

    for k, (lo, hi) in enumerate(intervalos, start=1):
        raiz = _biseccion_monotona(spec, lo, hi)
        tol_lo = TOL_POLO * max(1.0, abs(lo))
        tol_hi = TOL_POLO * max(1.0, abs(hi))
        if raiz - lo <= tol_lo or (k > 1 and hi - raiz <= tol_hi):
            raise BracketFailure(
                f"el cero x_{k} colapsó sobre un polo",
                intervalo=(lo, hi),
                signos=(-1.0, float(np.sign(_g_sin_guardia(spec, raiz)))),
            )
        ceros.append(raiz)

    logger.debug(f"Ceros de g: {ceros}")
    return ceros


def asymptotic_diagnostics(gamma_rule: Callable[[int], float], j_max: int,
                           c_rule: Optional[Callable[[int], float]] = None,
                           d_rule: Optional[Callable[[int], float]] = None) -> Dict[str, Any]:
    """
    Diagnósticos de una familia infinita γ_j = rule(j) hasta j_max

    Reporta el máximo corrido de γ_k(γ_{k+1} - γ_k) y la suma parcial de γ_j^{-3/2}.
    Las condiciones son sobre familias infinitas: el reporte es solo informativo.
    Con c_rule/d_rule se agregan las sumas parciales de Σc_j, Σc_j/γ_j, Σd_j, Σd_j/γ_j.
    """
    if j_max < 2:
        raise ValueError("asymptotic_diagnostics requiere j_max ≥ 2")

    gammas = np.array([float(gamma_rule(j)) for j in range(1, j_max + 2)])
    productos = gammas[:-1] * np.diff(gammas)
    maximo_corrido = np.maximum.accumulate(productos)

    reporte: Dict[str, Any] = {
        'j_max': j_max,
        'running_max_gap_product': float(maximo_corrido[-1]),
        'gap_products': productos.tolist(),
        'monotone_growth': bool(np.all(np.diff(productos) >= 0)),
        'gamma_strictly_increasing': bool(np.all(np.diff(gammas) > 0)),
        'partial_sum_gamma_pow_minus_3_2': float(np.sum(gammas[:j_max] ** -1.5)),
    }

    for nombre, regla in (('c', c_rule), ('d', d_rule)):
        if regla is None:
            continue
        pesos = np.array([float(regla(j)) for j in range(1, j_max + 1)])
        reporte[f'partial_sum_{nombre}'] = float(np.sum(pesos))
        reporte[f'partial_sum_{nombre}_over_gamma'] = float(np.sum(pesos / gammas[:j_max]))

    return reporte


def prony_family(c_rule: Callable[[int], float], gamma_rule: Callable[[int], float],
                 n_terms: int, d_rule: Optional[Callable[[int], float]] = None) -> KernelSpec:
    """
    Truncación a n_terms de una familia infinita de Prony

    El resultado queda marcado como truncada=True.
    """
    if n_terms < 0:
        raise ValueError("n_terms debe ser no negativo")
    indices = range(1, n_terms + 1)
    c = [float(c_rule(j)) for j in indices]
    gamma = [float(gamma_rule(j)) for j in indices]
    d = [float(d_rule(j)) for j in indices] if d_rule else None
    return KernelSpec.from_arrays(c, gamma, d, truncada=True)
