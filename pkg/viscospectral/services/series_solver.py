"""
Servicio de series de residuos

u_n(t) = Σ_λ (φ_{1n} + λ·φ_{0n}) e^{λt} / l_n'(λ)                (datos iniciales)
u_n(t) = Σ_λ ∫_0^t f_n(τ) e^{λ(t-τ)} dτ / l_n'(λ)                (forzamiento)

sumando sobre las N+2 raíces de cada modo. Las convoluciones de términos
exponencial-polinómicos se evalúan en forma cerrada.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid

from ..errores import (
    DimensionMismatch,
    DomainRestriction,
    ForcingSpecError,
    MissingSpectrum,
    ModelMismatch,
)
from ..modelos.operator_model import (
    ForcingSpec,
    ModeVector,
    OperatorSpec,
    autofuncion_dirichlet,
    forcing_eval,
    h_beta_norm,
)
from .spectrum_solver import EspectroCompleto

logger = logging.getLogger(__name__)

TOL_CONFLUENCIA = 1e-8
TERMINOS_TAYLOR = 30
TOL_REALIDAD = 1e-10
PUNTOS_NORMA = 4001

Tiempo = Union[float, np.ndarray]


@dataclass
class SolutionSeries:
    """
    Expansión en residuos de una solución

    Args:
        espectro: raíces y pesos 1/l_n'(λ) de cada modo
        coeficientes: (n_max, N+2) coeficientes homogéneos (φ_1n + λφ_0n)/l_n'(λ)
        forzamiento: descriptor de f (cero para datos iniciales puros)
        phi0, phi1: datos iniciales usados
    """
    espectro: EspectroCompleto
    coeficientes: np.ndarray
    forzamiento: ForcingSpec
    phi0: ModeVector
    phi1: ModeVector

    @property
    def operador(self) -> OperatorSpec:
        return self.espectro.operador

    @property
    def n_max(self) -> int:
        return self.operador.n_max

    @property
    def raices(self) -> np.ndarray:
        return np.array([m.raices() for m in self.espectro.modos])

    @property
    def pesos(self) -> np.ndarray:
        return np.array([m.pesos() for m in self.espectro.modos])

    def termino(self, n: int):
        """Pares (raíz, coeficiente homogéneo) del modo n"""
        return list(zip(self.espectro.modo(n).raices(), self.coeficientes[n - 1]))


def _validar_espectro(espectro: Optional[EspectroCompleto], n_datos: int) -> None:
    if espectro is None or not espectro.modos:
        raise MissingSpectrum("se requiere el espectro calculado antes de armar la serie")
    if len(espectro.modos) != n_datos:
        raise DimensionMismatch(f"espectro con {len(espectro.modos)} modos para datos de longitud {n_datos}")


def homogeneous_series(espectro: EspectroCompleto, phi0: ModeVector, phi1: ModeVector) -> SolutionSeries:
    """Serie para datos iniciales (φ0, φ1) sin forzamiento"""
    _validar_espectro(espectro, len(phi0))
    if len(phi1) != len(phi0):
        raise DimensionMismatch(f"φ0 tiene {len(phi0)} modos y φ1 {len(phi1)}")

    raices = np.array([m.raices() for m in espectro.modos])
    pesos = np.array([m.pesos() for m in espectro.modos])
    coeficientes = (phi1.como_arreglo()[:, None] + raices * phi0.como_arreglo()[:, None]) * pesos
    return SolutionSeries(espectro, coeficientes, ForcingSpec.cero(), phi0, phi1)


def forced_series(espectro: EspectroCompleto, f: ForcingSpec) -> SolutionSeries:
    """Serie para el forzamiento f con datos iniciales nulos"""
    n_max = espectro.operador.n_max if espectro is not None else 0
    _validar_espectro(espectro, n_max)
    if f.n_modos not in (0, n_max):
        raise DimensionMismatch(f"forzamiento con {f.n_modos} modos para n_max={n_max}")
    ceros = ModeVector.ceros(n_max)
    coeficientes = np.zeros((n_max, espectro.kernel.N + 2), dtype=complex)
    return SolutionSeries(espectro, coeficientes, f, ceros, ceros)


def _sumar_forzamientos(f1: ForcingSpec, f2: ForcingSpec) -> ForcingSpec:
    if f1.es_cero:
        return f2
    if f2.es_cero:
        return f1
    if f1.aproximada or f2.aproximada:
        if f1.malla_t != f2.malla_t:
            raise ForcingSpecError("no se pueden superponer forzamientos muestreados en mallas distintas")
        muestras = tuple(tuple(a + b for a, b in zip(x, y)) for x, y in zip(f1.muestras, f2.muestras))
        return ForcingSpec(malla_t=f1.malla_t, muestras=muestras)
    n = max(len(f1.terms), len(f2.terms))
    return ForcingSpec(terms=tuple(f1.terminos(k) + f2.terminos(k) for k in range(1, n + 1)))


def superpose(s1: SolutionSeries, s2: SolutionSeries) -> SolutionSeries:
    """Suma de dos series sobre el mismo espectro"""
    if s1.espectro is not s2.espectro and (
            s1.operador != s2.operador or s1.espectro.kernel != s2.espectro.kernel):
        raise DimensionMismatch("las series deben compartir operador y núcleo")
    return SolutionSeries(
        espectro=s1.espectro,
        coeficientes=s1.coeficientes + s2.coeficientes,
        forzamiento=_sumar_forzamientos(s1.forzamiento, s2.forzamiento),
        phi0=ModeVector(tuple(a + b for a, b in zip(s1.phi0.coeffs, s2.phi0.coeffs))),
        phi1=ModeVector(tuple(a + b for a, b in zip(s1.phi1.coeffs, s2.phi1.coeffs))),
    )


# ============================================================================
# CONVOLUCIONES EN FORMA CERRADA
# ============================================================================

def convolucion_exponencial(m: int, mu: float, lam: Union[complex, np.ndarray], t: Tiempo) -> np.ndarray:
    """
    J_m(t) = ∫_0^t τ^m e^{μτ} e^{λ(t-τ)} dτ, difundiendo λ contra t

    Con s = μ - λ:
        |s| < 1e-8        →  e^{λt} t^{m+1}/(m+1)
        |s|·t ≤ 1         →  e^{λt} Σ_j s^j t^{m+j+1} / (j!(m+j+1))
        en otro caso      →  J_0 = e^{λt}·expm1(st)/s,  J_i = (t^i e^{μt} - i·J_{i-1})/s
    """
    lam_b, t_b = np.broadcast_arrays(np.asarray(lam, dtype=complex), np.asarray(t, dtype=float))
    s = mu - lam_b
    exp_lam = np.exp(lam_b * t_b)
    resultado = np.zeros(t_b.shape, dtype=complex)

    confluente = np.abs(s) < TOL_CONFLUENCIA
    taylor = ~confluente & (np.abs(s) * t_b <= 1.0)
    recursion = ~(confluente | taylor)

    if confluente.any():
        tc = t_b[confluente]
        resultado[confluente] = exp_lam[confluente] * tc ** (m + 1) / (m + 1)

    if taylor.any():
        st, tt = s[taylor] * t_b[taylor], t_b[taylor]
        suma = np.zeros(st.shape, dtype=complex)
        potencia = np.ones(st.shape, dtype=complex)
        for j in range(TERMINOS_TAYLOR):
            suma += potencia / (m + j + 1)
            potencia = potencia * st / (j + 1)
        resultado[taylor] = exp_lam[taylor] * tt ** (m + 1) * suma

    if recursion.any():
        sr, tr, er = s[recursion], t_b[recursion], exp_lam[recursion]
        exp_mu = np.exp(mu * tr)
        j_actual = er * np.expm1(sr * tr) / sr
        for i in range(1, m + 1):
            j_actual = (tr ** i * exp_mu - i * j_actual) / sr
        resultado[recursion] = j_actual

    return resultado


def _convolucion_muestreada(f: ForcingSpec, n: int, lam: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Trapecio sobre la malla de muestras; lam (R,), t (T,) → (R, T)"""
    malla = np.asarray(f.malla_t)
    resultado = np.zeros((len(lam), len(t)), dtype=complex)
    for j, tj in enumerate(t):
        tau = np.append(malla[malla < tj], tj)
        valores = forcing_eval(f, n, tau)
        integrando = valores[None, :] * np.exp(np.multiply.outer(lam, tj - tau))
        resultado[:, j] = trapezoid(integrando, x=tau, axis=-1)
    return resultado


def integral_forzada(f: ForcingSpec, n: int, lam: np.ndarray, t: np.ndarray) -> np.ndarray:
    """I(t) = ∫_0^t f_n(τ) e^{λ(t-τ)} dτ para cada λ (R,) y t (T,) → (R, T)"""
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if f.aproximada:
        return _convolucion_muestreada(f, n, lam, t)
    total = np.zeros((len(lam), len(t)), dtype=complex)
    for term in f.terminos(n):
        total += term.alpha * convolucion_exponencial(term.m, term.mu, lam[:, None], t[None, :])
    return total


# ============================================================================
# EVALUACIÓN
# ============================================================================

def _evaluar_modo(s: SolutionSeries, n: int, t: np.ndarray, p: int) -> np.ndarray:
    modo = s.espectro.modo(n)
    raices = modo.raices()
    exponenciales = np.exp(np.multiply.outer(raices, t))
    valor = (s.coeficientes[n - 1] * raices ** p) @ exponenciales

    if s.forzamiento.es_cero:
        return valor
    integral = integral_forzada(s.forzamiento, n, raices, t)
    if p == 0:
        derivada = integral
    else:
        f_t = forcing_eval(s.forzamiento, n, t)
        if p == 1:
            derivada = f_t[None, :] + raices[:, None] * integral
        else:
            df_t = forcing_eval(s.forzamiento, n, t, derivative_order=1)
            derivada = (df_t[None, :] + raices[:, None] * f_t[None, :]
                        + raices[:, None] ** 2 * integral)
    return valor + modo.pesos() @ derivada


def eval_series_malla(s: SolutionSeries, t: Sequence[float], p: int = 0, real: bool = True) -> np.ndarray:
    """
    u_n^{(p)}(t) para todos los modos sobre una malla de tiempos → (n_max, T)

    Raises:
        DomainRestriction si p = 2 en t = 0 con un núcleo truncado de familia infinita
    """
    if p not in (0, 1, 2):
        raise ValueError(f"p={p} debe ser 0, 1 o 2")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(t < 0):
        raise ValueError("eval_series requiere t ≥ 0")
    if p == 2 and s.espectro.kernel.truncada and np.any(t == 0):
        raise DomainRestriction("p=2 exige t > 0 para núcleos de una familia infinita truncada")

    valores = np.array([_evaluar_modo(s, n, t, p) for n in range(1, s.n_max + 1)])
    if not real:
        return valores

    imaginaria = np.abs(valores.imag)
    if np.any(imaginaria > TOL_REALIDAD * (1.0 + np.abs(valores.real))):
        logger.warning(f"⚠️ Parte imaginaria residual {float(np.max(imaginaria)):.3g} en la serie")
    return valores.real


def eval_series(s: SolutionSeries, t: float, p: int = 0, real: bool = True) -> ModeVector:
    """{u_n^{(p)}(t)} como vector modal"""
    valores = eval_series_malla(s, [t], p, real=real)[:, 0]
    return ModeVector(tuple(valores.tolist()))


def memory_states(s: SolutionSeries, n: int, t: Tiempo) -> np.ndarray:
    """
    w_k(t) = ∫_0^t e^{-γ_k(t-σ)} u_n(σ) dσ, k = 1..N, en forma cerrada → (N, T)

    Homogénea: Σ_λ c_λ (e^{λt} - e^{-γt})/(λ+γ)
    Forzada:   Σ_λ w_λ (I_λ(t) - I_{-γ}(t))/(λ+γ)
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    modo = s.espectro.modo(n)
    raices = modo.raices()
    gammas = s.espectro.kernel.gammas
    estados = np.zeros((len(gammas), len(t)), dtype=complex)

    if not s.forzamiento.es_cero:
        integral = integral_forzada(s.forzamiento, n, raices, t)
        integral_gamma = integral_forzada(s.forzamiento, n, -gammas, t)

    for k, gamma in enumerate(gammas):
        denominador = (raices + gamma)[:, None]
        diferencia = np.exp(np.multiply.outer(raices, t)) - np.exp(-gamma * t)[None, :]
        estados[k] = s.coeficientes[n - 1] @ (diferencia / denominador)
        if not s.forzamiento.es_cero:
            estados[k] += modo.pesos() @ ((integral - integral_gamma[k][None, :]) / denominador)
    return estados.real


def equation_residual(s: SolutionSeries, t: Sequence[float]) -> np.ndarray:
    """
    u_n'' + (a_n²+b_n)u_n - Σ(a_n²c_k + b_n d_k) w_k - f_n por modo → (n_max, T)
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    op = s.operador
    kernel = s.espectro.kernel
    u = eval_series_malla(s, t, 0)
    u2 = eval_series_malla(s, t, 2)
    residuos = np.zeros_like(u)
    for n in range(1, s.n_max + 1):
        a_n, b_n = op.modo(n)
        pesos = a_n ** 2 * kernel.c + b_n * kernel.d
        memoria = pesos @ memory_states(s, n, t) if kernel.N else 0.0
        f_n = forcing_eval(s.forzamiento, n, t) if not s.forzamiento.es_cero else 0.0
        residuos[n - 1] = u2[n - 1] + (a_n ** 2 + b_n) * u[n - 1] - memoria - f_n
    return residuos


def evaluate_physical(s: SolutionSeries, x_grid: Sequence[float], t: float) -> np.ndarray:
    """
    u(x, t) = Σ_n u_n(t)·√(2/π)·sin(n x)

    Raises:
        ModelMismatch si el operador no es el laplaciano de Dirichlet en (0, π)
    """
    if s.operador.model != 'dirichlet_1d':
        raise ModelMismatch("evaluate_physical requiere un operador 'dirichlet_1d'")
    x = np.asarray(x_grid, dtype=float)
    u_n = eval_series_malla(s, [t], 0)[:, 0]
    base = np.array([autofuncion_dirichlet(n, x) for n in range(1, s.n_max + 1)])
    return u_n @ base


def _norma_l2_gamma_forzamiento(f: ForcingSpec, op: OperatorSpec, beta: float, orden: int,
                                gamma: float, horizonte: float, puntos: int = PUNTOS_NORMA) -> float:
    """‖A₀^β f^{(orden)}‖²_{L2,γ} por trapecio sobre [0, horizonte]"""
    t = np.linspace(0.0, horizonte, puntos)
    pesos = op.a0_sq ** beta
    integrando = np.zeros_like(t)
    for n in range(1, op.n_max + 1):
        integrando += pesos[n - 1] * np.abs(forcing_eval(f, n, t, derivative_order=orden)) ** 2
    return float(trapezoid(np.exp(-2.0 * gamma * t) * integrando, t))


def series_norm_bounds(s: SolutionSeries, gamma: float, p: int,
                       t_grid: Optional[Sequence[float]] = None,
                       puntos_norma: int = PUNTOS_NORMA) -> Dict[str, Any]:
    """
    Lado izquierdo sup_t ‖u^{(p)}(t)‖²_{H_{2-p}} contra el lado derecho de las cotas

    Datos iniciales: ‖A₀φ1‖² + ‖A₀²φ0‖².
    Forzamiento: ‖A₀²f‖²_{L2,γ} para p=0; ‖A₀^{2-p}f^{(p)}‖²_{L2,γ} + ‖A₀^{2-p}f(0)‖² + (p-1)‖f'(0)‖²
    para p = 1, 2. Ambos lados son de grado 2 en los datos; el cociente es el reporte.
    """
    if p not in (0, 1, 2):
        raise ValueError(f"p={p} debe ser 0, 1 o 2")
    t = np.asarray(t_grid if t_grid is not None else np.linspace(0.1, 5.0, 50), dtype=float)
    op = s.operador
    beta = 2 - p

    valores = eval_series_malla(s, t, p)
    normas = (op.a0_sq[:, None] ** beta * valores ** 2).sum(axis=0)
    indice = int(np.argmax(normas))
    lhs = float(normas[indice])

    rhs_homogeneo = h_beta_norm(s.phi1, op, 1.0) ** 2 + h_beta_norm(s.phi0, op, 2.0) ** 2
    rhs_forzado = 0.0
    f = s.forzamiento
    if not f.es_cero:
        horizonte = float(t.max())
        if p == 0:
            rhs_forzado = _norma_l2_gamma_forzamiento(f, op, 2.0, 0, gamma, horizonte, puntos_norma)
        else:
            rhs_forzado = _norma_l2_gamma_forzamiento(f, op, float(beta), p, gamma, horizonte, puntos_norma)
            f0 = np.array([forcing_eval(f, n, 0.0) for n in range(1, op.n_max + 1)])
            rhs_forzado += float(np.sum(op.a0_sq ** beta * f0 ** 2))
            if p == 2:
                df0 = np.array([forcing_eval(f, n, 0.0, derivative_order=1) for n in range(1, op.n_max + 1)])
                rhs_forzado += float(np.sum(df0 ** 2))

    rhs = rhs_homogeneo + rhs_forzado
    degenerado = rhs == 0.0
    cociente = 0.0 if degenerado else lhs / rhs
    if not math.isfinite(cociente):
        logger.warning(f"⚠️ Cociente no finito en series_norm_bounds (p={p})")

    return {
        'p': p,
        'gamma': gamma,
        'lhs_sup': lhs,
        't_argmax': float(t[indice]),
        'rhs': rhs,
        'rhs_homogeneous': rhs_homogeneo,
        'rhs_forcing': rhs_forzado,
        'ratio': cociente,
        'degenerate': degenerado,
        'finite': bool(math.isfinite(lhs) and math.isfinite(cociente)),
    }


# ============================================================================
# TABLAS
# ============================================================================

def trace_frame(s: SolutionSeries, t_grid: Sequence[float]) -> pd.DataFrame:
    """Tabla larga (t, n, u, du, ddu)"""
    t = np.asarray(t_grid, dtype=float)
    derivadas = [eval_series_malla(s, t, p) for p in (0, 1, 2)]
    modos = np.repeat(np.arange(1, s.n_max + 1), len(t))
    return pd.DataFrame({
        't': np.tile(t, s.n_max),
        'n': modos,
        'u': derivadas[0].ravel(),
        'du': derivadas[1].ravel(),
        'ddu': derivadas[2].ravel(),
    })


def physical_frame(s: SolutionSeries, x_grid: Sequence[float], t_grid: Sequence[float]) -> pd.DataFrame:
    """Tabla (x, t, u) del campo físico"""
    x = np.asarray(x_grid, dtype=float)
    filas = []
    for tj in t_grid:
        campo = evaluate_physical(s, x, float(tj))
        filas.append(pd.DataFrame({'x': x, 't': float(tj), 'u': campo}))
    return pd.concat(filas, ignore_index=True)


def serie_del_problema(espectro: EspectroCompleto, phi0: ModeVector, phi1: ModeVector,
                       f: ForcingSpec) -> SolutionSeries:
    """Serie completa: datos iniciales más forzamiento"""
    serie = homogeneous_series(espectro, phi0, phi1)
    if f.es_cero:
        return serie
    return superpose(serie, forced_series(espectro, f))
