"""
Oráculos independientes para la ecuación por modo

u'' + (a²+b)u - ∫_0^t Σ(a²c_k + b·d_k) e^{-γ_k(t-s)} u(s) ds = f_n(t)

integrate_mode aumenta el estado con las memorias w_k(t) = ∫_0^t e^{-γ_k(t-s)}u(s)ds
(w_k' = -γ_k w_k + u) e integra con RK4 de paso fijo. integrate_quadrature evalúa
la convolución directamente con trapecios dentro de un paso de Heun.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np

from ..errores import DimensionMismatch, StepSizeTooLarge
from ..modelos.kernel_model import KernelSpec
from ..modelos.mode_symbol import ModeSymbol
from ..modelos.operator_model import ForcingSpec, ModeVector, OperatorSpec, forcing_eval

logger = logging.getLogger(__name__)

LIMITE_ESTABILIDAD = 0.1    # dt·max(γ_N, a_0) ≤ 0.1


@dataclass
class Trace:
    """Traza de un modo en cada paso: t, u, v = u' y memorias w (N, pasos+1)"""
    n: int
    t: np.ndarray
    u: np.ndarray
    v: np.ndarray
    w: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))

    def en(self, t: float) -> float:
        """u interpolado linealmente en t"""
        return float(np.interp(t, self.t, self.u))


def _validar_paso(sym: ModeSymbol, T: float, dt: float) -> int:
    if dt <= 0 or T <= 0:
        raise ValueError(f"dt={dt} y T={T} deben ser positivos")
    gamma_max = float(sym.kernel.gammas[-1]) if sym.kernel.N else 0.0
    rigidez = dt * max(gamma_max, sym.a, math.sqrt(sym.a_sq + sym.b))
    if rigidez > LIMITE_ESTABILIDAD:
        raise StepSizeTooLarge(
            f"modo {sym.n}: dt·max(γ_N, a)={rigidez:.4g} > {LIMITE_ESTABILIDAD}; reduzca dt"
        )
    return max(1, int(round(T / dt)))


def matriz_aumentada(sym: ModeSymbol) -> np.ndarray:
    """Matriz M del sistema lineal y' = M·y + f(t)·e_v con y = [u, v, w_1..w_N]"""
    N = sym.kernel.N
    M = np.zeros((N + 2, N + 2))
    M[0, 1] = 1.0
    M[1, 0] = -(sym.a_sq + sym.b)
    M[1, 2:] = sym.pesos_memoria
    M[2:, 0] = 1.0
    M[2:, 2:] = -np.diag(sym.kernel.gammas)
    return M


def _etapas_rk4(M: np.ndarray, y: np.ndarray, f0: float, fm: float, f1: float,
                h: float, e: np.ndarray) -> np.ndarray:
    k1 = M @ y + f0 * e
    k2 = M @ (y + 0.5 * h * k1) + fm * e
    k3 = M @ (y + 0.5 * h * k2) + fm * e
    k4 = M @ (y + h * k3) + f1 * e
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate_mode(sym: ModeSymbol, phi0_n: float, phi1_n: float, f: ForcingSpec,
                   T: float, dt: float) -> Trace:
    """
    RK4 clásico sobre el estado aumentado [u, v, w_1..w_N]

    El sistema es lineal con coeficientes constantes: el paso RK4 se reduce a
    y ← R·y + f(t_i)·b0 + f(t_i + h/2)·b½ + f(t_i + h)·b1, con R y b precalculados.

    Raises:
        StepSizeTooLarge si dt·max(γ_N, a_n) > 0.1
    """
    pasos = _validar_paso(sym, T, dt)
    h = T / pasos
    M = matriz_aumentada(sym)
    dim = M.shape[0]
    e = np.zeros(dim)
    e[1] = 1.0
    ceros = np.zeros(dim)

    R = _etapas_rk4(M, np.eye(dim), 0.0, 0.0, 0.0, h, e[:, None])
    b0 = _etapas_rk4(M, ceros, 1.0, 0.0, 0.0, h, e)
    b_medio = _etapas_rk4(M, ceros, 0.0, 1.0, 0.0, h, e)
    b1 = _etapas_rk4(M, ceros, 0.0, 0.0, 1.0, h, e)

    t = np.linspace(0.0, pasos * h, pasos + 1)
    if f.es_cero:
        f_nodos = np.zeros(pasos + 1)
        f_medios = np.zeros(pasos)
    else:
        f_nodos = forcing_eval(f, sym.n, t)
        f_medios = forcing_eval(f, sym.n, t[:-1] + 0.5 * h)

    estados = np.zeros((pasos + 1, dim))
    estados[0, 0] = phi0_n
    estados[0, 1] = phi1_n
    for i in range(pasos):
        estados[i + 1] = (R @ estados[i] + f_nodos[i] * b0
                          + f_medios[i] * b_medio + f_nodos[i + 1] * b1)

    logger.debug(f"Oráculo RK4 modo {sym.n}: {pasos} pasos, h={h:.3g}")
    return Trace(n=sym.n, t=t, u=estados[:, 0].copy(), v=estados[:, 1].copy(),
                 w=estados[:, 2:].T.copy())


def integrate_quadrature(sym: ModeSymbol, phi0_n: float, phi1_n: float, f: ForcingSpec,
                         T: float, dt: float) -> Trace:
    """
    Heun de dos etapas con la convolución evaluada por trapecios

    M_j = dt·(Σ_{i≤j} k_{j-i} u_i - ½k_j u_0 - ½k_0 u_j), trabajo O(T²/dt²);
    pensado para horizontes cortos.
    """
    pasos = _validar_paso(sym, T, dt)
    h = T / pasos
    t = np.linspace(0.0, pasos * h, pasos + 1)
    nucleo = (np.exp(-np.multiply.outer(t, sym.kernel.gammas)) @ sym.pesos_memoria
              if sym.kernel.N else np.zeros_like(t))
    a0_sq = sym.a_sq + sym.b
    f_nodos = forcing_eval(f, sym.n, t) if not f.es_cero else np.zeros_like(t)

    u = np.zeros(pasos + 1)
    v = np.zeros(pasos + 1)
    u[0], v[0] = phi0_n, phi1_n

    def memoria(j: int) -> float:
        if j == 0:
            return 0.0
        return h * (np.dot(nucleo[j::-1], u[:j + 1]) - 0.5 * nucleo[j] * u[0] - 0.5 * nucleo[0] * u[j])

    aceleracion = f_nodos[0] - a0_sq * u[0]
    for j in range(pasos):
        u[j + 1] = u[j] + h * v[j]
        v_pred = v[j] + h * aceleracion
        aceleracion_pred = f_nodos[j + 1] - a0_sq * u[j + 1] + memoria(j + 1)
        u[j + 1] = u[j] + 0.5 * h * (v[j] + v_pred)
        v[j + 1] = v[j] + 0.5 * h * (aceleracion + aceleracion_pred)
        aceleracion = f_nodos[j + 1] - a0_sq * u[j + 1] + memoria(j + 1)

    return Trace(n=sym.n, t=t, u=u, v=v, w=memory_from_samples(t, u, sym.kernel.gammas))


def memory_from_samples(t: np.ndarray, u: np.ndarray, gammas: np.ndarray) -> np.ndarray:
    """
    Trapecio de w_k(t_j) = ∫_0^{t_j} e^{-γ_k(t_j-s)} u(s) ds → (N, len(t))

    Se acumula con w_{j+1} = e^{-γh_j}·w_j + h_j/2·(e^{-γh_j}u_j + u_{j+1}).
    """
    t = np.asarray(t, dtype=float)
    u = np.asarray(u, dtype=float)
    gammas = np.asarray(gammas, dtype=float)
    if t.shape != u.shape:
        raise DimensionMismatch(f"t {t.shape} y u {u.shape} deben coincidir")
    w = np.zeros((len(gammas), len(t)))
    for j in range(len(t) - 1):
        h = t[j + 1] - t[j]
        decaimiento = np.exp(-gammas * h)
        w[:, j + 1] = decaimiento * w[:, j] + 0.5 * h * (decaimiento * u[j] + u[j + 1])
    return w


def integrate_problem(op: OperatorSpec, kernel: KernelSpec, phi0: ModeVector, phi1: ModeVector,
                      f: ForcingSpec, T: float, dt: float,
                      integrador=integrate_mode) -> List[Trace]:
    """Oráculo para todos los modos (B ≠ 0 permitido)"""
    if len(phi0) != op.n_max or len(phi1) != op.n_max:
        raise DimensionMismatch(f"datos iniciales de longitud {len(phi0)}/{len(phi1)} para n_max={op.n_max}")
    logger.info(f"📊 Oráculo de Volterra: {op.n_max} modos, T={T}, dt={dt}")
    trazas = []
    for n in range(1, op.n_max + 1):
        sym = ModeSymbol.desde_operador(op, kernel, n)
        trazas.append(integrador(sym, float(np.real(phi0[n])), float(np.real(phi1[n])), f, T, dt))
    return trazas


def submuestrear(traza: Trace, t_malla: Optional[np.ndarray]) -> Trace:
    """Traza interpolada sobre t_malla (u, v y w)"""
    if t_malla is None:
        return traza
    t_malla = np.asarray(t_malla, dtype=float)
    w = (np.array([np.interp(t_malla, traza.t, fila) for fila in traza.w])
         if traza.w.size else np.zeros((0, len(t_malla))))
    return Trace(n=traza.n, t=t_malla, u=np.interp(t_malla, traza.t, traza.u),
                 v=np.interp(t_malla, traza.t, traza.v), w=w)
