"""
Analizador de cotas en el dominio de Laplace y de la estimación de solubilidad

Las desigualdades de operadores se verifican en forma escalar sobre la diagonal
(exacto para el modelo diagonal). La estimación de solubilidad se verifica como
cociente acotado ‖u‖_{W²_{2,γ}} / (‖f'‖_{L2,γ} + ‖A₀²φ0‖ + ‖A₀φ1‖).
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import trapezoid

from ..configuracion import ProblemInstance
from ..errores import BoundViolation, InadmissibleProblem, InsufficientHorizon, NotFound
from ..modelos.kernel_model import KernelSpec, laplace_hat
from ..modelos.operator_model import (
    ForcingSpec,
    ForcingTerm,
    ModeVector,
    OperatorSpec,
    forcing_eval,
    h_beta_norm,
)
from ..services.series_solver import eval_series_malla, serie_del_problema
from ..services.spectrum_solver import EspectroCompleto, full_spectrum
from ..services.volterra_oracle import integrate_problem

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class WeightedNormSpec:
    gamma: float
    T_horizon: float
    paso: float = 1.25e-3

    def __post_init__(self):
        if self.gamma < 0:
            raise ValueError(f"gamma={self.gamma} debe ser no negativo")
        if self.T_horizon <= 0 or self.paso <= 0:
            raise ValueError("T_horizon y paso deben ser positivos")

    def malla(self) -> np.ndarray:
        puntos = max(2, int(round(self.T_horizon / self.paso)) + 1)
        return np.linspace(0.0, self.T_horizon, puntos)


@dataclass(frozen=True)
class NormaPonderada:
    valor: float
    cola: float
    integral: float
    tasa_crecimiento: float


@dataclass(frozen=True)
class RazonSolubilidad:
    ratio: float
    degenerate: bool
    method: str
    lhs: float
    rhs: float
    gamma: float
    tail: float

    def a_dict(self) -> Dict[str, Any]:
        return {
            'ratio': self.ratio, 'degenerate': self.degenerate, 'method': self.method,
            'lhs': self.lhs, 'rhs': self.rhs, 'gamma': self.gamma, 'tail': self.tail,
        }


# ============================================================================
# NORMAS PONDERADAS
# ============================================================================

def _tasa_de_envolvente(t: np.ndarray, integrando: np.ndarray) -> float:
    """Tasa ρ con integrando ~ e^{2ρt}, comparando máximos en [T/2, 3T/4] y [3T/4, T]"""
    T = t[-1]
    ventana1 = integrando[(t >= 0.5 * T) & (t < 0.75 * T)]
    ventana2 = integrando[t >= 0.75 * T]
    if ventana1.size == 0 or ventana2.size == 0:
        return 0.0
    m1, m2 = float(ventana1.max()), float(ventana2.max())
    if m1 <= 0 or m2 <= 0:
        return -math.inf if m2 == 0 else 0.0
    return math.log(m2 / m1) / (2.0 * 0.25 * T)


def weighted_sobolev_norm(traza: Tuple[np.ndarray, np.ndarray, np.ndarray], op: OperatorSpec,
                          w: WeightedNormSpec, tasa_crecimiento: Optional[float] = None) -> NormaPonderada:
    """
    (∫_0^T e^{-2γt}(‖u''‖² + ‖A₀²u‖²) dt)^{1/2} por trapecios, con certificado de cola

    Args:
        traza: (t, u, u'') con u y u'' de forma (n_max, len(t))
        tasa_crecimiento: ρ tal que el integrando crece como e^{2ρt} tras T; si falta
                          se estima de la envolvente de la traza

    Raises:
        InsufficientHorizon si la traza no cubre [0, T] o la cola supera el 1% de la norma
    """
    t, u, u2 = (np.asarray(x, dtype=float) for x in traza)
    u, u2 = np.atleast_2d(u), np.atleast_2d(u2)
    if u.shape[0] != op.n_max or u2.shape != u.shape:
        raise InadmissibleProblem(f"traza con {u.shape[0]} modos para n_max={op.n_max}")
    if t[0] > 0 or t[-1] < w.T_horizon * (1 - 1e-12):
        raise InsufficientHorizon(f"la traza cubre [{t[0]}, {t[-1]}] y se pidió [0, {w.T_horizon}]")

    dentro = t <= w.T_horizon * (1 + 1e-12)
    t, u, u2 = t[dentro], u[:, dentro], u2[:, dentro]
    integrando = (u2 ** 2).sum(axis=0) + (op.a0_sq[:, None] ** 2 * u ** 2).sum(axis=0)
    ponderado = np.exp(-2.0 * w.gamma * t) * integrando
    integral = float(trapezoid(ponderado, t))

    if integral == 0.0:
        return NormaPonderada(valor=0.0, cola=0.0, integral=0.0, tasa_crecimiento=0.0)

    rho = _tasa_de_envolvente(t, integrando) if tasa_crecimiento is None else tasa_crecimiento
    cola_base = float(ponderado[t >= 0.9 * t[-1]].max())
    cola = cola_base / (2.0 * (w.gamma - rho)) if w.gamma > rho else math.inf

    valor = math.sqrt(integral)
    if math.sqrt(integral + cola) - valor > 0.01 * valor:
        logger.warning(f"⚠️ Cola {cola:.3e} excesiva para T={w.T_horizon}, γ={w.gamma}")
        raise InsufficientHorizon(
            f"la cola estimada ({cola:.3e}) supera el 1% de la norma en T={w.T_horizon}; aumente el horizonte"
        )
    return NormaPonderada(valor=valor, cola=cola, integral=integral, tasa_crecimiento=rho)


def norma_l2_gamma(f: ForcingSpec, n_max: int, gamma: float, t: np.ndarray, orden: int = 1) -> float:
    """‖f^{(orden)}‖_{L2,γ} en H por trapecios sobre t"""
    if f.es_cero:
        return 0.0
    integrando = np.zeros_like(t)
    for n in range(1, n_max + 1):
        integrando += forcing_eval(f, n, t, derivative_order=orden) ** 2
    return math.sqrt(float(trapezoid(np.exp(-2.0 * gamma * t) * integrando, t)))


def _trazas_del_oraculo(problem: ProblemInstance, t: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """u y u'' del oráculo RK4; u'' sale de la propia ecuación"""
    op, kernel = problem.operator, problem.kernel
    trazas = integrate_problem(op, kernel, problem.phi0, problem.phi1, problem.forcing,
                               problem.horizon, problem.dt)
    u = np.zeros((op.n_max, len(t)))
    u2 = np.zeros_like(u)
    for n, traza in enumerate(trazas, start=1):
        a_n, b_n = op.modo(n)
        pesos = a_n ** 2 * kernel.c + b_n * kernel.d
        memoria = pesos @ traza.w if kernel.N else np.zeros_like(traza.u)
        f_n = forcing_eval(problem.forcing, n, traza.t) if not problem.forcing.es_cero else 0.0
        aceleracion = f_n - (a_n ** 2 + b_n) * traza.u + memoria
        u[n - 1] = np.interp(t, traza.t, traza.u)
        u2[n - 1] = np.interp(t, traza.t, aceleracion)
    return u, u2


def solvability_ratio(problem: ProblemInstance, gamma: Optional[float] = None,
                      espectro: Optional[EspectroCompleto] = None,
                      paso: float = 1.25e-3) -> RazonSolubilidad:
    """
    ‖u‖_{W²_{2,γ}} / (‖f'‖_{L2,γ} + ‖A₀²φ0‖ + ‖A₀φ1‖)

    Con B = 0 la solución sale de la serie de residuos; con B ≠ 0, del oráculo RK4.
    Sin γ se usa el peso del problema o, en su defecto, el umbral de contracción + 1.
    Datos nulos dan 0/0, reportado como 0 con degenerate=True.

    Raises:
        InadmissibleProblem
    """
    problem.verificar_admisible()
    op = problem.operator
    if gamma is None:
        gamma = problem.weight if problem.weight is not None else contraction_threshold(problem.kernel, op) + 1.0
    if gamma < 0:
        raise InadmissibleProblem(f"gamma={gamma} debe ser no negativo")

    w = WeightedNormSpec(gamma=gamma, T_horizon=problem.horizon, paso=paso)
    t = w.malla()
    rhs = (norma_l2_gamma(problem.forcing, op.n_max, gamma, t)
           + h_beta_norm(problem.phi0, op, 2.0) + h_beta_norm(problem.phi1, op, 1.0))

    if op.tiene_b:
        metodo = 'oracle'
        u, u2 = _trazas_del_oraculo(problem, t)
        tasa = None
    else:
        metodo = 'series'
        espectro = espectro or full_spectrum(op, problem.kernel)
        serie = serie_del_problema(espectro, problem.phi0, problem.phi1, problem.forcing)
        u = eval_series_malla(serie, t, 0)
        u2 = eval_series_malla(serie, t, 2)
        tasa = max(float(np.max(m.raices().real)) for m in espectro.modos)
        tasa = max([tasa] + [term.mu for terms in problem.forcing.terms for term in terms])

    norma = weighted_sobolev_norm((t, u, u2), op, w, tasa_crecimiento=tasa)
    degenerado = rhs == 0.0
    return RazonSolubilidad(
        ratio=0.0 if degenerado else norma.valor / rhs,
        degenerate=degenerado,
        method=metodo,
        lhs=norma.valor,
        rhs=rhs,
        gamma=gamma,
        tail=norma.cola,
    )


# ============================================================================
# COTAS EN EL DOMINIO DE LAPLACE
# ============================================================================

class AnalizadorCotas:
    """
    Verifica las cotas escalares sobre una malla de λ con Re λ > γ

    Cotas:
    - (i)   |λ/(λ²+a₀²)| ≤ 1/Re λ                    (exacta)
    - (ii)  Re λ·|a₀²/(λ(λ²+a₀²))| ≤ 3               (acotación con holgura)
    - (iii) |K̂(λ)| ≤ K(0)/|λ|, |Q̂(λ)| ≤ Q(0)/|λ|     (exactas)
    - (iv)  (a₀²+γ_j²)^{-2} ≤ (γ_j a₀)^{-2}           (exacta)
    - (v)   sup_n |K̂a_n² + Q̂b_n| / |λ²+a₀²|         (contracción ‖V‖)
    """

    # Malla por defecto
    PUNTOS = 101
    RE_MAX = 1.0e3
    IM_MAX = 1.0e3
    DESPLAZAMIENTO_RE = 1.0e-3

    # Umbrales
    COTA_II = 3.0
    HOLGURA_REDONDEO = 1.0e-12
    GAMMA_MAX = 1.0e3
    TOL_BISECCION = 1.0e-6
    MAX_ITER_BISECCION = 80

    def __init__(self, kernel: KernelSpec, op: OperatorSpec, config: Optional[Dict[str, Any]] = None):
        self.kernel = kernel
        self.op = op
        config = config or {}
        self.PUNTOS = int(config.get('MALLA_LAMBDA_PUNTOS', self.PUNTOS))
        self.RE_MAX = float(config.get('MALLA_LAMBDA_RE_MAX', self.RE_MAX))
        self.IM_MAX = float(config.get('MALLA_LAMBDA_IM_MAX', self.IM_MAX))
        self.GAMMA_MAX = float(config.get('GAMMA_MAX_CONTRACCION', self.GAMMA_MAX))

    def malla_lambda(self, gamma: float) -> np.ndarray:
        """Re log-espaciado en [γ+1e-3, RE_MAX], Im lineal en [-IM_MAX, IM_MAX]"""
        re_min = gamma + self.DESPLAZAMIENTO_RE
        re = np.geomspace(re_min, max(self.RE_MAX, 10.0 * re_min), self.PUNTOS)
        im = np.linspace(-self.IM_MAX, self.IM_MAX, self.PUNTOS)
        return (re[:, None] + 1j * im[None, :]).ravel()

    def _v_escalar(self, lam: np.ndarray) -> np.ndarray:
        """|V(λ)| por modo → (len(λ), n_max)"""
        k_hat = laplace_hat(self.kernel, lam, 'K')
        q_hat = laplace_hat(self.kernel, lam, 'Q')
        numerador = np.abs(k_hat[:, None] * self.op.a_arr[None, :] ** 2 + q_hat[:, None] * self.op.b_arr[None, :])
        return numerador / np.abs(lam[:, None] ** 2 + self.op.a0_sq[None, :])

    def _entrada(self, razon: np.ndarray, lam: np.ndarray, cota: float, con_modo: bool = True) -> Dict[str, Any]:
        indice = np.unravel_index(int(np.argmax(razon)), razon.shape)
        return {
            'sup': float(razon[indice]),
            'argmax_lambda': complex(lam[indice[0]]),
            'argmax_n': int(indice[1]) + 1 if con_modo and razon.ndim > 1 else None,
            'pass': bool(razon[indice] <= cota),
        }

    def _exigir(self, nombre: str, lhs: np.ndarray, rhs: np.ndarray, lam: np.ndarray) -> None:
        violados = lhs > rhs * (1.0 + self.HOLGURA_REDONDEO)
        if np.any(violados):
            g, n = np.unravel_index(int(np.argmax(violados)), violados.shape) if violados.ndim > 1 \
                else (int(np.argmax(violados)), None)
            logger.error(f"❌ Cota {nombre} violada en λ={lam[g]}")
            raise BoundViolation(nombre, complex(lam[g]), None if n is None else int(n) + 1,
                                 float(lhs[(g, n)] if n is not None else lhs[g]),
                                 float(rhs[(g, n)] if n is not None else rhs[g]))

    def lemma_bound_scan(self, gamma: float, lam: Optional[np.ndarray] = None,
                         estricto: bool = True) -> Dict[str, Any]:
        """
        Reporte {cota: {sup, argmax_lambda, argmax_n, pass}} más γ*

        Raises:
            BoundViolation si una cota exacta falla en algún punto (con estricto=True)
        """
        lam = self.malla_lambda(gamma) if lam is None else np.asarray(lam, dtype=complex).ravel()
        if np.any(lam.real <= gamma):
            raise ValueError(f"la malla debe cumplir Re λ > γ={gamma}")
        a0_sq = self.op.a0_sq[None, :]
        lam_c = lam[:, None]
        re = lam_c.real

        # (i)
        lhs_i = np.abs(lam_c / (lam_c ** 2 + a0_sq))
        rhs_i = np.broadcast_to(1.0 / re, lhs_i.shape)
        # (ii)
        cantidad_ii = re * np.abs(a0_sq / (lam_c * (lam_c ** 2 + a0_sq)))
        # (iii)
        modulo = np.abs(lam)
        lhs_k = np.abs(laplace_hat(self.kernel, lam, 'K'))
        rhs_k = float(np.sum(self.kernel.c)) / modulo
        lhs_q = np.abs(laplace_hat(self.kernel, lam, 'Q'))
        rhs_q = float(np.sum(self.kernel.d)) / modulo
        # (iv): independiente de λ
        if self.kernel.N:
            g2 = self.kernel.gammas[None, :] ** 2
            lhs_iv = (self.op.a0_sq[:, None] + g2) ** -2.0
            rhs_iv = (g2 * self.op.a0_sq[:, None]) ** -1.0
        else:
            lhs_iv = rhs_iv = np.zeros((self.op.n_max, 0))
        # (v)
        v = self._v_escalar(lam)

        if estricto:
            self._exigir('est8', lhs_i, rhs_i, lam)
            self._exigir('est4_K', lhs_k, rhs_k, lam)
            self._exigir('est5_Q', lhs_q, rhs_q, lam)
            violados = lhs_iv > rhs_iv * (1.0 + self.HOLGURA_REDONDEO)
            if np.any(violados):
                n, j = np.unravel_index(int(np.argmax(violados)), violados.shape)
                raise BoundViolation('prop', complex(-self.kernel.gammas[j]), int(n) + 1,
                                     float(lhs_iv[n, j]), float(rhs_iv[n, j]))

        def _razon(lhs, rhs):
            return np.where(rhs > 0, lhs / np.where(rhs > 0, rhs, 1.0), np.where(lhs > 0, np.inf, 0.0))

        reporte = {
            'est8': self._entrada(lhs_i * re, lam, 1.0 + self.HOLGURA_REDONDEO),
            'est1_est2': self._entrada(cantidad_ii, lam, self.COTA_II),
            'est4_K': self._entrada(_razon(lhs_k, rhs_k), lam, 1.0 + self.HOLGURA_REDONDEO, con_modo=False),
            'est5_Q': self._entrada(_razon(lhs_q, rhs_q), lam, 1.0 + self.HOLGURA_REDONDEO, con_modo=False),
            'contraction_V': self._entrada(v, lam, 1.0),
        }
        if lhs_iv.size:
            razon_iv = lhs_iv / rhs_iv
            n, j = np.unravel_index(int(np.argmax(razon_iv)), razon_iv.shape)
            reporte['prop'] = {'sup': float(razon_iv[n, j]), 'argmax_lambda': None,
                               'argmax_n': int(n) + 1, 'argmax_j': int(j) + 1,
                               'pass': bool(razon_iv[n, j] <= 1.0 + self.HOLGURA_REDONDEO)}
        else:
            reporte['prop'] = {'sup': 0.0, 'argmax_lambda': None, 'argmax_n': None, 'pass': True}

        reporte['gamma'] = gamma
        reporte['grid_points'] = int(lam.size)
        logger.info(f"📊 Cotas sobre {lam.size} puntos de λ y {self.op.n_max} modos verificadas")
        return reporte

    def sup_v_en_linea(self, gamma: float) -> float:
        """sup de ‖V‖ escalar sobre Re λ = γ, incluyendo los puntos resonantes ±√(a₀²-γ²) y ±a₀"""
        a0 = np.sqrt(self.op.a0_sq)
        resonancias = np.sqrt(np.clip(self.op.a0_sq - gamma ** 2, 0.0, None))
        nu = np.concatenate([
            np.linspace(-self.IM_MAX, self.IM_MAX, self.PUNTOS),
            resonancias, -resonancias, a0, -a0,
        ])
        return float(np.max(self._v_escalar(gamma + 1j * nu)))

    def contraction_threshold(self) -> float:
        """
        Menor γ (por bisección en (0, GAMMA_MAX]) con sup ‖V‖ < 1 sobre Re λ = γ

        Raises:
            NotFound si ni γ = GAMMA_MAX logra la contracción
        """
        if self.kernel.N == 0:
            return 0.0
        lo, hi = 0.0, self.GAMMA_MAX
        if self.sup_v_en_linea(hi) >= 1.0:
            raise NotFound(f"no hay contracción para γ ≤ {self.GAMMA_MAX}")
        for _ in range(self.MAX_ITER_BISECCION):
            medio = 0.5 * (lo + hi)
            if self.sup_v_en_linea(medio) < 1.0:
                hi = medio
            else:
                lo = medio
            if hi - lo <= self.TOL_BISECCION * max(1.0, hi):
                break
        logger.info(f"✅ Umbral de contracción γ* = {hi:.6g}")
        return hi

    def ventana_decaimiento(self, puntos: int = 8) -> np.ndarray:
        """
        τ de max(1, 2·Σγ_j) a max(a_max/2, 4·τ_min): por encima de las escalas de memoria y bajo
        la resonancia del último modo, donde sup ‖V‖ sigue a 1/(2τ)
        """
        tau_min = max(1.0, 2.0 * float(np.sum(self.kernel.gammas)))
        tau_max = max(float(np.sqrt(np.max(self.op.a0_sq))) / 2.0, 4.0 * tau_min)
        return np.geomspace(tau_min, tau_max, puntos)

    def contraction_decay_fit(self, taus: Optional[Sequence[float]] = None) -> Dict[str, Any]:
        """Pendiente log-log de sup ‖V‖ sobre Re λ = τ (se espera ≈ 1)"""
        taus = self.ventana_decaimiento() if taus is None else np.asarray(taus, dtype=float)
        sups = np.array([self.sup_v_en_linea(tau) for tau in taus])
        if np.any(sups <= 0):
            return {'taus': taus.tolist(), 'sup_v': sups.tolist(), 'slope': None, 'pass': None}
        pendiente = float(-np.polyfit(np.log(taus), np.log(sups), 1)[0])
        return {'taus': taus.tolist(), 'sup_v': sups.tolist(), 'slope': pendiente,
                'pass': bool(0.8 <= pendiente <= 1.2)}


def lemma_bound_scan(kernel: KernelSpec, op: OperatorSpec, lam_grid: Optional[np.ndarray] = None,
                     gamma: float = 0.0, config: Optional[Dict[str, Any]] = None,
                     estricto: bool = True) -> Dict[str, Any]:
    analizador = AnalizadorCotas(kernel, op, config)
    reporte = analizador.lemma_bound_scan(gamma, lam_grid, estricto=estricto)
    try:
        reporte['gamma_star'] = analizador.contraction_threshold()
    except NotFound:
        reporte['gamma_star'] = None
    return reporte


def contraction_threshold(kernel: KernelSpec, op: OperatorSpec, config: Optional[Dict[str, Any]] = None) -> float:
    return AnalizadorCotas(kernel, op, config).contraction_threshold()


def contraction_decay_fit(kernel: KernelSpec, op: OperatorSpec,
                          taus: Optional[Sequence[float]] = None) -> Dict[str, Any]:
    return AnalizadorCotas(kernel, op).contraction_decay_fit(taus)


# ============================================================================
# CONSTANTE EMPÍRICA
# ============================================================================

def problema_aleatorio(kernel: KernelSpec, op: OperatorSpec, rng: np.random.Generator,
                       horizonte: float = 5.0, n_datos: int = 128) -> ProblemInstance:
    """
    Problema admisible con datos decrecientes en n

    φ0_n ~ N(0,1)/n³, φ1_n ~ N(0,1)/n², f_n = α_n(e^{-t} - e^{-2t}) + β_n t e^{-t}
    con α_n, β_n ~ N(0,1)/n³. Se sortean n_datos modos y se truncan a n_max, de modo
    que problemas con distinto n_max comparten los primeros coeficientes.
    """
    n = np.arange(1, n_datos + 1, dtype=float)
    phi0 = rng.normal(size=n_datos) / n ** 3
    phi1 = rng.normal(size=n_datos) / n ** 2
    alpha = rng.normal(size=n_datos) / n ** 3
    beta = rng.normal(size=n_datos) / n ** 3

    n_max = op.n_max
    terminos = tuple(
        (ForcingTerm(float(alpha[k]), 0, -1.0), ForcingTerm(float(-alpha[k]), 0, -2.0),
         ForcingTerm(float(beta[k]), 1, -1.0))
        for k in range(n_max)
    )
    return ProblemInstance(
        kernel=kernel,
        operator=op,
        phi0=ModeVector(tuple(phi0[:n_max].tolist())),
        phi1=ModeVector(tuple(phi1[:n_max].tolist())),
        forcing=ForcingSpec(terms=terminos),
        horizon=horizonte,
        n_max=n_max,
    )


def empirical_constant(kernel: KernelSpec, op: OperatorSpec, gamma: Optional[float] = None,
                       n_problems: int = 50, seed: int = 20240611, horizonte: float = 5.0,
                       espectro: Optional[EspectroCompleto] = None) -> Dict[str, Any]:
    """Máximo de solvability_ratio sobre problemas aleatorios admisibles: d empírica"""
    if gamma is None:
        gamma = contraction_threshold(kernel, op) + 1.0
    rng = np.random.default_rng(seed)
    if not op.tiene_b and espectro is None:
        espectro = full_spectrum(op, kernel)

    razones = []
    for _ in range(n_problems):
        problema = problema_aleatorio(kernel, op, rng, horizonte)
        razones.append(solvability_ratio(problema, gamma, espectro=espectro).ratio)

    razones = np.array(razones)
    d = float(np.max(razones)) if razones.size else 0.0
    logger.info(f"📊 d empírica = {d:.6g} sobre {n_problems} problemas (n_max={op.n_max}, γ={gamma:.4g})")
    return {
        'd': d,
        'gamma': gamma,
        'n_max': op.n_max,
        'n_problems': n_problems,
        'ratios': razones.tolist(),
        'finite': bool(np.isfinite(razones).all()),
    }
