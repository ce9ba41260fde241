"""
Servicio de espectro por modo

Para cada símbolo l_n calcula las N raíces reales entrelazadas con los polos
(-γ_k < λ_{k,n} < x_k) y el par complejo conjugado λ_n^±, con pesos de residuo
1/l_n'(raíz) y certificados. Incluye el oráculo de matriz compañera.
"""
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from scipy.optimize import brentq

from ..errores import (
    BracketFailure,
    ConditioningRefusal,
    ConvergenceFailure,
    FalloNumerico,
    HipotesisNoSatisfecha,
    NewtonDivergence,
    ParComplejoAusente,
    SpectrumInvariantError,
)
from ..modelos.kernel_model import KernelSpec, diagnostics, g_real_zeros
from ..modelos.mode_symbol import (
    MAX_GRADO_NUCLEO,
    ModeSymbol,
    PolySymbol,
    l_eval,
    l_prime,
    to_polynomial,
)
from ..modelos.operator_model import OperatorSpec
from ..processors.emision import escribir_csv

logger = logging.getLogger(__name__)

# Tolerancias
TOL_RESIDUO = 1e-9          # residuo_escalado(raíz) ≤ TOL_RESIDUO
TOL_VIETA = 1e-8            # |Σ raíces + Σγ| ≤ TOL_VIETA·(1+Σγ)
TOL_DEFLACION = 1e-8
TOL_RAIZ_REAL = 1e-12
TOL_IMAG_REAL = 1e-8        # Im λ por debajo de esto (relativo) es una raíz real
TOL_ENTRELAZADO = 1e-9      # holgura relativa alrededor de x_k
MAX_ITER_NEWTON = 100
PASOS_PULIDO = 2
MAX_PASOS_PULIDO_REAL = 8
ESCALERA_A = (8, 16, 32, 64, 128)
BANDA_CUADRATICA = (1.7, 2.3)
BANDA_LINEAL = (0.7, 1.3)


@dataclass
class ModeSpectrum:
    n: int
    a_sq: float
    real_roots: Tuple[float, ...]
    complex_pair: Tuple[complex, complex]
    residue_weights: Tuple[complex, ...]
    certificates: List[Dict[str, Any]] = field(default_factory=list)

    def raices(self) -> np.ndarray:
        """Todas las raíces: reales en orden k = 1..N, luego λ⁺ y λ⁻"""
        return np.array(list(self.real_roots) + list(self.complex_pair), dtype=complex)

    def pesos(self) -> np.ndarray:
        return np.array(self.residue_weights, dtype=complex)


@dataclass
class EspectroCompleto:
    modos: List[ModeSpectrum]
    reporte: Dict[str, Any]
    operador: OperatorSpec
    kernel: KernelSpec
    ceros_g: Tuple[float, ...] = ()

    def modo(self, n: int) -> ModeSpectrum:
        return self.modos[n - 1]


def _exigir_b_cero(sym: ModeSymbol) -> None:
    if sym.b != 0:
        raise HipotesisNoSatisfecha("spectrum requires B=0")


def _funcion_real(sym: ModeSymbol):
    """Evaluador real sin polos: polinomio si N ≤ 40, forma racional si no"""
    if sym.kernel.N <= MAX_GRADO_NUCLEO:
        coeficientes = to_polynomial(sym).como_arreglo()
        return lambda x: float(np.polyval(coeficientes, x))
    return lambda x: float(np.real(l_eval(sym, x)))


def _pulir_real(sym: ModeSymbol, raiz: float, lo: float, hi: float) -> float:
    """Newton sobre la forma racional hasta que el paso llegue al último bit"""
    for _ in range(MAX_PASOS_PULIDO_REAL):
        derivada = float(np.real(l_prime(sym, raiz)))
        if derivada == 0 or not math.isfinite(derivada):
            break
        paso = float(np.real(l_eval(sym, raiz))) / derivada
        candidato = raiz - paso
        if not lo <= candidato <= hi:
            break
        raiz = candidato
        if abs(paso) <= 2.0 * np.spacing(abs(raiz)):
            break
    return raiz


def residuo_escalado(sym: ModeSymbol, raiz: Union[complex, np.ndarray]) -> np.ndarray:
    """
    |l_n(λ)| / (max(1, a²)·max(1, |l_n'(λ)|·max(1, |λ|)))

    Cerca de un polo -γ_k el residuo crudo de una raíz exacta al último bit es
    del orden de ε·|l'|·|λ|; la escala lo lleva a ε.
    """
    raiz = np.asarray(raiz, dtype=complex)
    escala = np.maximum(1.0, np.abs(l_prime(sym, raiz)) * np.maximum(1.0, np.abs(raiz)))
    return np.abs(l_eval(sym, raiz)) / (max(1.0, sym.a_sq) * escala)


def real_roots(sym: ModeSymbol, xs: Sequence[float]) -> List[float]:
    """
    Raíces reales λ_{k,n} ∈ (-γ_k, x_k), k = 1..N

    Cada raíz se localiza por cambio de signo del polinomio sin polos en
    (-γ_k + ε, x_k - ε) con ε = 1e-10·(1+γ_k) y se refina con brentq. Si x_k es
    raíz (núcleo en la frontera Σc_j/γ_j = 1, x_1 = 0) el intervalo se extiende a
    x_k + δ con δ = TOL_ENTRELAZADO·(1+|x_k|) y el entrelazado deja de ser estricto.

    Raises:
        HipotesisNoSatisfecha si b ≠ 0
        BracketFailure con el intervalo y los signos de los extremos
    """
    _exigir_b_cero(sym)
    gammas = sym.kernel.gammas
    if len(xs) != sym.kernel.N:
        raise ValueError(f"se esperaban {sym.kernel.N} ceros de g, llegaron {len(xs)}")

    p = _funcion_real(sym)
    raices = []
    for k, (gamma, x_k) in enumerate(zip(gammas, xs), start=1):
        eps = 1e-10 * (1.0 + gamma)
        delta = TOL_ENTRELAZADO * (1.0 + abs(x_k))
        lo, hi = -gamma + eps, x_k - eps
        p_lo, p_hi = p(lo), p(hi)
        if p_lo * p_hi > 0:
            # raíz pegada a x_k o sobre x_k
            hi, p_hi = x_k, p(x_k)
            if p_lo * p_hi > 0:
                hi, p_hi = x_k + delta, p(x_k + delta)
        if p_hi == 0.0:
            raices.append(hi)
            continue
        if p_lo * p_hi > 0 or lo >= hi:
            logger.error(f"❌ Modo {sym.n}: sin cambio de signo en ({lo}, {hi})")
            raise BracketFailure(
                f"modo {sym.n}, k={k}: sin cambio de signo",
                intervalo=(lo, hi),
                signos=(float(np.sign(p_lo)), float(np.sign(p_hi))),
            )
        raiz = brentq(p, lo, hi, xtol=TOL_RAIZ_REAL, maxiter=200)
        raices.append(_pulir_real(sym, raiz, lo, max(hi, x_k)))
    return raices


def companion_roots(poly: PolySymbol) -> np.ndarray:
    """
    Todas las raíces de p_n por autovalores de su matriz compañera

    Oráculo independiente; las raíces se pulen con dos pasos de Newton sobre el polinomio.

    Raises:
        ConditioningRefusal si el grado excede N+2 = 42
        ConvergenceFailure si el autosolver falla
    """
    if poly.grado > MAX_GRADO_NUCLEO + 2:
        raise ConditioningRefusal(f"grado {poly.grado} demasiado alto para la matriz compañera")
    coeficientes = poly.como_arreglo()
    coeficientes = coeficientes / coeficientes[0]
    grado = poly.grado

    matriz = np.zeros((grado, grado))
    matriz[0, :] = -coeficientes[1:]
    if grado > 1:
        matriz[1:, :-1] = np.eye(grado - 1)

    try:
        raices = np.linalg.eigvals(matriz).astype(complex)
    except np.linalg.LinAlgError as e:
        raise ConvergenceFailure(f"el autosolver no convergió: {e}") from e
    if not np.isfinite(raices).all():
        raise ConvergenceFailure("autovalores no finitos en la matriz compañera")

    derivada = np.polyder(coeficientes)
    for _ in range(PASOS_PULIDO):
        pendiente = np.polyval(derivada, raices)
        segura = pendiente != 0
        raices[segura] -= np.polyval(coeficientes, raices[segura]) / pendiente[segura]
    # raíces reales exactas
    raices.imag[np.abs(raices.imag) < 1e-13 * np.maximum(1.0, np.abs(raices))] = 0.0
    return raices


def _newton_complejo(sym: ModeSymbol, semilla: complex) -> Tuple[Optional[complex], List[complex]]:
    lam = semilla
    trayectoria = [lam]
    reiniciado = False
    for _ in range(MAX_ITER_NEWTON):
        derivada = l_prime(sym, lam)
        if derivada == 0:
            return None, trayectoria
        paso = l_eval(sym, lam) / derivada
        lam = lam - paso
        trayectoria.append(lam)
        if not np.isfinite(lam):
            return None, trayectoria
        if lam.imag <= 0:
            if reiniciado:
                return None, trayectoria
            lam, reiniciado = complex(0.0, sym.a), True
            trayectoria.append(lam)
            continue
        convergido = (residuo_escalado(sym, lam) <= TOL_RESIDUO
                      or abs(paso) <= 4.0 * np.spacing(abs(lam)))
        if convergido:
            # pulido hasta que el paso sea despreciable
            for _ in range(5):
                paso = l_eval(sym, lam) / l_prime(sym, lam)
                lam = lam - paso
                if abs(paso) <= 1e-14 * abs(lam):
                    break
            return lam, trayectoria
    return None, trayectoria


def _es_real(lam: complex) -> bool:
    return abs(lam.imag) <= TOL_IMAG_REAL * max(1.0, abs(lam))


def complex_pair(sym: ModeSymbol, reales: Sequence[float] = ()) -> Tuple[complex, complex]:
    """
    Par complejo (λ⁺, λ⁻) de l_n

    Newton desde la semilla asintótica i·a_n - K(0)/2; si el iterado sale del semiplano
    superior se reinicia desde i·a_n. Si Newton falla (o converge sobre una raíz real)
    se recurre a companion_roots cuando N ≤ 40.

    Para a_n pequeño frente a la memoria (p. ej. c=[2], γ=[1], a ≤ 0.3) las N+2
    raíces son reales y el modo no tiene par complejo.

    Raises:
        HipotesisNoSatisfecha si b ≠ 0
        ParComplejoAusente si todas las raíces del modo son reales
        NewtonDivergence con la trayectoria
    """
    _exigir_b_cero(sym)
    k0 = float(np.sum(sym.kernel.c))
    semilla = complex(-k0 / 2.0, sym.a)
    lam, trayectoria = _newton_complejo(sym, semilla)

    if lam is not None and (_es_real(lam) or any(abs(lam - r) <= TOL_DEFLACION for r in reales)):
        logger.warning(f"⚠️ Modo {sym.n}: Newton convergió a una raíz real, se descarta")
        lam = None

    if lam is None:
        if sym.kernel.N > MAX_GRADO_NUCLEO:
            raise NewtonDivergence(
                f"modo {sym.n}: Newton no convergió en {MAX_ITER_NEWTON} iteraciones",
                trayectoria=trayectoria,
            )
        logger.warning(f"⚠️ Modo {sym.n}: Newton sin convergencia, se usa la matriz compañera")
        raices = companion_roots(to_polynomial(sym))
        superiores = raices[[not _es_real(complex(r)) and r.imag > 0 for r in raices]]
        if len(superiores) == 0:
            logger.error(f"❌ Modo {sym.n}: todas las raíces son reales")
            raise ParComplejoAusente(sym.n, [complex(r) for r in raices])
        lam = complex(superiores[np.argmax(superiores.imag)])

    return lam, lam.conjugate()


def _verificar_modo(ms: ModeSpectrum, sym: ModeSymbol, xs: Sequence[float]) -> Dict[str, Any]:
    """
    Comprueba conteo, entrelazado, conjugación, residuos y regla de Vieta

    El residuo se exige escalado (residuo_escalado); |l_n(raíz)| crudo queda como certificado.
    """
    N = sym.kernel.N
    gammas = sym.kernel.gammas
    raices = ms.raices()

    if len(raices) != N + 2:
        raise SpectrumInvariantError(ms.n, f"{len(raices)} raíces en lugar de {N + 2}")
    entrelazado = 'strict'
    for k, (raiz, gamma, x_k) in enumerate(zip(ms.real_roots, gammas, xs), start=1):
        if -gamma < raiz < x_k:
            continue
        if -gamma < raiz <= x_k + TOL_ENTRELAZADO * (1.0 + abs(x_k)):
            entrelazado = 'non-strict'
            continue
        raise SpectrumInvariantError(
            ms.n, f"entrelazado violado: -γ_{k}={-gamma} < λ_{k}={raiz} < x_{k}={x_k}")
    lam_mas, lam_menos = ms.complex_pair
    if not lam_mas.imag > 0 or lam_menos != lam_mas.conjugate():
        raise SpectrumInvariantError(ms.n, f"par complejo inválido: {ms.complex_pair}")

    residuo = float(np.max(np.abs(l_eval(sym, raices))))
    escalado = float(np.max(residuo_escalado(sym, raices)))
    if escalado > TOL_RESIDUO:
        raise SpectrumInvariantError(
            ms.n, f"residuo escalado {escalado:.3e} sobre la tolerancia (|l_n(raíz)|={residuo:.3e})")

    suma_gamma = float(np.sum(gammas))
    vieta = abs(complex(np.sum(raices)) + suma_gamma)
    if vieta > TOL_VIETA * (1.0 + suma_gamma):
        raise SpectrumInvariantError(ms.n, f"regla de Vieta violada: |Σλ + Σγ|={vieta}")

    return {'residual': residuo, 'scaled_residual': escalado, 'vieta': vieta, 'interlacing': entrelazado}


def espectro_modo(sym: ModeSymbol, xs: Sequence[float]) -> ModeSpectrum:
    """Espectro verificado de un modo"""
    reales = real_roots(sym, xs) if sym.kernel.N else []
    par = complex_pair(sym, reales)
    todas = np.array(list(reales) + list(par), dtype=complex)
    pesos = 1.0 / l_prime(sym, todas)

    certificados = [
        {'root': f'real:{k}', 'bracket': [-float(g), float(x)]}
        for k, (g, x) in enumerate(zip(sym.kernel.gammas, xs), start=1)
    ]
    certificados.append({'root': 'complex+', 'newton_residual': abs(l_eval(sym, par[0]))})

    ms = ModeSpectrum(
        n=sym.n,
        a_sq=sym.a_sq,
        real_roots=tuple(float(r) for r in reales),
        complex_pair=par,
        residue_weights=tuple(complex(w) for w in pesos),
        certificates=certificados,
    )
    verificacion = _verificar_modo(ms, sym, xs)
    ms.certificates.append(verificacion)
    return ms


def full_spectrum(op: OperatorSpec, kernel: KernelSpec) -> EspectroCompleto:
    """
    Espectro de todos los modos más el reporte agregado

    El reporte incluye el veredicto de estabilidad, los peores residuos y la estimación
    de acumulación λ_{k,n} → x_k en el último modo.

    Raises:
        HipotesisNoSatisfecha("spectrum requires B=0") si algún b_n ≠ 0
    """
    if op.tiene_b:
        raise HipotesisNoSatisfecha("spectrum requires B=0")

    logger.info(f"📊 Espectro de {op.n_max} modos con N={kernel.N}")
    xs = g_real_zeros(kernel) if kernel.N else []
    modos = []
    for n in range(1, op.n_max + 1):
        sym = ModeSymbol.desde_operador(op, kernel, n)
        try:
            modos.append(espectro_modo(sym, xs))
        except FalloNumerico as e:
            if not isinstance(e, SpectrumInvariantError):
                e.args = (f"modo n={n}: {e}",)
            logger.error(f"❌ Falla en el modo {n}: {e}")
            raise

    diag = diagnostics(kernel)
    max_re = max(float(np.max(m.raices().real)) for m in modos)
    en_semiplano_izquierdo = max_re < 0
    consistente = diag.classification == 'boundary' or (
        en_semiplano_izquierdo == (diag.classification == 'stable'))
    if not consistente:
        logger.warning(f"⚠️ Veredicto inconsistente: índice={diag.stability_index}, max Re={max_re}")

    ultimo = modos[-1]
    acumulacion = [
        {'k': k, 'x_k': x, 'last_root': ultimo.real_roots[k - 1],
         'distance': abs(ultimo.real_roots[k - 1] - x)}
        for k, x in enumerate(xs, start=1)
    ]

    reporte = {
        'N': kernel.N,
        'n_max': op.n_max,
        'stability_index': diag.stability_index,
        'verdict': diag.classification,
        'left_half_plane': en_semiplano_izquierdo,
        'verdict_consistent': consistente,
        'max_re': max_re,
        'worst_residual': max(m.certificates[-1]['residual'] for m in modos),
        'worst_scaled_residual': max(m.certificates[-1]['scaled_residual'] for m in modos),
        'interlacing': ('strict' if all(m.certificates[-1]['interlacing'] == 'strict' for m in modos)
                        else 'non-strict'),
        'worst_vieta': max(m.certificates[-1]['vieta'] for m in modos),
        'g_zeros': list(xs),
        'accumulation': acumulacion,
    }
    logger.info(f"✅ Espectro completo: veredicto={diag.classification}, max Re={max_re:.6g}")
    return EspectroCompleto(modos=modos, reporte=reporte, operador=op, kernel=kernel,
                            ceros_g=tuple(xs))


def spectrum_frame(espectro: Union[EspectroCompleto, Sequence[ModeSpectrum]]) -> pd.DataFrame:
    """Tabla (n, kind, re, im) con kind ∈ {real:k, complex+, complex-}"""
    modos = espectro.modos if isinstance(espectro, EspectroCompleto) else espectro
    filas = []
    for m in modos:
        for k, raiz in enumerate(m.real_roots, start=1):
            filas.append((m.n, f'real:{k}', raiz, 0.0))
        lam_mas, lam_menos = m.complex_pair
        filas.append((m.n, 'complex+', lam_mas.real, lam_mas.imag))
        filas.append((m.n, 'complex-', lam_menos.real, lam_menos.imag))
    return pd.DataFrame(filas, columns=['n', 'kind', 're', 'im'])


def emit_spectrum_csv(espectro: Union[EspectroCompleto, Sequence[ModeSpectrum]],
                      path: Union[str, Path]) -> int:
    """Escribe el CSV con encabezado exacto 'n,kind,re,im'; devuelve el número de filas"""
    return escribir_csv(spectrum_frame(espectro), path)


def _pendiente_loglog(escala: Sequence[float], errores: Sequence[float]) -> Optional[float]:
    errores = np.asarray(errores, dtype=float)
    if np.any(errores <= 0) or not np.isfinite(errores).all():
        return None
    return float(-np.polyfit(np.log(escala), np.log(errores), 1)[0])


def _en_banda(pendiente: Optional[float], banda: Tuple[float, float]) -> Optional[bool]:
    return None if pendiente is None else bool(banda[0] <= pendiente <= banda[1])


def asymptotic_fit(kernel: KernelSpec, a_ladder: Sequence[float] = ESCALERA_A) -> Dict[str, Any]:
    """
    Exponentes de decaimiento sobre la escalera de a_n

    |Re λ⁺ + K(0)/2| y |λ_{k,n} - x_k| deben decaer como a⁻² y |Im λ⁺ - a| como a⁻¹.
    Con N = 0 los errores son nulos y las pendientes se reportan como None.
    """
    k0 = float(np.sum(kernel.c))
    xs = g_real_zeros(kernel) if kernel.N else []

    errores_re, errores_im = [], []
    errores_reales: List[List[float]] = [[] for _ in xs]
    for a in a_ladder:
        sym = ModeSymbol(n=0, a_sq=float(a) ** 2, b=0.0, kernel=kernel)
        reales = real_roots(sym, xs) if kernel.N else []
        lam_mas, _ = complex_pair(sym, reales)
        errores_re.append(abs(lam_mas.real + k0 / 2.0))
        errores_im.append(abs(lam_mas.imag - a))
        for k, (raiz, x_k) in enumerate(zip(reales, xs)):
            errores_reales[k].append(abs(raiz - x_k))

    pendiente_re = _pendiente_loglog(a_ladder, errores_re)
    pendiente_im = _pendiente_loglog(a_ladder, errores_im)
    reporte = {
        'a_ladder': list(a_ladder),
        're_pair': {'errors': errores_re, 'slope': pendiente_re,
                    'pass': _en_banda(pendiente_re, BANDA_CUADRATICA)},
        'im_pair': {'errors': errores_im, 'slope': pendiente_im,
                    'pass': _en_banda(pendiente_im, BANDA_LINEAL)},
        'real_roots': [],
    }
    for k, errores in enumerate(errores_reales, start=1):
        pendiente = _pendiente_loglog(a_ladder, errores)
        reporte['real_roots'].append({'k': k, 'errors': errores, 'slope': pendiente,
                                      'pass': _en_banda(pendiente, BANDA_CUADRATICA)})
    return reporte
