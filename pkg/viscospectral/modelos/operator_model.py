"""
Modelo diagonal de los operadores A, B y A₀² = A² + B

Todos los operadores comparten la base ortonormal {e_n}; cada modo queda descrito
por (a_n, b_n). Aquí viven también los datos iniciales (ModeVector), el forzamiento
por modo (ForcingSpec) y las normas H_β.
"""
import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from ..errores import DimensionMismatch, ForcingSpecError, OperatorSpecError, OutOfGrid

logger = logging.getLogger(__name__)

TOL_FORZAMIENTO_CERO = 1e-12
KAPPA_POR_DEFECTO = 0.5


@dataclass(frozen=True)
class OperatorSpec:
    """
    Realización diagonal de A y B

    Args:
        a: autovalores a_n de A (no decrecientes, a_1 > 0)
        b: valores b_n de B sobre e_n, con 0 ≤ b_n ≤ κ·a_n²
        kappa: cota relativa declarada de B, en (0, 1)
        model: 'dirichlet_1d' o 'explicit'
    """
    a: Tuple[float, ...]
    b: Tuple[float, ...]
    kappa: float = KAPPA_POR_DEFECTO
    model: str = 'explicit'

    def __post_init__(self):
        object.__setattr__(self, 'a', tuple(float(x) for x in self.a))
        object.__setattr__(self, 'b', tuple(float(x) for x in self.b))

        if self.model not in ('dirichlet_1d', 'explicit'):
            raise OperatorSpecError(f"modelo desconocido: {self.model!r}")
        if not self.a:
            raise OperatorSpecError("se requiere al menos un modo (n_max ≥ 1)")
        if len(self.a) != len(self.b):
            raise OperatorSpecError(f"longitudes distintas: a={len(self.a)}, b={len(self.b)}")
        if not (0.0 < self.kappa < 1.0):
            raise OperatorSpecError(f"kappa={self.kappa} debe estar en (0, 1)")

        a, b = np.array(self.a), np.array(self.b)
        if not (np.isfinite(a).all() and np.isfinite(b).all()):
            raise OperatorSpecError("valores no finitos en a o b")
        if a[0] <= 0:
            raise OperatorSpecError(f"a_1={a[0]} debe ser positivo")
        if np.any(np.diff(a) < 0):
            n = int(np.argmax(np.diff(a) < 0)) + 2
            raise OperatorSpecError(f"a_n debe ser no decreciente (falla en n={n})")
        if np.any(b < 0):
            raise OperatorSpecError(f"b_n debe ser no negativo (n={int(np.argmax(b < 0)) + 1})")
        excedidos = b > self.kappa * a ** 2
        if np.any(excedidos):
            n = int(np.argmax(excedidos)) + 1
            raise OperatorSpecError(
                f"b_{n}={b[n - 1]} excede kappa·a_{n}²={self.kappa * a[n - 1] ** 2}"
            )

    @classmethod
    def from_json(cls, datos: Dict[str, Any]) -> 'OperatorSpec':
        """
        {"model":"dirichlet_1d","n_max":…} o {"model":"explicit","a":[…],"b":[…],"kappa":…}
        """
        if not isinstance(datos, dict):
            raise OperatorSpecError("el operador debe ser un objeto JSON")
        modelo = datos.get('model', 'explicit')
        try:
            if modelo == 'dirichlet_1d':
                return dirichlet_laplacian_1d(int(datos['n_max']))
            a = [float(x) for x in datos['a']]
            b = [float(x) for x in datos.get('b', [0.0] * len(a))]
            return cls(a=tuple(a), b=tuple(b),
                       kappa=float(datos.get('kappa', KAPPA_POR_DEFECTO)), model=modelo)
        except (KeyError, TypeError, ValueError) as e:
            raise OperatorSpecError(f"operador mal formado: {e}") from e

    @property
    def n_max(self) -> int:
        return len(self.a)

    @property
    def a_arr(self) -> np.ndarray:
        return np.array(self.a)

    @property
    def b_arr(self) -> np.ndarray:
        return np.array(self.b)

    @property
    def a0_sq(self) -> np.ndarray:
        """Diagonal de A₀² = A² + B"""
        return self.a_arr ** 2 + self.b_arr

    @property
    def tiene_b(self) -> bool:
        return any(x != 0.0 for x in self.b)

    def modo(self, n: int) -> Tuple[float, float]:
        """(a_n, b_n) para el índice 1-based n"""
        if not 1 <= n <= self.n_max:
            raise DimensionMismatch(f"modo n={n} fuera de 1..{self.n_max}")
        return self.a[n - 1], self.b[n - 1]

    def truncar(self, n_max: int) -> 'OperatorSpec':
        if not 1 <= n_max <= self.n_max:
            raise DimensionMismatch(f"n_max={n_max} fuera de 1..{self.n_max}")
        return OperatorSpec(self.a[:n_max], self.b[:n_max], self.kappa, self.model)

    def a_dict(self) -> Dict[str, Any]:
        return {'model': self.model, 'a': list(self.a), 'b': list(self.b), 'kappa': self.kappa}


@dataclass(frozen=True)
class ModeVector:
    """Coeficientes v_n = (v, e_n), n = 1..n_max"""
    coeffs: Tuple[Union[float, complex], ...]

    def __post_init__(self):
        object.__setattr__(self, 'coeffs', tuple(self.coeffs))
        if not np.isfinite(np.asarray(self.coeffs, dtype=complex)).all():
            raise DimensionMismatch("coeficientes no finitos en el vector modal")

    @classmethod
    def base(cls, n: int, n_max: int) -> 'ModeVector':
        """Vector e_n de la base"""
        if not 1 <= n <= n_max:
            raise DimensionMismatch(f"e_{n} no existe con n_max={n_max}")
        coeffs = [0.0] * n_max
        coeffs[n - 1] = 1.0
        return cls(tuple(coeffs))

    @classmethod
    def ceros(cls, n_max: int) -> 'ModeVector':
        return cls(tuple([0.0] * n_max))

    @classmethod
    def desde_lista(cls, valores: Optional[Sequence[float]], n_max: int) -> 'ModeVector':
        """Completa con ceros hasta n_max; rechaza listas más largas"""
        valores = list(valores or [])
        if len(valores) > n_max:
            raise DimensionMismatch(f"{len(valores)} coeficientes para n_max={n_max}")
        return cls(tuple(float(v) for v in valores) + (0.0,) * (n_max - len(valores)))

    def __len__(self) -> int:
        return len(self.coeffs)

    def __getitem__(self, n: int):
        """Acceso 1-based"""
        return self.coeffs[n - 1]

    def como_arreglo(self) -> np.ndarray:
        arr = np.asarray(self.coeffs)
        return arr.astype(complex) if np.iscomplexobj(arr) else arr.astype(float)

    def escalar(self, s: float) -> 'ModeVector':
        return ModeVector(tuple(s * v for v in self.coeffs))


@dataclass(frozen=True)
class ForcingTerm:
    """α t^m e^{μt}"""
    alpha: float
    m: int
    mu: float

    def __post_init__(self):
        if int(self.m) != self.m or self.m < 0:
            raise ForcingSpecError(f"m={self.m} debe ser entero no negativo")
        if not np.isfinite([self.alpha, self.mu]).all():
            raise ForcingSpecError("alpha y mu deben ser finitos")
        object.__setattr__(self, 'm', int(self.m))


@dataclass(frozen=True)
class ForcingSpec:
    """
    Forzamiento por modo f_n(t)

    Forma cerrada: f_n(t) = Σ α t^m e^{μt} (terms[n-1]). Alternativa muestreada:
    malla_t con valores por modo; se marca como aproximada.
    Con terms vacío y sin muestras el forzamiento es idénticamente cero.
    """
    terms: Tuple[Tuple[ForcingTerm, ...], ...] = ()
    malla_t: Optional[Tuple[float, ...]] = None
    muestras: Optional[Tuple[Tuple[float, ...], ...]] = None

    def __post_init__(self):
        object.__setattr__(self, 'terms', tuple(tuple(ts) for ts in self.terms))

        for n, terminos in enumerate(self.terms, start=1):
            f0 = sum(t.alpha for t in terminos if t.m == 0)
            escala = max([1.0] + [abs(t.alpha) for t in terminos if t.m == 0])
            if abs(f0) > TOL_FORZAMIENTO_CERO * escala:
                raise ForcingSpecError(f"f_{n}(0)={f0} ≠ 0: el forzamiento debe anularse en t=0")

        if (self.malla_t is None) != (self.muestras is None):
            raise ForcingSpecError("malla_t y muestras deben darse juntas")
        if self.malla_t is not None:
            if self.terms:
                raise ForcingSpecError("no se pueden combinar términos cerrados y muestras")
            malla = np.asarray(self.malla_t, dtype=float)
            if malla.ndim != 1 or len(malla) < 2 or np.any(np.diff(malla) <= 0) or malla[0] != 0.0:
                raise ForcingSpecError("malla_t debe ser creciente, con al menos dos puntos y empezar en 0")
            object.__setattr__(self, 'malla_t', tuple(malla.tolist()))
            object.__setattr__(self, 'muestras', tuple(tuple(float(v) for v in fila) for fila in self.muestras))
            for n, fila in enumerate(self.muestras, start=1):
                if len(fila) != len(malla):
                    raise DimensionMismatch(f"modo {n}: {len(fila)} muestras para {len(malla)} tiempos")
                if abs(fila[0]) > TOL_FORZAMIENTO_CERO:
                    raise ForcingSpecError(f"f_{n}(0)={fila[0]} ≠ 0: el forzamiento debe anularse en t=0")

    @classmethod
    def cero(cls) -> 'ForcingSpec':
        return cls()

    @classmethod
    def uniforme(cls, terminos: Sequence[ForcingTerm], n_max: int) -> 'ForcingSpec':
        """Los mismos términos en cada modo"""
        return cls(terms=tuple(tuple(terminos) for _ in range(n_max)))

    @classmethod
    def en_modo(cls, n: int, terminos: Sequence[ForcingTerm], n_max: int) -> 'ForcingSpec':
        """Forzamiento solo en el modo n"""
        return cls(terms=tuple(tuple(terminos) if k == n else () for k in range(1, n_max + 1)))

    @classmethod
    def from_json(cls, datos: Optional[Dict[str, Any]], n_max: int) -> 'ForcingSpec':
        """
        Formatos aceptados:
            null o {}                                      → f ≡ 0
            {"all": [{"alpha":…, "m":…, "mu":…}, …]}       → mismos términos en cada modo
            {"modes": {"1": [...], "3": [...]}}            → términos por modo (1-based)
            {"sampled": {"t": [...], "values": [[...], …]}} → muestras por modo
        """
        if not datos:
            return cls.cero()
        if not isinstance(datos, dict):
            raise ForcingSpecError("el forzamiento debe ser un objeto JSON")

        def _terminos(lista) -> Tuple[ForcingTerm, ...]:
            try:
                return tuple(ForcingTerm(float(t['alpha']), t.get('m', 0), float(t.get('mu', 0.0)))
                             for t in lista)
            except (KeyError, TypeError, ValueError) as e:
                raise ForcingSpecError(f"término de forzamiento mal formado: {e}") from e

        if 'all' in datos:
            return cls.uniforme(_terminos(datos['all']), n_max)
        if 'modes' in datos:
            por_modo: List[Tuple[ForcingTerm, ...]] = [() for _ in range(n_max)]
            for clave, lista in datos['modes'].items():
                n = int(clave)
                if not 1 <= n <= n_max:
                    raise DimensionMismatch(f"forzamiento en el modo {n} con n_max={n_max}")
                por_modo[n - 1] = _terminos(lista)
            return cls(terms=tuple(por_modo))
        if 'sampled' in datos:
            muestreo = datos['sampled']
            valores = muestreo.get('values', [])
            if len(valores) > n_max:
                raise DimensionMismatch(f"{len(valores)} modos muestreados para n_max={n_max}")
            valores = list(valores) + [[0.0] * len(muestreo['t'])] * (n_max - len(valores))
            return cls(malla_t=tuple(muestreo['t']), muestras=tuple(tuple(v) for v in valores))
        raise ForcingSpecError("se esperaba 'all', 'modes' o 'sampled'")

    @property
    def aproximada(self) -> bool:
        return self.malla_t is not None

    @property
    def es_cero(self) -> bool:
        if self.aproximada:
            return not any(any(v != 0.0 for v in fila) for fila in self.muestras)
        return not any(any(t.alpha != 0.0 for t in ts) for ts in self.terms)

    @property
    def n_modos(self) -> int:
        """Número de modos declarados (0 para forzamiento nulo implícito)"""
        return len(self.muestras) if self.aproximada else len(self.terms)

    def terminos(self, n: int) -> Tuple[ForcingTerm, ...]:
        if self.aproximada or n > len(self.terms):
            return ()
        return self.terms[n - 1]

    def escalar(self, s: float) -> 'ForcingSpec':
        if self.aproximada:
            return ForcingSpec(malla_t=self.malla_t,
                               muestras=tuple(tuple(s * v for v in fila) for fila in self.muestras))
        return ForcingSpec(terms=tuple(tuple(ForcingTerm(s * t.alpha, t.m, t.mu) for t in ts)
                                       for ts in self.terms))


# ============================================================================
# OPERACIONES
# ============================================================================

def dirichlet_laplacian_1d(n_max: int) -> OperatorSpec:
    """A²y = -y'' en (0, π) con y(0) = y(π) = 0: a_n = n, b_n = 0"""
    if n_max < 1:
        raise OperatorSpecError("n_max debe ser ≥ 1")
    return OperatorSpec(
        a=tuple(float(n) for n in range(1, n_max + 1)),
        b=(0.0,) * n_max,
        kappa=KAPPA_POR_DEFECTO,
        model='dirichlet_1d',
    )


def autofuncion_dirichlet(n: int, x: np.ndarray) -> np.ndarray:
    """√(2/π)·sin(n x)"""
    return math.sqrt(2.0 / math.pi) * np.sin(n * np.asarray(x, dtype=float))


def h_beta_norm(v: ModeVector, spec: OperatorSpec, beta: float) -> float:
    """‖v‖_β = (Σ (a_n² + b_n)^β |v_n|²)^{1/2}"""
    if len(v) != spec.n_max:
        raise DimensionMismatch(f"vector de longitud {len(v)} para n_max={spec.n_max}")
    coeficientes = np.abs(v.como_arreglo()) ** 2
    return float(np.sqrt(np.sum(spec.a0_sq ** beta * coeficientes)))


def tail_norm(v: ModeVector, spec: OperatorSpec, beta: float, n_cut: int) -> float:
    """Norma H_β de los coeficientes con índice n > n_cut"""
    if len(v) != spec.n_max:
        raise DimensionMismatch(f"vector de longitud {len(v)} para n_max={spec.n_max}")
    if n_cut >= spec.n_max:
        return 0.0
    cola = np.abs(v.como_arreglo()[n_cut:]) ** 2
    return float(np.sqrt(np.sum(spec.a0_sq[n_cut:] ** beta * cola)))


def _derivada_termino(term: ForcingTerm, t: np.ndarray, orden: int) -> np.ndarray:
    # d^k/dt^k [t^m e^{μt}] = Σ_i C(k,i) m!/(m-i)! t^{m-i} μ^{k-i} e^{μt}
    total = np.zeros_like(t)
    for i in range(min(orden, term.m) + 1):
        total = total + (math.comb(orden, i) * math.perm(term.m, i)
                         * term.mu ** (orden - i) * t ** (term.m - i))
    return term.alpha * total * np.exp(term.mu * t)


def forcing_eval(f: ForcingSpec, n: int, t: Union[float, np.ndarray],
                 derivative_order: int = 0) -> Union[float, np.ndarray]:
    """
    f_n(t) o sus derivadas

    Exacta para términos exponencial-polinómicos (orden 0, 1 o 2). Para muestras:
    interpolación lineal y derivada por diferencias finitas (np.gradient).

    Raises:
        OutOfGrid si t cae fuera de la malla muestreada
    """
    if derivative_order not in (0, 1, 2):
        raise ValueError(f"derivative_order={derivative_order} no soportado")
    t_arr = np.asarray(t, dtype=float)
    if np.any(t_arr < 0):
        raise ValueError("forcing_eval requiere t ≥ 0")

    if f.aproximada:
        malla = np.asarray(f.malla_t)
        if np.any(t_arr > malla[-1] * (1 + 1e-12)):
            raise OutOfGrid(f"t={float(np.max(t_arr))} fuera de la malla muestreada [0, {malla[-1]}]")
        if not 1 <= n <= len(f.muestras):
            raise DimensionMismatch(f"modo n={n} sin muestras")
        valores = np.asarray(f.muestras[n - 1])
        for _ in range(derivative_order):
            valores = np.gradient(valores, malla)
        resultado = np.interp(t_arr, malla, valores)
    else:
        resultado = np.zeros_like(t_arr)
        for term in f.terminos(n):
            resultado = resultado + _derivada_termino(term, t_arr, derivative_order)

    return float(resultado) if t_arr.ndim == 0 else resultado
