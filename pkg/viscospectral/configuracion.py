"""
Carga de la configuración de un problema desde JSON

{
  "kernel":   {"terms": [{"c": 1.0, "d": 0.0, "gamma": 2.0}]},
  "operator": {"model": "dirichlet_1d", "n_max": 8},
  "phi0":     [1.0],
  "phi1":     [],
  "forcing":  {"all": [{"alpha": 1, "m": 0, "mu": -1}, {"alpha": -1, "m": 0, "mu": -2}]},
  "weight":   null,
  "horizon":  5.0,
  "n_max":    8,
  "dt":       1e-4,
  "x_grid":   65
}
"""
import json
import logging
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
from django.conf import settings

from .errores import ConfiguracionInvalida, DimensionMismatch, InadmissibleProblem, OperatorSpecError
from .modelos.kernel_model import KernelSpec, kernel_desde_json
from .modelos.operator_model import (
    ForcingSpec,
    ModeVector,
    OperatorSpec,
    dirichlet_laplacian_1d,
    h_beta_norm,
    tail_norm,
)

logger = logging.getLogger(__name__)

CLAVES_CONOCIDAS = {
    'kernel', 'operator', 'phi0', 'phi1', 'forcing', 'weight', 'horizon', 'n_max', 'dt', 'x_grid',
}


def configuracion_por_defecto() -> Dict[str, Any]:
    return dict(getattr(settings, 'VISCOSPECTRAL_CONFIG', {}))


@dataclass(frozen=True)
class ProblemInstance:
    kernel: KernelSpec
    operator: OperatorSpec
    phi0: ModeVector
    phi1: ModeVector
    forcing: ForcingSpec
    weight: Optional[float] = None
    horizon: float = 5.0
    n_max: int = 1
    dt: float = 1e-4
    x_grid: int = 65
    colas: Dict[str, float] = field(default_factory=dict, compare=False)

    def verificar_admisible(self) -> None:
        """
        f(0) = 0 lo garantiza ForcingSpec; aquí se verifican dimensiones y normas finitas

        Raises:
            InadmissibleProblem
        """
        n = self.operator.n_max
        if len(self.phi0) != n or len(self.phi1) != n:
            raise InadmissibleProblem(f"datos iniciales de longitud {len(self.phi0)}/{len(self.phi1)} para n_max={n}")
        if self.forcing.n_modos not in (0, n):
            raise InadmissibleProblem(f"forzamiento con {self.forcing.n_modos} modos para n_max={n}")
        normas = (h_beta_norm(self.phi0, self.operator, 2.0), h_beta_norm(self.phi1, self.operator, 1.0))
        if not np.isfinite(normas).all():
            raise InadmissibleProblem("φ0 ∉ H₂ o φ1 ∉ H₁")
        if self.horizon <= 0 or self.dt <= 0:
            raise InadmissibleProblem(f"horizon={self.horizon} y dt={self.dt} deben ser positivos")

    def escalar(self, s: float) -> 'ProblemInstance':
        """Mismo problema con (φ0, φ1, f) multiplicados por s"""
        return replace(self, phi0=self.phi0.escalar(s), phi1=self.phi1.escalar(s),
                       forcing=self.forcing.escalar(s))

    def a_dict(self) -> Dict[str, Any]:
        return {
            'kernel': self.kernel.a_dict(),
            'operator': self.operator.a_dict(),
            'n_max': self.n_max,
            'weight': self.weight,
            'horizon': self.horizon,
            'dt': self.dt,
            'forcing_approximate': self.forcing.aproximada,
            'truncation_tails': dict(self.colas),
        }


def _vector_con_cola(valores, op_completo: OperatorSpec, n_max: int, beta: float,
                     nombre: str, colas: Dict[str, float]) -> ModeVector:
    valores = list(valores or [])
    if len(valores) <= n_max:
        return ModeVector.desde_lista(valores, n_max)
    if len(valores) > op_completo.n_max:
        raise DimensionMismatch(f"{nombre} tiene {len(valores)} modos y el operador {op_completo.n_max}")
    completo = ModeVector.desde_lista(valores, op_completo.n_max)
    colas[nombre] = tail_norm(completo, op_completo, beta, n_max)
    logger.info(f"📊 {nombre}: cola H_{beta:g} descartada = {colas[nombre]:.3e}")
    return ModeVector(completo.coeffs[:n_max])


def problema_desde_dict(datos: Dict[str, Any], texto: Optional[str] = None,
                        defaults: Optional[Dict[str, Any]] = None) -> ProblemInstance:
    """Construye el ProblemInstance; los campos opcionales toman los valores por defecto"""
    if defaults is None:
        defaults = configuracion_por_defecto()
    if not isinstance(datos, dict):
        raise ConfiguracionInvalida("la configuración debe ser un objeto JSON")
    desconocidas = set(datos) - CLAVES_CONOCIDAS
    if desconocidas:
        raise ConfiguracionInvalida(f"claves desconocidas: {sorted(desconocidas)}")
    if 'kernel' not in datos or 'operator' not in datos:
        raise ConfiguracionInvalida("se requieren 'kernel' y 'operator'")

    kernel = kernel_desde_json(datos['kernel'], texto=texto)

    if not isinstance(datos['operator'], dict):
        raise OperatorSpecError(f"'operator' debe ser un objeto JSON, no {type(datos['operator']).__name__}")
    datos_op = dict(datos['operator'])
    if datos_op.get('model') == 'dirichlet_1d' and 'n_max' not in datos_op:
        if 'n_max' not in datos:
            raise ConfiguracionInvalida("falta n_max para el operador dirichlet_1d")
        datos_op['n_max'] = datos['n_max']
    for nombre in ('phi0', 'phi1'):
        if not isinstance(datos.get(nombre) or [], list):
            raise ConfiguracionInvalida(f"'{nombre}' debe ser una lista de coeficientes")

    try:
        n_max = int(datos.get('n_max', datos_op.get('n_max', len(datos_op.get('a', [])))))
        # el operador completo cubre los datos más largos para medir la cola truncada
        largo = max(n_max, len(datos.get('phi0') or []), len(datos.get('phi1') or []))
        if datos_op.get('model') == 'dirichlet_1d':
            op_completo = dirichlet_laplacian_1d(max(largo, int(datos_op['n_max'])))
        else:
            op_completo = OperatorSpec.from_json(datos_op)
    except (TypeError, ValueError) as e:
        raise OperatorSpecError(f"operador o n_max inválido: {e}") from e
    if n_max < 1 or n_max > op_completo.n_max:
        raise DimensionMismatch(f"n_max={n_max} incompatible con el operador de {op_completo.n_max} modos")
    operador = op_completo.truncar(n_max)

    colas: Dict[str, float] = {}
    try:
        phi0 = _vector_con_cola(datos.get('phi0'), op_completo, n_max, 2.0, 'phi0', colas)
        phi1 = _vector_con_cola(datos.get('phi1'), op_completo, n_max, 1.0, 'phi1', colas)
    except (TypeError, ValueError) as e:
        raise ConfiguracionInvalida(f"coeficientes iniciales inválidos: {e}") from e

    try:
        weight = None if datos.get('weight') is None else float(datos['weight'])
        problema = ProblemInstance(
            kernel=kernel,
            operator=operador,
            phi0=phi0,
            phi1=phi1,
            forcing=ForcingSpec.from_json(datos.get('forcing'), n_max),
            weight=weight,
            horizon=float(datos.get('horizon', defaults.get('HORIZONTE', 5.0))),
            n_max=n_max,
            dt=float(datos.get('dt', defaults.get('DT_ORACULO', 1e-4))),
            x_grid=int(datos.get('x_grid', defaults.get('PUNTOS_X', 65))),
            colas=colas,
        )
    except (TypeError, ValueError) as e:
        raise ConfiguracionInvalida(f"valor inválido en la configuración: {e}") from e

    problema.verificar_admisible()
    return problema


def cargar_configuracion(path: Union[str, Path], defaults: Optional[Dict[str, Any]] = None) -> ProblemInstance:
    """
    Lee el archivo JSON de un problema

    Raises:
        ConfiguracionInvalida (o subclases) con la línea del término inválido del núcleo
    """
    path = Path(path)
    try:
        texto = path.read_text(encoding='utf-8')
    except OSError as e:
        raise ConfiguracionInvalida(f"no se pudo leer {path}: {e}") from e
    try:
        datos = json.loads(texto)
    except json.JSONDecodeError as e:
        raise ConfiguracionInvalida(f"{path}: JSON inválido en la línea {e.lineno}: {e.msg}") from e

    problema = problema_desde_dict(datos, texto=texto, defaults=defaults)
    logger.info(f"✅ Configuración cargada: {path.name}, N={problema.kernel.N}, n_max={problema.n_max}")
    return problema
