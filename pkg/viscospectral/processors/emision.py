"""
📊 Emisión de artefactos: CSV, reportes JSON y el manifiesto lateral

Cada CSV escrito queda registrado en manifest.json con su encabezado y número de filas.
La salida es determinista: floats con '%.17g' y JSON con claves ordenadas.
"""
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

logger = logging.getLogger(__name__)

FORMATO_FLOAT = '%.17g'
NOMBRE_MANIFIESTO = 'manifest.json'


def a_json(valor: Any) -> Any:
    """Convierte tipos numpy, complejos y NaN a valores serializables"""
    if isinstance(valor, dict):
        return {str(k): a_json(v) for k, v in valor.items()}
    if isinstance(valor, (list, tuple)):
        return [a_json(v) for v in valor]
    if isinstance(valor, np.ndarray):
        return [a_json(v) for v in valor.tolist()]
    if isinstance(valor, (bool, np.bool_)):
        return bool(valor)
    if isinstance(valor, (int, np.integer)):
        return int(valor)
    if isinstance(valor, (complex, np.complexfloating)):
        return {'re': a_json(float(valor.real)), 'im': a_json(float(valor.imag))}
    if isinstance(valor, (float, np.floating)):
        valor = float(valor)
        return None if math.isnan(valor) else valor
    if hasattr(valor, 'a_dict'):
        return a_json(valor.a_dict())
    return valor


def volcar_json(datos: Any, compacto: bool = False) -> str:
    if compacto:
        return json.dumps(a_json(datos), sort_keys=True, separators=(',', ':'), ensure_ascii=False)
    return json.dumps(a_json(datos), sort_keys=True, indent=2, ensure_ascii=False)


def escribir_csv(frame: pd.DataFrame, path: Union[str, Path]) -> int:
    """Escribe el DataFrame sin índice; devuelve el número de filas"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format=FORMATO_FLOAT, lineterminator='\n')
    return len(frame)


class EmisorArtefactos:
    """
    Escribe los artefactos de un comando en out_dir y lleva el manifiesto

    Uso:
        emisor = EmisorArtefactos(out_dir)
        emisor.csv('spectrum.csv', frame)
        emisor.json('report.json', reporte)
        emisor.cerrar()
    """

    def __init__(self, out_dir: Union[str, Path]):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.entradas: Dict[str, Dict[str, Any]] = {}

    def csv(self, nombre: str, frame: pd.DataFrame) -> Path:
        path = self.out_dir / nombre
        filas = escribir_csv(frame, path)
        self.entradas[nombre] = {'header': list(frame.columns), 'rows': filas}
        logger.info(f"📄 {nombre}: {filas} filas")
        return path

    def json(self, nombre: str, datos: Any) -> Path:
        path = self.out_dir / nombre
        path.write_text(volcar_json(datos) + '\n', encoding='utf-8')
        return path

    def cerrar(self, extra: Optional[Dict[str, Any]] = None) -> Path:
        manifiesto = {'files': self.entradas}
        if extra:
            manifiesto.update(extra)
        path = self.json(NOMBRE_MANIFIESTO, manifiesto)
        logger.info(f"✅ Manifiesto con {len(self.entradas)} CSV en {self.out_dir}")
        return path
