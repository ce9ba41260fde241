#!/usr/bin/env python
"""
Grafica el espectro emitido por `viscospectral spectrum`

Uso: python scripts/graficar_espectro.py <out>/spectrum.csv <figura.png> [--k0 K(0)]

Columnas reales λ_{k,n} (se acumulan en x_k) y rama compleja λ_n^± junto a la
recta Re λ = -K(0)/2. Si no se da --k0, se lee de report.json junto al CSV.
"""
import argparse
import json
import sys
from pathlib import Path

import matplotlib
matplotlib.use('Agg')  # Sin interfaz gráfica
import matplotlib.pyplot as plt
import pandas as pd


def leer_k0(csv_path: Path):
    reporte = csv_path.parent / 'report.json'
    if not reporte.exists():
        return None
    datos = json.loads(reporte.read_text(encoding='utf-8'))
    terminos = datos.get('problem', {}).get('kernel', {}).get('terms', [])
    return sum(t['c'] for t in terminos)


def graficar(espectro: pd.DataFrame, salida: Path, k0=None) -> None:
    plt.rcParams.update({'font.size': 10, 'savefig.dpi': 200, 'savefig.bbox': 'tight'})
    fig, (ax_plano, ax_reales) = plt.subplots(1, 2, figsize=(12, 5))

    complejas = espectro[espectro['kind'].str.startswith('complex')]
    reales = espectro[espectro['kind'].str.startswith('real')]

    ax_plano.scatter(complejas['re'], complejas['im'], s=8, color='#1f77b4', label='λ_n^±')
    ax_plano.scatter(reales['re'], reales['im'], s=8, color='#d62728', label='λ_{k,n}')
    if k0 is not None:
        ax_plano.axvline(-k0 / 2.0, color='gray', linestyle='--', linewidth=1, label='Re λ = -K(0)/2')
    ax_plano.set_xlabel('Re λ')
    ax_plano.set_ylabel('Im λ')
    ax_plano.set_title('Espectro en el plano complejo')
    ax_plano.legend(loc='best')
    ax_plano.grid(True, alpha=0.3)

    for kind, grupo in reales.groupby('kind'):
        ax_reales.plot(grupo['n'], grupo['re'], marker='.', linewidth=1, label=kind)
    ax_reales.set_xlabel('n')
    ax_reales.set_ylabel('λ_{k,n}')
    ax_reales.set_title('Raíces reales por modo')
    if not reales.empty:
        ax_reales.legend(loc='best')
    ax_reales.grid(True, alpha=0.3)

    fig.savefig(salida, facecolor='white')
    plt.close(fig)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description='Grafica spectrum.csv')
    parser.add_argument('csv', type=Path)
    parser.add_argument('salida', type=Path)
    parser.add_argument('--k0', type=float, default=None, help='K(0) = Σ c_j para la recta de referencia')
    args = parser.parse_args(argv)

    espectro = pd.read_csv(args.csv)
    k0 = args.k0 if args.k0 is not None else leer_k0(args.csv)
    graficar(espectro, args.salida, k0)
    print(f"✅ Figura guardada en {args.salida}")
    return 0


if __name__ == '__main__':
    sys.exit(main())
