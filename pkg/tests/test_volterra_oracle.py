"""
Pruebas de los oráculos de Volterra y su equivalencia con la serie de residuos
"""
import math

import numpy as np
from django.test import SimpleTestCase

from viscospectral.errores import DimensionMismatch, StepSizeTooLarge
from viscospectral.modelos.kernel_model import KernelSpec
from viscospectral.modelos.mode_symbol import ModeSymbol
from viscospectral.modelos.operator_model import (
    ForcingSpec,
    ForcingTerm,
    ModeVector,
    OperatorSpec,
    dirichlet_laplacian_1d,
)
from viscospectral.services.series_solver import eval_series_malla, serie_del_problema
from viscospectral.services.spectrum_solver import full_spectrum
from viscospectral.services.volterra_oracle import (
    integrate_mode,
    integrate_problem,
    integrate_quadrature,
    matriz_aumentada,
    memory_from_samples,
    submuestrear,
)

K1 = KernelSpec.from_arrays([1.0], [2.0])
VACIO = KernelSpec()
CERO = ForcingSpec.cero()
DOBLE_EXPONENCIAL = (ForcingTerm(1.0, 0, -1.0), ForcingTerm(-1.0, 0, -2.0))


def _pendiente(pasos, errores):
    return float(np.polyfit(np.log(pasos), np.log(errores), 1)[0])


class IntegrateModeTests(SimpleTestCase):

    def test_oscilador_armonico(self):
        traza = integrate_mode(ModeSymbol(1, 1.0, 0.0, VACIO), 1.0, 0.0, CERO, 1.0, 1e-3)
        self.assertLess(abs(traza.u[-1] - math.cos(1.0)), 1e-8)
        self.assertLess(abs(traza.en(0.5) - math.cos(0.5)), 1e-6)

    def test_datos_nulos(self):
        traza = integrate_mode(ModeSymbol(1, 4.0, 0.0, K1), 0.0, 0.0, CERO, 1.0, 1e-2)
        self.assertEqual(float(np.max(np.abs(traza.u))), 0.0)
        self.assertEqual(float(np.max(np.abs(traza.w))), 0.0)

    def test_paso_demasiado_grande(self):
        with self.assertRaises(StepSizeTooLarge):
            integrate_mode(ModeSymbol(1, 100.0, 0.0, K1), 1.0, 0.0, CERO, 1.0, 0.02)

    def test_matriz_aumentada(self):
        M = matriz_aumentada(ModeSymbol(1, 4.0, 0.0, K1))
        np.testing.assert_allclose(M, [[0, 1, 0], [-4, 0, 4], [1, 0, -2]])

    def test_estado_de_memoria(self):
        sym = ModeSymbol(1, 4.0, 0.0, K1)
        traza = integrate_mode(sym, 1.0, 0.0, CERO, 2.0, 1e-3)
        trapecio = memory_from_samples(traza.t, traza.u, K1.gammas)
        np.testing.assert_allclose(traza.w, trapecio, atol=1e-5)


class MemoriaTests(SimpleTestCase):

    def test_constante(self):
        t = np.linspace(0.0, 3.0, 3001)
        w = memory_from_samples(t, np.ones_like(t), np.array([2.0]))
        np.testing.assert_allclose(w[0], (1 - np.exp(-2 * t)) / 2, atol=1e-6)

    def test_dimensiones(self):
        with self.assertRaises(DimensionMismatch):
            memory_from_samples(np.zeros(3), np.zeros(4), np.array([1.0]))


class EquivalenciaSerieOraculoTests(SimpleTestCase):
    """Serie de residuos y RK4 con dt = 1e-4 sobre [0, 5], modos a = 1..8"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        cls.op = dirichlet_laplacian_1d(8)
        cls.espectro = full_spectrum(cls.op, K1)

    def _diferencia(self, phi0, phi1, f):
        serie = serie_del_problema(self.espectro, phi0, phi1, f)
        trazas = integrate_problem(self.op, K1, phi0, phi1, f, 5.0, 1e-4)
        return max(
            float(np.max(np.abs(eval_series_malla(serie, traza.t)[traza.n - 1] - traza.u)))
            for traza in trazas
        )

    def test_homogeneo(self):
        diferencia = self._diferencia(ModeVector.base(1, 8), ModeVector.ceros(8), CERO)
        self.assertLessEqual(diferencia, 1e-6)

    def test_forzado(self):
        ceros = ModeVector.ceros(8)
        diferencia = self._diferencia(ceros, ceros, ForcingSpec.uniforme(DOBLE_EXPONENCIAL, 8))
        self.assertLessEqual(diferencia, 1e-6)


class OrdenDeConvergenciaTests(SimpleTestCase):
    """RK4 de orden 4 y Heun con trapecios de orden 2, contra la serie (a = 2, T = 5)"""

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        op = dirichlet_laplacian_1d(2)
        cls.sym = ModeSymbol.desde_operador(op, K1, 2)
        espectro = full_spectrum(op, K1)
        cls.f = ForcingSpec.uniforme(DOBLE_EXPONENCIAL, 2)
        cls.serie = serie_del_problema(espectro, ModeVector((0.0, 1.0)), ModeVector((0.0, 0.5)), cls.f)

    def _error(self, integrador, dt):
        traza = integrador(self.sym, 1.0, 0.5, self.f, 5.0, dt)
        exacta = eval_series_malla(self.serie, traza.t)[1]
        return float(np.max(np.abs(exacta - traza.u)))

    def test_rk4(self):
        pasos = [0.04, 0.02, 0.01]
        pendiente = _pendiente(pasos, [self._error(integrate_mode, dt) for dt in pasos])
        self.assertAlmostEqual(pendiente, 4.0, delta=0.5)

    def test_cuadratura(self):
        pasos = [0.04, 0.02, 0.01]
        pendiente = _pendiente(pasos, [self._error(integrate_quadrature, dt) for dt in pasos])
        self.assertAlmostEqual(pendiente, 2.0, delta=0.5)


class ProblemaCompletoTests(SimpleTestCase):

    def test_admite_b(self):
        op = OperatorSpec(a=(1.0, 2.0), b=(0.2, 0.5))
        trazas = integrate_problem(op, K1, ModeVector((1.0, 1.0)), ModeVector.ceros(2), CERO, 1.0, 1e-3)
        self.assertEqual([t.n for t in trazas], [1, 2])
        self.assertTrue(all(np.isfinite(t.u).all() for t in trazas))

    def test_datos_de_longitud_incorrecta(self):
        with self.assertRaises(DimensionMismatch):
            integrate_problem(dirichlet_laplacian_1d(2), K1, ModeVector((1.0,)), ModeVector((0.0,)),
                              CERO, 1.0, 1e-3)

    def test_submuestreo(self):
        traza = integrate_mode(ModeSymbol(1, 1.0, 0.0, K1), 1.0, 0.0, CERO, 1.0, 1e-3)
        muestra = submuestrear(traza, np.linspace(0.0, 1.0, 11))
        self.assertEqual(muestra.u.shape, (11,))
        self.assertEqual(muestra.w.shape, (1, 11))
        self.assertAlmostEqual(muestra.u[-1], traza.u[-1], places=12)
