"""
Pruebas del símbolo por modo l_n y de su forma polinomial
"""
import numpy as np
from django.test import SimpleTestCase

from viscospectral.errores import ConditioningRefusal, OperatorSpecError
from viscospectral.modelos.kernel_model import KernelSpec
from viscospectral.modelos.mode_symbol import (
    ModeSymbol,
    l_eval,
    l_prime,
    producto_lineal,
    to_polynomial,
)
from viscospectral.modelos.operator_model import OperatorSpec

K1 = KernelSpec.from_arrays([1.0], [2.0])
K2 = KernelSpec.from_arrays([0.5, 0.5], [1.0, 3.0])
K3 = KernelSpec.from_arrays([2.0], [1.0])
VACIO = KernelSpec()


class LEvalTests(SimpleTestCase):

    def test_sin_memoria(self):
        self.assertAlmostEqual(abs(l_eval(ModeSymbol(1, 1.0, 0.0, VACIO), 1j)), 0.0)

    def test_valores_exactos(self):
        sym = ModeSymbol(1, 1.0, 0.0, K1)
        self.assertAlmostEqual(l_eval(sym, 0.0), 0.5)
        # g(-1) = 0 pero l(-1) = λ² = 1
        self.assertAlmostEqual(l_eval(sym, -1.0), 1.0)

    def test_derivada(self):
        self.assertAlmostEqual(l_prime(ModeSymbol(1, 1.0, 0.0, VACIO), 3.0), 6.0)
        self.assertAlmostEqual(l_prime(ModeSymbol(1, 1.0, 0.0, K1), 0.0), 0.25)

    def test_derivada_contra_diferencias(self):
        sym = ModeSymbol(2, 9.0, 0.0, K2)
        lam = -0.2 + 2.5j
        h = 1e-6
        numerica = (l_eval(sym, lam + h) - l_eval(sym, lam - h)) / (2 * h)
        self.assertLess(abs(numerica - l_prime(sym, lam)), 1e-6)

    def test_con_b(self):
        kernel = KernelSpec.from_arrays([1.0], [2.0], d=[0.5])
        sym = ModeSymbol(1, 4.0, 1.0, kernel)
        # λ² + a² + b - a²c/(λ+γ) - b·d/(λ+γ) en λ = 0
        self.assertAlmostEqual(l_eval(sym, 0.0), 5.0 - 2.0 - 0.25)
        np.testing.assert_allclose(sym.pesos_memoria, [4.5])

    def test_desde_operador(self):
        op = OperatorSpec(a=(1.0, 3.0), b=(0.0, 2.0))
        sym = ModeSymbol.desde_operador(op, K1, 2)
        self.assertEqual((sym.a_sq, sym.b, sym.a), (9.0, 2.0, 3.0))

    def test_a_no_positivo(self):
        with self.assertRaises(OperatorSpecError):
            ModeSymbol(1, 0.0, 0.0, K1)


class PolinomioTests(SimpleTestCase):

    def test_coeficientes_exactos(self):
        np.testing.assert_allclose(to_polynomial(ModeSymbol(1, 1.0, 0.0, K1)).como_arreglo(), [1, 2, 1, 1])
        np.testing.assert_allclose(to_polynomial(ModeSymbol(2, 4.0, 0.0, VACIO)).como_arreglo(), [1, 0, 4])
        np.testing.assert_allclose(to_polynomial(ModeSymbol(1, 1.0, 0.0, K3)).como_arreglo(), [1, 1, 1, -1])

    def test_grado_y_monico(self):
        poly = to_polynomial(ModeSymbol(1, 25.0, 0.0, K2))
        self.assertEqual(poly.grado, K2.N + 2)
        self.assertEqual(poly.coeficientes[0], 1.0)

    def test_forma_racional_por_producto(self):
        sym = ModeSymbol(3, 9.0, 0.0, K2)
        poly = to_polynomial(sym)
        lam = np.array([0.7 + 1.1j, -0.5 + 4j, 2.0])
        esperado = l_eval(sym, lam) * np.polyval(producto_lineal(K2.gammas), lam)
        np.testing.assert_allclose(poly.evaluar(lam), esperado, rtol=1e-12)

    def test_derivada_polinomial(self):
        poly = to_polynomial(ModeSymbol(1, 1.0, 0.0, K1))
        self.assertAlmostEqual(poly.evaluar_derivada(1.0), 3 + 4 + 1)

    def test_rechazo_por_condicionamiento(self):
        grande = KernelSpec.from_arrays([0.01] * 41, list(range(1, 42)))
        with self.assertRaises(ConditioningRefusal):
            to_polynomial(ModeSymbol(1, 1.0, 0.0, grande))


class PropiedadesAleatoriasTests(SimpleTestCase):

    SIMBOLOS = (
        ModeSymbol(1, 1.0, 0.0, K1),
        ModeSymbol(2, 9.0, 0.0, K2),
        ModeSymbol(5, 25.0, 0.0, K3),
        ModeSymbol(3, 4.0, 1.5, KernelSpec.from_arrays([0.4, 0.3], [0.5, 2.0], d=[0.2, 0.1])),
    )

    def puntos(self, semilla, cantidad=100):
        rng = np.random.default_rng(semilla)
        return rng.uniform(0.1, 5.0, cantidad) + 1j * rng.uniform(-5.0, 5.0, cantidad)

    def test_derivada_contra_diferencias_centrales(self):
        h = 1e-6
        for i, sym in enumerate(self.SIMBOLOS):
            lam = self.puntos(100 + i)
            numerica = (l_eval(sym, lam + h) - l_eval(sym, lam - h)) / (2 * h)
            exacta = l_prime(sym, lam)
            with self.subTest(n=sym.n):
                self.assertTrue(np.all(np.abs(numerica - exacta) <= 1e-6 * (1.0 + np.abs(exacta))))

    def test_simetria_conjugada(self):
        for i, sym in enumerate(self.SIMBOLOS):
            lam = self.puntos(200 + i)
            with self.subTest(n=sym.n):
                for funcion in (l_eval, l_prime):
                    np.testing.assert_allclose(funcion(sym, lam.conj()), np.conj(funcion(sym, lam)),
                                               rtol=1e-12, atol=1e-12)
