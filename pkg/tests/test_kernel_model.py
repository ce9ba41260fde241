"""
Pruebas del modelo de núcleos de Prony: evaluación, transformada, diagnósticos y ceros de g
"""
import json
import math

import numpy as np
from django.test import SimpleTestCase

from viscospectral.errores import KernelSpecError, PoleEvaluation
from viscospectral.modelos.kernel_model import (
    KernelSpec,
    asymptotic_diagnostics,
    diagnostics,
    eval_kernel,
    g_eval,
    g_real_zeros,
    kernel_desde_json,
    laplace_hat,
    laplace_hat_prime,
    prony_family,
)

K1 = KernelSpec.from_arrays([1.0], [2.0])
K2 = KernelSpec.from_arrays([0.5, 0.5], [1.0, 3.0])
K3 = KernelSpec.from_arrays([2.0], [1.0])
VACIO = KernelSpec()


class KernelSpecTests(SimpleTestCase):

    def test_gamma_debe_ser_estrictamente_creciente(self):
        with self.assertRaises(KernelSpecError):
            KernelSpec.from_arrays([1.0, 1.0], [2.0, 2.0])

    def test_c_no_positivo_rechazado(self):
        with self.assertRaises(KernelSpecError):
            KernelSpec.from_arrays([0.0], [1.0])

    def test_d_negativo_rechazado(self):
        with self.assertRaises(KernelSpecError):
            KernelSpec.from_arrays([1.0], [1.0], d=[-0.1])

    def test_error_json_indica_la_linea_del_termino(self):
        texto = json.dumps({'terms': [{'c': 1.0, 'gamma': 2.0}, {'c': 1.0, 'gamma': 1.0}]}, indent=2)
        with self.assertRaises(KernelSpecError) as ctx:
            kernel_desde_json(texto)
        linea_esperada = texto.splitlines().index('      "gamma": 1.0') + 1
        self.assertEqual(ctx.exception.linea, linea_esperada)
        self.assertIn(f"línea {linea_esperada}", str(ctx.exception))

    def test_json_valido(self):
        spec = kernel_desde_json('{"terms": [{"c": 0.5, "d": 0.1, "gamma": 1}, {"c": 0.5, "gamma": 3}]}')
        self.assertEqual(spec.N, 2)
        np.testing.assert_allclose(spec.d, [0.1, 0.0])


class EvalKernelTests(SimpleTestCase):

    def test_k_en_cero_es_suma_de_c(self):
        self.assertEqual(eval_kernel(K1, 0.0), 1.0)

    def test_nucleo_vacio(self):
        self.assertEqual(eval_kernel(VACIO, 3.0), 0.0)

    def test_dos_terminos(self):
        self.assertAlmostEqual(eval_kernel(K2, 1.0), 0.5 * math.exp(-1) + 0.5 * math.exp(-3), places=14)
        self.assertAlmostEqual(eval_kernel(K2, 1.0), 0.208833, places=6)

    def test_vectorizado(self):
        t = np.array([0.0, 1.0, 2.0])
        np.testing.assert_allclose(eval_kernel(K1, t), np.exp(-2.0 * t))

    def test_tiempo_negativo(self):
        with self.assertRaises(ValueError):
            eval_kernel(K1, -1.0)


class LaplaceTests(SimpleTestCase):

    def test_valores_exactos(self):
        self.assertAlmostEqual(laplace_hat(K1, 2.0), 0.25)
        self.assertEqual(laplace_hat(VACIO, 1j), 0)
        self.assertAlmostEqual(laplace_hat(K2, 0.0).real, 2.0 / 3.0, places=15)

    def test_derivada(self):
        self.assertAlmostEqual(laplace_hat_prime(K1, 0.0).real, -0.25)
        h = 1e-6
        lam = 0.3 + 0.7j
        numerica = (laplace_hat(K2, lam + h) - laplace_hat(K2, lam - h)) / (2 * h)
        self.assertAlmostEqual(abs(numerica - laplace_hat_prime(K2, lam)), 0.0, places=8)

    def test_polo(self):
        with self.assertRaises(PoleEvaluation) as ctx:
            laplace_hat(K1, -2.0)
        self.assertEqual(ctx.exception.gamma, 2.0)

    def test_conjugacion(self):
        lam = np.array([0.5 + 3j, 2.0 - 1j])
        np.testing.assert_allclose(laplace_hat(K2, lam.conj()), laplace_hat(K2, lam).conj())


class DiagnosticsTests(SimpleTestCase):

    def test_clasificaciones(self):
        self.assertEqual(diagnostics(K1).classification, 'stable')
        self.assertEqual(diagnostics(K1).stability_index, 0.5)
        self.assertEqual(diagnostics(K3).classification, 'unstable')
        self.assertEqual(diagnostics(K3).stability_index, 2.0)
        self.assertEqual(diagnostics(KernelSpec.from_arrays([1.0], [1.0])).classification, 'boundary')

    def test_indice_igual_a_transformada_en_cero(self):
        self.assertAlmostEqual(diagnostics(K2).stability_index, laplace_hat(K2, 0.0).real, places=15)

    def test_tolerancia_invalida(self):
        with self.assertRaises(ValueError):
            diagnostics(K1, boundary_tol=0.0)


class CerosDeGTests(SimpleTestCase):

    def test_g_puntual(self):
        self.assertAlmostEqual(g_eval(K1, -1.0), 0.0)
        self.assertAlmostEqual(g_eval(K1, 0.0), 0.5)
        self.assertAlmostEqual(g_eval(K2, (-3 + math.sqrt(5)) / 2), 0.0, places=14)

    def test_un_termino(self):
        self.assertAlmostEqual(g_real_zeros(K1)[0], -1.0, places=12)
        self.assertAlmostEqual(g_real_zeros(K3)[0], 1.0, places=12)

    def test_dos_terminos_formula_cuadratica(self):
        ceros = g_real_zeros(K2)
        np.testing.assert_allclose(ceros, [(-3 + math.sqrt(5)) / 2, (-3 - math.sqrt(5)) / 2], atol=1e-12)

    def test_entrelazado_con_polos(self):
        spec = KernelSpec.from_arrays([0.3, 0.7, 1.1, 0.2], [0.5, 1.5, 4.0, 9.0])
        ceros = g_real_zeros(spec)
        self.assertTrue(-spec.gammas[0] < ceros[0])
        for k in range(1, spec.N):
            self.assertTrue(-spec.gammas[k] < ceros[k] < -spec.gammas[k - 1])
        for x in ceros:
            self.assertAlmostEqual(g_eval(spec, x), 0.0, places=8)

    def test_requiere_terminos(self):
        with self.assertRaises(ValueError):
            g_real_zeros(VACIO)

    def test_signo_de_x1_sigue_al_indice(self):
        rng = np.random.default_rng(20240611)
        probados = 0
        while probados < 200:
            n = int(rng.integers(1, 5))
            gammas = np.cumsum(rng.uniform(0.1, 2.0, n))
            c = rng.uniform(0.05, 2.0, n)
            indice = float(np.sum(c / gammas))
            if abs(indice - 1.0) < 0.05:
                continue
            spec = KernelSpec.from_arrays(c, gammas)
            with self.subTest(c=c.tolist(), gamma=gammas.tolist()):
                self.assertEqual(g_real_zeros(spec)[0] > 0, indice > 1.0)
            probados += 1


class FamiliasInfinitasTests(SimpleTestCase):

    def test_gamma_cuadratica(self):
        reporte = asymptotic_diagnostics(lambda j: j ** 2, 10)
        self.assertEqual(reporte['running_max_gap_product'], 2100.0)
        self.assertTrue(reporte['monotone_growth'])

    def test_gamma_lineal(self):
        reporte = asymptotic_diagnostics(lambda j: j, 5)
        self.assertEqual(reporte['running_max_gap_product'], 5.0)
        # Σ_{j≤5} j^{-3/2}
        self.assertAlmostEqual(reporte['partial_sum_gamma_pow_minus_3_2'], 1.760446, places=6)

    def test_suma_parcial_cubica(self):
        reporte = asymptotic_diagnostics(lambda j: j ** 2, 3)
        self.assertAlmostEqual(reporte['partial_sum_gamma_pow_minus_3_2'], 1 + 1 / 8 + 1 / 27, places=12)

    def test_sumas_de_pesos(self):
        reporte = asymptotic_diagnostics(lambda j: j, 4, c_rule=lambda j: 1.0 / j)
        self.assertAlmostEqual(reporte['partial_sum_c'], 1 + 1 / 2 + 1 / 3 + 1 / 4)
        self.assertAlmostEqual(reporte['partial_sum_c_over_gamma'], 1 + 1 / 4 + 1 / 9 + 1 / 16)

    def test_prony_family_marcada_como_truncada(self):
        spec = prony_family(lambda j: 2.0 ** -j, lambda j: float(j), 6)
        self.assertTrue(spec.truncada)
        self.assertEqual(spec.N, 6)
        self.assertAlmostEqual(eval_kernel(spec, 0.0), 1 - 2.0 ** -6)
