"""
Pruebas de la serie de residuos: modos clásicos, condiciones iniciales,
residuo de la ecuación, convoluciones en forma cerrada y cotas de normas
"""
import math

import numpy as np
from django.test import SimpleTestCase
from scipy.integrate import quad

from viscospectral.errores import DomainRestriction, MissingSpectrum, ModelMismatch
from viscospectral.modelos.kernel_model import KernelSpec, prony_family
from viscospectral.modelos.operator_model import (
    ForcingSpec,
    ForcingTerm,
    ModeVector,
    OperatorSpec,
    dirichlet_laplacian_1d,
)
from viscospectral.services.series_solver import (
    convolucion_exponencial,
    equation_residual,
    eval_series,
    eval_series_malla,
    evaluate_physical,
    forced_series,
    homogeneous_series,
    memory_states,
    serie_del_problema,
    series_norm_bounds,
    superpose,
    trace_frame,
)
from viscospectral.services.spectrum_solver import full_spectrum
from viscospectral.services.volterra_oracle import memory_from_samples

K1 = KernelSpec.from_arrays([1.0], [2.0])
K2 = KernelSpec.from_arrays([0.5, 0.5], [1.0, 3.0])
VACIO = KernelSpec()
DOBLE_EXPONENCIAL = (ForcingTerm(1.0, 0, -1.0), ForcingTerm(-1.0, 0, -2.0))


class ModoClasicoTests(SimpleTestCase):
    """Sin memoria cada modo es un oscilador armónico"""

    def setUp(self):
        self.espectro = full_spectrum(dirichlet_laplacian_1d(1), VACIO)

    def test_coseno(self):
        serie = homogeneous_series(self.espectro, ModeVector((1.0,)), ModeVector((0.0,)))
        np.testing.assert_allclose(serie.coeficientes[0], [0.5, 0.5], atol=1e-14)
        t = np.linspace(0.0, 5.0, 11)
        np.testing.assert_allclose(eval_series_malla(serie, t)[0], np.cos(t), atol=1e-12)
        self.assertAlmostEqual(eval_series(serie, math.pi / 2, p=1)[1], -1.0, places=12)

    def test_rampa_forzada(self):
        # u'' + u = t, datos nulos: u = t - sin t
        f = ForcingSpec.uniforme([ForcingTerm(1.0, 1, 0.0)], 1)
        serie = forced_series(self.espectro, f)
        t = np.array([0.5, 1.0, 3.0])
        np.testing.assert_allclose(eval_series_malla(serie, t)[0], t - np.sin(t), atol=1e-12)
        np.testing.assert_allclose(eval_series_malla(serie, t, 1)[0], 1 - np.cos(t), atol=1e-12)
        np.testing.assert_allclose(eval_series_malla(serie, t, 2)[0], np.sin(t), atol=1e-12)

    def test_campo_fisico(self):
        serie = homogeneous_series(self.espectro, ModeVector((1.0,)), ModeVector((0.0,)))
        campo = evaluate_physical(serie, [math.pi / 2], 0.0)
        self.assertAlmostEqual(campo[0], math.sqrt(2 / math.pi), places=12)

    def test_datos_nulos(self):
        ceros = ModeVector.ceros(1)
        serie = homogeneous_series(self.espectro, ceros, ceros)
        self.assertEqual(float(np.max(np.abs(eval_series_malla(serie, [0.0, 1.0, 2.0])))), 0.0)
        nula = forced_series(self.espectro, ForcingSpec.cero())
        self.assertEqual(float(np.max(np.abs(eval_series_malla(nula, [1.0, 2.0], 2)))), 0.0)


class SerieConMemoriaTests(SimpleTestCase):

    @classmethod
    def setUpClass(cls):
        super().setUpClass()
        rng = np.random.default_rng(7)
        cls.op = dirichlet_laplacian_1d(8)
        cls.espectro = full_spectrum(cls.op, K2)
        cls.phi0 = ModeVector(tuple(rng.normal(size=8) / np.arange(1, 9) ** 3))
        cls.phi1 = ModeVector(tuple(rng.normal(size=8) / np.arange(1, 9) ** 2))
        cls.f = ForcingSpec.uniforme(DOBLE_EXPONENCIAL + (ForcingTerm(0.5, 1, -1.0),), 8)
        cls.serie = serie_del_problema(cls.espectro, cls.phi0, cls.phi1, cls.f)

    def test_condiciones_iniciales(self):
        serie = homogeneous_series(self.espectro, self.phi0, self.phi1)
        np.testing.assert_allclose(eval_series(serie, 0.0).como_arreglo(), self.phi0.como_arreglo(), atol=1e-8)
        np.testing.assert_allclose(eval_series(serie, 0.0, 1).como_arreglo(), self.phi1.como_arreglo(), atol=1e-8)

    def test_forzada_parte_del_reposo(self):
        serie = forced_series(self.espectro, self.f)
        self.assertLess(np.max(np.abs(eval_series(serie, 0.0).como_arreglo())), 1e-12)
        self.assertLess(np.max(np.abs(eval_series(serie, 0.0, 1).como_arreglo())), 1e-12)

    def test_residuo_de_la_ecuacion(self):
        t = np.linspace(0.1, 5.0, 20)
        self.assertLess(np.max(np.abs(equation_residual(self.serie, t))), 1e-6)

    def test_superposicion(self):
        suma = superpose(homogeneous_series(self.espectro, self.phi0, self.phi1),
                         forced_series(self.espectro, self.f))
        t = np.linspace(0.0, 3.0, 7)
        np.testing.assert_allclose(eval_series_malla(suma, t), eval_series_malla(self.serie, t), atol=1e-14)

    def test_estados_de_memoria_contra_trapecio(self):
        t = np.linspace(0.0, 3.0, 30001)
        u = eval_series_malla(self.serie, t)[2]
        cerrada = memory_states(self.serie, 3, t[-1:])
        trapecio = memory_from_samples(t, u, K2.gammas)[:, -1:]
        np.testing.assert_allclose(cerrada, trapecio, atol=1e-7)

    def test_decaimiento_en_el_caso_estable(self):
        t = np.linspace(0.0, 5.0, 101)
        serie = homogeneous_series(self.espectro, self.phi0, self.phi1)
        u = eval_series_malla(serie, t)
        for n in range(1, 9):
            modo = self.espectro.modo(n)
            dominante = float(np.max(modo.raices().real))
            cota = np.sum(np.abs(serie.coeficientes[n - 1])) * np.exp((dominante + 1e-6) * t)
            self.assertTrue(np.all(np.abs(u[n - 1]) <= cota * (1 + 1e-12) + 1e-15))

    def test_tabla_de_trazas(self):
        tabla = trace_frame(self.serie, [0.0, 1.0])
        self.assertEqual(list(tabla.columns), ['t', 'n', 'u', 'du', 'ddu'])
        self.assertEqual(len(tabla), 16)


class RealidadAleatoriaTests(SimpleTestCase):
    """Con datos reales la serie es real: los residuos del par complejo son conjugados"""

    def test_parte_imaginaria_despreciable(self):
        rng = np.random.default_rng(20240611)
        op = OperatorSpec(a=tuple(float(a) for a in range(3, 9)), b=(0.0,) * 6)
        t = np.linspace(0.0, 5.0, 51)
        for caso in range(15):
            n = int(rng.integers(1, 4))
            gammas = np.cumsum(rng.uniform(0.3, 1.0, n))
            c = rng.uniform(0.1, 1.0, n)
            c *= rng.uniform(0.2, 0.9) / np.sum(c / gammas)
            espectro = full_spectrum(op, KernelSpec.from_arrays(c, gammas))
            escala = float(rng.normal())
            f = ForcingSpec.uniforme((ForcingTerm(escala, 0, -1.0), ForcingTerm(-escala, 0, -2.0)), 6)
            serie = serie_del_problema(espectro, ModeVector(tuple(rng.normal(size=6))),
                                       ModeVector(tuple(rng.normal(size=6))), f)
            for p in (0, 1, 2):
                u = eval_series_malla(serie, t, p, real=False)
                with self.subTest(caso=caso, p=p):
                    self.assertTrue(np.all(np.abs(u.imag) <= 1e-10 * (1.0 + np.abs(u))))


class ConvolucionTests(SimpleTestCase):

    def _cuadratura(self, m, mu, lam, t):
        def integrando(tau, parte):
            valor = tau ** m * np.exp(mu * tau) * np.exp(lam * (t - tau))
            return valor.real if parte == 0 else valor.imag
        re = quad(integrando, 0.0, t, args=(0,), epsabs=1e-13, epsrel=1e-13)[0]
        im = quad(integrando, 0.0, t, args=(1,), epsabs=1e-13, epsrel=1e-13)[0]
        return complex(re, im)

    def test_tres_ramas(self):
        casos = [
            (2, -1.0, -1.0 + 1e-10, 2.0),       # confluente
            (1, -1.0, -1.3 + 0.2j, 1.5),        # serie de Taylor
            (3, -2.0, 0.5 + 3j, 4.0),           # recursión
            (0, -1.0, -0.12 + 0.75j, 5.0),
        ]
        for m, mu, lam, t in casos:
            cerrada = complex(convolucion_exponencial(m, mu, lam, t))
            esperada = self._cuadratura(m, mu, lam, t)
            self.assertLess(abs(cerrada - esperada), 1e-9 * max(1.0, abs(esperada)), (m, mu, lam, t))

    def test_continuidad_entre_ramas(self):
        # |s|·t cruza 1 entre los dos tiempos
        lam, mu = -1.0 + 0.5j, -1.0
        t = np.array([2.0 - 1e-9, 2.0 + 1e-9])
        valores = convolucion_exponencial(2, mu, lam, t)
        self.assertLess(abs(valores[1] - valores[0]), 1e-7)


class RestriccionesTests(SimpleTestCase):

    def test_sin_espectro(self):
        with self.assertRaises(MissingSpectrum):
            homogeneous_series(None, ModeVector((1.0,)), ModeVector((0.0,)))

    def test_segunda_derivada_en_cero_con_nucleo_truncado(self):
        kernel = prony_family(lambda j: 0.5 ** j, lambda j: float(j), 4)
        serie = homogeneous_series(full_spectrum(dirichlet_laplacian_1d(2), kernel),
                                   ModeVector((1.0, 0.0)), ModeVector((0.0, 0.0)))
        with self.assertRaises(DomainRestriction):
            eval_series(serie, 0.0, p=2)
        self.assertTrue(np.isfinite(eval_series(serie, 0.1, p=2).como_arreglo()).all())

    def test_campo_fisico_requiere_dirichlet(self):
        op = OperatorSpec(a=(1.0,), b=(0.0,))
        serie = homogeneous_series(full_spectrum(op, K1), ModeVector((1.0,)), ModeVector((0.0,)))
        with self.assertRaises(ModelMismatch):
            evaluate_physical(serie, [0.5], 0.0)


class CotasDeNormaTests(SimpleTestCase):

    def test_datos_nulos(self):
        espectro = full_spectrum(dirichlet_laplacian_1d(2), K1)
        serie = homogeneous_series(espectro, ModeVector.ceros(2), ModeVector.ceros(2))
        reporte = series_norm_bounds(serie, 1.0, 0)
        self.assertEqual(reporte['ratio'], 0.0)
        self.assertTrue(reporte['degenerate'])

    def test_cociente_estable_en_n_max(self):
        cocientes = []
        for n_max in (8, 16, 32):
            espectro = full_spectrum(dirichlet_laplacian_1d(n_max), K1)
            serie = homogeneous_series(espectro, ModeVector.base(1, n_max), ModeVector.ceros(n_max))
            reporte = series_norm_bounds(serie, 1.0, 2)
            self.assertTrue(reporte['finite'])
            cocientes.append(reporte['ratio'])
        self.assertAlmostEqual(cocientes[0], cocientes[2], places=12)

    def test_forzamiento_cuadrado_homogeneo(self):
        espectro = full_spectrum(dirichlet_laplacian_1d(4), K1)
        f = ForcingSpec.uniforme(DOBLE_EXPONENCIAL, 4)
        base = series_norm_bounds(forced_series(espectro, f), 1.0, 1)
        doble = series_norm_bounds(forced_series(espectro, f.escalar(2.0)), 1.0, 1)
        self.assertAlmostEqual(doble['ratio'], base['ratio'], places=10)
        self.assertAlmostEqual(doble['rhs'], 4.0 * base['rhs'], places=8)

    def test_puntos_de_la_norma_del_forzamiento(self):
        espectro = full_spectrum(dirichlet_laplacian_1d(4), K1)
        serie = forced_series(espectro, ForcingSpec.uniforme(DOBLE_EXPONENCIAL, 4))
        fina = series_norm_bounds(serie, 1.0, 1)
        gruesa = series_norm_bounds(serie, 1.0, 1, puntos_norma=401)
        self.assertEqual(fina['lhs_sup'], gruesa['lhs_sup'])
        self.assertNotEqual(fina['rhs_forcing'], gruesa['rhs_forcing'])
        self.assertAlmostEqual(gruesa['rhs_forcing'] / fina['rhs_forcing'], 1.0, places=3)
