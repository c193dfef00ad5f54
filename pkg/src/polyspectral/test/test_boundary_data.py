"""Tests for boundary data, pairings and Fourier transforms."""

import cmath
import json
import math
import unittest

import numpy as np
from numpy.polynomial import Polynomial

from polyspectral import pair, pair_exponential
from polyspectral.boundary_data import (
    BoundaryDatum,
    DiracCharge,
    PointMassDatum,
    SmoothDatum,
    TestFunction,
    fourier,
    gauss_legendre,
    integrate_smooth,
    legendre_exponential_moments,
    project_function,
    shifted_legendre_vander,
)
from polyspectral.errors import InsufficientDerivativeOrder, MaxOrderExceeded

ONE = BoundaryDatum.from_legendre([1.0])

#: Exponent of the test exponential for the mollifier limits.
MOLLIFIER_MU = -0.7 + 1.3j

#: Data used by the property tests.
SAMPLE_DATA = [
    ONE,
    BoundaryDatum.from_legendre([0.3, -1.2 + 0.5j, 0.7, 0.1j]),
    BoundaryDatum.dirac(0),
    BoundaryDatum.dirac(1, 2, 0.5 - 1j),
    BoundaryDatum.from_legendre([1.0, 2.0]) + BoundaryDatum.dirac(0, 1, 3.0),
]


def mollified_pairing(endpoint, order, h, mu=MOLLIFIER_MU):
    """
    Pairing of exp(mu tau) with the order-th derivative of a bump of width h.

    The bump is 30 t**2 (1 - t)**2 / h in t = |tau - endpoint| / h, with unit
    mass and support inside [0, 1], so it tends to delta at the endpoint.
    """
    t, w = gauss_legendre(40)
    sign = 1.0 if endpoint == 0 else -1.0
    if order == 0:
        profile = 30.0 * t**2 * (1.0 - t) ** 2
    else:
        profile = 60.0 * t * (1.0 - t) * (1.0 - 2.0 * t)
    values = profile * np.exp(mu * (endpoint + sign * h * t))
    return complex(sign**order * h ** (-order) * np.sum(w * values))


class TestPair(unittest.TestCase):
    """Tests for the generic pairing with smooth functions."""

    def test_examples(self) -> None:
        # Triples (datum, test function, expected pairing)
        cases = [
            (ONE, Polynomial([1.0]), 1.0),
            (BoundaryDatum.dirac(0), Polynomial([0, 0, 1]), 0.0),
            (BoundaryDatum.dirac(0, 1), Polynomial([0, 0, 1]), 0.0),
            (BoundaryDatum.dirac(1, 1), Polynomial([0, 0, 1]), -2.0),
            (BoundaryDatum.dirac(1, 2, 3.0), Polynomial([0, 0, 1]), 6.0),
            (BoundaryDatum.from_legendre([0, 1]), Polynomial([0, 1]), 1 / 6),
        ]
        for datum, phi, expected in cases:
            with self.subTest(datum=datum, phi=phi):
                self.assertAlmostEqual(pair(datum, phi), expected, places=13)

    def test_missing_derivative(self) -> None:
        with self.assertRaises(InsufficientDerivativeOrder):
            pair(BoundaryDatum.dirac(0, 1), lambda tau: tau)

    def test_test_functions_annihilate_endpoint_charges(self) -> None:
        phi = TestFunction(center=0.5, width=0.8)
        smooth = BoundaryDatum.from_legendre([0.4, -0.2, 0.9])
        charges = (
            BoundaryDatum.dirac(0, 0, 2.0)
            + BoundaryDatum.dirac(1, 3, -1.5j)
            + BoundaryDatum.dirac(1, 1, 7.0)
        )
        self.assertEqual(pair(charges, phi), 0)
        combined = pair(smooth + charges, phi)
        self.assertAlmostEqual(combined, pair(smooth, phi), places=15)

    def test_unknown_type(self) -> None:
        with self.assertRaises(NotImplementedError):
            pair(object(), Polynomial([1.0]))
        with self.assertRaises(NotImplementedError):
            pair_exponential("not a datum", np.zeros(1))


class TestFourier(unittest.TestCase):
    """Tests for the Fourier transform of boundary data."""

    def test_examples(self) -> None:
        # Triples (datum, zeta, expected transform)
        cases = [
            (ONE, 0.0, 1.0),
            (ONE, 2.5, (1 - cmath.exp(-2.5j)) / 2.5j),
            (ONE, -40.0, (1 - cmath.exp(40j)) / -40j),
            (ONE, 1 + 2j, (1 - cmath.exp(-1j * (1 + 2j))) / (1j * (1 + 2j))),
            (BoundaryDatum.dirac(0), 17.0, 1.0),
            (BoundaryDatum.dirac(1), 3.0, cmath.exp(-3j)),
            (BoundaryDatum.dirac(1, 1), 3.0, 3j * cmath.exp(-3j)),
        ]
        for datum, zeta, expected in cases:
            with self.subTest(datum=datum, zeta=zeta):
                error = abs(fourier(datum, zeta) - expected)
                self.assertLess(error, 1e-13 * max(1.0, abs(expected)))

    def test_zero_frequency_is_total_mass(self) -> None:
        for datum in SAMPLE_DATA:
            with self.subTest(datum=datum):
                self.assertAlmostEqual(
                    fourier(datum, 0.0), pair(datum, Polynomial([1.0])), places=13
                )

    def test_vectorized(self) -> None:
        datum = SAMPLE_DATA[1]
        zeta = np.array([-3.0, 0.0, 0.5, 60.0])
        values = fourier(datum, zeta)
        self.assertEqual(values.shape, zeta.shape)
        for z, v in zip(zeta, values):
            self.assertAlmostEqual(fourier(datum, float(z)), v, places=13)

    def test_entire(self) -> None:
        h = 1e-5
        for datum in SAMPLE_DATA:
            for zeta in [0.3 + 0.2j, -2.0 + 1.0j, 5.0]:
                with self.subTest(datum=datum, zeta=zeta):
                    real_step = fourier(datum, zeta + h) - fourier(datum, zeta - h)
                    real_step /= 2 * h
                    ih = 1j * h
                    imag_step = fourier(datum, zeta + ih) - fourier(datum, zeta - ih)
                    imag_step /= 2 * ih
                    scale = max(1.0, abs(real_step))
                    self.assertLess(abs(real_step - imag_step), 1e-6 * scale)

    def test_polynomial_growth(self) -> None:
        k = np.linspace(-1e3, 1e3, 2001)
        for datum in SAMPLE_DATA:
            with self.subTest(datum=datum):
                order = max(0, datum.masses.max_order)
                bound = np.abs(fourier(datum, k)) / (1 + np.abs(k)) ** order
                self.assertLess(np.max(bound), 10.0 * datum.norm() + 1.0)


class TestMoments(unittest.TestCase):
    """Tests for the scaled Legendre-exponential moments."""

    def test_against_quadrature(self) -> None:
        nodes, weights = gauss_legendre(600)
        vander = shifted_legendre_vander(nodes, 12)
        for mu in [0.0, 1.5 - 2j, 30j, 55.0, -40 + 3j, 15 - 90j]:
            with self.subTest(mu=mu):
                shift = max(0.0, complex(mu).real)
                expected = (np.exp(mu * nodes - shift) * weights) @ vander
                actual = legendre_exponential_moments(mu, 12)
                self.assertLess(np.max(np.abs(actual - expected)), 1e-11)

    def test_shape(self) -> None:
        mu = np.zeros((3, 2), dtype=complex)
        self.assertEqual(legendre_exponential_moments(mu, 5).shape, (3, 2, 5))


class TestProjection(unittest.TestCase):
    """Tests for project_function and SmoothDatum."""

    def test_constant(self) -> None:
        datum = project_function(lambda tau: np.ones_like(tau), 3)
        np.testing.assert_allclose(datum.array, [1, 0, 0, 0], atol=1e-14)

    def test_legendre_polynomial(self) -> None:
        def p2(tau: np.ndarray) -> np.ndarray:
            return shifted_legendre_vander(tau, 3)[..., 2]

        datum = project_function(p2, 4)
        np.testing.assert_allclose(datum.array, [0, 0, 1, 0, 0], atol=1e-13)

    def test_exponential(self) -> None:
        datum = project_function(np.exp, 10)
        self.assertLess(abs(datum(0.5) - math.exp(0.5)), 1e-10)

    def test_l2_norm(self) -> None:
        datum = project_function(lambda tau: 1 + 2 * tau, 3)
        # int_0^1 (1 + 2 tau)**2 dtau = 13/3
        self.assertAlmostEqual(datum.l2_norm(), math.sqrt(13 / 3), places=13)

    def test_arithmetic(self) -> None:
        a = SmoothDatum.from_array([1, 2])
        b = SmoothDatum.from_array([0, 1, 3])
        np.testing.assert_array_equal((a + b).array, [1, 3, 3])
        np.testing.assert_array_equal(a.scaled(2j).array, [2j, 4j])
        self.assertEqual(SmoothDatum().degree, -1)
        self.assertEqual(b.degree, 2)

    def test_integrate_smooth(self) -> None:
        self.assertAlmostEqual(integrate_smooth(np.sin, 0.0, math.pi), 2.0, places=13)


class TestPointMasses(unittest.TestCase):
    """Tests for Dirac charges."""

    def test_order_limit(self) -> None:
        with self.assertRaises(MaxOrderExceeded):
            BoundaryDatum.dirac(0, 5)
        with self.assertRaises(ValueError):
            DiracCharge(2, 0, 1.0)
        mu = np.array([-0.5 + 2.0j])
        top = pair_exponential(BoundaryDatum.dirac(0, 4), mu)
        np.testing.assert_allclose(top, mu**4, rtol=1e-14)

    def test_combined(self) -> None:
        masses = PointMassDatum(
            (DiracCharge(0, 0, 1.0), DiracCharge(1, 0, 2.0), DiracCharge(0, 0, -1.0))
        )
        self.assertEqual(masses.combined(), PointMassDatum((DiracCharge(1, 0, 2.0),)))
        self.assertEqual(masses.max_order, 0)
        self.assertEqual(PointMassDatum().max_order, -1)

    def test_norm(self) -> None:
        datum = BoundaryDatum.from_legendre([3.0]) + BoundaryDatum.dirac(1, 0, 4j)
        self.assertAlmostEqual(datum.norm(), 7.0, places=15)
        self.assertEqual(BoundaryDatum.zero().norm(), 0.0)

    def test_json_round_trip(self) -> None:
        datum = BoundaryDatum.from_legendre([1.5, -0.25j])
        datum += BoundaryDatum.dirac(1, 2, 0.5 - 1j)
        text = json.dumps(datum.to_json())
        self.assertEqual(BoundaryDatum.from_json(json.loads(text)), datum)

    def test_limit_of_mollified_charges(self) -> None:
        mu = np.array([MOLLIFIER_MU])
        for endpoint in (0, 1):
            for order in (0, 1):
                dirac = BoundaryDatum.dirac(endpoint, order)
                expected = complex(pair_exponential(dirac, mu)[0])
                errors = []
                for h in [1e-1, 1e-2, 1e-3]:
                    with self.subTest(endpoint=endpoint, order=order, h=h):
                        error = abs(mollified_pairing(endpoint, order, h) - expected)
                        self.assertLessEqual(error, 2.0 * h)
                        errors.append(error)
                with self.subTest(endpoint=endpoint, order=order):
                    self.assertLess(errors[1], errors[0] / 5)
                    self.assertLess(errors[2], errors[1] / 5)
                    # Richardson step removes the O(h) term.
                    coarse = mollified_pairing(endpoint, order, 1e-3)
                    fine = mollified_pairing(endpoint, order, 1e-4)
                    limit = (10.0 * fine - coarse) / 9.0
                    self.assertLessEqual(abs(limit - expected), 1e-6)


class TestTestFunction(unittest.TestCase):
    """Tests for the bump test functions."""

    def test_support_and_sign(self) -> None:
        phi = TestFunction(center=0.4, width=0.6)
        lo, hi = phi.support
        self.assertAlmostEqual(lo, 0.1, places=15)
        self.assertAlmostEqual(hi, 0.7, places=15)
        tau = np.linspace(0.0, 1.0, 1001)
        values = phi(tau)
        self.assertTrue(np.all(values >= 0.0))
        self.assertTrue(np.all(values[(tau <= 0.1) | (tau >= 0.7)] == 0.0))
        self.assertAlmostEqual(phi(0.4), math.exp(-4.0), places=15)

    def test_derivatives(self) -> None:
        phi = TestFunction()
        h = 1e-5
        for m in range(1, 4):
            for tau in [0.2, 0.45, 0.8]:
                with self.subTest(m=m, tau=tau):
                    lower = phi.deriv(m - 1)
                    estimate = (lower(tau + h) - lower(tau - h)) / (2 * h)
                    self.assertAlmostEqual(phi.deriv(m)(tau), estimate, delta=1e-5)

    def test_derivatives_vanish_at_endpoints(self) -> None:
        phi = TestFunction()
        for m in range(5):
            with self.subTest(m=m):
                self.assertEqual(phi.deriv(m)(0.0), 0.0)
                self.assertEqual(phi.deriv(m)(1.0), 0.0)

    def test_invalid(self) -> None:
        with self.assertRaises(ValueError):
            TestFunction(center=0.1, width=0.5)
        with self.assertRaises(ValueError):
            TestFunction(width=0.0)
        with self.assertRaises(InsufficientDerivativeOrder):
            TestFunction().deriv(5)


if __name__ == "__main__":
    unittest.main()
