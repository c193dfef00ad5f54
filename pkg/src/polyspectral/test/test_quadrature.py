"""Tests for the ray quadrature helpers."""

import math
import unittest

import numpy as np

from polyspectral.errors import TruncationFailure
from polyspectral.quadrature import log_magnitude, scan_halfwidths, trapezoid


class TestTrapezoid(unittest.TestCase):
    """Tests for the step-halving trapezoid rule."""

    def test_gaussian(self) -> None:
        value, error = trapezoid(lambda s: np.exp(-(s**2)), -8.0, 8.0, 1e-12)
        self.assertAlmostEqual(float(value), math.sqrt(math.pi), places=12)
        self.assertLessEqual(float(error), 1e-10)

    def test_vector_integrand(self) -> None:
        def integrand(s: np.ndarray) -> np.ndarray:
            return np.array([np.exp(-(s**2)), s**2 * np.exp(-(s**2))])

        value, _ = trapezoid(integrand, -9.0, 9.0, 1e-12)
        self.assertEqual(value.shape, (2,))
        np.testing.assert_allclose(
            value, [math.sqrt(math.pi), math.sqrt(math.pi) / 2], rtol=1e-11
        )

    def test_complex_integrand(self) -> None:
        # int exp(-s**2 + i s) ds = sqrt(pi) exp(-1/4)
        value, _ = trapezoid(lambda s: np.exp(-(s**2) + 1j * s), -9.0, 9.0, 1e-12)
        expected = math.sqrt(math.pi) * math.exp(-0.25)
        self.assertAlmostEqual(complex(value), expected, places=11)

    def test_warns_without_convergence(self) -> None:
        # A kink off the grid only gives second-order convergence.
        with self.assertLogs("polyspectral.quadrature", "WARNING"):
            value, _ = trapezoid(np.abs, -1.0, 1.3, 1e-15)
        self.assertAlmostEqual(float(value), (1.0 + 1.69) / 2, places=6)


class TestTruncation(unittest.TestCase):
    """Tests for log_magnitude and scan_halfwidths."""

    def test_log_magnitude(self) -> None:
        values = np.array([2.0, 0.0, -1j])
        result = log_magnitude(values, np.array([1.0, 5.0, -3.0]))
        self.assertAlmostEqual(result[0], math.log(2.0) + 1.0, places=15)
        self.assertEqual(result[1], -math.inf)
        self.assertAlmostEqual(result[2], -3.0, places=15)

    def test_scan_gaussian(self) -> None:
        # -s**2 < log(1e-10) from s = 5.0 on; three quiet steps end at 5.5.
        lo, hi = scan_halfwidths(lambda s: -(s**2), 1e-10)
        self.assertEqual((lo, hi), (-5.5, 5.5))

    def test_scan_asymmetric(self) -> None:
        lo, hi = scan_halfwidths(lambda s: -np.where(s > 0, 4.0, 1.0) * s**2, 1e-10)
        self.assertLess(lo, -hi)

    def test_scan_failure(self) -> None:
        with self.assertRaises(TruncationFailure):
            scan_halfwidths(np.zeros_like, 1e-10)


if __name__ == "__main__":
    unittest.main()
