"""
The half-strip 0 < x, 0 < y < ell with a discontinuous Dirichlet corner.

The solution of the modified Helmholtz equation with q = 0 on the two
horizontal sides and q = 1 on the vertical side is

    q(x, y) = -1/(2 pi) [ I_1 + I_2 + I_3 ],

    I_1 = int_0^inf exp(-Omega x - omega y) G / (1 + exp(omega ell)) dlambda/lambda,
    I_2 = int_{i inf}^0 exp(-Omega x - omega y) G dlambda/lambda,
    I_3 = int_0^{-inf} exp(-Omega x + omega (ell - y)) G / (1 + exp(omega ell))
          dlambda/lambda,

with Omega = -i (lambda - beta**2 / lambda), omega = lambda + beta**2 / lambda
and G = Omega (exp(omega ell) - 1) / omega. Writing z = x + i y and
zeta = x - i (ell - y), the first and third integrands are
exp(i lambda z - i beta**2 zbar / lambda) (Omega / omega) tanh(omega ell / 2)
and the same with zeta. Those two legs are rotated into the sectors where
their exponentials decay; tanh(omega ell / 2) has its poles on the imaginary
axis only, so rotations by less than pi/2 are free.

Both corners at x = 0 carry a jump in the Dirichlet data, so the flux
int_x^inf q_y(x', 0) dx' grows logarithmically as x -> 0. The k-form

    (2/pi) int_0^inf cos(k x) tanh(ell r / 2) / r dk,   r = sqrt(k**2 + 4 beta**2),

splits into a bounded part and (2/pi) K_0(2 beta x), whose logarithmic
coefficient is 2/pi.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import math
from typing import Any, Dict, List, Tuple

import numpy as np
import scipy.integrate
import scipy.special

from polyspectral.errors import (
    ConstraintViolation,
    PointOnBoundary,
    QuadratureNonConvergence,
    ZeroLambda,
)
from polyspectral.quadrature import log_magnitude, scan_halfwidths, trapezoid

logger = logging.getLogger(__name__)

#: Default relative tolerance for the leg integrals.
DEFAULT_TOL = 1e-12

#: Below this |omega ell| the removable singularity of G uses a series.
SERIES_THRESHOLD = 1e-3

#: Largest rotation of the first leg away from the positive real axis.
FIRST_LEG_MAX_ANGLE = 0.25 * math.pi

#: Smallest angle of the rotated third leg.
THIRD_LEG_MIN_ANGLE = 0.75 * math.pi

#: Accuracy required from scipy.integrate.quad, relative to max(1, |value|).
QUAD_RTOL = 1e-8

#: Tolerances requested from scipy.integrate.quad, inside QUAD_RTOL.
QUAD_REQUEST = 0.1 * QUAD_RTOL

#: Coefficient of -log x some treatments give for the corner flux.
ALTERNATIVE_LOG_COEFFICIENT = 4.0 / math.pi


@dataclasses.dataclass(frozen=True)
class HalfStripParams:
    """PDE parameter beta and strip width ell."""

    beta: float = 1.0
    ell: float = 1.0

    def __post_init__(self) -> None:
        if not self.beta > 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not self.ell > 0.0:
            raise ValueError(f"strip width must be positive, got {self.ell}")


def omega_pair(lam: Any, beta: float) -> Tuple[Any, Any]:
    """
    (Omega, omega) = (-i (lambda - beta**2 / lambda), lambda + beta**2 / lambda).

    Raises
    ------
    ZeroLambda
        If lambda is zero.
    """
    lam = np.asarray(lam, dtype=complex)
    if np.any(lam == 0):
        raise ZeroLambda("spectral parameter lambda must be nonzero")
    Omega = -1j * (lam - beta**2 / lam)
    omega = lam + beta**2 / lam
    if Omega.ndim == 0:
        return complex(Omega), complex(omega)
    return Omega, omega


def _phi1(u: np.ndarray) -> np.ndarray:
    # (exp(u) - 1) / u, with its removable singularity at u = 0.
    u = np.asarray(u, dtype=complex)
    small = np.abs(u) < SERIES_THRESHOLD
    safe = np.where(small, 1.0, u)
    direct = np.expm1(safe) / safe
    series = 1.0 + u / 2.0 + u**2 / 6.0 + u**3 / 24.0
    return np.where(small, series, direct)


def _tanh_half(u: np.ndarray) -> np.ndarray:
    # tanh(u / 2) = (exp(u) - 1) / (exp(u) + 1), without overflow.
    u = np.asarray(u, dtype=complex)
    right = u.real > 0.0
    v = np.where(right, -u, u)
    e = np.exp(v)
    return np.where(right, (1.0 - e) / (1.0 + e), (e - 1.0) / (e + 1.0))


def G_fn(lam: Any, beta: float, ell: float) -> Any:
    """
    G(lambda) = Omega (exp(omega ell) - 1) / omega.

    The removable singularity at omega = 0 (lambda = +-i beta) is evaluated
    with a series when |omega ell| < SERIES_THRESHOLD.
    """
    Omega, omega = omega_pair(lam, beta)
    value = Omega * ell * _phi1(np.asarray(omega) * ell)
    return value if np.ndim(value) else complex(value)


def _multiplier(
    Omega: np.ndarray, omega: np.ndarray, y: float, ell: float, dx: int, dy: int
) -> np.ndarray:
    """Factor turning a leg integrand of q into one of a derivative or integral."""
    factor = np.ones_like(Omega)
    if dx == 1:
        factor = factor * -Omega
    elif dx == -1:
        # int_inf^x dx'
        factor = factor * (-1.0 / Omega)
    if dy == 1:
        factor = factor * -omega
    elif dy == -1:
        # int_{ell/2}^y dy'
        offset = y - 0.5 * ell
        factor = factor * offset * _phi1(omega * offset)
    return factor


def _leg_parts(
    leg: int,
    x: float,
    y: float,
    params: HalfStripParams,
    direction: complex,
    s: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    beta, ell = params.beta, params.ell
    lam = direction * beta * np.exp(s)
    Omega, omega = omega_pair(lam, beta)
    point = complex(x, y) if leg != 3 else complex(x, -(ell - y))
    exponent = 1j * lam * point - 1j * beta**2 * np.conj(point) / lam
    if leg == 2:
        weight = Omega * ell * _phi1(omega * ell)
    else:
        weight = Omega / omega * _tanh_half(omega * ell)
    return exponent, weight, Omega, omega


def _leg_integrand(
    leg: int,
    x: float,
    y: float,
    params: HalfStripParams,
    direction: complex,
    dx: int,
    dy: int,
    s: np.ndarray,
) -> np.ndarray:
    exponent, weight, Omega, omega = _leg_parts(leg, x, y, params, direction, s)
    factor = _multiplier(Omega, omega, y, params.ell, dx, dy)
    return weight * factor * np.exp(exponent)


def _leg_directions(x: float, y: float, ell: float) -> Tuple[complex, complex, complex]:
    first = min(0.5 * math.pi - math.atan2(y, x), FIRST_LEG_MAX_ANGLE)
    third = max(0.5 * math.pi - math.atan2(-(ell - y), x), THIRD_LEG_MIN_ANGLE)
    return complex(np.exp(1j * first)), 1j, complex(np.exp(1j * third))


def halfstrip_field(
    x: float,
    y: float,
    params: HalfStripParams,
    tol: float = DEFAULT_TOL,
    dx: int = 0,
    dy: int = 0,
) -> complex:
    """
    The half-strip solution or one of its derivatives and partial integrals.

    Parameters
    ----------
    x, y
        Interior point, x > 0 and 0 < y < ell.
    params
        Strip parameters.
    tol
        Relative tolerance of each leg integral.
    dx
        1 for the x-derivative, -1 for int_inf^x dx', 0 for neither.
    dy
        1 for the y-derivative, -1 for int_{ell/2}^y dy', 0 for neither.

    Returns
    -------
    complex
        The value; its imaginary part is a quadrature diagnostic.

    Raises
    ------
    PointOnBoundary
        If (x, y) is not strictly inside the half-strip.
    TruncationFailure
        If a leg integrand fails to decay.
    """
    if not (x > 0.0 and 0.0 < y < params.ell):
        raise PointOnBoundary(f"({x}, {y}) is not strictly inside the half-strip")
    if dx not in (-1, 0, 1) or dy not in (-1, 0, 1):
        raise ValueError("dx and dy must be -1, 0 or 1")
    total = 0j
    for leg, direction in zip((1, 2, 3), _leg_directions(x, y, params.ell)):
        integrand = functools.partial(
            _leg_integrand, leg, x, y, params, direction, dx, dy
        )

        def log_size(s: np.ndarray) -> np.ndarray:
            values = integrand(s)
            return log_magnitude(values, np.zeros_like(s))

        lo, hi = scan_halfwidths(log_size, tol)
        value, _ = trapezoid(integrand, lo, hi, tol)
        # The second leg runs from i inf down to 0, against increasing s.
        total += -complex(value) if leg == 2 else complex(value)
        logger.debug("leg %d of (%g, %g): s in [%.2f, %.2f]", leg, x, y, lo, hi)
    return total / (-2.0 * math.pi)


def q_halfstrip(
    x: float, y: float, params: HalfStripParams, tol: float = DEFAULT_TOL
) -> float:
    """
    The half-strip solution q(x, y).

    Returns the real part; the imaginary part is logged at DEBUG level.
    """
    value = halfstrip_field(x, y, params, tol)
    logger.debug("q(%g, %g) = %.17g, imaginary part %.3g", x, y, value.real, value.imag)
    return value.real


def _quad(f: Any, a: float, b: float, **kwargs: Any) -> float:
    if "points" in kwargs:
        kwargs["points"] = [p for p in kwargs["points"] if a < p < b] or None
    value, error = scipy.integrate.quad(
        f, a, b, epsabs=QUAD_REQUEST, epsrel=QUAD_REQUEST, limit=200, **kwargs
    )
    if not error <= QUAD_RTOL * max(1.0, abs(value)):
        raise QuadratureNonConvergence(
            f"quadrature on [{a}, {b}] reached error {error:.3g} for value {value:.6g}"
        )
    return float(value)


def _log_breaks(a: float) -> List[float]:
    """Break points a, 10 a, 100 a, ... below 1, for integrands peaked at k = 0."""
    breaks = []
    while a < 1.0:
        breaks.append(a)
        a *= 10.0
    return breaks


def flux_tail(x: float, params: HalfStripParams) -> float:
    """
    int_x^inf q_y(x', 0) dx' from its k-form.

    The integrand tanh(ell r / 2) / r with r = sqrt(k**2 + 4 beta**2) is
    split as (tanh(ell r / 2) - 1) / r, which decays exponentially, plus
    1 / r, whose cosine transform is rescaled by k -> k / x and integrated
    over [0, 1] and [1, inf).

    Raises
    ------
    QuadratureNonConvergence
        If scipy's quadrature reports an inaccurate result.
    """
    if not x > 0.0:
        raise ValueError(f"x must be positive, got {x}")
    beta, ell = params.beta, params.ell

    def bounded(k: float) -> float:
        r = math.sqrt(k * k + 4.0 * beta**2)
        return -2.0 / (math.exp(min(ell * r, 700.0)) + 1.0) / r

    a = 2.0 * beta * x
    head = _quad(
        lambda k: math.cos(k) / math.hypot(k, a), 0.0, 1.0, points=_log_breaks(a)
    )
    tail = _quad(
        lambda k: 1.0 / math.hypot(k, a),
        1.0,
        math.inf,
        weight="cos",
        wvar=1.0,
        limlst=100,
    )
    smooth = _quad(bounded, 0.0, math.inf, weight="cos", wvar=x, limlst=100)
    return 2.0 / math.pi * (smooth + head + tail)


def flux_kernel_part(x: float, params: HalfStripParams) -> float:
    """Closed form (2/pi) K_0(2 beta x) of the explicit part of `flux_tail`."""
    return 2.0 / math.pi * float(scipy.special.k0(2.0 * params.beta * x))


def flux_log_oracle(x: float, params: HalfStripParams) -> float:
    """(2/pi) int_0^1 dk / sqrt(k**2 + 4 beta**2 x**2), by direct quadrature."""
    a = 2.0 * params.beta * x
    integral = _quad(lambda k: 1.0 / math.hypot(k, a), 0.0, 1.0, points=_log_breaks(a))
    return 2.0 / math.pi * integral


def log_slope(f: Any, xs: Any) -> float:
    """Least-squares slope of f(x) against log x."""
    xs = np.asarray(xs, dtype=float)
    values = np.array([f(x) for x in xs])
    slope, _ = np.polyfit(np.log(xs), values, 1)
    return float(slope)


def v_form_integrand(
    x: float,
    y: float,
    lam: complex,
    params: HalfStripParams,
    c1: float = 1.0,
    c2: float = 0.0,
    tol: float = DEFAULT_TOL,
) -> Tuple[complex, complex]:
    """
    Coefficients of dx and dy in the regularized form at (x, y, lambda).

        dx: exp(Omega x + omega y) [Omega (c1 A + c2 B) + 4 beta**2 c2 C + omega q]
        dy: exp(Omega x + omega y) [omega (c1 A + c2 B) + 4 beta**2 c1 D - Omega q]

    with A = int_inf^x q_y dx', B = int_{ell/2}^y q_x dy',
    C = int_{ell/2}^y q dy' and D = int_inf^x q dx'. Normal derivatives on
    the horizontal sides do not appear.

    Raises
    ------
    ConstraintViolation
        If c1 - c2 != 1.
    """
    if abs(c1 - c2 - 1.0) > 1e-12:
        raise ConstraintViolation(f"need c1 - c2 = 1, got c1 = {c1}, c2 = {c2}")
    Omega, omega = omega_pair(lam, params.beta)
    beta = params.beta

    def field(dx: int, dy: int) -> float:
        return halfstrip_field(x, y, params, tol, dx, dy).real

    q = field(0, 0)
    A = field(-1, 1)
    B = field(1, -1) if c2 != 0 else 0.0
    C = field(0, -1) if c2 != 0 else 0.0
    D = field(-1, 0) if c1 != 0 else 0.0
    scale = np.exp(Omega * x + omega * y)
    mixed = c1 * A + c2 * B
    dx_coefficient = scale * (Omega * mixed + 4.0 * beta**2 * c2 * C + omega * q)
    dy_coefficient = scale * (omega * mixed + 4.0 * beta**2 * c1 * D - Omega * q)
    return complex(dx_coefficient), complex(dy_coefficient)


def left_limit(
    y: float, params: HalfStripParams, tol: float = DEFAULT_TOL, base: float = 0.04
) -> float:
    """
    q(0+, y) by Richardson extrapolation from x = base, base/2, base/4.

    The weights 1/3, -2, 8/3 cancel the linear and quadratic terms in x.
    """
    values = [q_halfstrip(base * f, y, params, tol) for f in (1.0, 0.5, 0.25)]
    return values[0] / 3.0 - 2.0 * values[1] + 8.0 * values[2] / 3.0


def verification_report(
    params: HalfStripParams, tol: float = DEFAULT_TOL
) -> Dict[str, Any]:
    """
    Checks of the half-strip solution against its boundary conditions.

    Boundary values are sampled at an offset of 1e-3 ell from the sides;
    the flux slope uses x = 1e-2, ..., 1e-4.
    """
    ell = params.ell
    offset = 1e-3 * ell
    samples = [0.1 * ell, 0.5 * ell, 1.0 * ell]
    imaginary = []

    def sample(x: float, y: float) -> float:
        value = halfstrip_field(x, y, params, tol)
        imaginary.append(abs(value.imag))
        return value.real

    symmetry = abs(sample(0.5 * ell, 0.3 * ell) - sample(0.5 * ell, 0.7 * ell))
    bottom = max(abs(sample(x, offset)) for x in samples)
    top = max(abs(sample(x, ell - offset)) for x in samples)
    left = abs(left_limit(0.5 * ell, params, tol, base=0.04 * ell) - 1.0)
    xs = np.geomspace(1e-2, 1e-4, 5)
    slope = log_slope(lambda x: flux_tail(x, params), xs)
    oracle = log_slope(lambda x: flux_log_oracle(x, params), xs)
    report = {
        "symmetry_err": symmetry,
        "bc_bottom_max": bottom,
        "bc_top_max": top,
        "bc_left_extrap_err": left,
        "log_slope": slope,
        "log_slope_oracle": oracle,
        "log_slope_rel_diff": abs(slope - oracle) / abs(oracle),
        "alternative_log_coefficient": ALTERNATIVE_LOG_COEFFICIENT,
        "alternative_matches": bool(
            abs(-slope - ALTERNATIVE_LOG_COEFFICIENT)
            <= 0.02 * ALTERNATIVE_LOG_COEFFICIENT
        ),
        "imag_max": max(imaginary),
    }
    logger.info("half-strip verification: %s", report)
    return report
