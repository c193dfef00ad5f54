"""
Interior evaluation through the ray-integral representation.

Given complete boundary data, the solution is

    Q(z) = 1/(4 pi i) sum_i int_{l_i} exp(i lambda z - i beta**2 zbar / lambda)
                                       rho_i(lambda) dlambda / lambda,

where l_i is the ray arg(lambda) = -alpha_i. Substituting
lambda = exp(-i alpha_i) beta exp(s) turns dlambda / lambda into ds, and the
integrand then decays like exp(-h (|lambda| + beta**2 / |lambda|)), with h the
height of z above the line of side i. The trapezoid rule in s converges
geometrically for such integrands; the step is halved until the result stops
changing.

Boundary trace pairings <Q(psi_i^eps), phi> are computed with the order of
integration exchanged: the tau integral against the test function is done
first, giving a weight Phi(lambda) that multiplies rho_j on each ray.
"""

from __future__ import annotations

import dataclasses
import functools
import logging
import math
from typing import Any, Callable, Iterable, List, Optional, TextIO, Tuple

import numpy as np

from polyspectral.boundary_data import TestFunction, gauss_legendre
from polyspectral.errors import (
    PointNotInterior,
    QuadratureNonConvergence,
    TruncationFailure,
)
from polyspectral.geometry import Polygon, Side, as_point
from polyspectral.global_relation import SolvedBoundary
from polyspectral.quadrature import (
    SCAN_STEP,
    TRUNCATION_LIMIT,
    log_magnitude,
    scan_halfwidths,
    trapezoid,
)
from polyspectral.spectral import SideData, log_rho_envelope, rho_scaled

logger = logging.getLogger(__name__)

#: Default relative tolerance for representation integrals.
DEFAULT_TOL = 1e-10

#: Points closer than this fraction of the diameter are near the boundary.
NEAR_BOUNDARY = 1e-2

#: Base Gauss-Legendre node count for test-function weights.
WEIGHT_NODES = 256

#: Largest Gauss-Legendre rule used for test-function weights.
WEIGHT_NODES_CAP = 2**15

#: Scaled weight function: lambda -> (values, log_scale).
Weight = Callable[[np.ndarray], Tuple[np.ndarray, np.ndarray]]


@dataclasses.dataclass(frozen=True)
class RaySpec:
    """The ray lambda = direction * beta * exp(s), for |s| <= halfwidth."""

    #: Index of the side the ray belongs to.
    side: int

    #: Unit complex number fixing arg(lambda).
    direction: complex

    beta: float

    #: Truncation radius S* in s.
    halfwidth: float = TRUNCATION_LIMIT

    @classmethod
    def of_side(
        cls, polygon: Polygon, i: int, beta: float, halfwidth: float = TRUNCATION_LIMIT
    ) -> RaySpec:
        """The ray l_i, arg(lambda) = -alpha_i."""
        direction = complex(np.exp(-1j * polygon.side(i).alpha))
        return cls(i % polygon.n, direction, beta, halfwidth)

    @classmethod
    def continuation(
        cls, polygon: Polygon, i: int, beta: float, halfwidth: float = TRUNCATION_LIMIT
    ) -> RaySpec:
        """The continuation of l_i through the origin, arg(lambda) = pi - alpha_i."""
        ray = cls.of_side(polygon, i, beta, halfwidth)
        return dataclasses.replace(ray, direction=-ray.direction)

    @property
    def angle(self) -> float:
        """arg(lambda) along the ray."""
        return float(np.angle(self.direction))

    def lam(self, s: Any) -> np.ndarray:
        """Points of the ray at log-radius s (vectorized)."""
        return self.direction * self.beta * np.exp(np.asarray(s, dtype=float))


def truncation_radius(
    polygon: Polygon,
    beta: float,
    i: int,
    z: complex,
    tol: float = DEFAULT_TOL,
    order: int = 1,
) -> float:
    """
    Truncation radius S* for the ray integral of side i at the point z.

    Beyond |s| = S*, the envelope rho_envelope * |exp(i lambda z - i beta**2
    zbar / lambda)| stays below tol times its peak.

    Raises
    ------
    TruncationFailure
        If the envelope is still significant at |s| = TRUNCATION_LIMIT.
    """
    side = polygon.side(i)
    half = np.arange(0.0, TRUNCATION_LIMIT + 0.5 * SCAN_STEP, SCAN_STEP)
    s = np.concatenate([-half[:0:-1], half])
    lam = np.exp(-1j * side.alpha) * beta * np.exp(s)
    bound = log_rho_envelope(side, lam, beta, order) + np.real(
        1j * lam * z - 1j * beta**2 * np.conj(z) / lam
    )
    peak = float(np.max(bound))
    radius = float(np.max(np.abs(s[bound >= peak + math.log(tol)]))) + SCAN_STEP
    if radius > TRUNCATION_LIMIT:
        achieved = math.exp(max(bound[0], bound[-1]) - peak)
        raise TruncationFailure(
            f"ray integral of side {i} at {z} has relative envelope {achieved:.3g} "
            f"at |s| = {TRUNCATION_LIMIT}; the point is too close to the boundary "
            f"for tolerance {tol:.3g}"
        )
    return radius


def _check_interior(polygon: Polygon, points: Iterable[complex]) -> None:
    for z in points:
        if not polygon.contains(z):
            raise PointNotInterior(f"point {z} is not strictly inside the polygon")
        if polygon.distance_to_boundary(z) < NEAR_BOUNDARY * polygon.diameter:
            logger.warning(
                "point %s is near the boundary; its value is a diagnostic", z
            )


def _representation_integrand(
    ray: RaySpec,
    data: SideData,
    points: np.ndarray,
    nu: Optional[complex],
    s: np.ndarray,
) -> np.ndarray:
    lam = ray.lam(s)
    values, log_scale = rho_scaled(data, lam, ray.beta)
    exponent = (
        log_scale
        + 1j * np.multiply.outer(points, lam)
        - 1j * ray.beta**2 * np.multiply.outer(np.conj(points), 1.0 / lam)
    )
    result = values * np.exp(exponent)
    if nu is not None:
        result = result * (1j * lam * nu - 1j * ray.beta**2 * np.conj(nu) / lam)
    return result


def _represent(
    polygon: Polygon,
    beta: float,
    solved: SolvedBoundary,
    points: np.ndarray,
    tol: float,
    nu: Optional[complex] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    if len(solved.sides) != polygon.n:
        raise ValueError(
            f"expected data for {polygon.n} sides, got {len(solved.sides)}"
        )
    total = np.zeros(points.shape, dtype=complex)
    error = np.zeros(points.shape)
    for i, data in enumerate(solved.sides):
        if data.is_zero:
            continue
        order = data.envelope_order + (0 if nu is None else 1)
        halfwidth = max(
            truncation_radius(polygon, beta, i, z, tol, order) for z in points
        )
        logger.debug("side %d: truncation radius %.2f", i, halfwidth)
        ray = RaySpec.of_side(polygon, i, beta, halfwidth)
        integrand = functools.partial(_representation_integrand, ray, data, points, nu)
        value, err = trapezoid(integrand, -halfwidth, halfwidth, tol)
        total += value
        error += err
    return total / (4j * math.pi), error / (4.0 * math.pi)


def evaluate_many(
    polygon: Polygon,
    beta: float,
    solved: SolvedBoundary,
    points: Iterable[Any],
    tol: float = DEFAULT_TOL,
) -> np.ndarray:
    """
    Evaluate the representation at several interior points.

    All points share one quadrature grid per ray, refined until every
    point meets the tolerance.

    Raises
    ------
    PointNotInterior
        If some point is not strictly inside the polygon.
    TruncationFailure
        If some point is too close to the boundary for the tolerance.
    """
    zs = np.array([as_point(p) for p in points], dtype=complex)
    _check_interior(polygon, zs)
    values, _ = _represent(polygon, beta, solved, zs, tol)
    return values


def evaluate(
    polygon: Polygon,
    beta: float,
    solved: SolvedBoundary,
    z: Any,
    tol: float = DEFAULT_TOL,
) -> complex:
    """
    Value of the solution at an interior point.

    Parameters
    ----------
    polygon
        The domain.
    beta
        PDE parameter.
    solved
        Complete boundary data, one SideData per side.
    z
        Point strictly inside the polygon.
    tol
        Relative tolerance for truncation and quadrature.

    Returns
    -------
    complex
        Q(z).
    """
    return complex(evaluate_many(polygon, beta, solved, [z], tol)[0])


def evaluate_normal_derivative_near(
    polygon: Polygon,
    beta: float,
    solved: SolvedBoundary,
    i: int,
    tau: float,
    epsilon: float,
    tol: float = DEFAULT_TOL,
) -> complex:
    """
    Outward normal derivative of side i at the inset point psi_i(tau) - epsilon nu.

    Differentiates under the integral sign, which multiplies the integrand
    by i lambda nu - i beta**2 conj(nu) / lambda.
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    side = polygon.side(i)
    z = side.psi(tau) - epsilon * side.normal
    zs = np.array([z], dtype=complex)
    _check_interior(polygon, zs)
    values, _ = _represent(polygon, beta, solved, zs, tol, nu=side.normal)
    return complex(values[0])


@dataclasses.dataclass(frozen=True)
class GridField:
    """Field values at interior points, with provenance."""

    points: Tuple[complex, ...]
    values: Tuple[complex, ...]
    beta: float

    #: Polygon fingerprint.
    polygon: str

    #: Requested relative tolerance.
    tol: float

    #: Largest absolute quadrature error estimate over the points.
    achieved: float

    def write_csv(self, stream: TextIO) -> None:
        """Write rows x,y,re,im with 17 significant digits."""
        stream.write("x,y,re,im\n")
        for z, v in zip(self.points, self.values):
            stream.write(f"{z.real:.17g},{z.imag:.17g},{v.real:.17g},{v.imag:.17g}\n")


def grid_points(polygon: Polygon, nx: int, ny: int, margin: float) -> List[complex]:
    """
    Row-major grid over the bounding box shrunk by `margin`.

    Only points at distance at least `margin` from the boundary are kept.
    """
    if nx < 1 or ny < 1:
        raise ValueError(f"grid needs nx, ny >= 1, got {nx} x {ny}")
    if not margin > 0.0:
        raise ValueError(f"margin must be positive, got {margin}")
    xs = [z.real for z in polygon.vertices]
    ys = [z.imag for z in polygon.vertices]

    def axis(lo: float, hi: float, count: int) -> np.ndarray:
        if count == 1:
            return np.array([0.5 * (lo + hi)])
        return np.linspace(lo + margin, hi - margin, count)

    points = [
        complex(x, y)
        for y in axis(min(ys), max(ys), ny)
        for x in axis(min(xs), max(xs), nx)
    ]
    return [
        z
        for z in points
        if polygon.contains(z)
        and polygon.distance_to_boundary(z) >= margin * (1 - 1e-12)
    ]


def evaluate_grid(
    polygon: Polygon,
    beta: float,
    solved: SolvedBoundary,
    nx: int,
    ny: int,
    margin: float,
    tol: float = DEFAULT_TOL,
) -> GridField:
    """Evaluate the representation on `grid_points(polygon, nx, ny, margin)`."""
    zs = np.array(grid_points(polygon, nx, ny, margin), dtype=complex)
    _check_interior(polygon, zs)
    if zs.size:
        values, errors = _represent(polygon, beta, solved, zs, tol)
    else:
        values, errors = np.zeros(0, dtype=complex), np.zeros(0)
    return GridField(
        points=tuple(complex(z) for z in zs),
        values=tuple(complex(v) for v in values),
        beta=beta,
        polygon=polygon.fingerprint(),
        tol=tol,
        achieved=float(np.max(errors, initial=0.0)),
    )


def _trace_weight(
    side: Side, phi: TestFunction, epsilon: float, beta: float, lam: np.ndarray
) -> Tuple[np.ndarray, np.ndarray]:
    lo, hi = phi.support
    width = hi - lo
    z0 = side.psi(lo) - epsilon * side.normal
    d = (side.end - side.origin) * width
    lam = np.asarray(lam, dtype=complex)
    b = 1j * lam * z0 - 1j * beta**2 * np.conj(z0) / lam
    nu = 1j * lam * d - 1j * beta**2 * np.conj(d) / lam
    shift = np.maximum(nu.real, 0.0)

    needed = WEIGHT_NODES + 2 * np.ceil(np.abs(nu))
    sizes = 2 ** np.ceil(np.log2(needed)).astype(int)
    if np.any(sizes > WEIGHT_NODES_CAP):
        raise QuadratureNonConvergence(
            f"test-function weight needs more than {WEIGHT_NODES_CAP} nodes"
        )
    values = np.empty(lam.shape, dtype=complex)
    for n in np.unique(sizes):
        chosen = sizes == n
        t, w = gauss_legendre(int(n))
        weights = width * w * phi(lo + width * t)
        kernel = np.exp(np.multiply.outer(nu[chosen], t) - shift[chosen, None])
        values[chosen] = kernel @ weights
    return values * np.exp(1j * b.imag), b.real + shift


def trace_weight(
    side: Side, phi: TestFunction, epsilon: float, beta: float
) -> Weight:
    """
    The inner weight of a trace pairing on the inset side.

    Returns a function of lambda giving, in scaled form (values, log_scale),

        Phi(lambda) = int phi(tau) exp(i lambda psi(tau) - i beta**2
                                       conj(psi(tau)) / lambda) dtau,

    with psi(tau) = psi_i(tau) - epsilon nu_i.
    """
    return functools.partial(_trace_weight, side, phi, epsilon, beta)


def _weighted_integrand(
    data: SideData, weight: Weight, ray: RaySpec, s: np.ndarray
) -> np.ndarray:
    lam = ray.lam(s)
    rho_values, rho_scale = rho_scaled(data, lam, ray.beta)
    weight_values, weight_scale = weight(lam)
    return rho_values * weight_values * np.exp(rho_scale + weight_scale)


def weighted_ray_integral(
    data: SideData,
    beta: float,
    weight: Weight,
    ray: RaySpec,
    tol: float = DEFAULT_TOL,
) -> complex:
    """
    int rho(lambda) W(lambda) dlambda / lambda along a ray.

    Parameters
    ----------
    data
        Boundary data of the side whose spectral function is integrated.
    beta
        PDE parameter; must match `ray.beta`.
    weight
        Scaled weight function, for example from `trace_weight`.
    ray
        The integration ray; its `halfwidth` is ignored, the truncation is
        found by scanning the integrand.
    tol
        Relative tolerance.
    """
    if data.is_zero:
        return 0j
    if ray.beta != beta:
        raise ValueError("ray and data use different beta")

    def log_size(s: np.ndarray) -> np.ndarray:
        lam = ray.lam(s)
        rho_values, rho_scale = rho_scaled(data, lam, beta)
        weight_values, weight_scale = weight(lam)
        return log_magnitude(rho_values * weight_values, rho_scale + weight_scale)

    lo, hi = scan_halfwidths(log_size, tol)
    logger.debug(
        "weighted ray integral on arg %.4f over s in [%.2f, %.2f]", ray.angle, lo, hi
    )
    integrand = functools.partial(_weighted_integrand, data, weight, ray)
    value, _ = trapezoid(integrand, lo, hi, tol)
    return complex(value)


def trace_pairing(
    polygon: Polygon,
    beta: float,
    solved: SolvedBoundary,
    i: int,
    phi: TestFunction,
    epsilon: float,
    tol: float = DEFAULT_TOL,
) -> complex:
    """
    Pairing of the inset trace Q(psi_i(tau) - epsilon nu_i) with phi.

    Computed as 1/(4 pi i) sum_j int_{l_j} rho_j(lambda) Phi(lambda) ds,
    which equals int_0^1 Q(psi_i^eps(tau)) phi(tau) dtau.

    Raises
    ------
    PointNotInterior
        If the inset segment over the support of phi leaves the polygon.
    """
    if not epsilon > 0.0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    side = polygon.side(i)
    for tau in phi.support:
        z = side.psi(tau) - epsilon * side.normal
        if not polygon.contains(z):
            raise PointNotInterior(
                f"inset side {i} at distance {epsilon} leaves the polygon"
            )
    weight = trace_weight(side, phi, epsilon, beta)
    total = sum(
        weighted_ray_integral(
            data, beta, weight, RaySpec.of_side(polygon, j, beta), tol
        )
        for j, data in enumerate(solved.sides)
    )
    return complex(total) / (4j * math.pi)


def _positive_root(k: float, length: float, beta: float) -> float:
    root = math.sqrt(k * k + 4.0 * length**2 * beta**2)
    if k >= 0.0:
        return (k + root) / (2.0 * length)
    return 2.0 * length * beta**2 / (root - k)


def change_of_variables_check(side: Side, beta: float, k: float) -> Tuple[float, float]:
    """
    Positive solutions of |Gamma| (lambda - beta**2 / lambda) = +k and = -k.

    Returns
    -------
    lambda_plus, lambda_minus
        (k + sqrt(k**2 + 4 |Gamma|**2 beta**2)) / (2 |Gamma|) and the same
        with k replaced by -k, evaluated without cancellation.
    """
    length = side.length
    return _positive_root(k, length, beta), _positive_root(-k, length, beta)
