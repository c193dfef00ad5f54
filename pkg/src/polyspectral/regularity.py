"""
Regularity diagnostics in the side-aligned gauge.

Place side i on the unit interval, traversed from 1 to 0, with the rest of
the polygon in the lower half-plane. For real lambda > 0 put
k = lambda - beta**2 / lambda; then lambda + beta**2 / lambda equals
sqrt(k**2 + 4 beta**2) and the spectral function of side i becomes a Fourier
transform,

    rho_i(lambda) = i exp(-i k) [ N^(-k) - sqrt(k**2 + 4 beta**2) D^(-k) ],

where N^ and D^ are the Fourier transforms of the normal derivative and the
trace on side i. By the global relation, the sum of rho over side i and its
two neighbours equals minus the sum over the far sides, whose kernels decay
like exp(-eps (lambda + beta**2 / lambda)) with eps the depth of the far
sides below the real axis.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from typing import Any, Dict, Sequence, Tuple

import numpy as np

from polyspectral.boundary_data import BoundaryDatum, fourier, gauss_legendre
from polyspectral.errors import FitFailure, GaugeViolation
from polyspectral.geometry import GaugeMode, Polygon, gauge_align
from polyspectral.global_relation import SolvedBoundary
from polyspectral.quadrature import log_magnitude
from polyspectral.spectral import SideData, rho, rho_scaled

logger = logging.getLogger(__name__)

#: Constant in front of exp(-i k) [N^(-k) - sqrt(k**2 + 4 beta**2) D^(-k)].
ALIGNED_PHASE_CONSTANT = 1j

#: Tolerance on vertex positions in the aligned gauge.
ALIGNMENT_TOLERANCE = 1e-12

#: Smallest lambda + beta**2 / lambda, in units of beta, used by decay fits.
FIT_THRESHOLD = 4.0

#: Gauss-Legendre nodes per unit panel of Sobolev norm integrals.
SOBOLEV_NODES = 16


def k_of_lambda(lam: Any, beta: float) -> Any:
    """k = lambda - beta**2 / lambda (vectorized)."""
    lam = np.asarray(lam, dtype=float)
    k = lam - beta**2 / lam
    return k if k.ndim else float(k)


def lambda_of_k(k: Any, beta: float) -> Any:
    """
    The positive lambda with lambda - beta**2 / lambda = k (vectorized).

    Uses 2 beta**2 / (sqrt(k**2 + 4 beta**2) - k) for k < 0 to avoid
    cancellation.
    """
    k = np.asarray(k, dtype=float)
    root = np.sqrt(k * k + 4.0 * beta**2)
    below = 2.0 * beta**2 / (root - np.minimum(k, 0.0))
    lam = np.where(k >= 0.0, 0.5 * (k + root), below)
    return lam if lam.ndim else float(lam)


def multiplier(k: Any, beta: float) -> Any:
    """The elliptic symbol sqrt(k**2 + 4 beta**2)."""
    value = np.sqrt(np.asarray(k, dtype=float) ** 2 + 4.0 * beta**2)
    return value if value.ndim else float(value)


def _check_aligned(polygon: Polygon, i: int) -> None:
    side = polygon.side(i)
    if max(abs(side.origin - 1.0), abs(side.end)) > ALIGNMENT_TOLERANCE:
        raise GaugeViolation(f"side {i} does not run from 1 to 0")
    endpoints = {i % polygon.n, (i + 1) % polygon.n}
    for j, z in enumerate(polygon.vertices):
        if j not in endpoints and not z.imag < 0.0:
            raise GaugeViolation(f"vertex {j} is not below the real axis")


def align_solution(
    polygon: Polygon, beta: float, solved: SolvedBoundary, i: int
) -> Tuple[Polygon, float, SolvedBoundary]:
    """
    Move a solved problem so that side i runs from 1 to 0.

    Traces are unchanged in the side parameter; normal derivatives scale by
    the side length, and beta by the same factor.
    """
    gauge, image, beta_prime = gauge_align(
        polygon, i, GaugeMode.SIDE_ON_UNIT_INTERVAL, beta
    )
    sides = tuple(
        SideData(side, data.q, data.dq.scaled(gauge.scale))
        for side, data in zip(image.sides, solved.sides)
    )
    return image, beta_prime, SolvedBoundary(sides, solved.diagnostics)


def aligned_prediction(k: Any, Nhat: Any, Dhat: Any, beta: float) -> Any:
    """i exp(-i k) [N^(-k) - sqrt(k**2 + 4 beta**2) D^(-k)] from the transforms."""
    k = np.asarray(k, dtype=float)
    value = (
        ALIGNED_PHASE_CONSTANT
        * np.exp(-1j * k)
        * (np.asarray(Nhat) - multiplier(k, beta) * np.asarray(Dhat))
    )
    return value if np.ndim(value) else complex(value)


def aligned_rho_decomposition(
    polygon: Polygon, beta: float, solved: SolvedBoundary, i: int, k: Any
) -> Tuple[Any, Any, Any]:
    """
    rho_i at lambda_of_k(k) together with N^(-k) and D^(-k).

    The three values satisfy rho = aligned_prediction(k, N^, D^, beta).

    Raises
    ------
    GaugeViolation
        If side i does not run from 1 to 0 with the other vertices below
        the real axis.
    """
    _check_aligned(polygon, i)
    data = solved.sides[i % polygon.n]
    lam = lambda_of_k(k, beta)
    minus_k = -np.asarray(k, dtype=float)
    return rho(data, lam, beta), fourier(data.dq, minus_k), fourier(data.q, minus_k)


@dataclasses.dataclass(frozen=True)
class DecayFit:
    """
    Fit of |r| <= C omega**M exp(-eps omega), omega = lambda + beta**2 / lambda.
    """

    C: float
    eps: float
    M: float

    #: Root-mean-square residual of the log-space fit.
    fit_residual: float

    #: Depth of the far sides below the real axis.
    clearance: float

    #: Range of lambda + beta**2 / lambda used by the fit.
    omega_range: Tuple[float, float]

    #: True when the far-side sum vanishes identically.
    degenerate: bool = False

    def to_json(self) -> Dict[str, Any]:
        """JSON-ready dictionary."""
        return {
            "C": self.C,
            "eps": self.eps,
            "M": self.M,
            "fit_residual": self.fit_residual,
            "clearance": self.clearance,
            "omega_range": list(self.omega_range),
            "degenerate": self.degenerate,
        }


def far_sides(polygon: Polygon, i: int) -> Tuple[int, ...]:
    """Sides other than i and its two neighbours."""
    near = {(i - 1) % polygon.n, i % polygon.n, (i + 1) % polygon.n}
    return tuple(j for j in range(polygon.n) if j not in near)


def clearance(polygon: Polygon, i: int) -> float:
    """Smallest depth -Im z over the vertices of the far sides."""
    vertices = {j for s in far_sides(polygon, i) for j in (s, (s + 1) % polygon.n)}
    if not vertices:
        return math.inf
    return -max(polygon.vertices[j].imag for j in vertices)


def log_triple_sum(
    polygon: Polygon, beta: float, solved: SolvedBoundary, i: int, lam: Any
) -> np.ndarray:
    """log |rho_{i-1} + rho_i + rho_{i+1}|, computed as log |sum of far-side rho|."""
    lam = np.asarray(lam, dtype=complex)
    pairs = [rho_scaled(solved.sides[j], lam, beta) for j in far_sides(polygon, i)]
    if not pairs:
        return np.full(lam.shape, -np.inf)
    values = np.array([p[0] for p in pairs])
    scales = np.array([p[1] for p in pairs])
    top = np.max(scales, axis=0)
    total = np.sum(values * np.exp(scales - top), axis=0)
    return log_magnitude(total, top)


def triple_decay_fit(
    polygon: Polygon,
    beta: float,
    solved: SolvedBoundary,
    i: int,
    lam_grid: Sequence[float],
    M: float = 0.0,
) -> DecayFit:
    """
    Fit the exponential decay of the adjacent-triple sum for real lambda > 0.

    Fits log C - eps omega to log |r| - M log omega, with
    omega = lambda + beta**2 / lambda, over the points with
    omega >= FIT_THRESHOLD * beta. The data are first replaced by their
    running maximum from the large-omega end, which removes dips from
    oscillation.

    Raises
    ------
    GaugeViolation
        If the polygon is not aligned on side i.
    FitFailure
        If fewer than three points remain or the envelope does not decrease.
    """
    _check_aligned(polygon, i)
    lam = np.asarray(lam_grid, dtype=float)
    if np.any(lam <= 0.0):
        raise ValueError("decay fits need lambda > 0")
    omega = lam + beta**2 / lam
    depth = clearance(polygon, i)
    keep = omega >= FIT_THRESHOLD * beta
    omega = omega[keep]
    if omega.size < 3:
        raise FitFailure(f"only {omega.size} points with omega >= {FIT_THRESHOLD} beta")
    order = np.argsort(omega)
    omega = omega[order]
    log_r = log_triple_sum(polygon, beta, solved, i, lam[keep][order])
    omega_range = (float(omega[0]), float(omega[-1]))

    if np.all(np.isneginf(log_r)):
        return DecayFit(0.0, math.inf, M, 0.0, depth, omega_range, degenerate=True)

    envelope = np.maximum.accumulate(log_r[::-1])[::-1]
    if not envelope[0] > envelope[-1] or not np.all(np.isfinite(envelope)):
        raise FitFailure("far-side sum does not decay over the fit range")
    target = envelope - M * np.log(omega)
    design = np.column_stack([np.ones_like(omega), -omega])
    (log_C, eps), *_ = np.linalg.lstsq(design, target, rcond=None)
    residual = float(np.sqrt(np.mean((design @ np.array([log_C, eps]) - target) ** 2)))
    logger.info(
        "decay fit on side %d: eps %.4g (clearance %.4g), residual %.3g",
        i,
        eps,
        depth,
        residual,
    )
    return DecayFit(float(np.exp(log_C)), float(eps), M, residual, depth, omega_range)


def _panel_rule(K: float) -> Tuple[np.ndarray, np.ndarray]:
    panels = max(1, int(math.ceil(2.0 * K)))
    edges = np.linspace(-K, K, panels + 1)
    t, w = gauss_legendre(SOBOLEV_NODES)
    width = np.diff(edges)
    nodes = edges[:-1, None] + width[:, None] * t
    weights = width[:, None] * w
    return nodes.ravel(), weights.ravel()


def sobolev_norm(datum: BoundaryDatum, s: float, K: float) -> float:
    """
    (int_{|k| <= K} <k>**(2 s) |u^(k)|**2 dk)**(1/2), with <k> = (1 + k**2)**(1/2).

    Composite Gauss-Legendre quadrature on panels of width at most 1/2.
    """
    if not K > 0.0:
        raise ValueError(f"cutoff must be positive, got {K}")
    k, w = _panel_rule(K)
    values = np.abs(fourier(datum, k)) ** 2 * (1.0 + k * k) ** s
    return float(np.sqrt(np.sum(w * values)))


@dataclasses.dataclass(frozen=True)
class MultiplierProfile:
    """The symbol sqrt(k**2 + 4 beta**2) against <k> on a grid."""

    beta: float
    k: Tuple[float, ...]

    @property
    def values(self) -> np.ndarray:
        """sqrt(k**2 + 4 beta**2) on the grid."""
        return np.asarray(multiplier(np.array(self.k), self.beta))

    @property
    def bracket(self) -> np.ndarray:
        """<k> = (1 + k**2)**(1/2) on the grid."""
        k = np.array(self.k)
        return np.sqrt(1.0 + k * k)

    @property
    def bounds(self) -> Tuple[float, float]:
        """Ellipticity constants (c1, c2) = (min(1, 2 beta), max(1, 2 beta))."""
        return min(1.0, 2.0 * self.beta), max(1.0, 2.0 * self.beta)

    def elliptic(self) -> bool:
        """True if c1 <k> <= sqrt(k**2 + 4 beta**2) <= c2 <k> on the whole grid."""
        c1, c2 = self.bounds
        ratio = self.values / self.bracket
        slack = 1e-15 * max(c2, 1.0)
        return bool(np.all(ratio >= c1 - slack) and np.all(ratio <= c2 + slack))


def constant_report(beta: float) -> Dict[str, Any]:
    """
    The aligned-gauge constant and multiplier, next to alternative constants.

    The alternatives are the convolution constant i beta**2 / pi and the
    symbol factor 2 i beta**2; neither reduces to the derived constant i.
    """
    alternatives = {
        "convolution": 1j * beta**2 / math.pi,
        "symbol": 2j * beta**2,
    }
    return {
        "beta": beta,
        "aligned_constant": [
            ALIGNED_PHASE_CONSTANT.real,
            ALIGNED_PHASE_CONSTANT.imag,
        ],
        "phase": "exp(-i k)",
        "multiplier": "sqrt(k**2 + 4 beta**2)",
        "alternatives": {
            name: [value.real, value.imag]
            for name, value in sorted(alternatives.items())
        },
        "alternatives_consistent": {
            name: bool(abs(value - ALIGNED_PHASE_CONSTANT) < 1e-12)
            for name, value in sorted(alternatives.items())
        },
    }
