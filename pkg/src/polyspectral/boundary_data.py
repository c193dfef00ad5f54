"""
Boundary data on a side: distributions with support in [0, 1].

A BoundaryDatum is the sum of a smooth part, expanded in shifted Legendre
polynomials P~_m(tau) = P_m(2 tau - 1), and finitely many Dirac derivative
charges w * delta^{(j)} sitting at the endpoints tau = 0 and tau = 1. Pairing
with a smooth phi is

    <u, phi> = int_0^1 smooth(tau) phi(tau) dtau + sum (-1)**j w phi^{(j)}(e),

and the Fourier transform is u^(zeta) = <u, exp(-i zeta tau)>.

Exponential pairings are the workhorse of the package. For the smooth part
they reduce to the moments

    J_m(mu) = int_0^1 P~_m(tau) exp(mu tau) dtau = exp(mu / 2) i_m(mu / 2),

with i_m the modified spherical Bessel function of the first kind. For large
|mu| these follow from the upward recurrence, which is stable once |mu| / 2
exceeds the mode number; small |mu| use a Gauss-Legendre rule.
"""

from __future__ import annotations

import dataclasses
import functools
import math
from typing import Any, Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np
from numpy.polynomial import legendre

from polyspectral.errors import (
    InsufficientDerivativeOrder,
    MaxOrderExceeded,
    QuadratureNonConvergence,
)
from polyspectral.generics import pair, pair_exponential

#: Highest Dirac derivative order accepted in a datum.
MAX_DIRAC_ORDER = 4

#: Starting node count for adaptive Gauss-Legendre pairings.
GAUSS_NODES = 64

#: Node count cap for adaptive Gauss-Legendre pairings.
GAUSS_NODES_CAP = 1024

#: Relative change at which adaptive pairings stop doubling.
GAUSS_RTOL = 1e-12


@functools.lru_cache(maxsize=None)
def gauss_legendre(n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes and weights for n points on [0, 1]."""
    x, w = legendre.leggauss(n)
    nodes = 0.5 * (x + 1.0)
    weights = 0.5 * w
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def shifted_legendre_vander(tau: Any, n_modes: int) -> np.ndarray:
    """Values P~_m(tau) for m < n_modes, stacked along the last axis."""
    return legendre.legvander(2.0 * np.asarray(tau, dtype=float) - 1.0, n_modes - 1)


def _moments_by_quadrature(mu: np.ndarray, n_modes: int) -> np.ndarray:
    n_nodes = max(GAUSS_NODES, 2 * int(math.ceil(np.max(np.abs(mu), initial=0.0))))
    n_nodes += 2 * n_modes
    nodes, weights = gauss_legendre(n_nodes)
    shift = np.maximum(mu.real, 0.0)
    kernel = np.exp(np.multiply.outer(mu, nodes) - shift[:, None])
    return (kernel * weights) @ shifted_legendre_vander(nodes, n_modes)


def _moments_by_recurrence(mu: np.ndarray, n_modes: int) -> np.ndarray:
    # Scaled modified spherical Bessel functions exp(-a) i_m(a), Re a >= 0.
    flip = mu.real < 0.0
    a = np.where(flip, -mu, mu) / 2.0
    decay = np.exp(-2.0 * a)
    out = np.empty(mu.shape + (n_modes,), dtype=complex)
    out[:, 0] = (1.0 - decay) / (2.0 * a)
    if n_modes > 1:
        out[:, 1] = (a * (1.0 + decay) / 2.0 - (1.0 - decay) / 2.0) / a**2
    for m in range(1, n_modes - 1):
        out[:, m + 1] = out[:, m - 1] - (2 * m + 1) / a * out[:, m]
    signs = (-1.0) ** np.arange(n_modes)
    phase = np.exp(1j * mu.imag)
    return np.where(flip[:, None], out * signs, out * phase[:, None])


def legendre_exponential_moments(mu: Any, n_modes: int) -> np.ndarray:
    """
    Scaled moments exp(-max(0, Re mu)) * int_0^1 P~_m(tau) exp(mu tau) dtau.

    Parameters
    ----------
    mu
        Complex scalar or array.
    n_modes
        Number of modes m = 0, ..., n_modes - 1.

    Returns
    -------
    numpy.ndarray
        Complex array of shape mu.shape + (n_modes,).
    """
    mu = np.asarray(mu, dtype=complex)
    flat = mu.reshape(-1)
    out = np.empty((flat.size, n_modes), dtype=complex)
    large = np.abs(flat) > max(4.0 * n_modes, 16.0)
    if np.any(large):
        out[large] = _moments_by_recurrence(flat[large], n_modes)
    if np.any(~large):
        out[~large] = _moments_by_quadrature(flat[~large], n_modes)
    return out.reshape(mu.shape + (n_modes,))


@dataclasses.dataclass(frozen=True)
class SmoothDatum:
    """Shifted Legendre expansion sum a_m P~_m(tau) on [0, 1]."""

    #: Complex coefficients a_0, ..., a_N.
    coefficients: Tuple[complex, ...] = ()

    @classmethod
    def from_array(cls, coefficients: Iterable[complex]) -> SmoothDatum:
        """Build from any iterable of numbers."""
        return cls(tuple(complex(c) for c in coefficients))

    @property
    def array(self) -> np.ndarray:
        """Coefficients as a complex numpy array."""
        return np.array(self.coefficients, dtype=complex)

    @property
    def degree(self) -> int:
        """Highest polynomial degree present (-1 for the zero datum)."""
        return len(self.coefficients) - 1

    def __call__(self, tau: Any) -> Any:
        """Evaluate the expansion at tau."""
        if not self.coefficients:
            return np.zeros_like(np.asarray(tau, dtype=float), dtype=complex)
        return legendre.legval(2.0 * np.asarray(tau, dtype=float) - 1.0, self.array)

    def l2_norm(self) -> float:
        """L2 norm on [0, 1], from the Legendre weights 1 / (2m + 1)."""
        a = self.array
        return float(np.sqrt(np.sum(np.abs(a) ** 2 / (2 * np.arange(a.size) + 1))))

    def __add__(self, other: SmoothDatum) -> SmoothDatum:
        a, b = self.array, other.array
        size = max(a.size, b.size)
        total = np.zeros(size, dtype=complex)
        total[: a.size] += a
        total[: b.size] += b
        return SmoothDatum.from_array(total)

    def scaled(self, factor: complex) -> SmoothDatum:
        """The datum multiplied by a constant."""
        return SmoothDatum.from_array(factor * self.array)


@dataclasses.dataclass(frozen=True)
class DiracCharge:
    """A charge weight * delta^{(order)} at an endpoint of [0, 1]."""

    endpoint: int
    order: int
    weight: complex

    def __post_init__(self) -> None:
        if self.endpoint not in (0, 1):
            raise ValueError(f"endpoint must be 0 or 1, got {self.endpoint}")
        if self.order < 0:
            raise ValueError(f"order must be nonnegative, got {self.order}")
        if self.order > MAX_DIRAC_ORDER:
            raise MaxOrderExceeded(
                f"Dirac order {self.order} exceeds maximum {MAX_DIRAC_ORDER}"
            )


@dataclasses.dataclass(frozen=True)
class PointMassDatum:
    """A finite sum of endpoint Dirac derivative charges."""

    charges: Tuple[DiracCharge, ...] = ()

    @property
    def max_order(self) -> int:
        """Highest derivative order present (-1 if there are no charges)."""
        return max((c.order for c in self.charges), default=-1)

    def combined(self) -> PointMassDatum:
        """Merge charges sharing endpoint and order, dropping zero weights."""
        totals: Dict[Tuple[int, int], complex] = {}
        for c in self.charges:
            key = (c.endpoint, c.order)
            totals[key] = totals.get(key, 0j) + complex(c.weight)
        return PointMassDatum(
            tuple(
                DiracCharge(e, j, w) for (e, j), w in sorted(totals.items()) if w != 0
            )
        )

    def __add__(self, other: PointMassDatum) -> PointMassDatum:
        return PointMassDatum(self.charges + other.charges).combined()

    def scaled(self, factor: complex) -> PointMassDatum:
        """The datum multiplied by a constant."""
        return PointMassDatum(
            tuple(
                DiracCharge(c.endpoint, c.order, factor * c.weight)
                for c in self.charges
            )
        )


@dataclasses.dataclass(frozen=True)
class BoundaryDatum:
    """Smooth Legendre part plus endpoint Dirac charges."""

    smooth: SmoothDatum = SmoothDatum()
    masses: PointMassDatum = PointMassDatum()

    @classmethod
    def zero(cls) -> BoundaryDatum:
        """The zero distribution."""
        return cls()

    @classmethod
    def from_legendre(cls, coefficients: Iterable[complex]) -> BoundaryDatum:
        """Purely smooth datum with the given Legendre coefficients."""
        return cls(smooth=SmoothDatum.from_array(coefficients))

    @classmethod
    def dirac(
        cls, endpoint: int, order: int = 0, weight: complex = 1.0
    ) -> BoundaryDatum:
        """A single charge weight * delta^{(order)} at an endpoint."""
        return cls(masses=PointMassDatum((DiracCharge(endpoint, order, weight),)))

    def __add__(self, other: BoundaryDatum) -> BoundaryDatum:
        return BoundaryDatum(self.smooth + other.smooth, self.masses + other.masses)

    def __sub__(self, other: BoundaryDatum) -> BoundaryDatum:
        return self + other.scaled(-1.0)

    def __mul__(self, factor: complex) -> BoundaryDatum:
        return self.scaled(factor)

    __rmul__ = __mul__

    def scaled(self, factor: complex) -> BoundaryDatum:
        """The datum multiplied by a constant."""
        return BoundaryDatum(self.smooth.scaled(factor), self.masses.scaled(factor))

    def norm(self) -> float:
        """L2 norm of the smooth part plus the sum of charge moduli."""
        return self.smooth.l2_norm() + sum(abs(c.weight) for c in self.masses.charges)

    def to_json(self) -> Dict[str, Any]:
        """JSON-ready dictionary."""
        return {
            "legendre": [[a.real, a.imag] for a in self.smooth.coefficients],
            "deltas": [
                {
                    "endpoint": c.endpoint,
                    "order": c.order,
                    "weight": [complex(c.weight).real, complex(c.weight).imag],
                }
                for c in self.masses.charges
            ],
        }

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> BoundaryDatum:
        """Build from the dictionary produced by `to_json`."""
        legendre = data.get("legendre", [])
        smooth = SmoothDatum.from_array(complex(re, im) for re, im in legendre)
        charges = tuple(
            DiracCharge(
                endpoint=int(d["endpoint"]),
                order=int(d.get("order", 0)),
                weight=complex(*d["weight"]),
            )
            for d in data.get("deltas", [])
        )
        return cls(smooth, PointMassDatum(charges))


@dataclasses.dataclass(frozen=True)
class TestFunction:
    """
    Smooth bump vanishing to all orders outside (c - w/2, c + w/2).

    phi(tau) = exp(-1 / (s (1 - s))) with s = (tau - c) / w + 1/2.
    """

    __test__ = False

    center: float = 0.5
    width: float = 0.8

    #: Highest derivative order supplied by `deriv`.
    max_order: int = MAX_DIRAC_ORDER

    def __post_init__(self) -> None:
        if not self.width > 0.0:
            raise ValueError(f"width must be positive, got {self.width}")
        lo, hi = self.support
        if lo < 0.0 or hi > 1.0:
            raise ValueError("test function support must lie inside [0, 1]")

    @property
    def support(self) -> Tuple[float, float]:
        """Closed support interval."""
        return self.center - 0.5 * self.width, self.center + 0.5 * self.width

    def _s(self, tau: Any) -> np.ndarray:
        return (np.asarray(tau, dtype=float) - self.center) / self.width + 0.5

    def __call__(self, tau: Any) -> Any:
        """Evaluate the bump."""
        return self._derivative(0, tau)

    def deriv(self, m: int = 1) -> Callable[[Any], Any]:
        """Callable for the m-th derivative."""
        if m > self.max_order:
            raise InsufficientDerivativeOrder(
                f"test function supplies derivatives up to order {self.max_order}"
            )
        return functools.partial(self._derivative, m)

    def _derivative(self, m: int, tau: Any) -> Any:
        s = self._s(tau)
        inside = (s > 0.0) & (s < 1.0)
        t = np.where(inside, s, 0.5)
        # Derivatives of g(s) = -1/s - 1/(1 - s).
        g = [-1.0 / t - 1.0 / (1.0 - t)]
        for k in range(1, m + 1):
            g.append(
                -((-1.0) ** k) * math.factorial(k) / t ** (k + 1)
                - math.factorial(k) / (1.0 - t) ** (k + 1)
            )
        # phi' = g' phi, differentiated by Leibniz.
        phi: List[np.ndarray] = [np.exp(g[0])]
        for n in range(1, m + 1):
            phi.append(
                sum(math.comb(n - 1, k) * g[k + 1] * phi[n - 1 - k] for k in range(n))
            )
        value = np.where(inside, phi[m], 0.0) / self.width**m
        return value if value.ndim else float(value)


def integrate_smooth(
    f: Callable[[np.ndarray], Any], lo: float = 0.0, hi: float = 1.0
) -> complex:
    """
    Adaptive Gauss-Legendre integral of f over [lo, hi].

    Starts from GAUSS_NODES nodes and doubles until the relative change falls
    below GAUSS_RTOL.

    Raises
    ------
    QuadratureNonConvergence
        If GAUSS_NODES_CAP nodes are reached without convergence.
    """
    previous: Optional[complex] = None
    n = GAUSS_NODES
    while n <= GAUSS_NODES_CAP:
        nodes, weights = gauss_legendre(n)
        values = np.asarray(f(lo + (hi - lo) * nodes))
        value = complex((hi - lo) * np.sum(weights * values))
        scale = (hi - lo) * float(np.sum(weights * np.abs(values)))
        if previous is not None and abs(value - previous) <= GAUSS_RTOL * scale:
            return value
        previous = value
        n *= 2
    raise QuadratureNonConvergence(
        f"Gauss-Legendre pairing did not converge with {GAUSS_NODES_CAP} nodes"
    )


def project_function(f: Callable[[np.ndarray], Any], N: int) -> SmoothDatum:
    """
    L2 projection of f onto shifted Legendre polynomials of degree <= N.

    Uses a Gauss-Legendre rule with at least 2 (N + 1) nodes.
    """
    nodes, weights = gauss_legendre(max(GAUSS_NODES, 2 * (N + 1)))
    values = np.asarray(f(nodes), dtype=complex)
    vander = shifted_legendre_vander(nodes, N + 1)
    coefficients = (2 * np.arange(N + 1) + 1) * ((weights * values) @ vander)
    return SmoothDatum.from_array(coefficients)


def fourier(u: Any, zeta: Any) -> Any:
    """
    Fourier transform u^(zeta) = <u, exp(-i zeta tau)>.

    Vectorized over zeta; returns a Python complex for scalar input.
    """
    mu = -1j * np.asarray(zeta, dtype=complex)
    value = pair_exponential(u, mu) * np.exp(np.maximum(mu.real, 0.0))
    return value if np.ndim(value) else complex(value)

