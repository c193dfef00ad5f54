"""
Spectral functions of boundary data.

For side i with data (q_i, dn q_i) and spectral parameter lambda != 0,

    rho_i(lambda) = i |Gamma_i| [ <dn q_i, K> + (lambda e^{i alpha}
                     + beta**2 / (lambda e^{i alpha})) <q_i, K> ],

where K(tau) = exp(-i lambda psi_i(tau) + i beta**2 conj(psi_i(tau)) / lambda)
is the pulled-back kernel. The exponent of K is affine in tau, so every
pairing is an exponential pairing; see `polyspectral.generics`.

The kernel family exp(i lambda z - i beta**2 conj(z) / lambda) satisfies
d/dz d/dzbar q = beta**2 q, that is, Laplacian q = 4 beta**2 q. That is the
convention throughout the package.

Values can be astronomically large or small away from |lambda| = beta, so the
primary routine `rho_scaled` returns rho_i as a pair (values, log_scale) with
rho_i = values * exp(log_scale), where log_scale is the largest log-modulus of
K on the side.
"""

from __future__ import annotations

import dataclasses
from typing import Any, Tuple, Union

import numpy as np

from polyspectral.boundary_data import BoundaryDatum, project_function
from polyspectral.errors import ZeroLambda, ZeroMu
from polyspectral.generics import pair_exponential
from polyspectral.geometry import Side


@dataclasses.dataclass(frozen=True)
class SpectralParams:
    """Parameter beta > 0 of the kernel exp(i lambda z - i beta**2 zbar / lambda)."""

    beta: float

    def __post_init__(self) -> None:
        if not self.beta > 0.0:
            raise ValueError(f"beta must be positive, got {self.beta}")

    @classmethod
    def of(cls, beta: Beta) -> SpectralParams:
        """Coerce a bare beta to SpectralParams, validating it."""
        return beta if isinstance(beta, cls) else cls(float(beta))


#: The PDE parameter, bare or wrapped.
Beta = Union[float, SpectralParams]


@dataclasses.dataclass(frozen=True)
class SideData:
    """Trace q and outward normal derivative dq on one side."""

    side: Side
    q: BoundaryDatum = BoundaryDatum()
    dq: BoundaryDatum = BoundaryDatum()

    def __add__(self, other: SideData) -> SideData:
        if other.side != self.side:
            raise ValueError("can only add data on the same side")
        return SideData(self.side, self.q + other.q, self.dq + other.dq)

    @property
    def is_zero(self) -> bool:
        """True if both data vanish."""
        return self.q.norm() == 0.0 and self.dq.norm() == 0.0

    @property
    def envelope_order(self) -> int:
        """Power of (1 + |lambda| + beta**2 / |lambda|) bounding rho for this data."""
        return max(1, self.q.masses.max_order + 1, self.dq.masses.max_order)

    def scaled(self, factor: complex) -> SideData:
        """Both data multiplied by a constant."""
        return SideData(self.side, self.q.scaled(factor), self.dq.scaled(factor))

    def __mul__(self, factor: complex) -> SideData:
        return self.scaled(factor)

    __rmul__ = __mul__


def _check_lambda(lam: np.ndarray) -> None:
    if np.any(lam == 0):
        raise ZeroLambda("spectral parameter lambda must be nonzero")


def kernel_exponent(side: Side, lam: Any, beta: Beta) -> Tuple[np.ndarray, np.ndarray]:
    """
    Exponent of the pulled-back kernel, as a + mu * tau.

    Returns
    -------
    a, mu
        a = -i lambda z_i + i beta**2 conj(z_i) / lambda and
        mu = -i lambda e^{i alpha} |Gamma| + i beta**2 e^{-i alpha} |Gamma| / lambda,
        with the shape of `lam`.
    """
    beta = SpectralParams.of(beta).beta
    lam = np.asarray(lam, dtype=complex)
    _check_lambda(lam)
    z0 = side.origin
    d = side.end - side.origin
    a = -1j * lam * z0 + 1j * beta**2 * z0.conjugate() / lam
    mu = -1j * lam * d + 1j * beta**2 * d.conjugate() / lam
    return a, mu


def kernel(side: Side, lam: complex, beta: Beta, tau: Any) -> Any:
    """Kernel exp(-i lambda psi(tau) + i beta**2 conj(psi(tau)) / lambda) on a side."""
    a, mu = kernel_exponent(side, lam, beta)
    return np.exp(a + mu * np.asarray(tau, dtype=float))


def robin_factor(side: Side, lam: Any, beta: Beta) -> np.ndarray:
    """Coefficient lambda e^{i alpha} + beta**2 / (lambda e^{i alpha}) of <q, K>."""
    beta = SpectralParams.of(beta).beta
    w = np.asarray(lam, dtype=complex) * side.direction
    return w + beta**2 / w


def rho_scaled(data: SideData, lam: Any, beta: Beta) -> Tuple[np.ndarray, np.ndarray]:
    """
    Spectral function of one side in scaled form.

    Returns
    -------
    values, log_scale
        Arrays with the shape of `lam` such that
        rho = values * exp(log_scale).
    """
    a, mu = kernel_exponent(data.side, lam, beta)
    log_scale = a.real + np.maximum(mu.real, 0.0)
    bracket = pair_exponential(data.dq, mu) + robin_factor(
        data.side, lam, beta
    ) * pair_exponential(data.q, mu)
    values = 1j * data.side.length * np.exp(1j * a.imag) * bracket
    return values, log_scale


def rho(data: SideData, lam: Any, beta: Beta) -> Any:
    """
    Spectral function rho_i(lambda) (vectorized over lambda).

    Raises
    ------
    ZeroLambda
        If some lambda is zero.
    """
    values, log_scale = rho_scaled(data, lam, beta)
    result = values * np.exp(log_scale)
    return result if np.ndim(result) else complex(result)


def log_rho_envelope(side: Side, lam: Any, beta: Beta, N: int) -> Any:
    """Logarithm of `rho_envelope`, safe against overflow."""
    beta = SpectralParams.of(beta).beta
    a, mu = kernel_exponent(side, lam, beta)
    r = np.abs(np.asarray(lam, dtype=complex))
    return N * np.log1p(r + beta**2 / r) + a.real + np.maximum(mu.real, 0.0)


def rho_envelope(side: Side, lam: Any, beta: Beta, N: int) -> Any:
    """
    Upper envelope (1 + |lambda| + beta**2 / |lambda|)**N * max |K| over the side.

    Bounds rho_i for data with Dirac orders below N, up to the size of the data.
    """
    result = np.exp(log_rho_envelope(side, lam, beta, N))
    return result if np.ndim(result) else float(result)


@dataclasses.dataclass(frozen=True)
class ExponentialSolution:
    """The exact solution exp(i mu z - i beta**2 conj(z) / mu)."""

    mu: complex
    beta: float

    def __post_init__(self) -> None:
        if self.mu == 0:
            raise ZeroMu("exponential solution needs mu != 0")

    def value(self, z: Any) -> Any:
        """Field value at z (vectorized)."""
        z = np.asarray(z, dtype=complex)
        return np.exp(1j * self.mu * z - 1j * self.beta**2 * np.conj(z) / self.mu)

    def normal_derivative(self, z: Any, nu: complex) -> Any:
        """Directional derivative along the unit vector nu."""
        factor = 1j * self.mu * nu - 1j * self.beta**2 * np.conj(nu) / self.mu
        return factor * self.value(z)

    def traces(self, side: Side, N: int) -> SideData:
        """Trace and outward normal derivative on a side, to Legendre degree N."""
        nu = side.normal
        q = project_function(lambda tau: self.value(side.psi(tau)), N)
        dq = project_function(lambda tau: self.normal_derivative(side.psi(tau), nu), N)
        return SideData(side, BoundaryDatum(smooth=q), BoundaryDatum(smooth=dq))


def exact_solution_traces(mu: complex, side: Side, beta: float, N: int) -> SideData:
    """
    Boundary data of exp(i mu z - i beta**2 conj(z) / mu) on one side.

    Raises
    ------
    ZeroMu
        If mu is zero.
    """
    return ExponentialSolution(mu, beta).traces(side, N)
