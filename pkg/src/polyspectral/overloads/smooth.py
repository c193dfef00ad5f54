"""Pairings for Legendre-expanded smooth data."""

from typing import Any

import numpy as np

from polyspectral.boundary_data import (
    SmoothDatum,
    integrate_smooth,
    legendre_exponential_moments,
)
from polyspectral.generics import pair, pair_exponential


@pair.register
def _(u: SmoothDatum, phi: Any) -> complex:
    if not u.coefficients:
        return 0j
    lo, hi = getattr(phi, "support", (0.0, 1.0))
    return integrate_smooth(lambda tau: u(tau) * phi(tau), lo, hi)


@pair_exponential.register
def _(u: SmoothDatum, mu: np.ndarray) -> np.ndarray:
    mu = np.asarray(mu, dtype=complex)
    if not u.coefficients:
        return np.zeros(mu.shape, dtype=complex)
    return legendre_exponential_moments(mu, len(u.coefficients)) @ u.array
