"""Pairings for endpoint Dirac derivative charges."""

from typing import Any

import numpy as np

from polyspectral.boundary_data import PointMassDatum
from polyspectral.errors import InsufficientDerivativeOrder
from polyspectral.generics import pair, pair_exponential


@pair.register
def _(u: PointMassDatum, phi: Any) -> complex:
    total = 0j
    for charge in u.charges:
        if charge.order == 0:
            derivative = phi
        elif hasattr(phi, "deriv"):
            derivative = phi.deriv(charge.order)
        else:
            raise InsufficientDerivativeOrder(
                f"pairing needs derivative of order {charge.order}"
            )
        value = complex(np.asarray(derivative(float(charge.endpoint))))
        total += (-1) ** charge.order * charge.weight * value
    return total


@pair_exponential.register
def _(u: PointMassDatum, mu: np.ndarray) -> np.ndarray:
    # <delta^{(j)}_e, exp(mu tau)> = (-mu)**j exp(mu e)
    mu = np.asarray(mu, dtype=complex)
    shift = np.maximum(mu.real, 0.0)
    total = np.zeros(mu.shape, dtype=complex)
    for charge in u.charges:
        factor = charge.weight * (-mu) ** charge.order
        total += factor * np.exp(mu * charge.endpoint - shift)
    return total
