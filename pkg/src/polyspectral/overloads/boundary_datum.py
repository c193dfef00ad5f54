"""Pairings for full boundary data: smooth part plus charges."""

from typing import Any

import numpy as np

from polyspectral.boundary_data import BoundaryDatum
from polyspectral.generics import pair, pair_exponential


@pair.register
def _(u: BoundaryDatum, phi: Any) -> complex:
    return pair(u.smooth, phi) + pair(u.masses, phi)


@pair_exponential.register
def _(u: BoundaryDatum, mu: np.ndarray) -> np.ndarray:
    return pair_exponential(u.smooth, mu) + pair_exponential(u.masses, mu)
