"""Generic extensible pairing functions that use singledispatch."""

import functools
from typing import Any

import numpy as np


@functools.singledispatch
def pair(u: Any, phi: Any) -> complex:
    """
    Pair a boundary distribution on [0, 1] with a smooth function.

    `phi` must be callable on arrays of tau values. Pairing with Dirac
    derivative charges also needs `phi.deriv(j)`, returning a callable for
    the j-th derivative (numpy's Polynomial and our TestFunction both
    provide this).
    """
    raise NotImplementedError(f"No overload available for type {type(u)}")


@functools.singledispatch
def pair_exponential(u: Any, mu: np.ndarray) -> np.ndarray:
    """
    Pair a boundary distribution with exp(mu * tau), scaled.

    For each entry of the complex array `mu`, returns

        exp(-max(0, Re mu)) * <u, exp(mu * tau)>,

    that is, the pairing divided by the largest modulus of exp(mu * tau)
    on [0, 1]. Callers add max(0, Re mu) back in log space, which keeps
    pairings against strongly growing kernels finite.
    """
    raise NotImplementedError(f"No overload available for type {type(u)}")
