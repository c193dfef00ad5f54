"""Trapezoid quadrature along rays in the log-radius variable s."""

import logging
import math
from typing import Callable, Tuple

import numpy as np

from polyspectral.errors import TruncationFailure

logger = logging.getLogger(__name__)

#: Initial trapezoid step in s.
INITIAL_STEP = 0.25

#: Number of step halvings before giving up on the tolerance.
MAX_HALVINGS = 14

#: Spacing of the grid scanned when choosing truncation radii.
SCAN_STEP = 0.25

#: Largest admissible truncation radius in s.
TRUNCATION_LIMIT = 40.0

#: Consecutive negligible scan points needed to stop a truncation scan.
QUIET_STEPS = 3


def trapezoid(
    integrand: Callable[[np.ndarray], np.ndarray], lo: float, hi: float, tol: float
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Trapezoid rule on [lo, hi] with step halving.

    Parameters
    ----------
    integrand
        Maps an array of s values to an array whose last axis runs over s.
    lo, hi
        Integration limits.
    tol
        The step is halved until the change is at most tol times the
        integral of |integrand|.

    Returns
    -------
    value, error
        The integrals and absolute error estimates. If MAX_HALVINGS is
        reached, a warning is logged and the last estimate is returned.
    """
    count = max(2, int(math.ceil((hi - lo) / INITIAL_STEP)))
    h = (hi - lo) / count
    weights = np.ones(count + 1)
    weights[[0, -1]] = 0.5
    values = integrand(lo + h * np.arange(count + 1))
    total = values @ weights
    absolute = np.abs(values) @ weights
    estimate = h * total
    error = np.full(np.shape(estimate), np.inf)
    for _ in range(MAX_HALVINGS):
        values = integrand(lo + h * (np.arange(count) + 0.5))
        total = total + values.sum(axis=-1)
        absolute = absolute + np.abs(values).sum(axis=-1)
        h /= 2.0
        count *= 2
        refined = h * total
        error = np.abs(refined - estimate)
        estimate = refined
        if np.all(error <= tol * h * absolute):
            logger.debug("trapezoid rule converged with %d points", count + 1)
            return estimate, error
    logger.warning(
        "trapezoid rule stopped at step %.3g; relative error estimate %.3g",
        h,
        float(np.max(error / np.maximum(h * absolute, np.finfo(float).tiny))),
    )
    return estimate, error


def log_magnitude(values: np.ndarray, log_scale: np.ndarray) -> np.ndarray:
    """log |values * exp(log_scale)|, with -inf for zeros."""
    with np.errstate(divide="ignore"):
        return np.log(np.abs(values)) + log_scale


def scan_halfwidths(
    log_size: Callable[[np.ndarray], np.ndarray], tol: float
) -> Tuple[float, float]:
    """
    Truncation interval [lo, hi] for an integrand decaying in both directions.

    Steps outward from s = 0 by SCAN_STEP until QUIET_STEPS consecutive
    points have log_size below log(tol) plus the largest value seen.

    Raises
    ------
    TruncationFailure
        If the integrand is still significant at |s| = TRUNCATION_LIMIT.
    """
    peak = float(log_size(np.zeros(1))[0])
    bounds = []
    for sign in (-1.0, 1.0):
        quiet = 0
        s = 0.0
        while quiet < QUIET_STEPS:
            s += sign * SCAN_STEP
            if abs(s) > TRUNCATION_LIMIT:
                raise TruncationFailure(
                    f"integrand is still significant at |s| = {TRUNCATION_LIMIT}"
                )
            size = float(log_size(np.array([s]))[0])
            peak = max(peak, size)
            quiet = quiet + 1 if size < peak + math.log(tol) else 0
        bounds.append(s)
    return bounds[0], bounds[1]
