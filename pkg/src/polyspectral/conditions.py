"""
Boundary conditions.

A boundary condition on a side prescribes one combination of the trace q and
the outward normal derivative dq; the global relation determines the other.
Each condition object knows

- which datum is given, so the known part of rho_i can be computed,
- the factor multiplying <unknown, K> inside the bracket of rho_i, and
- how to rebuild (q, dq) once the unknown is found.

Writing c(lambda) = lambda e^{i alpha} + beta**2 / (lambda e^{i alpha}), the
bracket is <dq, K> + c <q, K>, so the unknown's factor is 1 for Dirichlet
sides (dq unknown), c for Neumann sides (q unknown) and c - gamma for Robin
sides, where dq = g - gamma q has been substituted.
"""

from __future__ import annotations

import abc
import dataclasses
from typing import Any, Dict, Iterable, Tuple

import numpy as np

from polyspectral.boundary_data import BoundaryDatum


class BoundaryCondition(abc.ABC):
    """Abstract base class for boundary conditions."""

    @abc.abstractmethod
    def known_data(self, given: BoundaryDatum) -> Tuple[BoundaryDatum, BoundaryDatum]:
        """(q, dq) with the given datum in place and zero for the unknown."""

    @abc.abstractmethod
    def unknown_factor(self, c: np.ndarray) -> np.ndarray:
        """Factor multiplying <unknown, K> in the bracket of rho_i."""

    @abc.abstractmethod
    def complete(
        self, given: BoundaryDatum, unknown: BoundaryDatum
    ) -> Tuple[BoundaryDatum, BoundaryDatum]:
        """Full (q, dq) once the unknown datum is known."""

    @property
    @abc.abstractmethod
    def name(self) -> str:
        """Name for this condition."""

    def to_json(self) -> Dict[str, Any]:
        """JSON fields describing the condition."""
        return {"kind": self.name}

    def __repr__(self) -> str:
        """Representation of this boundary condition."""
        return f"<BoundaryCondition: {self.name}>"


class _Dirichlet(BoundaryCondition):
    """Trace q given; normal derivative unknown."""

    def known_data(self, given: BoundaryDatum) -> Tuple[BoundaryDatum, BoundaryDatum]:
        return given, BoundaryDatum.zero()

    def unknown_factor(self, c: np.ndarray) -> np.ndarray:
        return np.ones_like(c)

    def complete(
        self, given: BoundaryDatum, unknown: BoundaryDatum
    ) -> Tuple[BoundaryDatum, BoundaryDatum]:
        return given, unknown

    @property
    def name(self) -> str:
        return "dirichlet"


class _Neumann(BoundaryCondition):
    """Normal derivative given; trace unknown."""

    def known_data(self, given: BoundaryDatum) -> Tuple[BoundaryDatum, BoundaryDatum]:
        return BoundaryDatum.zero(), given

    def unknown_factor(self, c: np.ndarray) -> np.ndarray:
        return c

    def complete(
        self, given: BoundaryDatum, unknown: BoundaryDatum
    ) -> Tuple[BoundaryDatum, BoundaryDatum]:
        return unknown, given

    @property
    def name(self) -> str:
        return "neumann"


class Robin(BoundaryCondition):
    """dq + gamma q given; trace unknown."""

    def __init__(self, gamma: float):
        gamma = float(gamma)
        if not np.isfinite(gamma):
            raise ValueError(f"Robin coefficient must be finite, got {gamma}")
        self.gamma = gamma

    def known_data(self, given: BoundaryDatum) -> Tuple[BoundaryDatum, BoundaryDatum]:
        return BoundaryDatum.zero(), given

    def unknown_factor(self, c: np.ndarray) -> np.ndarray:
        return c - self.gamma

    def complete(
        self, given: BoundaryDatum, unknown: BoundaryDatum
    ) -> Tuple[BoundaryDatum, BoundaryDatum]:
        return unknown, given - unknown.scaled(self.gamma)

    @property
    def name(self) -> str:
        return "robin"

    def to_json(self) -> Dict[str, Any]:
        return {"kind": self.name, "gamma": self.gamma}

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Robin) and other.gamma == self.gamma

    def __hash__(self) -> int:
        return hash(("robin", self.gamma))


#: Trace prescribed.
DIRICHLET: BoundaryCondition = _Dirichlet()

#: Outward normal derivative prescribed.
NEUMANN: BoundaryCondition = _Neumann()


def condition_from_json(data: Dict[str, Any]) -> BoundaryCondition:
    """Condition object from a {"kind": ..., "gamma": ...} dictionary."""
    kind = str(data["kind"]).lower()
    if kind == "dirichlet":
        return DIRICHLET
    if kind == "neumann":
        return NEUMANN
    if kind == "robin":
        return Robin(data["gamma"])
    raise ValueError(f"unknown boundary condition kind {kind!r}")


@dataclasses.dataclass(frozen=True)
class SideCondition:
    """A boundary condition together with its given datum."""

    condition: BoundaryCondition
    given: BoundaryDatum

    def to_json(self) -> Dict[str, Any]:
        """JSON-ready dictionary."""
        return {**self.condition.to_json(), "data": self.given.to_json()}

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> SideCondition:
        """Build from the dictionary produced by `to_json`."""
        return cls(condition_from_json(data), BoundaryDatum.from_json(data["data"]))


@dataclasses.dataclass(frozen=True)
class BoundaryConditionSpec:
    """One SideCondition per side, in side order."""

    sides: Tuple[SideCondition, ...]

    @classmethod
    def of(cls, conditions: Iterable[SideCondition]) -> BoundaryConditionSpec:
        """Build from any iterable of side conditions."""
        return cls(tuple(conditions))

    def __len__(self) -> int:
        return len(self.sides)
