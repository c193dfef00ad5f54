"""
Corner singularities.

Near a corner with interior angle Delta, boundary values behave like powers
of the distance rho to the vertex. Requiring the leading terms of the two
sides' contributions to the global relation to cancel for large lambda
quantizes the admissible powers. Each corner case gives a ladder of
exponents, always a rational multiple of pi / Delta:

    Neumann-Neumann        d(M) = 2 M pi / Delta,          M >= 0
    Dirichlet-Dirichlet    n(M) = 2 M pi / Delta,          M >= 1
    Dirichlet-Neumann      d(M) = (2 M + 1/2) pi / Delta,  M >= 0

Discontinuous Dirichlet data admit no integrable balance at all.

Model data. The corner is placed at z = i with the polygon below it; the two
sides leave the vertex in the directions -theta_l, with
theta_i = pi/2 + Delta/2 and theta_{i-1} = pi/2 - Delta/2. On side l the trace
is D_l rho**d_l and the normal derivative is +-N_l rho**(n_l - 1). After
removing the common factor exp(lambda + beta**2 / lambda), side l contributes

    T_l(lambda) = int_0^1 exp(-rho k_l) [N_l rho**(n_l - 1) + c_l D_l rho**d_l] drho,

with k_l = w + beta**2 / w for w = lambda exp(i (pi/2 - theta_l)) and
c_l = lambda exp(-i theta_l) + beta**2 / (lambda exp(-i theta_l)). The corner
contribution to the global relation is T_i - T_{i-1}. Watson's lemma gives
int_0^1 exp(-nu rho) rho**d drho ~ Gamma(d + 1) nu**(-1 - d) for large nu.
"""

from __future__ import annotations

import abc
import dataclasses
import logging
import math
from fractions import Fraction
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np
import scipy.special

from polyspectral.boundary_data import gauss_legendre
from polyspectral.errors import AngleOutOfRange, DomainError, QuadratureNonConvergence

logger = logging.getLogger(__name__)

#: An exponent: exact when the corner angle is an exact multiple of pi.
Exponent = Union[Fraction, float]

#: Ratio between consecutive edges of the graded mesh at rho = 0.
GRADING_RATIO = 0.5

#: Number of graded levels.
GRADING_LEVELS = 40

#: Gauss-Legendre nodes per panel.
PANEL_NODES = 32

#: Largest |nu| * width of a single panel.
PANEL_RATE = 8.0

#: Agreement required between the panel rule and its half-size companion.
QUADRATURE_RTOL = 1e-12


@dataclasses.dataclass(frozen=True)
class CornerAngle:
    """
    An interior angle in (0, pi).

    Angles built with `pi_multiple` are exact and give exact exponents.
    """

    radians: float

    #: The angle divided by pi, when known exactly.
    multiple: Optional[Fraction] = None

    def __post_init__(self) -> None:
        if not 0.0 < self.radians < math.pi:
            raise AngleOutOfRange(
                f"corner angle must lie strictly between 0 and pi, got {self.radians}"
            )
        if self.multiple is not None and not 0 < self.multiple < 1:
            raise AngleOutOfRange(f"angle multiple {self.multiple} is not in (0, 1)")

    @classmethod
    def pi_multiple(cls, multiple: Any) -> CornerAngle:
        """The exact angle multiple * pi."""
        multiple = Fraction(multiple)
        if not 0 < multiple < 1:
            raise AngleOutOfRange(f"angle multiple {multiple} is not in (0, 1)")
        return cls(float(multiple) * math.pi, multiple)

    @classmethod
    def of(cls, angle: Union[CornerAngle, float]) -> CornerAngle:
        """Accept either a CornerAngle or an angle in radians."""
        if isinstance(angle, CornerAngle):
            return angle
        return cls(float(angle))

    def exponent(self, multiple: Fraction) -> Exponent:
        """The exponent multiple * pi / Delta."""
        if self.multiple is not None:
            return multiple / self.multiple
        return float(multiple) * math.pi / self.radians

    def compare_with_one(self, multiple: Fraction) -> int:
        """Sign of multiple * pi / Delta - 1, computed without rounding error."""
        left: Any
        right: Any
        if self.multiple is not None:
            left, right = multiple, self.multiple
        else:
            left, right = float(multiple) * math.pi, self.radians
        return (left > right) - (left < right)


@dataclasses.dataclass(frozen=True)
class SideModel:
    """Model boundary data D rho**d (trace) and N rho**(n - 1) (normal derivative)."""

    D: complex = 0.0
    d: float = 0.0
    N: complex = 0.0
    n: float = 1.0


@dataclasses.dataclass(frozen=True)
class CornerAmplitudes:
    """
    Amplitudes of the unknown boundary values on the two sides of a corner.

    Which datum each amplitude multiplies depends on the corner case.
    """

    exponent: float

    #: Amplitude on side i - 1.
    previous: complex

    #: Amplitude on side i.
    current: complex


class CornerCase(abc.ABC):
    """Abstract base class for corner boundary-condition pairs."""

    @abc.abstractmethod
    def ladder_multiple(self, M: int) -> Fraction:
        """Exponent of ladder index M, as a multiple of pi / Delta."""

    @property
    @abc.abstractmethod
    def first_index(self) -> Optional[int]:
        """Smallest admissible ladder index (None if there is no ladder)."""

    @property
    @abc.abstractmethod
    def coefficient_relation(self) -> str:
        """Relation between the amplitudes on the two sides."""

    @abc.abstractmethod
    def model(self, amplitudes: CornerAmplitudes) -> Tuple[SideModel, SideModel]:
        """Model data (side i - 1, side i) carrying the given amplitudes."""

    @abc.abstractmethod
    def consistent_amplitudes(self, angle: CornerAngle, M: int) -> CornerAmplitudes:
        """Amplitudes obeying the case's relation, for ladder index M."""

    @property
    @abc.abstractmethod
    def name(self) -> str:
        """Short name for this corner case."""

    @property
    def non_integrable(self) -> bool:
        """True if balancing requires non-integrable boundary values."""
        return self.first_index is None

    def __repr__(self) -> str:
        """Representation of this corner case."""
        return f"<CornerCase: {self.name}>"


class _LadderCornerCase(CornerCase):
    """Corner case with exponents (2 M + offset) pi / Delta."""

    def __init__(
        self,
        offset: Fraction,
        first_index: int,
        relation: str,
        layout: str,
        name: str,
    ):
        self._offset = offset
        self._first_index = first_index
        self._relation = relation
        self._layout = layout
        self._name = name

    def ladder_multiple(self, M: int) -> Fraction:
        return 2 * M + self._offset

    @property
    def first_index(self) -> Optional[int]:
        return self._first_index

    @property
    def coefficient_relation(self) -> str:
        return self._relation

    def model(self, amplitudes: CornerAmplitudes) -> Tuple[SideModel, SideModel]:
        e, a, b = amplitudes.exponent, amplitudes.previous, amplitudes.current
        if self._layout == "traces":
            return SideModel(D=a, d=e), SideModel(D=b, d=e)
        if self._layout == "derivatives":
            return SideModel(N=a, n=e), SideModel(N=b, n=e)
        return SideModel(N=a, n=e), SideModel(D=b, d=e)

    def consistent_amplitudes(self, angle: CornerAngle, M: int) -> CornerAmplitudes:
        exponent = float(angle.exponent(self.ladder_multiple(M)))
        if self._layout == "mixed":
            return CornerAmplitudes(exponent, exponent, 1.0)
        return CornerAmplitudes(exponent, 1.0, 1.0)

    @property
    def name(self) -> str:
        return self._name


class _JumpCornerCase(CornerCase):
    """Dirichlet data with different values on the two sides."""

    def ladder_multiple(self, M: int) -> Fraction:
        raise ValueError("discontinuous Dirichlet corners have no exponent ladder")

    @property
    def first_index(self) -> Optional[int]:
        return None

    @property
    def coefficient_relation(self) -> str:
        return "none (non-integrable)"

    def model(self, amplitudes: CornerAmplitudes) -> Tuple[SideModel, SideModel]:
        e = amplitudes.exponent
        previous = SideModel(D=amplitudes.previous, d=e)
        return previous, SideModel(D=amplitudes.current, d=e)

    def consistent_amplitudes(self, angle: CornerAngle, M: int) -> CornerAmplitudes:
        raise ValueError("discontinuous Dirichlet corners have no consistent data")

    @property
    def name(self) -> str:
        return "DDjump"


#: Continuous Neumann data on both sides; unknown traces D rho**d.
NEUMANN_NEUMANN: CornerCase = _LadderCornerCase(
    Fraction(0), 0, "D_{i-1} = D_i", "traces", name="NN"
)

#: Continuous Dirichlet data on both sides; unknown derivatives N rho**(n - 1).
DIRICHLET_DIRICHLET: CornerCase = _LadderCornerCase(
    Fraction(0), 1, "N_{i-1} = N_i", "derivatives", name="DD"
)

#: Dirichlet data on side i - 1, Neumann data on side i, both vanishing at the corner.
DIRICHLET_NEUMANN: CornerCase = _LadderCornerCase(
    Fraction(1, 2), 0, "N_{i-1} = D_i d_i", "mixed", name="DN"
)

#: Dirichlet data with a jump at the corner.
DIRICHLET_DIRICHLET_JUMP: CornerCase = _JumpCornerCase()

_CASES: Dict[str, CornerCase] = {
    case.name.lower(): case
    for case in (
        NEUMANN_NEUMANN,
        DIRICHLET_DIRICHLET,
        DIRICHLET_NEUMANN,
        DIRICHLET_DIRICHLET_JUMP,
    )
}


def corner_case(name: str) -> CornerCase:
    """Look up a corner case by short name (NN, DD, DN, DDjump)."""
    try:
        return _CASES[name.lower()]
    except KeyError:
        raise ValueError(f"unknown corner case {name!r}") from None


@dataclasses.dataclass(frozen=True)
class CornerReport:
    """Exponent ladder and singularity classification of a corner."""

    case: str
    delta: float
    ladder: Tuple[Tuple[int, Exponent], ...]
    coefficient_relation: str

    #: Smallest admissible positive exponent (None without a ladder).
    smallest_exponent: Optional[Exponent]

    #: Some admissible exponent lies strictly between 0 and 1.
    singular: bool

    #: The smallest positive exponent equals 1 exactly.
    marginal: bool

    non_integrable: bool

    def to_json(self) -> Dict[str, Any]:
        """JSON-ready dictionary; exact exponents are also given as strings."""
        data: Dict[str, Any] = {
            "case": self.case,
            "delta": self.delta,
            "ladder": [[M, float(d)] for M, d in self.ladder],
            "coefficient_relation": self.coefficient_relation,
            "smallest_exponent": (
                None
                if self.smallest_exponent is None
                else float(self.smallest_exponent)
            ),
            "singular": self.singular,
            "marginal": self.marginal,
            "non_integrable": self.non_integrable,
        }
        if all(isinstance(d, Fraction) for _, d in self.ladder) and self.ladder:
            data["ladder_exact"] = [str(d) for _, d in self.ladder]
        return data


def classify(
    case: CornerCase, delta: Union[CornerAngle, float], M_max: int
) -> CornerReport:
    """
    Exponent ladder of a corner for M up to M_max.

    Parameters
    ----------
    case
        Boundary-condition pair at the corner.
    delta
        Interior angle, in radians or as an exact CornerAngle.
    M_max
        Largest ladder index reported.

    Raises
    ------
    AngleOutOfRange
        If delta is not strictly between 0 and pi.
    """
    angle = CornerAngle.of(delta)
    if M_max < 0:
        raise ValueError(f"M_max must be nonnegative, got {M_max}")
    first = case.first_index
    if first is None:
        return CornerReport(
            case=case.name,
            delta=angle.radians,
            ladder=(),
            coefficient_relation=case.coefficient_relation,
            smallest_exponent=None,
            singular=True,
            marginal=False,
            non_integrable=True,
        )

    ladder = tuple(
        (M, angle.exponent(case.ladder_multiple(M))) for M in range(first, M_max + 1)
    )
    smallest = next(
        M for M in range(first, first + 2) if case.ladder_multiple(M) > 0
    )
    multiple = case.ladder_multiple(smallest)
    comparison = angle.compare_with_one(multiple)
    return CornerReport(
        case=case.name,
        delta=angle.radians,
        ladder=ladder,
        coefficient_relation=case.coefficient_relation,
        smallest_exponent=angle.exponent(multiple),
        singular=comparison < 0,
        marginal=comparison == 0,
        non_integrable=False,
    )


def watson_leading(d: float, nu: complex) -> complex:
    """
    Leading Watson term Gamma(d + 1) nu**(-1 - d), principal branch.

    Raises
    ------
    DomainError
        If d <= -1 or Re nu <= 0.
    """
    if not d > -1.0:
        raise DomainError(f"Watson's lemma needs d > -1, got {d}")
    nu = complex(nu)
    if not nu.real > 0.0:
        raise DomainError(f"Watson's lemma needs Re nu > 0, got {nu}")
    return complex(scipy.special.gamma(d + 1.0) * np.exp(-(1.0 + d) * np.log(nu)))


def _panels(nu: complex) -> np.ndarray:
    levels = GRADING_RATIO ** np.arange(GRADING_LEVELS, -1, -1)
    edges: List[np.ndarray] = [levels[:1]]
    for a, b in zip(levels[:-1], levels[1:]):
        count = max(1, int(math.ceil(abs(nu) * (b - a) / PANEL_RATE)))
        edges.append(np.linspace(a, b, count + 1)[1:])
    return np.concatenate(edges)


def _panel_sum(
    d: float, nu: complex, edges: np.ndarray, n: int
) -> Tuple[complex, float]:
    t, w = gauss_legendre(n)
    a, b = edges[:-1], edges[1:]
    nodes = a[:, None] + (b - a)[:, None] * t
    values = np.exp(-nu * nodes) * nodes**d
    weights = (b - a)[:, None] * w
    return complex(np.sum(values * weights)), float(np.sum(np.abs(values) * weights))


def watson_integral(d: float, nu: complex) -> complex:
    """
    int_0^1 exp(-nu rho) rho**d drho by graded-mesh Gauss-Legendre quadrature.

    The panel next to rho = 0 is integrated by a three-term series.

    Raises
    ------
    DomainError
        If d <= -1.
    QuadratureNonConvergence
        If the panel rule and its half-size companion disagree.
    """
    if not d > -1.0:
        raise DomainError(f"integral diverges at rho = 0 for d = {d}")
    nu = complex(nu)
    edges = _panels(nu)
    h = edges[0]
    head = h ** (d + 1.0) * (
        1.0 / (d + 1.0) - nu * h / (d + 2.0) + (nu * h) ** 2 / (2.0 * (d + 3.0))
    )
    fine, scale = _panel_sum(d, nu, edges, PANEL_NODES)
    coarse, _ = _panel_sum(d, nu, edges, PANEL_NODES // 2)
    if abs(fine - coarse) > QUADRATURE_RTOL * max(scale, abs(head)):
        raise QuadratureNonConvergence(
            f"graded quadrature for d = {d}, nu = {nu} "
            f"changed by {abs(fine - coarse):.3g}"
        )
    return head + fine


def _side_parameters(
    delta: float, beta: float, lam: complex
) -> Tuple[Tuple[complex, complex], Tuple[complex, complex]]:
    """(k, c) for side i - 1 and side i."""
    out = []
    for theta in (0.5 * math.pi - 0.5 * delta, 0.5 * math.pi + 0.5 * delta):
        w = lam * np.exp(1j * (0.5 * math.pi - theta))
        v = lam * np.exp(-1j * theta)
        out.append((complex(w + beta**2 / w), complex(v + beta**2 / v)))
    return out[0], out[1]


def _side_term(model: SideModel, k: complex, c: complex) -> complex:
    total = 0j
    if model.N != 0:
        total += model.N * watson_integral(model.n - 1.0, k)
    if model.D != 0:
        total += c * model.D * watson_integral(model.d, k)
    return total


def corner_balance_terms(
    case: CornerCase,
    delta: Union[CornerAngle, float],
    amplitudes: CornerAmplitudes,
    beta: float,
    lam: complex,
) -> Tuple[complex, complex]:
    """The two side contributions (T_{i-1}, T_i) of the corner model."""
    angle = CornerAngle.of(delta)
    if lam == 0:
        raise ValueError("lambda must be nonzero")
    previous, current = case.model(amplitudes)
    (k_prev, c_prev), (k_cur, c_cur) = _side_parameters(angle.radians, beta, lam)
    return _side_term(previous, k_prev, c_prev), _side_term(current, k_cur, c_cur)


def corner_balance_residual(
    case: CornerCase,
    delta: Union[CornerAngle, float],
    amplitudes: CornerAmplitudes,
    beta: float,
    lam: complex,
) -> complex:
    """
    Corner contribution T_i - T_{i-1} to the global relation.

    Scaled by exp(-(lambda + beta**2 / lambda)). With exponents from the
    case's ladder and amplitudes obeying its relation, the leading Watson
    terms cancel and the residual decays faster than either term.
    """
    previous, current = corner_balance_terms(case, delta, amplitudes, beta, lam)
    residual = current - previous
    logger.debug(
        "%s corner at lambda=%s: terms %.3g, %.3g, residual %.3g",
        case.name,
        lam,
        abs(previous),
        abs(current),
        abs(residual),
    )
    return residual


def lambda_inversion_check(
    expression: Callable[[float], complex], lam: float, beta: float
) -> float:
    """
    |f(lambda) - conj(f(beta**2 / lambda))| for a function of real lambda > 0.

    Corner contributions of real model data are invariant under
    lambda -> beta**2 / lambda followed by complex conjugation.
    """
    if not lam > 0.0:
        raise ValueError(f"lambda must be positive, got {lam}")
    return abs(expression(lam) - complex(expression(beta**2 / lam)).conjugate())
