"""
The global relation and the Dirichlet-Neumann map.

Boundary values of a solution satisfy sum_i rho_i(lambda) = 0 for every
lambda != 0. Given one datum per side, the other is expanded in shifted
Legendre polynomials and the relation is enforced in the least-squares sense
at collocation points on the rays arg(lambda) = -alpha_j, with log-radii
symmetric about |lambda| = beta.

Endpoint Dirac charges are never unknowns: the combination a delta_1 on side i
and b delta_0 on side i + 1 with |Gamma_i| a + |Gamma_{i+1}| b = 0 leaves every
rho-sum unchanged (see `vertex_null_direction`), so such components can't be
recovered from the relation.
"""

from __future__ import annotations

import dataclasses
import logging
import math
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from polyspectral.boundary_data import BoundaryDatum, legendre_exponential_moments
from polyspectral.conditions import BoundaryConditionSpec
from polyspectral.errors import NonConvergence, RankDeficient
from polyspectral.geometry import Polygon
from polyspectral.spectral import (
    SideData,
    kernel_exponent,
    log_rho_envelope,
    rho_scaled,
    robin_factor,
)

logger = logging.getLogger(__name__)


def _rho_table(
    data: Sequence[SideData], lam: np.ndarray, beta: float
) -> Tuple[np.ndarray, np.ndarray]:
    pairs = [rho_scaled(d, lam, beta) for d in data]
    values = np.array([p[0] for p in pairs])
    log_scales = np.array([p[1] for p in pairs])
    return values, log_scales


def residual(polygon: Polygon, beta: float, data: Sequence[SideData], lam: Any) -> Any:
    """
    Global relation sum_i rho_i(lambda), vectorized over lambda.

    Parameters
    ----------
    polygon
        The polygon; `data` must hold one SideData per side, in order.
    beta
        PDE parameter.
    data
        Boundary data.
    lam
        Nonzero spectral parameter(s).
    """
    if len(data) != polygon.n:
        raise ValueError(f"expected data for {polygon.n} sides, got {len(data)}")
    lam = np.asarray(lam, dtype=complex)
    values, log_scales = _rho_table(data, lam, beta)
    top = np.max(log_scales, axis=0)
    total = np.sum(values * np.exp(log_scales - top), axis=0) * np.exp(top)
    return total if np.ndim(total) else complex(total)


def normalized_residual(
    polygon: Polygon, beta: float, data: Sequence[SideData], lam: Any
) -> np.ndarray:
    """|sum_i rho_i| / max_i |rho_i| at each lambda (0 where all rho_i vanish)."""
    lam = np.asarray(lam, dtype=complex)
    values, log_scales = _rho_table(data, lam, beta)
    top = np.max(log_scales, axis=0)
    terms = values * np.exp(log_scales - top)
    largest = np.max(np.abs(terms), axis=0)
    total = np.abs(np.sum(terms, axis=0))
    return np.where(largest > 0, total / np.where(largest > 0, largest, 1.0), 0.0)


def vertex_null_direction(polygon: Polygon, i: int, a: complex) -> List[SideData]:
    """
    Dirac perturbation at the vertex shared by sides i and i + 1.

    Adds a * delta_1 to dq on side i and b * delta_0 to dq on side i + 1,
    with |Gamma_i| a + |Gamma_{i+1}| b = 0. All other sides get zero data.
    Adding the result to any data leaves the global relation unchanged.
    """
    n = polygon.n
    i %= n
    j = (i + 1) % n
    b = -polygon.side(i).length * a / polygon.side(j).length
    perturbation = [SideData(side) for side in polygon.sides]
    perturbation[i] = SideData(polygon.side(i), dq=BoundaryDatum.dirac(1, 0, a))
    perturbation[j] = SideData(polygon.side(j), dq=BoundaryDatum.dirac(0, 0, b))
    return perturbation


@dataclasses.dataclass(frozen=True)
class CollocationConfig:
    """Discretization and solver settings for `solve_dn_map`."""

    #: Unknown Legendre coefficients per side.
    modes_per_side: int = 16

    #: Collocation points on each ray.
    points_per_ray: int = 24

    #: Log-radius half-width S; radii are beta * exp(s) for s in [-S, S].
    ray_halfwidth: float = 4.0

    #: Scale each row by the largest envelope across sides.
    normalize_rows: bool = True

    #: Relative singular value cutoff of the least-squares solve.
    rank_tol: float = 1e-12

    #: Largest acceptable normalized residual on the validation set.
    validation_tol: float = 1e-6

    #: "minimum_norm" keeps the truncated-SVD solution, "raise" refuses it.
    rank_policy: str = "minimum_norm"

    #: Also collocate on the continuations arg(lambda) = pi - alpha_j.
    include_continuation_rays: bool = False

    #: Vertex Dirac unknowns; unidentifiable, so only False is accepted.
    vertex_delta_unknowns: bool = False

    def __post_init__(self) -> None:
        if self.modes_per_side < 1:
            raise ValueError("modes_per_side must be at least 1")
        if self.points_per_ray < 2:
            raise ValueError("points_per_ray must be at least 2")
        if not self.ray_halfwidth > 0.0:
            raise ValueError("ray_halfwidth must be positive")
        if self.rank_policy not in ("minimum_norm", "raise"):
            raise ValueError(f"unknown rank policy {self.rank_policy!r}")
        if self.vertex_delta_unknowns:
            raise ValueError(
                "vertex Dirac charges can't be unknowns: a pair of charges at a "
                "shared vertex with |Gamma_i| a + |Gamma_(i+1)| b = 0 leaves the "
                "global relation unchanged; supply such charges as known data"
            )

    @classmethod
    def from_json(cls, data: Dict[str, Any]) -> CollocationConfig:
        """Build from a problem file's "solver" block."""
        fields = {f.name for f in dataclasses.fields(cls)}
        aliases = {"modes": "modes_per_side", "rays": "points_per_ray"}
        kwargs = {}
        for key, value in data.items():
            key = aliases.get(key, key)
            if key not in fields:
                raise ValueError(f"unknown solver setting {key!r}")
            kwargs[key] = value
        return cls(**kwargs)


def _ray_parameters(config: CollocationConfig, offset: float = 0.0) -> np.ndarray:
    s = np.linspace(-config.ray_halfwidth, config.ray_halfwidth, config.points_per_ray)
    if offset:
        step = s[1] - s[0]
        s = s[:-1] + offset * step
    return s


def _ray_directions(polygon: Polygon, config: CollocationConfig) -> List[complex]:
    directions = [complex(np.exp(-1j * alpha)) for alpha in polygon.alphas]
    if config.include_continuation_rays:
        directions += [-d for d in directions]
    return directions


def _merge(points: np.ndarray, beta: float) -> np.ndarray:
    keys = np.round(points / beta, 12)
    _, first = np.unique(keys.real + 1j * keys.imag, return_index=True)
    return points[np.sort(first)]


def collocation_set(
    polygon: Polygon, beta: float, config: CollocationConfig
) -> np.ndarray:
    """
    Collocation points lambda = e^{-i alpha_j} beta e^{s_k}.

    Points are ordered ray by ray; coincident points (from continuation rays
    of parallel sides) are merged.
    """
    radii = beta * np.exp(_ray_parameters(config))
    points = np.concatenate([d * radii for d in _ray_directions(polygon, config)])
    return _merge(points, beta)


def validation_set(
    polygon: Polygon, beta: float, config: CollocationConfig
) -> np.ndarray:
    """Points midway (in log-radius) between collocation points."""
    radii = beta * np.exp(_ray_parameters(config, offset=0.5))
    points = np.concatenate([d * radii for d in _ray_directions(polygon, config)])
    return _merge(points, beta)


@dataclasses.dataclass(frozen=True)
class SolveDiagnostics:
    """Accuracy and conditioning of a least-squares solve."""

    #: Largest normalized global-relation residual on the validation set.
    residual_max: float = 0.0

    #: Relative residual ||A x - b|| / ||b|| of the least-squares system.
    lsq_residual: float = 0.0

    #: Ratio of the largest to the smallest retained singular value.
    condition: float = 1.0

    #: Numerical rank after the singular value cutoff.
    rank: int = 0

    rows: int = 0
    cols: int = 0

    def to_json(self) -> Dict[str, Any]:
        """JSON-ready dictionary."""
        return dataclasses.asdict(self)


@dataclasses.dataclass(frozen=True)
class SolvedBoundary:
    """Complete boundary data on every side, with solve diagnostics."""

    sides: Tuple[SideData, ...]
    diagnostics: SolveDiagnostics = SolveDiagnostics()

    @classmethod
    def from_side_data(cls, data: Sequence[SideData]) -> SolvedBoundary:
        """Wrap known data (for example exact traces) without a solve."""
        return cls(tuple(data))

    def to_json(self) -> Dict[str, Any]:
        """JSON-ready dictionary of the per-side data and diagnostics."""
        return {
            "sides": [{"q": d.q.to_json(), "dq": d.dq.to_json()} for d in self.sides],
            "diagnostics": self.diagnostics.to_json(),
        }

    @classmethod
    def from_json(cls, polygon: Polygon, data: Dict[str, Any]) -> SolvedBoundary:
        """Rebuild from `to_json` output for the given polygon."""
        entries = data["sides"]
        if len(entries) != polygon.n:
            raise ValueError(f"expected {polygon.n} sides, got {len(entries)}")
        sides = tuple(
            SideData(
                side,
                BoundaryDatum.from_json(entry["q"]),
                BoundaryDatum.from_json(entry["dq"]),
            )
            for side, entry in zip(polygon.sides, entries)
        )
        diagnostics = SolveDiagnostics(**data.get("diagnostics", {}))
        return cls(sides, diagnostics)


def _assemble(
    polygon: Polygon,
    beta: float,
    bc: BoundaryConditionSpec,
    config: CollocationConfig,
    lam: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    N = config.modes_per_side
    known = [
        SideData(side, *sc.condition.known_data(sc.given))
        for side, sc in zip(polygon.sides, bc.sides)
    ]
    known_values, known_scales = _rho_table(known, lam, beta)

    columns = []
    column_scales = []
    for side, sc in zip(polygon.sides, bc.sides):
        a, mu = kernel_exponent(side, lam, beta)
        factor = sc.condition.unknown_factor(robin_factor(side, lam, beta))
        prefactor = 1j * side.length * np.exp(1j * a.imag) * factor
        columns.append(prefactor[:, None] * legendre_exponential_moments(mu, N))
        column_scales.append(a.real + np.maximum(mu.real, 0.0))

    if config.normalize_rows:
        row_scale = np.max(
            [log_rho_envelope(side, lam, beta, 1) for side in polygon.sides], axis=0
        )
    else:
        row_scale = np.zeros(lam.shape)

    matrix = np.hstack(
        [c * np.exp(s - row_scale)[:, None] for c, s in zip(columns, column_scales)]
    )
    rhs = -np.sum(known_values * np.exp(known_scales - row_scale), axis=0)
    return matrix, rhs


def solve_dn_map(
    polygon: Polygon,
    beta: float,
    bc: BoundaryConditionSpec,
    config: Optional[CollocationConfig] = None,
) -> SolvedBoundary:
    """
    Recover the unknown boundary datum on every side from the global relation.

    Parameters
    ----------
    polygon
        The domain.
    beta
        PDE parameter.
    bc
        One boundary condition with its given datum per side.
    config
        Discretization settings; defaults to CollocationConfig().

    Returns
    -------
    SolvedBoundary
        (q, dq) on every side and solve diagnostics.

    Raises
    ------
    RankDeficient
        If the numerical rank is short and config.rank_policy is "raise".
    NonConvergence
        If the validation residual exceeds config.validation_tol.
    """
    config = CollocationConfig() if config is None else config
    if len(bc) != polygon.n:
        raise ValueError(f"expected {polygon.n} boundary conditions, got {len(bc)}")
    N = config.modes_per_side
    lam = collocation_set(polygon, beta, config)
    matrix, rhs = _assemble(polygon, beta, bc, config, lam)

    real_matrix = np.block([[matrix.real, -matrix.imag], [matrix.imag, matrix.real]])
    real_rhs = np.concatenate([rhs.real, rhs.imag])
    rows, cols = real_matrix.shape
    if rows < cols:
        raise ValueError(f"collocation gives {rows} rows for {cols} unknowns")

    norms = np.linalg.norm(real_matrix, axis=0)
    norms[norms == 0] = 1.0
    solution, _, rank, singular_values = scipy.linalg.lstsq(
        real_matrix / norms, real_rhs, cond=config.rank_tol, lapack_driver="gelsd"
    )
    solution = solution / norms
    condition = (
        float(singular_values[0] / singular_values[rank - 1]) if rank > 0 else math.inf
    )
    if rank < cols:
        message = f"collocation matrix has numerical rank {rank} < {cols}"
        if config.rank_policy == "raise":
            raise RankDeficient(message)
        logger.warning("%s; using the minimum-norm solution", message)

    rhs_norm = np.linalg.norm(real_rhs)
    lsq_residual = (
        float(np.linalg.norm(real_matrix @ solution - real_rhs) / rhs_norm)
        if rhs_norm > 0
        else 0.0
    )

    half = cols // 2
    coefficients = solution[:half] + 1j * solution[half:]
    sides = []
    for i, (side, sc) in enumerate(zip(polygon.sides, bc.sides)):
        unknown = BoundaryDatum.from_legendre(coefficients[i * N : (i + 1) * N])
        q, dq = sc.condition.complete(sc.given, unknown)
        sides.append(SideData(side, q, dq))

    check = validation_set(polygon, beta, config)
    residual_max = float(np.max(normalized_residual(polygon, beta, sides, check)))
    diagnostics = SolveDiagnostics(
        residual_max=residual_max,
        lsq_residual=lsq_residual,
        condition=condition,
        rank=int(rank),
        rows=rows,
        cols=cols,
    )
    logger.info(
        "solved %d unknowns from %d rows: rank %d, condition %.3g, residual %.3g",
        cols,
        rows,
        rank,
        condition,
        residual_max,
    )
    if residual_max > config.validation_tol:
        raise NonConvergence(
            f"validation residual {residual_max:.3g} "
            f"exceeds {config.validation_tol:.3g}"
        )
    return SolvedBoundary(tuple(sides), diagnostics)
