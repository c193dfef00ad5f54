"""Interface for the polyspectral package."""

import polyspectral.overloads.boundary_datum  # noqa: F401
import polyspectral.overloads.point_mass  # noqa: F401
import polyspectral.overloads.smooth  # noqa: F401
from polyspectral.boundary_data import (
    BoundaryDatum,
    DiracCharge,
    PointMassDatum,
    SmoothDatum,
    TestFunction,
    fourier,
    project_function,
)
from polyspectral.conditions import (
    DIRICHLET,
    NEUMANN,
    BoundaryCondition,
    BoundaryConditionSpec,
    Robin,
    SideCondition,
)
from polyspectral.corner_analysis import (
    DIRICHLET_DIRICHLET,
    DIRICHLET_DIRICHLET_JUMP,
    DIRICHLET_NEUMANN,
    NEUMANN_NEUMANN,
    CornerAngle,
    CornerCase,
    classify,
    corner_case,
)
from polyspectral.evaluator import evaluate, evaluate_grid, evaluate_many, trace_pairing
from polyspectral.generics import pair, pair_exponential
from polyspectral.geometry import (
    GaugeMode,
    Polygon,
    Side,
    SimilarityGauge,
    build_polygon,
    gauge_align,
)
from polyspectral.global_relation import (
    CollocationConfig,
    SolvedBoundary,
    normalized_residual,
    residual,
    solve_dn_map,
    vertex_null_direction,
)
from polyspectral.halfstrip import HalfStripParams, q_halfstrip, verification_report
from polyspectral.regularity import (
    aligned_rho_decomposition,
    k_of_lambda,
    lambda_of_k,
    sobolev_norm,
    triple_decay_fit,
)
from polyspectral.spectral import (
    ExponentialSolution,
    SideData,
    SpectralParams,
    exact_solution_traces,
    rho,
)

__all__ = [
    # Geometry
    "GaugeMode",
    "Polygon",
    "Side",
    "SimilarityGauge",
    "build_polygon",
    "gauge_align",
    # Boundary data
    "BoundaryDatum",
    "DiracCharge",
    "PointMassDatum",
    "SmoothDatum",
    "TestFunction",
    "fourier",
    "project_function",
    # Generic pairings
    "pair",
    "pair_exponential",
    # Boundary conditions
    "DIRICHLET",
    "NEUMANN",
    "BoundaryCondition",
    "BoundaryConditionSpec",
    "Robin",
    "SideCondition",
    # Spectral functions and the exact solution family
    "ExponentialSolution",
    "SideData",
    "SpectralParams",
    "exact_solution_traces",
    "rho",
    # Global relation
    "CollocationConfig",
    "SolvedBoundary",
    "normalized_residual",
    "residual",
    "solve_dn_map",
    "vertex_null_direction",
    # Interior evaluation
    "evaluate",
    "evaluate_grid",
    "evaluate_many",
    "trace_pairing",
    # Corners
    "CornerAngle",
    "CornerCase",
    "DIRICHLET_DIRICHLET",
    "DIRICHLET_DIRICHLET_JUMP",
    "DIRICHLET_NEUMANN",
    "NEUMANN_NEUMANN",
    "classify",
    "corner_case",
    # Half-strip
    "HalfStripParams",
    "q_halfstrip",
    "verification_report",
    # Regularity
    "aligned_rho_decomposition",
    "k_of_lambda",
    "lambda_of_k",
    "sobolev_norm",
    "triple_decay_fit",
]
