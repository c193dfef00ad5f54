"""
Command-line front end.

Subcommands read JSON problem or solution files and write JSON reports or
CSV grids. Exit codes: 0 success, 1 bad input or usage, 2 rank-deficient
collocation, 3 numerical non-convergence.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import pathlib
import sys
from typing import Any, Callable, Dict, NoReturn, Optional, Sequence, TextIO, Tuple

import numpy as np

from polyspectral import evaluator, halfstrip
from polyspectral.conditions import BoundaryConditionSpec, SideCondition
from polyspectral.corner_analysis import classify, corner_case
from polyspectral.errors import NonConvergence, ProblemFileError, RankDeficient
from polyspectral.geometry import GaugeMode, Polygon, gauge_align
from polyspectral.global_relation import (
    CollocationConfig,
    SolvedBoundary,
    collocation_set,
    normalized_residual,
    solve_dn_map,
)

logger = logging.getLogger(__name__)

#: Exit code for malformed input and usage errors.
EXIT_BAD_INPUT = 1

#: Exit code when the collocation matrix is rank deficient.
EXIT_RANK_DEFICIENT = 2

#: Exit code when a solve or check misses its tolerance.
EXIT_NONCONVERGENCE = 3


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> NoReturn:
        self.print_usage(sys.stderr)
        raise _UsageError(f"{self.prog}: error: {message}")


@dataclasses.dataclass(frozen=True)
class Problem:
    """Contents of a problem file."""

    polygon: Polygon
    beta: float
    bc: BoundaryConditionSpec
    config: CollocationConfig


def _read_json(path: str) -> Dict[str, Any]:
    try:
        with open(path, encoding="utf-8") as f:
            data = json.load(f)
    except json.JSONDecodeError as exc:
        raise ProblemFileError(f"{path}: invalid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ProblemFileError(f"{path}: expected a JSON object")
    return data


def _geometry(data: Dict[str, Any], path: str) -> Tuple[Polygon, float]:
    try:
        polygon = Polygon.from_json(data)
        beta = float(data["beta"])
    except KeyError as exc:
        raise ProblemFileError(f"{path}: missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"{path}: {exc}") from exc
    if not beta > 0.0:
        raise ProblemFileError(f"{path}: beta must be positive, got {beta}")
    return polygon, beta


def load_problem(path: str) -> Problem:
    """
    Read and validate a problem file.

    The file holds "vertices" ([x, y] pairs, counterclockwise), "beta",
    "sides" (one {"kind", "gamma"?, "data"} entry per side) and an optional
    "solver" block of CollocationConfig settings.

    Raises
    ------
    ProblemFileError
        If the file is not valid JSON or fails validation.
    """
    data = _read_json(path)
    polygon, beta = _geometry(data, path)
    try:
        sides = data["sides"]
        if len(sides) != polygon.n:
            raise ProblemFileError(
                f"{path}: {len(sides)} side conditions for {polygon.n} vertices"
            )
        bc = BoundaryConditionSpec.of(SideCondition.from_json(entry) for entry in sides)
        config = CollocationConfig.from_json(data.get("solver", {}))
    except ProblemFileError:
        raise
    except KeyError as exc:
        raise ProblemFileError(f"{path}: missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"{path}: {exc}") from exc
    return Problem(polygon, beta, bc, config)


def load_solution(path: str) -> Tuple[Polygon, float, SolvedBoundary]:
    """Read a solution file written by the solve subcommand."""
    data = _read_json(path)
    polygon, beta = _geometry(data, path)
    try:
        solved = SolvedBoundary.from_json(polygon, data)
    except KeyError as exc:
        raise ProblemFileError(f"{path}: missing field {exc}") from exc
    except (TypeError, ValueError) as exc:
        raise ProblemFileError(f"{path}: {exc}") from exc
    return polygon, beta, solved


def dump_json(data: Any, stream: TextIO) -> None:
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    stream.write(json.dumps(data, sort_keys=True, indent=2, allow_nan=False))
    stream.write("\n")


def _finite(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


def _emit(data: Dict[str, Any], out: Optional[str]) -> None:
    if out is None:
        dump_json(data, sys.stdout)
    else:
        with open(out, "w", encoding="utf-8") as f:
            dump_json(data, f)


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0.0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return value


def _solver_config(
    config: CollocationConfig, args: argparse.Namespace
) -> CollocationConfig:
    changes: Dict[str, Any] = {}
    if getattr(args, "modes", None) is not None:
        changes["modes_per_side"] = args.modes
    if getattr(args, "rays", None) is not None:
        changes["points_per_ray"] = args.rays
    if args.tol is not None:
        changes["validation_tol"] = args.tol
    return dataclasses.replace(config, **changes)


def cmd_solve(args: argparse.Namespace) -> int:
    """Solve the Dirichlet-Neumann map; write solution.json and diagnostics.json."""
    problem = load_problem(args.problem)
    config = _solver_config(problem.config, args)
    solved = solve_dn_map(problem.polygon, problem.beta, problem.bc, config)

    out = pathlib.Path(args.out or ".")
    out.mkdir(parents=True, exist_ok=True)
    solution = {**problem.polygon.to_json(), "beta": problem.beta, **solved.to_json()}
    solution["diagnostics"]["condition"] = _finite(solved.diagnostics.condition)
    with open(out / "solution.json", "w", encoding="utf-8") as f:
        dump_json(solution, f)
    diagnostics = {
        **solved.diagnostics.to_json(),
        "condition": _finite(solved.diagnostics.condition),
        "tol_requested": config.validation_tol,
        "tol_achieved": solved.diagnostics.residual_max,
    }
    with open(out / "diagnostics.json", "w", encoding="utf-8") as f:
        dump_json(diagnostics, f)
    logger.info("wrote %s and %s", out / "solution.json", out / "diagnostics.json")
    return 0


def cmd_eval_grid(args: argparse.Namespace) -> int:
    """Evaluate a solution on an interior grid and write x,y,re,im rows."""
    polygon, beta, solved = load_solution(args.solution)
    tol = evaluator.DEFAULT_TOL if args.tol is None else args.tol
    field = evaluator.evaluate_grid(
        polygon, beta, solved, args.nx, args.ny, args.margin, tol
    )
    if args.out is None:
        field.write_csv(sys.stdout)
    else:
        with open(args.out, "w", encoding="utf-8", newline="") as f:
            field.write_csv(f)
    report = {
        "points": len(field.points),
        "polygon": field.polygon,
        "tol_requested": tol,
        "tol_achieved": field.achieved,
    }
    if args.report is not None:
        _emit(report, args.report)
    logger.info(
        "evaluated %d points; quadrature error %.3g", len(field.points), field.achieved
    )
    return 0


def cmd_residual_scan(args: argparse.Namespace) -> int:
    """Normalized global-relation residual of a solution on the collocation rays."""
    polygon, beta, solved = load_solution(args.solution)
    tol = 1e-9 if args.tol is None else args.tol
    config = CollocationConfig(
        points_per_ray=args.rays,
        ray_halfwidth=args.halfwidth,
        include_continuation_rays=args.continuation,
    )
    lam = collocation_set(polygon, beta, config)
    residuals = normalized_residual(polygon, beta, solved.sides, lam)
    worst = int(np.argmax(residuals))
    report = {
        "points": int(lam.size),
        "residual_max": float(residuals[worst]),
        "worst_lambda": [float(lam[worst].real), float(lam[worst].imag)],
        "tol_requested": tol,
        "tol_achieved": float(residuals[worst]),
        "passed": bool(residuals[worst] <= tol),
    }
    _emit(report, args.out)
    return 0 if report["passed"] else EXIT_NONCONVERGENCE


def cmd_corner(args: argparse.Namespace) -> int:
    """Exponent ladder and classification of one corner."""
    report = classify(corner_case(args.case), args.delta, args.m_max).to_json()
    # Ladders come from closed-form rational multiples of pi / delta.
    report["tol_requested"] = args.tol
    report["tol_achieved"] = 0.0
    _emit(report, args.out)
    return 0


def cmd_halfstrip(args: argparse.Namespace) -> int:
    """Half-strip verification report, optionally with a field CSV."""
    params = halfstrip.HalfStripParams(beta=args.beta, ell=args.ell)
    tol = halfstrip.DEFAULT_TOL if args.tol is None else args.tol
    report = halfstrip.verification_report(params, tol)
    report["tol_requested"] = tol
    report["tol_achieved"] = report["imag_max"]
    _emit(report, args.out)
    if args.csv is not None:
        nx, ny = args.grid
        xs = 2.0 * params.ell * (np.arange(nx) + 1.0) / nx
        ys = params.ell * (np.arange(ny) + 0.5) / ny
        points = [complex(x, y) for y in ys for x in xs]
        values = [
            halfstrip.halfstrip_field(z.real, z.imag, params, tol) for z in points
        ]
        field = evaluator.GridField(
            points=tuple(points),
            values=tuple(values),
            beta=params.beta,
            polygon=f"halfstrip(ell={params.ell!r})",
            tol=tol,
            achieved=max(abs(v.imag) for v in values),
        )
        with open(args.csv, "w", encoding="utf-8", newline="") as f:
            field.write_csv(f)
    return 0


def cmd_gauge(args: argparse.Namespace) -> int:
    """Vertices and beta after moving a side or vertex to its reference position."""
    polygon, beta = _geometry(_read_json(args.problem), args.problem)
    if args.mode == "side":
        mode = GaugeMode.SIDE_ON_UNIT_INTERVAL
    else:
        mode = GaugeMode.VERTEX_AT_I
    gauge, image, beta_prime = gauge_align(polygon, args.index, mode, beta)
    back = gauge.inverse()
    round_trip = max(
        abs(back.apply(w) - z) for z, w in zip(polygon.vertices, image.vertices)
    )
    report = {
        **image.to_json(),
        "beta": beta_prime,
        "theta": gauge.theta,
        "translation": [gauge.translation.real, gauge.translation.imag],
        "scale": gauge.scale,
        "tol_requested": args.tol,
        "tol_achieved": round_trip,
    }
    _emit(report, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    """The argument parser, with one subparser per subcommand."""
    common = _Parser(add_help=False)
    common.add_argument(
        "--tol", type=_positive_float, default=None, help="requested tolerance"
    )
    common.add_argument("--out", default=None, help="output file (directory for solve)")
    common.add_argument(
        "-v", "--verbose", action="count", default=0, help="-v for INFO, -vv for DEBUG"
    )

    parser = _Parser(
        prog="polyspectral",
        description=(
            "Modified Helmholtz problems in convex polygons by the unified transform."
        ),
    )
    commands = parser.add_subparsers(dest="name", required=True, parser_class=_Parser)

    solve = commands.add_parser(
        "solve", parents=[common], help="solve for the unknown data"
    )
    solve.add_argument("problem", help="problem JSON file")
    solve.add_argument("--modes", type=_positive_int, help="Legendre modes per side")
    solve.add_argument("--rays", type=_positive_int, help="collocation points per ray")
    solve.set_defaults(command=cmd_solve)

    grid = commands.add_parser("eval-grid", parents=[common], help="evaluate on a grid")
    grid.add_argument("solution", help="solution JSON file")
    grid.add_argument("--nx", type=_positive_int, default=11)
    grid.add_argument("--ny", type=_positive_int, default=11)
    grid.add_argument("--margin", type=_positive_float, default=0.1)
    grid.add_argument("--report", default=None, help="accuracy report JSON file")
    grid.set_defaults(command=cmd_eval_grid)

    scan = commands.add_parser(
        "residual-scan", parents=[common], help="global-relation residual of a solution"
    )
    scan.add_argument("solution", help="solution JSON file")
    scan.add_argument("--rays", type=_positive_int, default=24, help="points per ray")
    scan.add_argument("--halfwidth", type=_positive_float, default=4.0)
    scan.add_argument(
        "--continuation", action="store_true", help="add continuation rays"
    )
    scan.set_defaults(command=cmd_residual_scan)

    corner = commands.add_parser(
        "corner", parents=[common], help="corner exponent ladder"
    )
    corner.add_argument("case", help="NN, DD, DN or DDjump")
    corner.add_argument("delta", type=float, help="interior angle in radians")
    corner.add_argument("--m-max", type=int, default=6)
    corner.set_defaults(command=cmd_corner)

    strip = commands.add_parser("halfstrip", parents=[common], help="half-strip checks")
    strip.add_argument("beta", type=_positive_float)
    strip.add_argument("ell", type=_positive_float)
    strip.add_argument("--csv", default=None, help="field CSV file")
    strip.add_argument(
        "--grid", type=_positive_int, nargs=2, default=(8, 4), metavar=("NX", "NY")
    )
    strip.set_defaults(command=cmd_halfstrip)

    gauge = commands.add_parser(
        "gauge", parents=[common], help="gauge-aligned geometry"
    )
    gauge.add_argument("problem", help="problem or solution JSON file")
    gauge.add_argument("index", type=int, help="side or vertex index")
    gauge.add_argument("--mode", choices=("side", "vertex"), default="side")
    gauge.set_defaults(command=cmd_gauge)
    return parser


def _exit_code(exc: BaseException) -> int:
    if isinstance(exc, RankDeficient):
        return EXIT_RANK_DEFICIENT
    if isinstance(exc, (NonConvergence, ArithmeticError)):
        return EXIT_NONCONVERGENCE
    return EXIT_BAD_INPUT


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Entry point; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_BAD_INPUT
    except SystemExit as exc:
        # --help
        return int(exc.code or 0)

    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s"
    )
    command: Callable[[argparse.Namespace], int] = args.command
    try:
        return command(args)
    except (OSError, ValueError, ArithmeticError) as exc:
        print(f"polyspectral {args.name}: {exc}", file=sys.stderr)
        return _exit_code(exc)


if __name__ == "__main__":
    sys.exit(main())
