"""Tests for the global relation and the Dirichlet-Neumann map."""

import json
import math
import unittest
from typing import List

import numpy as np

from polyspectral.boundary_data import BoundaryDatum
from polyspectral.conditions import (
    DIRICHLET,
    NEUMANN,
    BoundaryConditionSpec,
    Robin,
    SideCondition,
)
from polyspectral.errors import NonConvergence, RankDeficient
from polyspectral.geometry import Polygon, SimilarityGauge, build_polygon
from polyspectral.global_relation import (
    CollocationConfig,
    SolvedBoundary,
    collocation_set,
    normalized_residual,
    residual,
    solve_dn_map,
    validation_set,
    vertex_null_direction,
)
from polyspectral.spectral import SideData, exact_solution_traces, rho

SQUARE = build_polygon([(0, 0), (1, 0), (1, 1), (0, 1)])

TRIANGLE = build_polygon([(0, 0), (2, 0), (1, 2)])

RECTANGLE = build_polygon([(0, 0), (2, 0), (2, 1), (0, 1)])

#: Parameters of the exact solutions exp(i mu z - i beta**2 conj(z) / mu).
MUS = [1.3, 2.1, 1.7 + 0.3j]


def exact_data(polygon: Polygon, mu: complex, beta: float = 1.0) -> List[SideData]:
    """Exact traces of an exponential solution on every side."""
    return [exact_solution_traces(mu, side, beta, 20) for side in polygon.sides]


def relative_error(actual: BoundaryDatum, expected: BoundaryDatum) -> float:
    """Relative L2 distance between the smooth parts of two data."""
    return (actual - expected).smooth.l2_norm() / expected.smooth.l2_norm()


class TestResidual(unittest.TestCase):
    """Tests for the global relation residual."""

    def test_zero_data(self) -> None:
        data = [SideData(side) for side in SQUARE.sides]
        self.assertEqual(residual(SQUARE, 1.0, data, 0.5 + 0.5j), 0)
        np.testing.assert_array_equal(
            normalized_residual(SQUARE, 1.0, data, np.array([2.0])), [0.0]
        )

    def test_exact_solutions(self) -> None:
        config = CollocationConfig()
        for polygon in [SQUARE, TRIANGLE]:
            lam = collocation_set(polygon, 1.0, config)
            for mu in MUS:
                with self.subTest(polygon=polygon, mu=mu):
                    data = exact_data(polygon, mu)
                    errors = normalized_residual(polygon, 1.0, data, lam)
                    self.assertLessEqual(np.max(errors), 1e-9)

    def test_exact_solution_off_rays(self) -> None:
        data = exact_data(SQUARE, 1.7 + 0.3j)
        lam = np.array([0.3 + 0.4j, -1.5 + 0.1j, 2.5 - 2.5j, -0.2 - 0.9j])
        self.assertLessEqual(np.max(normalized_residual(SQUARE, 1.0, data, lam)), 1e-9)

    def test_linearity(self) -> None:
        first = exact_data(TRIANGLE, 1.3)
        second = exact_data(TRIANGLE, 2.1)
        lam = np.array([0.4 + 1.0j, 3.0, -0.7j])
        total = [a + 2.0 * b for a, b in zip(first, second)]
        combined = residual(TRIANGLE, 1.0, total, lam)
        separate = residual(TRIANGLE, 1.0, first, lam)
        separate += 2.0 * residual(TRIANGLE, 1.0, second, lam)
        np.testing.assert_allclose(combined, separate, atol=1e-12)

    def test_wrong_side_count(self) -> None:
        with self.assertRaises(ValueError):
            residual(SQUARE, 1.0, exact_data(TRIANGLE, 1.3), 1.0)


class TestVertexNullDirection(unittest.TestCase):
    """Tests for vertex_null_direction."""

    def test_amplitudes(self) -> None:
        # Triples (polygon, vertex, expected amplitude on the next side)
        cases = [
            (SQUARE, 0, -1.0),
            (RECTANGLE, 0, -2.0),
            (RECTANGLE, 1, -0.5),
            (SQUARE, 3, -1.0),
        ]
        for polygon, i, expected in cases:
            with self.subTest(polygon=polygon, vertex=i):
                perturbation = vertex_null_direction(polygon, i, 1.0)
                j = (i + 1) % polygon.n
                (charge,) = perturbation[j].dq.masses.charges
                self.assertEqual(charge.endpoint, 0)
                self.assertAlmostEqual(charge.weight, expected, places=15)
                others = [d for k, d in enumerate(perturbation) if k not in (i, j)]
                self.assertTrue(all(d.is_zero for d in others))

    def test_residual_unchanged(self) -> None:
        beta = 1.0
        for polygon in [SQUARE, TRIANGLE, RECTANGLE]:
            rays = np.exp(-1j * np.array(polygon.alphas))
            lam = np.multiply.outer(rays, beta * np.exp([-2.0, 2.0])).ravel()
            for i in range(polygon.n):
                with self.subTest(polygon=polygon, vertex=i):
                    perturbation = vertex_null_direction(polygon, i, 1.0)
                    scale = np.abs(rho(perturbation[i], lam, beta))
                    change = np.abs(residual(polygon, beta, perturbation, lam))
                    self.assertTrue(np.all(change <= 1e-13 * scale))


class TestCollocation(unittest.TestCase):
    """Tests for the collocation and validation sets."""

    def test_square(self) -> None:
        config = CollocationConfig(points_per_ray=3, ray_halfwidth=1.0)
        lam = collocation_set(SQUARE, 2.0, config)
        self.assertEqual(lam.size, 12)
        radii = sorted(set(np.round(np.abs(lam), 12)))
        np.testing.assert_allclose(radii, 2.0 * np.exp([-1.0, 0.0, 1.0]), rtol=1e-12)

    def test_parallel_sides_merge(self) -> None:
        config = CollocationConfig(points_per_ray=5, include_continuation_rays=True)
        self.assertEqual(collocation_set(SQUARE, 1.0, config).size, 20)
        # A triangle has no parallel sides, so the continuation rays are new.
        self.assertEqual(collocation_set(TRIANGLE, 1.0, config).size, 30)

    def test_radii_symmetric(self) -> None:
        beta = 1.5
        lam = collocation_set(TRIANGLE, beta, CollocationConfig())
        s = np.sort(np.log(np.abs(lam) / beta))
        np.testing.assert_allclose(s, -s[::-1], atol=1e-12)

    def test_validation_set(self) -> None:
        config = CollocationConfig(points_per_ray=4, ray_halfwidth=3.0)
        check = validation_set(SQUARE, 1.0, config)
        self.assertEqual(check.size, 12)
        s = np.sort(np.unique(np.round(np.log(np.abs(check)), 12)))
        np.testing.assert_allclose(s, [-2.0, 0.0, 2.0], atol=1e-12)


class TestCollocationConfig(unittest.TestCase):
    """Tests for CollocationConfig."""

    def test_refuses_vertex_unknowns(self) -> None:
        with self.assertRaises(ValueError):
            CollocationConfig(vertex_delta_unknowns=True)

    def test_invalid_settings(self) -> None:
        # Keyword arguments giving an invalid configuration
        cases = [
            {"modes_per_side": 0},
            {"points_per_ray": 1},
            {"ray_halfwidth": 0.0},
            {"rank_policy": "guess"},
        ]
        for kwargs in cases:
            with self.subTest(kwargs=kwargs):
                with self.assertRaises(ValueError):
                    CollocationConfig(**kwargs)

    def test_from_json(self) -> None:
        config = CollocationConfig.from_json(
            {"modes": 8, "rays": 12, "rank_tol": 1e-10}
        )
        self.assertEqual(config.modes_per_side, 8)
        self.assertEqual(config.points_per_ray, 12)
        self.assertEqual(config.rank_tol, 1e-10)
        with self.assertRaises(ValueError):
            CollocationConfig.from_json({"modez": 8})


class TestSolveDnMap(unittest.TestCase):
    """Tests for solve_dn_map."""

    def dirichlet_problem(self, polygon: Polygon, mu: complex) -> BoundaryConditionSpec:
        return BoundaryConditionSpec.of(
            SideCondition(DIRICHLET, d.q) for d in exact_data(polygon, mu)
        )

    def test_dirichlet_to_neumann(self) -> None:
        for mu in MUS:
            with self.subTest(mu=mu):
                exact = exact_data(SQUARE, mu)
                solved = solve_dn_map(SQUARE, 1.0, self.dirichlet_problem(SQUARE, mu))
                for recovered, expected in zip(solved.sides, exact):
                    error = relative_error(recovered.dq, expected.dq)
                    self.assertLessEqual(error, 1e-6)
                    self.assertEqual(recovered.q, expected.q)
                self.assertLessEqual(solved.diagnostics.lsq_residual, 1e-8)

    def test_triangle(self) -> None:
        exact = exact_data(TRIANGLE, 1.3)
        solved = solve_dn_map(TRIANGLE, 1.0, self.dirichlet_problem(TRIANGLE, 1.3))
        for recovered, expected in zip(solved.sides, exact):
            self.assertLessEqual(relative_error(recovered.dq, expected.dq), 1e-6)

    def test_neumann_to_dirichlet(self) -> None:
        exact = exact_data(SQUARE, 1.3)
        bc = BoundaryConditionSpec.of(SideCondition(NEUMANN, d.dq) for d in exact)
        solved = solve_dn_map(SQUARE, 1.0, bc)
        for recovered, expected in zip(solved.sides, exact):
            self.assertLessEqual(relative_error(recovered.q, expected.q), 1e-6)

    def test_robin(self) -> None:
        exact = exact_data(SQUARE, 1.3)
        bc = BoundaryConditionSpec.of(
            SideCondition(Robin(1.0), d.dq + d.q) for d in exact
        )
        solved = solve_dn_map(SQUARE, 1.0, bc)
        for recovered, expected in zip(solved.sides, exact):
            self.assertLessEqual(relative_error(recovered.q, expected.q), 1e-5)
            self.assertLessEqual(relative_error(recovered.dq, expected.dq), 1e-5)

    def test_mixed_conditions(self) -> None:
        exact = exact_data(SQUARE, 2.1)
        conditions = [DIRICHLET, NEUMANN, DIRICHLET, Robin(0.5)]
        robin = exact[3].dq + exact[3].q.scaled(0.5)
        given = [exact[0].q, exact[1].dq, exact[2].q, robin]
        bc = BoundaryConditionSpec.of(map(SideCondition, conditions, given))
        solved = solve_dn_map(SQUARE, 1.0, bc)
        for recovered, expected in zip(solved.sides, exact):
            self.assertLessEqual(relative_error(recovered.q, expected.q), 1e-5)
            self.assertLessEqual(relative_error(recovered.dq, expected.dq), 1e-5)

    def test_zero_data(self) -> None:
        bc = BoundaryConditionSpec.of(
            SideCondition(DIRICHLET, BoundaryDatum.zero()) for _ in range(SQUARE.n)
        )
        solved = solve_dn_map(SQUARE, 1.0, bc)
        for data in solved.sides:
            self.assertTrue(data.is_zero)
        self.assertEqual(solved.diagnostics.residual_max, 0.0)
        self.assertEqual(solved.diagnostics.lsq_residual, 0.0)

    def test_doubling_rows(self) -> None:
        bc = self.dirichlet_problem(SQUARE, 1.7 + 0.3j)
        coarse = solve_dn_map(SQUARE, 1.0, bc)
        fine = solve_dn_map(SQUARE, 1.0, bc, CollocationConfig(points_per_ray=48))
        for a, b in zip(coarse.sides, fine.sides):
            norm_a = a.dq.smooth.l2_norm()
            norm_b = b.dq.smooth.l2_norm()
            self.assertLessEqual(abs(norm_a - norm_b), 1e-6 * norm_b)

    def test_null_direction_does_not_change_answer(self) -> None:
        exact = exact_data(SQUARE, 1.3)
        plain = BoundaryConditionSpec.of(SideCondition(NEUMANN, d.dq) for d in exact)
        baseline = solve_dn_map(SQUARE, 1.0, plain)
        tau = np.array([0.25, 0.5, 0.75])
        for i in range(SQUARE.n):
            with self.subTest(vertex=i):
                perturbation = vertex_null_direction(SQUARE, i, 0.7 - 0.2j)
                bc = BoundaryConditionSpec.of(
                    SideCondition(NEUMANN, d.dq + p.dq)
                    for d, p in zip(exact, perturbation)
                )
                solved = solve_dn_map(SQUARE, 1.0, bc)
                for a, b in zip(solved.sides, baseline.sides):
                    change = np.abs(a.q.smooth(tau) - b.q.smooth(tau))
                    self.assertLessEqual(np.max(change), 1e-8)

    def test_gauge_invariance(self) -> None:
        gauge = SimilarityGauge(theta=0.6, translation=0.3 - 0.2j, scale=1.0)
        moved = gauge.apply_polygon(SQUARE)
        bc = self.dirichlet_problem(SQUARE, 2.1)
        original = solve_dn_map(SQUARE, 1.0, bc)
        rotated = solve_dn_map(moved, 1.0, bc)
        tau = np.linspace(0.05, 0.95, 7)
        for a, b in zip(original.sides, rotated.sides):
            change = np.abs(a.dq.smooth(tau) - b.dq.smooth(tau))
            self.assertLessEqual(np.max(change), 1e-8)

    def test_rank_policy(self) -> None:
        bc = self.dirichlet_problem(SQUARE, 1.3)
        strict = CollocationConfig(rank_tol=0.5, rank_policy="raise")
        with self.assertRaises(RankDeficient):
            solve_dn_map(SQUARE, 1.0, bc, strict)
        lenient = CollocationConfig(rank_tol=0.5, validation_tol=math.inf)
        with self.assertLogs("polyspectral.global_relation", "WARNING"):
            solved = solve_dn_map(SQUARE, 1.0, bc, lenient)
        self.assertLess(solved.diagnostics.rank, solved.diagnostics.cols)

    def test_nonconvergence(self) -> None:
        bc = self.dirichlet_problem(SQUARE, 2.1)
        config = CollocationConfig(modes_per_side=1, validation_tol=1e-12)
        with self.assertRaises(NonConvergence):
            solve_dn_map(SQUARE, 1.0, bc, config)

    def test_wrong_condition_count(self) -> None:
        with self.assertRaises(ValueError):
            solve_dn_map(TRIANGLE, 1.0, self.dirichlet_problem(SQUARE, 1.3))

    def test_json_round_trip(self) -> None:
        solved = solve_dn_map(SQUARE, 1.0, self.dirichlet_problem(SQUARE, 1.3))
        text = json.dumps(solved.to_json())
        self.assertEqual(SolvedBoundary.from_json(SQUARE, json.loads(text)), solved)
        with self.assertRaises(ValueError):
            SolvedBoundary.from_json(TRIANGLE, json.loads(text))


if __name__ == "__main__":
    unittest.main()
