import math
from itertools import combinations

import numpy as np
import pytest

from liftfunnel.core.errors import DimensionMismatch, InvalidBound
from liftfunnel.core.measures import validate_joint
from liftfunnel.core.polytope import build_polytope, contains, enumerate_vertices
from tests.conftest import random_joint


@pytest.fixture
def segment_joint():
    """P_X = [1/3, 2/3] with lift rows [2, 0.5] and [1/3, 4/3]"""
    return validate_joint([[0.8 / 3, 0.4 / 3], [0.2 / 3, 1.6 / 3]])


def oracle_vertices(poly):
    """Active-set enumeration, one system at a time, with rank and feasibility re-checked"""
    n = poly.dimension
    g, h = poly.inequalities()
    found = []
    for active in combinations(range(g.shape[0]), n - 1):
        system = np.vstack([np.ones(n), g[list(active)]])
        if np.linalg.matrix_rank(system) < n:
            continue
        point = np.linalg.solve(system, np.concatenate([[1.0], h[list(active)]]))
        if np.any(g @ point > h + 1e-9):
            continue
        tight = np.flatnonzero(np.abs(g @ point - h) <= 1e-9)
        if np.linalg.matrix_rank(np.vstack([np.ones(n), g[tight]])) < n:
            continue
        if not any(np.max(np.abs(point - v)) <= 1e-6 for v in found):
            found.append(point)
    return found


def assert_same_points(actual, expected, tol=1e-6):
    assert len(actual) == len(expected)
    for point in expected:
        assert min(np.max(np.abs(point - v)) for v in actual) <= tol
    for point in actual:
        assert min(np.max(np.abs(point - v)) for v in expected) <= tol


class TestBuildPolytope:
    def test_example1_rows(self, ex1_joint):
        poly = build_polytope(ex1_joint, math.exp(0.05))
        assert poly.lift_rows.shape == (2, 2)
        assert poly.dimension == 2

    def test_rows_average_to_one(self, small_joint):
        poly = build_polytope(small_joint, 1.5)
        np.testing.assert_allclose(poly.lift_rows @ small_joint.p_x, 1.0, atol=1e-9)
        assert np.all(poly.lift_rows >= 0)

    @pytest.mark.parametrize("bound", [1.0, 0.5, -2.0])
    def test_invalid_bound(self, small_joint, bound):
        with pytest.raises(InvalidBound):
            build_polytope(small_joint, bound)


class TestEnumerateVertices:
    def test_loose_bound_gives_simplex(self, small_joint):
        bound = small_joint.lift_matrix.max() + 0.1
        vertex_set = enumerate_vertices(build_polytope(small_joint, bound))
        np.testing.assert_allclose(vertex_set.vertices, np.eye(4)[::-1], atol=1e-12)

    def test_independent_joint_gives_simplex(self, uniform_joint):
        vertex_set = enumerate_vertices(build_polytope(uniform_joint, 1.01))
        np.testing.assert_allclose(vertex_set.vertices, [[0.0, 1.0], [1.0, 0.0]], atol=1e-12)

    def test_segment_cut_by_one_row(self, segment_joint):
        beta = 1.5
        vertex_set = enumerate_vertices(build_polytope(segment_joint, beta))
        cut = (beta - 0.5) / 1.5
        np.testing.assert_allclose(vertex_set.vertices, [[0.0, 1.0], [cut, 1.0 - cut]], atol=1e-12)

    def test_segment_uncut_above_two(self, segment_joint):
        vertex_set = enumerate_vertices(build_polytope(segment_joint, 2.5))
        np.testing.assert_allclose(vertex_set.vertices, [[0.0, 1.0], [1.0, 0.0]], atol=1e-12)

    def test_example1_matches_grid_oracle(self, ex1_joint):
        poly = build_polytope(ex1_joint, math.exp(0.01))
        grid = np.linspace(0.0, 1.0, 1_000_001)
        points = np.column_stack([grid, 1.0 - grid])
        feasible = grid[np.all(points @ poly.lift_rows.T <= poly.bound, axis=1)]
        expected = [np.array([feasible.min(), 1 - feasible.min()]), np.array([feasible.max(), 1 - feasible.max()])]
        vertex_set = enumerate_vertices(poly)
        assert len(vertex_set) == 2
        assert_same_points(list(vertex_set.vertices), expected, tol=2e-6)

    def test_sorted_and_distinct(self, small_joint):
        vertices = enumerate_vertices(build_polytope(small_joint, 1.2)).vertices
        for a, b in zip(vertices[:-1], vertices[1:]):
            assert tuple(a) < tuple(b)
            assert np.max(np.abs(a - b)) > 1e-7

    def test_active_sets_have_full_rank(self, small_joint):
        poly = build_polytope(small_joint, 1.2)
        g, _ = poly.inequalities()
        vertex_set = enumerate_vertices(poly)
        for active in vertex_set.active_sets:
            assert len(active) >= poly.dimension - 1
            system = np.vstack([np.ones(poly.dimension), g[list(active)]])
            assert np.linalg.matrix_rank(system) == poly.dimension

    def test_matches_oracle_on_random_instances(self, rng):
        for _ in range(50):
            joint = random_joint(rng, int(rng.integers(2, 4)), int(rng.integers(2, 5)))
            poly = build_polytope(joint, float(rng.uniform(1.0, 3.0)) + 1e-6)
            vertex_set = enumerate_vertices(poly)
            assert_same_points(list(vertex_set.vertices), oracle_vertices(poly))

    def test_soundness(self, rng):
        for _ in range(20):
            joint = random_joint(rng, 4, 7)
            poly = build_polytope(joint, float(rng.uniform(1.01, 1.5)))
            assert all(contains(poly, v) for v in enumerate_vertices(poly).vertices)

    def test_monotone_in_bound(self, rng):
        for _ in range(20):
            joint = random_joint(rng, 3, 5)
            low, high = sorted(rng.uniform(1.01, 2.0, size=2))
            looser = build_polytope(joint, high)
            for vertex in enumerate_vertices(build_polytope(joint, low)).vertices:
                assert contains(looser, vertex)


class TestContains:
    def test_prior(self, small_joint):
        assert contains(build_polytope(small_joint, 1.0001), small_joint.p_x)

    def test_point_mass_above_bound(self, small_joint):
        lifts = small_joint.lift_matrix
        x = int(np.argmax(lifts.max(axis=0)))
        poly = build_polytope(small_joint, lifts[:, x].max() - 0.01)
        assert not contains(poly, np.eye(4)[x])

    def test_dimension_mismatch(self, small_joint):
        with pytest.raises(DimensionMismatch):
            contains(build_polytope(small_joint, 1.5), [0.5, 0.5])
