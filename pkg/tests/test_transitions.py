import numpy as np
import pytest

from satflow import (
    DemandPath,
    NetworkSpec,
    PreconditionError,
    directional_limits,
    equilibrium_set,
    on_critical_manifold,
    sweep,
    validate,
)
from satflow.equilibria import POINT, SEGMENT

from conftest import C3, C_STAR, COND3, R3, W3


class TestOnCriticalManifold:
    def test_critical_demand(self):
        assert on_critical_manifold(R3, W3, C_STAR)
        assert on_critical_manifold(R3, W3, C3)

    def test_nonzero_sum(self):
        assert not on_critical_manifold(R3, W3, np.array([0.0, -1.0, 0.0]))

    def test_zero_sum_negative_condition(self):
        assert not on_critical_manifold(R3, W3, 10 * C3)

    def test_requires_stochastic_irreducible(self):
        R = np.array([[0.0, 0.5], [0.5, 0.0]])
        with pytest.raises(PreconditionError):
            on_critical_manifold(R, np.ones(2), np.zeros(2))


class TestDemandPath:
    def test_grid_and_interpolation(self):
        path = DemandPath([0.0, -1.0, 0.0], [3.0, -1.0, 6.0], 10)
        assert len(path.grid) == 10
        assert np.allclose(path.c_at(0.5), [1.5, -1.0, 3.0])

    def test_rejects_too_few_samples(self):
        with pytest.raises(ValueError, match="samples"):
            DemandPath([0.0], [1.0], 1)

    def test_rejects_length_mismatch(self):
        with pytest.raises(ValueError):
            DemandPath([0.0, 1.0], [1.0], 5)


class TestSweep:
    def test_reference_path_single_crossing(self):
        # c(a) = [a/3, -1, 2a/3] for a in [0, 9]; critical at a = 1
        path = DemandPath([0.0, -1.0, 0.0], [3.0, -1.0, 6.0], 91)
        result = sweep(R3, W3, path)
        assert len(result.rows) == 91
        assert [row.s for row in result.rows] == sorted(row.s for row in result.rows)
        assert not result.unresolved
        assert len(result.jumps) == 1
        jump = result.jumps[0]
        assert abs(9 * jump["s"] - 1.0) < 1e-6
        assert abs(jump["magnitude"] - COND3) < 1e-6
        assert len(result.critical_points) == 1
        bracket = result.critical_points[0]
        assert bracket["s_lo"] <= jump["s"] <= bracket["s_hi"]

    def test_point_rows_have_tight_min_max(self):
        path = DemandPath([0.0, -1.0, 0.0], [3.0, -1.0, 6.0], 31)
        for row in sweep(R3, W3, path).rows:
            if row.kind == POINT:
                assert np.abs(row.x_max - row.x_min).sum() < 1e-8

    def test_jump_magnitude_equals_condition_value(self):
        path = DemandPath([0.0, -1.0, 0.0], [3.0, -1.0, 6.0], 91)
        result = sweep(R3, W3, path)
        s_star = result.jumps[0]["s"]
        eq = equilibrium_set(NetworkSpec(routing=R3, capacity=W3,
                                         demand=path.c_at(s_star)))
        assert eq.kind == SEGMENT
        assert abs(result.jumps[0]["magnitude"] - eq.condition_value) < 1e-8

    def test_path_without_crossing(self):
        path = DemandPath([0.0, -1.0, 0.0], [0.0, -2.0, 0.0], 11)
        result = sweep(R3, W3, path)
        assert not result.jumps and not result.critical_points
        for row in result.rows:
            assert row.kind == POINT
            assert np.abs(row.x_max - row.x_min).sum() < 1e-8

    def test_constant_critical_path(self):
        path = DemandPath(C_STAR, C_STAR, 5)
        result = sweep(R3, W3, path)
        assert all(row.on_manifold for row in result.rows)
        assert len(result.jumps) == 1
        assert result.jumps[0]["s"] == 0.0
        assert abs(result.jumps[0]["magnitude"] - COND3) < 1e-8

    def test_no_critical_set_for_out_connected_routing(self):
        R = np.array([[0.0, 0.5], [0.5, 0.0]])
        path = DemandPath([-0.5, 0.3], [0.5, 0.3], 9)
        result = sweep(R, np.ones(2), path)
        assert not result.jumps
        assert all(not row.on_manifold for row in result.rows)

    def test_piecewise_linear_between_transitions(self):
        # the equilibrium curve has an active-set breakpoint at a = 31/15
        # (cell 3 reaches capacity); a in [2.2, 8] lies inside one linear
        # piece, so uniform sampling has vanishing second differences
        path = DemandPath([2.2 / 3, -1.0, 4.4 / 3], [8 / 3, -1.0, 16 / 3], 25)
        rows = sweep(R3, W3, path).rows
        xs = np.array([row.x_min for row in rows])
        second = xs[2:] - 2 * xs[1:-1] + xs[:-2]
        assert np.abs(second).sum(axis=1).max() < 1e-6


class TestDirectionalLimits:
    def test_limits_bracket_segment(self):
        eq = equilibrium_set(NetworkSpec(routing=R3, capacity=W3, demand=C_STAR))
        d = np.array([1 / 3, 0.0, 2 / 3])
        lim = directional_limits(R3, W3, C_STAR, d)
        assert np.abs(lim.from_below - eq.x_min).sum() < 1e-2
        assert np.abs(lim.from_above - eq.x_max).sum() < 1e-2
        assert np.all(lim.from_below >= eq.x_min - 1e-2)
        assert np.all(lim.from_above <= eq.x_max + 1e-2)

    def test_uniform_direction_ordering(self):
        lim = directional_limits(R3, W3, C_STAR, np.ones(3))
        assert np.all(lim.from_below <= lim.from_above + 1e-10)

    def test_lower_limits_monotone_in_epsilon(self):
        # x_min(c) is nondecreasing in c, so shrinking the downward offset
        # can only raise the from-below equilibrium
        eps = tuple(1e-2 * 0.5**k for k in range(6))
        lim = directional_limits(R3, W3, C_STAR, np.ones(3), epsilons=eps)
        below = np.array([row[1] for row in lim.table])
        assert np.all(np.diff(below, axis=0) >= -1e-9)

    def test_requires_critical_demand(self):
        with pytest.raises(PreconditionError, match="critical"):
            directional_limits(R3, W3, np.array([0.0, -1.0, 0.0]), np.ones(3))

    def test_rejects_bad_direction(self):
        with pytest.raises(PreconditionError, match="direction"):
            directional_limits(R3, W3, C_STAR, np.zeros(3))
        with pytest.raises(PreconditionError, match="direction"):
            directional_limits(R3, W3, C_STAR, np.array([1.0, 0.0, -2.0]))
