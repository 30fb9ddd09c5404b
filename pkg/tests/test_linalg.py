import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from oracles import euler_grid_max
from rotcvx.errors import DimensionMismatch, NonFinite
from rotcvx.linalg import (
    ToleranceConfig,
    membership,
    op_norm,
    orth_trace_max,
    project_op_ball,
    random_rotation,
    special_trace,
    special_trace_value,
    svd,
    torus_matrix,
    trace_norm,
)

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def square(n_min=1, n_max=6):
    return st.integers(n_min, n_max).flatmap(lambda n: arrays(np.float64, (n, n), elements=finite))


class TestSvd:
    def test_identity(self):
        r = svd(np.eye(3))
        np.testing.assert_allclose(r.sigma, [1, 1, 1])
        assert r.det_sign == 1

    def test_diagonal_sign_flip(self):
        r = svd(np.diag([3.0, -2.0]))
        np.testing.assert_allclose(r.sigma, [3, 2])
        assert r.det_sign == -1

    def test_reconstruction(self):
        m = np.random.default_rng(5).standard_normal((5, 5))
        r = svd(m)
        assert np.max(np.abs(r.reconstruct() - m)) <= 1e-9 * op_norm(m)
        assert np.max(np.abs(r.u.T @ r.u - np.eye(5))) <= 1e-9
        assert np.max(np.abs(r.v.T @ r.v - np.eye(5))) <= 1e-9

    def test_deterministic(self):
        m = np.random.default_rng(1).standard_normal((4, 4))
        a, b = svd(m), svd(m)
        assert np.array_equal(a.u, b.u) and np.array_equal(a.sigma, b.sigma)

    @pytest.mark.parametrize("bad", [np.nan, np.inf])
    def test_non_finite(self, bad):
        m = np.eye(2)
        m[0, 1] = bad
        with pytest.raises(NonFinite):
            svd(m)

    def test_not_square(self):
        with pytest.raises(DimensionMismatch):
            svd(np.ones((2, 3)))


class TestSpecialTrace:
    def test_identity(self):
        v, x = special_trace(np.eye(3))
        assert v == pytest.approx(3)
        np.testing.assert_allclose(x, np.eye(3), atol=1e-12)

    def test_zero(self):
        v, x = special_trace(np.zeros((4, 4)))
        assert v == 0
        assert membership(x, "SO", 1e-9)

    def test_reflection_matches_euler_grid(self):
        m = np.diag([1.0, 1.0, -1.0])
        v, x = special_trace(m)
        assert v == pytest.approx(1.0)
        assert np.sum(m * x) == pytest.approx(1.0)
        best = euler_grid_max(m, np.zeros((3, 3)), -1.0, 1.0)
        assert abs(best - v) <= 1e-3
        assert best <= v + 1e-12

    @settings(max_examples=60, deadline=None)
    @given(square())
    def test_value_bounds_and_argmax(self, m):
        v, x = special_trace(m)
        assert membership(x, "SO", 1e-9)
        assert np.sum(m * x) == pytest.approx(v, abs=1e-9 * max(1, trace_norm(m)))
        assert v <= trace_norm(m) + 1e-9 * max(1, trace_norm(m))
        assert special_trace_value(m) == pytest.approx(v, abs=1e-9 * max(1, trace_norm(m)))

    def test_equality_iff_positive_det(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            m = rng.standard_normal((4, 4))
            v, _ = special_trace(m)
            r = svd(m)
            if r.det_sign > 0:
                assert v == pytest.approx(trace_norm(m))
            else:
                assert v == pytest.approx(trace_norm(m) - 2 * r.sigma[-1])

    def test_lipschitz_in_trace_norm(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            n = int(rng.integers(1, 7))
            a, b = rng.standard_normal((2, n, n))
            gap = abs(special_trace_value(a) - special_trace_value(b))
            assert gap <= trace_norm(a - b) + 1e-9


class TestOrthTraceMax:
    def test_identity(self):
        v, x = orth_trace_max(np.eye(3))
        assert v == pytest.approx(3)
        np.testing.assert_allclose(x, np.eye(3), atol=1e-12)

    def test_reflection(self):
        v, x = orth_trace_max(np.diag([1.0, 1.0, -1.0]))
        assert v == pytest.approx(3)
        np.testing.assert_allclose(x, np.diag([1.0, 1.0, -1.0]), atol=1e-12)

    def test_random_matches_trace_norm(self):
        m = np.random.default_rng(4).standard_normal((4, 4))
        v, x = orth_trace_max(m)
        assert abs(v - trace_norm(m)) <= 1e-10
        assert np.sum(m * x) == pytest.approx(v)
        assert np.max(np.abs(x.T @ x - np.eye(4))) <= 1e-9


class TestNorms:
    def test_identity(self):
        assert trace_norm(np.eye(3)) == pytest.approx(3)
        assert op_norm(np.eye(3)) == pytest.approx(1)

    def test_diag(self):
        m = np.diag([2.0, 0, 0])
        assert trace_norm(m) == pytest.approx(2)
        assert op_norm(m) == pytest.approx(2)

    def test_rank_one(self):
        rng = np.random.default_rng(0)
        u, v = rng.standard_normal(5), rng.standard_normal(5)
        expect = np.linalg.norm(u) * np.linalg.norm(v)
        assert trace_norm(np.outer(u, v)) == pytest.approx(expect)
        assert op_norm(np.outer(u, v)) == pytest.approx(expect)


class TestTorus:
    def test_identity_block(self):
        np.testing.assert_allclose(torus_matrix(2, [0.0]), np.eye(2))

    def test_odd_quarter_turn(self):
        expect = np.array([[1, 0, 0], [0, 0, 1], [0, -1, 0.0]])
        np.testing.assert_allclose(torus_matrix(3, [np.pi / 2]), expect, atol=1e-15)

    def test_half_turns(self):
        np.testing.assert_allclose(torus_matrix(4, [np.pi, np.pi]), -np.eye(4), atol=1e-15)

    def test_wrong_length(self):
        with pytest.raises(DimensionMismatch):
            torus_matrix(4, [0.1])

    @settings(max_examples=50, deadline=None)
    @given(st.integers(1, 9).flatmap(
        lambda n: st.tuples(st.just(n), st.lists(st.floats(-7, 7), min_size=n // 2, max_size=n // 2))))
    def test_always_rotation(self, case):
        n, th = case
        assert membership(torus_matrix(n, th), "SO", 1e-9)


class TestRandomRotation:
    def test_deterministic(self):
        assert np.array_equal(random_rotation(3, 1), random_rotation(3, 1))

    def test_member(self):
        for seed in range(20):
            x = random_rotation(5, seed)
            assert np.max(np.abs(x.T @ x - np.eye(5))) <= 1e-9
            assert np.linalg.det(x) == pytest.approx(1)

    def test_dimension_one(self):
        np.testing.assert_allclose(random_rotation(1, 7), [[1.0]])


class TestProjectOpBall:
    def test_inside_unchanged(self):
        np.testing.assert_allclose(project_op_ball(np.eye(3) / 2), np.eye(3) / 2, atol=1e-15)

    def test_clip(self):
        np.testing.assert_allclose(project_op_ball(np.diag([3.0, 1.0])), np.eye(2), atol=1e-15)

    def test_scaled_rotation(self):
        q = random_rotation(4, 2)
        np.testing.assert_allclose(project_op_ball(2 * q), q, atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(square(1, 5))
    def test_idempotent_and_nonexpansive(self, m):
        p = project_op_ball(m)
        assert op_norm(p) <= 1 + 1e-9
        np.testing.assert_allclose(project_op_ball(p), p, atol=1e-9)
        other = project_op_ball(m + 0.5)
        assert op_norm(p - other) <= op_norm(np.full_like(m, 0.5)) * np.sqrt(m.shape[0]) + 1e-9


class TestMembership:
    def test_identity(self):
        assert membership(np.eye(3), "SO", 1e-9)

    def test_reflection(self):
        m = np.diag([1.0, -1.0])
        assert not membership(m, "SO", 1e-9)
        assert membership(m, "O", 1e-9)

    def test_ball(self):
        assert membership(0.5 * np.eye(3), "Bop", 1e-9)
        assert not membership(2 * np.eye(3), "Bop", 1e-9)


class TestToleranceConfig:
    def test_defaults(self):
        t = ToleranceConfig()
        assert (t.tol_orth, t.tol_recon, t.tol_feas, t.tol_interior) == (1e-9, 1e-9, 1e-8, 1e-10)

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            ToleranceConfig(tol_feas=0)
