import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import pp_member_lp, pp_vertex_max
from rotcvx.errors import NonFinite
from rotcvx.parity import pp_contains, pp_maximize, pp_random_point, pp_separate, pp_vertices


class TestContains:
    @pytest.mark.parametrize("d", [(1, 1, 1), (0, 0, 0)])
    def test_inside(self, d):
        assert pp_contains(d)

    def test_outside_facet(self):
        assert not pp_contains((1, 1, 0))

    def test_non_finite(self):
        with pytest.raises(NonFinite):
            pp_contains((0, np.nan))

    def test_agrees_with_vertex_lp(self):
        rng = np.random.default_rng(11)
        for _ in range(200):
            n = int(rng.integers(1, 6))
            d = rng.uniform(-1, 1, n)
            assert pp_contains(d, 1e-9) == pp_member_lp(d)


class TestSeparate:
    def test_odd_cut(self):
        cut = pp_separate((1, 1, -1))
        assert cut.kind == "odd"
        assert cut.subset == (2,)
        assert cut.violation == pytest.approx(2)

    def test_inside(self):
        assert pp_separate(np.ones(5)) is None

    def test_box_cut(self):
        cut = pp_separate((2, 0, 0))
        assert cut.kind == "box" and cut.subset == (0,)
        np.testing.assert_array_equal(cut.normal, [1, 0, 0])

    def test_cut_separates_and_vertices_satisfy(self):
        rng = np.random.default_rng(3)
        for _ in range(300):
            n = int(rng.integers(2, 7))
            d = rng.uniform(-1, 1, n)
            cut = pp_separate(d)
            if cut is None:
                continue
            assert cut.normal @ d > cut.rhs
            assert len(cut.subset) % 2 == 1
            assert np.all(pp_vertices(n) @ cut.normal <= cut.rhs + 1e-12)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.floats(-1, 1), min_size=1, max_size=8))
    def test_inside_iff_no_cut(self, d):
        assert (pp_separate(d) is None) == pp_contains(d, 0.0)


class TestMaximize:
    def test_all_positive(self):
        v, val = pp_maximize((1, 1, 1))
        np.testing.assert_array_equal(v, [1, 1, 1])
        assert val == 3

    def test_one_negative(self):
        assert pp_maximize((-1, 2, 3))[1] == pytest.approx(4)

    def test_flip_pair(self):
        v, val = pp_maximize((-3, 1, 2))
        np.testing.assert_array_equal(v, [-1, -1, 1])
        assert val == pytest.approx(4)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(8)
        for _ in range(300):
            w = rng.standard_normal(int(rng.integers(1, 7)))
            v, val = pp_maximize(w)
            assert np.prod(v) == 1
            assert val == pytest.approx(pp_vertex_max(w), abs=1e-12)

    def test_dominates_random_points(self):
        rng = np.random.default_rng(9)
        w = rng.standard_normal(6)
        _, val = pp_maximize(w)
        for s in range(100):
            assert val >= w @ pp_random_point(6, s) - 1e-12


class TestRandomPoint:
    def test_contained(self):
        for s in range(50):
            assert pp_contains(pp_random_point(3, s))

    def test_dimension_one(self):
        np.testing.assert_array_equal(pp_random_point(1, 0), [1.0])

    def test_seeded(self):
        assert np.array_equal(pp_random_point(7, 42), pp_random_point(7, 42))
