import math

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from locent.classes import HypothesisClass, PointDomain, make_star_class
from locent.measures import (growth_function, star_number, vc_dimension,
                             verify_shattered, verify_star_witness)
from locent.experiments import threshold_class

import oracles
from conftest import random_class


def single_row_class():
    return HypothesisClass(PointDomain.of_size(3),
                           np.array([[1, -1, 1]], dtype=np.int8))


class TestVcDimension:
    def test_thresholds(self):
        res = vc_dimension(threshold_class(16))
        assert (res.value, res.exact) == (1, True)

    def test_f1(self):
        assert vc_dimension(make_star_class("F1", 3, 6)).value == 3

    def test_single_row(self):
        res = vc_dimension(single_row_class())
        assert (res.value, res.witness) == (0, ())

    def test_witness_replays(self, rng):
        for _ in range(20):
            cls = random_class(rng)
            res = vc_dimension(cls)
            assert verify_shattered(cls, res.witness)

    def test_budget_flagging(self):
        cls = make_star_class("F1", 2, 10)
        res = vc_dimension(cls, budget=3)
        assert not res.exact and res.search_budget_hit
        assert res.value <= 2


class TestGrowthFunction:
    def test_thresholds(self):
        cls = threshold_class(8)
        for m in (1, 2, 3, 5):
            assert growth_function(cls, m).value == m + 1

    def test_single_row(self):
        for m in (1, 3, 10):
            assert growth_function(single_row_class(), m).value == 1

    def test_m_one_at_most_two(self, rng):
        for _ in range(10):
            assert growth_function(random_class(rng), 1).value <= 2

    def test_sauer_bound(self, rng):
        for _ in range(15):
            cls = random_class(rng)
            d = vc_dimension(cls)
            for m in (1, 2, 3):
                g = growth_function(cls, m)
                if d.exact and g.exact:
                    bound = sum(math.comb(m, i) for i in range(d.value + 1))
                    assert g.value <= bound

    def test_matches_oracle(self, rng):
        for _ in range(10):
            cls = random_class(rng, max_points=6, max_rows=10)
            for m in (1, 2, 4):
                assert growth_function(cls, m).value == oracles.brute_growth(cls, m)


class TestStarNumber:
    def test_thresholds(self):
        res = star_number(threshold_class(16))
        assert (res.value, res.exact) == (2, True)

    def test_f2_star_is_s(self):
        for d, s in ((2, 6), (3, 8)):
            res = star_number(make_star_class("F2", d, s), cap=s + 1)
            assert (res.value, res.exact) == (s, True)

    def test_f1_singletons(self):
        res = star_number(make_star_class("F1", 1, 5), cap=8)
        assert res.value == 5
        center, pts, rows = res.witness
        assert verify_star_witness(make_star_class("F1", 1, 5), center, pts, rows)

    def test_cap_truncates(self):
        res = star_number(make_star_class("F1", 1, 6), cap=3)
        assert res.value == 3 and not res.exact

    def test_witness_replays(self, rng):
        for _ in range(20):
            cls = random_class(rng)
            res = star_number(cls)
            center, pts, rows = res.witness
            if pts:
                assert verify_star_witness(cls, center, pts, rows)


class TestAgainstOracles:
    def test_vc_and_star(self, rng):
        for _ in range(12):
            cls = random_class(rng, max_points=6, max_rows=10)
            assert vc_dimension(cls).value == oracles.brute_vc(cls)
            assert star_number(cls).value == oracles.brute_star(cls)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(0, 10_000))
    def test_d_le_s(self, seed):
        cls = random_class(np.random.default_rng(seed), max_points=6, max_rows=10)
        assert vc_dimension(cls).value <= star_number(cls).value

    def test_d_le_s_on_generators(self):
        classes = [threshold_class(12), make_star_class("F1", 2, 6),
                   make_star_class("F2", 2, 6), make_star_class("F3", 2, 6, grid=4)]
        for cls in classes:
            assert vc_dimension(cls).value <= star_number(cls, cap=cls.n_points + 1).value
