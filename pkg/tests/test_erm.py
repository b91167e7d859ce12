import math

import numpy as np
import pytest

from locent.classes import (HypothesisClass, LabeledSample, PointDomain,
                            make_massart_instance, make_star_class, sample)
from locent.erm import (ErmPolicy, build_adversarial_family, empirical_risks,
                        erm, excess_risk, excess_risk_all, kl_closed_form,
                        kl_exact, kl_product, run_trial,
                        version_space_disagreement)
from locent.geometry import local_packing_number
from locent.experiments import threshold_class, threshold_instance

import oracles
from conftest import random_class


class TestErm:
    def test_realizable_zero_risk(self):
        inst = threshold_instance(12, 1.0)
        for seed in range(5):
            smp = sample(inst, 30, seed)
            row = erm(inst.cls, smp, ErmPolicy("first_index"))
            assert empirical_risks(inst.cls, smp)[row] == 0.0

    def test_two_row_majority(self):
        cls = HypothesisClass(PointDomain.of_size(4),
                              np.array([[1, 1, 1, 1], [-1, -1, -1, -1]], dtype=np.int8))
        smp = LabeledSample(xs=np.array([0, 1, 2, 3]),
                            ys=np.array([1, 1, 1, -1], dtype=np.int8), seed=0)
        assert erm(cls, smp, ErmPolicy("first_index")) == 0

    def test_pessimistic_tie_break(self):
        # rows 1 and 2 tie empirically on a sample seeing only point 0;
        # row 2 differs from the target on two points, so it is worse
        cls = HypothesisClass(PointDomain.of_size(3),
                              np.array([[1, 1, 1], [1, -1, 1], [1, -1, -1]],
                                       dtype=np.int8))
        inst = make_massart_instance(cls, 0, 1.0)
        smp = LabeledSample(xs=np.array([0, 0]), ys=np.array([1, 1], dtype=np.int8),
                            seed=0)
        assert erm(cls, smp, ErmPolicy("pessimistic", inst)) == 2
        assert erm(cls, smp, ErmPolicy("first_index")) == 0

    def test_seeded_random_is_deterministic(self):
        cls = threshold_class(6)
        inst = make_massart_instance(cls, 3, 1.0)
        smp = sample(inst, 3, 5)
        picks = {erm(cls, smp, ErmPolicy("seeded_random"), seed=42) for _ in range(5)}
        assert len(picks) == 1

    def test_chosen_attains_min_risk(self, rng):
        for _ in range(15):
            cls = random_class(rng)
            inst = make_massart_instance(cls, int(rng.integers(cls.n_rows)), 0.5)
            smp = sample(inst, 8, int(rng.integers(10_000)))
            risks = empirical_risks(cls, smp)
            for kind in ("first_index", "seeded_random", "pessimistic"):
                pol = ErmPolicy(kind, inst if kind == "pessimistic" else None)
                chosen = erm(cls, smp, pol, seed=3)
                assert risks[chosen] == pytest.approx(risks.min())


class TestExcessRisk:
    def test_target_zero(self):
        inst = threshold_instance(8, 0.5)
        assert excess_risk(inst, inst.target) == 0.0

    def test_uniform_margin_single_diff(self):
        # uniform on 4 points, |eta| = 1/2, one disagreement: (1/4)(1/2)
        cls = threshold_class(4)
        inst = make_massart_instance(cls, 2, 0.5)
        row = 1  # differs from row 2 at exactly one point
        assert int((cls.row(row) != cls.row(2)).sum()) == 1
        assert excess_risk(inst, row) == pytest.approx(1 / 8)

    def test_matches_joint_law_oracle(self, rng):
        for _ in range(15):
            cls = random_class(rng)
            target = int(rng.integers(cls.n_rows))
            h = float(rng.choice([0.25, 0.5, 1.0]))
            inst = make_massart_instance(cls, target, h)
            for row in range(cls.n_rows):
                assert excess_risk(inst, row) == pytest.approx(
                    oracles.brute_excess_risk(inst, row), abs=1e-12)

    def test_margin_lower_bound_tight_for_uniform_margin(self, rng):
        # excess = h * P_X(f != target) exactly under the uniform profile
        for _ in range(10):
            cls = random_class(rng)
            target = int(rng.integers(cls.n_rows))
            inst = make_massart_instance(cls, target, 0.5)
            exc = excess_risk_all(inst)
            mass = (cls.patterns != inst.fstar) @ inst.px.weights
            assert np.allclose(exc, 0.5 * mass)


class TestVersionSpace:
    def test_singleton_class_no_disagreement(self):
        cls = HypothesisClass(PointDomain.of_size(3),
                              np.array([[1, -1, 1]], dtype=np.int8))
        inst = make_massart_instance(cls, 0, 1.0)
        mean, ci = version_space_disagreement(inst, 4, 50, seed=0)
        assert mean == 0.0

    def test_noisy_instance_rejected(self):
        with pytest.raises(ValueError, match="realizable"):
            version_space_disagreement(threshold_instance(8, 0.5), 4, 10, seed=0)

    def test_thresholds_bound(self):
        inst = threshold_instance(16, 1.0)
        mean, ci = version_space_disagreement(inst, 16, 800, seed=3)
        assert mean <= 2 / 17 + 3 * ci / 2.5758

    def test_trial_report_consistency(self):
        inst = threshold_instance(8, 1.0)
        rep = run_trial(inst, 12, ErmPolicy("first_index"), seed=4)
        assert rep.excess >= 0.0
        assert rep.version_space_size >= 1
        assert 0.0 <= rep.dis_mass <= 1.0

    def test_realizable_excess_dominated_by_dis_mass(self):
        # chosen minimizer and target both sit in the version space when
        # h = 1, so the excess risk is at most the disagreement mass
        inst = threshold_instance(16, 1.0)
        for seed in range(20):
            rep = run_trial(inst, 10, ErmPolicy("pessimistic", inst), seed=seed)
            assert rep.excess <= rep.dis_mass + 1e-12


class TestAdversarialFamily:
    def test_family_margins_and_separation(self):
        cls = make_star_class("F1", 2, 6)
        spec = build_adversarial_family(cls, 0.5, 24, seed=1, position_cap=10)
        assert spec.size >= 2
        for inst in spec.instances:
            assert np.all(np.abs(inst.eta) == pytest.approx(0.5))
        for i in range(spec.size):
            for j in range(i + 1, spec.size):
                assert spec.rho(i, j) > spec.eps / 2
        for i in range(spec.size):
            assert spec.rho_to_center(i) <= spec.eps

    def test_family_size_matches_local_packing(self):
        cls = make_star_class("F1", 2, 6)
        spec = build_adversarial_family(cls, 0.5, 24, seed=1, position_cap=10)
        lp = local_packing_number(cls, spec.gamma, spec.n_positions, 1.0, seed=1)
        assert spec.size == lp.value

    def test_h_one_rejected(self):
        with pytest.raises(ValueError, match="degenerates"):
            build_adversarial_family(make_star_class("F1", 2, 6), 1.0, 32)

    def test_low_margin_rejected(self):
        with pytest.raises(ValueError, match="sqrt"):
            build_adversarial_family(make_star_class("F1", 2, 6), 0.2, 16)


class TestKl:
    def test_same_vector_zero(self):
        assert kl_closed_form(0, 0.5, 4, 10) == 0.0
        assert kl_exact([1, 0], [1, 0], [1, 1], 0.5, 2, 10) == pytest.approx(0.0)

    def test_single_flip_half_margin(self):
        # one position, one draw, h = 1/2: KL = (1/2) ln 3
        assert kl_closed_form(1, 0.5, 1, 1) == pytest.approx(0.5 * math.log(3))
        assert kl_exact([1], [0], [1], 0.5, 1, 1) == pytest.approx(0.5 * math.log(3))

    def test_product_additivity(self):
        a = kl_closed_form(3, 0.3, 8, 16)
        b = kl_closed_form(3, 0.3, 8, 32)
        assert b == pytest.approx(2 * a)

    def test_closed_matches_joint_oracle(self, rng):
        for _ in range(25):
            size = int(rng.integers(2, 7))
            b1 = rng.integers(0, 2, size)
            b2 = rng.integers(0, 2, size)
            w = rng.integers(1, 4, size)
            h = float(rng.choice([0.1, 0.5, 0.9]))
            n = int(rng.integers(1, 50))
            big_n = int(w.sum())
            rho = int(w[b1 != b2].sum())
            closed = kl_closed_form(rho, h, big_n, n)
            brute = oracles.brute_kl_joint(b1, b2, w, h, big_n, n)
            assert closed == pytest.approx(brute, rel=1e-9, abs=1e-12)

    def test_family_kl_report(self):
        cls = make_star_class("F1", 2, 6)
        spec = build_adversarial_family(cls, 0.5, 24, seed=1, position_cap=10)
        rep = kl_product(spec, 0, spec.size - 1, 24)
        assert rep.relative_gap <= 1e-9

    def test_h_one_infinite(self):
        with pytest.raises(ValueError):
            kl_closed_form(1, 1.0, 2, 2)
