"""Tests for log-odds weighting, perceived competences, and judge panels."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jurysim import (
    DomainError,
    WeightingMode,
    exact_accuracy,
    find_optimality_threshold,
    geometric_mean_odds,
    judge_weights,
    log_odds,
    optimal_weights,
    panel_weights,
    panel_weights_from_competences,
    perceived_competence,
    rule_signature,
    rules_equivalent,
    weight_error_under_bias,
)

EXAMPLE = [0.6, 0.6, 0.6, 0.7, 0.9]

probs = st.floats(min_value=1e-6, max_value=1.0 - 1e-6)


class TestLogOdds:
    def test_half_is_zero(self):
        assert log_odds(0.5) == 0.0

    def test_example1_strongest_expert(self):
        assert log_odds(0.9) == pytest.approx(2.197, abs=5e-4)

    def test_antisymmetry(self):
        assert log_odds(0.4) == pytest.approx(-log_odds(0.6), abs=1e-12)

    @given(probs)
    @settings(max_examples=200, deadline=None)
    def test_antisymmetric_about_half(self, p):
        assert log_odds(p) == pytest.approx(-log_odds(1.0 - p), abs=1e-9)

    @given(probs, probs)
    @settings(max_examples=200, deadline=None)
    def test_strictly_increasing(self, a, b):
        lo, hi = sorted((a, b))
        if lo < hi:
            assert log_odds(lo) < log_odds(hi)

    @pytest.mark.parametrize("bad", [0.0, 1.0, -0.2, 1.7, float("nan")])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            log_odds(bad)

    def test_array_form(self):
        out = log_odds(np.array([0.5, 0.9]))
        assert out.shape == (2,)
        assert out[0] == 0.0


class TestOptimalWeights:
    def test_example1(self):
        np.testing.assert_allclose(
            optimal_weights(EXAMPLE),
            [0.405, 0.405, 0.405, 0.847, 2.197],
            atol=5e-4,
        )

    def test_coin_flippers_get_zero(self):
        np.testing.assert_array_equal(optimal_weights([0.5, 0.5]), [0.0, 0.0])

    def test_incompetent_expert_negative(self):
        assert optimal_weights([0.3])[0] == pytest.approx(-0.847, abs=5e-4)


class TestPerceivedCompetence:
    def test_indifferent_judge_sees_coin_flips(self):
        for pe in (0.1, 0.25, 0.6, 0.9):
            assert perceived_competence(0.5, pe) == 0.5

    def test_perfect_judge_sees_truth_exactly(self):
        for pe in (0.03, 0.1, 0.37, 0.6, 0.93):
            assert perceived_competence(1.0, pe) == pe

    def test_always_wrong_judge_sees_complement(self):
        assert perceived_competence(0.0, 0.7) == pytest.approx(0.3, abs=1e-15)

    def test_example1_judge_on_strongest_expert(self):
        pje = perceived_competence(0.6, 0.9)
        assert pje == pytest.approx(0.58, abs=1e-12)
        assert log_odds(pje) == pytest.approx(0.323, abs=5e-4)

    @given(st.floats(min_value=0.0, max_value=1.0), probs)
    @settings(max_examples=300, deadline=None)
    def test_matches_product_form_and_stays_interior(self, pj, pe):
        direct = pj * pe + (1.0 - pj) * (1.0 - pe)
        got = perceived_competence(pj, pe)
        assert got == pytest.approx(direct, abs=1e-12)
        assert 0.0 < got < 1.0

    def test_judge_domain_is_closed(self):
        with pytest.raises(DomainError):
            perceived_competence(1.2, 0.6)
        with pytest.raises(DomainError):
            perceived_competence(-0.1, 0.6)

    def test_expert_domain_is_open(self):
        with pytest.raises(DomainError):
            perceived_competence(0.6, 1.0)


class TestJudgeWeights:
    def test_example1_judge(self):
        np.testing.assert_allclose(
            judge_weights(0.6, EXAMPLE),
            [0.080, 0.080, 0.080, 0.160, 0.323],
            atol=5e-4,
        )

    def test_indifferent_judge_zeroes_everyone(self):
        np.testing.assert_array_equal(judge_weights(0.5, EXAMPLE), np.zeros(5))

    def test_incompetent_judge_flips_signs_and_clamping_zeroes(self):
        signed = judge_weights(0.4, [0.6, 0.8])
        assert np.all(signed < 0)
        clamped = judge_weights(0.4, [0.6, 0.8], WeightingMode.CLAMPED_NONNEGATIVE)
        np.testing.assert_array_equal(clamped, [0.0, 0.0])

    def test_perfect_judge_is_optimal(self):
        np.testing.assert_array_equal(
            judge_weights(1.0, EXAMPLE), optimal_weights(EXAMPLE)
        )


class TestPanelWeights:
    def test_single_row_is_elementwise_log_odds(self):
        row = [0.52, 0.58, 0.9]
        np.testing.assert_array_equal(
            panel_weights([row]), log_odds(np.asarray(row))
        )

    def test_geometric_mean_of_odds_recovers_optimal(self):
        # two judges whose estimate odds are 3.0 and 0.75: geometric mean
        # sqrt(2.25) = 1.5, the true odds of a 0.6 expert
        estimates = [[0.75], [0.75 / 1.75]]
        got = panel_weights(estimates)[0]
        assert got == pytest.approx(math.log(1.5), abs=1e-12)
        assert got == pytest.approx(optimal_weights([0.6])[0], abs=1e-12)

    def test_unanimous_estimates_are_optimal(self):
        # averaging n identical weights is exact only up to 1 ulp (w*3/3)
        truth = np.array([0.3, 0.6, 0.9])
        estimates = np.vstack([truth, truth, truth])
        np.testing.assert_allclose(
            panel_weights(estimates), optimal_weights(truth), rtol=0, atol=1e-12
        )

    def test_empty_panel_rejected(self):
        with pytest.raises(DomainError):
            panel_weights(np.empty((0, 3)))

    def test_clamping_only_raises_negatives(self):
        estimates = [[0.2, 0.8], [0.4, 0.7]]
        signed = panel_weights(estimates)
        clamped = panel_weights(estimates, WeightingMode.CLAMPED_NONNEGATIVE)
        assert np.all(clamped >= 0.0)
        np.testing.assert_array_equal(clamped[signed >= 0], signed[signed >= 0])


class TestPanelWeightsFromCompetences:
    def test_single_judge_example1(self):
        np.testing.assert_array_equal(
            panel_weights_from_competences([0.6], EXAMPLE),
            judge_weights(0.6, EXAMPLE),
        )

    def test_indifferent_panel(self):
        np.testing.assert_array_equal(
            panel_weights_from_competences([0.5, 0.5, 0.5], EXAMPLE), np.zeros(5)
        )

    def test_perfect_judge(self):
        np.testing.assert_array_equal(
            panel_weights_from_competences([1.0], EXAMPLE), optimal_weights(EXAMPLE)
        )


class TestGeometricMeanOdds:
    def test_pilot_pair(self):
        assert geometric_mean_odds([0.75, 0.75 / 1.75]) == pytest.approx(1.5, abs=1e-12)

    def test_repeated_value_gives_its_odds(self):
        assert geometric_mean_odds([0.8, 0.8]) == pytest.approx(4.0, abs=1e-12)

    def test_coin_flips(self):
        assert geometric_mean_odds([0.5, 0.5, 0.5]) == pytest.approx(1.0, abs=1e-15)


class TestWeightErrorUnderBias:
    def test_unbiased_estimates_have_zero_error(self):
        assert weight_error_under_bias(0.6, 1.0) == pytest.approx(0.0, abs=1e-12)

    def test_doubling_odds_costs_ln2(self):
        assert weight_error_under_bias(0.6, 2.0) == pytest.approx(
            math.log(2.0), abs=1e-12
        )

    def test_halving_odds_costs_minus_ln2(self):
        assert weight_error_under_bias(0.7, 0.5) == pytest.approx(
            -math.log(2.0), abs=1e-12
        )

    @given(
        st.floats(min_value=0.01, max_value=0.99),
        st.floats(min_value=0.02, max_value=50.0),
    )
    @settings(max_examples=300, deadline=None)
    def test_error_is_log_alpha(self, p, alpha):
        assert weight_error_under_bias(p, alpha) == pytest.approx(
            math.log(alpha), abs=1e-12
        )

    def test_domain(self):
        with pytest.raises(DomainError):
            weight_error_under_bias(0.6, 0.0)
        with pytest.raises(DomainError):
            weight_error_under_bias(1.0, 2.0)


class TestSignAndOrder:
    def test_correct_sign_for_competent_judges(self):
        # competent judge, experts off the coin-flip line: perceived
        # weights match the sign of the optimal weights
        rng = np.random.default_rng(42)
        for _ in range(200):
            pj = rng.uniform(0.5 + 1e-6, 1.0)
            pe = rng.uniform(0.001, 0.999, int(rng.integers(1, 8)))
            pe = pe[np.abs(pe - 0.5) > 1e-6]
            if pe.size == 0:
                continue
            got = np.sign(judge_weights(pj, pe))
            np.testing.assert_array_equal(got, np.sign(optimal_weights(pe)))

    def test_sign_inversion_for_incompetent_judges(self):
        rng = np.random.default_rng(43)
        for _ in range(200):
            pj = rng.uniform(0.0, 0.5 - 1e-6)
            pe = rng.uniform(0.001, 0.999, int(rng.integers(1, 8)))
            pe = pe[np.abs(pe - 0.5) > 1e-6]
            if pe.size == 0:
                continue
            got = np.sign(judge_weights(pj, pe))
            np.testing.assert_array_equal(got, -np.sign(optimal_weights(pe)))

    def test_correct_order_including_ties(self):
        # competences on a coarse grid: strict orders stay strict, exact
        # competence ties produce exactly equal weights
        rng = np.random.default_rng(44)
        for _ in range(200):
            pj = rng.uniform(0.5 + 1e-6, 1.0)
            pe = rng.integers(1, 1000, size=int(rng.integers(2, 8))) / 1000.0
            w = judge_weights(pj, pe)
            order = np.argsort(pe, kind="stable")
            sorted_pe, sorted_w = pe[order], w[order]
            for a, b in zip(range(len(pe) - 1), range(1, len(pe))):
                if sorted_pe[a] == sorted_pe[b]:
                    assert sorted_w[a] == sorted_w[b]
                else:
                    assert sorted_w[a] < sorted_w[b]


class TestTwoExpertStructure:
    def test_dictator_vs_antidictator_by_signature(self):
        dictator = rule_signature([1.0, 0.0])
        anti = rule_signature([0.0, -1.0])
        cases = [
            (0.9, 0.2, dictator),   # 0.9 > 1 - 0.2 = 0.8
            (0.7, 0.2, None),       # 0.7 < 0.8: anti-dictator
            (0.6, 0.45, dictator),  # 0.6 > 0.55
        ]
        for p1, p2, expect in cases:
            sig = rule_signature(optimal_weights([p1, p2]))
            if expect is dictator:
                assert sig == dictator
            else:
                assert sig == anti

    def test_boundary_has_optimal_accuracy_with_ties(self):
        # p1 exactly 1 - p2: the log-odds rule ties on unanimous profiles
        # but its accuracy still equals the dictator's
        p1, p2 = 0.75, 0.25
        w = optimal_weights([p1, p2])
        acc = exact_accuracy([p1, p2], w).mean
        assert acc == pytest.approx(p1, abs=1e-12)
        assert acc == pytest.approx(exact_accuracy([p1, p2], [1.0, 0.0]).mean, abs=1e-12)


class TestFindOptimalityThreshold:
    def test_example1_threshold(self):
        res = find_optimality_threshold(EXAMPLE)
        assert res.threshold == pytest.approx(0.962, abs=1e-3)
        assert res.monotone

    def test_equal_pair_needs_any_competent_judge(self):
        res = find_optimality_threshold([0.7, 0.7])
        assert res.threshold == pytest.approx(0.5, abs=2e-3)

    def test_single_expert(self):
        res = find_optimality_threshold([0.8])
        assert res.threshold == pytest.approx(0.5, abs=2e-3)

    def test_coin_flip_panel_threshold_is_zero(self):
        # all experts at 1/2: every judge induces the fallback majority
        res = find_optimality_threshold([0.5, 0.5, 0.5])
        assert res.threshold == 0.0

    def test_bad_grid_step(self):
        with pytest.raises(DomainError):
            find_optimality_threshold(EXAMPLE, grid_step=0.0)
