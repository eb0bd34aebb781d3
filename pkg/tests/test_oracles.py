"""Closed-form payoff formulas and their internal consistency."""

import itertools
import math

import numpy as np
import pytest

from qmonty.game import GameConfig
from qmonty.oracles import (
    PayoffCurve,
    classical_p_ns,
    classical_p_s,
    curve_classical_mixed,
    curve_displacement,
    curve_qft_player,
    default_gammas,
    gamma_max,
    lambda_term,
    payoff_displacement,
    payoff_entangled,
    payoff_max,
    payoff_qft_separable,
    payoff_separable,
)
from qmonty.qudit import (
    DomainError,
    Strategy,
    qft,
    random_special_unitary,
    sum_d,
)


class TestClassicalProbabilities:
    def test_p_ns(self):
        assert classical_p_ns(3) == pytest.approx(1 / 3)
        assert classical_p_ns(2) == pytest.approx(1 / 2)
        assert classical_p_ns(10) == pytest.approx(0.1)
        with pytest.raises(ValueError):
            classical_p_ns(1)

    def test_p_s(self):
        assert classical_p_s(3, 1) == pytest.approx(2 / 3)
        assert classical_p_s(5, 1) == pytest.approx(4 / 15)
        assert classical_p_s(4, 0) == pytest.approx(1 / 4)
        with pytest.raises(ValueError):
            classical_p_s(3, 2)


class TestLambdaTerm:
    def test_examples(self):
        assert lambda_term(0, (), 3) == 1
        assert lambda_term(0, (2,), 3) == 2
        assert lambda_term(1, (0,), 3) == 2

    def test_minimality(self):
        for d in (3, 4, 5):
            for m in range(0, d - 1):
                for opened in itertools.permutations(range(d), m):
                    for j in range(d):
                        k = lambda_term(j, opened, d)
                        assert (j - k) % d not in opened
                        for smaller in range(1, k):
                            assert (j - smaller) % d in opened

    def test_no_free_door(self):
        with pytest.raises(DomainError):
            lambda_term(0, (0, 1, 2), 3)


class TestSeparablePayoff:
    @pytest.mark.parametrize("d", [3, 4, 5])
    def test_sum_player_recovers_classical_mixture(self, d):
        for m in range(0, d - 1):
            pns, ps = classical_p_ns(d), classical_p_s(d, m)
            for i in range(d):
                for g in (0.0, 0.4, 1.1, math.pi / 2):
                    cfg = GameConfig(d, m, 2, g)
                    value = payoff_separable(qft(d), sum_d(d, i), cfg)
                    expected = pns * math.cos(g) ** 2 + ps * math.sin(g) ** 2
                    assert value == pytest.approx(expected, abs=1e-12)

    def test_qft_player_at_gamma_zero(self):
        rng = np.random.default_rng(0)
        for d, m in ((3, 1), (5, 2)):
            cfg = GameConfig(d, m, 2, 0.0)
            for _ in range(5):
                A = random_special_unitary(d, rng)
                assert payoff_separable(A, qft(d), cfg) == pytest.approx(
                    classical_p_ns(d), abs=1e-12
                )

    def test_guaranteed_win(self):
        cfg = GameConfig(3, 1, 2, gamma_max(3, 1))
        assert payoff_separable(qft(3), qft(3), cfg) == pytest.approx(1, abs=1e-12)

    def test_requires_two_parties(self):
        with pytest.raises(ValueError):
            payoff_separable(qft(5), qft(5), GameConfig(5, 1, 3, 0.0))

    @pytest.mark.parametrize("d,m", [(3, 1), (4, 2), (5, 1), (6, 3)])
    def test_host_strategy_independence_with_uniform_player(self, d, m):
        rng = np.random.default_rng(d * 10 + m)
        cfg = GameConfig(d, m, 2, 0.9)
        values = [
            payoff_separable(random_special_unitary(d, rng), qft(d), cfg)
            for _ in range(20)
        ]
        assert max(values) - min(values) < 1e-9


class TestQftPlayerFormula:
    def test_endpoints(self):
        for d, m in ((3, 1), (5, 2), (6, 0)):
            assert payoff_qft_separable(GameConfig(d, m, 2, 0.0)) == pytest.approx(
                classical_p_ns(d)
            )
            assert payoff_qft_separable(
                GameConfig(d, m, 2, math.pi / 2)
            ) == pytest.approx(classical_p_s(d, m))

    def test_quarter_angle_value(self):
        value = payoff_qft_separable(GameConfig(3, 1, 2, math.pi / 4))
        assert value == pytest.approx(0.5 + math.sqrt(2) / 3, abs=1e-12)
        assert value == pytest.approx(0.9714045207910317, abs=1e-12)


class TestGammaMax:
    def test_three_doors(self):
        assert gamma_max(3, 1) == pytest.approx(math.atan(math.sqrt(2)))
        assert gamma_max(3, 1) == pytest.approx(0.9553166181245093)

    @pytest.mark.parametrize("d", [3, 4, 6])
    def test_no_opened_doors_gives_quarter_pi(self, d):
        assert gamma_max(d, 0) == pytest.approx(math.pi / 4)

    @pytest.mark.parametrize("d", [3, 4, 5, 6])
    def test_payoff_max_is_one_at_full_opening(self, d):
        assert payoff_max(d, d - 2) == pytest.approx(1, abs=1e-12)

    def test_payoff_max_attained_by_formula(self):
        for d, m in ((4, 1), (5, 3), (6, 2)):
            at_max = payoff_qft_separable(GameConfig(d, m, 2, gamma_max(d, m)))
            assert at_max == pytest.approx(payoff_max(d, m), abs=1e-12)
            assert at_max > classical_p_s(d, m)


class TestEntangledPayoff:
    @pytest.mark.parametrize("d", [3, 5])
    def test_double_qft_interferes_to_classical_mixture_odd_d(self, d):
        for m in range(0, d - 1):
            pns, ps = classical_p_ns(d), classical_p_s(d, m)
            for g in default_gammas(21):
                cfg = GameConfig(d, m, 2, g)
                value = payoff_entangled(qft(d), qft(d), cfg)
                expected = pns * math.cos(g) ** 2 + ps * math.sin(g) ** 2
                assert value == pytest.approx(expected, abs=1e-9)

    @pytest.mark.parametrize("d", [4, 6])
    def test_double_qft_doubles_correlation_for_even_d(self, d):
        # The Fourier pair maps the shared state onto sum_k |k, -k>, which
        # has two coinciding-label components (k = 0 and k = d/2) when d is
        # even: the keep-branch payoff is 2/d, not 1/d, so the classical
        # mixture is recovered for odd d only.  The full-state pipeline
        # reproduces these values exactly (see the equivalence suite).
        for m in range(0, d - 1):
            cfg = GameConfig(d, m, 2, 0.0)
            value = payoff_entangled(qft(d), qft(d), cfg)
            assert value == pytest.approx(2 / d, abs=1e-12)
            assert abs(value - classical_p_ns(d)) > 1e-2

    def test_perfect_correlation_endpoints(self):
        ident = Strategy(4, np.eye(4))
        assert payoff_entangled(ident, ident, GameConfig(4, 2, 2, 0.0)) == pytest.approx(1)
        assert payoff_entangled(
            ident, ident, GameConfig(4, 2, 2, math.pi / 2)
        ) == pytest.approx(0, abs=1e-12)


from conftest import classical_displacement_oracle


class TestDisplacementPayoff:
    def test_fig4_values_match_independent_oracle(self):
        d, m = 6, 3
        frozen = (0.0, 0.0, 0.25, 0.5, 0.75, 1.0)
        for k, expected in enumerate(frozen):
            assert classical_displacement_oracle(d, m, k) == pytest.approx(expected)
            cfg = GameConfig(d, m, 2, math.pi / 2)
            assert payoff_displacement(k, cfg) == pytest.approx(expected, abs=1e-12)

    def test_unreachable_gap_is_zero_for_all_gamma(self):
        for g in default_gammas(11):
            assert payoff_displacement(1, GameConfig(6, 3, 2, g)) == 0

    def test_zero_displacement(self):
        assert payoff_displacement(0, GameConfig(6, 3, 2, 0.0)) == pytest.approx(1)

    @pytest.mark.parametrize("d", [3, 4, 5, 6])
    def test_formula_matches_oracle_everywhere(self, d):
        for m in range(0, d - 1):
            for k in range(d):
                cfg = GameConfig(d, m, 2, math.pi / 2)
                assert payoff_displacement(k, cfg) == pytest.approx(
                    classical_displacement_oracle(d, m, k), abs=1e-12
                )

    def test_boundary_case_factorial(self):
        # k = d - m - 1 hits 0! in the denominator and needs no special case.
        d, m = 6, 3
        k = d - m - 1
        assert payoff_displacement(k, GameConfig(d, m, 2, math.pi / 2)) == pytest.approx(
            classical_displacement_oracle(d, m, k)
        )

    def test_range_check(self):
        with pytest.raises(ValueError):
            payoff_displacement(6, GameConfig(6, 3, 2, 0.0))


class TestClassicalBound:
    @pytest.mark.parametrize("d,m", [(3, 1), (4, 2), (5, 1), (6, 4)])
    def test_classical_mixture_peak_is_best_pure_strategy(self, d, m):
        pns, ps = classical_p_ns(d), classical_p_s(d, m)
        values = [
            pns * math.cos(g) ** 2 + ps * math.sin(g) ** 2
            for g in default_gammas(1001)
        ]
        assert max(values) == pytest.approx(max(pns, ps), abs=1e-9)


class TestPayoffCurveType:
    def test_valid_curve(self):
        curve = curve_classical_mixed(3, 1, default_gammas(11))
        assert curve.payoffs[0] == pytest.approx(1 / 3)
        assert curve.payoffs[-1] == pytest.approx(2 / 3)
        assert curve.scenario == "classical-mixed"

    def test_invariants(self):
        with pytest.raises(ValueError):
            PayoffCurve((0.0, 1.0), (0.5,), "x", 3, 1)
        with pytest.raises(ValueError):
            PayoffCurve((0.5, 0.1), (0.2, 0.2), "x", 3, 1)
        with pytest.raises(ValueError):
            PayoffCurve((0.0, 1.0), (0.2, 1.5), "x", 3, 1)

    def test_builders(self):
        gammas = default_gammas(11)
        assert curve_qft_player(3, 1, gammas).peak <= 1 + 1e-12
        disp = curve_displacement(6, 3, 5, gammas)
        assert disp.k == 5
        assert disp.payoffs[-1] == pytest.approx(1)

    def test_default_gammas(self):
        g = default_gammas()
        assert len(g) == 101
        assert g[0] == 0
        assert g[-1] == pytest.approx(math.pi / 2)
