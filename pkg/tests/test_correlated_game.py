import warnings

import numpy as np
import pytest

from epr_game_lab.coin_statistics import PAIRS, Pair, extract_marginals
from epr_game_lab.correlated_game import (
    Representation,
    correlated_payoff,
    equilibrium_payoffs_quantum,
    residual_ne_check_pd1,
    residual_weights,
    split_payoff,
    summed_ne_condition,
)
from epr_game_lab.game_model import PD1, PD2, BiMatrixGame, Player, bilinear_payoff
from epr_game_lab.lhv_engine import (
    MeasureError,
    SignedMeasure,
    perfect_correlation_measure,
    probabilities_from_measure,
)

DEFECT = perfect_correlation_measure((0, 0, 0, 1), (0, 0, 0, 0))
SIGNED = perfect_correlation_measure((0, 0, 0, 1), (-0.1, 0.06, 0.04, 0))


def random_reduced(rng, signed=True):
    head = rng.dirichlet(np.ones(4)) if not signed else rng.normal(size=4)
    head = head + (1 - head.sum()) / 4
    tail = rng.normal(scale=0.3, size=4) if signed else np.zeros(4)
    tail = tail - tail.sum() / 4
    return perfect_correlation_measure(head, tail)


def random_game(rng):
    return BiMatrixGame(*rng.uniform(-5, 5, size=4))


def test_s1_s1_is_k():
    rng = np.random.default_rng(0)
    for _ in range(50):
        game = random_game(rng)
        m = random_reduced(rng)
        assert correlated_payoff(game, m, Pair.S1_S1) == game.K
        assert correlated_payoff(game, m, Pair.S1_S1, Player.BOB) == game.K


def test_defect_measure_rewards_n():
    assert correlated_payoff(PD1, DEFECT, Pair.S2_S2, "alice") == 1
    assert correlated_payoff(PD1, DEFECT, Pair.S2_S2, "bob") == 1


def test_signed_example_matches_pd1_polynomial():
    s2, sp2 = -0.04, -0.06
    poly = sp2 * (4 - s2) - s2 + 1
    assert poly == pytest.approx(0.7976, abs=1e-12)
    assert correlated_payoff(PD1, SIGNED, Pair.S2_S2) == pytest.approx(poly, abs=1e-12)
    assert equilibrium_payoffs_quantum(PD1, s2, sp2, "pd1").alice == pytest.approx(poly, abs=1e-12)


def test_correlated_payoff_is_bilinear_at_reduced_marginals():
    rng = np.random.default_rng(1)
    for _ in range(200):
        game, m = random_game(rng), random_reduced(rng)
        s = m[1] + m[2] + m[13] + m[14]
        sp = m[1] + m[3] + m[13] + m[15]
        weights = {Pair.S1_S1: (1, 1), Pair.S1_S2: (1, sp), Pair.S2_S1: (s, 1), Pair.S2_S2: (s, sp)}
        for pair in PAIRS:
            for player in Player:
                assert correlated_payoff(game, m, pair, player) == pytest.approx(
                    bilinear_payoff(game, weights[pair], player), abs=1e-12
                )


def test_requires_reduced_measure():
    for fn in (correlated_payoff, split_payoff):
        with pytest.raises(MeasureError):
            fn(PD1, SignedMeasure.uniform(), Pair.S2_S2)
    footnote = perfect_correlation_measure((0, 0, 0, 0), (0, 0, 0, 1), p1=0)
    with pytest.raises(MeasureError):
        correlated_payoff(PD1, footnote, Pair.S2_S2)


def test_split_quantum_part_vanishes_without_tail():
    rng = np.random.default_rng(2)
    for _ in range(100):
        game = random_game(rng)
        m = perfect_correlation_measure(rng.dirichlet(np.ones(4)), (0, 0, 0, 0))
        for pair in PAIRS:
            for player in Player:
                assert split_payoff(game, m, pair, player).quantum_part == 0


def test_split_signed_example():
    split = split_payoff(PD1, SIGNED, Pair.S1_S2)
    # (K - L)(m13 + m15) = 3 * (-0.06)
    assert split.quantum_part == pytest.approx(-0.18, abs=1e-15)
    assert split.classical_part == PD1.L
    assert split.total == pytest.approx(correlated_payoff(PD1, SIGNED, Pair.S1_S2), abs=1e-15)


def test_split_totals_match_on_random_measures():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        game, m = random_game(rng), random_reduced(rng)
        for pair in PAIRS:
            for player in Player:
                split = split_payoff(game, m, pair, player)
                assert split.total == pytest.approx(
                    correlated_payoff(game, m, pair, player), abs=1e-12
                )


def test_nonnegative_reduced_measures_force_empty_tail():
    rng = np.random.default_rng(4)
    for _ in range(200):
        m = perfect_correlation_measure(rng.dirichlet(np.ones(4)), (0, 0, 0, 0))
        w = residual_weights(m)
        assert (w.s2, w.s2_prime) == (0, 0)
    # a non-negative tail summing to zero must be all zeros
    with pytest.raises(MeasureError):
        perfect_correlation_measure((0, 0, 0, 1), (0.01, 0, 0, 0))


def test_classical_equivalence_without_tail():
    rng = np.random.default_rng(5)
    for _ in range(100):
        game = random_game(rng)
        m = perfect_correlation_measure(rng.dirichlet(np.ones(4)), (0, 0, 0, 0))
        marg = extract_marginals(probabilities_from_measure(m))
        for pair in PAIRS:
            for player in Player:
                assert correlated_payoff(game, m, pair, player) == pytest.approx(
                    bilinear_payoff(game, marg.weights(pair), player), abs=1e-12
                )


def test_residual_weights():
    w = residual_weights(SIGNED)
    assert (w.s1, w.s1_prime) == (0, 0)
    assert w.s2 == pytest.approx(-0.04) and w.s2_prime == pytest.approx(-0.06)


def test_residual_ne_check_examples():
    v = residual_ne_check_pd1(0, 0)
    assert v.is_ne and not v.displaced
    v = residual_ne_check_pd1(-0.04, -0.06)
    assert v.is_ne and v.displaced
    assert v.condition_a < 0 and v.condition_b < 0
    v = residual_ne_check_pd1(-1, 0)
    assert v.is_ne and v.condition_b == 0
    assert not residual_ne_check_pd1(-1.5, 0).is_ne


def test_residual_check_agrees_with_generic_margins():
    from epr_game_lab.game_model import ne_margins

    for s2 in np.linspace(-1.2, 1.2, 25):
        for sp2 in np.linspace(-1.2, 1.2, 25):
            ma, mb = ne_margins(PD1, (s2, sp2), (1, 1))
            assert residual_ne_check_pd1(s2, sp2).is_ne == (min(ma, mb) >= -1e-12)


def test_pd1_persistence_sign_argument():
    rng = np.random.default_rng(6)
    for _ in range(1000):
        m13 = rng.uniform(-1, 0)
        m14, m15 = rng.uniform(0, 1, size=2)
        s2, sp2 = m13 + m14, m13 + m15
        if not (-1 <= s2 <= 1 and -1 <= sp2 <= 1):
            continue
        assert residual_ne_check_pd1(s2, sp2).is_ne


def reduced_pd2(s, sp):
    return (4 * (s + sp) + 1) / 9 - s * sp


def test_summed_condition_examples():
    assert summed_ne_condition(PD2, 0, 0).holds
    lhs = (4 * (-0.33) + 1) / 9
    assert lhs == pytest.approx(-0.0355556, abs=1e-7)
    assert -0.165 * -0.165 == pytest.approx(0.027225)
    assert summed_ne_condition(PD2, -0.165, -0.165).violated


def test_summed_condition_matches_reduced_pd2_form():
    for s in np.linspace(-1, 1, 21):
        for sp in np.linspace(-1, 1, 21):
            assert summed_ne_condition(PD2, s, sp).margin_sum == pytest.approx(
                3.6 * reduced_pd2(s, sp), abs=1e-12
            )


def bisect(f, lo, hi, tol=1e-12):
    flo = f(lo)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if (f(mid) > 0) == (flo > 0):
            lo, flo = mid, f(mid)
        else:
            hi = mid
    return (lo + hi) / 2


def test_symmetric_boundary_is_minus_two_ninths():
    # symmetric split, sum u = s + s': (4u + 1)/9 - u^2/4
    root = bisect(lambda u: (4 * u + 1) / 9 - u * u / 4, -0.5, 0.0)
    assert root == pytest.approx(-2 / 9, abs=1e-9)
    assert 9 * root**2 - 16 * root - 4 == pytest.approx(0, abs=1e-9)
    assert summed_ne_condition(PD2, (root + 1e-6) / 2, (root + 1e-6) / 2).holds
    assert summed_ne_condition(PD2, (root - 1e-6) / 2, (root - 1e-6) / 2).violated


def test_asymmetric_split_can_evade_violation():
    # sum below -0.25, yet the inequality holds
    s, sp = 0.5, -0.8
    assert s + sp < -0.25
    assert reduced_pd2(s, sp) >= 0
    assert summed_ne_condition(PD2, s, sp).holds


def test_pd2_symmetric_disappearance():
    for t in np.linspace(-1, -1 / 9 - 1e-6, 200):
        assert summed_ne_condition(PD2, t, t).violated
    for t in np.linspace(0, 1, 50):
        assert summed_ne_condition(PD2, t, t).holds


def test_equilibrium_payoffs_examples():
    assert equilibrium_payoffs_quantum(PD1, 0, 0, "pd1").as_tuple() == (1, 1)
    for t in np.linspace(-1, -1e-3, 50):
        a, b = equilibrium_payoffs_quantum(PD1, t, t, Representation.PD1).as_tuple()
        assert a == pytest.approx(1 + 3 * t - t * t, abs=1e-12) and a == b and a <= 1
        a, b = equilibrium_payoffs_quantum(PD2, t, t, Representation.PD2).as_tuple()
        assert a == pytest.approx(0.2 + 4.6 * t - 1.8 * t * t, abs=1e-12) and a == b and a <= 0.2


def test_general_representation_matches_specialized():
    for s2, sp2 in [(-0.3, 0.1), (0.2, -0.7), (-1, -1), (0.4, 0.9)]:
        for game, rep in ((PD1, "pd1"), (PD2, "pd2")):
            general = equilibrium_payoffs_quantum(game, s2, sp2, "general").as_tuple()
            special = equilibrium_payoffs_quantum(game, s2, sp2, rep).as_tuple()
            assert general == pytest.approx(special, abs=1e-12)


def test_equilibrium_payoffs_match_correlated_payoff():
    m = SIGNED
    w = residual_weights(m)
    eq = equilibrium_payoffs_quantum(PD2, w.s2, w.s2_prime)
    assert eq.alice == pytest.approx(correlated_payoff(PD2, m, Pair.S2_S2, "alice"), abs=1e-12)
    assert eq.bob == pytest.approx(correlated_payoff(PD2, m, Pair.S2_S2, "bob"), abs=1e-12)


def test_pd1_ceiling_fails_for_asymmetric_split():
    # documented: both negative yet Alice's payoff exceeds 1
    assert equilibrium_payoffs_quantum(PD1, -0.5, -0.01, "pd1").alice > 1


def test_representation_guard_and_domain_flag():
    with pytest.raises(ValueError):
        equilibrium_payoffs_quantum(PD2, 0, 0, "pd1")
    with pytest.warns(UserWarning):
        eq = equilibrium_payoffs_quantum(PD1, -1.5, 0)
    assert not eq.in_domain
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        assert equilibrium_payoffs_quantum(PD1, -1.5, 0, warn=False).in_domain is False
