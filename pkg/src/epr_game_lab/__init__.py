"""Bi-matrix games played with four coins or with EPR-type correlated pairs."""

from .coin_statistics import (
    FourCoinStats,
    Pair,
    StrategyMarginals,
    extract_marginals,
    factorization_residual,
    ne_support_constraints,
    recipe_payoff,
    validate,
)
from .correlated_game import (
    correlated_payoff,
    equilibrium_payoffs_quantum,
    residual_ne_check_pd1,
    split_payoff,
    summed_ne_condition,
)
from .game_model import PD1, PD2, BiMatrixGame, Player, Profile, bilinear_payoff, classical_ne_search, ne_margins
from .lhv_engine import (
    SignedMeasure,
    chsh_value,
    correlator,
    negativity_report,
    perfect_correlation_measure,
    probabilities_from_measure,
    strategy_probs_from_measure,
)
from .montecarlo import empirical_payoff, estimate_stats, sample_rounds

__version__ = "0.1.0"
