"""Structured analyses behind the CLI commands."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from . import coin_statistics as cs
from . import correlated_game as cg
from . import lhv_engine as lhv
from .game_model import PD1, BiMatrixGame, Player, bilinear_payoff, classical_ne_search, ne_margins
from .montecarlo import TossTranscript, empirical_payoff

__all__ = [
    "SWEEP_COLUMNS",
    "AnalysisReport",
    "analyze_classical",
    "analyze_correlated",
    "convergence_table",
    "sweep_m13",
    "sweep_grid",
]

SWEEP_COLUMNS = (
    "m13", "m14", "m15", "m16", "s2", "sprime2",
    "payoff_A", "payoff_B", "ne_pd_verdict", "summed_condition", "chsh",
)


@dataclass
class AnalysisReport:
    kind: str
    game: dict
    regime: str
    marginals: dict
    payoffs: list = field(default_factory=list)
    ne: dict = field(default_factory=dict)
    chsh: dict | None = None
    negativity: dict | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "AnalysisReport":
        return cls(**data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, allow_nan=False) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "AnalysisReport":
        return cls.from_dict(json.loads(text))


def _marginals_dict(m: cs.StrategyMarginals) -> dict:
    return {"r": m.r, "s": m.s, "r_prime": m.r_prime, "s_prime": m.s_prime}


def analyze_classical(
    game: BiMatrixGame,
    stats: cs.FourCoinStats,
    grid_step: float = 0.25,
    tol: float = cs.INPUT_TOL,
) -> AnalysisReport:
    """Marginals, recipe vs bilinear payoffs and classical equilibria.

    Raises :class:`ConstraintViolation` when the statistics do not admit
    marginals within ``tol``.
    """
    validation = cs.validate(stats)
    marginals = cs.extract_marginals(stats, tol)
    payoffs = []
    for pair in cs.PAIRS:
        weights = marginals.weights(pair)
        for player in Player:
            recipe = cs.recipe_payoff(stats, game, pair, player)
            bilinear = bilinear_payoff(game, weights, player)
            payoffs.append({
                "pair": pair.value,
                "player": player.value,
                "recipe": recipe,
                "bilinear": bilinear,
                "difference": recipe - bilinear,
            })

    candidate = (marginals.s, marginals.s_prime)
    deviation = (marginals.r, marginals.r_prime)
    margin_a, margin_b = ne_margins(game, candidate, deviation)
    ne = {
        "candidate": list(candidate),
        "deviation": list(deviation),
        "margin_A": margin_a,
        "margin_B": margin_b,
        "holds": margin_a >= -1e-12 and margin_b >= -1e-12,
        "grid_step": grid_step,
        "grid_equilibria": [list(p.values) for p in classical_ne_search(game, grid_step)],
    }
    support = {}
    for pair in (cs.Pair.S2_S2, cs.Pair.S1_S2):
        try:
            constraints = cs.ne_support_constraints(game, pair, (0.0, 0.0))
        except cs.NotDerivedError:
            continue
        support[pair.value] = [
            {"constraint": str(c), "residual": c.residual(stats)} for c in constraints
        ]
    ne["support_constraints"] = support

    return AnalysisReport(
        kind="classical",
        game=game.as_dict(),
        regime=stats.regime.value,
        marginals=_marginals_dict(marginals),
        payoffs=payoffs,
        ne=ne,
        extra={
            "validation": validation.as_dict(),
            "factorization_residual": cs.factorization_residual(stats, tol),
        },
    )


def analyze_correlated(game: BiMatrixGame, m: lhv.SignedMeasure) -> AnalysisReport:
    """Payoffs, their split, equilibrium verdicts and CHSH for a perfectly
    correlated measure."""
    marginals = lhv.strategy_probs_from_measure(m)
    weights = cg.residual_weights(m)
    payoffs = []
    for pair in cs.PAIRS:
        for player in Player:
            split = cg.split_payoff(game, m, pair, player)
            payoffs.append({
                "pair": pair.value,
                "player": player.value,
                "total": cg.correlated_payoff(game, m, pair, player),
                "classical_part": split.classical_part,
                "quantum_part": split.quantum_part,
            })

    s, sp = marginals.s, marginals.s_prime
    margin_a, margin_b = ne_margins(game, (s, sp), (1.0, 1.0))
    summed = cg.summed_ne_condition(game, s, sp)
    ne = {
        "candidate": [s, sp],
        "deviation": [1.0, 1.0],
        "margin_A": margin_a,
        "margin_B": margin_b,
        "holds": margin_a >= -1e-12 and margin_b >= -1e-12,
        "displaced": s < 0 or sp < 0,
        "summed_condition": {"margin_sum": summed.margin_sum, "holds": summed.holds},
    }
    if game == PD1:
        verdict = cg.residual_ne_check_pd1(s, sp)
        ne["pd1_check"] = asdict(verdict)

    extra = {"residual_weights": asdict(weights)}
    if max(abs(m[1]), abs(m[2]), abs(m[3])) <= 1e-12:
        eq = cg.equilibrium_payoffs_quantum(game, weights.s2, weights.s2_prime)
        extra["equilibrium_payoffs"] = {"alice": eq.alice, "bob": eq.bob, "in_domain": eq.in_domain}

    chsh = lhv.chsh_value(m)
    return AnalysisReport(
        kind="correlated",
        game=game.as_dict(),
        regime="signed" if m.is_signed else "physical",
        marginals=_marginals_dict(marginals),
        payoffs=payoffs,
        ne=ne,
        chsh={
            "value": chsh.value,
            "violates": chsh.violates,
            "variants": list(lhv.chsh_variants(m)),
        },
        negativity=lhv.negativity_report(m).as_dict(),
        extra=extra,
    )


def sweep_grid(start: float, stop: float, step: float) -> np.ndarray:
    """``start, start + step, ...`` up to ``stop`` inclusive (within 1e-9 step)."""
    if not step > 0:
        raise ValueError(f"sweep step must be positive, got {step!r}")
    if start > stop:
        raise ValueError(f"sweep start {start!r} exceeds stop {stop!r}")
    n = int(math.floor((stop - start) / step + 1e-9))
    # rounding keeps CSV values like -0.15 instead of -0.15000000000000002
    return np.round(start + step * np.arange(n + 1), 12)


def sweep_m13(
    game: BiMatrixGame,
    start: float,
    stop: float,
    step: float,
    m14: float,
    m15: float,
    tol: float = 1e-12,
) -> list[dict]:
    """One row per m13 with m1 = m2 = m3 = 0, m4 = 1 and m16 closing the
    tail sum to zero. Rows come back in grid order."""
    rows = []
    for m13 in sweep_grid(start, stop, step):
        m13 = float(m13)
        m16 = -(m13 + m14 + m15)
        measure = lhv.perfect_correlation_measure((0.0, 0.0, 0.0, 1.0), (m13, m14, m15, m16))
        s2, sp2 = m13 + m14, m13 + m15
        margin_a, margin_b = ne_margins(game, (s2, sp2), (1.0, 1.0))
        eq = cg.equilibrium_payoffs_quantum(game, s2, sp2, warn=False)
        summed = cg.summed_ne_condition(game, s2, sp2)
        rows.append({
            "m13": m13,
            "m14": float(m14),
            "m15": float(m15),
            "m16": m16,
            "s2": s2,
            "sprime2": sp2,
            "payoff_A": eq.alice,
            "payoff_B": eq.bob,
            "ne_pd_verdict": "ne" if min(margin_a, margin_b) >= -tol else "not_ne",
            "summed_condition": "holds" if summed.holds else "violated",
            "chsh": lhv.chsh_value(measure).value,
        })
    return rows


def convergence_table(transcript, stats, game, checkpoints=None) -> list[dict]:
    """Empirical vs analytic payoff for Alice at growing prefixes of a run."""
    n = len(transcript)
    if checkpoints is None:
        checkpoints = [10**k for k in range(2, 12) if 10**k < n] + [n]
    rows = []
    for k in checkpoints:
        prefix = TossTranscript(transcript.pairs[:k], transcript.outcomes[:k], transcript.seed)
        for pair in cs.PAIRS:
            analytic = cs.recipe_payoff(stats, game, pair)
            try:
                value, err = empirical_payoff(prefix, game, pair)
            except ValueError:
                continue
            rows.append({
                "rounds": k,
                "pair": pair.value,
                "empirical": value,
                "stderr": err,
                "analytic": analytic,
                "z": (value - analytic) / err if err > 0 else 0.0,
            })
    return rows
