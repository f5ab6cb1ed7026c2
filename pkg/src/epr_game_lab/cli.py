"""Command-line entry point.

Exit status: 0 on success, 1 when the input fails validation, 2 on a
configuration or input-format error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from . import analysis, coin_statistics as cs, lhv_engine as lhv, montecarlo as mc
from .game_model import PD1, PD2, BiMatrixGame
from .inputs import InputError, load_inputs

log = logging.getLogger("epr_game_lab")

COMMANDS = ("validate", "analyze-classical", "analyze-correlated", "sweep-m13", "simulate")
PRESET_GAMES = {"pd1": PD1, "pd2": PD2}

EXIT_OK, EXIT_INVALID, EXIT_CONFIG = 0, 1, 2


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    game: str | None = None
    stats: str | None = None
    measure: str | None = None
    out: str | None = None
    sweep_start: float = -1.0
    sweep_stop: float = 0.0
    sweep_step: float = 0.01
    m14: float = 0.0
    m15: float = 0.0
    grid_step: float = 0.25
    seed: int = 0
    rounds: int = 100_000
    tolerance: float | None = None

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}")
        if not self.sweep_step > 0:
            raise ConfigError(f"--sweep-step must be positive, got {self.sweep_step}")
        if self.sweep_start > self.sweep_stop:
            raise ConfigError(
                f"--sweep-start {self.sweep_start} exceeds --sweep-stop {self.sweep_stop}"
            )
        if self.rounds < 1:
            raise ConfigError("--rounds must be at least 1")
        if self.tolerance is not None and not self.tolerance > 0:
            raise ConfigError("--tolerance must be positive")
        for name in ("game", "stats", "measure", "out"):
            if getattr(self, name) == "":
                raise ConfigError(f"--{name} must not be empty")

    def require(self, *names: str) -> None:
        missing = [f"--{n}" for n in names if getattr(self, n) is None]
        if missing:
            raise ConfigError(f"{self.command} requires {', '.join(missing)}")


def _load(path: str, kind: type, flag: str):
    obj = load_inputs(path)
    if not isinstance(obj, kind):
        raise InputError(f"{path}: {flag} expects a {kind.__name__} file, got {type(obj).__name__}")
    return obj


def _game(cfg: RunConfig) -> BiMatrixGame:
    cfg.require("game")
    if cfg.game.lower() in PRESET_GAMES:
        return PRESET_GAMES[cfg.game.lower()]
    return _load(cfg.game, BiMatrixGame, "--game")


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _fmt(x: float) -> str:
    return f"{x + 0.0: .6f}"  # no "-0.000000"


def _cmd_validate(cfg: RunConfig) -> int:
    cfg.require("stats")
    stats = _load(cfg.stats, cs.FourCoinStats, "--stats")
    tol = cfg.tolerance or cs.INPUT_TOL
    report = cs.validate(stats)
    ok = report.ok(tol)
    print(f"stats: {cfg.stats}")
    for pair, res in zip(cs.PAIRS, report.normalization):
        print(f"  normalization {pair.value:<7} residual {res: .3e}")
    for (lhs, rhs), res in zip(cs.CONSISTENCY_EQUATIONS, report.consistency):
        eq = "+".join(f"p{i}" for i in lhs) + " = " + "+".join(f"p{i}" for i in rhs)
        print(f"  consistency {eq:<17} residual {res: .3e}")
    if report.negative_entries:
        print("  negative entries: " + ", ".join(f"p{i}" for i in report.negative_entries))
    print(f"valid: {'yes' if ok else 'no'} (tolerance {tol:g})")
    if cfg.out:
        _write(cfg.out, json.dumps({**report.as_dict(), "valid": ok, "tolerance": tol}, indent=2) + "\n")
    return EXIT_OK if ok else EXIT_INVALID


def _cmd_analyze_classical(cfg: RunConfig) -> int:
    game = _game(cfg)
    cfg.require("stats")
    stats = _load(cfg.stats, cs.FourCoinStats, "--stats")
    try:
        report = analysis.analyze_classical(
            game, stats, cfg.grid_step, cfg.tolerance or cs.INPUT_TOL
        )
    except cs.ConstraintViolation as exc:
        print(f"invalid statistics: {exc}", file=sys.stderr)
        return EXIT_INVALID
    m = report.marginals
    print(f"game K={game.K:g} L={game.L:g} M={game.M:g} N={game.N:g}  regime: {report.regime}")
    print(f"marginals r={m['r']:.6g} s={m['s']:.6g} r'={m['r_prime']:.6g} s'={m['s_prime']:.6g}")
    print(f"factorization residual {report.extra['factorization_residual']:.3e}")
    print(f"{'pair':<8}{'player':<7}{'recipe':>11}{'bilinear':>11}")
    for row in report.payoffs:
        print(f"{row['pair']:<8}{row['player']:<7}{_fmt(row['recipe']):>11}{_fmt(row['bilinear']):>11}")
    ne = report.ne
    print(
        f"(s, s') vs (r, r'): margin_A={ne['margin_A']:.6g} margin_B={ne['margin_B']:.6g} "
        f"-> {'NE' if ne['holds'] else 'not NE'}"
    )
    eqs = ", ".join(f"({a:g}, {b:g})" for a, b in ne["grid_equilibria"])
    print(f"grid equilibria (step {ne['grid_step']:g}): {eqs or 'none'}")
    if cfg.out:
        _write(cfg.out, report.to_json())
    return EXIT_OK


def _cmd_analyze_correlated(cfg: RunConfig) -> int:
    game = _game(cfg)
    cfg.require("measure")
    measure = _load(cfg.measure, lhv.SignedMeasure, "--measure")
    try:
        report = analysis.analyze_correlated(game, measure)
    except lhv.MeasureError as exc:
        print(f"invalid measure: {exc}", file=sys.stderr)
        return EXIT_INVALID
    m = report.marginals
    print(f"game K={game.K:g} L={game.L:g} M={game.M:g} N={game.N:g}  regime: {report.regime}")
    print(f"r=r'={m['r']:g}  s={m['s']:.6g}  s'={m['s_prime']:.6g}")
    print(f"{'pair':<8}{'player':<7}{'total':>11}{'classical':>11}{'quantum':>11}")
    for row in report.payoffs:
        print(
            f"{row['pair']:<8}{row['player']:<7}{_fmt(row['total']):>11}"
            f"{_fmt(row['classical_part']):>11}{_fmt(row['quantum_part']):>11}"
        )
    ne = report.ne
    print(
        f"NE ({ne['candidate'][0]:.6g}, {ne['candidate'][1]:.6g}) vs r=r'=1: "
        f"{'holds' if ne['holds'] else 'fails'}"
        f"{' (displaced)' if ne['displaced'] else ''}; summed condition "
        f"{'holds' if ne['summed_condition']['holds'] else 'violated'}"
    )
    eq = report.extra.get("equilibrium_payoffs")
    if eq:
        print(f"equilibrium payoffs: alice={eq['alice']:.6g} bob={eq['bob']:.6g}")
    print(f"CHSH {report.chsh['value']:.6g}{' (violates)' if report.chsh['violates'] else ''}")
    neg = report.negativity
    if neg["negative_m"] or neg["negative_p"]:
        print(
            "negative: "
            + ", ".join([f"m{i}" for i in neg["negative_m"]] + [f"p{i}" for i in neg["negative_p"]])
        )
    if cfg.out:
        _write(cfg.out, report.to_json())
    return EXIT_OK


def write_sweep_csv(rows: Sequence[dict], path: str | None) -> None:
    fh = sys.stdout if path is None else open(path, "w", encoding="utf-8", newline="")
    try:
        writer = csv.DictWriter(fh, fieldnames=analysis.SWEEP_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    finally:
        if fh is not sys.stdout:
            fh.close()


def read_sweep_csv(path: str | Path) -> list[dict]:
    with open(path, encoding="utf-8", newline="") as fh:
        rows = list(csv.DictReader(fh))
    for row in rows:
        for k, v in row.items():
            if k not in ("ne_pd_verdict", "summed_condition"):
                row[k] = float(v)
    return rows


def _cmd_sweep(cfg: RunConfig) -> int:
    game = _game(cfg)
    rows = analysis.sweep_m13(
        game, cfg.sweep_start, cfg.sweep_stop, cfg.sweep_step, cfg.m14, cfg.m15,
        tol=cfg.tolerance or 1e-12,
    )
    write_sweep_csv(rows, cfg.out)
    flips = sum(
        a["summed_condition"] != b["summed_condition"] for a, b in zip(rows, rows[1:])
    )
    log.info("sweep: %d rows, %d summed-condition flips", len(rows), flips)
    return EXIT_OK


def _cmd_simulate(cfg: RunConfig) -> int:
    if (cfg.stats is None) == (cfg.measure is None):
        raise ConfigError("simulate requires exactly one of --stats or --measure")
    game = _game(cfg)
    if cfg.stats is not None:
        stats = _load(cfg.stats, cs.FourCoinStats, "--stats")
    else:
        stats = lhv.probabilities_from_measure(_load(cfg.measure, lhv.SignedMeasure, "--measure"))
    try:
        transcript = mc.sample_rounds(stats, cfg.rounds, cfg.seed)
    except mc.SamplingError as exc:
        print(f"cannot simulate: {exc}", file=sys.stderr)
        return EXIT_INVALID
    if cfg.out:
        transcript.write(cfg.out)
    print(f"seed {cfg.seed} generator {transcript.generator} rounds {cfg.rounds}")
    print(f"{'rounds':>10} {'pair':<7}{'empirical':>11}{'stderr':>11}{'analytic':>11}{'z':>8}")
    for row in analysis.convergence_table(transcript, stats, game):
        print(
            f"{row['rounds']:>10} {row['pair']:<7}{_fmt(row['empirical']):>11}"
            f"{row['stderr']:>11.2e}{_fmt(row['analytic']):>11}{row['z']:>8.2f}"
        )
    return EXIT_OK


_HANDLERS = {
    "validate": _cmd_validate,
    "analyze-classical": _cmd_analyze_classical,
    "analyze-correlated": _cmd_analyze_correlated,
    "sweep-m13": _cmd_sweep,
    "simulate": _cmd_simulate,
}


def run(config: RunConfig) -> int:
    try:
        return _HANDLERS[config.command](config)
    except (ConfigError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epr-game-lab",
        description="Bi-matrix games played with four coins or with EPR-type correlated pairs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *flags):
        if "game" in flags:
            p.add_argument("--game", help="game JSON file, or preset pd1 / pd2")
        if "stats" in flags:
            p.add_argument("--stats", help="four-coin statistics JSON file")
        if "measure" in flags:
            p.add_argument("--measure", help="signed measure JSON file")
        p.add_argument("--out", help="output file (default: stdout where applicable)")
        p.add_argument("--tolerance", type=float, help="override the validation tolerance")

    common(sub.add_parser("validate", help="check coin-statistics constraints"), "stats")

    p = sub.add_parser("analyze-classical", help="marginals, payoffs and equilibria of coin statistics")
    common(p, "game", "stats")
    p.add_argument("--grid-step", type=float, default=0.25)

    p = sub.add_parser("analyze-correlated", help="payoffs and equilibria for a correlated measure")
    common(p, "game", "measure")

    p = sub.add_parser("sweep-m13", help="CSV sweep over m13 with fixed m14, m15")
    common(p, "game")
    p.add_argument("--sweep-start", type=float, default=-1.0)
    p.add_argument("--sweep-stop", type=float, default=0.0)
    p.add_argument("--sweep-step", type=float, default=0.01)
    p.add_argument("--m14", type=float, default=0.0)
    p.add_argument("--m15", type=float, default=0.0)

    p = sub.add_parser("simulate", help="Monte-Carlo run of the four-coin protocol")
    common(p, "game", "stats", "measure")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--rounds", type=int, default=100_000)
    return parser


def _configure_logging() -> None:
    level = os.environ.get("EPR_GAME_LAB_LOG", "WARNING").upper()
    logging.basicConfig(
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def main(argv: Sequence[str] | None = None) -> int:
    _configure_logging()
    args = vars(build_parser().parse_args(argv))
    try:
        cfg = RunConfig(**args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    log.debug("config %s", cfg)
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
