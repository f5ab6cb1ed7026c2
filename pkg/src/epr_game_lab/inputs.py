"""JSON input files for games, coin statistics and measures.

One top-level key per file::

    {"game": {"K": 3, "L": 0, "M": 5, "N": 1}}
    {"stats": {"p": [16 numbers, block order]}}
    {"measure": {"m": [16 numbers, outcome-class order]}}
"""

from __future__ import annotations

import json
import math
from pathlib import Path
from typing import Union

from .coin_statistics import FourCoinStats
from .game_model import BiMatrixGame
from .lhv_engine import MeasureError, SignedMeasure

__all__ = ["InputError", "load_inputs", "parse_inputs", "dump_inputs"]

Loaded = Union[BiMatrixGame, FourCoinStats, SignedMeasure]


class InputError(ValueError):
    """Malformed input file; the message names the file and field."""


def _reject_constant(name):
    raise ValueError(f"non-finite number {name} not allowed")


def _number(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InputError(f"{where}: expected a number, got {json.dumps(value)}")
    value = float(value)
    if not math.isfinite(value):
        raise InputError(f"{where}: number must be finite")
    return value


def _fields(obj, allowed: set, where: str) -> dict:
    if not isinstance(obj, dict):
        raise InputError(f"{where}: expected an object")
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise InputError(f"{where}: unknown field(s) {', '.join(unknown)}")
    missing = sorted(allowed - set(obj))
    if missing:
        raise InputError(f"{where}: missing field(s) {', '.join(missing)}")
    return obj


def _vector(values, where: str) -> list[float]:
    if not isinstance(values, list):
        raise InputError(f"{where}: expected an array of 16 numbers")
    if len(values) != 16:
        raise InputError(f"{where}: expected 16 entries, got {len(values)}")
    return [_number(v, f"{where}[{i}]") for i, v in enumerate(values)]


def parse_inputs(data, source: str = "<input>") -> Loaded:
    if not isinstance(data, dict) or len(data) != 1:
        raise InputError(
            f"{source}: expected exactly one top-level key out of game, stats, measure"
        )
    (key, body), = data.items()
    where = f"{source}: {key}"
    if key == "game":
        body = _fields(body, {"K", "L", "M", "N"}, where)
        return BiMatrixGame(**{k: _number(body[k], f"{where}.{k}") for k in "KLMN"})
    if key == "stats":
        body = _fields(body, {"p"}, where)
        return FourCoinStats(_vector(body["p"], f"{where}.p"))
    if key == "measure":
        body = _fields(body, {"m"}, where)
        try:
            return SignedMeasure(_vector(body["m"], f"{where}.m"))
        except MeasureError as exc:
            raise InputError(f"{where}.m: {exc}") from exc
    raise InputError(f"{source}: unknown top-level field {key!r}")


def load_inputs(path: str | Path) -> Loaded:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        data = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc
    except ValueError as exc:
        raise InputError(f"{path}: {exc}") from exc
    return parse_inputs(data, str(path))


def dump_inputs(obj: Loaded) -> dict:
    if isinstance(obj, BiMatrixGame):
        return {"game": obj.as_dict()}
    if isinstance(obj, FourCoinStats):
        return {"stats": {"p": obj.as_list()}}
    if isinstance(obj, SignedMeasure):
        return {"measure": {"m": obj.as_list()}}
    raise TypeError(type(obj))
