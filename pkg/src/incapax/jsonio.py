"""JSON formats for channels, superoperators and reports.

Complex numbers are written as ``[re, im]`` pairs. Python's float repr is
the shortest string that round-trips, so no precision is lost.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .channel import Channel, SuperOperator, kraus_completeness_residual


class FormatError(ValueError):
    """Malformed or physically invalid input file."""


def matrix_to_json(m: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(m, dtype=complex)]


def matrix_from_json(obj) -> np.ndarray:
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError) as exc:
        raise FormatError(f"matrix is not a nested list of [re, im] pairs: {exc}") from None
    if arr.ndim != 3 or arr.shape[2] != 2:
        raise FormatError(f"matrix must have shape rows x cols x 2, got {arr.shape}")
    return arr[..., 0] + 1j * arr[..., 1]


def channel_to_dict(ch: Channel) -> dict:
    return {
        "name": ch.name,
        "dim_in": ch.dim_in,
        "dim_out": ch.dim_out,
        "kraus": [matrix_to_json(k) for k in ch.kraus],
    }


def channel_from_dict(obj: dict) -> Channel:
    if not isinstance(obj, dict):
        raise FormatError("channel file must contain a JSON object")
    missing = {"dim_in", "dim_out", "kraus"} - set(obj)
    if missing:
        raise FormatError(f"channel file missing keys: {', '.join(sorted(missing))}")
    kraus = [matrix_from_json(k) for k in obj["kraus"]]
    if not kraus:
        raise FormatError("channel needs at least one Kraus operator")
    shape = (int(obj["dim_out"]), int(obj["dim_in"]))
    for k in kraus:
        if k.shape != shape:
            raise FormatError(f"Kraus operator of shape {k.shape} does not match declared dims {shape}")
    try:
        return Channel(tuple(kraus), name=str(obj.get("name", "")))
    except ValueError:
        res = kraus_completeness_residual(kraus)
        raise FormatError(f"Kraus operators are not trace preserving (completeness residual {res:.3e})") from None


def channel_to_json(ch: Channel, path) -> None:
    Path(path).write_text(json.dumps(channel_to_dict(ch), indent=1) + "\n")


def channel_from_json(path) -> Channel:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None
    return channel_from_dict(obj)


def superop_to_dict(s: SuperOperator) -> dict:
    return {"dim_in": s.dim_in, "dim_out": s.dim_out, "matrix": matrix_to_json(s.mat)}


def superop_from_dict(obj: dict) -> SuperOperator:
    try:
        mat = matrix_from_json(obj["matrix"])
        return SuperOperator(mat, int(obj["dim_in"]), int(obj.get("dim_out", obj["dim_in"])))
    except KeyError as exc:
        raise FormatError(f"superoperator file missing key {exc}") from None
    except ValueError as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(str(exc)) from None


def superop_from_json(path) -> SuperOperator:
    try:
        obj = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None
    return superop_from_dict(obj)


def _round_floats(obj, digits: int):
    if isinstance(obj, float):
        return float(f"{obj:.{digits}g}")
    if isinstance(obj, dict):
        return {k: _round_floats(v, digits) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round_floats(v, digits) for v in obj]
    return obj


def dumps_report(report: dict, deterministic: bool = False) -> str:
    """Serialise a report; ``deterministic`` rounds floats to 10 significant digits."""
    if deterministic:
        report = _round_floats(report, 10)
    return json.dumps(report, indent=2, sort_keys=True, allow_nan=True)
