"""Incapacity reports combining the time-reversal and cloning tests."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

from . import __version__
from .antideg import EPS_FEAS, EPS_MARG, MAX_ITER, antidegradability_feasibility, cloning_certificate
from .channel import Channel
from .forbidden import Reason, ZeroCapacityCertificate, ppt_test
from .jsonio import channel_from_json
from .opalg import TOL_PSD
from .zoo import zoo_build

SCHEMA = "incapax-report/1"

CLASSES = ("PPT-only", "AD-only", "both", "undetected")


@dataclass
class ChannelSpec:
    """Where a channel comes from: the zoo (``name`` + ``params``) or a JSON file."""

    name: str
    params: dict = field(default_factory=dict)
    path: Optional[str] = None

    def build(self) -> Channel:
        if self.path is not None:
            return channel_from_json(self.path)
        return zoo_build(self.name, self.params)

    @property
    def label(self) -> str:
        if self.path is not None:
            return self.name or self.path
        args = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.name}({args})"


@dataclass
class AnalyzeOptions:
    tol: float = TOL_PSD
    feas_tol: float = EPS_FEAS
    max_iter: int = MAX_ITER
    seed: int = 0


def classify(ppt: bool, antidegradable: bool) -> str:
    if ppt and antidegradable:
        return "both"
    if ppt:
        return "PPT-only"
    if antidegradable:
        return "AD-only"
    return "undetected"


def _cert_to_dict(c: ZeroCapacityCertificate) -> dict:
    return {"reason": c.reason.value, "channel_id": c.channel_id, "detail": c.detail}


def analyze_channel(ch: Channel, label: str, opts: AnalyzeOptions | None = None) -> dict:
    opts = opts or AnalyzeOptions()
    ppt, ppt_min = ppt_test(ch, opts.tol)
    feas = antidegradability_feasibility(ch, tol=opts.feas_tol, max_iter=opts.max_iter)
    certs: list[ZeroCapacityCertificate] = []
    if ppt:
        certs.append(ZeroCapacityCertificate(Reason.TIME_REVERSAL, {"min_eig": ppt_min}, label))
    clone = cloning_certificate(ch, channel_id=label, feas=feas, seed=opts.seed)
    if clone is not None:
        certs.append(clone)
    cls = classify(ppt, clone is not None)
    if cls == "undetected":
        note = "neither test detects incapacity; this is not a claim that the channel has capacity"
    else:
        note = "zero quantum capacity certified"
    return {
        "schema": SCHEMA,
        "tool_version": __version__,
        "channel": {"name": label, "dim_in": ch.dim_in, "dim_out": ch.dim_out, "kraus_count": len(ch.kraus)},
        "ppt": {"verdict": ppt, "min_eig": ppt_min},
        "antidegradable": {
            "status": feas.status.value,
            # infeasible results carry an infinite distance; JSON gets null
            "distance": feas.distance if math.isfinite(feas.distance) else None,
            "iterations": feas.iterations,
            "note": feas.note,
        },
        "zero_capacity_reasons": [c.reason.value for c in certs],
        "certificates": [_cert_to_dict(c) for c in certs],
        "classification": cls,
        "classification_note": note,
        "seed": opts.seed,
        "tolerances": {
            "psd": opts.tol,
            "feasibility": opts.feas_tol,
            "marginal": EPS_MARG,
            "approximation_metric": "Frobenius distance on Choi matrices",
        },
        "solver": {"method": "dykstra", "max_iter": opts.max_iter},
    }


def analyze(spec: ChannelSpec, opts: AnalyzeOptions | None = None) -> dict:
    return analyze_channel(spec.build(), spec.label, opts)


def _fmt(x) -> str:
    return "n/a" if x is None else f"{x:.3g}"


def render_text(report: dict) -> str:
    ch = report["channel"]
    ad = report["antidegradable"]
    lines = [
        f"channel        {ch['name']}  ({ch['dim_in']} -> {ch['dim_out']}, {ch['kraus_count']} Kraus)",
        f"PPT            {report['ppt']['verdict']}  (min eig {report['ppt']['min_eig']:.6g})",
        f"antidegradable {ad['status']}  (distance {_fmt(ad['distance'])}, {ad['iterations']} iterations)",
        f"reasons        {', '.join(report['zero_capacity_reasons']) or '-'}",
        f"class          {report['classification']}",
        f"               {report['classification_note']}",
    ]
    return "\n".join(lines)
