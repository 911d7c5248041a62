"""Quick property checks behind ``incapax verify``."""

from __future__ import annotations

import numpy as np

from . import antideg, channel as chn, forbidden, locc, opalg, zoo


def _opalg(rng):
    a, b = opalg.random_hermitian(2, rng), opalg.random_state(3, rng)
    r1 = np.linalg.norm(opalg.partial_trace(np.kron(a, b), (2, 3), 2) - np.trace(b) * a)
    m = opalg.random_hermitian(6, rng)
    r2 = np.linalg.norm(opalg.partial_transpose(opalg.partial_transpose(m, (2, 3), 1), (2, 3), 1) - m)
    h = opalg.random_hermitian(16, rng)
    w, v = opalg.hermitian_eigs(h)
    r3 = np.linalg.norm((v * w) @ opalg.dagger(v) - h)
    return max(r1, r2, r3), 1e-10


def _channel(rng):
    worst = 0.0
    for _ in range(10):
        ch = chn.random_channel(2, 3, 3, rng)
        worst = max(worst, np.linalg.norm(chn.choi(chn.choi_to_kraus(chn.choi(ch), 2, 3)) - chn.choi(ch)))
        rho = opalg.random_state(2, rng)
        worst = max(worst, np.linalg.norm(chn.superoperator(ch)(rho) - chn.apply(ch, rho)))
    return worst, 1e-8


def _commutation(rng):
    return max(forbidden.verify_transpose_commutation(chn.random_channel(d, d, 2, rng)) for d in (2, 3)
               for _ in range(10)), 1e-10


def _ppt_threshold(rng):
    worst = 0.0
    for p in np.linspace(0, 1, 11):
        worst = max(worst, abs(forbidden.ppt_test(zoo.depolarizing(2, p))[1] - (p / 4 - (1 - p) / 2)))
    return worst, 1e-9


def _classifier(rng):
    worst = 0.0
    for kind in forbidden.Family:
        v = forbidden.classify_linear_map(forbidden.family_superop(kind, 0.25, 2), 2, seed=rng)
        worst = max(worst, abs(v.p - 0.25))
    return worst, 1e-8


def _cloning(rng):
    ch = zoo.erasure(2, 0.5)
    feas = antideg.antidegradability_feasibility(ch)
    if not feas.feasible:
        return float("inf"), 1e-6
    ext = antideg.build_symmetric_extension(ch, feas.degrader)
    states = [opalg.random_state(2, rng) for _ in range(10)]
    res = antideg.clone_residuals(antideg.CloneMap.from_extension(ext), states)
    return max(*antideg.marginal_residuals(ext, states), *res.values()), 1e-6


def _distillation(rng):
    ident = chn.identity_channel(2)
    proto = locc.perfect_protocol(2)
    r = locc.distillation_identity_residual(ident, proto, 8, rng)
    t = np.linalg.norm(locc.transpose_extraction(ident, proto).mat - forbidden.transpose_superop(2).mat)
    return max(r, t), 1e-8


CHECKS = [
    ("opalg: partial trace / transpose identities", _opalg),
    ("channel: Choi-Kraus-superoperator round trips", _channel),
    ("forbidden: T o D = D* o T", _commutation),
    ("forbidden: PPT threshold of qubit depolarizing", _ppt_threshold),
    ("forbidden: linear-map classifier recovers families", _classifier),
    ("antideg: symmetric extension and clone marginals", _cloning),
    ("locc: perfect protocol extracts the transpose", _distillation),
]


def run_checks(seed=0) -> list[tuple[str, bool, float, float]]:
    rng = np.random.default_rng(seed)
    out = []
    for name, fn in CHECKS:
        value, tol = fn(rng)
        out.append((name, bool(value < tol), float(value), tol))
    return out
