"""Antidegradability and the cloning construction.

A channel ``N`` is antidegradable when some channel ``D`` from its
environment reproduces it, ``D o N^c = N``. The search for ``D`` is a convex
feasibility problem over Choi matrices and is solved here with Dykstra's
alternating projections. From a degrading map we build the two-output
extension ``M12`` whose marginals both equal ``N`` and the (nonlinear,
unphysical) cloning map ``psi -> M12(N^+(psi~)) + sigma (x) sigma``.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .channel import (
    Channel,
    apply,
    choi,
    complementary,
    stinespring,
    superop_from_choi,
    superoperator,
    unvec,
    vec,
)
from .forbidden import Reason, ZeroCapacityCertificate
from .opalg import dagger, partial_trace, psd_projection, random_state

log = logging.getLogger(__name__)

EPS_FEAS = 1e-7
EPS_MARG = 1e-6
MAX_ITER = 20000
PINV_RCOND = 1e-10
# least-squares residual above which no linear degrading map exists
EPS_LINEAR = 1e-9


class FeasStatus(str, Enum):
    FEASIBLE = "Feasible"
    INFEASIBLE = "Infeasible"
    UNDETERMINED = "Undetermined"


@dataclass
class FeasibilityResult:
    status: FeasStatus
    distance: float
    iterations: int
    degrading_choi: np.ndarray | None = None
    degrader: Channel | None = None
    history: np.ndarray = field(default_factory=lambda: np.zeros(0), repr=False)
    note: str = ""

    @property
    def feasible(self) -> bool:
        return self.status is FeasStatus.FEASIBLE


def _degrading_constraints(ch: Channel) -> tuple[np.ndarray, np.ndarray, int, int]:
    """Linear system ``A x = b`` on the row-major flattened Choi matrix of ``D``.

    Rows encode ``S(D) S(N^c) = S(N)`` followed by ``Tr_B J_D = I/d_E``.
    """
    comp = complementary(ch)
    d_e, d_b = comp.dim_out, ch.dim_out
    n = d_e * d_b
    s_c = superoperator(comp).mat
    s_n = superoperator(ch).mat
    cols = []
    for idx in range(n * n):
        unit = np.zeros(n * n, dtype=complex)
        unit[idx] = 1.0
        j = unit.reshape(n, n)
        s_d = superop_from_choi(j, d_e, d_b).mat
        tp = partial_trace(j, (d_e, d_b), 2)
        cols.append(np.concatenate([(s_d @ s_c).ravel(), tp.ravel()]))
    a = np.array(cols).T
    b = np.concatenate([s_n.ravel(), (np.eye(d_e) / d_e).ravel()])
    return a, b, d_e, d_b


def _channel_from_psd_choi(j: np.ndarray, d_in: int, d_out: int) -> Channel:
    """Kraus form of a PSD Choi matrix whose TP condition holds only approximately.

    The Kraus set is renormalised by ``(sum K^dag K)^(-1/2)``, a congruence
    that keeps complete positivity and makes trace preservation exact.
    """
    w, v = np.linalg.eigh((j + dagger(j)) / 2)
    keep = w > 1e-14 * max(w[-1], 1.0)
    kraus = [np.sqrt(d_in * lam) * vv.reshape(d_in, d_out).T for lam, vv in zip(w[keep], v[:, keep].T)]
    s = sum(dagger(k) @ k for k in kraus)
    sw, sv = np.linalg.eigh((s + dagger(s)) / 2)
    inv_sqrt = (sv / np.sqrt(sw)) @ dagger(sv)
    return Channel(tuple(k @ inv_sqrt for k in kraus))


def antidegradability_feasibility(ch: Channel, tol: float = EPS_FEAS, max_iter: int = MAX_ITER) -> FeasibilityResult:
    """Search for a degrading map ``D`` with ``D o N^c = N``.

    Dykstra's method alternates between the PSD cone and the affine set of
    trace-preserving Choi matrices satisfying the degrading identity. The
    distance between the two iterates is tracked; ``Feasible`` is declared
    once it drops below ``tol``. Stalling never yields ``Infeasible``: that
    status is reserved for an inconsistent linear system, which rules out
    even a non-positive linear ``D``.
    """
    a, b, d_e, d_b = _degrading_constraints(ch)
    n = d_e * d_b
    a_pinv = np.linalg.pinv(a, rcond=PINV_RCOND)
    x_ls = a_pinv @ b
    ls_res = float(np.linalg.norm(a @ x_ls - b))
    if ls_res > EPS_LINEAR:
        return FeasibilityResult(FeasStatus.INFEASIBLE, distance=float("inf"), iterations=0,
                                 note=f"no linear degrading map exists (least-squares residual {ls_res:.3e})")
    null_proj = np.eye(n * n) - a_pinv @ a

    def proj_affine(z):
        return x_ls + null_proj @ (z - x_ls)

    def proj_psd(z):
        return psd_projection(z.reshape(n, n)).ravel()

    x = (np.eye(n, dtype=complex) / n).ravel()
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    history = np.empty(max_iter)
    dist = float("inf")
    it = 0
    for it in range(1, max_iter + 1):
        y = proj_affine(x + p)
        p = x + p - y
        x_new = proj_psd(y + q)
        q = y + q - x_new
        x = x_new
        dist = float(np.linalg.norm(x - y))
        history[it - 1] = dist
        if dist < tol:
            break
    history = history[:it]

    if dist >= tol:
        return FeasibilityResult(FeasStatus.UNDETERMINED, dist, it, history=history,
                                 note="iteration budget exhausted; alternating projections cannot certify emptiness")

    degrader = _channel_from_psd_choi(x.reshape(n, n), d_e, d_b)
    return FeasibilityResult(FeasStatus.FEASIBLE, dist, it, degrading_choi=choi(degrader),
                             degrader=degrader, history=history)


def degrading_residual(ch: Channel, degrader: Channel) -> float:
    """Frobenius norm of ``S(D) S(N^c) - S(N)``."""
    comp = complementary(ch)
    if degrader.dim_in != comp.dim_out or degrader.dim_out != ch.dim_out:
        raise ValueError(
            f"degrader must map dim {comp.dim_out} -> {ch.dim_out}, got {degrader.dim_in} -> {degrader.dim_out}"
        )
    lhs = superoperator(degrader).mat @ superoperator(comp).mat
    return float(np.linalg.norm(lhs - superoperator(ch).mat))


# ---------------------------------------------------------------- symmetric extension

@dataclass
class SymmetricExtension:
    """``M12 = (id_B (x) D) o V . V^dag`` from ``A`` to ``B1 B2``."""

    m12: Channel
    source: Channel
    degrader: Channel

    @property
    def dims(self) -> tuple[int, int]:
        return self.source.dim_out, self.source.dim_out


def build_symmetric_extension(ch: Channel, degrader: Channel, tol: float = EPS_MARG) -> SymmetricExtension:
    res = degrading_residual(ch, degrader)
    if res > tol:
        raise ValueError(f"degrading identity violated (residual {res:.3e} > {tol:g})")
    v, _ = stinespring(ch)
    eye_b = np.eye(ch.dim_out)
    kraus = tuple(np.kron(eye_b, dk) @ v for dk in degrader.kraus)
    return SymmetricExtension(Channel(kraus, name="M12"), ch, degrader)


def marginal_residuals(ext: SymmetricExtension, states) -> tuple[float, float]:
    """Largest deviation of ``Tr_2 M12`` and ``Tr_1 M12`` from the source channel."""
    dims = ext.dims
    r1 = r2 = 0.0
    for rho in states:
        out = apply(ext.m12, rho)
        target = apply(ext.source, rho)
        r1 = max(r1, float(np.linalg.norm(partial_trace(out, dims, 2) - target)))
        r2 = max(r2, float(np.linalg.norm(partial_trace(out, dims, 1) - target)))
    return r1, r2


# ---------------------------------------------------------------- cloning map

def range_decompose(psi, ch: Channel, rcond: float = PINV_RCOND) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split ``psi = psi~ + sigma`` with ``psi~`` in the range of ``ch``.

    Returns ``(psi~, sigma, preimage)`` where ``preimage`` is the
    minimum-norm operator with ``ch(preimage) = psi~``.
    """
    s = superoperator(ch).mat
    return _decompose(psi, s, np.linalg.pinv(s, rcond=rcond), ch.dim_in, ch.dim_out)


def _decompose(psi, s, s_pinv, d_in, d_out):
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (d_out, d_out):
        raise ValueError(f"operator of shape {psi.shape} does not fit output dim {d_out}")
    pre = s_pinv @ vec(psi)
    tilde = unvec(s @ pre, d_out)
    return tilde, psi - tilde, unvec(pre, d_in)


@dataclass
class CloneMap:
    """Cloning map built from a channel and a symmetric extension of it."""

    source: Channel
    m12: Channel
    s: np.ndarray = field(init=False, repr=False)
    s_pinv: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.m12.dim_in != self.source.dim_in or self.m12.dim_out != self.source.dim_out**2:
            raise ValueError("extension dims do not match the source channel")
        self.s = superoperator(self.source).mat
        self.s_pinv = np.linalg.pinv(self.s, rcond=PINV_RCOND)

    @classmethod
    def from_extension(cls, ext: SymmetricExtension) -> "CloneMap":
        return cls(ext.source, ext.m12)

    @property
    def dim(self) -> int:
        return self.source.dim_out

    def decompose(self, psi):
        return _decompose(psi, self.s, self.s_pinv, self.source.dim_in, self.source.dim_out)

    def __call__(self, psi) -> np.ndarray:
        return clone_map_apply(self, psi)


def clone_map_apply(cm: CloneMap, psi) -> np.ndarray:
    """``M12(N^+(psi~)) + sigma (x) sigma``; output ordered copy 1, copy 2."""
    _, sigma, pre = cm.decompose(psi)
    return apply(cm.m12, pre) + np.kron(sigma, sigma)


def pad_environment(cm: CloneMap, dim_e: int) -> CloneMap:
    """Clone map for ``N (x) |0><0|_E``.

    The source gains a pure ancilla ``|0>_E`` after its output and the
    extension outputs ``(B1 E1)(B2 E2)`` with both ancillas in ``|0>``, so
    the two copies stay contiguous for ``U (x) U`` conjugation.
    """
    d_b, d_a = cm.dim, cm.source.dim_in
    e0 = np.zeros((dim_e, 1))
    e0[0, 0] = 1.0
    source = Channel(tuple(np.kron(k, e0) for k in cm.source.kraus), name="padded")
    kraus = []
    for k in cm.m12.kraus:
        t = np.zeros((d_b, dim_e, d_b, dim_e, d_a), dtype=complex)
        t[:, 0, :, 0, :] = k.reshape(d_b, d_b, d_a)
        kraus.append(t.reshape(d_b * dim_e * d_b * dim_e, d_a))
    return CloneMap(source, Channel(tuple(kraus), name="padded M12"))


def clone_residuals(cm: CloneMap, states) -> dict:
    """Check cloning on in-range inputs ``psi = N(rho)``.

    Reports the largest deviation of both partial traces of the clone from
    ``psi`` and of the clone from ``M12(rho)``.
    """
    dims = (cm.dim, cm.dim)
    tr1 = tr2 = phys = 0.0
    for rho in states:
        psi = apply(cm.source, rho)
        out = clone_map_apply(cm, psi)
        tr1 = max(tr1, float(np.linalg.norm(partial_trace(out, dims, 1) - psi)))
        tr2 = max(tr2, float(np.linalg.norm(partial_trace(out, dims, 2) - psi)))
        phys = max(phys, float(np.linalg.norm(out - apply(cm.m12, rho))))
    return {"trace1": tr1, "trace2": tr2, "physical": phys}


def cloning_certificate(ch: Channel, channel_id: str = "", tol: float = EPS_FEAS, max_iter: int = MAX_ITER,
                        n_states: int = 20, seed=0, feas: FeasibilityResult | None = None) -> ZeroCapacityCertificate | None:
    """Cloning certificate for an antidegradable channel, or ``None``.

    The degrading map is turned into a symmetric extension and a cloning
    map, whose marginals are checked on ``n_states`` random inputs. Tensor
    powers of antidegradable channels are antidegradable, which carries the
    single-use argument to every block length.
    """
    if feas is None:
        feas = antidegradability_feasibility(ch, tol=tol, max_iter=max_iter)
    if not feas.feasible:
        return None
    ext = build_symmetric_extension(ch, feas.degrader)
    rng = np.random.default_rng(seed)
    states = [random_state(ch.dim_in, rng) for _ in range(n_states)]
    m1, m2 = marginal_residuals(ext, states)
    clone = clone_residuals(CloneMap.from_extension(ext), states)
    worst = max(m1, m2, *clone.values())
    if worst > EPS_MARG:
        log.warning("cloning construction for %s failed verification (residual %.3e)", channel_id or ch, worst)
        return None
    detail = {
        "distance": feas.distance,
        "iterations": feas.iterations,
        "marginal_residuals": [m1, m2],
        "clone_residuals": clone,
        "justification": "tensor products of antidegradable channels are antidegradable",
        "clone_marginals_note": "marginals equal the input on the range of the channel; "
                                "off-range inputs give psi~ + Tr(sigma) sigma",
    }
    return ZeroCapacityCertificate(Reason.CLONING, detail, channel_id)


__all__ = [
    "CloneMap",
    "FeasStatus",
    "FeasibilityResult",
    "SymmetricExtension",
    "antidegradability_feasibility",
    "build_symmetric_extension",
    "clone_map_apply",
    "clone_residuals",
    "cloning_certificate",
    "degrading_residual",
    "marginal_residuals",
    "pad_environment",
    "range_decompose",
]
