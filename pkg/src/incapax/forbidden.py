"""Forbidden-transformation certificates: time reversal and linear maps.

A channel ``N`` for which ``R o N`` is physical, with ``R`` an unphysical
map that can be pushed past any decoder, cannot transmit the states on
which ``R`` is unphysical. This module implements the transpose instance,
its tensor-power stability, and a classifier for linear candidates ``R``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .channel import (
    Channel,
    SuperOperator,
    choi,
    compose,
    conjugate_channel,
    identity_superop,
    is_cptp,
    superop_from_map,
    superoperator,
    tensor_power,
    unitary_channel,
    vec,
)
from .opalg import (
    TOL_PSD,
    TOL_TRACE,
    max_entangled_projector,
    min_eig_psd,
    partial_transpose,
    random_unitary,
    swap_operator,
)

TOL_FIT = 1e-8
TOL_WITNESS = 1e-6
MAX_COND = 1e8
MAX_TENSOR_DIM = 64


class Reason(str, Enum):
    TIME_REVERSAL = "TimeReversal"
    CLONING = "Cloning"


@dataclass
class ZeroCapacityCertificate:
    """Evidence that a channel has zero quantum capacity.

    ``detail`` carries the numbers backing the claim, e.g. the minimum
    eigenvalue of the partially transposed Choi matrix or the feasibility
    distance of the degrading-map search.
    """

    reason: Reason
    detail: dict = field(default_factory=dict)
    channel_id: str = ""


class Family(str, Enum):
    TRANSPOSE = "TransposeFamily"
    IDENTITY = "IdentityFamily"


class Status(str, Enum):
    COMMUTING_TRANSPOSE = "CommutingTranspose"
    COMMUTING_IDENTITY = "CommutingIdentity"
    NON_COMMUTING = "NonCommuting"


@dataclass
class CommutationVerdict:
    status: Status
    p: float | None = None
    residual: float = 0.0
    witness_unitary: np.ndarray | None = None
    witness_min_eig: float | None = None
    span_residual: float | None = None
    samples_used: int = 0

    @property
    def sampling_incomplete(self) -> bool:
        return self.status is Status.NON_COMMUTING and self.witness_unitary is None


# ---------------------------------------------------------------- maps

def transpose_superop(d: int) -> SuperOperator:
    if d < 2:
        raise ValueError("dimension must be at least 2")
    return superop_from_map(lambda x: x.T, d)


def depolarizing_superop(d: int) -> SuperOperator:
    """``rho -> Tr(rho) I/d``."""
    e = vec(np.eye(d))
    return SuperOperator(np.outer(e, e) / d, d, d)


def family_superop(kind: Family | str, p: float, d: int) -> SuperOperator:
    """``(1-p) rho^T + p Tr(rho) I/d`` or ``(1-p) rho + p Tr(rho) I/d``."""
    kind = Family(kind)
    base = transpose_superop(d) if kind is Family.TRANSPOSE else identity_superop(d)
    mat = (1 - p) * base.mat + p * depolarizing_superop(d).mat
    return SuperOperator(mat, d, d)


# ---------------------------------------------------------------- PPT

def ppt_test(ch: Channel, tol: float = TOL_PSD) -> tuple[bool, float]:
    """Positivity of the partially transposed Choi matrix, i.e. physicality of T o N."""
    j = partial_transpose(choi(ch), (ch.dim_in, ch.dim_out), 2)
    return min_eig_psd(j, tol)


def verify_transpose_commutation(ch: Channel) -> float:
    """Frobenius norm of ``S(T o D) - S(D* o T)``."""
    if ch.dim_in != ch.dim_out:
        raise ValueError("transpose commutation needs equal input and output dims")
    t = transpose_superop(ch.dim_in)
    lhs = compose(t, superoperator(ch))
    rhs = compose(superoperator(conjugate_channel(ch)), t)
    return float(np.linalg.norm(lhs.mat - rhs.mat))


def tensor_stability_check(ch: Channel, n: int, tol: float = TOL_PSD) -> float:
    """``max(0, -min eig)`` of the Choi matrix of ``T^(x)n o N^(x)n``."""
    if n < 1:
        raise ValueError("n must be positive")
    if max(ch.dim_in, ch.dim_out) ** n > MAX_TENSOR_DIM:
        raise ValueError(f"tensor power too large: dimension {max(ch.dim_in, ch.dim_out)}^{n} > {MAX_TENSOR_DIM}")
    ok, lo = ppt_test(ch, tol)
    if not ok:
        raise ValueError(f"channel is not PPT (min eigenvalue {lo:.3e}); T o N is not physical")
    big = tensor_power(ch, n)
    # transposing the whole output space is T applied to every factor
    j = partial_transpose(choi(big), (big.dim_in, big.dim_out), 2)
    return max(0.0, -min_eig_psd(j, tol)[1])


def lemma1_certify(ch: Channel, channel_id: str = "", tol: float = TOL_PSD, **feas_kwargs) -> list[ZeroCapacityCertificate]:
    """Collect every zero-capacity certificate the two known tests produce.

    An empty list means that neither test fired; it says nothing about
    whether the channel has capacity.
    """
    from .antideg import cloning_certificate

    certs = []
    ok, lo = ppt_test(ch, tol)
    if ok:
        certs.append(ZeroCapacityCertificate(Reason.TIME_REVERSAL, {"min_eig": lo}, channel_id))
    clone = cloning_certificate(ch, channel_id=channel_id, **feas_kwargs)
    if clone is not None:
        certs.append(clone)
    return certs


# ---------------------------------------------------------------- linear classifier

def _apply_second(r: SuperOperator, m: np.ndarray, d: int) -> np.ndarray:
    """``(id (x) R)(m)`` for ``m`` on ``C^d (x) C^d``."""
    t = m.reshape(d, d, d, d)
    out = np.zeros_like(t)
    for i in range(d):
        for j in range(d):
            out[i, :, j, :] = r(t[i, :, j, :])
    return out.reshape(d * d, d * d)


def span_if_check(r: SuperOperator, d: int, conjugate: bool = False) -> float:
    """Residual of the least-squares fit of ``(id (x) R)(X)`` to span{I, F}.

    For maps covariant under ``U rho U^dag`` the probe ``X`` is the
    partial transpose of ``|phi_d><phi_d|``; with ``conjugate=True``
    (covariance under ``U^*``) the probe is ``|phi_d><phi_d|`` itself.
    """
    phi = max_entangled_projector(d)
    probe = phi if conjugate else partial_transpose(phi, (d, d), 2)
    out = _apply_second(r, probe, d)
    basis = np.stack([vec(np.eye(d * d)), vec(swap_operator(d))], axis=1)
    coef, *_ = np.linalg.lstsq(basis, vec(out), rcond=None)
    return float(np.linalg.norm(basis @ coef - vec(out)))


def _fit_families(r: SuperOperator, d: int) -> tuple[np.ndarray, float]:
    basis = np.stack(
        [identity_superop(d).mat.ravel(), transpose_superop(d).mat.ravel(), depolarizing_superop(d).mat.ravel()],
        axis=1,
    )
    coef, *_ = np.linalg.lstsq(basis, r.mat.ravel(), rcond=None)
    return coef, float(np.linalg.norm(basis @ coef - r.mat.ravel()))


def conjugated_unitary(r: SuperOperator, r_inv: np.ndarray, u: np.ndarray) -> SuperOperator:
    """``R o N_U o R^-1`` as a superoperator."""
    s_u = superoperator(unitary_channel(u)).mat
    return SuperOperator(r.mat @ s_u @ r_inv, r.dim_in, r.dim_out)


def classify_linear_map(r: SuperOperator, d: int, sample_count: int = 64, seed=0,
                        tol_fit: float = TOL_FIT, tol_witness: float = TOL_WITNESS) -> CommutationVerdict:
    """Decide whether a linear, invertible, trace-preserving ``R`` can be
    pushed past every channel.

    The map is first fitted to span{id, T, Tr(.)I/d}. A fit that is exact and
    lands in one of the two admissible families is accepted. Otherwise Haar
    unitaries are sampled in a fixed order until ``R o N_U o R^-1`` fails
    complete positivity; that ``U`` is returned as the witness.
    """
    if r.dim_in != d or r.dim_out != d:
        raise ValueError(f"map must act on {d}x{d} operators")
    cond = np.linalg.cond(r.mat)
    if not np.isfinite(cond) or cond > MAX_COND:
        raise ValueError(f"map is not invertible (condition number {cond:.3e})")
    e = vec(np.eye(d))
    tp_res = float(np.max(np.abs(e.conj() @ r.mat - e.conj())))
    if tp_res > TOL_TRACE:
        raise ValueError(f"map is not trace preserving (residual {tp_res:.3e})")

    coef, fit_res = _fit_families(r, d)
    a_id, a_t, a_dep = coef
    if fit_res < tol_fit and abs(a_id + a_t + a_dep - 1) < tol_fit:
        if abs(a_t) < tol_fit:
            status, p, conj = Status.COMMUTING_IDENTITY, float(np.real(a_dep)), False
        elif abs(a_id) < tol_fit:
            status, p, conj = Status.COMMUTING_TRANSPOSE, float(np.real(a_dep)), True
        else:
            status = None
        if status is not None:
            return CommutationVerdict(status, p=p, residual=fit_res,
                                      span_residual=span_if_check(r, d, conjugate=conj))

    r_inv = np.linalg.inv(r.mat)
    rng = np.random.default_rng(seed)
    for k in range(sample_count):
        u = random_unitary(d, rng)
        cp, _, lo = is_cptp(conjugated_unitary(r, r_inv, u), tol_witness)
        if lo < -tol_witness:
            return CommutationVerdict(Status.NON_COMMUTING, residual=fit_res, witness_unitary=u,
                                      witness_min_eig=lo, samples_used=k + 1)
    return CommutationVerdict(Status.NON_COMMUTING, residual=fit_res, samples_used=sample_count)


def random_tp_perturbation(d: int, scale: float, seed=None) -> SuperOperator:
    """Hermiticity-preserving, trace-annihilating superoperator of Frobenius norm ``scale``."""
    from .channel import random_channel

    rng = np.random.default_rng(seed)
    a = superoperator(random_channel(d, d, 2, rng)).mat
    b = superoperator(random_channel(d, d, 2, rng)).mat
    delta = a - b
    return SuperOperator(scale * delta / np.linalg.norm(delta), d, d)


__all__ = [
    "CommutationVerdict",
    "Family",
    "Reason",
    "Status",
    "ZeroCapacityCertificate",
    "classify_linear_map",
    "conjugated_unitary",
    "depolarizing_superop",
    "family_superop",
    "lemma1_certify",
    "ppt_test",
    "random_tp_perturbation",
    "span_if_check",
    "tensor_stability_check",
    "transpose_superop",
    "verify_transpose_commutation",
]
