"""Quantum channels and their Kraus / Choi / superoperator forms.

Conventions
-----------
* ``vec`` stacks columns, so the superoperator of ``rho -> A rho B^dag`` is
  ``kron(conj(B), A)``.
* The Choi matrix is trace-normalised,
  ``J(N) = (id (x) N)(|phi_d><phi_d|)``, input factor first.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .opalg import (
    TOL_PSD,
    as_matrix,
    dagger,
    hermitian_eigs,
    is_hermitian,
    partial_trace,
    random_isometry,
)

TOL_TP = 1e-9


def vec(m: np.ndarray) -> np.ndarray:
    return np.asarray(m).reshape(-1, order="F")


def unvec(v: np.ndarray, rows: int, cols: int | None = None) -> np.ndarray:
    return np.asarray(v).reshape(rows, rows if cols is None else cols, order="F")


def kraus_completeness_residual(kraus: Sequence[np.ndarray]) -> float:
    d = kraus[0].shape[1]
    s = sum(dagger(k) @ k for k in kraus)
    return float(np.linalg.norm(s - np.eye(d)))


@dataclass(frozen=True)
class Channel:
    """CPTP map ``rho -> sum_i K_i rho K_i^dag``; each ``K_i`` is ``dim_out x dim_in``."""

    kraus: tuple
    name: str = field(default="", compare=False)

    def __post_init__(self):
        ks = tuple(as_matrix(k) for k in self.kraus)
        if not ks:
            raise ValueError("a channel needs at least one Kraus operator")
        shape = ks[0].shape
        if any(k.shape != shape for k in ks):
            raise ValueError("Kraus operators must share one shape")
        res = kraus_completeness_residual(ks)
        if res > TOL_TP:
            raise ValueError(f"Kraus operators are not trace preserving (residual {res:.3e})")
        object.__setattr__(self, "kraus", ks)

    @property
    def dim_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def dim_out(self) -> int:
        return self.kraus[0].shape[0]

    def __call__(self, rho) -> np.ndarray:
        return apply(self, rho)

    def __repr__(self):
        label = f"{self.name!r}, " if self.name else ""
        return f"Channel({label}{self.dim_in}->{self.dim_out}, {len(self.kraus)} Kraus)"


@dataclass(frozen=True)
class SuperOperator:
    """Linear map on ``dim_in x dim_in`` operators, stored as a
    ``dim_out**2 x dim_in**2`` matrix acting on ``vec``."""

    mat: np.ndarray
    dim_in: int
    dim_out: int

    def __post_init__(self):
        m = as_matrix(self.mat)
        if m.shape != (self.dim_out**2, self.dim_in**2):
            raise ValueError(
                f"superoperator matrix {m.shape} inconsistent with dims "
                f"({self.dim_in}, {self.dim_out})"
            )
        object.__setattr__(self, "mat", m)

    def __call__(self, x) -> np.ndarray:
        x = as_matrix(x)
        if x.shape != (self.dim_in, self.dim_in):
            raise ValueError(f"operator of shape {x.shape} does not fit input dim {self.dim_in}")
        return unvec(self.mat @ vec(x), self.dim_out)

    def __matmul__(self, other: "SuperOperator") -> "SuperOperator":
        return compose(self, other)


def _kraus_of(ch) -> tuple:
    if isinstance(ch, Channel):
        return ch.kraus
    raise TypeError(f"expected a Channel, got {type(ch).__name__}")


def apply(ch: Channel, rho) -> np.ndarray:
    rho = as_matrix(rho)
    if rho.shape != (ch.dim_in, ch.dim_in):
        raise ValueError(f"input of shape {rho.shape} does not fit channel input dim {ch.dim_in}")
    return sum(k @ rho @ dagger(k) for k in ch.kraus)


def identity_channel(d: int) -> Channel:
    return Channel((np.eye(d),), name=f"identity({d})")


def unitary_channel(u) -> Channel:
    return Channel((as_matrix(u),), name="unitary")


def random_channel(dim_in: int, dim_out: int, kraus_count: int, seed=None) -> Channel:
    """Channel whose Stinespring isometry is Haar-random."""
    if min(dim_in, dim_out, kraus_count) < 1:
        raise ValueError("dimensions and Kraus count must be positive")
    v = random_isometry(dim_out * kraus_count, dim_in, seed)
    blocks = v.reshape(kraus_count, dim_out, dim_in)
    ch = Channel(tuple(blocks), name=f"random({dim_in},{dim_out},{kraus_count})")
    return ch


# ---------------------------------------------------------------- Choi

def choi(ch: Channel) -> np.ndarray:
    """Trace-one Choi matrix on ``C^dim_in (x) C^dim_out``."""
    d = ch.dim_in
    # column k of vec-reshaped K gives (I (x) K)|phi>: entries K[m, i] at (i, m)
    vs = [k.T.reshape(-1) for k in ch.kraus]
    return sum(np.outer(v, np.conj(v)) for v in vs) / d


def choi_to_kraus(j, dim_in: int, dim_out: int, tol: float = TOL_PSD) -> Channel:
    """Kraus form of a trace-one Choi matrix; eigenvalues ``<= tol`` are dropped."""
    j = as_matrix(j)
    if j.shape != (dim_in * dim_out,) * 2:
        raise ValueError(f"Choi matrix {j.shape} does not match dims ({dim_in}, {dim_out})")
    w, v = hermitian_eigs(j, max(tol, 1e-9))
    if w[0] < -tol:
        raise ValueError(f"Choi matrix has eigenvalue {w[0]:.3e} < -{tol:g}; not a channel")
    keep = w > tol
    kraus = [np.sqrt(dim_in * lam) * vecs.reshape(dim_in, dim_out).T
             for lam, vecs in zip(w[keep], v[:, keep].T)]
    return Channel(tuple(kraus))


def choi_from_superop(s: SuperOperator) -> np.ndarray:
    din, dout = s.dim_in, s.dim_out
    # t[n, m, j, i] = N(|i><j|)[m, n]
    t = s.mat.reshape(dout, dout, din, din)
    return t.transpose(3, 1, 2, 0).reshape(din * dout, din * dout) / din


def superop_from_choi(j, dim_in: int, dim_out: int) -> SuperOperator:
    t = as_matrix(j).reshape(dim_in, dim_out, dim_in, dim_out) * dim_in
    mat = t.transpose(3, 1, 2, 0).reshape(dim_out**2, dim_in**2)
    return SuperOperator(mat, dim_in, dim_out)


# ---------------------------------------------------------------- superoperators

def superoperator(ch: Channel) -> SuperOperator:
    mat = sum(np.kron(np.conj(k), k) for k in ch.kraus)
    return SuperOperator(mat, ch.dim_in, ch.dim_out)


def superop_from_map(fn: Callable[[np.ndarray], np.ndarray], dim_in: int, dim_out: int | None = None) -> SuperOperator:
    """Superoperator of a linear function by evaluation on matrix units."""
    dim_out = dim_in if dim_out is None else dim_out
    cols = []
    for c in range(dim_in):
        for r in range(dim_in):
            e = np.zeros((dim_in, dim_in), dtype=complex)
            e[r, c] = 1.0
            cols.append(vec(as_matrix(fn(e))))
    return SuperOperator(np.array(cols).T, dim_in, dim_out)


def identity_superop(d: int) -> SuperOperator:
    return SuperOperator(np.eye(d * d), d, d)


def compose(outer: SuperOperator, inner: SuperOperator) -> SuperOperator:
    """``outer o inner``: apply ``inner`` first."""
    if inner.dim_out != outer.dim_in:
        raise ValueError(
            f"cannot compose: inner output dim {inner.dim_out} != outer input dim {outer.dim_in}"
        )
    return SuperOperator(outer.mat @ inner.mat, inner.dim_in, outer.dim_out)


def compose_channels(outer: Channel, inner: Channel) -> Channel:
    if inner.dim_out != outer.dim_in:
        raise ValueError("cannot compose channels with mismatched dimensions")
    return Channel(tuple(a @ b for a in outer.kraus for b in inner.kraus))


def tensor(ch1: Channel, ch2: Channel) -> Channel:
    return Channel(tuple(np.kron(a, b) for a in ch1.kraus for b in ch2.kraus))


def tensor_power(ch: Channel, n: int) -> Channel:
    out = ch
    for _ in range(n - 1):
        out = tensor(out, ch)
    return out


def conjugate_channel(ch: Channel) -> Channel:
    return Channel(tuple(np.conj(k) for k in ch.kraus))


# ---------------------------------------------------------------- dilations

def stinespring(ch: Channel) -> tuple[np.ndarray, int]:
    """Isometry ``V = sum_i K_i (x) |i>_E`` mapping A into B (x) E, plus ``dim_E``."""
    k = len(ch.kraus)
    stacked = np.stack(ch.kraus, axis=1)  # (dim_out, k, dim_in)
    return stacked.reshape(ch.dim_out * k, ch.dim_in), k


def complementary(ch: Channel) -> Channel:
    """Channel onto the environment of the Stinespring dilation."""
    stacked = np.stack(ch.kraus, axis=1)
    return Channel(tuple(stacked[m] for m in range(ch.dim_out)))


# ---------------------------------------------------------------- checks

def is_cptp(s: SuperOperator, tol: float = TOL_PSD) -> tuple[bool, bool, float]:
    """Return ``(cp, tp, min_choi_eig)`` for a superoperator.

    ``cp`` also requires the Choi matrix to be Hermitian within ``tol``;
    ``min_choi_eig`` is taken on its Hermitian part.
    """
    j = choi_from_superop(s)
    herm = is_hermitian(j, max(tol, 1e-12))
    lo = float(np.linalg.eigvalsh((j + dagger(j)) / 2)[0])
    red = partial_trace(j, (s.dim_in, s.dim_out), 2)
    tp = bool(np.max(np.abs(red - np.eye(s.dim_in) / s.dim_in)) <= tol)
    return bool(herm and lo >= -tol), tp, lo
