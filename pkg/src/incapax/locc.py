"""Teleportation through a Choi matrix and the distillation argument.

An LOCC instrument is described by product Kraus pairs ``(A_i, B_i)``:
``A_i`` maps the channel input space (``d_in``) to the distilled system and
appears transposed when teleporting, ``B_i`` maps the channel output to the
distilled system. If such a protocol distilled the Choi state of a PPT
channel, conjugating it would implement the transpose with physical
pieces; the functions here evaluate every step of that chain numerically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import Channel, SuperOperator, apply, is_cptp, superop_from_map
from .forbidden import ppt_test, transpose_superop
from .opalg import dagger, random_isometry, random_pure_state

TOL_TP = 1e-9


def gen_paulis(d: int) -> list[np.ndarray]:
    """Heisenberg-Weyl operators ``X^a Z^b``, listed with ``u = a*d + b``.

    ``X`` is the cyclic shift ``|k> -> |k+1>`` and ``Z = diag(w^k)`` with
    ``w = exp(2 pi i / d)``.
    """
    if d < 2:
        raise ValueError("dimension must be at least 2")
    x = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    w = np.exp(2j * np.pi * np.arange(d) / d)
    # exact zeros for the real/imaginary parts of +-1, +-i
    w = np.where(np.abs(w.real) < 1e-15, 0, w.real) + 1j * np.where(np.abs(w.imag) < 1e-15, 0, w.imag)
    z = np.diag(w)
    return [np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b) for a in range(d) for b in range(d)]


def twirl(psi: np.ndarray) -> np.ndarray:
    """``sum_u s_u psi s_u^dag / d^2``, which equals ``Tr(psi) I/d``."""
    d = psi.shape[0]
    return sum(s @ psi @ dagger(s) for s in gen_paulis(d)) / d**2


@dataclass(frozen=True)
class LoccProtocol:
    """Product-Kraus instrument ``{A_i (x) B_i}``.

    Only the product form is checked; nothing verifies that the instrument
    is implementable with one-way or two-way classical communication.
    """

    pairs: tuple

    def __post_init__(self):
        pairs = tuple((np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)) for a, b in self.pairs)
        if not pairs:
            raise ValueError("protocol needs at least one Kraus pair")
        sa, sb = pairs[0][0].shape, pairs[0][1].shape
        if any(a.shape != sa or b.shape != sb for a, b in pairs):
            raise ValueError("all Kraus pairs must share shapes")
        total = sum(np.kron(dagger(a) @ a, dagger(b) @ b) for a, b in pairs)
        res = float(np.linalg.norm(total - np.eye(total.shape[0])))
        if res > TOL_TP:
            raise ValueError(f"Kraus pairs are not complete (residual {res:.3e})")
        object.__setattr__(self, "pairs", pairs)

    @property
    def dims(self) -> tuple[int, int, int, int]:
        """``(d_A_in, d_A_out, d_B_in, d_B_out)``."""
        a, b = self.pairs[0]
        return a.shape[1], a.shape[0], b.shape[1], b.shape[0]


def perfect_protocol(d: int) -> LoccProtocol:
    """Teleportation pairs ``(conj(s_u)/d, s_u)``; distils the identity channel's Choi state."""
    return LoccProtocol(tuple((np.conj(s) / d, s) for s in gen_paulis(d)))


def random_protocol(d_in: int, d_out: int, d_dist: int = 2, n_outcomes: int | None = None,
                    bob_kraus: int = 2, seed=None) -> LoccProtocol:
    """One-way protocol: a random instrument for Alice, a random channel for
    Bob conditioned on her outcome."""
    rng = np.random.default_rng(seed)
    n = d_dist**2 if n_outcomes is None else n_outcomes
    alice = random_isometry(n * d_dist, d_in, rng).reshape(n, d_dist, d_in)
    pairs = []
    for a in alice:
        bob = random_isometry(bob_kraus * d_dist, d_out, rng).reshape(bob_kraus, d_dist, d_out)
        pairs.extend((a, b) for b in bob)
    return LoccProtocol(tuple(pairs))


def _check_dims(ch: Channel, proto: LoccProtocol) -> tuple[int, int]:
    da_in, da_out, db_in, db_out = proto.dims
    if da_in != ch.dim_in or db_in != ch.dim_out:
        raise ValueError(
            f"protocol dims {proto.dims} incompatible with channel {ch.dim_in}->{ch.dim_out}"
        )
    return da_out, db_out


def teleport_through_choi(ch: Channel, proto: LoccProtocol, psi) -> np.ndarray:
    """State prepared by running ``proto`` on ``psi`` and the Choi state of ``ch``.

    Evaluates ``(d_out/d_in) sum_i d_in^-2 sum_u B_i N(A_i^T s_u psi s_u^dag A_i^*) B_i^dag (x) |u><u|``
    as written; the classical register ``u`` is the second tensor factor.
    The prefactor is not renormalised, so inspect the trace if needed.
    """
    d_psi, db_out = _check_dims(ch, proto)
    psi = np.asarray(psi, dtype=complex)
    if psi.shape != (d_psi, d_psi):
        raise ValueError(f"input state must be {d_psi}x{d_psi}")
    paulis = gen_paulis(d_psi)
    r = len(paulis)
    out = np.zeros((db_out * r, db_out * r), dtype=complex)
    scale = ch.dim_out / ch.dim_in / ch.dim_in**2
    for u, s in enumerate(paulis):
        rotated = s @ psi @ dagger(s)
        block = sum(b @ apply(ch, a.T @ rotated @ np.conj(a)) @ dagger(b) for a, b in proto.pairs)
        reg = np.zeros((r, r))
        reg[u, u] = 1.0
        out += scale * np.kron(block, reg)
    return out


def _prefactor(ch: Channel, proto: LoccProtocol, prefactor: float | None) -> float:
    d_psi, _ = _check_dims(ch, proto)
    return d_psi / ch.dim_in if prefactor is None else prefactor


def distillation_output(ch: Channel, proto: LoccProtocol, psi, prefactor: float | None = None) -> np.ndarray:
    """``(d_dist/d) sum_i B_i N(A_i^T psi A_i^*) B_i^dag``; ``2/d`` for qubit distillation."""
    c = _prefactor(ch, proto, prefactor)
    psi = np.asarray(psi, dtype=complex)
    return c * sum(b @ apply(ch, a.T @ psi @ np.conj(a)) @ dagger(b) for a, b in proto.pairs)


def distillation_identity_residual(ch: Channel, proto: LoccProtocol, samples: int = 32, seed=0,
                                   prefactor: float | None = None) -> float:
    """Largest Frobenius deviation from the distillation identity over sampled pure states."""
    d_psi, db_out = _check_dims(ch, proto)
    if db_out != d_psi:
        raise ValueError("Bob's output must have the distilled dimension")
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(samples):
        psi = random_pure_state(d_psi, rng)
        worst = max(worst, float(np.linalg.norm(psi - distillation_output(ch, proto, psi, prefactor))))
    return worst


def _extraction_fn(ch: Channel, proto: LoccProtocol, s: np.ndarray, c: float):
    # (s^*)^-1 = s^T; for qubit Paulis conjugating by s^T or by s^* is the same map
    left, right = s.T, np.conj(s)

    def fn(psi):
        rotated = s @ psi @ dagger(s)
        acc = sum(np.conj(b) @ apply(ch, a.T @ rotated @ np.conj(a)).T @ b.T for a, b in proto.pairs)
        return c * left @ acc @ right

    return fn


def transpose_extraction(ch: Channel, proto: LoccProtocol, u: int | None = None,
                         prefactor: float | None = None) -> SuperOperator:
    """Superoperator of the transpose recipe built from ``T o N`` and ``B_i^*``.

    With ``u`` given, the map for that Pauli correction alone; otherwise the
    uniform average over all ``u``. Whenever the distillation identity holds
    every per-``u`` map equals the transpose.
    """
    d_psi, db_out = _check_dims(ch, proto)
    if db_out != d_psi:
        raise ValueError("Bob's output must have the distilled dimension")
    c = _prefactor(ch, proto, prefactor)
    paulis = gen_paulis(d_psi)
    if u is not None:
        return superop_from_map(_extraction_fn(ch, proto, paulis[u], c), d_psi)
    mats = [superop_from_map(_extraction_fn(ch, proto, s, c), d_psi).mat for s in paulis]
    return SuperOperator(sum(mats) / len(mats), d_psi, d_psi)


def extraction_u_spread(ch: Channel, proto: LoccProtocol, prefactor: float | None = None) -> float:
    """Largest Frobenius deviation of a per-``u`` extraction map from the average."""
    avg = transpose_extraction(ch, proto, prefactor=prefactor)
    d_psi = avg.dim_in
    return max(float(np.linalg.norm(transpose_extraction(ch, proto, u, prefactor).mat - avg.mat))
               for u in range(d_psi**2))


def nondistillability_report(ch: Channel, proto: LoccProtocol, samples: int = 32, seed=0,
                             tol: float = 1e-9) -> dict:
    ppt, ppt_min = ppt_test(ch, tol)
    residual = distillation_identity_residual(ch, proto, samples, seed)
    ext = transpose_extraction(ch, proto)
    cp, _, ext_min = is_cptp(ext, tol)
    to_t = float(np.linalg.norm(ext.mat - transpose_superop(ext.dim_in).mat))
    if ppt:
        narrative = (
            "T o N is physical, so the extraction map is completely positive "
            f"(min Choi eigenvalue {ext_min:.3e}). It would equal the transpose if the "
            "distillation identity held exactly; the transpose is not completely positive, "
            f"so the identity must fail. Observed residual {residual:.3e} for this protocol."
        )
    else:
        narrative = (
            "T o N is not physical, so nothing forbids distillation; the extraction map "
            f"has min Choi eigenvalue {ext_min:.3e} and distance {to_t:.3e} from the transpose "
            f"at distillation residual {residual:.3e}."
        )
    return {
        "ppt": {"verdict": ppt, "min_eig": ppt_min},
        "distillation_residual": residual,
        "extraction": {"cp": cp, "min_choi_eig": ext_min, "distance_to_transpose": to_t},
        "narrative": narrative,
    }


def falsification_probe(ch: Channel, n_protocols: int, seed=0, samples: int = 16,
                        d_dist: int = 2, tol: float = 1e-9) -> dict:
    """Randomised search for a protocol distilling the Choi state of ``ch``.

    Numerical evidence only: a large minimum residual over many random
    protocols corroborates non-distillability without proving it.
    """
    rng = np.random.default_rng(seed)
    residuals, ext_mins = [], []
    for _ in range(n_protocols):
        proto = random_protocol(ch.dim_in, ch.dim_out, d_dist, seed=rng)
        residuals.append(distillation_identity_residual(ch, proto, samples, rng))
        ext_mins.append(is_cptp(transpose_extraction(ch, proto), tol)[2])
    return {
        "protocols": n_protocols,
        "min_residual": float(min(residuals)),
        "min_extraction_choi_eig": float(min(ext_mins)),
        "all_extraction_cp": bool(min(ext_mins) >= -tol),
        "evidence_only": True,
        "residuals": residuals,
    }
