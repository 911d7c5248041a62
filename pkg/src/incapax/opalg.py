"""Dense complex operator algebra used by every other module.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Kets are column
vectors and composite indices are row-major, so the first tensor factor is
the slow index: ``kron(a, b)[i*db + k, j*db + l] == a[i, j] * b[k, l]``.
"""

from __future__ import annotations

import numpy as np

# default numerical tolerances
TOL_HERM = 1e-9
TOL_TRACE = 1e-9
TOL_PSD = 1e-9


def as_matrix(m) -> np.ndarray:
    """Coerce ``m`` to a finite 2-D complex array."""
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("matrix has non-finite entries")
    return arr


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(m).T


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(*mats) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for m in mats:
        out = np.kron(out, as_matrix(m))
    return out


def _check_bipartite(m: np.ndarray, dims: tuple[int, int]) -> tuple[int, int]:
    d1, d2 = (int(x) for x in dims)
    if m.shape != (d1 * d2, d1 * d2):
        raise ValueError(
            f"matrix of shape {m.shape} does not match subsystem dims {(d1, d2)}"
        )
    return d1, d2


def partial_trace(m, dims: tuple[int, int], which: int) -> np.ndarray:
    """Trace out subsystem ``which`` (1 or 2) of a bipartite operator.

    The retained factor is returned: ``which=2`` keeps the first system.
    """
    m = as_matrix(m)
    d1, d2 = _check_bipartite(m, dims)
    t = m.reshape(d1, d2, d1, d2)
    if which == 1:
        return np.einsum("ijil->jl", t)
    if which == 2:
        return np.einsum("ijkj->ik", t)
    raise ValueError(f"which must be 1 or 2, got {which!r}")


def partial_transpose(m, dims: tuple[int, int], which: int) -> np.ndarray:
    """Transpose tensor factor ``which`` (1 or 2) of a bipartite operator."""
    m = as_matrix(m)
    d1, d2 = _check_bipartite(m, dims)
    t = m.reshape(d1, d2, d1, d2)
    if which == 1:
        t = t.transpose(2, 1, 0, 3)
    elif which == 2:
        t = t.transpose(0, 3, 2, 1)
    else:
        raise ValueError(f"which must be 1 or 2, got {which!r}")
    return t.reshape(d1 * d2, d1 * d2)


def is_hermitian(m, tol: float = TOL_HERM) -> bool:
    m = as_matrix(m)
    return m.shape[0] == m.shape[1] and bool(np.max(np.abs(m - dagger(m)), initial=0.0) <= tol)


def hermitian_eigs(m, tol: float = TOL_HERM) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix.

    Returns ascending eigenvalues and the unitary whose columns are the
    matching eigenvectors. The input is symmetrised before the solve so
    round-off below ``tol`` does not leak into the spectrum.
    """
    m = as_matrix(m)
    if not is_hermitian(m, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh((m + dagger(m)) / 2)
    return w, v


def min_eig_psd(m, tol: float = TOL_PSD) -> tuple[bool, float]:
    """Return ``(is_psd, min_eig)`` where ``is_psd`` means ``min_eig >= -tol``."""
    w, _ = hermitian_eigs(m, max(tol, TOL_HERM))
    lo = float(w[0])
    return lo >= -tol, lo


def psd_projection(m) -> np.ndarray:
    """Nearest PSD matrix in Frobenius norm (negative eigenvalues clipped)."""
    m = as_matrix(m)
    w, v = np.linalg.eigh((m + dagger(m)) / 2)
    return (v * np.clip(w, 0.0, None)) @ dagger(v)


def is_density_matrix(m, tol: float = TOL_PSD) -> bool:
    m = as_matrix(m)
    if m.shape[0] != m.shape[1] or not is_hermitian(m, TOL_HERM):
        return False
    if abs(np.trace(m) - 1) > TOL_TRACE:
        return False
    return min_eig_psd(m, tol)[0]


def max_entangled(d: int) -> np.ndarray:
    """Column vector ``sum_i |i>|i> / sqrt(d)``."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    v = np.zeros((d * d, 1), dtype=complex)
    v[np.arange(d) * (d + 1), 0] = 1.0
    return v / np.sqrt(d)


def max_entangled_projector(d: int) -> np.ndarray:
    v = max_entangled(d)
    return v @ dagger(v)


def swap_operator(d: int) -> np.ndarray:
    """Swap ``F = sum_ij |i>|j><j|<i|`` on two ``d``-level systems."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    f = np.zeros((d * d, d * d), dtype=complex)
    for i in range(d):
        for j in range(d):
            f[i * d + j, j * d + i] = 1.0
    return f


def frob(m) -> float:
    return float(np.linalg.norm(np.asarray(m)))


def trace_distance(a, b) -> float:
    w = np.linalg.eigvalsh((as_matrix(a) - as_matrix(b) + dagger(as_matrix(a) - as_matrix(b))) / 2)
    return 0.5 * float(np.sum(np.abs(w)))


def ket(d: int, i: int) -> np.ndarray:
    v = np.zeros((d, 1), dtype=complex)
    v[i, 0] = 1.0
    return v


def projector(d: int, i: int) -> np.ndarray:
    p = np.zeros((d, d), dtype=complex)
    p[i, i] = 1.0
    return p


# ---------------------------------------------------------------- random

def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ginibre(rows: int, cols: int, seed=None) -> np.ndarray:
    rng = _rng(seed)
    return (rng.standard_normal((rows, cols)) + 1j * rng.standard_normal((rows, cols))) / np.sqrt(2)


def random_isometry(rows: int, cols: int, seed=None) -> np.ndarray:
    """Haar-random isometry (``rows >= cols``) from a phase-fixed QR."""
    if rows < cols:
        raise ValueError(f"cannot embed dimension {cols} isometrically into {rows}")
    q, r = np.linalg.qr(ginibre(rows, cols, seed))
    diag = np.diag(r)
    phases = np.where(np.abs(diag) > 0, diag / np.abs(diag), 1.0)
    return q * phases


def random_unitary(d: int, seed=None) -> np.ndarray:
    return random_isometry(d, d, seed)


def random_state(d: int, seed=None, rank: int | None = None) -> np.ndarray:
    """Random density matrix ``G G^dag / Tr`` with ``G`` Ginibre ``d x rank``."""
    g = ginibre(d, d if rank is None else rank, seed)
    rho = g @ dagger(g)
    return rho / np.trace(rho).real


def random_pure_state(d: int, seed=None) -> np.ndarray:
    v = ginibre(d, 1, seed)
    v /= np.linalg.norm(v)
    return v @ dagger(v)


def random_hermitian(d: int, seed=None) -> np.ndarray:
    g = ginibre(d, d, seed)
    return (g + dagger(g)) / 2
