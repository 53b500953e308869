"""Dense complex linear algebra used by every other module.

Operators are plain ``numpy`` complex arrays of shape ``(d, d)``.  Spans of
operators are handled in vectorized (row-major, length ``d*d``) form with the
Hilbert-Schmidt inner product ``<A, B> = tr(A^dagger B)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

DEFAULT_SEED = 0x5EED


class DimensionError(ValueError):
    pass


class NotHermitianError(ValueError):
    pass


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared by the whole package.

    rank_rel
        relative singular-value cutoff for ranks and null spaces
    residual_abs
        bound on conjugation / idempotency / membership residuals
    eig_cluster_rel
        eigenvalue grouping threshold relative to the operator norm
    """

    rank_rel: float = 1e-10
    residual_abs: float = 1e-8
    eig_cluster_rel: float = 1e-6

    def __post_init__(self):
        if min(self.rank_rel, self.residual_abs, self.eig_cluster_rel) <= 0:
            raise ValueError("tolerances must be strictly positive")
        if not self.rank_rel < self.eig_cluster_rel:
            raise ValueError("rank_rel must be smaller than eig_cluster_rel")

    def as_dict(self) -> dict:
        return {
            "rank_rel": self.rank_rel,
            "residual_abs": self.residual_abs,
            "eig_cluster_rel": self.eig_cluster_rel,
        }


DEFAULT_TOL = Tolerances()


def as_mat(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
        raise DimensionError(f"expected a non-empty square matrix, got shape {m.shape}")
    return m


def dag(a: np.ndarray) -> np.ndarray:
    return a.conj().T


def opnorm(a: np.ndarray) -> float:
    """Spectral norm."""
    if a.size == 0:
        return 0.0
    return float(np.linalg.norm(a, 2))


def hs_inner(a, b) -> complex:
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionError(f"shape mismatch {a.shape} vs {b.shape}")
    return complex(np.vdot(a, b))


def hs_norm(a) -> float:
    return float(np.linalg.norm(a))


def orthonormal_basis(ops: Sequence[np.ndarray], tol: Tolerances = DEFAULT_TOL) -> list[np.ndarray]:
    """HS-orthonormal spanning set of ``span(ops)``.

    Modified Gram-Schmidt with one re-orthogonalization pass.  A vector is
    dropped when its norm after projection is below ``tol.rank_rel`` times the
    largest input norm, so the output length is the numerical rank.
    """
    ops = [np.asarray(o, dtype=complex) for o in ops]
    if not ops:
        return []
    shape = ops[0].shape
    if any(o.shape != shape for o in ops):
        raise DimensionError("all operators must have the same shape")
    vecs = [o.reshape(-1) for o in ops]
    cutoff = tol.rank_rel * max(np.linalg.norm(v) for v in vecs)
    basis: list[np.ndarray] = []
    for v in vecs:
        w = v.copy()
        for _ in range(2):
            for q in basis:
                w -= np.vdot(q, w) * q
        nrm = np.linalg.norm(w)
        if nrm > cutoff and nrm > 0:
            basis.append(w / nrm)
    return [q.reshape(shape) for q in basis]


def extend_rows(q: np.ndarray, cands: np.ndarray, cutoff: float) -> np.ndarray:
    """Orthonormal rows spanning ``span(cands)`` modulo ``span(q)``.

    ``q`` holds orthonormal rows (possibly zero of them).  Block projection
    against ``q`` is done twice, then the survivors are Gram-Schmidt'ed among
    themselves with the same two-pass rule as :func:`orthonormal_basis`.
    """
    n = cands.shape[1]
    if cands.shape[0] == 0:
        return np.zeros((0, n), dtype=complex)
    w = np.array(cands, dtype=complex)
    for _ in range(2):
        if q.shape[0]:
            w -= (w @ q.conj().T) @ q
    norms = np.linalg.norm(w, axis=1)
    w = w[norms > cutoff]
    if w.shape[0] > 16:
        # rank-revealing SVD of the residual block, then one more projection
        _, s, vh = np.linalg.svd(w, full_matrices=False)
        w = vh[s > cutoff]
        if q.shape[0]:
            w -= (w @ q.conj().T) @ q
    new: list[np.ndarray] = []
    for v in w:
        for _ in range(2):
            if new:
                nb = np.array(new)
                v = v - (nb.conj() @ v) @ nb
        nrm = np.linalg.norm(v)
        if nrm > cutoff:
            new.append(v / nrm)
    if not new:
        return np.zeros((0, n), dtype=complex)
    return np.array(new)


def hermitian_eig(h, tol: Tolerances = DEFAULT_TOL) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and unitary eigenvectors (columns) of ``h``."""
    h = as_mat(h)
    scale = max(opnorm(h), 1.0)
    if opnorm(h - dag(h)) > tol.residual_abs * scale:
        raise NotHermitianError("matrix is not Hermitian within tolerance")
    w, v = np.linalg.eigh((h + dag(h)) / 2)
    return w, v


def cluster_eigenvalues(w: np.ndarray, scale: float, rel: float) -> list[np.ndarray]:
    """Group ascending eigenvalues whose consecutive gaps are ``<= rel*scale``.

    Returns index arrays, one per cluster.
    """
    if len(w) == 0:
        return []
    thresh = rel * max(scale, 1e-300)
    groups = [[0]]
    for i in range(1, len(w)):
        if w[i] - w[i - 1] > thresh:
            groups.append([i])
        else:
            groups[-1].append(i)
    return [np.array(g) for g in groups]


def null_space(rows, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Orthonormal basis (as columns) of the joint kernel of ``rows``.

    ``rows`` is an ``(m, n)`` array whose rows are linear functionals on
    ``C^n``.  Singular values below ``tol.rank_rel * sigma_max`` count as zero.
    """
    a = np.asarray(rows, dtype=complex)
    if a.ndim != 2:
        raise DimensionError("rows must be a 2-d array")
    m, n = a.shape
    if n == 0:
        return np.zeros((0, 0), dtype=complex)
    if m == 0:
        return np.eye(n, dtype=complex)
    if m >= n:
        _, s, vh = np.linalg.svd(a, full_matrices=False)
    else:
        _, s, vh = np.linalg.svd(a, full_matrices=True)
    smax = s[0] if len(s) else 0.0
    if smax == 0.0:
        return np.eye(n, dtype=complex)
    rank = int(np.sum(s > tol.rank_rel * smax))
    return vh[rank:].conj().T


def unitary_exp(h, t: float, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """``exp(-i t h)`` for Hermitian ``h`` via eigendecomposition."""
    w, v = hermitian_eig(h, tol)
    return (v * np.exp(-1j * t * w)) @ dag(v)


def isometry_from_projector(p, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Columns orthonormally spanning ``range(p)``.

    The columns of ``p`` chosen by a column-pivoted QR are orthonormalized in
    ascending pivot-index order, which makes the result deterministic.
    """
    p = as_mat(p)
    _, _, piv = scipy.linalg.qr(p, pivoting=True, mode="economic")
    # rank of an orthogonal projector is its trace
    rank = int(round(float(np.trace(p).real)))
    if rank <= 0:
        return np.zeros((p.shape[0], 0), dtype=complex)
    cols = np.sort(piv[:rank])
    q, _ = np.linalg.qr(p[:, cols])
    return q


def random_hermitian(d: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (a + dag(a)) / 2


def is_unitary(u, atol: float) -> bool:
    u = np.asarray(u)
    return bool(np.linalg.norm(dag(u) @ u - np.eye(u.shape[0]), 2) <= atol)


def equal_up_to_phase(a, b) -> float:
    """Spectral-norm distance between ``a`` and ``b`` after removing the best global phase."""
    ip = np.vdot(b, a)
    phase = ip / abs(ip) if abs(ip) > 0 else 1.0
    return opnorm(np.asarray(a) - phase * np.asarray(b))
