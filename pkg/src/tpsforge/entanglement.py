"""Entanglement relative to a chosen tensor product structure."""
from __future__ import annotations

from math import log, prod
from typing import Sequence

import numpy as np

from .factorize import TPSFactorization
from .linalg import DEFAULT_TOL, Tolerances, dag, opnorm


class CodeSpaceError(ValueError):
    pass


class DensityMatrixError(ValueError):
    pass


def normalize(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ValueError("zero vector")
    return psi / nrm


def to_tps_coordinates(psi, tps: TPSFactorization, atol: float = 1e-8) -> np.ndarray:
    """Amplitude tensor of shape ``tps.factor_dims``."""
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if abs(np.linalg.norm(psi) - 1) > 1e-10:
        raise ValueError("state is not normalized")
    v = tps.code_isometry
    c = dag(v) @ psi
    out = np.linalg.norm(psi - v @ c)
    if out > atol:
        raise CodeSpaceError(f"state has norm {out:.3g} outside the code subspace")
    return c.reshape(tps.factor_dims)


def reduced_density(psi, tps: TPSFactorization, keep: Sequence[int]) -> np.ndarray:
    """Partial trace onto the 0-based factor indices in ``keep``."""
    t = to_tps_coordinates(psi, tps)
    n = len(tps.factor_dims)
    keep = sorted(set(int(k) for k in keep))
    if not keep or len(keep) == n or keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep must be a nonempty proper subset of 0..{n - 1}")
    drop = [k for k in range(n) if k not in keep]
    t = np.transpose(t, keep + drop)
    dk = int(prod(tps.factor_dims[k] for k in keep))
    m = t.reshape(dk, -1)
    return m @ dag(m)


def entropy(rho, tol: Tolerances = DEFAULT_TOL) -> float:
    """Von Neumann entropy in nats; eigenvalues below 1e-12 count as zero."""
    rho = np.asarray(rho, dtype=complex)
    if abs(np.trace(rho) - 1) > 1e-10:
        raise DensityMatrixError("trace is not 1")
    if opnorm(rho - dag(rho)) > tol.residual_abs:
        raise DensityMatrixError("not Hermitian")
    w = np.linalg.eigvalsh((rho + dag(rho)) / 2)
    if w.min() < -tol.residual_abs:
        raise DensityMatrixError("not positive semidefinite")
    w = w[w >= 1e-12]
    # rounding can push a pure state slightly below zero
    return max(0.0, float(-np.sum(w * np.log(w))))


def entropy_bits(rho, tol: Tolerances = DEFAULT_TOL) -> float:
    return entropy(rho, tol) / log(2)


def cut_entropy(psi, tps: TPSFactorization, keep: Sequence[int] = (0,)) -> float:
    return entropy(reduced_density(psi, tps, keep))


def operator_schmidt(u, tps: TPSFactorization, cutoff: float = 1e-12) -> np.ndarray:
    """Descending operator-Schmidt coefficients of ``u`` across a bipartite TPS.

    Singular values of the realigned pullback ``(d1^2, d2^2)`` matrix, so that
    ``sum(s**2) == d1*d2`` for a unitary.  Values below ``cutoff`` times the
    largest are dropped.
    """
    if len(tps.factor_dims) != 2:
        raise ValueError("operator Schmidt decomposition needs a bipartite TPS")
    d1, d2 = tps.factor_dims
    x = tps.pullback(np.asarray(u, dtype=complex))
    r = x.reshape(d1, d2, d1, d2).transpose(0, 2, 1, 3).reshape(d1 * d1, d2 * d2)
    s = np.linalg.svd(r, compute_uv=False)
    return s[s > cutoff * max(s[0], 1e-300)]


def schmidt_rank(u, tps: TPSFactorization) -> int:
    return int(len(operator_schmidt(u, tps)))
