"""Explicit tensor product structures from operator algebras.

* :func:`wedderburn` -- block form ``H = (+)_J C^{n_J} (x) C^{d_J}`` of a *-algebra
* :func:`induced_tps` -- factorization ``C = H_1 (x) ... (x) H_n`` of a code space
  from mutually commuting factor algebras
* :func:`chain_decompose` -- multi-partite sectors of a nested subalgebra chain
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial, isqrt, prod
from typing import Sequence

import numpy as np

from .algebra import (
    AlgebraError,
    AxiomReport,
    DegenerateDrawError,
    StarAlgebra,
    check_axioms,
    closure,
    code_isometry,
    commutant,
    commuting_in,
    full_algebra,
    minimal_central_projections,
    restrict,
)
from .linalg import (
    DEFAULT_SEED,
    DEFAULT_TOL,
    Tolerances,
    cluster_eigenvalues,
    dag,
    isometry_from_projector,
    opnorm,
    random_hermitian,
)


class NotAFactorBlockError(AlgebraError):
    pass


class AxiomFailureError(AlgebraError):
    def __init__(self, report: AxiomReport):
        super().__init__(f"axioms fail ({', '.join(report.failed_axioms()) or 'iii'}); no induced TPS")
        self.report = report


class ChainError(AlgebraError):
    pass


@dataclass
class IrrepBlock:
    label: int
    n: int
    d: int
    isometry: np.ndarray  # columns ordered (copy, irrep index)
    residual: float = 0.0

    @property
    def dim(self) -> int:
        return self.n * self.d


@dataclass
class IrrepDecomposition:
    algebra_name: str
    blocks: list[IrrepBlock]
    support_dim: int

    def table(self) -> list[tuple[int, int, int]]:
        return [(b.label, b.n, b.d) for b in self.blocks]

    def pairs(self) -> list[tuple[int, int]]:
        return [(b.n, b.d) for b in self.blocks]


@dataclass
class TPSFactorization:
    factor_dims: tuple[int, ...]
    code_isometry: np.ndarray
    factor_provenance: tuple[str, ...]
    residuals: dict = field(default_factory=dict)

    @property
    def code_dim(self) -> int:
        return int(prod(self.factor_dims))

    def pullback(self, op: np.ndarray) -> np.ndarray:
        v = self.code_isometry
        return dag(v) @ op @ v

    def isometry_residual(self) -> float:
        v = self.code_isometry
        return opnorm(dag(v) @ v - np.eye(v.shape[1]))


@dataclass
class ChainSector:
    labels: tuple[int, ...]
    multiplicities: tuple[int, ...]
    terminal_dim: int
    factorization: TPSFactorization

    @property
    def dim(self) -> int:
        return int(prod(self.multiplicities)) * self.terminal_dim

    @property
    def nontrivial(self) -> bool:
        return any(m > 1 for m in self.multiplicities)


@dataclass
class ChainDecomposition:
    sectors: list[ChainSector]
    space_dim: int
    leading_commutant: bool  # True when the top algebra is reducible and contributes a factor

    def dims_table(self) -> list[tuple[int, ...]]:
        return [s.multiplicities + (s.terminal_dim,) for s in self.sectors]


# --------------------------------------------------------------------------
# slot helpers


def extract_slot(x: np.ndarray, dims: Sequence[int], i: int) -> np.ndarray:
    """Normalized partial trace of ``x`` onto slot ``i`` (0-based)."""
    dims = tuple(dims)
    n = len(dims)
    t = np.asarray(x).reshape(dims + dims)
    others = [k for k in range(n) if k != i]
    # move slot i to the front on both sides, trace the rest
    t = np.moveaxis(t, [i, n + i], [0, 1])
    rest = int(prod(dims[k] for k in others))
    t = t.reshape(dims[i], dims[i], rest, rest)
    return np.trace(t, axis1=2, axis2=3) / rest


def embed_slot(m: np.ndarray, dims: Sequence[int], i: int) -> np.ndarray:
    left = int(prod(dims[:i]))
    right = int(prod(dims[i + 1 :]))
    return np.kron(np.kron(np.eye(left), m), np.eye(right))


def locality_residual(fac: TPSFactorization, op: np.ndarray, slot: int) -> float:
    """``||V^+ G V - local(slot, extract(slot, V^+ G V))|| / ||G||``."""
    x = fac.pullback(op)
    rec = embed_slot(extract_slot(x, fac.factor_dims, slot), fac.factor_dims, slot)
    return opnorm(x - rec) / max(opnorm(op), 1e-300)


# --------------------------------------------------------------------------
# Wedderburn


def _block_residual(iso: np.ndarray, ops: Sequence[np.ndarray], n: int, d: int) -> float:
    worst = 0.0
    for g in ops:
        x = dag(iso) @ g @ iso
        m = x.reshape(n, d, n, d)[0, :, 0, :]
        worst = max(worst, opnorm(x - np.kron(np.eye(n), m)) / max(opnorm(g), 1e-300))
    return worst


def _irrep_copies(ar: StarAlgebra, n: int, d: int, rng, tol: Tolerances, seed: int) -> np.ndarray:
    """Unitary on the block whose columns are ordered (copy, irrep index)."""
    r = ar.space_dim
    if n == 1:
        return np.eye(r, dtype=complex)
    ac = commutant(ar, tol, seed)
    ops = ar.spanning_ops()
    for _ in range(5):
        h = ac.random_hermitian(rng)
        w, v = np.linalg.eigh(h)
        groups = cluster_eigenvalues(w, max(abs(w).max(), 1e-300), tol.eig_cluster_rel)
        if len(groups) != n or any(len(g) != d for g in groups):
            continue
        v1 = v[:, groups[0]]
        c = rng.standard_normal(ac.dim) + 1j * rng.standard_normal(ac.dim)
        r2 = ac.element(c)
        cols = [v1]
        ok = True
        for g in groups[1:]:
            pj = v[:, g]
            m = pj @ (dag(pj) @ r2 @ v1)
            u, s, vh = np.linalg.svd(m, full_matrices=False)
            if s[-1] <= tol.eig_cluster_rel * max(s[0], 1e-300) or s[0] - s[-1] > tol.eig_cluster_rel * s[0] * 10:
                ok = False
                break
            cols.append(u @ vh)
        if not ok:
            continue
        vv = np.hstack(cols)
        if _block_residual(vv, ops, n, d) <= tol.residual_abs:
            return vv
    raise DegenerateDrawError("wedderburn irrep copies", seed)


def wedderburn(a: StarAlgebra, seed: int = DEFAULT_SEED, tol: Tolerances = DEFAULT_TOL) -> IrrepDecomposition:
    """Decompose the space into central blocks ``C^{n_J} (x) C^{d_J}`` of ``a``.

    Blocks are ordered by ascending ``d``, then descending ``n``, then by the
    trace of the central projector against a fixed seeded Hermitian probe.
    """
    dspace = a.space_dim
    projs = minimal_central_projections(a, seed, tol)
    probe = random_hermitian(dspace, np.random.default_rng([seed, 3]))
    rng = np.random.default_rng([seed, 2])
    raw = []
    for p in projs:
        w = isometry_from_projector(p, tol)
        r = w.shape[1]
        ar = restrict(a, w, tol)
        dj = isqrt(ar.dim)
        if dj * dj != ar.dim or r % dj:
            raise NotAFactorBlockError(f"restricted dimension {ar.dim} on a block of size {r} is not a factor block")
        n = r // dj
        v = _irrep_copies(ar, n, dj, rng, tol, seed)
        iso = w @ v
        res = _block_residual(iso, a.spanning_ops(), n, dj)
        raw.append((dj, -n, float(np.trace(p @ probe).real), n, iso, res))
    raw.sort(key=lambda t: (t[0], t[1], t[2]))
    blocks = [IrrepBlock(i, n, dj, iso, res) for i, (dj, _, _, n, iso, res) in enumerate(raw)]
    return IrrepDecomposition(a.name, blocks, sum(b.dim for b in blocks))


def multiplicity_formula(n: int, j) -> int:
    """Multiplicity of the spin-``j`` irrep in ``n`` qubits, ``(2j+1) n! / ((n/2+j+1)! (n/2-j)!)``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    tj = Fraction(j) * 2
    if tj.denominator != 1:
        raise ValueError(f"j={j} is not a half-integer")
    tj = int(tj)
    if tj < 0 or tj > n or (n - tj) % 2:
        raise ValueError(f"j={j} is not an allowed spin for n={n}")
    a = (n + tj) // 2 + 1
    b = (n - tj) // 2
    num = (tj + 1) * factorial(n)
    den = factorial(a) * factorial(b)
    if num % den:
        raise ArithmeticError("non-integer multiplicity")
    return num // den


# --------------------------------------------------------------------------
# induced TPS


def _factorize(algs: list[StarAlgebra], seed: int, tol: Tolerances) -> tuple[np.ndarray, list[int]]:
    c = algs[0].space_dim
    first = algs[0]
    if len(algs) == 1:
        if first.dim != c * c:
            raise AlgebraError(f"last factor {first.name!r} is not the full matrix algebra")
        return np.eye(c, dtype=complex), [c]
    dec = wedderburn(first, seed, tol)
    if len(dec.blocks) != 1:
        raise AlgebraError(f"{first.name!r} is not a factor on the code space")
    blk = dec.blocks[0]
    n, d1 = blk.n, blk.d
    # reorder columns from (copy, irrep) to (irrep, copy): slot 1 is the irrep
    order = [copy * d1 + irr for irr in range(d1) for copy in range(n)]
    v1 = blk.isometry[:, order]
    e = v1[:, :n]
    rest = []
    for b in algs[1:]:
        for g in b.spanning_ops():
            x = dag(v1) @ g @ v1
            m = x[:n, :n]
            if opnorm(x - np.kron(np.eye(d1), m)) > tol.residual_abs * max(opnorm(g), 1.0):
                raise AlgebraError(f"{b.name!r} does not act trivially on the factor of {first.name!r}")
        rest.append(restrict(b, e, tol))
    vr, dr = _factorize(rest, seed, tol)
    return v1 @ np.kron(np.eye(d1), vr), [d1] + dr


def induced_tps(
    algebras: Sequence[StarAlgebra],
    code_space: np.ndarray | None = None,
    seed: int = DEFAULT_SEED,
    tol: Tolerances = DEFAULT_TOL,
) -> TPSFactorization:
    """Isometry ``(x)_i C^{d_i} -> C`` under which algebra ``i`` acts on slot ``i`` only."""
    report = check_axioms(algebras, code_space, tol, seed)
    if not report.passed:
        raise AxiomFailureError(report)
    w = code_isometry(code_space, algebras[0].space_dim, tol)
    res = [restrict(a, w, tol) for a in algebras]
    v, dims = _factorize(res, seed, tol)
    fac = TPSFactorization(tuple(dims), w @ v, tuple(a.name for a in algebras))
    fac.residuals = {
        "isometry": fac.isometry_residual(),
        "locality": [
            max(locality_residual(fac, g, i) for g in a.spanning_ops()) for i, a in enumerate(algebras)
        ],
    }
    return fac


# --------------------------------------------------------------------------
# nested chains


def check_chain(chain: Sequence[StarAlgebra], tol: Tolerances = DEFAULT_TOL) -> None:
    for i in range(1, len(chain)):
        big, small = chain[i - 1], chain[i]
        if small.space_dim != big.space_dim:
            raise ChainError(f"level {i}: dimension mismatch")
        if small.dim >= big.dim:
            raise ChainError(f"level {i}: inclusion is not strict ({small.dim} >= {big.dim})")
        worst = max(big.residual(b) for b in small.basis)
        if worst > tol.residual_abs:
            raise ChainError(f"level {i}: {small.name!r} is not contained in {big.name!r} (residual {worst:.3g})")


def chain_subsystems(
    chain: Sequence[StarAlgebra], tol: Tolerances = DEFAULT_TOL, seed: int = DEFAULT_SEED
) -> list[StarAlgebra]:
    """Subsystem algebras ``A_i = B_i' ^ B_{i-1}`` for ``i = 1..n``."""
    check_chain(chain, tol)
    d = chain[0].space_dim
    out = []
    for i in range(1, len(chain)):
        name = f"A{i}"
        if chain[i - 1].dim == d * d:
            ai = commutant(chain[i], tol, seed, name)
        else:
            ai = commuting_in(chain[i - 1], chain[i].spanning_ops(), tol, name)
        out.append(ai)
    return out


def chain_roundtrip(
    chain: Sequence[StarAlgebra],
    subsystems: Sequence[StarAlgebra],
    decomposition: ChainDecomposition,
    tol: Tolerances = DEFAULT_TOL,
) -> list[dict]:
    """Compare ``B_i`` with the join of ``A_{i+1}..A_n`` and ``B_n`` on every sector.

    Returns one record per (sector, level) with both restricted dimensions.
    """
    out = []
    top = len(chain) - 1
    for si, sec in enumerate(decomposition.sectors):
        w = sec.factorization.code_isometry
        for i in range(1, top + 1):
            parts = [restrict(a, w, tol) for a in subsystems[i:]] + [restrict(chain[top], w, tol)]
            ops = [o for p in parts for o in p.spanning_ops()]
            jd = closure(ops, tol).dim
            bd = restrict(chain[i], w, tol).dim
            out.append({"sector": si, "level": i, "join_dim": jd, "chain_dim": bd, "match": jd == bd})
    return out


def chain_decompose(
    chain: Sequence[StarAlgebra], seed: int = DEFAULT_SEED, tol: Tolerances = DEFAULT_TOL
) -> ChainDecomposition:
    """Iterate :func:`wedderburn` down the chain; one sector per path of blocks.

    Each level decomposes the irrep factor of the previous level (pulled back
    through the first copy) with respect to the next algebra.  The composed
    isometry of a sector has columns ordered (copy_1, ..., copy_n, irrep).
    If the top algebra is not all of ``End(H)``, it is decomposed first and
    its multiplicity space becomes a leading factor.
    """
    check_chain(chain, tol)
    d = chain[0].space_dim
    reducible = chain[0].dim != d * d
    levels = list(chain) if reducible else list(chain[1:])
    names = ([f"{chain[0].name}'"] if reducible else []) + [f"A{i}" for i in range(1, len(chain))]
    terminal_name = chain[-1].name or f"B{len(chain) - 1}"
    sectors: list[ChainSector] = []

    def rec(phi: np.ndarray, first: np.ndarray, labels, mults, k):
        f = first.shape[1]
        if k == len(levels):
            dims = tuple(mults) + (f,)
            prov = tuple(names[: len(mults)]) + (terminal_name,)
            fac = TPSFactorization(dims, phi, prov)
            fac.residuals = {"isometry": fac.isometry_residual()}
            sectors.append(ChainSector(tuple(labels), tuple(mults), f, fac))
            return
        sub = restrict(levels[k], first, tol)
        dec = wedderburn(sub, seed, tol)
        mtot = int(prod(mults)) if mults else 1
        for blk in dec.blocks:
            phi2 = phi @ np.kron(np.eye(mtot), blk.isometry)
            first2 = first @ blk.isometry[:, : blk.d]
            rec(phi2, first2, labels + [blk.label], mults + [blk.n], k + 1)

    eye = np.eye(d, dtype=complex)
    rec(eye, eye, [], [], 0)
    return ChainDecomposition(sectors, d, reducible)


def stabilizer_chain(xs: Sequence[np.ndarray], tol: Tolerances = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> list[StarAlgebra]:
    """``B_0 = End(H)``, ``B_i = [C{X_1..X_i}]'``."""
    xs = [np.asarray(x, dtype=complex) for x in xs]
    if not xs:
        raise ChainError("need the Hilbert-space dimension; pass at least one operator or use full_algebra")
    d = xs[0].shape[0]
    eye = np.eye(d)
    for i, x in enumerate(xs, 1):
        if opnorm(dag(x) @ x - eye) > tol.residual_abs:
            raise ChainError(f"X{i} is not unitary")
        if abs(np.trace(x)) > tol.residual_abs * d:
            raise ChainError(f"X{i} is not traceless")
        if opnorm(x @ x - eye) > tol.residual_abs:
            raise ChainError(f"X{i} does not square to the identity")
        for j, y in enumerate(xs[:i - 1], 1):
            if opnorm(x @ y - y @ x) > tol.residual_abs:
                raise ChainError(f"X{i} does not commute with X{j}")
    chain = [full_algebra(d, "B0")]
    for i in range(1, len(xs) + 1):
        chain.append(commutant(closure(xs[:i], tol), tol, seed, f"B{i}"))
    return chain


def syndrome_factorization(
    decomposition: ChainDecomposition, xs: Sequence[np.ndarray], tol: Tolerances = DEFAULT_TOL
) -> TPSFactorization:
    """Assemble stabilizer sectors into ``(C^2)^{(x)k} (x) C^{2^{N-k}}``.

    Sector ``s`` goes to syndrome bits ``b_i = 0`` (``X_i = +1``) or ``1``
    (``X_i = -1``), so every ``X_i`` pulls back to ``Z`` on slot ``i``.
    """
    k = len(xs)
    by_bits = {}
    for sec in decomposition.sectors:
        v = sec.factorization.code_isometry
        bits = []
        for x in xs:
            ev = np.trace(dag(v) @ x @ v).real / v.shape[1]
            bits.append(0 if ev > 0 else 1)
        by_bits[tuple(bits)] = v
    if len(by_bits) != 2**k:
        raise ChainError(f"expected {2**k} syndrome sectors, found {len(by_bits)}")
    cols = [by_bits[tuple(int(c) for c in np.binary_repr(s, k))] for s in range(2**k)]
    v = np.hstack(cols)
    rest = cols[0].shape[1]
    fac = TPSFactorization((2,) * k + (rest,), v, tuple(f"X{i + 1}" for i in range(k)) + ("code",))
    fac.residuals = {"isometry": fac.isometry_residual()}
    return fac
