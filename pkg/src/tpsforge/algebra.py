"""Finite-dimensional matrix *-algebras generated by accessible observables.

An algebra is stored as an HS-orthonormal basis of operators on ``C^d``.  When
it was built by :func:`closure` the generating observables are kept as well;
they give a much smaller set of commutation constraints than the basis.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import isqrt, prod
from typing import Sequence

import numpy as np

from .linalg import (
    DEFAULT_SEED,
    DEFAULT_TOL,
    DimensionError,
    Tolerances,
    as_mat,
    cluster_eigenvalues,
    dag,
    extend_rows,
    isometry_from_projector,
    null_space,
    opnorm,
)


class AlgebraError(ValueError):
    pass


class InvarianceError(AlgebraError):
    pass


class DegenerateDrawError(RuntimeError):
    def __init__(self, what: str, seed: int):
        super().__init__(f"{what}: verification failed after 5 random draws (seed={seed})")
        self.seed = seed


@dataclass(frozen=True, eq=False)
class StarAlgebra:
    space_dim: int
    basis: np.ndarray  # (k, d, d), HS-orthonormal
    name: str = ""
    generators: tuple | None = field(default=None, repr=False)
    contains_identity: bool = True

    @property
    def dim(self) -> int:
        return int(self.basis.shape[0])

    @property
    def vecs(self) -> np.ndarray:
        return self.basis.reshape(self.dim, -1)

    def coefficients(self, x) -> np.ndarray:
        return self.vecs.conj() @ np.asarray(x).reshape(-1)

    def project(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=complex)
        return (self.coefficients(x) @ self.vecs).reshape(x.shape)

    def residual(self, x) -> float:
        """Relative HS distance of ``x`` from the span of the basis."""
        x = np.asarray(x, dtype=complex)
        nx = np.linalg.norm(x)
        if nx == 0:
            return 0.0
        return float(np.linalg.norm(x - self.project(x)) / nx)

    def contains(self, x, tol: Tolerances = DEFAULT_TOL) -> bool:
        return self.residual(x) <= tol.residual_abs

    def element(self, coeffs) -> np.ndarray:
        return np.tensordot(np.asarray(coeffs), self.basis, axes=1)

    def random_hermitian(self, rng: np.random.Generator) -> np.ndarray:
        c = rng.standard_normal(self.dim) + 1j * rng.standard_normal(self.dim)
        r = self.element(c)
        return (r + dag(r)) / 2

    def spanning_ops(self) -> list[np.ndarray]:
        """Generators (and adjoints) if known, otherwise the basis."""
        if self.generators is None:
            return list(self.basis)
        ops = []
        for g in self.generators:
            ops.append(g)
            if opnorm(g - dag(g)) > 1e-12 * max(opnorm(g), 1.0):
                ops.append(dag(g))
        return ops

    def is_abelian(self, tol: Tolerances = DEFAULT_TOL) -> bool:
        ops = self.spanning_ops()
        return all(
            opnorm(a @ b - b @ a) <= tol.residual_abs * max(opnorm(a) * opnorm(b), 1e-300)
            for i, a in enumerate(ops)
            for b in ops[i + 1 :]
        )

    def closure_residuals(self) -> dict:
        """Worst membership residuals of adjoints, products and identity.

        Quadratic in ``dim``; meant for tests and small algebras.
        """
        adj = max((self.residual(dag(b)) for b in self.basis), default=0.0)
        prods = self.basis[:, None] @ self.basis[None, :]
        prods = prods.reshape(-1, self.space_dim, self.space_dim)
        mult = max((self.residual(p) for p in prods), default=0.0)
        ident = self.residual(np.eye(self.space_dim))
        return {"adjoint": adj, "product": mult, "identity": ident}


def _from_rows(rows: np.ndarray, d: int, name: str, generators=None) -> StarAlgebra:
    return StarAlgebra(d, rows.reshape(-1, d, d), name, None if generators is None else tuple(generators))


def span_algebra(ops: Sequence[np.ndarray], name: str = "", tol: Tolerances = DEFAULT_TOL, generators=None) -> StarAlgebra:
    """Algebra object for a span already known to be a unital *-algebra."""
    ops = [as_mat(o) for o in ops]
    d = ops[0].shape[0]
    rows = np.array([o.reshape(-1) for o in ops])
    cutoff = tol.rank_rel * max(np.linalg.norm(rows, axis=1).max(), 1e-300)
    q = extend_rows(np.zeros((0, d * d), dtype=complex), rows, cutoff)
    return _from_rows(q, d, name, generators)


def full_algebra(d: int, name: str = "End") -> StarAlgebra:
    return StarAlgebra(d, np.eye(d * d, dtype=complex).reshape(d * d, d, d), name)


def scalars(d: int, name: str = "C1") -> StarAlgebra:
    return StarAlgebra(d, (np.eye(d, dtype=complex) / np.sqrt(d))[None], name, (np.eye(d, dtype=complex),))


def closure(generators: Sequence[np.ndarray], tol: Tolerances = DEFAULT_TOL, name: str = "") -> StarAlgebra:
    """Smallest unital *-algebra containing ``generators``.

    The span is seeded with the identity, the generators and their adjoints;
    then every newly found basis element is multiplied on the left by each
    seed operator until no new direction appears.  The result is the span of
    all words in the generators, i.e. the generated algebra.
    """
    if len(generators) == 0:
        raise AlgebraError("closure needs at least one generator")
    gens = [as_mat(g) for g in generators]
    d = gens[0].shape[0]
    if any(g.shape != (d, d) for g in gens):
        raise DimensionError("generators must share one square shape")
    letters = []
    for g in gens:
        letters.append(g)
        if opnorm(g - dag(g)) > 1e-12 * max(opnorm(g), 1.0):
            letters.append(dag(g))
    seed = np.array([np.eye(d, dtype=complex).reshape(-1)] + [g.reshape(-1) for g in letters])
    scale = max(np.linalg.norm(seed, axis=1).max(), 1.0)
    cutoff = tol.rank_rel * scale
    q = extend_rows(np.zeros((0, d * d), dtype=complex), seed, cutoff)
    frontier = q
    letters_arr = np.array(letters)
    while frontier.shape[0] and q.shape[0] < d * d:
        f = frontier.reshape(-1, d, d)
        cands = (letters_arr[:, None] @ f[None, :]).reshape(-1, d * d)
        new = extend_rows(q, cands, cutoff)
        q = np.vstack([q, new])
        frontier = new
    return _from_rows(q, d, name, gens)


def join(a: StarAlgebra, b: StarAlgebra, tol: Tolerances = DEFAULT_TOL, name: str = "") -> StarAlgebra:
    if a.space_dim != b.space_dim:
        raise DimensionError("algebras act on different spaces")
    return closure(a.spanning_ops() + b.spanning_ops(), tol, name or f"{a.name} v {b.name}")


def join_all(algebras: Sequence[StarAlgebra], tol: Tolerances = DEFAULT_TOL, name: str = "") -> StarAlgebra:
    ops = [o for alg in algebras for o in alg.spanning_ops()]
    return closure(ops, tol, name or " v ".join(a.name for a in algebras))


def _constraint_ops(a: StarAlgebra, rng: np.random.Generator) -> tuple[list[np.ndarray], bool]:
    """Operators whose joint commutant is ``a'``; flag says whether that is exact.

    With no stored generators, three random Hermitian elements are used; these
    generate ``a`` for almost every draw, and callers certify the result.
    """
    d = a.space_dim
    eye = np.eye(d)
    ops = a.spanning_ops() if a.generators is not None else [a.random_hermitian(rng) for _ in range(3)]
    exact = a.generators is not None
    kept = []
    for g in ops:
        tr = np.trace(g) / d
        if opnorm(g - tr * eye) > 1e-12 * max(opnorm(g), 1.0):
            kept.append(g)
    return kept, exact


def _commutator_rows(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    """Columns ``vec([g, x_l])`` for a batch ``x`` of shape (k, d, d)."""
    c = g[None] @ x - x @ g[None]
    return c.reshape(x.shape[0], -1).T


def _commuting_subspace(cands: np.ndarray, constraints: Sequence[np.ndarray], tol: Tolerances) -> np.ndarray:
    """Orthonormal combinations of the (orthonormal) batch ``cands`` commuting with all constraints.

    Returns the coefficient matrix ``N`` (k, r) with orthonormal columns.
    """
    k = cands.shape[0]
    n = np.eye(k, dtype=complex)
    for g in constraints:
        if n.shape[1] == 0:
            break
        x = np.tensordot(n.T, cands, axes=1)
        rows = _commutator_rows(x, g)
        # constraint already satisfied on the whole candidate set
        if np.abs(rows).max() <= tol.rank_rel * opnorm(g):
            continue
        n = n @ null_space(rows, tol)
    return n


def commutant(a: StarAlgebra, tol: Tolerances = DEFAULT_TOL, seed: int = DEFAULT_SEED, name: str = "") -> StarAlgebra:
    """``{X : [X, B] = 0 for all B in a}``.

    Unknowns are first restricted to operators block-diagonal in the
    eigenbasis of a random Hermitian element of ``a`` (a necessary condition),
    then the vectorized commutator maps of the remaining constraints are
    stacked and their null space taken.
    """
    d = a.space_dim
    name = name or f"{a.name}'"
    if a.dim == 1:
        return full_algebra(d, name)
    rng = np.random.default_rng(seed)
    cons, exact = _constraint_ops(a, rng)
    if not cons:
        return full_algebra(d, name)
    h = a.random_hermitian(rng)
    w, u = np.linalg.eigh(h)
    groups = cluster_eigenvalues(w, max(abs(w).max(), 1e-300), tol.eig_cluster_rel)
    ai = np.concatenate([np.repeat(g, len(g)) for g in groups])
    bi = np.concatenate([np.tile(g, len(g)) for g in groups])
    k = len(ai)
    cands = np.zeros((k, d, d), dtype=complex)
    cands[np.arange(k), ai, bi] = 1.0
    tilde = [dag(u) @ g @ u for g in cons]
    n = _commuting_subspace(cands, tilde, tol)
    xt = np.tensordot(n.T, cands, axes=1)
    x = u[None] @ xt @ dag(u)[None]
    if not exact:
        probe = a.random_hermitian(rng)
        scale = opnorm(probe)
        worst = max((opnorm(xi @ probe - probe @ xi) for xi in x), default=0.0)
        if worst > tol.residual_abs * scale:
            n = _commuting_subspace(x, list(a.basis), tol)
            x = np.tensordot(n.T, x, axes=1)
    return StarAlgebra(d, x, name)


def commuting_in(a: StarAlgebra, ops: Sequence[np.ndarray], tol: Tolerances = DEFAULT_TOL, name: str = "") -> StarAlgebra:
    """Elements of ``a`` commuting with every operator in ``ops``."""
    n = _commuting_subspace(a.basis, list(ops), tol)
    x = np.tensordot(n.T, a.basis, axes=1)
    return StarAlgebra(a.space_dim, x, name)


def center(a: StarAlgebra, tol: Tolerances = DEFAULT_TOL, seed: int = DEFAULT_SEED) -> StarAlgebra:
    """``a`` intersected with its commutant."""
    d = a.space_dim
    name = f"Z({a.name})"
    if a.dim == 1 or a.dim == d * d:
        return scalars(d, name)
    rng = np.random.default_rng(seed)
    cons, exact = _constraint_ops(a, rng)
    z = commuting_in(a, cons, tol, name)
    if not exact:
        probe = a.random_hermitian(rng)
        if any(opnorm(x @ probe - probe @ x) > tol.residual_abs * opnorm(probe) for x in z.basis):
            z = commuting_in(a, list(a.basis), tol, name)
    return z


def intersection(a: StarAlgebra, b: StarAlgebra, tol: Tolerances = DEFAULT_TOL, name: str = "") -> StarAlgebra:
    """Span intersection: null space of the component of ``b`` orthogonal to ``a``."""
    if a.space_dim != b.space_dim:
        raise DimensionError("algebras act on different spaces")
    if a.dim < b.dim:
        a, b = b, a
    va, vb = a.vecs, b.vecs
    resid = vb - (vb @ va.conj().T) @ va
    # coefficient vectors c with c @ resid == 0
    ns = null_space(resid.T, tol) if np.abs(resid).max() > tol.rank_rel else np.eye(b.dim, dtype=complex)
    rows = ns.T @ vb
    return _from_rows(rows, a.space_dim, name or f"{a.name} ^ {b.name}")


def is_subalgebra(small: StarAlgebra, big: StarAlgebra, tol: Tolerances = DEFAULT_TOL) -> float:
    """Worst relative residual of ``small``'s basis against ``big``'s span."""
    return max(big.residual(b) for b in small.basis)


def restrict(a: StarAlgebra, iso: np.ndarray, tol: Tolerances = DEFAULT_TOL, name: str = "") -> StarAlgebra:
    """Compress ``a`` by an isometry ``iso`` (d x c) whose range is ``a``-invariant."""
    c = iso.shape[1]
    comp = dag(iso)[None] @ a.basis @ iso[None]
    rows = comp.reshape(a.dim, -1)
    cutoff = tol.rank_rel * max(np.linalg.norm(rows, axis=1).max(), 1e-300)
    q = extend_rows(np.zeros((0, c * c), dtype=complex), rows, cutoff)
    gens = None
    if a.generators is not None:
        gens = []
        for g in a.generators:
            gr = dag(iso) @ g @ iso
            # generators annihilated by the compression carry no constraint
            if opnorm(gr) > 1e-12 * max(opnorm(g), 1.0):
                gens.append(gr)
        gens = gens or [np.eye(c, dtype=complex)]
    return _from_rows(q, c, name or a.name, gens)


def check_invariance(a: StarAlgebra, p: np.ndarray, tol: Tolerances = DEFAULT_TOL) -> float:
    """Worst relative commutator residual between ``p`` and ``a``'s spanning operators."""
    return max(opnorm(p @ g - g @ p) / max(opnorm(g), 1e-300) for g in a.spanning_ops())


def minimal_central_projections(a: StarAlgebra, seed: int = DEFAULT_SEED, tol: Tolerances = DEFAULT_TOL) -> list[np.ndarray]:
    """Orthogonal projections onto the blocks of ``a``'s center (in ascending eigenvalue order of the probe)."""
    d = a.space_dim
    z = center(a, tol, seed)
    if z.dim == 1:
        return [np.eye(d, dtype=complex)]
    rng = np.random.default_rng([seed, 1])
    for _ in range(5):
        c = rng.standard_normal(z.dim)
        h = z.element(c)
        h = (h + dag(h)) / 2
        w, v = np.linalg.eigh(h)
        groups = cluster_eigenvalues(w, max(abs(w).max(), 1e-300), tol.eig_cluster_rel)
        projs = [v[:, g] @ dag(v[:, g]) for g in groups]
        if len(projs) != z.dim:
            continue
        ok = all(
            opnorm(p @ p - p) <= tol.residual_abs and z.residual(p) <= tol.residual_abs for p in projs
        )
        if ok:
            return projs
    raise DegenerateDrawError("minimal_central_projections", seed)


# --------------------------------------------------------------------------
# axioms


@dataclass
class AxiomReport:
    names: list[str]
    code_dim: int
    pairwise_commute: list[list[bool]]
    pairwise_residual: list[list[float]]
    each_is_factor: list[bool]
    center_dims: list[int]
    algebra_dims: list[int]
    join_dim: int
    expected_dim: int
    factor_dims: list[int]
    completeness: bool

    @property
    def worst_residual(self) -> float:
        return max((r for row in self.pairwise_residual for r in row), default=0.0)

    @property
    def passed(self) -> bool:
        return self.completeness

    def failed_axioms(self) -> list[str]:
        out = []
        if not all(all(row) for row in self.pairwise_commute):
            out.append("ii")
        if not self.completeness:
            out.append("iii")
        return out

    def as_dict(self) -> dict:
        return {
            "names": list(self.names),
            "code_dim": self.code_dim,
            "pairwise_commute": self.pairwise_commute,
            "pairwise_residual": self.pairwise_residual,
            "worst_commutator_residual": self.worst_residual,
            "each_is_factor": self.each_is_factor,
            "center_dims": self.center_dims,
            "algebra_dims": self.algebra_dims,
            "join_dim": self.join_dim,
            "expected_dim": self.expected_dim,
            "factor_dims": self.factor_dims,
            "completeness": self.completeness,
        }


def _pair_residual(a: StarAlgebra, b: StarAlgebra) -> float:
    worst = 0.0
    for x in a.spanning_ops():
        nx = opnorm(x)
        for y in b.spanning_ops():
            r = opnorm(x @ y - y @ x) / max(nx * opnorm(y), 1e-300)
            worst = max(worst, r)
    return worst


def _product_span_dim(algebras: Sequence[StarAlgebra], tol: Tolerances) -> int:
    """Dimension of span{a_1 a_2 ... a_n}; equals the join when the algebras commute."""
    d = algebras[0].space_dim
    cur = algebras[0].basis
    for alg in algebras[1:]:
        prods = (cur[:, None] @ alg.basis[None, :]).reshape(-1, d * d)
        cutoff = tol.rank_rel * max(np.linalg.norm(prods, axis=1).max(), 1e-300)
        rows = extend_rows(np.zeros((0, d * d), dtype=complex), prods, cutoff)
        cur = rows.reshape(-1, d, d)
    return int(cur.shape[0])


def code_isometry(code_space, d: int, tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    if code_space is None:
        return np.eye(d, dtype=complex)
    return isometry_from_projector(code_space, tol)


def check_axioms(
    algebras: Sequence[StarAlgebra],
    code_space: np.ndarray | None = None,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> AxiomReport:
    """Restrict to the code space and test independence and completeness."""
    if not algebras:
        raise AlgebraError("need at least one algebra")
    d = algebras[0].space_dim
    if any(a.space_dim != d for a in algebras):
        raise DimensionError("algebras act on different spaces")
    if code_space is not None:
        code_space = as_mat(code_space)
        for a in algebras:
            if check_invariance(a, code_space, tol) > tol.residual_abs:
                raise InvarianceError(f"code space is not invariant under algebra {a.name!r}")
    w = code_isometry(code_space, d, tol)
    c = w.shape[1]
    res = [restrict(a, w, tol) for a in algebras]
    n = len(res)
    resid = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i + 1, n):
            r = _pair_residual(res[i], res[j])
            resid[i][j] = resid[j][i] = r
    commute = [[resid[i][j] <= tol.residual_abs for j in range(n)] for i in range(n)]
    cdims = [center(a, tol, seed).dim for a in res]
    factors = [cd == 1 for cd in cdims]
    fdims = []
    for a in res:
        r = isqrt(a.dim)
        fdims.append(r if r * r == a.dim else 0)
    all_commute = all(all(row) for row in commute)
    if all_commute:
        jdim = _product_span_dim(res, tol)
    else:
        jdim = join_all(res, tol).dim
    complete = all_commute and all(factors) and jdim == c * c and prod(fdims) == c
    return AxiomReport(
        names=[a.name for a in algebras],
        code_dim=c,
        pairwise_commute=commute,
        pairwise_residual=resid,
        each_is_factor=factors,
        center_dims=cdims,
        algebra_dims=[a.dim for a in res],
        join_dim=jdim,
        expected_dim=c * c,
        factor_dims=fdims,
        completeness=complete,
    )


# --------------------------------------------------------------------------
# superselection

SECTOR_RULE = (
    "candidate code spaces are the charge sectors of Q and their refinement by the center "
    "of the join of the projected algebras; one-dimensional candidates are skipped; "
    "order: descending dimension, then ascending candidate index"
)


@dataclass
class SuperselectionReport:
    projected_algebras: list[StarAlgebra]
    outcome: str  # "NewTPS" or "AxiomFailure"
    sector: np.ndarray | None
    report: AxiomReport | None
    factorization: object | None = None
    failed_axioms: list[str] = field(default_factory=list)
    candidates: list[dict] = field(default_factory=list)
    sector_rule: str = SECTOR_RULE


def project_onto(alg: StarAlgebra, x: np.ndarray) -> np.ndarray:
    return alg.project(x)


def superselect(
    algebras: Sequence[StarAlgebra],
    charges: StarAlgebra,
    tol: Tolerances = DEFAULT_TOL,
    seed: int = DEFAULT_SEED,
) -> SuperselectionReport:
    """Restrict algebras to operations commuting with an abelian charge algebra."""
    from .factorize import induced_tps

    if center(charges, tol, seed).dim != charges.dim:
        raise AlgebraError("charge algebra is not abelian")
    d = charges.space_dim
    qc = commutant(charges, tol, seed)
    projected = []
    for a in algebras:
        ops = [qc.project(b) for b in a.basis]
        ops = [o for o in ops if np.linalg.norm(o) > tol.residual_abs]
        ops = ops or [np.eye(d, dtype=complex)]
        projected.append(closure(ops, tol, f"P_Q({a.name})"))

    charge_sectors = minimal_central_projections(charges, seed, tol)
    jz = center(join_all(projected, tol), tol, seed)
    refined_alg = closure(list(charges.basis) + list(jz.basis), tol)
    refined = minimal_central_projections(refined_alg, seed, tol)
    cands = list(charge_sectors)
    for p in refined:
        if not any(opnorm(p - q) <= tol.residual_abs for q in cands):
            cands.append(p)
    ranks = [int(round(np.trace(p).real)) for p in cands]
    order = sorted((i for i in range(len(cands)) if ranks[i] >= 2), key=lambda i: (-ranks[i], i))
    summary = []
    first_report = None
    for i in order:
        rep = check_axioms(projected, cands[i], tol, seed)
        summary.append({"index": i, "dim": ranks[i], "passed": rep.passed, "factor_dims": rep.factor_dims})
        if first_report is None:
            first_report = (cands[i], rep)
        if rep.passed:
            fac = induced_tps(projected, cands[i], seed, tol)
            return SuperselectionReport(projected, "NewTPS", cands[i], rep, fac, [], summary)
    if first_report is None:
        big = max(range(len(charge_sectors)), key=lambda i: (ranks[i], -i))
        first_report = (charge_sectors[big], check_axioms(projected, charge_sectors[big], tol, seed))
    sector, rep = first_report
    return SuperselectionReport(projected, "AxiomFailure", sector, rep, None, rep.failed_axioms() or ["iii"], summary)
