import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpsforge.algebra import (
    AlgebraError,
    DegenerateDrawError,
    InvarianceError,
    center,
    check_axioms,
    closure,
    commutant,
    full_algebra,
    intersection,
    is_subalgebra,
    join,
    minimal_central_projections,
    scalars,
    superselect,
)
from tpsforge.linalg import DimensionError, hs_inner, opnorm
from tpsforge.models import CHI_BASIS, LAMBDA_BASIS, chi_lambda_algebras, collective_algebra, standard_algebras
from tpsforge.operators import PAULI, collective_spin, pauli_matrix, swap

from .helpers import block_algebra_generators, brute_commutant_dim, span_rank

P = pauli_matrix


def same_span(a, ops, tol=1e-9):
    return a.dim == span_rank(ops) and max(a.residual(o) for o in ops) <= tol


def pauli_generators(seed, n, k):
    rng = np.random.default_rng(seed)
    return [P("".join(rng.choice(list("IXYZ"), n))) for _ in range(k)]


# -- closure ------------------------------------------------------------------


def test_closure_chi_lambda_examples():
    a_chi, a_lam = chi_lambda_algebras()
    assert same_span(a_chi, [P(s) for s in CHI_BASIS])
    assert same_span(a_lam, [P(s) for s in LAMBDA_BASIS])


def test_closure_trivial_examples():
    assert closure([np.eye(3)]).dim == 1
    assert closure([PAULI["X"], PAULI["Z"]]).dim == 4


def test_closure_errors():
    with pytest.raises(AlgebraError):
        closure([])
    with pytest.raises(DimensionError):
        closure([np.eye(2), np.eye(3)])
    with pytest.raises(DimensionError):
        closure([np.zeros((2, 3))])


def test_closure_non_hermitian_generator_adds_adjoint():
    raising = np.array([[0, 1], [0, 0]], dtype=complex)
    assert closure([raising]).dim == 4


@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 3))
def test_closure_invariants(seed, n, k):
    a = closure(pauli_generators(seed, n, k))
    g = np.array([[hs_inner(x, y) for y in a.basis] for x in a.basis])
    assert np.allclose(g, np.eye(a.dim), atol=1e-9)
    res = a.closure_residuals()
    assert max(res.values()) <= 1e-8
    # closure is idempotent
    assert closure(list(a.basis)).dim == a.dim


@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 3))
def test_closure_dimension_matches_word_enumeration(seed, n, k):
    gens = pauli_generators(seed, n, k)
    # oracle: span of all words of length <= 2^(2n)
    words = [np.eye(2**n)]
    frontier = [np.eye(2**n)]
    for _ in range(4 * n):
        frontier = [g @ w for g in gens for w in frontier]
        words.extend(frontier)
        frontier = frontier[:64]
    assert closure(gens).dim == span_rank(words)


# -- commutant / center -------------------------------------------------------


def test_commutant_examples():
    assert commutant(full_algebra(3)).dim == 1
    assert commutant(scalars(3)).dim == 9
    c = commutant(collective_algebra(2))
    assert c.dim == 2
    assert c.contains(swap(2))


@given(st.integers(0, 10**6), st.integers(1, 3), st.integers(1, 3))
def test_commutant_dim_matches_kronecker_oracle(seed, n, k):
    gens = pauli_generators(seed, n, k)
    a = closure(gens)
    c = commutant(a)
    assert c.dim == brute_commutant_dim(gens)
    for x in c.basis:
        for g in gens:
            assert opnorm(x @ g - g @ x) <= 1e-8


def test_commutant_without_generators_is_certified(rng):
    gens, d = block_algebra_generators(rng, [(2, 2), (1, 3)])
    a = closure(gens)
    basis_only = type(a)(a.space_dim, a.basis, "basis-only")
    assert commutant(basis_only).dim == commutant(a).dim == 4 + 1


@settings(max_examples=10)
@given(st.integers(0, 10**6))
def test_double_commutant(seed):
    rng = np.random.default_rng(seed)
    blocks = [[(1, 2), (2, 1)], [(2, 2)], [(1, 1), (1, 2), (2, 2)], [(3, 1), (1, 3)]][seed % 4]
    gens, d = block_algebra_generators(rng, blocks)
    a = closure(gens)
    aa = commutant(commutant(a))
    assert aa.dim == a.dim == sum(dd * dd for _, dd in blocks)
    assert is_subalgebra(aa, a) <= 1e-8


def test_commutant_is_antitone():
    small = closure([P("ZI")])
    big = closure([P("ZI"), P("XI")])
    assert is_subalgebra(small, big) <= 1e-12
    assert is_subalgebra(commutant(big), commutant(small)) <= 1e-8


def test_center_examples():
    assert center(full_algebra(4)).dim == 1
    ab = closure([P("ZI"), P("IZ")])
    assert center(ab).dim == ab.dim == 4
    z = center(collective_algebra(2))
    assert z.dim == 2
    singlet_proj = (np.eye(4) - swap(2)) / 2
    assert z.contains(singlet_proj)


def test_intersection_and_join():
    a_chi, a_lam = chi_lambda_algebras()
    assert join(a_chi, a_lam).dim == 16
    assert join(a_chi, a_chi).dim == 4
    assert join(scalars(4), full_algebra(4)).dim == 16
    assert intersection(a_chi, a_lam).dim == 1
    assert intersection(a_chi, full_algebra(4)).dim == 4
    with pytest.raises(DimensionError):
        join(full_algebra(2), full_algebra(3))


# -- central projections ------------------------------------------------------


def _check_projections(projs, d):
    assert opnorm(sum(projs) - np.eye(d)) <= 1e-8
    for p, q in itertools.combinations_with_replacement(range(len(projs)), 2):
        target = projs[p] if p == q else 0 * projs[p]
        assert opnorm(projs[p] @ projs[q] - target) <= 1e-8


def test_minimal_central_projections_examples():
    assert len(minimal_central_projections(full_algebra(3))) == 1
    diag = closure([np.diag([1.0, -1.0])])
    projs = minimal_central_projections(diag)
    assert sorted(np.diag(p).real.round(12).tolist() for p in projs) == [[0.0, 1.0], [1.0, 0.0]]
    projs = minimal_central_projections(collective_algebra(2))
    assert sorted(round(np.trace(p).real) for p in projs) == [1, 3]
    _check_projections(projs, 4)


@settings(max_examples=10)
@given(st.integers(0, 10**6))
def test_minimal_central_projections_property(seed):
    rng = np.random.default_rng(seed)
    gens, d = block_algebra_generators(rng, [(1, 2), (2, 1), (1, 3)])
    a = closure(gens)
    projs = minimal_central_projections(a, seed)
    assert sorted(round(np.trace(p).real) for p in projs) == [2, 2, 3]
    _check_projections(projs, d)


def test_degenerate_draw_error_reports_seed():
    err = DegenerateDrawError("probe", 42)
    assert err.seed == 42 and "seed=42" in str(err)


# -- axioms -------------------------------------------------------------------


def test_axioms_chi_lambda():
    rep = check_axioms(list(chi_lambda_algebras()))
    assert rep.passed and rep.factor_dims == [2, 2] and rep.join_dim == 16
    assert all(rep.each_is_factor)


def test_axioms_standard():
    rep = check_axioms(standard_algebras(2))
    assert rep.passed and rep.factor_dims == [2, 2]


def test_axioms_noncommuting_copies_fail():
    a_chi, _ = chi_lambda_algebras()
    rep = check_axioms([a_chi, a_chi])
    assert not rep.passed
    assert rep.failed_axioms() == ["ii", "iii"]
    assert rep.worst_residual > 0.5


def test_axioms_abelian_pair_fails_factor_test():
    rep = check_axioms([closure([P("ZI")]), closure([P("IZ")])])
    assert all(all(row) for row in rep.pairwise_commute)
    assert rep.each_is_factor == [False, False]
    assert not rep.completeness


def test_axioms_on_code_space():
    # two qubits inside the even-parity subspace of three: ZZI code
    p = (np.eye(8) + P("ZZI")) / 2
    a1 = closure([P("XXI"), P("ZII")])
    a2 = closure([P("IIX"), P("IIZ")])
    rep = check_axioms([a1, a2], p)
    assert rep.code_dim == 4 and rep.passed and rep.factor_dims == [2, 2]


def test_axioms_non_invariant_code_space():
    p = np.diag([1, 0, 0, 0]).astype(complex)
    with pytest.raises(InvarianceError, match="M2|A_chi"):
        check_axioms(list(chi_lambda_algebras()), p)


# -- superselection -----------------------------------------------------------


def test_superselect_total_sz_fails():
    algs = standard_algebras(2)
    rep = superselect(algs, closure([collective_spin(2, "z")]))
    assert rep.outcome == "AxiomFailure"
    assert [a.dim for a in rep.projected_algebras] == [2, 2]
    assert all(a.is_abelian() for a in rep.projected_algebras)
    assert rep.projected_algebras[0].contains(P("ZI")) and rep.projected_algebras[1].contains(P("IZ"))
    assert "iii" in rep.failed_axioms


def test_superselect_trivial_charge():
    algs = standard_algebras(2)
    rep = superselect(algs, scalars(4))
    assert rep.outcome == "NewTPS"
    assert rep.factorization.factor_dims == (2, 2)
    got, want = rep.report.as_dict(), check_axioms(algs).as_dict()
    got.pop("names"), want.pop("names")
    assert got == want


def test_superselect_chi_lambda_with_x_charge():
    # frozen from brute-force projection of the eight Pauli basis elements
    rep = superselect(list(chi_lambda_algebras()), closure([P("XI")]))
    p_chi, p_lam = rep.projected_algebras
    assert p_chi.dim == 2 and same_span(p_chi, [P("II"), P("XI")])
    assert p_lam.dim == 4 and same_span(p_lam, [P(s) for s in LAMBDA_BASIS])
    assert rep.outcome == "NewTPS"
    assert rep.factorization.factor_dims == (1, 2)
    assert np.trace(rep.sector @ P("XI")).real == pytest.approx(-2.0)


def test_superselect_rejects_nonabelian_charges():
    with pytest.raises(AlgebraError):
        superselect(standard_algebras(2), full_algebra(4))
