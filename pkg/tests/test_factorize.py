from fractions import Fraction
from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from tpsforge.algebra import closure, commutant, full_algebra
from tpsforge.factorize import (
    AxiomFailureError,
    ChainError,
    chain_decompose,
    chain_roundtrip,
    chain_subsystems,
    embed_slot,
    extract_slot,
    induced_tps,
    locality_residual,
    multiplicity_formula,
    stabilizer_chain,
    syndrome_factorization,
    wedderburn,
)
from tpsforge.linalg import opnorm
from tpsforge.models import (
    chi_lambda_algebras,
    collective_algebra,
    hybrid_chain,
    permutation_algebra,
    qubit_algebra,
    standard_algebras,
    standard_chain,
)
from tpsforge.operators import pauli_matrix

from .helpers import block_algebra_generators, random_herm

P = pauli_matrix


def weight_count_multiplicity(n, j):
    """Multiplicity from S^z weight counting: #(m = j) - #(m = j + 1)."""
    up = int(Fraction(n, 2) + Fraction(j))
    return comb(n, up) - (comb(n, up + 1) if up + 1 <= n else 0)


@pytest.mark.parametrize("n", range(1, 11))
def test_multiplicity_formula_matches_weight_count(n):
    total = 0
    for tj in range(n % 2, n + 1, 2):
        j = Fraction(tj, 2)
        m = multiplicity_formula(n, j)
        assert m == weight_count_multiplicity(n, j)
        total += m * (tj + 1)
    assert total == 2**n


def test_multiplicity_formula_examples_and_errors():
    assert multiplicity_formula(3, Fraction(1, 2)) == 2
    assert multiplicity_formula(6, 1) == 9
    assert multiplicity_formula(6, 3) == 1
    with pytest.raises(ValueError):
        multiplicity_formula(3, 1)
    with pytest.raises(ValueError):
        multiplicity_formula(2, Fraction(1, 3))


@pytest.mark.parametrize(
    "n,pairs",
    [(2, [(1, 1), (1, 3)]), (3, [(2, 2), (1, 4)]), (4, [(2, 1), (3, 3), (1, 5)])],
)
def test_wedderburn_collective_small(n, pairs):
    a = collective_algebra(n)
    dec = wedderburn(a)
    assert dec.pairs() == pairs
    assert dec.support_dim == 2**n
    assert max(b.residual for b in dec.blocks) <= 1e-8
    p = wedderburn(permutation_algebra(n))
    assert sorted(p.pairs()) == sorted((d, m) for m, d in pairs)


def test_wedderburn_isometries_are_unitary_and_block_diagonalize():
    a = collective_algebra(3)
    dec = wedderburn(a)
    v = np.hstack([b.isometry for b in dec.blocks])
    assert opnorm(v.conj().T @ v - np.eye(8)) <= 1e-10
    for b in dec.blocks:
        for g in a.spanning_ops():
            x = b.isometry.conj().T @ g @ b.isometry
            m = x.reshape(b.n, b.d, b.n, b.d)[0, :, 0, :]
            assert opnorm(x - np.kron(np.eye(b.n), m)) <= 1e-8


@settings(max_examples=10)
@given(st.integers(0, 10**6))
def test_wedderburn_recovers_planted_blocks(seed):
    rng = np.random.default_rng(seed)
    blocks = [[(1, 2), (2, 1)], [(2, 2)], [(1, 1), (3, 2)], [(2, 1), (1, 3)]][seed % 4]
    gens, d = block_algebra_generators(rng, blocks)
    a = closure(gens)
    dec = wedderburn(a, seed)
    assert sorted(dec.pairs()) == sorted(blocks)
    assert sum(n * dd for n, dd in dec.pairs()) == d
    assert commutant(a).dim == sum(n * n for n, _ in blocks)


def test_wedderburn_is_deterministic():
    a = collective_algebra(3)
    d1, d2 = wedderburn(a, 7), wedderburn(a, 7)
    for b1, b2 in zip(d1.blocks, d2.blocks):
        assert np.array_equal(b1.isometry, b2.isometry)


@given(st.integers(0, 10**6), st.sampled_from([(2, 3), (3, 2), (2, 2, 2), (1, 4), (3,)]))
def test_extract_embed_roundtrip(seed, dims):
    rng = np.random.default_rng(seed)
    i = seed % len(dims)
    m = random_herm(rng, dims[i])
    x = embed_slot(m, dims, i)
    assert np.allclose(extract_slot(x, dims, i), m)


def test_induced_tps_standard_and_chi_lambda():
    fac = induced_tps(standard_algebras(3))
    assert fac.factor_dims == (2, 2, 2)
    assert max(fac.residuals["locality"]) <= 1e-10
    a_chi, a_lam = chi_lambda_algebras()
    fac = induced_tps([a_chi, a_lam])
    assert fac.factor_dims == (2, 2)
    for s in ("XI", "YZ", "ZZ"):
        assert locality_residual(fac, P(s), 0) <= 1e-10
        assert locality_residual(fac, P(s), 1) > 0.5
    for s in ("IZ", "XY", "XX"):
        assert locality_residual(fac, P(s), 1) <= 1e-10


def test_induced_tps_rejects_failed_axioms():
    a_chi, _ = chi_lambda_algebras()
    with pytest.raises(AxiomFailureError) as info:
        induced_tps([a_chi, a_chi])
    assert not info.value.report.passed


def test_induced_tps_encoded_bipartition():
    # N = 3: exchange algebra and collective algebra on the J = 1/2 block
    from tpsforge.models import exchange_algebra
    from tpsforge.operators import collective_spin

    s2 = sum(collective_spin(3, a) @ collective_spin(3, a) for a in "xyz")
    # S^2 = 4 J(J+1): J = 1/2 -> 3
    w, v = np.linalg.eigh(s2)
    p = v[:, np.isclose(w, 3)] @ v[:, np.isclose(w, 3)].conj().T
    fac = induced_tps([exchange_algebra(3), collective_algebra(3)], p)
    assert fac.factor_dims == (2, 2)
    assert max(fac.residuals["locality"]) <= 1e-8


def test_standard_chain_recovers_qubits():
    chain = standard_chain(3)
    subs = chain_subsystems(chain)
    for i, a in enumerate(subs, 1):
        q = qubit_algebra(3, i)
        assert a.dim == 4 and max(q.residual(x) for x in a.basis) <= 1e-8
    dec = chain_decompose(chain)
    assert dec.dims_table() == [(2, 2, 2, 1)]
    assert not dec.leading_commutant
    assert all(r["match"] for r in chain_roundtrip(chain, subs, dec))


def test_hybrid_chain_sectors():
    dec = chain_decompose(hybrid_chain())
    assert sorted(dec.dims_table()) == [(2, 2, 2), (2, 4, 1)]
    assert sum(s.dim for s in dec.sectors) == 16


def test_chain_validation():
    with pytest.raises(ChainError):
        chain_subsystems([closure([P("ZI")]), full_algebra(4)])
    with pytest.raises(ChainError):
        chain_subsystems([full_algebra(4), closure([P("XI")]), closure([P("IZ")])])


def test_stabilizer_chain_and_syndromes():
    xs = [P("ZZI"), P("IZZ")]
    chain = stabilizer_chain(xs)
    dec = chain_decompose(chain)
    assert len(dec.sectors) == 4 and all(s.dim == 2 for s in dec.sectors)
    syn = syndrome_factorization(dec, xs)
    assert syn.factor_dims == (2, 2, 2)
    z = P("Z")
    assert opnorm(syn.pullback(xs[0]) - np.kron(z, np.eye(4))) <= 1e-10
    assert opnorm(syn.pullback(xs[1]) - np.kron(np.kron(np.eye(2), z), np.eye(2))) <= 1e-10


def test_stabilizer_chain_validation():
    with pytest.raises(ChainError, match="commute"):
        stabilizer_chain([P("ZI"), P("XI")])
    with pytest.raises(ChainError, match="traceless"):
        stabilizer_chain([P("II")])


def test_abelian_factor_is_rejected():
    with pytest.raises(AxiomFailureError):
        induced_tps([closure([P("ZI")]), closure([P("IX"), P("IZ")])])
