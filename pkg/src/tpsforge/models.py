"""Ready-made operator algebras and Hamiltonians for the worked examples."""
from __future__ import annotations

from itertools import combinations

import numpy as np

from .algebra import StarAlgebra, closure, full_algebra
from .dynamics import HamiltonianSpec, HamiltonianTerm
from .linalg import DEFAULT_TOL, Tolerances, opnorm
from .operators import PAULI, collective_spin, exchange, local_op, pauli_matrix

CHI_GENERATORS = ("YZ", "ZZ")
LAMBDA_GENERATORS = ("XY", "XX")
CHI_BASIS = ("II", "XI", "YZ", "ZZ")
LAMBDA_BASIS = ("II", "IZ", "XY", "XX")


def chi_lambda_algebras(tol: Tolerances = DEFAULT_TOL) -> tuple[StarAlgebra, StarAlgebra]:
    """Algebras generated by the two-body sets {YZ, ZZ} and {XY, XX} on two qubits."""
    a_chi = closure([pauli_matrix(p) for p in CHI_GENERATORS], tol, "A_chi")
    a_lam = closure([pauli_matrix(p) for p in LAMBDA_GENERATORS], tol, "A_lambda")
    return a_chi, a_lam


def qubit_algebra(n: int, i: int, tol: Tolerances = DEFAULT_TOL) -> StarAlgebra:
    """``M_2`` acting on qubit ``i`` (1-based) of ``n``."""
    return closure([local_op(n, i, PAULI["X"]), local_op(n, i, PAULI["Z"])], tol, f"M2[{i}]")


def standard_algebras(n: int, tol: Tolerances = DEFAULT_TOL) -> list[StarAlgebra]:
    return [qubit_algebra(n, i, tol) for i in range(1, n + 1)]


def collective_algebra(n: int, tol: Tolerances = DEFAULT_TOL) -> StarAlgebra:
    """Totally symmetric operators, generated by ``S^x, S^y, S^z``."""
    return closure([collective_spin(n, a) for a in "xyz"], tol, f"Sym{n}")


def permutation_algebra(n: int, tol: Tolerances = DEFAULT_TOL, qubits=None, name: str = "") -> StarAlgebra:
    """Group algebra of qubit permutations on ``qubits`` (default all), from adjacent exchanges.

    Adjacent transpositions generate the symmetric group, so this is the same
    algebra as the one generated by all ``sigma_i . sigma_j``.
    """
    qubits = list(range(1, n + 1)) if qubits is None else list(qubits)
    gens = [exchange(n, a, b) for a, b in zip(qubits, qubits[1:])]
    if not gens:
        gens = [np.eye(2**n, dtype=complex)]
    return closure(gens, tol, name or f"CS{len(qubits)}")


def exchange_algebra(n: int, tol: Tolerances = DEFAULT_TOL) -> StarAlgebra:
    """Algebra generated by every Heisenberg coupling ``sigma_i . sigma_j``."""
    return closure([exchange(n, i, j) for i, j in combinations(range(1, n + 1), 2)], tol, f"Exch{n}")


def standard_chain(n: int, tol: Tolerances = DEFAULT_TOL) -> list[StarAlgebra]:
    """``B_i = 1_{2^i} (x) M_{2^{n-i}}``, ``i = 0..n``."""
    d = 2**n
    chain = [full_algebra(d, "B0")]
    for i in range(1, n + 1):
        gens = [local_op(n, q, PAULI[a]) for q in range(i + 1, n + 1) for a in "XZ"]
        chain.append(closure(gens or [np.eye(d, dtype=complex)], tol, f"B{i}"))
    return chain


def hybrid_chain(tol: Tolerances = DEFAULT_TOL) -> list[StarAlgebra]:
    """Four qubits: ``End(H) > 1 (x) End((C^2)^3) > 1 (x) C S_3``."""
    b1 = closure([local_op(4, q, PAULI[a]) for q in (2, 3, 4) for a in "XZ"], tol, "B1")
    b2 = permutation_algebra(4, tol, qubits=(2, 3, 4), name="B2")
    return [full_algebra(16, "B0"), b1, b2]


def nested_symmetric_chain(n: int = 6, tol: Tolerances = DEFAULT_TOL) -> list[StarAlgebra]:
    """``C S_N > C (S_{N/2} x S_{N/2})`` on ``N`` qubits."""
    if n % 2 or n < 2:
        raise ValueError("N must be even")
    h = n // 2
    b0 = permutation_algebra(n, tol, name=f"CS{n}")
    gens = [exchange(n, a, a + 1) for a in range(1, h)] + [exchange(n, a, a + 1) for a in range(h + 1, n)]
    if not gens:
        gens = [np.eye(2**n, dtype=complex)]
    b1 = closure(gens, tol, f"C(S{h}xS{h})")
    return [b0, b1]


def pauli_strings(ops: str | list[str]) -> list[np.ndarray]:
    if isinstance(ops, str):
        ops = [o.strip() for o in ops.split(",") if o.strip()]
    return [pauli_matrix(o) for o in ops]


# --------------------------------------------------------------------------
# dynamics


def morphing_hamiltonian(lam: float = 1.0, mu: float = 1.0) -> HamiltonianSpec:
    """Three qubits: exchanges + collective fields (tag ``lambda``) + local fields (tag ``mu``)."""
    n = 3
    terms, cs = [], []
    for i, j in combinations(range(1, n + 1), 2):
        terms.append(HamiltonianTerm(f"exch{i}{j}", exchange(n, i, j), "lambda"))
        cs.append(lam)
    for a in "xyz":
        terms.append(HamiltonianTerm(f"S{a}", collective_spin(n, a), "lambda"))
        cs.append(lam)
    for i in range(1, n + 1):
        for a in "xyz":
            terms.append(HamiltonianTerm(f"s{i}{a}", local_op(n, i, PAULI[a.upper()]), "mu"))
            cs.append(mu)
    return HamiltonianSpec(terms, cs)


def morphing_families(tol: Tolerances = DEFAULT_TOL) -> dict[str, list[StarAlgebra]]:
    return {
        "encoded": [exchange_algebra(3, tol), collective_algebra(3, tol)],
        "standard": standard_algebras(3, tol),
    }


def ex1_hamiltonian(normalize: bool = True) -> np.ndarray:
    """All six non-identity basis elements of the two algebras with unit couplings.

    With ``normalize`` the result is scaled to unit spectral norm, so times are
    dimensionless (``T * ||H||``).
    """
    h = sum(pauli_matrix(p) for p in CHI_BASIS[1:] + LAMBDA_BASIS[1:])
    return h / opnorm(h) if normalize else h


EX1_PULSES = ("XI", "IZ")
