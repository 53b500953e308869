"""Concrete operators: Pauli strings, qubit permutations, collective spin, exchange.

Qubits are numbered from 1 in every public function; qubit 1 is the leftmost
(most significant) tensor factor.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Sequence

import numpy as np

PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
AXES = {"x": "X", "y": "Y", "z": "Z"}


@dataclass(frozen=True)
class PauliString:
    letters: str
    coefficient: complex = 1.0

    def __post_init__(self):
        letters = self.letters.upper()
        if not letters or any(ch not in PAULI for ch in letters):
            raise ValueError(f"invalid Pauli string {self.letters!r}")
        object.__setattr__(self, "letters", letters)

    @property
    def n_qubits(self) -> int:
        return len(self.letters)


@dataclass(frozen=True)
class Permutation:
    """Bijection ``i -> images[i-1]`` on ``{1..N}`` acting on ``N`` tensor factors."""

    images: tuple[int, ...]
    local_dim: int = 2

    def __post_init__(self):
        imgs = tuple(int(i) for i in self.images)
        if sorted(imgs) != list(range(1, len(imgs) + 1)):
            raise ValueError(f"not a bijection on 1..{len(imgs)}: {imgs}")
        if self.local_dim < 1:
            raise ValueError("local_dim must be positive")
        object.__setattr__(self, "images", imgs)

    @classmethod
    def from_cycles(cls, n: int, cycles: Sequence[Sequence[int]], local_dim: int = 2) -> "Permutation":
        images = list(range(1, n + 1))
        for cyc in cycles:
            cyc = [int(c) for c in cyc]
            if any(not 1 <= c <= n for c in cyc) or len(set(cyc)) != len(cyc):
                raise ValueError(f"bad cycle {cyc} for n={n}")
            for a, b in zip(cyc, cyc[1:] + cyc[:1]):
                images[a - 1] = b
        return cls(tuple(images), local_dim)

    def compose(self, other: "Permutation") -> "Permutation":
        """``self o other`` (apply ``other`` first)."""
        if len(self.images) != len(other.images):
            raise ValueError("size mismatch")
        return Permutation(tuple(self.images[other.images[i] - 1] for i in range(len(self.images))), self.local_dim)


def kron_all(mats: Sequence[np.ndarray]) -> np.ndarray:
    return reduce(np.kron, mats)


def pauli_matrix(p: PauliString | str) -> np.ndarray:
    if isinstance(p, str):
        p = PauliString(p)
    return complex(p.coefficient) * kron_all([PAULI[ch] for ch in p.letters])


def local_op(n: int, i: int, op: np.ndarray) -> np.ndarray:
    """``op`` on qubit ``i`` (1-based), identity elsewhere."""
    if not 1 <= i <= n:
        raise IndexError(f"qubit index {i} out of range 1..{n}")
    return np.kron(np.kron(np.eye(2 ** (i - 1)), op), np.eye(2 ** (n - i)))


def permutation_matrix(perm: Permutation) -> np.ndarray:
    """Unitary sending ``|x_1..x_N>`` to ``|x_{pi^-1(1)}..x_{pi^-1(N)}>``.

    Equivalently the content of factor ``k`` moves to factor ``pi(k)``, so
    ``permutation_matrix(p.compose(q)) == permutation_matrix(p) @ permutation_matrix(q)``.
    """
    n = len(perm.images)
    q = perm.local_dim
    dim = q**n
    digits = np.array(np.unravel_index(np.arange(dim), (q,) * n))  # (n, dim)
    out_digits = np.empty_like(digits)
    for k, img in enumerate(perm.images):
        out_digits[img - 1] = digits[k]
    rows = np.ravel_multi_index(tuple(out_digits), (q,) * n)
    m = np.zeros((dim, dim), dtype=complex)
    m[rows, np.arange(dim)] = 1.0
    return m


def swap(n: int = 2, i: int = 1, j: int = 2) -> np.ndarray:
    return permutation_matrix(Permutation.from_cycles(n, [[i, j]]))


def collective_spin(n: int, axis: str) -> np.ndarray:
    """``S^a = sum_i sigma_i^a`` (Pauli normalization, no factor 1/2)."""
    if n < 1:
        raise ValueError("n must be >= 1")
    a = PAULI[AXES[axis.lower()]]
    return sum(local_op(n, i, a) for i in range(1, n + 1))


def exchange(n: int, i: int, j: int) -> np.ndarray:
    """Heisenberg coupling ``sigma_i . sigma_j``."""
    if not (1 <= i < j <= n):
        raise IndexError(f"need 1 <= i < j <= n, got i={i}, j={j}, n={n}")
    return sum(local_op(n, i, PAULI[a]) @ local_op(n, j, PAULI[a]) for a in "XYZ")


def basis_state(bits: str) -> np.ndarray:
    """Computational basis ket ``|b_1 b_2 ...>``."""
    v = np.zeros(2 ** len(bits), dtype=complex)
    v[int(bits, 2)] = 1.0
    return v


def bell_states() -> dict[str, np.ndarray]:
    s = 1 / np.sqrt(2)
    k = {b: basis_state(b) for b in ("00", "01", "10", "11")}
    return {
        "phi+": s * (k["00"] + k["11"]),
        "phi-": s * (k["00"] - k["11"]),
        "psi+": s * (k["01"] + k["10"]),
        "psi-": s * (k["01"] - k["10"]),
    }
