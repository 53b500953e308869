"""Small oracles shared by the test modules."""
import numpy as np
from scipy.linalg import expm


def random_state(rng, d):
    v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
    return v / np.linalg.norm(v)


def random_unitary(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / abs(np.diag(r)))


def random_herm(rng, d):
    z = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return (z + z.conj().T) / 2


def span_rank(ops, tol=1e-9):
    m = np.array([np.asarray(o).reshape(-1) for o in ops])
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > tol * s[0]))


def brute_commutant_dim(ops):
    """dim {X : [X, G] = 0 for all G} from the full Kronecker system."""
    d = ops[0].shape[0]
    eye = np.eye(d)
    rows = [np.kron(g, eye) - np.kron(eye, g.T) for g in ops]
    s = np.linalg.svd(np.vstack(rows), compute_uv=False)
    return int(d * d - np.sum(s > 1e-9 * max(s[0], 1)))


def evolve(h, t):
    return expm(-1j * t * h)


def block_algebra_generators(rng, blocks):
    """Two random elements of U (+)_J (1_n (x) M_d) U^dagger for blocks [(n, d), ...]."""
    dim = sum(n * d for n, d in blocks)
    u = random_unitary(rng, dim)
    gens = []
    for _ in range(2):
        parts = [np.kron(np.eye(n), random_herm(rng, d) + 3.0 * k) for k, (n, d) in enumerate(blocks)]
        m = np.zeros((dim, dim), dtype=complex)
        off = 0
        for p in parts:
            m[off:off + p.shape[0], off:off + p.shape[0]] = p
            off += p.shape[0]
        gens.append(u @ m @ u.conj().T)
    return gens, dim
