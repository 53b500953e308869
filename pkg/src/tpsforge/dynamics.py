"""Tunable Hamiltonians, TPS morphing and stroboscopic refocusing."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .algebra import (
    StarAlgebra,
    check_axioms,
    closure,
    center,
    join_all,
    minimal_central_projections,
    restrict,
)
from .factorize import induced_tps
from .linalg import (
    DEFAULT_SEED,
    DEFAULT_TOL,
    Tolerances,
    as_mat,
    dag,
    equal_up_to_phase,
    isometry_from_projector,
    opnorm,
    unitary_exp,
)


class PulseError(ValueError):
    pass


@dataclass
class HamiltonianTerm:
    label: str
    op: np.ndarray
    algebra: str = ""


@dataclass
class HamiltonianSpec:
    terms: list[HamiltonianTerm]
    couplings: list[float]

    def __post_init__(self):
        if len(self.terms) != len(self.couplings):
            raise ValueError("one coupling per term")
        dims = {t.op.shape for t in self.terms}
        if len(dims) > 1:
            raise ValueError("terms act on different spaces")
        for t in self.terms:
            if opnorm(t.op - dag(t.op)) > DEFAULT_TOL.residual_abs * max(opnorm(t.op), 1.0):
                raise ValueError(f"term {t.label!r} is not Hermitian")

    @property
    def dim(self) -> int:
        return self.terms[0].op.shape[0]

    def with_couplings(self, couplings: Sequence[float] | Mapping[str, float]) -> "HamiltonianSpec":
        if isinstance(couplings, Mapping):
            new = [float(couplings.get(t.label, c)) for t, c in zip(self.terms, self.couplings)]
        else:
            new = [float(c) for c in couplings]
        return HamiltonianSpec(self.terms, new)

    def scaled_by_tag(self, factors: Mapping[str, float]) -> "HamiltonianSpec":
        """Multiply couplings of terms whose algebra tag is in ``factors``."""
        new = [c * factors.get(t.algebra, 1.0) for t, c in zip(self.terms, self.couplings)]
        return HamiltonianSpec(self.terms, new)


def assemble(spec: HamiltonianSpec) -> np.ndarray:
    h = np.zeros((spec.dim, spec.dim), dtype=complex)
    for t, c in zip(spec.terms, spec.couplings):
        h += c * t.op
    return h


# --------------------------------------------------------------------------
# morphing


@dataclass
class FamilyResult:
    name: str
    contained_in_join: bool
    terms_respect_partition: bool
    unassigned_terms: list[str]
    sectors: list[dict]
    induced: list[dict]


@dataclass
class MorphingReport:
    active_terms: list[str]
    active_dim: int
    space_dim: int
    families: list[FamilyResult]
    note: str = ""

    @property
    def induced(self) -> list[tuple[str, tuple[int, ...]]]:
        return [(f.name, tuple(i["factor_dims"])) for f in self.families for i in f.induced]


def _family_sectors(family: Sequence[StarAlgebra], tol: Tolerances, seed: int) -> list[np.ndarray]:
    jz = center(join_all(family, tol), tol, seed)
    if jz.dim == 1:
        return [np.eye(family[0].space_dim, dtype=complex)]
    return minimal_central_projections(closure(list(jz.basis), tol), seed, tol)


def active_tps(
    spec: HamiltonianSpec,
    couplings: Sequence[float] | Mapping[str, float] | None,
    families: Mapping[str, Sequence[StarAlgebra]],
    seed: int = DEFAULT_SEED,
    tol: Tolerances = DEFAULT_TOL,
) -> MorphingReport:
    """Which candidate TPS the currently switched-on interactions induce.

    A family is induced on a sector when (a) every active term lies in one of
    its algebras, (b) on the sector the active terms belonging to each algebra
    generate that whole algebra, (c) the family passes the axioms there, and
    (d) at least two factors are nontrivial.
    """
    if couplings is not None:
        spec = spec.with_couplings(couplings)
    d = spec.dim
    active = [(t, c) for t, c in zip(spec.terms, spec.couplings) if abs(c) > 0]
    if not active:
        return MorphingReport([], 0, d, [], "no interactions active")
    gen = closure([t.op for t, _ in active], tol, "active")
    results = []
    for fname, family in families.items():
        fam_join = join_all(family, tol)
        contained = all(fam_join.residual(b) <= tol.residual_abs for b in gen.basis)
        owner: dict[str, int] = {}
        unassigned = []
        for t, _ in active:
            for i, alg in enumerate(family):
                if alg.contains(t.op, tol):
                    owner[t.label] = i
                    break
            else:
                unassigned.append(t.label)
        sectors = []
        induced = []
        for k, p in enumerate(_family_sectors(family, tol, seed)):
            rank = int(round(np.trace(p).real))
            rep = check_axioms(family, p, tol, seed)
            w = isometry_from_projector(p, tol)
            generated = True
            if not unassigned:
                for i, alg in enumerate(family):
                    mine = [dag(w) @ t.op @ w for t, _ in active if owner.get(t.label) == i]
                    target = restrict(alg, w, tol).dim
                    got = closure(mine, tol).dim if mine else 1
                    generated &= got == target
            rec = {
                "sector": k,
                "dim": rank,
                "axioms_pass": rep.passed,
                "factor_dims": rep.factor_dims,
                "generated_by_active_terms": bool(generated and not unassigned),
            }
            sectors.append(rec)
            nontrivial = sum(1 for x in rep.factor_dims if x >= 2) >= 2
            if rep.passed and generated and not unassigned and nontrivial:
                fac = induced_tps(family, p, seed, tol)
                induced.append({"sector": k, "dim": rank, "factor_dims": list(fac.factor_dims),
                                "locality_residual": max(fac.residuals["locality"])})
        results.append(FamilyResult(fname, contained, not unassigned, unassigned, sectors, induced))
    return MorphingReport([t.label for t, _ in active], gen.dim, d, results)


# --------------------------------------------------------------------------
# pulses


@dataclass
class PulseSchedule:
    """Per cycle: ``U(T) = prod_k pulse_k exp(-i H f_k T)``, first segment rightmost."""

    period: float
    segments: list[tuple[np.ndarray | None, float]]
    cycles: int = 1

    def __post_init__(self):
        if self.period <= 0:
            raise ValueError("period must be positive")
        if self.cycles < 1:
            raise ValueError("cycles must be >= 1")
        total = sum(f for _, f in self.segments)
        if abs(total - 1) > 1e-12:
            raise ValueError(f"duration fractions sum to {total}, not 1")


@dataclass
class StrobeResult:
    cycle_propagators: list[np.ndarray]
    propagator: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def strobe(h_full, schedule: PulseSchedule, tol: Tolerances = DEFAULT_TOL) -> StrobeResult:
    h = as_mat(h_full)
    d = h.shape[0]
    eye = np.eye(d, dtype=complex)
    u = eye
    for pulse, f in schedule.segments:
        step = unitary_exp(h, f * schedule.period, tol)
        if pulse is not None:
            pulse = as_mat(pulse)
            if opnorm(dag(pulse) @ pulse - eye) > tol.residual_abs:
                raise PulseError("pulse is not unitary")
            step = pulse @ step
        u = step @ u
    ups = []
    cur = eye
    for _ in range(schedule.cycles):
        cur = u @ cur
        ups.append(cur)
    diag = {
        "unitarity_residual": opnorm(dag(cur) @ cur - eye),
        "identity_up_to_phase": equal_up_to_phase(u, eye),
    }
    return StrobeResult(ups, cur, diag)


def pulse_group(pulses: Sequence[np.ndarray], tol: Tolerances = DEFAULT_TOL, max_size: int = 64) -> list[np.ndarray]:
    """Group generated by ``pulses`` modulo global phases, identity first."""
    if not pulses:
        return []
    d = np.asarray(pulses[0]).shape[0]
    eye = np.eye(d, dtype=complex)
    gens = []
    for p in pulses:
        p = as_mat(p)
        if opnorm(dag(p) @ p - eye) > tol.residual_abs:
            raise PulseError("pulse is not unitary")
        gens.append(p)
    group = [eye]
    frontier = [eye]
    while frontier:
        nxt = []
        for g in frontier:
            for p in gens:
                cand = p @ g
                if all(equal_up_to_phase(cand, x) > tol.residual_abs for x in group):
                    group.append(cand)
                    nxt.append(cand)
                    if len(group) > max_size:
                        raise PulseError(f"pulse group exceeds {max_size} elements")
        frontier = nxt
    return group


def refocus_average(h, pulses: Sequence[np.ndarray], tol: Tolerances = DEFAULT_TOL) -> np.ndarray:
    """Group average ``(1/|G|) sum_g g H g^dagger`` over the group generated by the pulses."""
    h = as_mat(h)
    group = pulse_group(pulses, tol)
    if not group:
        return h.copy()
    return sum(g @ h @ dag(g) for g in group) / len(group)


def symmetrized_schedule(pulses: Sequence[np.ndarray], period: float, cycles: int = 1,
                         tol: Tolerances = DEFAULT_TOL) -> PulseSchedule:
    """One cycle realizes ``prod_k g_k^dagger exp(-i H T/|G|) g_k`` over the pulse group.

    Written as evolution-then-pulse segments: after segment ``k`` the pulse
    ``g_{k+1} g_k^dagger`` is applied, and after the last one ``g_last^dagger``.
    """
    group = pulse_group(pulses, tol)
    if not group:
        return PulseSchedule(period, [(None, 1.0)], cycles)
    m = len(group)
    segs = []
    for k in range(m):
        nxt = group[k + 1] @ dag(group[k]) if k + 1 < m else dag(group[k])
        segs.append((nxt, 1.0 / m))
    return PulseSchedule(period, segs, cycles)


def average_hamiltonian_error(h, pulses, period: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """``||U(T) - exp(-i H_avg T)||`` for one symmetrized cycle (spectral norm)."""
    hbar = refocus_average(h, pulses, tol)
    u = strobe(h, symmetrized_schedule(pulses, period, 1, tol), tol).propagator
    return opnorm(u - unitary_exp(hbar, period, tol))
