"""Problem files: named operators, algebras, chains, states and schedules.

A problem is a JSON object.  Recognized keys::

    qubits | dim          ambient space (one of the two)
    generators            {name: [operator entry, ...]}
    algebras              {name: [generator-set name, ...] | "full" | "scalars"}
    factors               [algebra name, ...]   (default: all algebras, in file order)
    chain                 [algebra name, ...]
    code_space            operator entry (a projector) or {"span": [state entry, ...]}
    charges               [operator entry, ...]
    hamiltonian           [{"label", "op", "algebra", "coupling"}, ...]
    families              {name: [algebra name, ...]}
    snapshots             {name: {term label or algebra tag: coupling}}
    schedule              {"period", "cycles", "pulses": [...]} or {"period", "cycles", "segments": [...]}
    states                {name: state entry}
    gates                 {name: operator entry}
    seed, tolerances

Operator entries are objects with exactly one of ``pauli`` (plus optional
``coefficient`` as a number or ``[re, im]``), ``perm`` (cycle list,
1-based), ``exchange`` ``[i, j]``, ``collective`` (axis), ``swap`` ``[i, j]``,
``identity`` (true), ``dense`` ``{"re": rows, "im": rows}`` or ``sum``
(list of entries).  State entries are ``{"bits": "01"}``, ``{"bell": "psi-"}``
or ``{"re": [...], "im": [...]}``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from .algebra import StarAlgebra, closure, full_algebra, scalars
from .dynamics import HamiltonianSpec, HamiltonianTerm, PulseSchedule, symmetrized_schedule
from .linalg import DEFAULT_TOL, Tolerances
from .operators import (
    PauliString,
    Permutation,
    basis_state,
    bell_states,
    collective_spin,
    exchange,
    pauli_matrix,
    permutation_matrix,
    swap,
)


class ProblemError(ValueError):
    """Malformed or inconsistent problem file."""


OPERATOR_KINDS = ("pauli", "perm", "exchange", "collective", "swap", "identity", "dense", "sum")


@dataclass
class Problem:
    dim: int
    qubits: int | None
    raw: dict
    generators: dict[str, list[np.ndarray]] = field(default_factory=dict)
    algebras: dict[str, StarAlgebra] = field(default_factory=dict)
    factors: list[str] = field(default_factory=list)
    chain: list[str] = field(default_factory=list)
    code_space: np.ndarray | None = None
    charges: list[np.ndarray] = field(default_factory=list)
    hamiltonian: HamiltonianSpec | None = None
    families: dict[str, list[str]] = field(default_factory=dict)
    snapshots: dict[str, dict[str, float]] = field(default_factory=dict)
    schedule: PulseSchedule | None = None
    schedule_pulses: list[np.ndarray] = field(default_factory=list)
    states: dict[str, np.ndarray] = field(default_factory=dict)
    gates: dict[str, np.ndarray] = field(default_factory=dict)
    seed: int | None = None
    tolerances: Tolerances = DEFAULT_TOL

    def algebra_list(self, names) -> list[StarAlgebra]:
        return [self.algebras[n] for n in names]


def _coefficient(c: Any) -> complex:
    if isinstance(c, (list, tuple)):
        if len(c) != 2:
            raise ProblemError(f"complex coefficient must be [re, im], got {c!r}")
        return complex(float(c[0]), float(c[1]))
    return complex(float(c))


def _need_qubits(prob_qubits: int | None, kind: str) -> int:
    if prob_qubits is None:
        raise ProblemError(f"{kind!r} entries need 'qubits'")
    return prob_qubits


def parse_operator(entry: Any, dim: int, qubits: int | None) -> np.ndarray:
    if isinstance(entry, str):
        entry = {"pauli": entry}
    if not isinstance(entry, dict):
        raise ProblemError(f"operator entry must be an object, got {entry!r}")
    kinds = [k for k in OPERATOR_KINDS if k in entry]
    if len(kinds) != 1:
        raise ProblemError(f"operator entry needs exactly one of {OPERATOR_KINDS}, got {sorted(entry)}")
    kind = kinds[0]
    coeff = _coefficient(entry.get("coefficient", 1.0))
    v = entry[kind]
    if kind == "pauli":
        n = _need_qubits(qubits, kind)
        if len(v) != n:
            raise ProblemError(f"Pauli string {v!r} has length {len(v)}, expected {n}")
        op = pauli_matrix(PauliString(v))
    elif kind == "perm":
        n = _need_qubits(qubits, kind)
        op = permutation_matrix(Permutation.from_cycles(n, v))
    elif kind == "exchange":
        n = _need_qubits(qubits, kind)
        i, j = sorted(int(x) for x in v)
        op = exchange(n, i, j)
    elif kind == "swap":
        n = _need_qubits(qubits, kind)
        op = swap(n, int(v[0]), int(v[1]))
    elif kind == "collective":
        op = collective_spin(_need_qubits(qubits, kind), str(v))
    elif kind == "identity":
        op = np.eye(dim, dtype=complex)
    elif kind == "dense":
        re = np.asarray(v["re"], dtype=float)
        im = np.asarray(v.get("im", np.zeros_like(re)), dtype=float)
        if re.shape != im.shape:
            raise ProblemError("dense entry: re and im shapes differ")
        op = re + 1j * im
    else:
        if not v:
            raise ProblemError("empty sum")
        op = sum(parse_operator(e, dim, qubits) for e in v)
    op = coeff * np.asarray(op, dtype=complex)
    if op.shape != (dim, dim):
        raise ProblemError(f"operator has shape {op.shape}, expected ({dim}, {dim})")
    return op


def parse_state(entry: Any, dim: int) -> np.ndarray:
    if not isinstance(entry, dict):
        raise ProblemError(f"state entry must be an object, got {entry!r}")
    if "bits" in entry:
        psi = basis_state(str(entry["bits"]))
    elif "bell" in entry:
        table = bell_states()
        if entry["bell"] not in table:
            raise ProblemError(f"unknown Bell state {entry['bell']!r}; choose from {sorted(table)}")
        psi = table[entry["bell"]]
    elif "re" in entry:
        re = np.asarray(entry["re"], dtype=float)
        im = np.asarray(entry.get("im", np.zeros_like(re)), dtype=float)
        psi = re + 1j * im
    else:
        raise ProblemError("state entry needs 'bits', 'bell' or 're'/'im'")
    if psi.shape != (dim,):
        raise ProblemError(f"state has length {psi.shape[0]}, expected {dim}")
    nrm = np.linalg.norm(psi)
    if nrm == 0:
        raise ProblemError("zero state")
    return psi / nrm


def _parse_tolerances(raw: Any) -> Tolerances:
    if raw is None:
        return DEFAULT_TOL
    if not isinstance(raw, dict):
        raise ProblemError("tolerances must be an object")
    unknown = set(raw) - set(DEFAULT_TOL.as_dict())
    if unknown:
        raise ProblemError(f"unknown tolerance keys {sorted(unknown)}")
    merged = {**DEFAULT_TOL.as_dict(), **{k: float(v) for k, v in raw.items()}}
    return Tolerances(**merged)


def parse_problem(raw: dict, tol: Tolerances | None = None) -> Problem:
    """Build all operators and algebras of a problem; ``tol`` overrides the file's tolerances."""
    if not isinstance(raw, dict):
        raise ProblemError("problem must be a JSON object")
    qubits = raw.get("qubits")
    if qubits is not None:
        qubits = int(qubits)
        if qubits < 1:
            raise ProblemError("qubits must be positive")
        dim = 2**qubits
        if "dim" in raw and int(raw["dim"]) != dim:
            raise ProblemError(f"dim {raw['dim']} disagrees with qubits {qubits}")
    elif "dim" in raw:
        dim = int(raw["dim"])
        if dim < 1:
            raise ProblemError("dim must be positive")
    else:
        raise ProblemError("problem needs 'qubits' or 'dim'")
    ptol = tol or _parse_tolerances(raw.get("tolerances"))
    prob = Problem(dim=dim, qubits=qubits, raw=raw, tolerances=ptol)
    if "seed" in raw:
        prob.seed = int(raw["seed"])

    for name, entries in (raw.get("generators") or {}).items():
        if not isinstance(entries, list) or not entries:
            raise ProblemError(f"generator set {name!r} must be a nonempty list")
        prob.generators[name] = [parse_operator(e, dim, qubits) for e in entries]

    for name, ref in (raw.get("algebras") or {}).items():
        if ref == "full":
            prob.algebras[name] = full_algebra(dim, name)
        elif ref == "scalars":
            prob.algebras[name] = scalars(dim, name)
        else:
            if isinstance(ref, str):
                ref = [ref]
            ops = []
            for r in ref:
                if r not in prob.generators:
                    raise ProblemError(f"algebra {name!r} references unknown generator set {r!r}")
                ops.extend(prob.generators[r])
            prob.algebras[name] = closure(ops, ptol, name)

    def resolve(names, what):
        for n in names:
            if n not in prob.algebras:
                raise ProblemError(f"{what} references unknown algebra {n!r}")
        return list(names)

    prob.factors = resolve(raw.get("factors", list(prob.algebras)), "factors")
    prob.chain = resolve(raw.get("chain", []), "chain")
    for fname, names in (raw.get("families") or {}).items():
        prob.families[fname] = resolve(names, f"family {fname!r}")

    cs = raw.get("code_space")
    if cs is not None:
        if isinstance(cs, dict) and "span" in cs:
            vecs = np.array([parse_state(s, dim) for s in cs["span"]]).T
            q, _ = np.linalg.qr(vecs)
            prob.code_space = q @ q.conj().T
        else:
            prob.code_space = parse_operator(cs, dim, qubits)

    prob.charges = [parse_operator(e, dim, qubits) for e in raw.get("charges", [])]

    terms_raw = raw.get("hamiltonian")
    if terms_raw:
        terms, cs_ = [], []
        for k, t in enumerate(terms_raw):
            if "op" not in t:
                raise ProblemError(f"hamiltonian term {k} has no 'op'")
            terms.append(HamiltonianTerm(str(t.get("label", f"h{k}")), parse_operator(t["op"], dim, qubits),
                                         str(t.get("algebra", ""))))
            cs_.append(float(t.get("coupling", 1.0)))
        try:
            prob.hamiltonian = HamiltonianSpec(terms, cs_)
        except ValueError as exc:
            raise ProblemError(str(exc)) from exc

    for sname, assignment in (raw.get("snapshots") or {}).items():
        prob.snapshots[sname] = {str(k): float(v) for k, v in assignment.items()}

    sch = raw.get("schedule")
    if sch is not None:
        period = float(sch.get("period", 1.0))
        cycles = int(sch.get("cycles", 1))
        try:
            if "segments" in sch:
                segs = []
                for s in sch["segments"]:
                    p = s.get("pulse")
                    segs.append((None if p is None else parse_operator(p, dim, qubits), float(s["fraction"])))
                prob.schedule = PulseSchedule(period, segs, cycles)
            else:
                prob.schedule_pulses = [parse_operator(p, dim, qubits) for p in sch.get("pulses", [])]
                prob.schedule = symmetrized_schedule(prob.schedule_pulses, period, cycles, ptol)
        except ValueError as exc:
            raise ProblemError(f"schedule: {exc}") from exc

    for sname, entry in (raw.get("states") or {}).items():
        prob.states[sname] = parse_state(entry, dim)
    for gname, entry in (raw.get("gates") or {}).items():
        prob.gates[gname] = parse_operator(entry, dim, qubits)
    return prob


def load_problem(path: str | Path, tol: Tolerances | None = None) -> tuple[Problem, dict]:
    text = Path(path).read_text()
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ProblemError(f"{path}: invalid JSON ({exc})") from exc
    return parse_problem(raw, tol), raw
