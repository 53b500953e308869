"""Command-line front end: ``tpsforge <subcommand> [options]``.

Exit codes: 0 success with all checks passing, 1 a check failed,
2 input error, 3 numerical degeneracy.
"""
from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from math import log
from typing import Sequence

import numpy as np

from . import __version__
from .algebra import DegenerateDrawError, check_axioms, closure, scalars, superselect
from .dynamics import active_tps, assemble, refocus_average, strobe
from .entanglement import cut_entropy, operator_schmidt
from .factorize import AxiomFailureError, induced_tps
from .linalg import DEFAULT_SEED, DEFAULT_TOL, Tolerances, opnorm, unitary_exp
from .presets import PRESETS, chain_section, factorization_section, preset_params, run_preset, wedderburn_section
from .problem import Problem, ProblemError, load_problem
from .report import Report, digest, to_json, to_text

EXIT_OK, EXIT_CHECK, EXIT_INPUT, EXIT_DEGENERATE = 0, 1, 2, 3
SEED_ENV = "TPSFORGE_SEED"

PROBLEM_COMMANDS = ("check", "factorize", "wedderburn", "chain", "superselect", "entangle", "morph", "strobe")


class InputError(Exception):
    pass


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--output", help="write the report here instead of stdout")
    p.add_argument("--seed", type=int, help=f"random seed (default: ${SEED_ENV} or {DEFAULT_SEED})")
    p.add_argument("--tol-residual", type=float, help="override residual_abs")
    p.add_argument("--format", choices=("json", "text"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tpsforge", description="Tensor product structures induced by observable algebras")
    sub = parser.add_subparsers(dest="command", required=True, metavar="SUBCOMMAND")
    helps = {
        "check": "test the axioms for the listed factor algebras",
        "factorize": "build the induced TPS isometry",
        "wedderburn": "irrep block tables of every algebra",
        "chain": "subsystems and sectors of a nested algebra chain",
        "superselect": "project the factor algebras onto the commutant of the charges",
        "entangle": "state entropies and gate Schmidt coefficients in the induced TPS",
        "morph": "which candidate TPS the active couplings induce",
        "strobe": "stroboscopic propagator of a pulse schedule",
    }
    for name in PROBLEM_COMMANDS:
        p = sub.add_parser(name, help=helps[name])
        p.add_argument("--input", required=True, help="problem file (JSON)")
        _add_common(p)
    p = sub.add_parser("preset", help="run a built-in example end to end")
    p.add_argument("name")
    p.add_argument("--qubits", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--ops")
    _add_common(p)
    sub.add_parser("list-presets", help="list the built-in examples")
    return parser


def resolve_seed(flag: int | None) -> int:
    if flag is not None:
        return flag
    env = os.environ.get(SEED_ENV)
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise InputError(f"{SEED_ENV}={env!r} is not an integer") from exc
    return DEFAULT_SEED


def _tol(base: Tolerances, override: float | None) -> Tolerances:
    if override is None:
        return base
    try:
        return replace(base, residual_abs=override)
    except ValueError as exc:
        raise InputError(str(exc)) from exc


# --------------------------------------------------------------------------
# problem subcommands


def _factors(prob: Problem):
    if not prob.factors:
        raise ProblemError("no algebras defined")
    return prob.algebra_list(prob.factors)


def cmd_check(prob, seed, tol):
    rep = check_axioms(_factors(prob), prob.code_space, tol, seed)
    return {"axioms": rep.as_dict()}, {"axioms_pass": rep.passed}


def cmd_factorize(prob, seed, tol):
    algs = _factors(prob)
    rep = check_axioms(algs, prob.code_space, tol, seed)
    sections = {"axioms": rep.as_dict()}
    if not rep.passed:
        return sections, {"axioms_pass": False}
    fac = induced_tps(algs, prob.code_space, seed, tol)
    sections["tps"] = factorization_section(fac)
    loc = max(fac.residuals["locality"])
    return sections, {"axioms_pass": True, "locality": loc <= 1e-7}


def cmd_wedderburn(prob, seed, tol):
    secs = {name: wedderburn_section(a, seed, tol) for name, a in prob.algebras.items()}
    return {"wedderburn": secs}, {f"{name}_dimension_laws": s["dim"] == s["sum_d_squared"]
                                  and s["commutant_dim"] == s["sum_n_squared"] for name, s in secs.items()}


def cmd_chain(prob, seed, tol):
    if len(prob.chain) < 2:
        raise ProblemError("'chain' needs at least two algebra names")
    sec, _, _ = chain_section(prob.algebra_list(prob.chain), seed, tol)
    return {"chain": sec}, {
        "sector_dims_sum": sec["sector_dim_sum"] == sec["space_dim"],
        "locality": sec["worst_locality_residual"] <= 1e-7,
    }


def cmd_superselect(prob, seed, tol):
    q = closure(prob.charges, tol, "Q") if prob.charges else scalars(prob.dim, "Q")
    rep = superselect(_factors(prob), q, tol, seed)
    sections = {"superselection": {
        "outcome": rep.outcome,
        "projected_dims": [a.dim for a in rep.projected_algebras],
        "projected_abelian": [a.is_abelian(tol) for a in rep.projected_algebras],
        "failed_axioms": rep.failed_axioms,
        "candidates": rep.candidates,
        "sector_dim": int(round(np.trace(rep.sector).real)) if rep.sector is not None else 0,
        "report": rep.report.as_dict() if rep.report else None,
        "factorization": factorization_section(rep.factorization) if rep.factorization else None,
        "sector_rule": rep.sector_rule,
    }}
    # a superselection outcome is a result, not a failed check
    return sections, {}


def cmd_entangle(prob, seed, tol):
    fac = induced_tps(_factors(prob), prob.code_space, seed, tol)
    n = len(fac.factor_dims)
    states = {}
    for name, psi in prob.states.items():
        rec = {}
        if n > 1:
            for k in range(n):
                s = cut_entropy(psi, fac, [k])
                # factor indices are 1-based in reports
                rec[f"keep_{k + 1}"] = {"nats": s, "bits": s / log(2)}
        states[name] = rec
    gates = {}
    for name, g in prob.gates.items():
        if n == 2:
            s = operator_schmidt(g, fac)
            gates[name] = {"schmidt_coefficients": list(s), "schmidt_rank": len(s)}
        else:
            gates[name] = {"note": "operator Schmidt decomposition needs a bipartite TPS"}
    return {"tps": factorization_section(fac), "states": states, "gates": gates}, {
        "locality": max(fac.residuals["locality"]) <= 1e-7}


def cmd_morph(prob, seed, tol):
    if prob.hamiltonian is None:
        raise ProblemError("'morph' needs a hamiltonian")
    if not prob.families:
        raise ProblemError("'morph' needs candidate families")
    fams = {k: prob.algebra_list(v) for k, v in prob.families.items()}
    snaps = prob.snapshots or {"as_given": {}}
    from .presets import _morph_record

    out = {}
    for name, assignment in snaps.items():
        spec = prob.hamiltonian
        labels = {t.label for t in spec.terms}
        tags = {t.algebra for t in spec.terms}
        unknown = [k for k in assignment if k not in labels and k not in tags]
        if unknown:
            raise ProblemError(f"snapshot {name!r} names unknown terms/tags {unknown}")
        spec = spec.scaled_by_tag({k: v for k, v in assignment.items() if k in tags and k not in labels})
        spec = spec.with_couplings({k: v for k, v in assignment.items() if k in labels})
        out[name] = _morph_record(active_tps(spec, None, fams, seed, tol))
    return {"snapshots": out}, {}


def cmd_strobe(prob, seed, tol):
    if prob.hamiltonian is None or prob.schedule is None:
        raise ProblemError("'strobe' needs a hamiltonian and a schedule")
    h = assemble(prob.hamiltonian)
    sch = prob.schedule
    res = strobe(h, sch, tol)
    sections = {"strobe": {
        "period": sch.period,
        "cycles": sch.cycles,
        "segments": len(sch.segments),
        "unitarity_residual": res.diagnostics["unitarity_residual"],
        "cycle_identity_up_to_phase": res.diagnostics["identity_up_to_phase"],
    }}
    if prob.schedule_pulses:
        hbar = refocus_average(h, prob.schedule_pulses, tol)
        one = res.cycle_propagators[0]
        sections["strobe"]["average_hamiltonian_error"] = opnorm(one - unitary_exp(hbar, sch.period, tol))
        sections["strobe"]["average_hamiltonian_norm"] = opnorm(hbar)
    if prob.states and prob.factors:
        fac = induced_tps(_factors(prob), prob.code_space, seed, tol)
        sections["strobe"]["endpoint_entropies_nats"] = {
            name: [cut_entropy(u @ psi, fac, [0]) for u in res.cycle_propagators] for name, psi in prob.states.items()
        }
    return sections, {"unitary": res.diagnostics["unitarity_residual"] <= tol.residual_abs}


COMMANDS = {
    "check": cmd_check,
    "factorize": cmd_factorize,
    "wedderburn": cmd_wedderburn,
    "chain": cmd_chain,
    "superselect": cmd_superselect,
    "entangle": cmd_entangle,
    "morph": cmd_morph,
    "strobe": cmd_strobe,
}


# --------------------------------------------------------------------------
# driver


def _emit(report: Report, fmt: str, output: str | None) -> None:
    text = to_json(report) if fmt == "json" else to_text(report)
    if output:
        with open(output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def build_report(args) -> Report:
    seed = resolve_seed(args.seed)
    if args.command == "preset":
        if args.name not in PRESETS:
            raise InputError(f"unknown preset {args.name!r}; available: {', '.join(PRESETS)}")
        tol = _tol(DEFAULT_TOL, args.tol_residual)
        params = {"qubits": args.qubits, "n": args.n, "ops": args.ops}
        sections, checks = run_preset(args.name, seed, tol, **params)
        dig = digest({"preset": args.name, "params": preset_params(args.name, **params)})
        sections = {"preset": args.name, "params": preset_params(args.name, **params), **sections}
        return Report(f"preset {args.name}", __version__, dig, seed, tol, sections, checks)
    try:
        prob, raw = load_problem(args.input)
    except FileNotFoundError as exc:
        raise InputError(f"cannot read {args.input}: {exc.strerror}") from exc
    if args.seed is None and prob.seed is not None and not os.environ.get(SEED_ENV):
        seed = prob.seed
    tol = _tol(prob.tolerances, args.tol_residual)
    sections, checks = COMMANDS[args.command](prob, seed, tol)
    return Report(args.command, __version__, digest(raw), seed, tol, sections, checks)


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    if args.command == "list-presets":
        for p in PRESETS.values():
            params = " ".join(f"--{k} {v}" for k, v in p.params.items())
            sys.stdout.write(f"{p.name:28s} {p.summary}{'  [' + params + ']' if params else ''}\n")
        return EXIT_OK
    try:
        report = build_report(args)
    except (InputError, ProblemError) as exc:
        print(f"tpsforge: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except DegenerateDrawError as exc:
        print(f"tpsforge: numerical degeneracy: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except AxiomFailureError as exc:
        print(f"tpsforge: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except ValueError as exc:
        print(f"tpsforge: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    _emit(report, args.format, args.output)
    for name, ok in report.checks.items():
        if not ok:
            print(f"tpsforge: check failed: {name}", file=sys.stderr)
    return EXIT_OK if report.passed else EXIT_CHECK


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
