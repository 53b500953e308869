import json
from pathlib import Path


from tpsforge.cli import EXIT_CHECK, EXIT_DEGENERATE, EXIT_INPUT, EXIT_OK, run
from tpsforge.linalg import DEFAULT_SEED
from tpsforge.report import parse_json

PROBLEMS = Path(__file__).resolve().parent.parent / "scripts" / "problems"


def _run(capsys, *argv):
    code = run(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_missing_input_file(capsys):
    code, out, err = _run(capsys, "check", "--input", "missing.json")
    assert code == EXIT_INPUT and out == "" and "missing.json" in err


def test_unknown_subcommand_prints_usage(capsys):
    code, out, err = _run(capsys, "frobnicate")
    assert code == EXIT_INPUT and "usage" in err


def test_unknown_flag(capsys):
    code, _, err = _run(capsys, "list-presets", "--bogus")
    assert code == EXIT_INPUT and "usage" in err


def test_unknown_preset(capsys):
    code, out, err = _run(capsys, "preset", "nope")
    assert code == EXIT_INPUT and "unknown preset" in err and out == ""


def test_out_of_scale_preset(capsys):
    code, _, err = _run(capsys, "preset", "nested-symmetric", "--qubits", "12")
    assert code == EXIT_INPUT and "desk scale" in err


def test_list_presets(capsys):
    code, out, _ = _run(capsys, "list-presets")
    assert code == EXIT_OK
    names = [line.split()[0] for line in out.splitlines()]
    for name in ("bell-chi-lambda", "collective-vs-permutation", "standard-chain", "stabilizer",
                 "nested-symmetric", "hybrid-tripartite", "morphing-3q", "strobe-ex1"):
        assert name in names


def test_check_pass_and_fail(capsys):
    code, out, _ = _run(capsys, "check", "--input", str(PROBLEMS / "chi_lambda.json"))
    rep = json.loads(out)
    assert code == EXIT_OK and rep["sections"]["axioms"]["factor_dims"] == [2, 2]
    code, out, err = _run(capsys, "check", "--input", str(PROBLEMS / "chi_chi.json"))
    assert code == EXIT_CHECK and "axioms_pass" in err
    assert json.loads(out)["sections"]["axioms"]["completeness"] is False


def test_factorize_code_space(capsys):
    code, out, _ = _run(capsys, "factorize", "--input", str(PROBLEMS / "encoded_qubits.json"))
    rep = json.loads(out)
    assert code == EXIT_OK
    assert rep["sections"]["tps"]["factor_dims"] == [2, 2]
    assert max(rep["sections"]["tps"]["locality_residuals"]) <= 1e-7


def test_wedderburn_table(capsys):
    code, out, _ = _run(capsys, "wedderburn", "--input", str(PROBLEMS / "collective4.json"))
    w = json.loads(out)["sections"]["wedderburn"]
    assert code == EXIT_OK
    assert w["Sym"]["pairs"] == [[2, 1], [3, 3], [1, 5]]
    assert sorted(map(tuple, w["CS4"]["pairs"])) == [(1, 2), (3, 3), (5, 1)]


def test_chain_table(capsys):
    code, out, _ = _run(capsys, "chain", "--input", str(PROBLEMS / "hybrid_chain.json"))
    c = json.loads(out)["sections"]["chain"]
    assert code == EXIT_OK
    assert sorted(r["dims"] for r in c["sectors"]) == [[2, 2, 2], [2, 4, 1]]


def test_superselect(capsys):
    code, out, _ = _run(capsys, "superselect", "--input", str(PROBLEMS / "superselect_sz.json"))
    s = json.loads(out)["sections"]["superselection"]
    assert code == EXIT_OK
    assert s["outcome"] == "AxiomFailure" and s["projected_dims"] == [2, 2]


def test_entangle(capsys):
    code, out, _ = _run(capsys, "entangle", "--input", str(PROBLEMS / "chi_lambda.json"))
    s = json.loads(out)["sections"]
    assert code == EXIT_OK
    assert s["states"]["phi+"]["keep_1"]["nats"] <= 1e-9
    assert s["gates"]["swap"]["schmidt_rank"] == 2


def test_morph(capsys):
    code, out, _ = _run(capsys, "morph", "--input", str(PROBLEMS / "morphing.json"))
    snaps = json.loads(out)["sections"]["snapshots"]
    assert code == EXIT_OK
    assert snaps["mu_zero"]["induced"] == [["encoded", [2, 2]]]
    assert snaps["lambda_zero"]["induced"] == [["standard", [2, 2, 2]]]
    assert snaps["both"]["induced"] == [] and snaps["both"]["active_dim"] == 64


def test_strobe(capsys):
    code, out, _ = _run(capsys, "strobe", "--input", str(PROBLEMS / "refocus_zz.json"))
    s = json.loads(out)["sections"]["strobe"]
    assert code == EXIT_OK and s["cycle_identity_up_to_phase"] <= 1e-9
    code, out, _ = _run(capsys, "strobe", "--input", str(PROBLEMS / "strobe_ex1.json"))
    s = json.loads(out)["sections"]["strobe"]
    assert code == EXIT_OK and s["average_hamiltonian_error"] < 0.01


def test_input_error_for_missing_sections(capsys):
    code, _, err = _run(capsys, "morph", "--input", str(PROBLEMS / "chi_lambda.json"))
    assert code == EXIT_INPUT and "hamiltonian" in err


def test_seed_precedence(capsys, monkeypatch):
    f = str(PROBLEMS / "chi_lambda.json")
    _, out, _ = _run(capsys, "check", "--input", f)
    assert json.loads(out)["seed"] == DEFAULT_SEED
    monkeypatch.setenv("TPSFORGE_SEED", "11")
    _, out, _ = _run(capsys, "check", "--input", f)
    assert json.loads(out)["seed"] == 11
    _, out, _ = _run(capsys, "check", "--input", f, "--seed", "3")
    assert json.loads(out)["seed"] == 3
    monkeypatch.setenv("TPSFORGE_SEED", "x")
    code, _, _ = _run(capsys, "check", "--input", f)
    assert code == EXIT_INPUT


def test_tolerance_override_is_echoed(capsys):
    _, out, _ = _run(capsys, "check", "--input", str(PROBLEMS / "chi_lambda.json"), "--tol-residual", "1e-6")
    assert json.loads(out)["tolerances"]["residual_abs"] == 1e-6
    code, _, _ = _run(capsys, "check", "--input", str(PROBLEMS / "chi_lambda.json"), "--tol-residual", "-1")
    assert code == EXIT_INPUT


def test_output_file_and_roundtrip(capsys, tmp_path):
    dest = tmp_path / "r.json"
    code, out, _ = _run(capsys, "preset", "hybrid-tripartite", "--output", str(dest))
    assert code == EXIT_OK and out == ""
    text = dest.read_text()
    rep = parse_json(text)
    assert json.dumps(rep, sort_keys=True, indent=2) + "\n" == text
    assert rep["sections"]["chain"]["sector_table"] == "C2xC2xC2 + C2xC4xC1"


def test_text_format(capsys):
    code, out, _ = _run(capsys, "preset", "standard-chain", "--n", "2", "--format", "text")
    assert code == EXIT_OK and "sector_dim_sum: 4" in out


def test_preset_parameter_validation(capsys):
    code, _, err = _run(capsys, "preset", "hybrid-tripartite", "--qubits", "4")
    assert code == EXIT_INPUT and "takes no parameter" in err
    code, _, _ = _run(capsys, "preset", "stabilizer", "--ops", "ZZ,IZZ")
    assert code == EXIT_INPUT


def test_degeneracy_exit_code(capsys, monkeypatch):
    from tpsforge import cli
    from tpsforge.algebra import DegenerateDrawError

    def boom(*a, **k):
        raise DegenerateDrawError("test", 1)

    monkeypatch.setitem(cli.COMMANDS, "check", boom)
    code, _, err = _run(capsys, "check", "--input", str(PROBLEMS / "chi_lambda.json"))
    assert code == EXIT_DEGENERATE and "seed=1" in err
