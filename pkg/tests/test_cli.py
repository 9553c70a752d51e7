import json

from dialogweave.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_parse_echoes_printed_form(capsys):
    code, out, _ = run(capsys, "parse", "C[ credit-card ,octane,  receipt? ]")
    assert code == 0
    assert out.strip() == "C[credit-card, octane, receipt?]"


def test_parse_syntax_error_exit_2(capsys):
    code, _, err = run(capsys, "parse", "C[a,,b]")
    assert code == 2
    assert "error:" in err


def test_parse_validation_error_exit_2(capsys):
    code, _, err = run(capsys, "parse", "PE*[a^, b]")
    assert code == 2
    assert "R1" in err


def test_canon_with_trace(capsys):
    code, out, err = run(capsys, "canon", "C[C[size, blend], type-of-milk]", "--trace")
    assert code == 0
    assert out.strip() == "C[size, blend, type-of-milk]"
    assert "FLATTEN" in err


def test_stage_and_reject(capsys):
    code, out, _ = run(capsys, "stage", "C[a, b, c]", "a")
    assert code == 0 and out.strip() == "C[b, c]"
    code, out, _ = run(capsys, "stage", "C[a, b, c]", "b")
    assert code == 1 and out.startswith("REJECTED")


def test_run_member(capsys):
    code, out, _ = run(capsys, "run", "C[a, b, c]", "<a b c>")
    assert code == 0 and out.strip() == "MEMBER"
    code, out, _ = run(capsys, "run", "C[a, b, c]", "<b a c>")
    assert code == 1 and out.strip() == "NOT-MEMBER"


def test_run_trace(capsys):
    code, out, err = run(
        capsys,
        "run",
        "W[C[call-attendant, name], C[credit-card, octane^, receipt?]]",
        "<credit-card octane call-attendant name receipt?>",
        "--trace",
    )
    assert code == 0
    assert "octane^" in err and "stack:" in err


def test_run_strict_complete_switch(capsys):
    # One union side finishes on <a>, the other still needs b.
    expr = "C[a, b] | a"
    code, out, _ = run(capsys, "run", expr, "<a>")
    assert code == 0 and out.strip() == "MEMBER"
    code, out, _ = run(capsys, "run", expr, "<a>", "--strict-complete")
    assert code == 1 and out.strip() == "NOT-MEMBER"


def test_enum_thirteen_lines(capsys):
    code, out, _ = run(capsys, "enum", "PE*[size, blend, type-of-milk]")
    assert code == 0
    lines = [l for l in out.splitlines() if l.strip()]
    assert len(lines) == 13
    assert "<size blend type-of-milk>" in lines


def test_equiv(capsys):
    union = "C[SPE'[eggs, coffee], SPE'[toast, cream?]] | SPE'[C[eggs, toast], C[coffee, cream?]]"
    weave = "W[C[eggs^, toast], C[coffee^, cream?]]"
    code, out, _ = run(capsys, "equiv", union, weave)
    assert code == 0 and out.strip() == "EQUIVALENT"
    code, out, _ = run(capsys, "equiv", "C[a, b]", "C[b, a]")
    assert code == 1 and out.startswith("DIFFER: <")


def test_enum_then_mine_round_trips(capsys, tmp_path):
    code, eps, _ = run(capsys, "enum", "PE*[size, blend, type-of-milk]")
    assert code == 0
    path = tmp_path / "coffee.eps"
    path.write_text(eps)
    code, out, _ = run(capsys, "mine", f"@{path}")
    assert code == 0
    assert out.strip() == "PE*[blend, size, type-of-milk]"


def test_gen_deterministic(capsys):
    _, first, _ = run(capsys, "gen", "--count", "2", "--seed", "5")
    _, second, _ = run(capsys, "gen", "--count", "2", "--seed", "5")
    assert first == second
    assert len(first.splitlines()) == 2


def test_eval_writes_report(capsys, tmp_path):
    out_dir = tmp_path / "report"
    code, out, _ = run(
        capsys, "eval", "--n", "3", "--seed", "1", "--out", str(out_dir)
    )
    assert code == 0
    assert "verbosity L3 (weaving)  1.000" in out
    data = json.loads((out_dir / "report.json").read_text())
    assert data["verbosity"]["L3"] == 1.0
    assert (out_dir / "histogram_l1.csv").read_text().startswith("bin,count")


def test_run_fixture_file(capsys, fixture_text, tmp_path):
    path = tmp_path / "breakfast.dlg"
    path.write_text(fixture_text("breakfast.dlg"))
    code, out, _ = run(capsys, "run", f"@{path}", "<coffee cream? eggs toast>")
    assert code == 0 and out.strip() == "MEMBER"
