import json
import shutil
import subprocess
from pathlib import Path

import pytest

from ejlogic.cli import main

SAMPLES = Path(__file__).resolve().parent.parent / "samples"


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def samples(tmp_path):
    for p in SAMPLES.iterdir():
        shutil.copy(p, tmp_path / p.name)
    return tmp_path


def test_check_accepted(capsys, samples):
    code, out, _ = run(capsys, "check", samples / "sci.ejp")
    assert code == 0 and out.startswith("ACCEPTED")


def test_check_rejected(capsys, samples):
    bad = samples / "bad.ejp"
    bad.write_text("system AX\nstep 0 box x0 ; ax vii phi=\"x0\"\n")
    code, out, _ = run(capsys, "check", bad)
    assert code == 1 and out == "REJECTED step 0: witness instance mismatch\n"


def test_check_parse_error(capsys, samples):
    bad = samples / "bad.ejp"
    bad.write_text("system AX\nstep 0 box -> ; ax vii\n")
    code, _, err = run(capsys, "check", bad)
    assert code == 2 and "line 2" in err


def test_nec_writes_output(capsys, samples):
    out_path = samples / "boxed.ejp"
    code, _, _ = run(capsys, "nec", samples / "axnec.ejp", "--out", out_path)
    assert code == 0
    code, out, _ = run(capsys, "check", out_path)
    assert code == 0 and "conclusion box box (box x0 -> x0)" in out


def test_nec_refuses_without_axnec(capsys, samples):
    code, out, _ = run(capsys, "nec", samples / "sci.ejp")
    assert code == 1 and out.startswith("ERROR SystemLacksAxNec")


def test_genc(capsys, samples):
    code, out, _ = run(capsys, "genc", samples / "membership.ejp", "--const", "d1",
                       "--var", "x0")
    assert code == 0
    assert "conclusion all x0. ((x0 : v0) -> (x0 : v0))" in out


def test_genc_unknown_constant(capsys, samples):
    code, _, _ = run(capsys, "genc", samples / "membership.ejp", "--const", "d9", "--var", "x0")
    assert code == 2


def test_derive_k_report(capsys, tmp_path):
    report = tmp_path / "k.json"
    code, out, _ = run(capsys, "derive-k", "--phi", "x0", "--psi", "x1", "--report", report,
                       "--out", tmp_path / "k.ejp")
    assert code == 0
    data = json.loads(report.read_text())
    assert data["accepted"] and data["conclusion"] == "box (x0 -> x1) -> (box x0 -> box x1)"


def test_elaborate(capsys):
    code, out, _ = run(capsys, "elaborate", "xii", 'chi="~x0" sigma=[x0:="d1"] sigma\'=[x0:="d2"]',
                       "--prop", "d1", "--prop", "d2")
    assert code == 0 and out == "(d1 == d2) -> (~d1 == ~d2)\n"
    code, out, _ = run(capsys, "elaborate", "x", 'phi="x0" psi="x1"')
    assert code == 1 and out.startswith("REJECTED")


def test_parse(capsys):
    code, out, _ = run(capsys, "parse", "--text", "dia x0 & x1")
    assert code == 0 and out == "~(~box ~x0 -> ~x1)\n"
    code, _, err = run(capsys, "parse", "--text", "all x0. d1", "--prop", "d1")
    assert code == 2 and "ImproperFormula" in err


def test_validate_presets_and_mutation(capsys, samples):
    code, out, _ = run(capsys, "validate", samples / "s4.ejm")
    assert code == 0 and out.splitlines() == ["PASS", "warning SyntaxDependentBox"]
    text = (samples / "extensional.ejm").read_text().replace("neg: t -> f", "neg: t -> t")
    (samples / "broken.ejm").write_text(text)
    code, out, _ = run(capsys, "validate", samples / "broken.ejm")
    assert code == 3 and "fail ii witness t" in out


def test_eval_and_sets(capsys, samples):
    code, out, _ = run(capsys, "eval", samples / "s4.ejm", "--formula", "~x0", "--assign", "x0=nec")
    assert code == 0 and out.split()[0] == "imp"
    code, out, _ = run(capsys, "sets", samples / "s4.ejm")
    assert code == 0 and "imp" in out


def test_conditions(capsys, samples):
    code, out, _ = run(capsys, "cond", samples / "s4.ejm", "--which", "four")
    assert code == 0
    code, out, _ = run(capsys, "cond", samples / "s4.ejm", "--which", "e")
    assert code == 1 and "witness t" in out
    code, out, _ = run(capsys, "cond", samples / "extensional.ejm", "--which", "e")
    assert code == 0


def test_audit_and_translate(capsys, samples):
    code, out, _ = run(capsys, "audit", samples / "two_worlds.ejf", "--world", "w0")
    assert code == 0
    assert "box (x0 -> x1)\tfalse\ttrue\tDISAGREE" in out
    assert out.count("DISAGREE") == 1
    code, out, _ = run(capsys, "translate", samples / "two_worlds.ejf", "--world", "w0")
    assert code == 0 and out.endswith("assignment x0=t x1=t\n")


def test_search(capsys, samples):
    code, out, _ = run(capsys, "search", "--formula", "x0 -> box x0", "--max-worlds", "2")
    assert code == 1
    code, out, _ = run(capsys, "search", "--formula", "box x0 -> x0", "--max-worlds", "3")
    assert code == 0
    code, _, _ = run(capsys, "search", "--formula", "box x0 -> x0", "--max-worlds", "6")
    assert code == 2


def test_usage_errors(capsys, samples):
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "check")[0] == 2
    assert run(capsys, "check", samples / "missing.ejp")[0] == 2


def test_outputs_are_byte_stable(capsys, samples):
    argv = ("audit", samples / "two_worlds.ejf", "--world", "w0", "--depth", "2")
    assert run(capsys, *argv) == run(capsys, *argv)
    argv = ("nec", samples / "axnec.ejp")
    assert run(capsys, *argv) == run(capsys, *argv)


def test_console_script(samples):
    exe = shutil.which("ejk")
    if exe is None:
        pytest.skip("console script not installed")
    done = subprocess.run([exe, "check", str(samples / "axnec.ejp")], capture_output=True,
                          text=True)
    assert done.returncode == 0 and done.stdout.startswith("ACCEPTED")
