import json
import shutil
import subprocess

import pytest

from gsemkit.cli import CAP, NEGATIVE, OK, USAGE, run
from gsemkit.examples import SHELL_FORMULA

SWITCHING_GOLDEN = """\
Acyc1: fails
Acyc2: holds
Acyc2 order: A < B < C
Acyc1 blocked: context (), order A < B < C: [C<-0] gives {(0,0), (1,1)} on (A,B) but [C<-1] gives {(0,1), (1,0)}
Acyc1 blocked: context (), order A < C < B: [B<-0] gives {(0,0), (1,1)} on (A,C) but [B<-1] gives {(0,1), (1,0)}
Acyc1 blocked: context (), order B < C < A: [A<-0] gives {(0,0), (1,1)} on (B,C) but [A<-1] gives {(0,1), (1,0)}
"""


@pytest.fixture(scope="module")
def files(tmp_path_factory):
    out = tmp_path_factory.mktemp("examples")
    for which in ("shell-game", "switching-values", "derivations"):
        run(["examples", which, "--out", str(out)])
    return out


def _run(capsys, *argv):
    code = run([str(a) for a in argv])
    cap = capsys.readouterr()
    return code, cap.out, cap.err


def test_switching_values_golden(capsys):
    code, out, _ = _run(capsys, "examples", "switching-values")
    assert code == OK and out == SWITCHING_GOLDEN


def test_shell_game_lines(capsys):
    code, out, _ = _run(capsys, "examples", "shell-game")
    lines = out.splitlines()
    assert lines[0] == f"1. M_shell at (U=u0) satisfies {SHELL_FORMULA}: yes"
    assert lines[1].startswith("2. AX+ instances checked in M_shell:") and "violations: 0" in lines[1]
    assert lines[2].startswith("3. not phi over all 4096 SEMs: INVALID (256 SEMs satisfy phi")
    assert "VALID; M_shell satisfies phi': yes" in lines[3]
    # the unstrengthened incompleteness claim does not hold over SEMs
    assert code == NEGATIVE


def test_derivations_all_accept(capsys, files):
    code, out, _ = _run(capsys, "examples", "derivations")
    assert code == OK
    lines = out.splitlines()
    assert len(lines) == 8 and all(": ACCEPT " in line for line in lines)
    for proof in sorted(files.glob("*.proof")):
        code, out, _ = _run(capsys, "prove", "--model-signature", proof.with_suffix(".sig"),
                            "--derivation", proof)
        assert code == OK and out.startswith("ACCEPT "), proof.name


def test_prove_rejects_tampered_derivation(capsys, files, tmp_path):
    text = (files / "d4-variant.proof").read_text().replace("X=1", "X=0", 1)
    bad = tmp_path / "bad.proof"
    bad.write_text(text)
    code, out, _ = _run(capsys, "prove", "--model-signature", files / "d4-variant.sig",
                        "--derivation", bad)
    assert code == NEGATIVE and out.startswith("REJECT step 1:")


def test_check(capsys, files):
    model = files / "shell_game.model"
    code, out, _ = _run(capsys, "check", "--model", model, "--formula", "[S1<-1](Z=1)")
    assert (code, out) == (OK, "TRUE in context (U=u0): [S1<-1](Z=1)\n")
    code, out, _ = _run(capsys, "check", "--model", model, "--formula", "[S1<-1](Z=0)", "--json")
    assert code == NEGATIVE
    assert json.loads(out) == [{"formula": "[S1<-1](Z=0)", "holds": False}]


def test_solve(capsys, files):
    model = files / "switching_values.model"
    code, out, _ = _run(capsys, "solve", "--model", model, "--intervene", "C<-0")
    assert (code, out) == (OK, "(A=0, B=0, C=0)\n(A=1, B=1, C=0)\n")
    code, out, _ = _run(capsys, "solve", "--model", model, "--intervene", "C<-0", "--json")
    assert json.loads(out) == [{"A": "0", "B": "0", "C": "0"}, {"A": "1", "B": "1", "C": "0"}]


def test_classify(capsys, files):
    code, out, _ = _run(capsys, "classify", "--model", files / "shell_game.model")
    assert code == OK
    assert out.splitlines()[:4] == ["coh   yes", "acyc  yes", "ge1   yes", "le1   yes"]
    code, out, _ = _run(capsys, "classify", "--model", files / "switching_values.model",
                        "--class", "acyc")
    assert code == NEGATIVE and out.startswith("acyc  no\n")


def test_axioms_table(capsys, files):
    code, out, _ = _run(capsys, "axioms", "--model", files / "shell_game.model")
    assert code == OK
    lines = out.splitlines()
    assert lines[0] == "AX+: 0 violation(s)"
    assert lines[1].split() == ["schema", "instances", "valid", "violated", "not-in-language"]
    d9 = next(line.split() for line in lines if line.startswith("D9"))
    assert d9[1] == "0" and int(d9[4]) > 0


def test_decide_finds_the_shell_game(capsys, files, tmp_path):
    out_file = tmp_path / "found.model"
    code, out, _ = _run(capsys, "decide", "--signature", files / "shell_game.sig",
                        "--class", "coh,ge1,le1", "--formula", f"!({SHELL_FORMULA})",
                        "--out", out_file)
    assert code == NEGATIVE and out.startswith("INVALID")
    code, out, _ = _run(capsys, "check", "--model", out_file, "--formula", SHELL_FORMULA)
    assert code == OK


def test_decide_json_and_modes(capsys, files):
    sig = files / "shell_game.sig"
    code, out, _ = _run(capsys, "decide", "--signature", sig, "--formula", "[S1<-1](S1=1)", "--json")
    assert code == OK and json.loads(out)["verdict"] == "VALID"
    code, out, _ = _run(capsys, "decide", "--signature", sig, "--mode", "sem",
                        "--formula", f"!({SHELL_FORMULA})")
    assert code == NEGATIVE and out.startswith("INVALID")
    code, out, _ = _run(capsys, "decide", "--signature", sig, "--sat", "--formula", "<S1<-1>(Z=1)")
    assert code == OK and out.startswith("SAT")
    code, out, _ = _run(capsys, "decide", "--signature", sig, "--sample", "20",
                        "--formula", "[S1<-1](S1=1)")
    assert out.startswith("VALID (SAMPLED)")


def test_decide_cap(capsys, files, monkeypatch):
    monkeypatch.setenv("GSEMKIT_CAP", "10")
    code, out, _ = _run(capsys, "decide", "--signature", files / "shell_game.sig",
                        "--formula", "[S1<-1](S1=1)")
    assert code == CAP and "CAP-EXCEEDED(256)" in out
    code, out, _ = _run(capsys, "decide", "--signature", files / "shell_game.sig",
                        "--formula", "[S1<-1](S1=1)", "--cap", "1000")
    assert code == OK


def test_parse_json_round_trip(capsys, tmp_path):
    f = "<X<-1>(Y=0) | [](X=1)"
    code, out, _ = _run(capsys, "parse", "--formula", "<X<-1>(Y=0)|[](X=1)")
    assert (code, out) == (OK, f + "\n")
    code, out, _ = _run(capsys, "parse", "--formula", f, "--json")
    path = tmp_path / "f.json"
    path.write_text(out)
    code, again, _ = _run(capsys, "parse", "--from-json", path)
    assert (code, again) == (OK, f + "\n")


def test_syntax_error_points_at_the_problem(capsys, files):
    code, _, err = _run(capsys, "check", "--model", files / "shell_game.model", "--formula", "[](")
    assert code == USAGE
    assert err.startswith("gsem-kit: syntax error:")
    assert "   ^" in err


@pytest.mark.parametrize("argv", [
    ["nope"],
    ["solve", "--model", "/no/such/file.model"],
    ["check", "--model", "{model}", "--formula", "[T<-1](Z=1)"],
    ["solve", "--model", "{model}", "--context", "u9"],
])
def test_usage_errors(capsys, files, argv):
    argv = [a.replace("{model}", str(files / "shell_game.model")) for a in argv]
    code, _, err = _run(capsys, *argv)
    assert code == USAGE and err


@pytest.mark.skipif(shutil.which("gsem-kit") is None, reason="console script not installed")
def test_console_script():
    res = subprocess.run(["gsem-kit", "examples", "switching-values"], capture_output=True, text=True)
    assert res.returncode == 0 and res.stdout == SWITCHING_GOLDEN
