import json
import subprocess
import sys

import pytest

from conftest import PHI1, THETA1, THETA2
from mitlkit.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(autouse=True)
def no_color(monkeypatch):
    monkeypatch.setenv("MITLKIT_COLOR", "0")


class TestFormulaCommands:
    def test_nnf(self, capsys):
        assert run(capsys, "nnf", "!(G(p -> F[2,3] q))")[:2] == (0, "T U[0,inf) (p & (F R[2,3] !q))\n")

    def test_parse(self, capsys):
        assert run(capsys, "parse", "a")[:2] == (0, "Atom a\n")

    def test_parse_singular(self, capsys):
        code, _, err = run(capsys, "parse", "F[1,1] a")
        assert code == 2 and "singular" in err

    def test_parse_alphabet(self, capsys):
        assert run(capsys, "parse", "c", "--alphabet", "a,b")[0] == 2

    def test_bound(self, capsys):
        assert run(capsys, "bound", "T U[2,3] b")[:2] == (0, "M=2 M_inf=10 M_1=1 K=4\n")
        assert run(capsys, "bound", "a")[:2] == (0, "M=2 M_inf=0 M_1=0 K=2\n")

    def test_formula_from_file(self, capsys, tmp_path):
        path = tmp_path / "phi.txt"
        path.write_text("T U[2,3] b\n", encoding="utf-8")
        assert run(capsys, "bound", f"@{path}")[:2] == (0, "M=2 M_inf=10 M_1=1 K=4\n")


class TestVerdicts:
    def test_eval_true(self, capsys):
        assert run(capsys, "eval", "true", "(a,0)")[:2] == (0, "true\n")

    def test_eval_false(self, capsys):
        assert run(capsys, "eval", PHI1, "(a,0.1)")[:2] == (1, "false\n")

    def test_eval_position(self, capsys):
        assert run(capsys, "eval", "b", "(a,0)(b,1)", "--pos", "2")[0] == 0
        assert run(capsys, "eval", "b", "(a,0)(b,1)", "--pos", "3")[0] == 2

    def test_bad_word(self, capsys):
        assert run(capsys, "eval", "a", "(a,2)(a,1)")[0] == 2

    @pytest.mark.parametrize("sem", ["id", "fstar", "fk:7", "ta"])
    def test_member(self, capsys, sem):
        assert run(capsys, "member", PHI1, THETA2, "--sem", sem)[:2] == (0, "true\n")
        assert run(capsys, "member", PHI1, "(a,0.1)", "--sem", sem)[:2] == (1, "false\n")

    def test_member_witness(self, capsys):
        code, out, _ = run(capsys, "member", PHI1, THETA1, "--sem", "id", "--witness")
        lines = out.splitlines()
        assert code == 0 and lines[0] == "true"
        assert lines[1].startswith("start  {(init,0)}")
        assert any("wait" in line for line in lines) and any("read b" in line for line in lines)

    def test_member_blocking(self, capsys):
        code, out, _ = run(capsys, "member", "a", "(b,0)", "--sem", "id", "--witness")
        assert code == 1 and "blocked after 1 letter(s)" in out

    def test_unknown_approximation(self, capsys):
        assert run(capsys, "member", "a", "(a,0)", "--sem", "nope")[0] == 2


class TestExports:
    def test_compile_json(self, capsys):
        code, out, _ = run(capsys, "compile", PHI1)
        doc = json.loads(out)
        assert code == 0 and doc["locations"] == ["init", "R@0", "U@0.1.1"]

    def test_compile_stable(self, capsys, tmp_path):
        outs = []
        for k in range(2):
            path = tmp_path / f"a{k}.dot"
            assert run(capsys, "compile", PHI1, "--out", "dot", "-o", str(path))[0] == 0
            outs.append(path.read_bytes())
        assert outs[0] == outs[1] and outs[0].startswith(b"digraph")

    def test_ta_outputs(self, capsys):
        code, out, _ = run(capsys, "ta", "a")
        assert code == 0 and out.startswith("clocks=2 locations=")
        first = run(capsys, "ta", PHI1, "--out", "json", "--cap", "30")[1]
        assert first == run(capsys, "ta", PHI1, "--out", "json", "--cap", "30")[1]
        assert json.loads(first)["clocks"] == 7

    def test_dot(self, capsys):
        assert run(capsys, "dot", PHI1)[1].startswith("digraph")
        assert run(capsys, "dot", PHI1, "--ta", "--cap", "20")[1].startswith("digraph ta")

    def test_stats(self, capsys):
        code, out, _ = run(capsys, "stats", PHI1, "--cap", "50")
        rows = dict(line.split(None, 1) for line in out.splitlines())
        assert code == 0 and rows["modalities"] == "2" and rows["M"] == "7" and rows["K"] == "7"


class TestHarness:
    def test_difftest(self, capsys, tmp_path):
        path = tmp_path / "reports.jsonl"
        code, out, err = run(capsys, "difftest", "--trials", "20", "--ta-trials", "5", "--seed", "7", "-o", str(path))
        summary = json.loads(out)
        assert code == 0 and summary["failed"] == 0 and summary["trials"] == 20
        assert "seed 7" in err
        assert len(path.read_text(encoding="utf-8").splitlines()) == 20


class TestUsage:
    def test_no_command(self, capsys):
        assert run(capsys, )[0] == 2

    def test_unknown_flag(self, capsys):
        assert run(capsys, "nnf", "a", "--bogus")[0] == 2

    def test_help(self, capsys):
        assert run(capsys, "--help")[0] == 0

    def test_module_entry_point(self):
        proc = subprocess.run(
            [sys.executable, "-m", "mitlkit", "eval", "true", "(a,0)"],
            capture_output=True,
            text=True,
            env={"MITLKIT_COLOR": "0", "PATH": ""},
        )
        assert proc.returncode == 0 and proc.stdout == "true\n"

    def test_color(self, capsys, monkeypatch):
        monkeypatch.setattr(sys.stdout, "isatty", lambda: True, raising=False)
        monkeypatch.setenv("MITLKIT_COLOR", "1")
        assert main(["eval", "true", "(a,0)"]) == 0
        assert "\033[32m" in capsys.readouterr().out
