import re
import subprocess
import sys
from importlib.resources import files

import pytest

from termmodal.cli import DESK_SIGNATURE, main
from termmodal.parser import parse_formula, parse_model
from termmodal.semantics import evaluate

DATA = files("termmodal").joinpath("data")
HINTIKKA = str(DATA.joinpath("hintikka.model"))
KI = str(DATA.joinpath("ki.proof"))


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


class TestEval:
    def test_identity(self, capsys):
        code, out, _ = run(capsys, "eval", HINTIKKA, "x = x")
        assert code == 0 and out == "true\n"

    def test_hintikka(self, capsys):
        code, out, _ = run(capsys, "eval", HINTIKKA, "K[a] K[a] p", "--world", "w")
        assert code == 1 and out == "false\n"
        assert run(capsys, "eval", HINTIKKA, "K[a] p", "--world", "w")[0] == 0

    def test_missing_world(self, capsys):
        code, _, err = run(capsys, "eval", HINTIKKA, "p", "--world", "nowhere")
        assert code == 2 and "unknown world" in err

    def test_bind(self, capsys):
        assert run(capsys, "eval", HINTIKKA, "x = a", "--world", "w", "--bind", "x=α1")[0] == 0
        assert run(capsys, "eval", HINTIKKA, "x = a", "--world", "w", "--bind", "x=α2")[0] == 1
        code, _, err = run(capsys, "eval", HINTIKKA, "x = a", "--bind", "x=d1")
        assert code == 2 and "agent domain" in err

    def test_formula_from_file(self, capsys, tmp_path):
        path = tmp_path / "f.txt"
        path.write_text("K[a] p\n")
        assert run(capsys, "eval", HINTIKKA, f"@{path}", "--world", "w")[0] == 0

    def test_parse_error(self, capsys):
        code, _, err = run(capsys, "eval", HINTIKKA, "K[a] (p")
        assert code == 2 and "expected ')'" in err

    def test_missing_file(self, capsys):
        code, _, err = run(capsys, "eval", "no/such.model", "p")
        assert code == 2 and "cannot read" in err


class TestCheckProof:
    def test_shipped_ki(self, capsys):
        code, out, _ = run(capsys, "check-proof", KI)
        assert code == 0 and out == "proved: x = y -> K[a](x = y)\n"

    @pytest.mark.parametrize("ext", ["none", "4", "T,4,5"])
    def test_monotone(self, capsys, ext):
        assert run(capsys, "check-proof", KI, "--ext", ext)[0] == 0

    def test_corrupted_index(self, capsys, tmp_path):
        path = tmp_path / "bad.proof"
        path.write_text(DATA.joinpath("ki.proof").read_text("utf-8").replace("MP 5 3", "MP 4 3"))
        code, out, _ = run(capsys, "check-proof", str(path))
        assert code == 1 and out.startswith("rejected: line 6:")

    def test_bad_ext(self, capsys):
        assert run(capsys, "check-proof", KI, "--ext", "B")[0] == 2

    def test_wrong_agent_count(self, capsys):
        code, out, _ = run(capsys, "check-proof", KI, "--n", "3")
        assert code == 1 and "agents" in out


class TestCountermodel:
    def test_excluded_middle(self, capsys):
        code, out, _ = run(capsys, "countermodel", "p | ~p")
        assert code == 0 and out.startswith("exhausted bounds")

    def test_four_for_constant_on_transitive(self, capsys):
        code, out, _ = run(capsys, "countermodel", "K[a] p -> K[a] K[a] p", "--class", "transitive")
        assert code == 1
        world = re.search(r"# countermodel: formula false at world (\S+)", out).group(1)
        sig, model = parse_model(out)
        phi = parse_formula("K[a] p -> K[a] K[a] p", sig)
        assert not evaluate(phi, model, world)

    def test_truth_on_reflexive(self, capsys):
        code, out, _ = run(capsys, "countermodel", "forall x. K[x] p -> p", "--class", "reflexive")
        assert code == 0 and "reflexive frames" in out

    def test_valuation_reported(self, capsys):
        code, out, _ = run(capsys, "countermodel", "u = v")
        assert code == 1 and "# valuation: u=d1, v=d2" in out

    def test_cap(self, capsys):
        code, _, err = run(capsys, "countermodel", "K[a] P(u) -> K[a] P(u)", "--max-models", "10")
        assert code == 3 and "cap exceeded" in err

    def test_bad_class(self, capsys):
        assert run(capsys, "countermodel", "p", "--class", "serial")[0] == 2

    def test_bad_bounds(self, capsys):
        assert run(capsys, "countermodel", "p", "--max-worlds", "0")[0] == 2

    def test_signature_file(self, capsys):
        code, _, err = run(capsys, "countermodel", "K[c] r", "--signature", KI)
        assert code == 2 and "not agent-referring" in err
        code, out, _ = run(capsys, "countermodel", "r -> r", "--signature", KI)
        assert code == 0

    def test_deterministic(self, capsys):
        first = run(capsys, "countermodel", "K[a] p -> p")
        assert run(capsys, "countermodel", "K[a] p -> p") == first


class TestSweep:
    def test_axiom_four(self, capsys):
        code, out, _ = run(capsys, "sweep", "--axiom", "4")
        assert code == 0 and out.strip().endswith("0 violators")

    def test_injected_fault(self, capsys):
        code, out, _ = run(capsys, "sweep", "--axiom", "4", "--inject-fault")
        assert code == 1 and out.startswith("frame ")

    def test_knowing_who_small(self, capsys):
        code, out, _ = run(capsys, "sweep", "--knowing-who", "--max-worlds", "2", "--scope", "both")
        assert code == 1
        assert "premise scope: world" in out and "premise scope: model" in out

    @pytest.mark.slow
    def test_knowing_who_default(self, capsys):
        # violators exist at the default bounds, so the status is 1
        code, out, _ = run(capsys, "sweep", "--knowing-who")
        assert code == 1
        assert out.splitlines()[0].startswith("frame 49 model 557 world w1 [α1: w0->w1; α2: w1->w0]")
        assert "65866 violators" in out

    def test_needs_mode(self, capsys):
        assert run(capsys, "sweep")[0] == 2


class TestParse:
    def test_canonical(self, capsys):
        code, out, _ = run(capsys, "parse", "~K[a]~p")
        assert code == 0 and out == "P[a] p\n"

    def test_term(self, capsys):
        assert run(capsys, "parse", "--term", "a")[1] == "a\n"


def test_help(capsys):
    assert main(["--help"]) == 0


def test_desk_signature():
    assert DESK_SIGNATURE.agent_count == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "termmodal", "eval", HINTIKKA, "x = x"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout == "true\n"
