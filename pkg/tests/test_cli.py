import io
import json
import shutil
import subprocess
import sys

import pytest

from galois_lab.cli import run
from galois_lab.serialize import decode, loads, round_trips


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


# -- the documented examples ------------------------------------------------------------------
def test_measure_prints_one_half():
    code, out, _ = call("measure", "E(Q(sqrt(2)):id)")
    assert code == 0 and out.strip() == "1/2"


def test_factor_generator_over_its_field():
    code, out, _ = call("factor", "x^2-2", "--over", "Q(sqrt(2))")
    lines = out.strip().splitlines()
    assert code == 0 and lines[1:] == ["x - a", "x + a"]
    code, out, _ = call("factor", "x^2-2", "--over", "Q(sqrt(2))", "--format", "machine")
    recs = [loads(line) for line in out.splitlines()]
    assert [len(r["poly"]) for r in recs] == [2, 2] and all(r["multiplicity"] == 1 for r in recs)


def test_construct_random_three_stages():
    code, out, _ = call("construct-random", "--avoid", "prime-sqrt", "--stages", "3", "--policy", "least")
    assert code == 0
    lines = out.splitlines()
    assert lines[0].startswith("stage 1: moved")
    assert sum(line.startswith("stage") and " moved " in line for line in lines) == 2
    assert lines[-1] == "verification: moved ok, fixed ok, consistent ok"
    code, out, _ = call("construct-random", "--avoid", "prime-sqrt", "--stages", "3", "--format", "machine")
    first = decode(loads(out.splitlines()[0]))["record"]
    assert first.moved and first.element.minpoly.coeffs[0] == -2


# -- exit codes ------------------------------------------------------------------------------------
def test_unknown_subcommand():
    code, out, err = call("frobnicate")
    assert code == 2 and out == "" and "usage" in err


def test_no_subcommand():
    code, _, err = call()
    assert code == 2 and "usage" in err


def test_malformed_input():
    assert call("measure", "E(Q(sqrt(2)):id")[0] == 2
    assert call("factor", "x^^2")[0] == 2
    assert call("tower-measures", "no-such-tower")[0] == 2


def test_domain_errors():
    assert call("galois-group", "Q(root(2, 3))")[0] == 3
    assert call("arith", "inv", "0")[0] == 3
    assert call("factor", "0")[0] == 3


def test_stage_failure():
    code, _, err = call("construct-random", "--avoid", "Q(sqrt(2))", "--stages", "3")
    assert code == 4 and "stage 3" in err


def test_config_degree_cap(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"max_degree": 2, "depth": 2}))
    assert call("galois-group", "Q(sqrt(2), sqrt(3))", "--config", str(cfg))[0] == 3
    assert call("galois-group", "Q(sqrt(2))", "--config", str(cfg))[0] == 0
    # the configured depth reaches a degree 4 level, over the cap
    assert call("tree", "--config", str(cfg))[0] == 3
    code, out, _ = call("tree", "--config", str(cfg), "--depth", "1")
    assert code == 0 and len([l for l in out.splitlines() if l.startswith("level")]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    assert call("measure", "FULL", "--config", str(bad))[0] == 2


def test_argument_file(tmp_path):
    f = tmp_path / "args.txt"
    f.write_text("E(Q(sqrt(2)):-sqrt(2)) | E(Q(sqrt(3)):id)\n")
    code, out, _ = call("measure", f"@{f}")
    assert code == 0 and out.strip() == "3/4"


# -- subcommand coverage and machine round trips ----------------------------------------------
COMMANDS = [
    ["factor", "x^4-10*x^2+1"],
    ["factor", "x^4-10*x^2+1", "--over", "Q(sqrt(2))"],
    ["minpoly", "sqrt(2)+sqrt(3)"],
    ["minpoly", "sqrt(2)+sqrt(3)", "--over", "Q(sqrt(2))"],
    ["arith", "add", "sqrt(2)", "sqrt(3)"],
    ["arith", "mul", "sqrt(2)", "sqrt(3)"],
    ["arith", "sub", "sqrt(2)", "sqrt(2)"],
    ["arith", "div", "1", "sqrt(2)"],
    ["arith", "neg", "I"],
    ["arith", "inv", "zeta(5)"],
    ["conjugates", "sqrt(2)+sqrt(3)"],
    ["conjugates", "sqrt(2)+sqrt(3)", "--over", "Q(sqrt(6))"],
    ["primitive", "sqrt(2)", "sqrt(3)"],
    ["membership", "sqrt(2)", "--over", "Q(sqrt(2)+sqrt(3))"],
    ["membership", "sqrt(5)", "--over", "Q(sqrt(2))"],
    ["galois-group", "Q(sqrt(2), sqrt(3))"],
    ["galois-group", "--over", "Q(zeta(5))"],
    ["tree", "--depth", "2", "--tower", "prime-sqrt"],
    ["tree", "--depth", "1", "--over", "Q(sqrt(2))"],
    ["orbit", "sqrt(2)", "sqrt(3)", "--over", "Q(sqrt(2))"],
    ["graph", "--depth", "12"],
    ["graph", "--depth", "12", "--strong", "--over", "Q(sqrt(-3))"],
    ["measure", "E(Q(root(2, 3)):#1) | ~E(Q(sqrt(2)):id)"],
    ["tower-measures", "prime-sqrt", "--depth", "3"],
    ["mu-test", "--index", "2"],
    ["mu-test", "Q", "--index", "0"],
    ["intersect", "Q(sqrt(2))", "Q(sqrt(3))", "--depth", "3", "--search", "prime-sqrt"],
    ["intersect", "Q", "Q", "--depth", "1"],
    ["witness", "prime-sqrt", "--catalog", "prime-sqrt:0:2", "--depth", "2"],
    ["witness", "Q(sqrt(2))", "--catalog", "prime-sqrt", "--depth", "2"],
    ["construct-random", "--avoid", "pow2-roots-of-unity", "--stages", "2"],
    ["construct-random", "--stages", "2"],
]


@pytest.mark.parametrize("argv", COMMANDS, ids=[" ".join(a) for a in COMMANDS])
def test_human_and_machine_outputs(argv):
    code, human, _ = call(*argv)
    assert code == 0 and human.strip()
    code, machine, _ = call(*argv, "--format", "machine")
    assert code == 0
    lines = machine.splitlines()
    assert lines
    for line in lines:
        assert round_trips(line), line
    assert call(*argv, "--format", "machine")[1] == machine


def test_approx_flag():
    plain = call("arith", "add", "sqrt(2)", "sqrt(3)")[1]
    approx = call("arith", "add", "sqrt(2)", "sqrt(3)", "--approx")[1]
    assert "~" not in plain and "3.14626" in approx


def test_membership_human_text():
    code, out, _ = call("membership", "sqrt(5)", "--over", "Q(sqrt(2))")
    assert code == 0 and "not" in out


# -- the installed entry point ----------------------------------------------------------------
def _entry():
    exe = shutil.which("galois-lab")
    return [exe] if exe else [sys.executable, "-m", "galois_lab.cli"]


def test_byte_identical_across_processes():
    argv = ["construct-random", "--avoid", "prime-sqrt", "--stages", "3", "--policy", "least", "--format", "machine"]
    a = subprocess.run(_entry() + argv, capture_output=True, check=True).stdout
    b = subprocess.run(_entry() + argv, capture_output=True, check=True).stdout
    assert a == b and a


def test_process_exit_codes():
    assert subprocess.run(_entry() + ["nonsense"], capture_output=True).returncode == 2
    r = subprocess.run(_entry() + ["measure", "E(Q(sqrt(2)):id)"], capture_output=True, text=True)
    assert r.returncode == 0 and r.stdout.strip() == "1/2"
