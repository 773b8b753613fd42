import json
import subprocess
import sys

import pytest

from rascal_light.cli import main

from conftest import program_path


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_run_call_simplifier(capsys):
    code, out, _ = run_cli(
        capsys,
        "run",
        program_path("simplifier.rsl"),
        "--call",
        "simplify(plus(intlit(0), intlit(5)))",
    )
    assert code == 0
    assert out.strip() == "intlit(5)"


def test_run_call_prod(capsys):
    code, out, _ = run_cli(
        capsys, "run", program_path("prod.rsl"), "--call", "prod([1, 2, 0, 3])"
    )
    assert code == 0 and out.strip() == "0"
    code, out, _ = run_cli(
        capsys, "run", program_path("prod.rsl"), "--call", "prod([1, 2, 3])"
    )
    assert code == 0 and out.strip() == "6"


def test_run_fixpoint(capsys):
    code, out, _ = run_cli(capsys, "run", program_path("fixpoint.rsl"), "--call", "fix()")
    assert code == 0 and out.strip() == "3"


def test_run_knapsack(capsys):
    code, out, _ = run_cli(
        capsys,
        "run",
        program_path("knapsack.rsl"),
        "--call",
        "slowknapsack({item(1, 60), item(2, 100), item(3, 120)}, 5)",
    )
    assert code == 0
    assert out.strip() == "{item(2, 100), item(3, 120)}"


def test_run_infincrement_times_out(capsys):
    # The succ-rewrite grows its own children forever under top-down; any
    # succ-containing argument exhausts whatever fuel it is given.
    code, out, _ = run_cli(
        capsys,
        "run",
        program_path("infincrement.rsl"),
        "--call",
        "infincrement(succ(zero()))",
        "--fuel",
        "10000",
    )
    assert code == 4
    assert out.strip() == "timeout"


def test_run_infincrement_zero_terminates(capsys):
    # On zero() the rewrite never fires, so the traversal fails everywhere
    # and the visit returns the scrutinee unchanged.
    code, out, _ = run_cli(
        capsys,
        "run",
        program_path("infincrement.rsl"),
        "--call",
        "infincrement(zero())",
        "--fuel",
        "10000",
    )
    assert code == 0
    assert out.strip() == "zero()"


def test_eval_snippets(capsys):
    code, out, _ = run_cli(capsys, "run", "--eval", "1 + 2")
    assert code == 0 and out.strip() == "3"

    code, out, _ = run_cli(capsys, "run", "--eval", "(1 : 2)[3]")
    assert code == 2 and out.strip() == "throw nokey(3)"

    code, out, err = run_cli(capsys, "run", "--eval", "x")
    assert code == 5 and "x" in err

    code, out, _ = run_cli(capsys, "run", "--eval", "1 / 0")
    assert code == 3 and out.strip() == "error"

    # Boundary conversion: return becomes success, stray break is an error.
    code, out, _ = run_cli(capsys, "run", "--eval", "return 41 + 1")
    assert code == 0 and out.strip() == "42"
    code, out, _ = run_cli(capsys, "run", "--eval", "break")
    assert code == 3 and out.strip() == "error"


def test_eval_in_module_scope(capsys):
    code, out, _ = run_cli(
        capsys,
        "run",
        program_path("simplifier.rsl"),
        "--eval",
        "simplify(plus(intlit(0), plus(intlit(5), intlit(0))))",
    )
    assert code == 0 and out.strip() == "intlit(5)"


def test_parse_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.rsl"
    bad.write_text("data D = k(;")
    code, _, err = run_cli(capsys, "run", str(bad), "--eval", "1")
    assert code == 5
    assert "bad.rsl:1:" in err


def test_validation_error_exit_code(tmp_path, capsys):
    bad = tmp_path / "bad.rsl"
    bad.write_text("int f() = g();")
    code, _, err = run_cli(capsys, "run", str(bad), "--eval", "1")
    assert code == 5 and "g" in err


def test_unknown_function_and_arity(capsys):
    code, _, err = run_cli(capsys, "run", program_path("prod.rsl"), "--call", "nope()")
    assert code == 5
    code, _, err = run_cli(capsys, "run", program_path("prod.rsl"), "--call", "prod()")
    assert code == 5 and "expects" in err


def test_print_globals(tmp_path, capsys):
    mod = tmp_path / "g.rsl"
    mod.write_text("global int g = 1;\nint setg(int n) = g = n;\n")
    code, out, _ = run_cli(capsys, "run", str(mod), "--call", "setg(9)", "--print-globals")
    assert code == 0
    assert out.splitlines() == ["9", "global g = 9"]


def test_tree_format(capsys):
    code, out, _ = run_cli(capsys, "run", "--eval", "{2, 1}", "--format", "tree")
    assert code == 0
    doc = json.loads(out)
    assert doc["version"] == 1
    assert doc["result"] == "success"
    assert doc["value"] == {
        "kind": "set",
        "items": [{"kind": "int", "value": "1"}, {"kind": "int", "value": "2"}],
    }


def test_tree_format_with_globals(tmp_path, capsys):
    mod = tmp_path / "g.rsl"
    mod.write_text("global int g = 2;\nint f() = g * 3;\n")
    code, out, _ = run_cli(
        capsys, "run", str(mod), "--call", "f()", "--format", "tree", "--print-globals"
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["globals"] == {"g": {"kind": "int", "value": "2"}}
    assert doc["value"] == {"kind": "int", "value": "6"}


def test_tree_format_throw(capsys):
    code, out, _ = run_cli(capsys, "run", "--eval", "throw [1]", "--format", "tree")
    assert code == 2
    doc = json.loads(out)
    assert doc["result"] == "throw"
    assert doc["value"]["kind"] == "list"


def test_trace_records_propagation_rules(capsys):
    code, _, err = run_cli(capsys, "run", "--eval", "(throw 1) + 2", "--trace")
    assert code == 2
    rules = [line.split(" ")[0] for line in err.strip().splitlines()]
    assert "E-Thr-Sucs" in rules
    assert "E-Bin-Exc1" in rules


def test_trace_shows_store_deltas(capsys):
    code, _, err = run_cli(
        capsys, "run", "--eval", "local int q in q = 7 end", "--trace"
    )
    assert code == 0
    assert any("E-Asgn-Sucs" in line and "[q]" in line for line in err.splitlines())


def test_deterministic_output(capsys):
    args = (
        "run",
        program_path("knapsack.rsl"),
        "--call",
        "slowknapsack({item(1, 60), item(2, 100), item(3, 120)}, 5)",
        "--trace",
        "--format",
        "tree",
    )
    a = run_cli(capsys, *args)
    b = run_cli(capsys, *args)
    assert a == b


def test_fuel_env_var(capsys, monkeypatch):
    monkeypatch.setenv("RASCAL_LIGHT_FUEL", "3")
    code, out, _ = run_cli(capsys, "run", "--eval", "1 + 2 + 3 + 4")
    assert code == 4 and out.strip() == "timeout"
    monkeypatch.setenv("RASCAL_LIGHT_FUEL", "1000")
    code, out, _ = run_cli(capsys, "run", "--eval", "1 + 2 + 3 + 4")
    assert code == 0 and out.strip() == "10"


def test_init_timeout_exit_code(tmp_path, capsys):
    mod = tmp_path / "slow.rsl"
    mod.write_text("global int g = local int i in i = 0; while (i < 100) i = i + 1; i end;\n")
    code, _, err = run_cli(capsys, "run", str(mod), "--eval", "g", "--fuel", "5")
    assert code == 4 and "timeout" in err


def test_init_error_exit_code(tmp_path, capsys):
    mod = tmp_path / "bad.rsl"
    mod.write_text("global int g = 1 / 0;\n")
    code, _, err = run_cli(capsys, "run", str(mod), "--eval", "1")
    assert code == 3 and "g" in err


def test_module_subprocess_entry():
    proc = subprocess.run(
        [sys.executable, "-m", "rascal_light.cli", "run", "--eval", "2 * 21"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "42"


def test_harness_subcommand(capsys):
    code, out, _ = run_cli(capsys, "harness", "--suite", "purity", "--cases", "50", "--seed", "3")
    assert code == 0
    assert "suite purity: 50/50 passed" in out


def test_exit_codes_are_total_over_results():
    from rascal_light.cli import _exit_code
    from rascal_light.values import (
        BREAK,
        CONTINUE,
        ERROR,
        FAIL,
        Basic,
        Return,
        Success,
        Throw,
        TIMEOUT,
    )

    table = {
        Success(Basic(1)): 0,
        Throw(Basic(1)): 2,
        Return(Basic(1)): 3,
        BREAK: 3,
        CONTINUE: 3,
        FAIL: 3,
        ERROR: 3,
        TIMEOUT: 4,
    }
    for res, code in table.items():
        assert _exit_code(res) == code
