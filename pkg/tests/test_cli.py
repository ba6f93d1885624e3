import json

import pytest

from symmpat.cli import main

COFFEE_INIT = "1x* Bx* 1y (1y 1y)* By*"
COFFEE_BAD = "1x Bx* By*"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, _ = run(capsys, *argv, "--output", "json")
    data = json.loads(out)
    assert {"verdict", "counterexample", "stats"} <= set(data)
    return code, data


@pytest.mark.parametrize("argv,code", [
    (["verify", "--model", "herman", "--lib", "rot@1"], 0),
    (["verify", "--model", "herman", "--lib", "swap@1"], 1),
    (["verify", "--model", "coffee-can", "--pattern", "coffee-can", "--mode", "function"], 0),
    (["verify", "--model", "israeli-jalfon", "--reflection"], 0),
    (["image", "--model", "coffee-can", "--pattern", "coffee-can", "--check-finite"], 0),
    (["image", "--model", "herman", "--pattern", "identity", "--check-finite"], 1),
    (["safety", "--model", "coffee-can", "--pattern", "coffee-can",
      "--init", COFFEE_INIT, "--bad", COFFEE_BAD], 0),
    (["safety", "--model", "coffee-can", "--pattern", "identity",
      "--init", COFFEE_INIT, "--bad", COFFEE_BAD], 1),
    (["props", "--pattern", "rot@1", "--model", "herman"], 0),
    (["library-check", "--model", "resource-allocator"], 0),
    (["dihedral", "--model", "israeli-jalfon"], 0),
    (["dihedral", "--model", "herman"], 1),
    (["oracle", "--model", "herman", "--pattern", "rot@1", "--max-len", "3"], 0),
])
def test_exit_codes_and_json(capsys, argv, code):
    assert run(capsys, *argv)[0] == code
    got, data = run_json(capsys, *argv)
    assert got == code


@pytest.mark.parametrize("argv", [
    ["verify", "--model", "nope", "--lib", "rot@1"],
    ["verify", "--model", "herman", "--lib", "spin@1"],
    ["verify", "--model", "herman", "--pattern", "missing-file.pat"],
    ["synth", "--model", "herman", "--n-max", "2", "--init", "T*"],
    ["synth", "--model", "herman", "--n-min", "3", "--n-max", "2"],
    ["safety", "--model", "coffee-can", "--pattern", "coffee-can",
     "--init", COFFEE_INIT, "--bad", COFFEE_BAD, "--output", "dot"],
    ["dump", "--model", "herman", "--dot", "-", "--action", "jump"],
    ["props", "--pattern", "rot@1"],
])
def test_usage_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_parse_error_exit(tmp_path, capsys):
    p = tmp_path / "bad.sym"
    p.write_text("model m\nalphabet: a\nconfigs: (a\n")
    code, _, err = run(capsys, "verify", "--model", str(p), "--lib", "rot@1")
    assert code == 2 and "line 3" in err


def test_synth_found_and_saved(tmp_path, capsys):
    out = tmp_path / "p.pat"
    code, data = run_json(capsys, "synth", "--model", "herman", "--n-max", "5", "--save", str(out))
    assert code == 0 and data["status"] == "found" and data["states"] == 5
    code, _, _ = run(capsys, "verify", "--model", "herman", "--pattern", str(out))
    assert code == 0


def test_synth_budget_exit(capsys):
    code, out, _ = run(capsys, "synth", "--model", "herman", "--n-max", "5", "--max-rounds", "1")
    assert code == 3 and "status: timeout" in out
    code, out, _ = run(capsys, "synth", "--model", "herman", "--n-max", "1")
    assert code == 1 and "status: exhausted" in out


def test_synth_coffee_with_safety(capsys):
    code, data = run_json(capsys, "synth", "--model", "coffee-can", "--mode", "homomorphism",
                          "--n-max", "6", "--image-finite", "--init", COFFEE_INIT, "--bad", COFFEE_BAD)
    assert code == 0 and data["verdict"] == "yes"


def test_dump(tmp_path, capsys):
    out = tmp_path / "g.dot"
    code, text, _ = run(capsys, "dump", "--model", "herman", "--dot", str(out), "--action", "step")
    assert code == 0 and out.read_text().startswith('digraph "relation"')
    code, text, _ = run(capsys, "dump", "--model", "herman", "--dot", "-", "--text")
    assert text.startswith('digraph "nfa"') and "model herman" in text
    code, text, _ = run(capsys, "verify", "--model", "herman", "--lib", "rot@1", "--output", "dot")
    assert text.startswith("digraph")


def test_verbose_logs_rounds(capsys):
    code, _, err = run(capsys, "synth", "--model", "herman", "--n-max", "2", "-v")
    assert "n=1 round=1 unsat" in err


def test_help(capsys):
    with pytest.raises(SystemExit) as e:
        main(["--help"])
    assert e.value.code == 0
    assert "synth" in capsys.readouterr().out
