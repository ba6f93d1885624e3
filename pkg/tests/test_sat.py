import sys
import textwrap
from itertools import product

import pytest
from hypothesis import given
from hypothesis import strategies as st

from symmpat import sat


def pigeonhole(b, pigeons, holes):
    v = {(p, h): b.new_var() for p in range(pigeons) for h in range(holes)}
    for p in range(pigeons):
        b.add([v[p, h] for h in range(holes)])
    for h in range(holes):
        b.at_most_one([v[p, h] for p in range(pigeons)])
    return v


def test_empty_formula_is_sat():
    assert sat.solve(sat.CnfBuilder()).status == sat.SAT


def test_contradiction_and_empty_clause():
    b = sat.CnfBuilder()
    x = b.new_var("x")
    b.add([x])
    b.add([-x])
    assert sat.solve(b).status == sat.UNSAT
    b = sat.CnfBuilder()
    b.add([])
    assert b.trivially_unsat and sat.solve(b).status == sat.UNSAT


def test_literals_must_exist():
    b = sat.CnfBuilder()
    with pytest.raises(sat.SatError):
        b.add([1])
    b.new_var("x")
    with pytest.raises(sat.SatError):
        b.new_var("x")
    assert b.var("x") == 1 and b.has("x")


def test_pigeonhole_three_into_two():
    b = sat.CnfBuilder()
    pigeonhole(b, 3, 2)
    assert sat.solve(b).status == sat.UNSAT


def test_timeout_is_not_unsat():
    b = sat.CnfBuilder()
    pigeonhole(b, 12, 11)
    res = sat.solve(b, timeout=0.2)
    assert res.status == sat.TIMEOUT


@pytest.mark.parametrize("n", [1, 2, 5, 8, 9, 14])
def test_exactly_one_models(n):
    b = sat.CnfBuilder()
    xs = [b.new_var() for _ in range(n)]
    b.exactly_one(xs)
    if n == 1:
        assert b.clauses == [(xs[0],)]
    count = 0
    for bits in product((0, 1), repeat=n):
        assumptions = [x if bit else -x for x, bit in zip(xs, bits)]
        if sat.solve(b, assumptions=assumptions).sat:
            count += 1
            assert sum(bits) == 1
    assert count == n


@given(st.integers(-3, 3), st.integers(0, 4), st.integers(-2, 2), st.data())
def test_bounded_int_arithmetic_by_replay(lo, width, k, data):
    b = sat.CnfBuilder()
    x = sat.BoundedInt(b, lo, lo + width)
    y = sat.BoundedInt(b, lo, lo + width)
    g = b.new_var()
    sat.int_plus(b, x, y, k, [g])
    vy = data.draw(st.integers(lo, lo + width))
    res = sat.solve(b, assumptions=[g, y.eq(vy)])
    if lo <= vy + k <= lo + width:
        assert res.sat and x.decode(res.model) == vy + k
    else:
        assert res.status == sat.UNSAT
    # without the guard anything goes
    assert sat.solve(b, assumptions=[-g, y.eq(vy), x.eq(lo)]).sat


def test_plus_one_at_the_top_is_impossible():
    b = sat.CnfBuilder()
    x = sat.BoundedInt(b, 0, 3)
    y = sat.BoundedInt(b, 0, 3)
    sat.int_plus_one(b, x, y)
    assert sat.solve(b, assumptions=[y.eq(3)]).status == sat.UNSAT
    sat.int_eq(b, x, y)
    assert sat.solve(b).status == sat.UNSAT


def test_dimacs_text():
    b = sat.CnfBuilder()
    x, y = b.new_var(), b.new_var()
    b.add([x, -y])
    b.add([y])
    assert b.to_dimacs(["hello"]) == "c hello\np cnf 2 2\n1 -2 0\n2 0\n"


def test_solver_output_parsing():
    res = sat.parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n", 3)
    assert res.sat and res.model[1] and not res.model[2] and res.model[3]
    assert sat.parse_solver_output("s UNSATISFIABLE\n", 3).status == sat.UNSAT
    assert sat.parse_solver_output("s UNKNOWN\n", 3).status == sat.TIMEOUT
    with pytest.raises(sat.SatError):
        sat.parse_solver_output("nothing\n", 3)


@pytest.fixture
def fake_solver(tmp_path):
    script = tmp_path / "solver.py"
    script.write_text(textwrap.dedent("""
        import sys
        from pysat.formula import CNF
        from pysat.solvers import Solver
        cnf = CNF(from_file=sys.argv[-1])
        with Solver(name="m22", bootstrap_with=cnf.clauses) as s:
            if s.solve():
                print("s SATISFIABLE")
                print("v " + " ".join(map(str, s.get_model())) + " 0")
            else:
                print("s UNSATISFIABLE")
    """))
    return f"{sys.executable} {script}"


def test_external_backend(fake_solver):
    backend = sat.make_backend(fake_solver)
    assert isinstance(backend, sat.ExternalBackend)
    b = sat.CnfBuilder()
    x, y = b.new_var(), b.new_var()
    b.add([x, y])
    res = sat.solve(b, backend, assumptions=[-x])
    assert res.sat and res.model[y]
    pigeonhole(b, 3, 2)
    assert sat.solve(b, backend).status == sat.UNSAT


def test_backend_from_environment(monkeypatch, fake_solver):
    monkeypatch.setenv(sat.SAT_CMD_ENV, fake_solver)
    assert isinstance(sat.make_backend(), sat.ExternalBackend)
    monkeypatch.delenv(sat.SAT_CMD_ENV)
    assert isinstance(sat.make_backend(), sat.PysatBackend)


def test_bad_model_is_caught():
    class Liar:
        def solve(self, b, timeout=None, assumptions=()):
            return sat.SatResult(sat.SAT, sat.Model((), b.num_vars))

    b = sat.CnfBuilder()
    b.add([b.new_var()])
    with pytest.raises(sat.SatError):
        sat.solve(b, Liar())
