"""CNF construction and solving.

Variables are positive integers; a literal is a signed variable.  Every
model returned by a backend is checked against all clauses before use.
"""
from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import threading
import time
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

SAT, UNSAT, TIMEOUT = "sat", "unsat", "timeout"
PAIRWISE_LIMIT = 8
SAT_CMD_ENV = "SYMM_SAT_CMD"


class SatError(RuntimeError):
    pass


class CnfBuilder:
    def __init__(self):
        self.num_vars = 0
        self.clauses: list[tuple[int, ...]] = []
        self.names: dict[Hashable, int] = {}
        self.labels: dict[int, Hashable] = {}
        self.trivially_unsat = False

    def new_var(self, name: Hashable | None = None) -> int:
        self.num_vars += 1
        v = self.num_vars
        if name is not None:
            if name in self.names:
                raise SatError(f"variable {name!r} already exists")
            self.names[name] = v
            self.labels[v] = name
        return v

    def var(self, name: Hashable) -> int:
        """Named variable, created on first use."""
        v = self.names.get(name)
        if v is None:
            v = self.new_var(name)
        return v

    def has(self, name: Hashable) -> bool:
        return name in self.names

    def add(self, lits: Iterable[int]):
        c = tuple(lits)
        for l in c:
            if l == 0 or abs(l) > self.num_vars:
                raise SatError(f"literal {l} out of range")
        if not c:
            self.trivially_unsat = True
        self.clauses.append(c)

    def add_all(self, clauses: Iterable[Iterable[int]]):
        for c in clauses:
            self.add(c)

    # -- cardinality -----------------------------------------------------------
    def at_least_one(self, lits: Sequence[int], guard: Sequence[int] = ()):
        self.add([-g for g in guard] + list(lits))

    def at_most_one(self, lits: Sequence[int]):
        lits = list(lits)
        if len(lits) <= PAIRWISE_LIMIT:
            for i in range(len(lits)):
                for j in range(i + 1, len(lits)):
                    self.add((-lits[i], -lits[j]))
            return
        # sequential counter: s_i means "some of lits[0..i] is true"
        prev = None
        for i, l in enumerate(lits):
            if i == len(lits) - 1:
                if prev is not None:
                    self.add((-prev, -l))
                break
            s = self.new_var()
            self.add((-l, s))
            if prev is not None:
                self.add((-prev, s))
                self.add((-prev, -l))
            prev = s

    def exactly_one(self, lits: Sequence[int]):
        self.at_least_one(lits)
        self.at_most_one(lits)

    def implies(self, premise: Sequence[int], conclusion: Sequence[int]):
        """(∧ premise) → (∨ conclusion)."""
        self.add([-p for p in premise] + list(conclusion))

    def to_dimacs(self, comments: Sequence[str] = ()) -> str:
        out = [f"c {c}" for c in comments]
        out.append(f"p cnf {self.num_vars} {len(self.clauses)}")
        out += [" ".join(map(str, c)) + " 0" for c in self.clauses]
        return "\n".join(out) + "\n"


class BoundedInt:
    """One-hot integer in [lo, hi]."""

    def __init__(self, b: CnfBuilder, lo: int, hi: int, name: Hashable | None = None):
        if hi < lo:
            raise SatError("empty integer domain")
        self.lo, self.hi = lo, hi
        self.vars = [b.new_var(None if name is None else (name, v)) for v in range(lo, hi + 1)]
        b.exactly_one(self.vars)

    def eq(self, value: int) -> int | None:
        """Literal for "== value", or None when value is out of range."""
        if self.lo <= value <= self.hi:
            return self.vars[value - self.lo]
        return None

    def values(self):
        return range(self.lo, self.hi + 1)

    def decode(self, model: "Model") -> int:
        for v, x in zip(self.values(), self.vars):
            if model[x]:
                return v
        raise SatError("one-hot integer has no value in model")


def int_eq(b: CnfBuilder, x: BoundedInt, y: BoundedInt, guard: Sequence[int] = ()):
    """guard → x == y."""
    for v in x.values():
        ly = y.eq(v)
        b.add([-g for g in guard] + [-x.eq(v)] + ([ly] if ly else []))


def int_plus(b: CnfBuilder, x: BoundedInt, y: BoundedInt, k: int, guard: Sequence[int] = ()):
    """guard → x == y + k; values of y whose sum overflows x are forbidden."""
    for v in y.values():
        lx = x.eq(v + k)
        b.add([-g for g in guard] + [-y.eq(v)] + ([lx] if lx else []))


def int_plus_one(b: CnfBuilder, x: BoundedInt, y: BoundedInt, guard: Sequence[int] = ()):
    int_plus(b, x, y, 1, guard)


class Model:
    def __init__(self, true_vars: Iterable[int], num_vars: int):
        self.true = frozenset(v for v in true_vars if v > 0)
        self.num_vars = num_vars

    def __getitem__(self, v: int) -> bool:
        return v in self.true if v > 0 else (-v) not in self.true

    def value(self, lit: int) -> bool:
        return self[lit]


@dataclass
class SatResult:
    status: str
    model: Model | None = None
    stats: dict = field(default_factory=dict)

    @property
    def sat(self):
        return self.status == SAT


def check_model(clauses: Iterable[Sequence[int]], model: Model):
    for c in clauses:
        if not any(model[l] for l in c):
            raise SatError(f"solver model violates clause {c}")


class PysatBackend:
    """In-process CDCL solver; keeps one solver alive across calls.

    Glucose is the default because it honours interrupts (timeouts)."""

    def __init__(self, name: str = "g4"):
        self.name = name
        self._solver = None
        self._pushed = 0
        self._builder = None

    def _sync(self, b: CnfBuilder):
        from pysat.solvers import Solver

        if self._solver is None or self._builder is not b or self._pushed > len(b.clauses):
            if self._solver is not None:
                self._solver.delete()
            self._solver = Solver(name=self.name)
            self._pushed = 0
            self._builder = b
        for c in b.clauses[self._pushed:]:
            self._solver.add_clause(list(c))
        self._pushed = len(b.clauses)

    def solve(self, b: CnfBuilder, timeout: float | None = None,
              assumptions: Sequence[int] = ()) -> SatResult:
        if b.trivially_unsat:
            return SatResult(UNSAT)
        self._sync(b)
        s = self._solver
        timer = None
        if timeout is not None:
            timer = threading.Timer(timeout, s.interrupt)
            timer.start()
            res = s.solve_limited(assumptions=list(assumptions), expect_interrupt=True)
            timer.cancel()
            s.clear_interrupt()
        else:
            res = s.solve(assumptions=list(assumptions))
        if res is None:
            return SatResult(TIMEOUT)
        if not res:
            return SatResult(UNSAT)
        return SatResult(SAT, Model(s.get_model() or (), b.num_vars))

    def close(self):
        if self._solver is not None:
            self._solver.delete()
            self._solver = None


class ExternalBackend:
    """Any DIMACS solver printing competition-style ``s``/``v`` lines.

    The command gets the CNF file path appended as its last argument."""

    def __init__(self, cmd: str):
        self.cmd = shlex.split(cmd)
        if not self.cmd:
            raise SatError("empty solver command")

    def solve(self, b: CnfBuilder, timeout: float | None = None,
              assumptions: Sequence[int] = ()) -> SatResult:
        if b.trivially_unsat:
            return SatResult(UNSAT)
        extra = [(a,) for a in assumptions]
        text = b.to_dimacs()
        if extra:
            lines = text.splitlines()
            lines[0] = f"p cnf {b.num_vars} {len(b.clauses) + len(extra)}"
            text = "\n".join(lines + [f"{a[0]} 0" for a in extra]) + "\n"
        with tempfile.NamedTemporaryFile("w", suffix=".cnf", delete=False) as fh:
            fh.write(text)
            path = fh.name
        try:
            proc = subprocess.run(self.cmd + [path], capture_output=True, text=True, timeout=timeout)
        except subprocess.TimeoutExpired:
            return SatResult(TIMEOUT)
        finally:
            os.unlink(path)
        return parse_solver_output(proc.stdout, b.num_vars)

    def close(self):
        pass


def parse_solver_output(text: str, num_vars: int) -> SatResult:
    status = None
    lits = []
    for line in text.splitlines():
        line = line.strip()
        if line.startswith("s "):
            word = line[2:].strip().upper()
            if word == "SATISFIABLE":
                status = SAT
            elif word == "UNSATISFIABLE":
                status = UNSAT
            else:
                status = TIMEOUT
        elif line.startswith("v "):
            lits += [int(x) for x in line[2:].split()]
    if status is None:
        raise SatError("solver printed no status line")
    if status != SAT:
        return SatResult(status)
    return SatResult(SAT, Model((l for l in lits if l > 0), num_vars))


def make_backend(cmd: str | None = None):
    """External solver if a command is given (or set in the environment)."""
    cmd = cmd or os.environ.get(SAT_CMD_ENV)
    if cmd:
        return ExternalBackend(cmd)
    return PysatBackend()


def solve(b: CnfBuilder, backend=None, timeout: float | None = None,
          assumptions: Sequence[int] = ()) -> SatResult:
    backend = backend or PysatBackend()
    t0 = time.perf_counter()
    res = backend.solve(b, timeout, assumptions)
    res.stats["seconds"] = round(time.perf_counter() - t0, 4)
    res.stats["vars"] = b.num_vars
    res.stats["clauses"] = len(b.clauses)
    if res.sat:
        check_model(b.clauses, res.model)
        for a in assumptions:
            if not res.model[a]:
                raise SatError(f"solver model ignores assumption {a}")
    return res
