"""Counterexample-guided synthesis of symmetry patterns.

A candidate is a DFA with states 0..n-1 over letter pairs, described by
Boolean variables x[q, a, b, q'] (transition) and z[q] (accepting).  Structural
constraints keep the search among plausible functions; every candidate is
then checked by the verifier and each failure is turned into clauses that
rule the candidate out.  The state bound n grows until a candidate passes.
"""
from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Sequence

from . import automata as fa
from . import relations as rl
from . import sat
from .automata import PAD, Nfa
from .relations import Rel
from .verifier import Counterexample, ParamSystem, VerifyReport, restrict_to_configs
from . import verifier as vf

MODES = ("homomorphism", "complete", "process")


class SynthError(RuntimeError):
    pass


@dataclass
class SynthConfig:
    mode: str = "process"
    n_min: int = 1
    n_max: int = 5
    hints: Sequence[tuple] = ()
    image_finite: bool = False
    non_identity: bool = True
    max_rounds: int | None = None
    sat_timeout: float | None = None
    # on a solver timeout: "stop" the search, or "advance" to the next n
    # (still sound, but the state count is then no longer minimal)
    on_timeout: str = "stop"
    time_budget: float | None = None
    sat_cmd: str | None = None
    check_progress: bool = False
    dump_dir: str | None = None
    # (init, bad): also require the image to certify that bad is unreachable
    safety: tuple | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown synthesis mode {self.mode!r}; expected one of {MODES}")
        if not 1 <= self.n_min <= self.n_max:
            raise ValueError("need 1 <= n_min <= n_max")
        if self.on_timeout not in ("stop", "advance"):
            raise ValueError("on_timeout must be 'stop' or 'advance'")
        if self.safety is not None and not self.image_finite:
            raise ValueError("a safety goal needs image_finite")


@dataclass
class AuditEvent:
    n: int
    round: int
    event: str  # candidate | refine | unsat | verified | timeout
    detail: dict = field(default_factory=dict)

    def to_json(self):
        return {"n": self.n, "round": self.round, "event": self.event, **self.detail}


@dataclass
class SynthResult:
    status: str  # found | exhausted | timeout
    pattern: Rel | None
    n: int | None
    report: VerifyReport | None
    audit: list[AuditEvent]
    stats: dict

    def to_json(self):
        return {"status": self.status, "states": self.n,
                "verdict": self.report.verdict if self.report else None, "counterexample": None,
                "stats": self.stats, "audit": [e.to_json() for e in self.audit]}


# -- encoding ------------------------------------------------------------------------

class Encoding:
    """Clauses describing candidate transducers with exactly n states."""

    def __init__(self, sys: ParamSystem, n: int, cfg: SynthConfig):
        self.sys = sys
        self.n = n
        self.cfg = cfg
        self.sigma = sys.alphabet
        self.k = len(self.sigma)
        self.b = sat.CnfBuilder()
        self.ins = list(range(self.k))
        self.outs = list(range(self.k)) + ([self.k] if cfg.mode == "homomorphism" else [])
        self._acc_cache: dict = {}
        self.s_dfa = fa.complete(fa.minimize(sys.configs))
        self._structure()

    # variables
    def x(self, q, a, b, q2) -> int:
        return self.b.var(("x", q, a, b, q2))

    def z(self, q) -> int:
        return self.b.var(("z", q))

    def trans_vars(self):
        for q in range(self.n):
            for a in self.ins:
                for b in self.outs:
                    for q2 in range(self.n):
                        yield (q, a, b, q2), self.x(q, a, b, q2)

    def _structure(self):
        b, n = self.b, self.n
        for key, _ in self.trans_vars():
            pass
        for q in range(n):
            self.z(q)
        # deterministic on letter pairs
        for q in range(n):
            for a in self.ins:
                for o in self.outs:
                    b.at_most_one([self.x(q, a, o, q2) for q2 in range(n)])
        self._live()
        self._bfs_numbering()
        b.add([self.z(0)])
        self._infinite()
        # same source and target: the input letter determines the output
        for q in range(n):
            for q2 in range(n):
                for a in self.ins:
                    for o1 in self.outs:
                        for o2 in self.outs:
                            if o1 < o2:
                                b.add((-self.x(q, a, o1, q2), -self.x(q, a, o2, q2)))
        # an accepting state looping on all identity letters has no other exits
        for q in range(n):
            loops = [self.x(q, a, a, q) for a in self.ins]
            for (p, a, o, q2), v in self.trans_vars():
                if p == q and not (a == o and q2 == q):
                    b.add([-self.z(q)] + [-l for l in loops] + [-v])
        if self.cfg.mode in ("complete", "process"):
            for q in range(n):
                for q2 in range(n):
                    for o in self.outs:
                        for a1 in self.ins:
                            for a2 in self.ins:
                                if a1 < a2:
                                    b.add((-self.x(q, a1, o, q2), -self.x(q, a2, o, q2)))
        if self.cfg.mode == "process":
            self._parikh()
        if self.cfg.mode == "homomorphism":
            self._pad_suffix()
        if self.cfg.image_finite:
            self._finite_output()
        if self.cfg.non_identity:
            b.add([v for (q, a, o, q2), v in self.trans_vars() if a != o])

    def _live(self):
        """Every state reaches acceptance and is reachable, via distance counters."""
        b, n = self.b, self.n
        dist = [sat.BoundedInt(b, 0, n - 1, ("y", q)) for q in range(n)]
        depth = [sat.BoundedInt(b, 0, n - 1, ("yr", q)) for q in range(n)]
        for q in range(n):
            b.add((-self.z(q), dist[q].eq(0)))
            opts = []
            for q2 in range(n):
                if q2 == q:
                    continue
                u = b.new_var()
                b.add([-u] + [self.x(q, a, o, q2) for a in self.ins for o in self.outs])
                sat.int_plus_one(b, dist[q], dist[q2], [u])
                opts.append(u)
            b.add([self.z(q)] + opts)
        b.add([depth[0].eq(0)])
        for q in range(1, n):
            opts = []
            for q2 in range(n):
                if q2 == q:
                    continue
                u = b.new_var()
                b.add([-u] + [self.x(q2, a, o, q) for a in self.ins for o in self.outs])
                sat.int_plus_one(b, depth[q], depth[q2], [u])
                opts.append(u)
            b.add(opts)

    def _bfs_numbering(self):
        """States are numbered in breadth-first order from the initial state,
        children by the smallest label leading to them.  Every candidate has
        exactly one such numbering, so this only removes renamings."""
        b, n = self.b, self.n
        labels = [(a, o) for a in self.ins for o in self.outs]
        edge = {}
        for i in range(n):
            for j in range(1, n):
                if i != j:
                    e = b.new_var()
                    xs = [self.x(i, a, o, j) for a, o in labels]
                    b.add([-e] + xs)
                    for v in xs:
                        b.add((-v, e))
                    edge[i, j] = e
        parent = {}
        for j in range(1, n):
            for i in range(j):
                p = b.new_var()
                earlier = [edge[i2, j] for i2 in range(i)]
                b.add((-p, edge[i, j]))
                for e in earlier:
                    b.add((-p, -e))
                b.add([p, -edge[i, j]] + earlier)
                parent[j, i] = p
            b.add([parent[j, i] for i in range(j)])
        # parents never decrease along the numbering
        for j in range(1, n - 1):
            for i in range(j):
                for i2 in range(i):
                    b.add((-parent[j, i], -parent[j + 1, i2]))
        # siblings ordered by the smallest label on the edge from the parent
        first = {}
        for i in range(n - 1):
            for j in range(i + 1, n):
                for li, (a, o) in enumerate(labels):
                    m = b.new_var()
                    v = self.x(i, a, o, j)
                    before = [self.x(i, a2, o2, j) for a2, o2 in labels[:li]]
                    b.add((-m, v))
                    for u in before:
                        b.add((-m, -u))
                    b.add([m, -v] + before)
                    first[i, j, li] = m
        for i in range(n - 2):
            for j in range(i + 1, n - 1):
                for li in range(len(labels)):
                    for lj in range(li):
                        b.add((-parent[j, i], -parent[j + 1, i], -first[i, j, li], -first[i, j + 1, lj]))

    def _infinite(self):
        """A cycle reading a fixed input letter, so the relation is infinite."""
        b, n = self.b, self.n
        a0 = self.ins[0]
        c = {(q, o, q2): b.new_var() for q in range(n) for o in self.outs for q2 in range(n)}
        b.add(list(c.values()))
        for (q, o, q2), v in c.items():
            b.add((-v, self.x(q, a0, o, q2)))
            b.add([-v] + [c[(q2, o2, q3)] for o2 in self.outs for q3 in range(n)])

    def _parikh(self):
        """Each accepted pair has input and output with equal letter counts."""
        b, n, k = self.b, self.n, self.k
        d = [[sat.BoundedInt(b, -(n - 1), n - 1, ("d", q, a)) for a in range(k)] for q in range(n)]
        for a in range(k):
            b.add([d[0][a].eq(0)])
            for q in range(n):
                b.add((-self.z(q), d[q][a].eq(0)))
        for (q, a, o, q2), v in self.trans_vars():
            for c in range(k):
                if a != o and c == a:
                    sat.int_plus(b, d[q2][c], d[q][c], 1, [v])
                elif a != o and c == o:
                    sat.int_plus(b, d[q2][c], d[q][c], -1, [v])
                else:
                    sat.int_eq(b, d[q2][c], d[q][c], [v])

    def _pad_suffix(self):
        """Once the output is padded it stays padded."""
        b, n, k = self.b, self.n, self.k
        pad = [b.var(("p", q)) for q in range(n)]
        for (q, a, o, q2), v in self.trans_vars():
            if o == k:
                b.add((-v, pad[q2]))
            else:
                b.add((-v, -pad[q]))

    def _finite_output(self):
        """Transitions with a real output letter form no cycle (ranked)."""
        b, n, k = self.b, self.n, self.k
        # ge[q][j] means rank(q) >= j, j = 1..n-1
        ge = [[None] + [b.var(("r", q, j)) for j in range(1, n)] for q in range(n)]
        for q in range(n):
            for j in range(2, n):
                b.add((-ge[q][j], ge[q][j - 1]))
        for (q, a, o, q2), v in self.trans_vars():
            if o == k:
                continue
            if n == 1:
                b.add((-v,))
                continue
            b.add((-v, ge[q2][1]))
            for j in range(1, n):
                if j + 1 < n:
                    b.add((-v, -ge[q][j], ge[q2][j + 1]))
                else:
                    b.add((-v, -ge[q][j]))

    # -- counterexample clauses -------------------------------------------------------
    def _ids(self, word):
        return [self.sigma.id(s) for s in word]

    def _path(self, m: int):
        b, n = self.b, self.n
        e = [[b.new_var() for _ in range(n)] for _ in range(m + 1)]
        for row in e:
            b.exactly_one(row)
        b.add([e[0][0]])
        for q in range(n):
            b.add((-e[m][q], self.z(q)))
        return e

    def _s_track(self, letters_at):
        """Force the word spelled by one-hot letter variables into S."""
        b, s = self.b, self.s_dfa
        m = len(letters_at)
        track = [[b.new_var() for _ in range(s.num_states)] for _ in range(m + 1)]
        b.add([track[0][s.initial]])
        for i, opts in enumerate(letters_at):
            for p in range(s.num_states):
                for let, lit in opts.items():
                    nxt = p if let == self.k else s.successors(p, let)[0]
                    b.add((-track[i][p], -lit, track[i + 1][nxt]))
        for p in range(s.num_states):
            if p not in s.accepting:
                b.add((-track[m][p],))

    def require_domain(self, v: Sequence):
        """Some w in S with (v, w) accepted."""
        a = self._ids(v)
        m = len(a)
        e = self._path(m)
        outs = [{o: self.b.new_var() for o in self.outs} for _ in range(m)]
        for row in outs:
            self.b.exactly_one(list(row.values()))
        for i in range(m):
            for q in range(self.n):
                for q2 in range(self.n):
                    for o, lit in outs[i].items():
                        self.b.add((-e[i][q], -e[i + 1][q2], -lit, self.x(q, a[i], o, q2)))
        self._s_track(outs)

    def require_range(self, w: Sequence):
        """Some v in S with (v, w) accepted."""
        o = self._ids(w)
        m = len(o)
        e = self._path(m)
        ins = [{a: self.b.new_var() for a in self.ins} for _ in range(m)]
        for row in ins:
            self.b.exactly_one(list(row.values()))
        for i in range(m):
            for q in range(self.n):
                for q2 in range(self.n):
                    for a, lit in ins[i].items():
                        self.b.add((-e[i][q], -e[i + 1][q2], -lit, self.x(q, a, o[i], q2)))
        self._s_track(ins)

    def require_pair(self, v: Sequence, w: Sequence):
        """(v, w) accepted (used for hints)."""
        conv = self._conv_ids(v, w)
        if conv is None:
            self.b.add(())
            return
        e = self._path(len(conv))
        for i, (a, o) in enumerate(conv):
            for q in range(self.n):
                for q2 in range(self.n):
                    self.b.add((-e[i][q], -e[i + 1][q2], self.x(q, a, o, q2)))

    def _conv_ids(self, v, w):
        out = []
        for a, o in rl.convolve(v, w):
            if a == PAD:
                return None
            ai = self.sigma.id(a)
            oi = self.k if o == PAD else self.sigma.id(o)
            if oi not in self.outs:
                return None
            out.append((ai, oi))
        return out

    def accept_indicator(self, v: Sequence, w: Sequence) -> int | None:
        """A literal that is true whenever the candidate accepts (v, w);
        None if no candidate of this shape can accept it."""
        key = (tuple(v), tuple(w))
        if key in self._acc_cache:
            return self._acc_cache[key]
        conv = self._conv_ids(v, w)
        if conv is None:
            self._acc_cache[key] = None
            return None
        b, n = self.b, self.n
        f = [[b.new_var() for _ in range(n)] for _ in range(len(conv) + 1)]
        b.add([f[0][0]])
        for i, (a, o) in enumerate(conv):
            for q in range(n):
                for q2 in range(n):
                    b.add((-f[i][q], -self.x(q, a, o, q2), f[i + 1][q2]))
        acc = b.new_var()
        for q in range(n):
            b.add((-f[-1][q], -self.z(q), acc))
        self._acc_cache[key] = acc
        return acc

    def forbid_together(self, pairs: Sequence[tuple]):
        """Not all of the given pairs are accepted."""
        lits = []
        for v, w in pairs:
            acc = self.accept_indicator(v, w)
            if acc is None:
                return
            lits.append(-acc)
        self.b.add(sorted(set(lits)))

    def add_counterexample(self, cex: Counterexample):
        if cex.kind == "missingDomain":
            self.require_domain(cex.words)
        elif cex.kind == "missingRange":
            self.require_range(cex.words)
        elif cex.kind == "contradictoryPairs":
            self.forbid_together(cex.words)
        else:
            raise SynthError(f"cannot refine with counterexample kind {cex.kind!r}")

    # -- decoding --------------------------------------------------------------------
    def decode(self, model: sat.Model) -> Rel:
        syms = self.sigma.symbols + (PAD,)
        trans = []
        for (q, a, o, q2), v in self.trans_vars():
            if model[v]:
                trans.append((q, (syms[a], syms[o]), q2))
        acc = [q for q in range(self.n) if model[self.z(q)]]
        return Rel.build(self.sigma, self.n, 0, trans, acc)

    def model_assumptions(self, model: sat.Model) -> list[int]:
        lits = [v if model[v] else -v for _, v in self.trans_vars()]
        lits += [self.z(q) if model[self.z(q)] else -self.z(q) for q in range(self.n)]
        return lits


# -- candidate checking ------------------------------------------------------------------

def check_candidate(sys: ParamSystem, r: Rel, mode: str, image_finite: bool = False):
    """First failing property of a candidate as (gate, counterexample), or None."""
    r_s = restrict_to_configs(sys, r)
    s = sys.configs
    fn = rl.check_functional(r_s)
    if not fn:
        return "functional", Counterexample("contradictoryPairs", fn.witness)
    if mode != "homomorphism":
        inj = rl.check_injective(r_s)
        if not inj:
            return "injective", Counterexample("contradictoryPairs", inj.witness)
    tot = rl.check_total_on(r_s, s)
    if not tot:
        return "total", Counterexample("missingDomain", tot.witness)
    if mode != "homomorphism":
        sur = rl.check_surjective_on(r_s, s)
        if not sur:
            return "surjective", Counterexample("missingRange", sur.witness)
    if image_finite:
        img = fa.trim(rl.image_of_set(r_s, s))
        if not fa.is_finite(img):
            return "image-finite", Counterexample("contradictoryPairs", (_long_pair(r_s, s, img),))
    rep = vf.verify_functional(sys, r, assume_checked=True)
    if not rep.ok:
        v1v2, w1w2, _ = rep.counterexample.words
        return "symmetry", Counterexample("contradictoryPairs", (v1v2, w1w2), rep.counterexample.action)
    return None


def _long_pair(r_s: Rel, s: Nfa, img: Nfa):
    """Some accepted (v, w) with w longer than the image automaton has states."""
    n = img.num_states
    long_ = fa.intersect(img, fa.length_between(img.alphabet, n + 1, None))
    w = fa.is_empty(long_).witness
    pre = fa.intersect(rl.preimage_of_set(r_s, fa.from_words(s.alphabet, [w])), s)
    v = fa.is_empty(pre).witness
    return (v, w)


def check_safety_goal(sys: ParamSystem, r: Rel, init: Nfa, bad: Nfa):
    """An abstract trace r0 ->* rk from an initial image to a bad image
    exists for every pattern relating some i in init to r0 and some f in bad
    to rk, so one of those two pairs must go."""
    rep = vf.check_safety_via_image(sys, r, init, bad)
    if rep.ok:
        return None
    if rep.trace is None:
        raise SynthError(f"safety check failed without a trace: {rep.reason}")
    r_s = restrict_to_configs(sys, r)
    sigma = sys.alphabet

    def source(target, lang):
        pre = rl.preimage_of_set(r_s, fa.from_words(sigma, [target]))
        return fa.is_empty(fa.intersect(fa.intersect(pre, lang), sys.configs)).witness

    first, last = rep.trace[0], rep.trace[-1]
    pairs = ((source(first, init), first), (source(last, bad), last))
    return "safety", Counterexample("contradictoryPairs", pairs)


def final_mode(mode: str) -> str:
    return "function" if mode == "homomorphism" else "complete"


# -- the loop ------------------------------------------------------------------------------

def cegar_loop(sys: ParamSystem, cfg: SynthConfig, log=None) -> SynthResult:
    t0 = time.perf_counter()
    backend = sat.make_backend(cfg.sat_cmd)
    audit: list[AuditEvent] = []
    cexs: list[Counterexample] = []
    rounds_total = 0

    def emit(ev):
        audit.append(ev)
        if log:
            log(ev)

    def out_of_time():
        return cfg.time_budget is not None and time.perf_counter() - t0 > cfg.time_budget

    timed_out = False
    try:
        for n in range(cfg.n_min, cfg.n_max + 1):
            enc = Encoding(sys, n, cfg)
            for v, w in cfg.hints:
                enc.require_pair(v, w)
            for c in cexs:
                enc.add_counterexample(c)
            rnd = 0
            while True:
                if out_of_time():
                    emit(AuditEvent(n, rnd, "timeout"))
                    return _result("timeout", None, None, None, audit, t0, rounds_total)
                if cfg.max_rounds is not None and rnd >= cfg.max_rounds:
                    emit(AuditEvent(n, rnd, "timeout", {"reason": "round limit"}))
                    return _result("timeout", None, None, None, audit, t0, rounds_total)
                if cfg.dump_dir:
                    os.makedirs(cfg.dump_dir, exist_ok=True)
                    with open(os.path.join(cfg.dump_dir, f"n{n}_r{rnd}.cnf"), "w") as fh:
                        fh.write(enc.b.to_dimacs([f"{sys.name} {cfg.mode} n={n} round={rnd}"]))
                res = sat.solve(enc.b, backend, cfg.sat_timeout)
                rnd += 1
                rounds_total += 1
                if res.status == sat.TIMEOUT:
                    emit(AuditEvent(n, rnd, "timeout", {"reason": "solver", "action": cfg.on_timeout}))
                    if cfg.on_timeout == "advance":
                        timed_out = True
                        break
                    return _result("timeout", None, None, None, audit, t0, rounds_total)
                if res.status == sat.UNSAT:
                    emit(AuditEvent(n, rnd, "unsat", {"sat_seconds": res.stats["seconds"]}))
                    break
                cand = enc.decode(res.model)
                found = check_candidate(sys, cand, cfg.mode, cfg.image_finite)
                if found is None and cfg.safety is not None:
                    found = check_safety_goal(sys, cand, *cfg.safety)
                if found is None:
                    rep = vf.verify_symmetry_pattern(sys, cand, final_mode(cfg.mode))
                    if not rep.ok:
                        raise SynthError(f"candidate passed the loop checks but not the verifier: {rep.gate}")
                    emit(AuditEvent(n, rnd, "verified", {"transitions": cand.base.num_transitions}))
                    return _result("found", fa_trimmed(cand), n, rep, audit, t0, rounds_total)
                gate, cex = found
                emit(AuditEvent(n, rnd, "refine", {"gate": gate, "counterexample": cex.to_json(),
                                                   "sat_seconds": res.stats["seconds"]}))
                cexs.append(cex)
                before = len(enc.b.clauses)
                enc.add_counterexample(cex)
                if cfg.check_progress:
                    _assert_progress(enc, res.model, backend, before)
    finally:
        if hasattr(backend, "close"):
            backend.close()
    return _result("timeout" if timed_out else "exhausted", None, None, None, audit, t0, rounds_total)


def fa_trimmed(r: Rel) -> Rel:
    return Rel(r.sigma, fa.trim(r.base), check=False)


def _assert_progress(enc: Encoding, model: sat.Model, backend, before: int):
    """The rejected candidate must violate the clauses just added."""
    res = sat.solve(enc.b, backend, assumptions=enc.model_assumptions(model))
    if res.status != sat.UNSAT:
        raise SynthError("refinement did not exclude the rejected candidate")


def _result(status, pattern, n, rep, audit, t0, rounds):
    return SynthResult(status, pattern, n, rep, audit,
                       {"seconds": round(time.perf_counter() - t0, 3), "rounds": rounds})
