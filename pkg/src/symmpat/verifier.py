"""Checking candidate symmetry patterns against parameterised systems.

A pattern R is read as a relation on configurations: pairs outside S x S are
ignored.  The core condition is simulation: whenever v1 -> w1 and R(v1, v2),
some w2 with v2 -> w2 has R(w1, w2).  Violations are searched for as words
of a multi-track product, explored on the fly so only reachable parts are
built.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from . import automata as fa
from . import relations as rl
from .automata import PAD, Alphabet, Nfa
from .relations import Rel


@dataclass(eq=False)
class ParamSystem:
    name: str
    alphabet: Alphabet
    configs: Nfa
    actions: Mapping[str, Rel]

    def __post_init__(self):
        self.actions = dict(self.actions)
        if self.configs.alphabet != self.alphabet:
            raise fa.AlphabetMismatch("configuration automaton alphabet differs from system alphabet")
        for label, r in self.actions.items():
            if r.sigma != self.alphabet:
                raise fa.AlphabetMismatch(f"action {label!r} is over a different alphabet")
            v = rl.check_length_preserving(r)
            if not v:
                raise fa.AutomatonError(f"action {label!r} is not length-preserving, e.g. {v.witness}")

    @property
    def labels(self) -> list[str]:
        return sorted(self.actions)

    @cached_property
    def configs_dfa(self) -> Nfa:
        return fa.trim(fa.minimize(self.configs))

    @cached_property
    def _restricted(self) -> dict:
        return {}

    def action_on_configs(self, label: str) -> Rel:
        """The action with both sides restricted to configurations."""
        cache = self._restricted
        if label not in cache:
            r = rl.restrict(self.actions[label], self.configs_dfa, self.configs_dfa)
            cache[label] = rl.Rel(self.alphabet, fa.trim(fa.minimize(r.base)), check=False)
        return cache[label]

    def action_complement(self, label: str) -> Nfa:
        """Complete DFA over padded pairs for pairs *not* in the action."""
        key = ("co", label)
        cache = self._restricted
        if key not in cache:
            cache[key] = fa.complement(fa.minimize(self.action_on_configs(label).base))
        return cache[key]

    @cached_property
    def transition_relation(self) -> Rel:
        rels = [self.action_on_configs(a) for a in self.labels]
        if not rels:
            return rl.Rel(self.alphabet, fa.empty(rl.padded_alphabet(self.alphabet)), check=False)
        return rl.union_rel(*rels)

    def successors(self, word: Sequence) -> list[tuple]:
        img = rl.image_of_word(self.transition_relation, word)
        return fa.enumerate_words(img, len(word))

    def __repr__(self):
        return f"ParamSystem({self.name!r}, |Σ|={len(self.alphabet)}, actions={self.labels})"


@dataclass(frozen=True)
class Counterexample:
    kind: str  # missingDomain | missingRange | contradictoryPairs | simulationTriple | ...
    words: tuple
    action: str | None = None

    def to_json(self):
        return {"kind": self.kind, "action": self.action,
                "words": _jsonable(self.words)}

    def __str__(self):
        return f"{self.kind}{' [' + self.action + ']' if self.action else ''}: {_show(self.words)}"


def _jsonable(x):
    if isinstance(x, tuple) and all(isinstance(s, str) for s in x):
        return list(x)
    if isinstance(x, (tuple, list)):
        return [_jsonable(y) for y in x]
    return x


def _show(x):
    if isinstance(x, tuple) and all(isinstance(s, str) for s in x):
        return "'" + " ".join(x) + "'" if x else "ε"
    if isinstance(x, (tuple, list)):
        return "(" + ", ".join(_show(y) for y in x) + ")"
    return str(x)


@dataclass
class VerifyReport:
    verdict: str  # "yes" | "no"
    gate: str | None = None
    counterexample: Counterexample | None = None
    stats: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.verdict == "yes"

    def to_json(self):
        return {"verdict": self.verdict, "gate": self.gate,
                "counterexample": self.counterexample.to_json() if self.counterexample else None,
                "stats": self.stats}


def restrict_to_configs(sys: ParamSystem, r: Rel) -> Rel:
    return rl.restrict(r, sys.configs_dfa, sys.configs_dfa)


# -- the two symmetry searches --------------------------------------------------

def _det_step(dfa: Nfa, k: int, pal: Alphabet, syms, p: int, a: int, b: int) -> int:
    if a == k and b == k:
        return p
    return dfa.successors(p, pal.id((syms[a], syms[b])))[0]


def _tracks(word, k, syms, n):
    return tuple(tuple(syms[t[i]] for t in word if t[i] != k) for i in range(n))


def _step_table(dfa: Nfa, sigma: Alphabet):
    """(state, a, b) -> next for a complete DFA over padded pairs; (#,#) stays."""
    k = len(sigma)
    syms = sigma.symbols + (PAD,)
    pal = dfa.alphabet
    table = []
    for p in range(dfa.num_states):
        row = {}
        for a in range(k + 1):
            for b in range(k + 1):
                if a == k and b == k:
                    row[(a, b)] = p
                else:
                    row[(a, b)] = dfa.successors(p, pal.id((syms[a], syms[b])))[0]
        table.append(row)
    return table


def simulation_violation(sys: ParamSystem, r_s: Rel, label: str):
    """Shortest (v1, v2, w1) with v1 -> w1, R(v1, v2) and no matching w2."""
    sigma = sys.alphabet
    k = len(sigma)
    t = sys.action_on_configs(label)
    a3 = _matching_successor_automaton(t, r_s)
    co = fa.complement(fa.minimize(a3))
    step = _step_table(co, sigma)
    ti, ri = t.index(), r_s.index()
    tacc, racc, cacc = t.base.accepting, r_s.base.accepting, co.accepting

    def succ(s):
        pt, pr, pc = s
        out = []
        for a1, tl in ti[pt].items():
            rl_ = ri[pr].get(a1, ())
            for a3_, qt in tl:
                for a2, qr in rl_:
                    out.append(((a1, a2, a3_), (qt, qr, step[pc][(a2, a3_)])))
        out.sort(key=lambda x: x[0])
        return out

    w = fa._bfs_witness((t.base.initial, r_s.base.initial, co.initial), succ,
                        lambda s: s[0] in tacc and s[1] in racc and s[2] in cacc)
    stats = {"product": a3.num_states, "complement": co.num_states}
    if w is None:
        return None, stats
    return _tracks(w, k, sigma.symbols, 3), stats


def _matching_successor_automaton(t: Rel, r_s: Rel) -> Nfa:
    """Pairs (v2, w1) such that some w2 has v2 -> w2 and R(w1, w2).

    v2 may be shorter than w1; past its end the action automaton idles while
    the pattern still reads (w1-letter, #)."""
    sigma = t.sigma
    k = len(sigma)
    syms = sigma.symbols + (PAD,)
    pal = rl.padded_alphabet(sigma)
    ti, ri = t.index(), r_s.index()
    start = (t.base.initial, r_s.base.initial)
    index = {start: 0}
    order = [start]
    trans = []
    i = 0
    while i < len(order):
        pt, pr = order[i]
        src = i
        i += 1
        for b, rlist in ri[pr].items():  # b: letter of w1
            if b == k:
                continue
            for c, qr in rlist:  # c: letter of w2
                if c == k:
                    # v2 and w2 have ended: action idles
                    nxt = [(k, pt)]
                else:
                    nxt = [(a, qt) for a, tl in ti[pt].items() for (cc, qt) in tl if cc == c]
                for a, qt in nxt:
                    key = (qt, qr)
                    j = index.get(key)
                    if j is None:
                        j = len(order)
                        index[key] = j
                        order.append(key)
                    trans.append((src, pal.id((syms[a], syms[b])), j))
    acc = [j for j, (pt, pr) in enumerate(order)
           if pt in t.base.accepting and pr in r_s.base.accepting]
    return Nfa(pal, len(order), 0, trans, acc)


def contradiction_violation(sys: ParamSystem, r_s: Rel, label: str):
    """Shortest (v1, v2, w1, w2): v1 -> w1, R(v1, v2), R(w1, w2), not v2 -> w2."""
    sigma = sys.alphabet
    k = len(sigma)
    t = sys.action_on_configs(label)
    co = sys.action_complement(label)
    step = _step_table(co, sigma)
    ti, ri = t.index(), r_s.index()
    tacc, racc, cacc = t.base.accepting, r_s.base.accepting, co.accepting

    def succ(s):
        pt, p1, p2, pc = s
        out = []
        r1, r2 = ri[p1], ri[p2]
        for a1, tl in ti[pt].items():
            l1 = r1.get(a1)
            if not l1:
                continue
            for a3, qt in tl:
                l2 = r2.get(a3)
                if not l2:
                    continue
                for a2, q1 in l1:
                    row = step[pc]
                    for a4, q2 in l2:
                        out.append(((a1, a2, a3, a4), (qt, q1, q2, row[(a2, a4)])))
        out.sort(key=lambda x: x[0])
        return out

    start = (t.base.initial, r_s.base.initial, r_s.base.initial, co.initial)
    w = fa._bfs_witness(start, succ, lambda s: s[0] in tacc and s[1] in racc
                        and s[2] in racc and s[3] in cacc)
    stats = {"complement": co.num_states}
    if w is None:
        return None, stats
    return _tracks(w, k, sigma.symbols, 4), stats


# -- reports --------------------------------------------------------------------

def _size_stats(sys: ParamSystem, r: Rel) -> dict:
    return {"pattern_states": r.num_states, "config_states": sys.configs.num_states,
            "action_states": {a: sys.actions[a].num_states for a in sys.labels}}


def _run_actions(sys, r_s, search, kind, stats):
    per = {}
    for label in sys.labels:
        t0 = time.perf_counter()
        w, st = search(sys, r_s, label)
        st["seconds"] = round(time.perf_counter() - t0, 4)
        per[label] = st
        if w is not None:
            stats["actions"] = per
            return Counterexample(kind, w, label)
    stats["actions"] = per
    return None


def verify_general(sys: ParamSystem, r: Rel) -> VerifyReport:
    """Simulation check for an arbitrary length-decreasing pattern."""
    t0 = time.perf_counter()
    stats = _size_stats(sys, r)
    ld = rl.check_length_decreasing(r)
    if not ld:
        return _finish(VerifyReport("no", "length-decreasing",
                                    Counterexample("lengthIncreasing", ld.witness), stats), t0)
    r_s = restrict_to_configs(sys, r)
    cex = _run_actions(sys, r_s, simulation_violation, "simulationTriple", stats)
    if cex:
        return _finish(VerifyReport("no", "simulation", cex, stats), t0)
    return _finish(VerifyReport("yes", None, None, stats), t0)


def verify_functional(sys: ParamSystem, r: Rel, assume_checked: bool = False) -> VerifyReport:
    """Simulation check for a functional pattern: no contradicting 4-tuple.

    Functionality is checked first unless the caller already did."""
    t0 = time.perf_counter()
    stats = _size_stats(sys, r)
    r_s = restrict_to_configs(sys, r)
    if not assume_checked:
        ld = rl.check_length_decreasing(r)
        if not ld:
            return _finish(VerifyReport("no", "length-decreasing",
                                        Counterexample("lengthIncreasing", ld.witness), stats), t0)
        fn = rl.check_functional(r_s)
        if not fn:
            return _finish(VerifyReport("no", "functional",
                                        Counterexample("contradictoryPairs", fn.witness), stats), t0)
    cex = _run_actions(sys, r_s, contradiction_violation, "contradictoryPairs", stats)
    if cex:
        v1, v2, w1, w2 = cex.words
        cex = Counterexample("contradictoryPairs", ((v1, v2), (w1, w2), (v2, w2)), cex.action)
        return _finish(VerifyReport("no", "symmetry", cex, stats), t0)
    return _finish(VerifyReport("yes", None, None, stats), t0)


def _finish(rep: VerifyReport, t0: float) -> VerifyReport:
    rep.stats["seconds"] = round(time.perf_counter() - t0, 4)
    return rep


MODES = ("simulation", "function", "complete")


def verify_symmetry_pattern(sys: ParamSystem, r: Rel, mode: str = "simulation") -> VerifyReport:
    """Gate checks in order, then the symmetry search for the mode."""
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if mode == "simulation":
        return verify_general(sys, r)
    t0 = time.perf_counter()
    stats = _size_stats(sys, r)
    r_s = restrict_to_configs(sys, r)
    gates = []
    if mode == "function":
        gates.append(("length-decreasing", lambda: rl.check_length_decreasing(r), "lengthIncreasing"))
    else:
        gates.append(("length-preserving", lambda: rl.check_length_preserving(r), "lengthChange"))
    gates.append(("functional", lambda: rl.check_functional(r_s), "contradictoryPairs"))
    if mode == "complete":
        gates.append(("injective", lambda: rl.check_injective(r_s), "contradictoryPairs"))
    # the four-track search only sees moves whose target has an image, so
    # without totality a move into an unmapped configuration goes unnoticed
    gates.append(("total", lambda: rl.check_total_on(r_s, sys.configs), "missingDomain"))
    if mode == "complete":
        gates.append(("surjective", lambda: rl.check_surjective_on(r_s, sys.configs), "missingRange"))
    for name, check, kind in gates:
        v = check()
        if not v:
            return _finish(VerifyReport("no", name, Counterexample(kind, v.witness), stats), t0)
    rep = verify_functional(sys, r, assume_checked=True)
    rep.stats.update(stats)
    rep.stats["seconds"] = round(time.perf_counter() - t0, 4)
    return rep


def check_invariance(sys: ParamSystem, generators: Sequence[Rel]) -> VerifyReport:
    """Complete-mode check of each generator; the first failure is reported."""
    t0 = time.perf_counter()
    per = []
    for i, g in enumerate(generators):
        rep = verify_symmetry_pattern(sys, g, "complete")
        per.append(rep.stats)
        if not rep.ok:
            rep.stats = {"generator": i, "generators": per, "seconds": round(time.perf_counter() - t0, 4)}
            return rep
    return VerifyReport("yes", None, None, {"generators": per,
                                            "seconds": round(time.perf_counter() - t0, 4)})


# -- abstraction through a pattern --------------------------------------------

def compute_image(sys: ParamSystem, r: Rel) -> ParamSystem:
    """The system induced on R(S): same actions, restricted to the image."""
    r_s = restrict_to_configs(sys, r)
    img = fa.minimize(rl.image_of_set(r_s, sys.configs))
    acts = {a: rl.restrict(sys.actions[a], img, img) for a in sys.labels}
    return ParamSystem(f"image({sys.name})", sys.alphabet, img, acts)


@dataclass
class SafetyReport:
    verdict: str  # "safeCertified" | "inconclusive"
    reason: str
    trace: list | None = None
    stats: dict = field(default_factory=dict)

    @property
    def ok(self):
        return self.verdict == "safeCertified"

    def to_json(self):
        return {"verdict": self.verdict, "reason": self.reason,
                "counterexample": None if self.trace is None else [list(w) for w in self.trace],
                "stats": self.stats}


def check_safety_via_image(sys: ParamSystem, r: Rel, init: Nfa, bad: Nfa) -> SafetyReport:
    """Explore the image system when it is finite.

    Safe in the image means safe in the original (R is a simulation), so a
    clean exploration certifies safety; anything else is inconclusive."""
    t0 = time.perf_counter()
    image = compute_image(sys, r)
    stats = {"image_states": image.configs.num_states}
    if not fa.is_finite(image.configs):
        stats["seconds"] = round(time.perf_counter() - t0, 4)
        return SafetyReport("inconclusive", "image is infinite", None, stats)
    r_s = restrict_to_configs(sys, r)
    horizon = fa.trim(image.configs).num_states
    configs = fa.enumerate_words(image.configs, horizon)
    start = fa.enumerate_words(rl.image_of_set(r_s, fa.intersect(init, sys.configs)), horizon)
    bad_img = set(fa.enumerate_words(rl.image_of_set(r_s, fa.intersect(bad, sys.configs)), horizon))
    stats["image_configs"] = len(configs)
    parent = {w: None for w in start}
    queue = list(start)
    hit = None
    while queue and hit is None:
        nxt = []
        for w in queue:
            if w in bad_img:
                hit = w
                break
            for u in image.successors(w):
                if u not in parent:
                    parent[u] = w
                    nxt.append(u)
        queue = nxt
    stats["explored"] = len(parent)
    stats["seconds"] = round(time.perf_counter() - t0, 4)
    if hit is None:
        return SafetyReport("safeCertified", "no bad image reachable in the finite image", None, stats)
    trace = []
    while hit is not None:
        trace.append(hit)
        hit = parent[hit]
    trace.reverse()
    return SafetyReport("inconclusive", "abstract trace reaches a bad image", trace, stats)
