"""Brute-force reference checks on one instance size.

Everything here enumerates words of a fixed length and decides membership
word by word, so it shares nothing with the automata-level verifier except
plain acceptance of a single word or pair.
"""
from __future__ import annotations

import random
from dataclasses import dataclass
from itertools import product
from typing import Sequence

from . import automata as fa
from . import patterns
from . import relations as rl
from .automata import Alphabet
from .relations import Rel
from .verifier import ParamSystem


@dataclass
class Instance:
    words: list[tuple]
    succ: dict[str, dict[tuple, set]]  # action -> config -> successors


def instance(sys: ParamSystem, n: int) -> Instance:
    words = [w for w in product(sys.alphabet.symbols, repeat=n) if fa.accepts(sys.configs, w)]
    succ = {}
    for a in sys.labels:
        act = sys.actions[a]
        succ[a] = {v: {u for u in words if rl.rel_accepts(act, v, u)} for v in words}
    return Instance(words, succ)


def relation_on(r: Rel, inst: Instance) -> dict[tuple, set]:
    return {v: {w for w in inst.words if rl.rel_accepts(r, v, w)} for v in inst.words}


def simulation_holds(sys: ParamSystem, r: Rel, n: int, inst: Instance | None = None) -> bool:
    """Every move v -> v' is matched: for (v, w) in R there is w -> w'
    with (v', w') in R, all inside the size-n configurations."""
    inst = inst or instance(sys, n)
    rel = relation_on(r, inst)
    for a, succ in inst.succ.items():
        for v in inst.words:
            for v2 in succ[v]:
                for w in rel[v]:
                    if not any(w2 in rel[v2] for w2 in succ[w]):
                        return False
    return True


def never_longer(r: Rel, max_len: int = 3) -> bool:
    """No accepted (v, w) with |w| > |v|, looking at |v| <= max_len."""
    syms = r.sigma.symbols
    for m in range(max_len + 1):
        for v in product(syms, repeat=m):
            for w in product(syms, repeat=m + 1):
                if rl.rel_accepts(r, v, w):
                    return False
    return True


def brute_verdict(sys: ParamSystem, r: Rel, n: int, inst: Instance | None = None) -> bool:
    """What simulation mode should answer when configurations have length n."""
    return never_longer(r) and simulation_holds(sys, r, n, inst)


def sized_system(sys: ParamSystem, n: int) -> ParamSystem:
    """The same system with configurations cut down to length n."""
    cfgs = fa.intersect(sys.configs, fa.length_between(sys.alphabet, n, n))
    return ParamSystem(f"{sys.name}[{n}]", sys.alphabet, cfgs, dict(sys.actions))


# -- candidate battery -------------------------------------------------------------

def _mutate(r: Rel, rng: random.Random) -> Rel:
    """Small structural damage: drop, redirect or relabel a transition, or
    toggle acceptance of a state."""
    base = r.base
    trans = list(base.transitions)
    acc = set(base.accepting)
    pal = base.alphabet
    kind = rng.choice(("drop", "redirect", "relabel", "accept"))
    if kind == "accept" or not trans:
        acc ^= {rng.randrange(base.num_states)}
    else:
        i = rng.randrange(len(trans))
        p, letter, q = trans[i]
        if kind == "drop":
            del trans[i]
        elif kind == "redirect":
            trans[i] = (p, letter, rng.randrange(base.num_states))
        else:
            trans[i] = (p, rl.pair_id(r.sigma, rng.choice(r.sigma.symbols), rng.choice(r.sigma.symbols)), q)
    syms = pal.symbols
    labelled = [(p, syms[l], q) for p, l, q in trans]
    return Rel(r.sigma, fa.Nfa.build(pal, base.num_states, base.initial, labelled, acc), check=True)


def battery(sigma: Alphabet, seed: int = 7) -> list[tuple[str, Rel]]:
    """Twenty fixed candidates: library patterns, simple relations and
    seeded mutants of the rotations and swaps."""
    ident = rl.basic_rel("identity", sigma)
    rot1 = patterns.rotation_from(sigma, 1)
    rot2 = patterns.rotation_from(sigma, 2)
    swap1 = patterns.transposition_at(sigma, 1)
    swap2 = patterns.transposition_at(sigma, 2)
    pairs = [(a, b) for a in sigma.symbols for b in sigma.symbols]
    everything = Rel(sigma, fa.star(fa.letters(rl.padded_alphabet(sigma), pairs)), check=False)
    out = [
        ("identity", ident),
        ("rot@1", rot1),
        ("rot@2", rot2),
        ("swap@1", swap1),
        ("swap@2", swap2),
        ("rot@1^-1", rl.inverse(rot1)),
        ("inequality", rl.basic_rel("inequality", sigma)),
        ("all-same-length", everything),
        ("empty", Rel(sigma, fa.empty(rl.padded_alphabet(sigma)), check=False)),
        ("rot@1+identity", rl.union_rel(rot1, ident)),
    ]
    rng = random.Random(seed)
    sources = [("rot@1", rot1), ("swap@1", swap1), ("rot@2", rot2), ("swap@2", swap2), ("identity", ident)]
    i = 0
    while len(out) < 20:
        name, src = sources[i % len(sources)]
        out.append((f"{name}~{i}", _mutate(src, rng)))
        i += 1
    return out


@dataclass
class OracleRow:
    system: str
    n: int
    candidate: str
    verifier: bool
    brute: bool

    @property
    def agree(self) -> bool:
        return self.verifier == self.brute


def compare(sys: ParamSystem, sizes: Sequence[int] = (2, 3, 4), seed: int = 7) -> list[OracleRow]:
    from .verifier import verify_symmetry_pattern

    rows = []
    cands = battery(sys.alphabet, seed)
    shape_ok = {name: never_longer(r, 3) for name, r in cands}
    for n in sizes:
        inst = instance(sys, n)
        small = sized_system(sys, n)
        for name, r in cands:
            got = verify_symmetry_pattern(small, r, "simulation").ok
            want = shape_ok[name] and simulation_holds(sys, r, n, inst)
            rows.append(OracleRow(sys.name, n, name, got, want))
    return rows
