"""Regular binary relations as automata over padded letter pairs.

A pair of words (v, w) is read as its convolution: the shorter word is
padded with ``#`` on the right and the two tracks are read in lock step.
"""
from __future__ import annotations

from functools import lru_cache
from typing import Iterable, Sequence

from . import automata as fa
from .automata import PAD, Alphabet, AutomatonError, Nfa, Verdict

DOMAIN = "domain"
RANGE = "range"


@lru_cache(maxsize=None)
def padded_alphabet(sigma: Alphabet) -> Alphabet:
    """(Σ ∪ {#})² without (#, #), row-major with # last."""
    ext = tuple(sigma.symbols) + (PAD,)
    return Alphabet((a, b) for a in ext for b in ext if not (a == PAD and b == PAD))


def convolve(left: Sequence, right: Sequence) -> tuple:
    n = max(len(left), len(right))
    lt = tuple(left) + (PAD,) * (n - len(left))
    rt = tuple(right) + (PAD,) * (n - len(right))
    return tuple(zip(lt, rt))


def split(conv: Iterable[tuple]) -> tuple[tuple, tuple]:
    conv = list(conv)
    left = tuple(a for a, _ in conv if a != PAD)
    right = tuple(b for _, b in conv if b != PAD)
    return left, right


# pad phases of a convolution
_NONE, _LEFT, _RIGHT = 0, 1, 2


def _letter_phase(letter) -> int:
    a, b = letter
    if a == PAD:
        return _LEFT
    if b == PAD:
        return _RIGHT
    return _NONE


class Rel:
    """A regular relation over ``sigma`` given by an automaton over padded pairs.

    Construction enforces that padding only ever forms a suffix on one track,
    checked on the useful part of the automaton.
    """

    __slots__ = ("sigma", "base", "_index")

    def __init__(self, sigma: Alphabet, base: Nfa, check: bool = True):
        if base.alphabet != padded_alphabet(sigma):
            raise fa.AlphabetMismatch("relation automaton must run over the padded pair alphabet")
        self.sigma = sigma
        self.base = base
        self._index = None
        if check:
            _check_padding(base)

    @classmethod
    def build(cls, sigma: Alphabet, num_states: int, initial: int,
              transitions: Iterable[tuple[int, tuple, int]], accepting: Iterable[int]) -> "Rel":
        return cls(sigma, Nfa.build(padded_alphabet(sigma), num_states, initial,
                                    transitions, accepting))

    @property
    def num_states(self) -> int:
        return self.base.num_states

    def index(self) -> list[dict[int, tuple]]:
        """Per state: left letter id -> ((right letter id, target), ...).

        Letter ids are positions in Σ with len(Σ) standing for the pad."""
        if self._index is None:
            k = len(self.sigma)
            letters = self.base.alphabet.symbols
            ids = [(k if a == PAD else self.sigma.id(a), k if b == PAD else self.sigma.id(b))
                   for a, b in letters]
            idx = []
            for p in range(self.base.num_states):
                d: dict[int, list] = {}
                for x, qs in self.base.out(p).items():
                    a, b = ids[x]
                    for q in qs:
                        d.setdefault(a, []).append((b, q))
                idx.append({a: tuple(sorted(v)) for a, v in d.items()})
            self._index = idx
        return self._index

    def __repr__(self):
        return f"Rel(states={self.base.num_states}, sigma={list(self.sigma.symbols)!r})"


def _check_padding(base: Nfa):
    useful = fa.useful_states(base)
    if base.initial not in useful:
        return
    letters = base.alphabet.symbols
    phases = {base.initial: {_NONE}}
    stack = [base.initial]
    while stack:
        p = stack.pop()
        for x, qs in base.out(p).items():
            ph = _letter_phase(letters[x])
            for cur in phases[p]:
                if cur != _NONE and ph != cur:
                    raise AutomatonError(
                        f"ill-formed padding: letter {letters[x]!r} after a pad on state {p}")
            for q in qs:
                if q not in useful:
                    continue
                s = phases.setdefault(q, set())
                if ph not in s:
                    s.add(ph)
                    stack.append(q)


def pair_id(sigma: Alphabet, a, b) -> int:
    return padded_alphabet(sigma).id((a, b))


# -- membership ---------------------------------------------------------------

def rel_accepts(r: Rel, left: Sequence, right: Sequence) -> bool:
    try:
        return fa.accepts(r.base, convolve(left, right))
    except fa.UnknownSymbol:
        return False


def image_of_word(r: Rel, word: Sequence) -> Nfa:
    return image_of_set(r, fa.from_words(r.sigma, [word]))


# -- constructors -------------------------------------------------------------

def basic_rel(kind: str, sigma: Alphabet) -> Rel:
    """``identity`` or ``inequality`` (all pairs of distinct words)."""
    if kind == "identity":
        return Rel.build(sigma, 1, 0, [(0, (a, a), 0) for a in sigma], [0])
    if kind == "inequality":
        trans = []
        for a in sigma:
            for b in sigma:
                trans.append((0, (a, b), 0 if a == b else 1))
                trans.append((1, (a, b), 1))
        # padding on either side means different lengths, hence different words
        for a in sigma:
            trans.append((0, (a, PAD), 2))
            trans.append((1, (a, PAD), 2))
            trans.append((2, (a, PAD), 2))
            trans.append((0, (PAD, a), 3))
            trans.append((1, (PAD, a), 3))
            trans.append((3, (PAD, a), 3))
        return Rel.build(sigma, 4, 0, trans, [1, 2, 3])
    raise ValueError(f"unknown basic relation {kind!r}")


def from_pairs(sigma: Alphabet, pairs: Iterable[tuple[Sequence, Sequence]]) -> Rel:
    return Rel(sigma, fa.from_words(padded_alphabet(sigma), [convolve(v, w) for v, w in pairs]))


def from_nfa_identity(s: Nfa) -> Rel:
    """Identity relation restricted to the language of ``s``."""
    sigma = s.alphabet
    trans = [(p, (sigma.symbols[x], sigma.symbols[x]), q) for p, x, q in s.transitions]
    return Rel.build(sigma, s.num_states, s.initial, trans, s.accepting)


def constant_map(lang: Nfa, target: Sequence) -> Rel:
    """Map every word of ``lang`` at least as long as ``target`` onto ``target``."""
    sigma = lang.alphabet
    t = tuple(target)
    m = len(t)
    states = {(lang.initial, 0): 0}
    order = [(lang.initial, 0)]
    trans = []
    i = 0
    while i < len(order):
        p, j = order[i]
        src = i
        i += 1
        for x, qs in lang.out(p).items():
            out = t[j] if j < m else PAD
            nj = min(j + 1, m)
            for q in qs:
                key = (q, nj)
                if key not in states:
                    states[key] = len(order)
                    order.append(key)
                trans.append((src, (sigma.symbols[x], out), states[key]))
    acc = [states[(p, j)] for (p, j) in order if j == m and p in lang.accepting]
    return Rel(sigma, fa.trim(Nfa.build(padded_alphabet(sigma), len(order), 0, trans, acc)))


def union_rel(*rels: Rel) -> Rel:
    base = rels[0].base
    for r in rels[1:]:
        base = fa.union(base, r.base)
    return Rel(rels[0].sigma, base, check=False)


def concat_rel(*rels: Rel) -> Rel:
    """Concatenation of length-preserving relations (componentwise)."""
    for r in rels:
        if not check_length_preserving(r):
            raise AutomatonError("concatenation is only defined here for length-preserving parts")
    base = rels[0].base
    for r in rels[1:]:
        base = fa.concat(base, r.base)
    return Rel(rels[0].sigma, base, check=False)


def inverse(r: Rel) -> Rel:
    letters = r.base.alphabet.symbols
    pal = r.base.alphabet
    trans = [(p, pal.id((letters[x][1], letters[x][0])), q) for p, x, q in r.base.transitions]
    return Rel(r.sigma, Nfa(pal, r.base.num_states, r.base.initial, trans, r.base.accepting),
               check=False)


def restrict(r: Rel, domain: Nfa | None = None, range_: Nfa | None = None) -> Rel:
    """Pairs of ``r`` whose left word lies in ``domain`` and right in ``range_``."""
    if domain is None and range_ is None:
        return r
    sigma = r.sigma
    k = len(sigma)
    one = fa.universal(sigma)
    dom = domain if domain is not None else one
    rng = range_ if range_ is not None else one
    idx = r.index()
    pal = r.base.alphabet

    def step(aut, p, x):
        return (p,) if x == k else aut.successors(p, x)

    start = (r.base.initial, dom.initial, rng.initial)
    states = {start: 0}
    order = [start]
    trans = []
    i = 0
    syms = sigma.symbols + (PAD,)
    while i < len(order):
        p, s1, s2 = order[i]
        src = i
        i += 1
        for a, lst in idx[p].items():
            n1 = step(dom, s1, a)
            if not n1:
                continue
            for b, q in lst:
                n2 = step(rng, s2, b)
                for t1 in n1:
                    for t2 in n2:
                        key = (q, t1, t2)
                        j = states.get(key)
                        if j is None:
                            j = len(order)
                            states[key] = j
                            order.append(key)
                        trans.append((src, pal.id((syms[a], syms[b])), j))
    acc = [j for j, (p, s1, s2) in enumerate(order)
           if p in r.base.accepting and s1 in dom.accepting and s2 in rng.accepting]
    return Rel(sigma, fa.trim(Nfa(pal, len(order), 0, trans, acc)), check=False)


def restrict_lengths(r: Rel, max_len: int) -> Rel:
    """Pairs whose convolution has length at most ``max_len``."""
    bound = fa.length_between(r.base.alphabet, 0, max_len)
    return Rel(r.sigma, fa.trim(fa.intersect(r.base, bound)), check=False)


# -- projections and images --------------------------------------------------

def project(r: Rel, side: str) -> Nfa:
    """Domain or range of ``r`` as an automaton over Σ."""
    if side not in (DOMAIN, RANGE):
        raise ValueError(f"side must be {DOMAIN!r} or {RANGE!r}")
    pos = 0 if side == DOMAIN else 1
    sigma = r.sigma
    letters = r.base.alphabet.symbols
    trans = []
    for p, x, q in r.base.transitions:
        s = letters[x][pos]
        trans.append((p, None if s == PAD else sigma.id(s), q))
    return fa.from_epsilon_nfa(sigma, r.base.num_states, r.base.initial, trans, r.base.accepting)


def image_of_set(r: Rel, s: Nfa) -> Nfa:
    return project(restrict(r, domain=s), RANGE)


def preimage_of_set(r: Rel, s: Nfa) -> Nfa:
    return project(restrict(r, range_=s), DOMAIN)


# -- property checks ----------------------------------------------------------

def _letter_witness(r: Rel, bad) -> Verdict:
    """Shortest accepted convolution that uses a letter satisfying ``bad``."""
    base = r.base
    letters = base.alphabet.symbols

    def succ(s):
        p, flag = s
        for x, qs in base.out(p).items():
            f = flag or bad(letters[x])
            for q in qs:
                yield x, (q, f)

    w = fa._bfs_witness((base.initial, False), succ,
                        lambda s: s[1] and s[0] in base.accepting)
    if w is None:
        return Verdict(True)
    return Verdict(False, split(base.alphabet.decode(w)))


def check_length_decreasing(r: Rel) -> Verdict:
    """|w| <= |v| for every pair; a witness pair otherwise."""
    return _letter_witness(r, lambda l: l[0] == PAD)


def check_length_preserving(r: Rel) -> Verdict:
    return _letter_witness(r, lambda l: l[0] == PAD or l[1] == PAD)


def _ineq_step(st, a, b):
    if st or a != b:
        return 1
    return 0


def _three_track(r1: Rel, r2: Rel, shared_left: bool) -> Verdict:
    """Look for x with two distinct partners.

    shared_left: (x, y1) ∈ r1, (x, y2) ∈ r2, y1 != y2 (functionality).
    Otherwise (y1, x) ∈ r1, (y2, x) ∈ r2, y1 != y2 (injectivity)."""
    k = len(r1.sigma)
    if not shared_left:
        r1, r2 = inverse(r1), inverse(r2)
    i1, i2 = r1.index(), r2.index()
    acc1, acc2 = r1.base.accepting, r2.base.accepting

    def succ(s):
        p1, p2, d, e1, e2 = s
        out = []
        keys = set(i1[p1]) | set(i2[p2]) | {k}
        for a in sorted(keys):
            l1 = i1[p1].get(a, ())
            l2 = i2[p2].get(a, ())
            if a == k:
                # x has ended; a partner that has also ended sits still
                l1 = ((k, p1),) if e1 else tuple(l1) + ((k, p1),)
                l2 = ((k, p2),) if e2 else tuple(l2) + ((k, p2),)
            for b1, q1 in l1:
                if e1 and b1 != k:
                    continue
                for b2, q2 in l2:
                    if e2 and b2 != k:
                        continue
                    if a == k and b1 == k and b2 == k:
                        continue
                    out.append(((a, b1, b2),
                                (q1, q2, _ineq_step(d, b1, b2), e1 or b1 == k, e2 or b2 == k)))
        out.sort(key=lambda t: t[0])
        return out

    w = fa._bfs_witness((r1.base.initial, r2.base.initial, 0, False, False), succ,
                        lambda s: s[2] == 1 and s[0] in acc1 and s[1] in acc2)
    if w is None:
        return Verdict(True)
    syms = r1.sigma.symbols + (PAD,)
    x = tuple(syms[t[0]] for t in w if t[0] != k)
    y1 = tuple(syms[t[1]] for t in w if t[1] != k)
    y2 = tuple(syms[t[2]] for t in w if t[2] != k)
    if shared_left:
        return Verdict(False, ((x, y1), (x, y2)))
    return Verdict(False, ((y1, x), (y2, x)))


def check_functional(r: Rel) -> Verdict:
    """Every word has at most one image; witness ((x, y1), (x, y2))."""
    return _three_track(r, r, True)


def check_injective(r: Rel) -> Verdict:
    """Every word has at most one preimage; witness ((y1, x), (y2, x))."""
    return _three_track(r, r, False)


def check_total_on(r: Rel, s: Nfa) -> Verdict:
    """S ⊆ R⁻¹(S); witness is a word of S with no image in S."""
    return fa.is_subset_of(s, preimage_of_set(r, s))


def check_surjective_on(r: Rel, s: Nfa) -> Verdict:
    """S ⊆ R(S); witness is a word of S with no preimage in S."""
    return fa.is_subset_of(s, image_of_set(r, s))


def pairs_up_to(r: Rel, max_len: int, budget: int = fa.DEFAULT_WORD_BUDGET) -> set[tuple]:
    """All pairs whose convolution is at most ``max_len`` long."""
    return {split(c) for c in _accepted_convolutions(r.base, max_len, budget)}


def _accepted_convolutions(base: Nfa, max_len: int, budget: int):
    # depth-first walk over subsets, pruned by co-reachability; cheaper than
    # enumerate_words when the relation is sparse in the pair alphabet
    co = fa.coreachable_states(base)
    out = []
    count = 0

    def walk(word, cur):
        nonlocal count
        count += 1
        if count > budget:
            raise fa.BudgetExceeded(f"pair enumeration exceeded {budget} nodes")
        if cur & base.accepting:
            out.append(base.alphabet.decode(word))
        if len(word) == max_len:
            return
        nxt: dict[int, set] = {}
        for p in cur:
            for x, qs in base.out(p).items():
                nxt.setdefault(x, set()).update(q for q in qs if q in co)
        for x in sorted(nxt):
            if nxt[x]:
                word.append(x)
                walk(word, frozenset(nxt[x]))
                word.pop()

    walk([], frozenset((base.initial,)) if base.initial in co else frozenset())
    return out
