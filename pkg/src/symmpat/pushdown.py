"""Pushdown automata over letter pairs, used for reflection-style patterns.

Stacks grow to the right: a transition replaces the top symbol by a word of
length 0, 1 or 2 whose last symbol becomes the new top.  The bottom symbol
is never popped.
"""
from __future__ import annotations

import heapq
import itertools
import time
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Sequence

from . import automata as fa
from . import relations as rl
from .automata import PAD, Alphabet, Nfa, Verdict
from .relations import Rel

BOTTOM = "⊥"


@dataclass(frozen=True)
class PdaTransition:
    src: int
    top: Hashable
    letter: Hashable
    dst: int
    push: tuple


class Pda:
    def __init__(self, alphabet: Alphabet, num_states: int, initial: int,
                 transitions: Iterable[PdaTransition], accepting: Iterable[int],
                 bottom: Hashable = BOTTOM, height_unambiguous: bool = False,
                 state_names: Sequence[str] | None = None):
        self.alphabet = alphabet
        self.num_states = num_states
        self.initial = initial
        self.accepting = frozenset(accepting)
        self.bottom = bottom
        self.height_unambiguous = height_unambiguous
        self.state_names = list(state_names) if state_names else [f"q{i}" for i in range(num_states)]
        trans = []
        index: dict[tuple, list] = {}
        stack = {bottom}
        for t in transitions:
            if not (0 <= t.src < num_states and 0 <= t.dst < num_states):
                raise fa.AutomatonError(f"transition {t} uses unknown state")
            if len(t.push) > 2:
                raise fa.AutomatonError("push words have length at most 2")
            if t.top == bottom and (not t.push or t.push[0] != bottom):
                raise fa.AutomatonError("the bottom symbol cannot be removed")
            if bottom in t.push[1:] or (t.top != bottom and bottom in t.push):
                raise fa.AutomatonError("the bottom symbol can only sit at the bottom")
            x = alphabet.id(t.letter)
            trans.append(t)
            index.setdefault((t.src, t.top), []).append((x, t.dst, t.push))
            stack.add(t.top)
            stack.update(t.push)
        self.transitions = tuple(trans)
        self.stack_symbols = frozenset(stack)
        self._index = {k: tuple(v) for k, v in index.items()}

    def moves(self, state: int, top) -> tuple:
        return self._index.get((state, top), ())

    def __repr__(self):
        return (f"Pda(states={self.num_states}, transitions={len(self.transitions)}, "
                f"stack={len(self.stack_symbols)})")


# -- acceptance -----------------------------------------------------------------

def pda_accepts(p: Pda, word: Sequence) -> bool:
    """Accept by final state; the set of reachable configurations is tracked
    with stacks as shared linked tuples."""
    try:
        ids = p.alphabet.encode(word)
    except fa.UnknownSymbol:
        return False
    cur = {(p.initial, (p.bottom, None))}
    for x in ids:
        nxt = set()
        for q, st in cur:
            top, below = st
            for y, dst, push in p.moves(q, top):
                if y != x:
                    continue
                s = below
                for g in push:
                    s = (g, s)
                nxt.add((dst, s))
        if not nxt:
            return False
        cur = nxt
    return any(q in p.accepting for q, _ in cur)


def pda_accepts_pair(p: Pda, v: Sequence, w: Sequence) -> bool:
    return pda_accepts(p, rl.convolve(v, w))


def accepting_height_sequences(p: Pda, word: Sequence) -> set[tuple]:
    """Stack heights along every accepting run (for height-unambiguity tests)."""
    ids = p.alphabet.encode(word)
    out = set()

    def go(i, q, st, h, heights):
        if i == len(ids):
            if q in p.accepting:
                out.add(tuple(heights))
            return
        top, below = st
        for y, dst, push in p.moves(q, top):
            if y != ids[i]:
                continue
            s = below
            for g in push:
                s = (g, s)
            nh = h - 1 + len(push)
            heights.append(nh)
            go(i + 1, dst, s, nh, heights)
            heights.pop()

    go(0, p.initial, (p.bottom, None), 1, [1])
    return out


def _push(st, push):
    s = st[1]
    for g in push:
        s = (g, s)
    return s


def check_height_unambiguous(p: Pda, max_len: int) -> Verdict:
    """All accepting runs on a word share their height profile, for words up
    to ``max_len``; a witness word otherwise.

    Explores pairs of runs over the same word, remembering whether their
    heights have ever differed."""
    start = (p.initial, (p.bottom, None), 1)
    layer = {(start, start, False): ()}
    for n in range(max_len + 1):
        for (c1, c2, diff), word in layer.items():
            if diff and c1[0] in p.accepting and c2[0] in p.accepting:
                return Verdict(False, p.alphabet.decode(word))
        if n == max_len:
            break
        nxt = {}
        for (c1, c2, diff), word in layer.items():
            m2 = {}
            for y, dst, push in p.moves(c2[0], c2[1][0]):
                m2.setdefault(y, []).append((dst, _push(c2[1], push), c2[2] - 1 + len(push)))
            for y, dst, push in p.moves(c1[0], c1[1][0]):
                d1 = (dst, _push(c1[1], push), c1[2] - 1 + len(push))
                for d2 in m2.get(y, ()):
                    key = (d1, d2, diff or d1[2] != d2[2])
                    if key not in nxt:
                        nxt[key] = word + (y,)
        layer = nxt
    return Verdict(True)


# -- emptiness --------------------------------------------------------------------

def pda_is_empty(p: Pda) -> Verdict:
    """Emptiness with a shortest accepted word as witness.

    Tabulates "path edges" from the moment a stack cell is pushed to each
    (state, top) reachable at the same height, plus summaries of how a cell
    can be popped, in order of increasing word length."""
    root = (p.initial, p.bottom)
    best: dict[tuple, int] = {}
    back: dict[tuple, tuple] = {}
    done: set = set()
    sums: dict[tuple, dict] = {}       # entry -> exit state -> length
    sum_back: dict[tuple, tuple] = {}
    sum_done: set = set()
    callers: dict[tuple, list] = {}    # entry -> [(caller entry, below symbol, len, origin)]
    heap = []
    tick = itertools.count()

    def offer_pe(e, h, length, why):
        key = (e, h)
        if key not in best or length < best[key]:
            best[key] = length
            back[key] = why
            heapq.heappush(heap, (length, next(tick), 0, key))

    def offer_sum(e, q, length, why):
        d = sums.setdefault(e, {})
        if q not in d or length < d[q]:
            d[q] = length
            sum_back[(e, q)] = why
            heapq.heappush(heap, (length, next(tick), 1, (e, q)))

    offer_pe(root, root, 0, ("start",))
    while heap:
        length, _, kind, key = heapq.heappop(heap)
        if kind == 0:
            if key in done or best[key] != length:
                continue
            done.add(key)
            e, (q, top) = key
            for x, dst, push in p.moves(q, top):
                if not push:
                    offer_sum(e, dst, length + 1, ((q, top), x))
                elif len(push) == 1:
                    offer_pe(e, (dst, push[0]), length + 1, ("step", (q, top), x))
                else:
                    below, new_top = push
                    callee = (dst, new_top)
                    callers.setdefault(callee, []).append((e, below, length + 1, ((q, top), x)))
                    offer_pe(callee, callee, 0, ("start",))
                    for q2, s in sums.get(callee, {}).items():
                        if (callee, q2) in sum_done:
                            offer_pe(e, (q2, below), length + 1 + s,
                                     ("ret", (q, top), x, callee, q2))
        else:
            if key in sum_done or sums[key[0]][key[1]] != length:
                continue
            sum_done.add(key)
            callee, q2 = key
            for e, below, lc, (h, x) in callers.get(callee, []):
                if (e, h) in done:
                    offer_pe(e, (q2, below), lc + length, ("ret", h, x, callee, q2))

    # how long it takes to first enter each entry from the root
    reach = {root: 0}
    entry_back = {}
    eheap = [(0, next(tick), root)]
    by_caller: dict[tuple, list] = {}
    for callee, lst in callers.items():
        for e, below, lc, (h, x) in lst:
            by_caller.setdefault(e, []).append((callee, lc, h, x))
    while eheap:
        d, _, e = heapq.heappop(eheap)
        if d != reach.get(e):
            continue
        for callee, lc, h, x in by_caller.get(e, []):
            if (e, h) not in done:
                continue
            nd = d + lc
            if callee not in reach or nd < reach[callee]:
                reach[callee] = nd
                entry_back[callee] = (e, h, x)
                heapq.heappush(eheap, (nd, next(tick), callee))
    target = None
    for (e, h), length in best.items():
        if (e, h) in done and h[0] in p.accepting and e in reach:
            total = reach[e] + length
            if target is None or (total, length) < target[0]:
                target = ((total, length), e, h)
    if target is None:
        return Verdict(True)

    def pe_word(e, h):
        out = []
        stack = [("pe", e, h)]
        while stack:
            item = stack.pop()
            if item[0] == "lit":
                out.append(item[1])
                continue
            if item[0] == "sum":
                _, e2, q2 = item
                h2, x2 = sum_back[(e2, q2)]
                stack.append(("lit", x2))
                stack.append(("pe", e2, h2))
                continue
            _, e2, h2 = item
            why = back[(e2, h2)]
            if why[0] == "start":
                continue
            if why[0] == "step":
                stack.append(("lit", why[2]))
                stack.append(("pe", e2, why[1]))
            else:
                _, hprev, x, callee, q2 = why
                stack.append(("sum", callee, q2))
                stack.append(("lit", x))
                stack.append(("pe", e2, hprev))
        return out

    _, e, h = target
    word = pe_word(e, h)
    while e != root:
        pe, ph, x = entry_back[e]
        word = pe_word(pe, ph) + [x] + word
        e = pe
    return Verdict(False, p.alphabet.decode(word))


# -- constructions -----------------------------------------------------------------

def build_reflection_pda(sigma: Alphabet, short_words: bool = False) -> Pda:
    """Pairs (v, reverse(v)) for |v| >= 2.

    The first pair is pushed with a mark, later pairs are pushed until a
    guessed middle; after it every letter must be the swap of the pair popped.
    With ``short_words`` the pairs of length 0 and 1 (where reversal is the
    identity) are accepted too."""
    pal = rl.padded_alphabet(sigma)
    pairs = [(a, b) for a in sigma for b in sigma]
    marked = [(v, 1) for v in pairs]
    q0, q1, q2, qf = range(4)
    ts = []
    for v in pairs:
        ts.append(PdaTransition(q0, BOTTOM, v, q1, (BOTTOM, (v, 1))))
    for top in pairs + marked:
        for w in pairs:
            ts.append(PdaTransition(q1, top, w, q1, (top, w)))
        for a in sigma:
            ts.append(PdaTransition(q1, top, (a, a), q2, (top,)))
    for (a, b) in pairs:
        ts.append(PdaTransition(q1, (a, b), (b, a), q2, ()))
        ts.append(PdaTransition(q2, (a, b), (b, a), q2, ()))
        ts.append(PdaTransition(q2, ((a, b), 1), (b, a), qf, ()))
        ts.append(PdaTransition(q1, ((a, b), 1), (b, a), qf, ()))
    acc = [qf]
    if short_words:
        for a in sigma:
            ts.append(PdaTransition(q0, BOTTOM, (a, a), qf, (BOTTOM,)))
        acc.append(q0)
    return Pda(pal, 4, q0, ts, acc, height_unambiguous=True, state_names=["q0", "q1", "q2", "qF"])


def pair_product_pda(p: Pda) -> Pda:
    """Two copies of p sharing one stack of symbol pairs.

    A joint move pairs moves that push words of equal length, so the product
    accepts (x1 ⊗ x2) exactly when each copy accepts its track and the height
    profiles agree.  For height-unambiguous p this is the square of its
    language."""
    pal = Alphabet((x, y) for x in p.alphabet for y in p.alphabet)
    n = p.num_states
    ts = []
    bottom = (p.bottom, p.bottom)
    for t1 in p.transitions:
        for t2 in p.transitions:
            if len(t1.push) != len(t2.push):
                continue
            if (t1.top == p.bottom) != (t2.top == p.bottom):
                continue
            top = bottom if t1.top == p.bottom else (t1.top, t2.top)
            push = tuple(bottom if g1 == p.bottom else (g1, g2)
                         for g1, g2 in zip(t1.push, t2.push))
            if any((g1 == p.bottom) != (g2 == p.bottom) for g1, g2 in zip(t1.push, t2.push)):
                continue
            ts.append(PdaTransition(t1.src * n + t2.src, top, (t1.letter, t2.letter),
                                    t1.dst * n + t2.dst, push))
    acc = [a * n + b for a in p.accepting for b in p.accepting]
    return Pda(pal, n * n, p.initial * n + p.initial, ts, acc, bottom=bottom,
               height_unambiguous=p.height_unambiguous)


def product_with_nfa(p: Pda, a: Nfa) -> Pda:
    """Synchronous product; both read the same letters."""
    if p.alphabet != a.alphabet:
        raise fa.AlphabetMismatch("pushdown automaton and NFA use different alphabets")
    n = a.num_states
    by_src: dict[int, list] = {}
    for t in p.transitions:
        by_src.setdefault(t.src, []).append(t)
    start = (p.initial, a.initial)
    index = {start: 0}
    order = [start]
    ts = []
    i = 0
    while i < len(order):
        ps, qs = order[i]
        src = i
        i += 1
        for t in by_src.get(ps, ()):
            x = p.alphabet.id(t.letter)
            for q2 in a.successors(qs, x):
                key = (t.dst, q2)
                j = index.get(key)
                if j is None:
                    j = len(order)
                    index[key] = j
                    order.append(key)
                ts.append(PdaTransition(src, t.top, t.letter, j, t.push))
    acc = [j for j, (ps, qs) in enumerate(order) if ps in p.accepting and qs in a.accepting]
    return Pda(p.alphabet, len(order), 0, ts, acc, bottom=p.bottom,
               height_unambiguous=p.height_unambiguous)


def _pair_track_nfa(alphabet: Alphabet, left: Nfa, right: Nfa) -> Nfa:
    """Two-track product over pair letters (no padding)."""
    sigma = left.alphabet
    start = (left.initial, right.initial)
    index = {start: 0}
    order = [start]
    trans = []
    i = 0
    while i < len(order):
        p, q = order[i]
        src = i
        i += 1
        for x, (a, b) in enumerate(alphabet.symbols):
            if a == PAD or b == PAD:
                continue
            for p2 in left.successors(p, sigma.id(a)):
                for q2 in right.successors(q, sigma.id(b)):
                    key = (p2, q2)
                    j = index.get(key)
                    if j is None:
                        j = len(order)
                        index[key] = j
                        order.append(key)
                    trans.append((src, x, j))
    acc = [j for j, (p, q) in enumerate(order) if p in left.accepting and q in right.accepting]
    return Nfa(alphabet, len(order), 0, trans, acc)


def restrict_pda(p: Pda, s: Nfa) -> Pda:
    """Relation of p with both words restricted to S."""
    return product_with_nfa(p, _pair_track_nfa(p.alphabet, s, s))


def _four_track_nfa(pal4: Alphabet, t: Rel, co: Nfa) -> Nfa:
    """Letters ((a1, a2), (a3, a4)): t reads (a1, a3), co reads (a2, a4)."""
    tpal = t.base.alphabet
    start = (t.base.initial, co.initial)
    index = {start: 0}
    order = [start]
    trans = []
    i = 0
    tmoves = [dict() for _ in range(t.base.num_states)]
    for p, x, q in t.base.transitions:
        tmoves[p].setdefault(tpal.symbols[x], []).append(q)
    while i < len(order):
        pt, pc = order[i]
        src = i
        i += 1
        for x, ((a1, a2), (a3, a4)) in enumerate(pal4.symbols):
            if PAD in (a1, a2, a3, a4):
                continue
            tq = tmoves[pt].get((a1, a3))
            if not tq:
                continue
            cq = co.successors(pc, co.alphabet.id((a2, a4)))[0]
            for q in tq:
                key = (q, cq)
                j = index.get(key)
                if j is None:
                    j = len(order)
                    index[key] = j
                    order.append(key)
                trans.append((src, x, j))
    acc = [j for j, (pt, pc) in enumerate(order)
           if pt in t.base.accepting and pc in co.accepting]
    return Nfa(pal4, len(order), 0, trans, acc)


def pda_image_words(p: Pda, v: Sequence) -> set[tuple]:
    """All w with (v, w) accepted, for a length-preserving relation PDA."""
    cur = {(p.initial, (p.bottom, None), ())}
    letters = p.alphabet.symbols
    for a in v:
        nxt = set()
        for q, st, out in cur:
            for y, dst, push in p.moves(q, st[0]):
                la, lb = letters[y]
                if la == a and lb != PAD:
                    nxt.add((dst, _push(st, push), out + (lb,)))
        cur = nxt
    return {out for q, _, out in cur if q in p.accepting}


def check_functional_bounded(p: Pda, sigma: Alphabet, max_len: int) -> Verdict:
    for n in range(max_len + 1):
        for v in itertools.product(sigma.symbols, repeat=n):
            img = sorted(pda_image_words(p, v))
            if len(img) > 1:
                return Verdict(False, ((v, img[0]), (v, img[1])))
    return Verdict(True)


@dataclass
class HuCheck:
    hu_bound: int = 6
    functional_bound: int = 5


def verify_functional_hucf(sys, p: Pda, bounds: HuCheck | None = None):
    """Simulation check for a functional, height-unambiguous pushdown pattern."""
    from .verifier import Counterexample, VerifyReport

    bounds = bounds or HuCheck()
    t0 = time.perf_counter()
    stats: dict = {"pda_states": p.num_states, "pda_transitions": len(p.transitions)}

    def done(rep):
        rep.stats["seconds"] = round(time.perf_counter() - t0, 4)
        return rep

    if any(PAD in t.letter for t in p.transitions):
        return done(VerifyReport("no", "length-preserving", None, stats))
    if not p.height_unambiguous:
        return done(VerifyReport("no", "height-unambiguous", None, stats))
    hu = check_height_unambiguous(p, bounds.hu_bound)
    if not hu:
        return done(VerifyReport("no", "height-unambiguous",
                                 Counterexample("ambiguousHeights", (hu.witness,)), stats))
    fn = check_functional_bounded(p, sys.alphabet, bounds.functional_bound)
    if not fn:
        return done(VerifyReport("no", "functional",
                                 Counterexample("contradictoryPairs", fn.witness), stats))
    rp = restrict_pda(p, sys.configs_dfa)
    pair = pair_product_pda(rp)
    stats["pair_states"] = pair.num_states
    per = {}
    for label in sys.labels:
        t1 = time.perf_counter()
        t = sys.action_on_configs(label)
        co = sys.action_complement(label)
        reg = _four_track_nfa(pair.alphabet, t, co)
        prod = product_with_nfa(pair, reg)
        res = pda_is_empty(prod)
        per[label] = {"regular_states": reg.num_states, "product_states": prod.num_states,
                      "seconds": round(time.perf_counter() - t1, 4)}
        if not res:
            w = res.witness
            v1 = tuple(x[0][0] for x in w)
            v2 = tuple(x[0][1] for x in w)
            w1 = tuple(x[1][0] for x in w)
            w2 = tuple(x[1][1] for x in w)
            stats["actions"] = per
            cex = Counterexample("contradictoryPairs", ((v1, v2), (w1, w2), (v2, w2)), label)
            return done(VerifyReport("no", "symmetry", cex, stats))
    stats["actions"] = per
    return done(VerifyReport("yes", None, None, stats))


def check_dihedral_invariance(sys):
    """Rotation (complete mode) and reflection both preserve the system."""
    from .patterns import rotation_from
    from .verifier import VerifyReport, verify_symmetry_pattern

    t0 = time.perf_counter()
    rot = verify_symmetry_pattern(sys, rotation_from(sys.alphabet, 1), "complete")
    if not rot.ok:
        rot.gate = f"rotation/{rot.gate}"
        return rot
    ref = verify_functional_hucf(sys, build_reflection_pda(sys.alphabet))
    if not ref.ok:
        ref.gate = f"reflection/{ref.gate}"
        return ref
    return VerifyReport("yes", None, None, {"rotation": rot.stats, "reflection": ref.stats,
                                            "seconds": round(time.perf_counter() - t0, 4)})
