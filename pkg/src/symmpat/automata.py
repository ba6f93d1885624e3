"""Finite automata over an indexed alphabet.

Automata are immutable once built.  Letters are addressed by their integer
position in the alphabet; words handed in from the outside are sequences of
letter labels and get encoded on the way in.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Hashable, Iterable, Iterator, Sequence

PAD = "#"
DEFAULT_STATE_BUDGET = 1 << 20
DEFAULT_WORD_BUDGET = 1 << 22


class AutomatonError(ValueError):
    pass


class AlphabetMismatch(AutomatonError):
    pass


class UnknownSymbol(AutomatonError):
    pass


class BudgetExceeded(RuntimeError):
    """Raised when a construction or enumeration exceeds its resource budget.

    Deliberately not a subclass of AutomatonError: callers treat this as
    "gave up", not as a wrong answer or bad input.
    """


class Alphabet:
    __slots__ = ("symbols", "_index")

    def __init__(self, symbols: Iterable[Hashable]):
        symbols = tuple(symbols)
        index = {}
        for i, s in enumerate(symbols):
            if s == PAD or s == "" or s is None:
                raise AutomatonError(f"invalid letter {s!r}")
            if s in index:
                raise AutomatonError(f"duplicate letter {s!r}")
            index[s] = i
        self.symbols = symbols
        self._index = index

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)

    def __contains__(self, s):
        return s in self._index

    def __eq__(self, other):
        return isinstance(other, Alphabet) and self.symbols == other.symbols

    def __hash__(self):
        return hash(self.symbols)

    def __repr__(self):
        return f"Alphabet({list(self.symbols)!r})"

    def id(self, s) -> int:
        try:
            return self._index[s]
        except KeyError:
            raise UnknownSymbol(f"letter {s!r} not in alphabet") from None

    def encode(self, word: Iterable) -> tuple[int, ...]:
        return tuple(self.id(s) for s in word)

    def decode(self, ids: Iterable[int]) -> tuple:
        return tuple(self.symbols[i] for i in ids)


@dataclass(frozen=True)
class Verdict:
    """Outcome of a decision procedure.  ``ok`` is the property asked about;
    ``witness`` explains a negative answer (or, for emptiness, a member)."""

    ok: bool
    witness: object = None

    def __bool__(self):
        return self.ok


class Nfa:
    """Epsilon-free NFA with a single initial state."""

    __slots__ = ("alphabet", "num_states", "initial", "accepting", "_delta", "_deterministic")

    def __init__(self, alphabet: Alphabet, num_states: int, initial: int,
                 transitions: Iterable[tuple[int, int, int]], accepting: Iterable[int]):
        if num_states < 1:
            raise AutomatonError("an automaton needs at least one state")
        if not 0 <= initial < num_states:
            raise AutomatonError(f"initial state {initial} out of range")
        k = len(alphabet)
        delta: list[dict[int, set]] = [dict() for _ in range(num_states)]
        for p, a, q in transitions:
            if not (0 <= p < num_states and 0 <= q < num_states):
                raise AutomatonError(f"transition ({p}, {a}, {q}) uses unknown state")
            if not 0 <= a < k:
                raise AutomatonError(f"transition ({p}, {a}, {q}) uses unknown letter id")
            delta[p].setdefault(a, set()).add(q)
        acc = frozenset(accepting)
        for q in acc:
            if not 0 <= q < num_states:
                raise AutomatonError(f"accepting state {q} out of range")
        self._init(alphabet, num_states, initial,
                   tuple({a: tuple(sorted(qs)) for a, qs in sorted(d.items())} for d in delta), acc)

    def _init(self, alphabet, num_states, initial, delta, accepting):
        self.alphabet = alphabet
        self.num_states = num_states
        self.initial = initial
        self.accepting = accepting
        self._delta = delta
        self._deterministic = None

    @classmethod
    def _raw(cls, alphabet, num_states, initial, delta, accepting) -> "Nfa":
        # trusted constructor: delta is a list of {letter: sorted tuple}
        obj = cls.__new__(cls)
        obj._init(alphabet, num_states, initial, tuple(delta), frozenset(accepting))
        return obj

    @classmethod
    def build(cls, alphabet: Alphabet, num_states: int, initial: int,
              transitions: Iterable[tuple[int, Hashable, int]], accepting: Iterable[int]) -> "Nfa":
        """Like the constructor but transitions carry letter labels."""
        return cls(alphabet, num_states, initial,
                   ((p, alphabet.id(a), q) for p, a, q in transitions), accepting)

    # -- inspection -------------------------------------------------------
    def out(self, p: int) -> dict:
        return self._delta[p]

    def successors(self, p: int, a: int) -> tuple:
        return self._delta[p].get(a, ())

    @property
    def transitions(self) -> Iterator[tuple[int, int, int]]:
        for p, d in enumerate(self._delta):
            for a, qs in d.items():
                for q in qs:
                    yield p, a, q

    @property
    def num_transitions(self) -> int:
        return sum(len(qs) for d in self._delta for qs in d.values())

    @property
    def is_deterministic(self) -> bool:
        if self._deterministic is None:
            self._deterministic = all(len(qs) == 1 for d in self._delta for qs in d.values())
        return self._deterministic

    @property
    def is_complete(self) -> bool:
        k = len(self.alphabet)
        return all(len(d) == k for d in self._delta)

    def __repr__(self):
        return (f"Nfa(states={self.num_states}, transitions={self.num_transitions}, "
                f"accepting={len(self.accepting)}, letters={len(self.alphabet)})")


def _check_same(a: Nfa, b: Nfa):
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch("automata are over different alphabets")


# -- small constructors -----------------------------------------------------

def empty(alphabet: Alphabet) -> Nfa:
    return Nfa._raw(alphabet, 1, 0, [{}], ())


def epsilon(alphabet: Alphabet) -> Nfa:
    return Nfa._raw(alphabet, 1, 0, [{}], (0,))


def universal(alphabet: Alphabet) -> Nfa:
    return Nfa._raw(alphabet, 1, 0, [{a: (0,) for a in range(len(alphabet))}], (0,))


def letters(alphabet: Alphabet, syms: Iterable) -> Nfa:
    """Words of length one over the given letters."""
    ids = sorted({alphabet.id(s) for s in syms})
    return Nfa._raw(alphabet, 2, 0, [{a: (1,) for a in ids}, {}], (1,))


def from_words(alphabet: Alphabet, words: Iterable[Sequence]) -> Nfa:
    """Trie automaton accepting exactly the given finite set of words."""
    delta = [{}]
    acc = set()
    for w in words:
        p = 0
        for a in alphabet.encode(w):
            nxt = delta[p].get(a)
            if nxt is None:
                delta.append({})
                nxt = (len(delta) - 1,)
                delta[p][a] = nxt
            p = nxt[0]
        acc.add(p)
    return Nfa._raw(alphabet, len(delta), 0, delta, acc)


def length_between(alphabet: Alphabet, lo: int, hi: int | None) -> Nfa:
    """All words whose length lies in [lo, hi]; hi=None means unbounded."""
    k = len(alphabet)
    top = lo if hi is None else hi
    n = top + 1
    delta = []
    for i in range(n):
        if i < top:
            delta.append({a: (i + 1,) for a in range(k)})
        elif hi is None:
            delta.append({a: (i,) for a in range(k)})
        else:
            delta.append({})
    return Nfa._raw(alphabet, n, 0, delta, range(lo, n))


# -- regular operations (epsilon-free) ---------------------------------------

def _merge(d1: dict, d2: dict, shift: int = 0) -> dict:
    out = {a: set(qs) for a, qs in d1.items()}
    for a, qs in d2.items():
        out.setdefault(a, set()).update(q + shift for q in qs)
    return out


def _freeze(delta):
    return [{a: tuple(sorted(qs)) for a, qs in sorted(d.items())} for d in delta]


def union(a: Nfa, b: Nfa) -> Nfa:
    _check_same(a, b)
    na = a.num_states
    # state 0 is fresh; a lives at 1.., b after it
    delta = [_merge({x: {q + 1 for q in qs} for x, qs in a.out(a.initial).items()},
                    b.out(b.initial), na + 1)]
    delta += [{x: {q + 1 for q in qs} for x, qs in d.items()} for d in a._delta]
    delta += [{x: {q + na + 1 for q in qs} for x, qs in d.items()} for d in b._delta]
    acc = {q + 1 for q in a.accepting} | {q + na + 1 for q in b.accepting}
    if a.initial in a.accepting or b.initial in b.accepting:
        acc.add(0)
    return Nfa._raw(a.alphabet, 1 + na + b.num_states, 0, _freeze(delta), acc)


def concat(a: Nfa, b: Nfa) -> Nfa:
    _check_same(a, b)
    na = a.num_states
    binit = {x: {q + na for q in qs} for x, qs in b.out(b.initial).items()}
    delta = []
    for p, d in enumerate(a._delta):
        d = {x: set(qs) for x, qs in d.items()}
        if p in a.accepting:
            d = _merge(d, binit)
        delta.append(d)
    delta += [{x: {q + na for q in qs} for x, qs in d.items()} for d in b._delta]
    acc = {q + na for q in b.accepting}
    if b.initial in b.accepting:
        acc |= a.accepting
    return Nfa._raw(a.alphabet, na + b.num_states, a.initial, _freeze(delta), acc)


def star(a: Nfa) -> Nfa:
    na = a.num_states
    ainit = {x: {q + 1 for q in qs} for x, qs in a.out(a.initial).items()}
    delta = [dict(ainit)]
    for p, d in enumerate(a._delta):
        d = {x: {q + 1 for q in qs} for x, qs in d.items()}
        if p in a.accepting:
            d = _merge(d, ainit)
        delta.append(d)
    acc = {0} | {q + 1 for q in a.accepting}
    return Nfa._raw(a.alphabet, na + 1, 0, _freeze(delta), acc)


def plus(a: Nfa) -> Nfa:
    return concat(a, star(a))


def from_epsilon_nfa(alphabet: Alphabet, num_states: int, initial: int,
                     transitions: Iterable[tuple[int, int | None, int]],
                     accepting: Iterable[int]) -> Nfa:
    """Build an epsilon-free NFA from one whose ``None``-labelled moves are epsilon."""
    eps = [set() for _ in range(num_states)]
    delta = [dict() for _ in range(num_states)]
    for p, a, q in transitions:
        if a is None:
            eps[p].add(q)
        elif isinstance(a, int) and 0 <= a < len(alphabet):
            delta[p].setdefault(a, set()).add(q)
        else:
            raise UnknownSymbol(f"letter id {a!r} is not in the alphabet")
    closure = []
    for p in range(num_states):
        seen = {p}
        stack = [p]
        while stack:
            x = stack.pop()
            for y in eps[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        closure.append(seen)
    accepting = set(accepting)
    new_delta = []
    new_acc = set()
    for p in range(num_states):
        d: dict[int, set] = {}
        for x in closure[p]:
            for a, qs in delta[x].items():
                d.setdefault(a, set()).update(qs)
        new_delta.append(d)
        if closure[p] & accepting:
            new_acc.add(p)
    return trim(Nfa._raw(alphabet, num_states, initial, _freeze(new_delta), new_acc))


# -- graph helpers ------------------------------------------------------------

def reachable_states(a: Nfa) -> set[int]:
    seen = {a.initial}
    stack = [a.initial]
    while stack:
        p = stack.pop()
        for qs in a.out(p).values():
            for q in qs:
                if q not in seen:
                    seen.add(q)
                    stack.append(q)
    return seen


def coreachable_states(a: Nfa) -> set[int]:
    rev = [[] for _ in range(a.num_states)]
    for p, _, q in a.transitions:
        rev[q].append(p)
    seen = set(a.accepting)
    stack = list(seen)
    while stack:
        q = stack.pop()
        for p in rev[q]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


def useful_states(a: Nfa) -> set[int]:
    return reachable_states(a) & coreachable_states(a)


def trim(a: Nfa) -> Nfa:
    """Drop states that are unreachable or cannot reach acceptance.

    The initial state is always kept (as state 0 of the result)."""
    keep = useful_states(a)
    order = [a.initial] + sorted(keep - {a.initial})
    ren = {p: i for i, p in enumerate(order)}
    delta = []
    for p in order:
        d = {}
        if p in keep:
            for x, qs in a.out(p).items():
                t = tuple(sorted(ren[q] for q in qs if q in keep))
                if t:
                    d[x] = t
        delta.append(d)
    acc = {ren[q] for q in a.accepting if q in keep}
    return Nfa._raw(a.alphabet, len(order), 0, delta, acc)


# -- determinisation and friends ---------------------------------------------

def determinize(a: Nfa, budget: int = DEFAULT_STATE_BUDGET) -> Nfa:
    """Subset construction.  The result is complete (it may carry a sink)."""
    k = len(a.alphabet)
    start = (a.initial,)
    index = {start: 0}
    subsets = [start]
    delta = []
    i = 0
    while i < len(subsets):
        cur = subsets[i]
        i += 1
        row = {}
        for x in range(k):
            tgt = set()
            for p in cur:
                tgt.update(a.successors(p, x))
            key = tuple(sorted(tgt))
            j = index.get(key)
            if j is None:
                if len(subsets) >= budget:
                    raise BudgetExceeded(f"determinization exceeded {budget} states")
                j = len(subsets)
                index[key] = j
                subsets.append(key)
            row[x] = (j,)
        delta.append(row)
    acc = [i for i, s in enumerate(subsets) if any(p in a.accepting for p in s)]
    return Nfa._raw(a.alphabet, len(subsets), 0, delta, acc)


def complete(a: Nfa) -> Nfa:
    """Add a sink so every state has a move on every letter."""
    if a.is_complete:
        return a
    k = len(a.alphabet)
    sink = a.num_states
    delta = []
    for d in a._delta:
        row = dict(d)
        for x in range(k):
            row.setdefault(x, (sink,))
        delta.append(dict(sorted(row.items())))
    delta.append({x: (sink,) for x in range(k)})
    return Nfa._raw(a.alphabet, sink + 1, a.initial, delta, a.accepting)


def complement(a: Nfa, budget: int = DEFAULT_STATE_BUDGET) -> Nfa:
    d = a if a.is_deterministic else determinize(a, budget)
    d = complete(d)
    return Nfa._raw(d.alphabet, d.num_states, d.initial, d._delta,
                    set(range(d.num_states)) - d.accepting)


def minimize(a: Nfa, budget: int = DEFAULT_STATE_BUDGET) -> Nfa:
    """Minimal complete DFA (Moore partition refinement)."""
    d = complete(determinize(trim(a), budget) if not a.is_deterministic else a)
    reach = sorted(reachable_states(d))
    k = len(d.alphabet)
    block = {p: (1 if p in d.accepting else 0) for p in reach}
    nblocks = len(set(block.values()))
    while True:
        sig = {}
        new = {}
        for p in reach:
            key = (block[p],) + tuple(block[d.successors(p, x)[0]] for x in range(k))
            new[p] = sig.setdefault(key, len(sig))
        block = new
        if len(sig) == nblocks:
            break
        nblocks = len(sig)
    # renumber blocks in BFS order from the initial state for stable output
    order = {}
    queue = deque([d.initial])
    order[block[d.initial]] = 0
    rep = {block[d.initial]: d.initial}
    while queue:
        p = queue.popleft()
        for x in range(k):
            q = d.successors(p, x)[0]
            b = block[q]
            if b not in order:
                order[b] = len(order)
                rep[b] = q
                queue.append(q)
    n = len(order)
    delta = [None] * n
    acc = set()
    for b, i in order.items():
        p = rep[b]
        delta[i] = {x: (order[block[d.successors(p, x)[0]]],) for x in range(k)}
        if p in d.accepting:
            acc.add(i)
    return Nfa._raw(d.alphabet, n, 0, delta, acc)


def intersect(a: Nfa, b: Nfa) -> Nfa:
    _check_same(a, b)
    start = (a.initial, b.initial)
    index = {start: 0}
    pairs = [start]
    delta = []
    i = 0
    while i < len(pairs):
        p, q = pairs[i]
        i += 1
        row = {}
        bq = b.out(q)
        for x, ps in a.out(p).items():
            qs = bq.get(x)
            if not qs:
                continue
            tgt = []
            for p2 in ps:
                for q2 in qs:
                    key = (p2, q2)
                    j = index.get(key)
                    if j is None:
                        j = len(pairs)
                        index[key] = j
                        pairs.append(key)
                    tgt.append(j)
            row[x] = tuple(sorted(tgt))
        delta.append(row)
    acc = [i for i, (p, q) in enumerate(pairs) if p in a.accepting and q in b.accepting]
    return Nfa._raw(a.alphabet, len(pairs), 0, delta, acc)


# -- decision procedures ------------------------------------------------------

def _bfs_witness(start, succ, accept, budget=None):
    """Shortest accepted path in an implicitly given graph.

    ``succ(state)`` yields (letter, next) pairs sorted by letter; BFS with
    sorted expansion returns the length-lexicographically least word."""
    parent = {start: None}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        if accept(s):
            word = []
            while parent[s] is not None:
                s, x = parent[s]
                word.append(x)
            word.reverse()
            return word
        for x, t in succ(s):
            if t not in parent:
                if budget is not None and len(parent) >= budget:
                    raise BudgetExceeded(f"search exceeded {budget} states")
                parent[t] = (s, x)
                queue.append(t)
    return None


def is_empty(a: Nfa) -> Verdict:
    """Emptiness; a non-empty language comes with its shortest member."""

    def succ(p):
        for x, qs in a.out(p).items():
            for q in qs:
                yield x, q

    w = _bfs_witness(a.initial, succ, lambda p: p in a.accepting)
    if w is None:
        return Verdict(True)
    return Verdict(False, a.alphabet.decode(w))


def is_finite(a: Nfa) -> bool:
    t = trim(a)
    if not t.accepting:
        return True
    # a cycle among useful states means infinitely many words
    color = [0] * t.num_states
    for root in range(t.num_states):
        if color[root]:
            continue
        stack = [(root, iter([q for qs in t.out(root).values() for q in qs]))]
        color[root] = 1
        while stack:
            p, it = stack[-1]
            for q in it:
                if color[q] == 1:
                    return False
                if color[q] == 0:
                    color[q] = 1
                    stack.append((q, iter([r for rs in t.out(q).values() for r in rs])))
                    break
            else:
                color[p] = 2
                stack.pop()
    return True


def is_subset_of(a: Nfa, b: Nfa, budget: int = DEFAULT_STATE_BUDGET) -> Verdict:
    """L(a) ⊆ L(b), with a shortest word of L(a) \\ L(b) when it fails."""
    _check_same(a, b)
    bacc = b.accepting

    def succ(s):
        p, qs = s
        for x, ps in a.out(p).items():
            nq = set()
            for q in qs:
                nq.update(b.successors(q, x))
            nq = frozenset(nq)
            for p2 in ps:
                yield x, (p2, nq)

    start = (a.initial, frozenset((b.initial,)))
    w = _bfs_witness(start, succ, lambda s: s[0] in a.accepting and not (s[1] & bacc), budget)
    if w is None:
        return Verdict(True)
    return Verdict(False, a.alphabet.decode(w))


def equivalent(a: Nfa, b: Nfa) -> bool:
    return bool(is_subset_of(a, b)) and bool(is_subset_of(b, a))


def accepts(a: Nfa, word: Iterable) -> bool:
    cur = {a.initial}
    for x in a.alphabet.encode(word):
        nxt = set()
        for p in cur:
            nxt.update(a.successors(p, x))
        if not nxt:
            return False
        cur = nxt
    return bool(cur & a.accepting)


def enumerate_words(a: Nfa, max_len: int, budget: int = DEFAULT_WORD_BUDGET) -> list[tuple]:
    """All accepted words of length <= max_len in length-lexicographic order."""
    k = len(a.alphabet)
    total = sum(k ** i for i in range(max_len + 1))
    if total > budget:
        raise BudgetExceeded(f"enumeration of up to {total} words exceeds budget {budget}")
    co = coreachable_states(a)
    out = []
    layer = [((), frozenset((a.initial,)))]
    for length in range(max_len + 1):
        nxt = []
        for w, cur in layer:
            if cur & a.accepting:
                out.append(a.alphabet.decode(w))
            if length == max_len:
                continue
            for x in range(k):
                tgt = set()
                for p in cur:
                    tgt.update(a.successors(p, x))
                tgt &= co
                if tgt:
                    nxt.append((w + (x,), frozenset(tgt)))
        layer = nxt
    return out


def language_size(a: Nfa, length: int) -> int:
    """Number of accepted words of exactly the given length."""
    d = determinize(a)
    counts = {d.initial: 1}
    for _ in range(length):
        nxt: dict[int, int] = {}
        for p, c in counts.items():
            for qs in d.out(p).values():
                q = qs[0]
                nxt[q] = nxt.get(q, 0) + c
        counts = nxt
    return sum(c for p, c in counts.items() if p in d.accepting)
