from itertools import product

import pytest

from symmpat import automata as fa
from symmpat import coffee, modelio, oracle
from symmpat import relations as rl
from symmpat.modelio import ParseError

# (configurations, transitions) at sizes 2, 3, 4, counted by the ring
# semantics below
FROZEN = {
    "herman": [(4, 4), (8, 12), (16, 32)],
    "israeli-jalfon": [(4, 4), (8, 21), (16, 56)],
    "israeli-jalfon-6": [(4, 4), (8, 18), (16, 48)],
    "coffee-can": [(10, 11), (20, 28), (35, 57)],
    "resource-allocator": [(6, 4), (18, 24), (54, 108)],
    "dining-philosophers": [(16, 24), (64, 144), (256, 768)],
}


# -- hand-written semantics ---------------------------------------------------

def _set(w, **at):
    w = list(w)
    for i, s in at.items():
        w[int(i[1:])] = s
    return tuple(w)


def _move(w, i, j):
    w = list(w)
    w[i], w[j] = "B", "T"
    return tuple(w)


def herman(w):
    n = len(w)
    return {_move(w, i, (i - 1) % n) for i in range(n) if w[i] == "T"}


def israeli_jalfon(w):
    n = len(w)
    return {_move(w, i, (i + d) % n) for i in range(n) if w[i] == "T" for d in (-1, 1)}


def israeli_jalfon_6(w):
    n = len(w)
    out = set()
    for i in range(n):
        if w[i] != "T":
            continue
        out.add(_move(w, i, (i - 1) % n))
        if w[(i + 1) % n] == "B":
            out.add(_move(w, i, (i + 1) % n))
    return out


def dining(w):
    n = len(w)
    out = set()
    for i, s in enumerate(w):
        left, right = w[(i - 1) % n], w[(i + 1) % n]
        nxt = {"t": "l" if left != "e" else None, "l": "e" if right == "t" else None,
               "e": "r", "r": "t"}[s]
        if nxt:
            u = list(w)
            u[i] = nxt
            out.add(tuple(u))
    return out


def allocator(w):
    out = set()
    clients = range(1, len(w))
    for j in clients:
        if w[j] == "i":
            out.add(_replace(w, {j: "r"}))
        if w[0] == "i" and w[j] == "r":
            out.add(_replace(w, {0: "c", j: "c"}))
        if w[0] == "c" and w[j] == "c":
            out.add(_replace(w, {0: "i", j: "i"}))
    return out


def _replace(w, at):
    return tuple(at.get(i, s) for i, s in enumerate(w))


def _coffee_fields(w):
    """(x, capacity x, y, capacity y) or None if w is no configuration."""
    order = ["1x", "Bx", "1y", "By"]
    if [order.index(s) for s in w] != sorted(order.index(s) for s in w):
        return None
    c = {s: w.count(s) for s in order}
    return c["1x"], c["1x"] + c["Bx"], c["1y"], c["1y"] + c["By"]


def _coffee_word(x, cx, y, cy):
    return ("1x",) * x + ("Bx",) * (cx - x) + ("1y",) * y + ("By",) * (cy - y)


def coffee_step(w):
    x, cx, y, cy = _coffee_fields(w)
    out = set()
    if x >= 2:
        out.add(_coffee_word(x - 1, cx, y, cy))
    if y >= 2:
        out.add(_coffee_word(min(x + 1, cx), cx, y - 2, cy))
    if x >= 1 and y >= 1:
        out.add(_coffee_word(x - 1, cx, y, cy))
    if (x, y) != (1, 0):
        out.add(w)
    return out


SEMANTICS = {
    "herman": (herman, lambda w: True),
    "israeli-jalfon": (israeli_jalfon, lambda w: True),
    "israeli-jalfon-6": (israeli_jalfon_6, lambda w: True),
    "dining-philosophers": (dining, lambda w: True),
    "resource-allocator": (allocator, lambda w: w[0] in "ic"),
    "coffee-can": (coffee_step, lambda w: _coffee_fields(w) is not None),
}


@pytest.mark.parametrize("name", modelio.BUILTIN_NAMES)
def test_builtin_matches_hand_semantics(name):
    sys = modelio.builtin_model(name)
    step, is_config = SEMANTICS[name]
    counts = []
    for n in (2, 3, 4):
        inst = oracle.instance(sys, n)
        words = [w for w in product(sys.alphabet.symbols, repeat=n) if is_config(w)]
        assert sorted(inst.words) == sorted(words)
        got = {}
        for d in inst.succ.values():
            for v, ws in d.items():
                got.setdefault(v, set()).update(ws)
        assert got == {w: step(w) for w in words}
        counts.append((len(words), sum(len(step(w)) for w in words)))
    assert counts == FROZEN[name]


def test_sample_moves():
    ij = modelio.builtin_model("israeli-jalfon")
    assert rl.rel_accepts(ij.actions["step"], "TBB", "BTB")
    assert not rl.rel_accepts(ij.actions["step"], "TBB", "BBB")
    sys = coffee.coffee_can_system()
    # x = 1, y = 2: idle, two blacks, or one of each
    assert set(sys.successors(("1x", "1y", "1y"))) == {
        ("1x", "1y", "1y"), ("1x", "By", "By"), ("Bx", "1y", "1y")}
    # x = 1, y = 0 is stuck
    assert sys.successors(("1x", "Bx", "By")) == []


def test_counter_fragments():
    x = ("1x", "Bx")
    d = coffee.dec(1, 2, *x)
    assert rl.rel_accepts(d, ("1x", "1x", "Bx"), ("1x", "Bx", "Bx"))
    assert not rl.rel_accepts(d, ("1x", "Bx", "Bx"), ("Bx", "Bx", "Bx"))
    i = coffee.inc(2, 0, *x)
    assert rl.rel_accepts(i, ("1x", "Bx", "Bx"), ("1x", "1x", "1x"))
    # one free cell: saturates instead of failing
    assert rl.rel_accepts(i, ("1x", "1x", "Bx"), ("1x", "1x", "Bx"))
    with pytest.raises(ValueError):
        coffee.dec(2, 1, *x)


@pytest.mark.parametrize("name", modelio.BUILTIN_NAMES)
def test_round_trip(name):
    sys = modelio.builtin_model(name)
    again = modelio.parse_model(modelio.format_model(sys))
    assert again.name == sys.name and again.alphabet == sys.alphabet
    assert fa.equivalent(again.configs, sys.configs)
    for a in sys.labels:
        assert fa.equivalent(again.actions[a].base, sys.actions[a].base)


def test_pattern_round_trip():
    r = coffee.coffee_can_pattern()
    again = modelio.parse_pattern(modelio.format_pattern(r, "cc"))
    assert fa.equivalent(again.base, r.base)


@pytest.mark.parametrize("text,line,col", [
    ("model m\nalphabet: a b\nconfigs: (a | c)*\n", 3, 15),
    ("model m\nalphabet: a b\nconfigs: (a | b\n", 3, 0),
    ("model m\nalphabet: a b\n", 2, 1),
    ("model m\nalphabet: a b\nconfigs: a*\naction x:\n  regex: (a/b/a)\n", 5, 11),
    ("model m\nalphabet: a b\nconfigs: a*\naction x:\n  regex: a/#\n", 4, 1),
    ("model m\nalphabet: a b\nconfigs: a*\nfoo\n", 4, 1),
    ("model m\nalphabet: a b\nconfigs: a*\naction x:\n  regex: I\naction x:\n  regex: I\n", 6, 1),
])
def test_parse_errors_have_positions(text, line, col):
    with pytest.raises(ParseError) as e:
        modelio.parse_model(text)
    assert e.value.line == line
    if col:
        assert e.value.col == col


def test_explicit_blocks_and_aliases():
    text = """
model toggles   # comment
alphabet: ⊤ ⊥
configs:
  states: 1
  init: 0
  accept: 0
  trans:
    0 -T-> 0
    0 -B-> 0
action flip:
  states: p
  init: p
  accept: p
  trans:
    p -T/B-> p
"""
    sys = modelio.parse_model(text)
    assert sys.alphabet.symbols == ("T", "B")
    assert rl.rel_accepts(sys.actions["flip"], "TT", "BB")
    with pytest.raises(ParseError):
        modelio.parse_model(text.replace("p -T/B-> p", "p -T/B-> z"))


def test_hints_and_words():
    sigma = fa.Alphabet(("1x", "Bx", "1y"))
    assert modelio.parse_words("1x1yBx", sigma) == ("1x", "1y", "Bx")
    assert modelio.parse_words("1x Bx", sigma) == ("1x", "Bx")
    assert modelio.parse_words("", sigma) == ()
    with pytest.raises(ParseError):
        modelio.parse_words("zz", sigma)
    assert modelio.parse_hints("1x -> Bx\n# c\n -> \n", sigma) == [(("1x",), ("Bx",)), ((), ())]
    with pytest.raises(ParseError):
        modelio.parse_hints("1x Bx\n", sigma)
    assert modelio.builtin_hints("herman") is None
    assert modelio.builtin_hints("resource-allocator")


def test_load_model(tmp_path):
    p = tmp_path / "m.sym"
    p.write_text(modelio.format_model(modelio.builtin_model("herman")))
    assert modelio.load_model(str(p)).name == "herman"
    with pytest.raises(KeyError):
        modelio.builtin_model("nope")
    with pytest.raises(FileNotFoundError):
        modelio.load_model(str(tmp_path / "missing.sym"))
