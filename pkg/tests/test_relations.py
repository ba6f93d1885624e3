import pytest
from hypothesis import given
from hypothesis import strategies as st

from symmpat import automata as fa
from symmpat import relations as rl
from symmpat.automata import Alphabet

from brute import language, nfas, rel_pairs, rels, words_upto

AB = Alphabet(("a", "b"))
M = 4


def test_convolution_pads_the_shorter_word():
    assert rl.convolve("ab", "b") == (("a", "b"), ("b", rl.PAD))
    assert rl.split(rl.convolve("a", "bab")) == (("a",), ("b", "a", "b"))
    assert rl.convolve("", "") == ()


def test_padded_alphabet_layout():
    pal = rl.padded_alphabet(AB)
    assert len(pal) == 8
    assert pal.symbols[-1] == (rl.PAD, "b")
    assert (rl.PAD, rl.PAD) not in pal.symbols


def test_padding_must_be_a_suffix():
    pal = rl.padded_alphabet(AB)
    with pytest.raises(fa.AutomatonError):
        rl.Rel(AB, fa.Nfa.build(pal, 3, 0, [(0, ("a", rl.PAD), 1), (1, ("a", "a"), 2)], [2]))
    with pytest.raises(fa.AutomatonError):
        rl.Rel(AB, fa.Nfa.build(pal, 3, 0, [(0, ("a", rl.PAD), 1), (1, (rl.PAD, "a"), 2)], [2]))


def test_basic_relations():
    ident = rl.basic_rel("identity", AB)
    ineq = rl.basic_rel("inequality", AB)
    pairs = {(v, w) for v in words_upto("ab", 3) for w in words_upto("ab", 3)}
    assert rel_pairs(ident, 3) == {(v, w) for v, w in pairs if v == w}
    assert rel_pairs(ineq, 3) == {(v, w) for v, w in pairs if v != w}
    with pytest.raises(ValueError):
        rl.basic_rel("nope", AB)


def test_from_pairs_and_constant_map():
    r = rl.from_pairs(AB, [("ab", "b"), ("", "a")])
    assert rel_pairs(r, 3) == {(("a", "b"), ("b",)), ((), ("a",))}
    c = rl.constant_map(fa.length_between(AB, 2, 3), ("b",))
    assert rel_pairs(c, 3) == {(w, ("b",)) for w in words_upto("ab", 3) if len(w) >= 2}


@given(rels(AB))
def test_inverse_swaps_pairs(r):
    assert rel_pairs(rl.inverse(r), M) == {(w, v) for v, w in rel_pairs(r, M)}


@given(r=rels(AB), d=nfas(AB, 3), g=nfas(AB, 3))
def test_restrict_images_and_projection(r, d, g):
    pairs = rel_pairs(r, M)
    ld, lg = language(d, M), language(g, M)
    assert rel_pairs(rl.restrict(r, d, g), M) == {(v, w) for v, w in pairs if v in ld and w in lg}
    assert language(rl.project(r, "domain"), M) >= {v for v, _ in pairs}
    assert language(rl.image_of_set(r, d), M) >= {w for v, w in pairs if v in ld}
    assert language(rl.preimage_of_set(r, g), M) >= {v for v, w in pairs if w in lg}
    for v, w in rel_pairs(rl.restrict_lengths(r, 3), M):
        assert max(len(v), len(w)) <= 3


@given(r=rels(AB))
def test_length_checks(r):
    pairs = rel_pairs(r, M)
    dec = rl.check_length_decreasing(r)
    pres = rl.check_length_preserving(r)
    if not dec:
        v, w = dec.witness
        assert len(w) > len(v) and rl.rel_accepts(r, v, w)
    else:
        assert all(len(w) <= len(v) for v, w in pairs)
    if not pres:
        v, w = pres.witness
        assert len(w) != len(v) and rl.rel_accepts(r, v, w)
    else:
        assert all(len(w) == len(v) for v, w in pairs)


@given(r=rels(AB))
def test_functional_and_injective_witnesses_are_real(r):
    f = rl.check_functional(r)
    if not f:
        (x, y1), (x2, y2) = f.witness
        assert x == x2 and y1 != y2
        assert rl.rel_accepts(r, x, y1) and rl.rel_accepts(r, x, y2)
    i = rl.check_injective(r)
    if not i:
        (y1, x), (y2, x2) = i.witness
        assert x == x2 and y1 != y2
        assert rl.rel_accepts(r, y1, x) and rl.rel_accepts(r, y2, x)


def test_concat_rel_requires_length_preserving():
    ident = rl.basic_rel("identity", AB)
    both = rl.concat_rel(ident, rl.from_pairs(AB, [("a", "b")]))
    assert rl.rel_accepts(both, "aba", "abb")
    with pytest.raises(fa.AutomatonError):
        rl.concat_rel(ident, rl.from_pairs(AB, [("a", "")]))


def test_pairs_up_to_matches_acceptance():
    r = rl.union_rel(rl.basic_rel("identity", AB), rl.from_pairs(AB, [("ab", "a")]))
    assert rl.pairs_up_to(r, 2) == rel_pairs(r, 2)
