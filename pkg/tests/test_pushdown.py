from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symmpat import automata as fa
from symmpat import modelio, pushdown
from symmpat.automata import Alphabet
from symmpat.pushdown import BOTTOM, Pda, PdaTransition

from brute import nfas, words_upto

AB = Alphabet(("a", "b"))
TB = Alphabet(("T", "B"))


@st.composite
def pdas(draw, max_states=3, max_trans=9):
    n = draw(st.integers(1, max_states))
    ts = []
    for _ in range(draw(st.integers(0, max_trans))):
        src, dst = draw(st.integers(0, n - 1)), draw(st.integers(0, n - 1))
        letter = draw(st.sampled_from("ab"))
        top = draw(st.sampled_from((BOTTOM, "X", "Y")))
        if top == BOTTOM:
            push = (BOTTOM,) + tuple(draw(st.lists(st.sampled_from("XY"), max_size=1)))
        else:
            push = tuple(draw(st.lists(st.sampled_from("XY"), max_size=2)))
        ts.append(PdaTransition(src, top, letter, dst, push))
    acc = draw(st.sets(st.integers(0, n - 1), min_size=1))
    return Pda(AB, n, 0, ts, acc)


def test_bottom_symbol_rules():
    with pytest.raises(fa.AutomatonError):
        Pda(AB, 1, 0, [PdaTransition(0, BOTTOM, "a", 0, ())], [0])
    with pytest.raises(fa.AutomatonError):
        Pda(AB, 1, 0, [PdaTransition(0, "X", "a", 0, (BOTTOM,))], [0])
    with pytest.raises(fa.AutomatonError):
        Pda(AB, 1, 0, [PdaTransition(0, "X", "a", 0, ("X", "X", "X"))], [0])


def test_balanced_words():
    # a pushes, b pops, accept on an empty stack
    p = Pda(AB, 2, 0, [PdaTransition(0, BOTTOM, "a", 0, (BOTTOM, "X")),
                       PdaTransition(0, "X", "a", 0, ("X", "X")),
                       PdaTransition(0, "X", "b", 1, ()),
                       PdaTransition(1, "X", "b", 1, ())], [])
    q = Pda(AB, 3, 0, list(p.transitions) + [PdaTransition(1, BOTTOM, "a", 2, (BOTTOM,))], [2])
    # a^n b^n a
    assert pushdown.pda_accepts(q, "aabba") and not pushdown.pda_accepts(q, "aaba")
    v = pushdown.pda_is_empty(q)
    assert not v and v.witness == ("a", "b", "a")
    assert pushdown.pda_is_empty(p)


@settings(max_examples=80)
@given(pdas())
def test_emptiness_against_bounded_search(p):
    accepted = [w for w in words_upto("ab", 7) if pushdown.pda_accepts(p, w)]
    v = pushdown.pda_is_empty(p)
    if v:
        assert not accepted
    else:
        assert pushdown.pda_accepts(p, v.witness)
        if accepted:
            assert len(v.witness) <= len(accepted[0])


@settings(max_examples=50)
@given(pdas(), nfas(AB, 3))
def test_product_with_nfa(p, a):
    prod = pushdown.product_with_nfa(p, a)
    for w in words_upto("ab", 5):
        assert pushdown.pda_accepts(prod, w) == (pushdown.pda_accepts(p, w) and fa.accepts(a, w))


def test_reflection_pda_accepts_reversals():
    p = pushdown.build_reflection_pda(TB)
    for v in words_upto("TB", 6):
        for w in product("TB", repeat=len(v)):
            want = len(v) >= 2 and w == tuple(reversed(v))
            assert pushdown.pda_accepts_pair(p, v, w) == want
    short = pushdown.build_reflection_pda(TB, short_words=True)
    assert pushdown.pda_accepts_pair(short, "", "") and pushdown.pda_accepts_pair(short, "T", "T")
    assert not pushdown.pda_accepts_pair(short, "T", "B")


def test_reflection_pda_is_height_unambiguous():
    p = pushdown.build_reflection_pda(TB)
    assert pushdown.check_height_unambiguous(p, 6)
    for v in ("TB", "TBB", "TTBB", "BTBTB"):
        w = tuple(reversed(v))
        heights = pushdown.accepting_height_sequences(p, tuple(zip(v, w)))
        assert len(heights) == 1


def test_height_ambiguity_is_found():
    # two runs on "aa": push then pop, or stay flat
    p = Pda(AB, 2, 0, [PdaTransition(0, BOTTOM, "a", 1, (BOTTOM, "X")),
                       PdaTransition(1, "X", "a", 0, ()),
                       PdaTransition(0, BOTTOM, "a", 0, (BOTTOM,))], [0])
    v = pushdown.check_height_unambiguous(p, 4)
    assert not v and v.witness == ("a", "a")


def test_emptiness_witness_of_reflection_is_short():
    v = pushdown.pda_is_empty(pushdown.build_reflection_pda(TB))
    assert not v and len(v.witness) == 2


def test_dihedral_invariance():
    assert pushdown.check_dihedral_invariance(modelio.builtin_model("israeli-jalfon")).ok
    rep = pushdown.check_dihedral_invariance(modelio.builtin_model("herman"))
    assert not rep.ok and rep.gate == "reflection/symmetry"
    (v1, v2), (w1, w2), _ = rep.counterexample.words
    assert v2 == tuple(reversed(v1)) and w2 == tuple(reversed(w1))


def test_reflection_needs_length_preserving_letters():
    pal = modelio.builtin_model("herman")
    bad = Pda(pushdown.build_reflection_pda(TB).alphabet, 1, 0,
              [PdaTransition(0, BOTTOM, ("T", "#"), 0, (BOTTOM,))], [0], height_unambiguous=True)
    rep = pushdown.verify_functional_hucf(pal, bad)
    assert rep.gate == "length-preserving"
