import re

from symmpat import automata as fa
from symmpat import dot, modelio, pushdown
from symmpat import relations as rl

SIGMA = fa.Alphabet(("a", "b"))


def edges(text):
    return re.findall(r'q(\d+) -> q(\d+) \[label="([^"]*)"\]', text)


def test_nfa_shape():
    a = fa.Nfa.build(SIGMA, 2, 0, [(0, "a", 1), (0, "b", 0), (1, "a", 1)], [1])
    text = dot.to_dot(a)
    assert text.startswith('digraph "nfa" {')
    assert "q1 [shape=doublecircle" in text and "q0 [shape=circle" in text
    assert "__start -> q0;" in text
    # one edge per transition, sorted by source then letter
    assert edges(text) == [("0", "0", "b"), ("0", "1", "a"), ("1", "1", "a")] or \
        edges(text) == [("0", "1", "a"), ("0", "0", "b"), ("1", "1", "a")]
    assert len(edges(text)) == a.num_transitions


def test_deterministic_output():
    r = modelio.builtin_model("herman").actions["step"]
    assert dot.to_dot(r) == dot.to_dot(r)
    assert len(edges(dot.rel_to_dot(r))) == r.base.num_transitions
    assert "T/B" in dot.rel_to_dot(r)


def test_quoting():
    a = fa.Nfa.build(fa.Alphabet(('x"y', "new\nline")), 1, 0, [(0, 'x"y', 0), (0, "new\nline", 0)], [0])
    text = dot.to_dot(a, name='we"ird')
    assert 'digraph "we\\"ird"' in text
    assert 'label="x\\"y"' in text and 'label="new\\nline"' in text
    assert "\nline" not in text.replace("\\nline", "")


def test_pda_labels():
    p = pushdown.build_reflection_pda(SIGMA)
    text = dot.to_dot(p)
    assert text.startswith('digraph "pda"')
    assert len(edges(text)) == len(p.transitions)
    assert " / " in text


def test_unsupported():
    import pytest

    with pytest.raises(TypeError):
        dot.to_dot(42)
