import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from symmpat import modelio, oracle
from symmpat import relations as rl
from symmpat import verifier as vf


@pytest.mark.parametrize("name", modelio.BUILTIN_NAMES)
def test_verifier_agrees_with_brute_force(name):
    rows = oracle.compare(modelio.builtin_model(name), sizes=(1, 2, 3, 4))
    assert len(rows) == 80
    bad = [r for r in rows if not r.agree]
    assert not bad, bad[:3]
    # the battery is not trivially one-sided
    assert any(r.brute for r in rows) and not all(r.brute for r in rows)


def test_battery_is_stable():
    sigma = modelio.builtin_model("herman").alphabet
    names = [n for n, _ in oracle.battery(sigma)]
    assert names == [n for n, _ in oracle.battery(sigma)]
    assert len(names) == 20 and names[0] == "identity"


def test_sized_system_keeps_one_length():
    sys = oracle.sized_system(modelio.builtin_model("israeli-jalfon"), 3)
    from symmpat import automata as fa
    words = fa.enumerate_words(sys.configs, 5)
    assert words and {len(w) for w in words} == {3}


IJ = modelio.builtin_model("israeli-jalfon")
BATTERY = oracle.battery(IJ.alphabet, seed=11)


@settings(max_examples=30)
@given(st.sampled_from(BATTERY), st.integers(1, 4))
def test_random_candidates(named, n):
    _, r = named
    got = vf.verify_symmetry_pattern(oracle.sized_system(IJ, n), r, "simulation").ok
    assert got == oracle.brute_verdict(IJ, r, n)
