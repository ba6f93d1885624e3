import itertools

import pytest

from symmpat import automata as fa
from symmpat import coffee, modelio, oracle, sat, synth
from symmpat import relations as rl
from symmpat import verifier as vf
from symmpat.verifier import Counterexample

HERMAN = modelio.builtin_model("herman")

# flipping every letter is the only non-identity one-state symmetry here
FLIP = modelio.parse_model("""
model flip
alphabet: a b
configs: (a | b)*
action toggle:
  regex: I* (a/b | b/a) I*
""")

# "a" at the front can become "b"; letter swaps don't commute with that
FRONT = modelio.parse_model("""
model front
alphabet: a b
configs: (a | b)*
action go:
  regex: (a/b) I*
""")


def brute_symmetric(sys, r, sizes=(1, 2, 3, 4)):
    return all(oracle.simulation_holds(sys, r, n) for n in sizes)


def test_config_validation():
    with pytest.raises(ValueError):
        synth.SynthConfig(mode="bogus")
    with pytest.raises(ValueError):
        synth.SynthConfig(n_min=3, n_max=2)
    with pytest.raises(ValueError):
        synth.SynthConfig(on_timeout="later")
    with pytest.raises(ValueError):
        synth.SynthConfig(mode="homomorphism", safety=coffee.safety_sets())


def test_planted_one_state_symmetry():
    res = synth.cegar_loop(FLIP, synth.SynthConfig(mode="complete", n_max=2, check_progress=True))
    assert res.status == "found" and res.n == 1
    r = res.pattern
    assert rl.rel_accepts(r, "aab", "bba")
    assert vf.verify_symmetry_pattern(FLIP, r, "complete").ok
    assert brute_symmetric(FLIP, r)


def test_identity_allowed_only_on_request():
    res = synth.cegar_loop(FRONT, synth.SynthConfig(mode="complete", n_max=1))
    assert res.status == "exhausted" and res.pattern is None
    assert [e.event for e in res.audit][-1] == "unsat"
    res = synth.cegar_loop(FRONT, synth.SynthConfig(mode="complete", n_max=1, non_identity=False))
    assert res.status == "found"
    assert rl.pairs_up_to(res.pattern, 3) == {(w, w) for w in map(tuple, _words("ab", 3))}


def _words(letters, m):
    for k in range(m + 1):
        yield from ("".join(p) for p in itertools.product(letters, repeat=k))


def test_herman_rotation_search():
    res = synth.cegar_loop(HERMAN, synth.SynthConfig(mode="process", n_max=5))
    assert res.status == "found"
    assert res.report.ok and res.report.verdict == "yes"
    assert brute_symmetric(HERMAN, res.pattern, sizes=(2, 3, 4, 5))
    # a process pattern moves every letter: the pattern is not the identity
    assert any(v != w for v, w in rl.pairs_up_to(res.pattern, 3))
    # and the Parikh image is kept
    for v, w in rl.pairs_up_to(res.pattern, 4):
        assert sorted(v) == sorted(w)


def test_hint_is_honoured():
    hint = (("T", "B", "B"), ("B", "T", "B"))
    cfg = synth.SynthConfig(mode="process", n_max=5, hints=[hint])
    res = synth.cegar_loop(HERMAN, cfg)
    assert res.status == "found" and rl.rel_accepts(res.pattern, *hint)


def test_impossible_hint_exhausts():
    cfg = synth.SynthConfig(mode="complete", n_max=2, hints=[(("a",), ("a", "a"))])
    assert synth.cegar_loop(FLIP, cfg).status == "exhausted"


def test_coffee_homomorphism_certifies_safety():
    sys = coffee.coffee_can_system()
    cfg = synth.SynthConfig(mode="homomorphism", n_max=6, image_finite=True, safety=coffee.safety_sets())
    res = synth.cegar_loop(sys, cfg)
    assert res.status == "found"
    assert res.report.verdict == "yes"
    init, bad = coffee.safety_sets()
    assert vf.check_safety_via_image(sys, res.pattern, init, bad).ok


def test_round_limit_and_budget():
    res = synth.cegar_loop(HERMAN, synth.SynthConfig(mode="process", n_min=5, n_max=5, max_rounds=1))
    assert res.status == "timeout" and res.audit[-1].detail["reason"] == "round limit"
    res = synth.cegar_loop(HERMAN, synth.SynthConfig(mode="process", time_budget=0))
    assert res.status == "timeout" and res.stats["rounds"] == 0


def test_dump_dir(tmp_path):
    synth.cegar_loop(FLIP, synth.SynthConfig(mode="complete", n_max=1, dump_dir=str(tmp_path)))
    files = sorted(p.name for p in tmp_path.iterdir())
    assert files and files[0] == "n1_r0.cnf"
    assert (tmp_path / files[0]).read_text().startswith("c flip complete n=1 round=0\np cnf ")


def test_audit_json():
    res = synth.cegar_loop(FLIP, synth.SynthConfig(mode="complete", n_max=1))
    js = res.to_json()
    assert js["status"] == "found" and js["states"] == 1 and js["verdict"] == "yes"
    assert js["audit"][-1]["event"] == "verified"
    assert set(js["stats"]) == {"seconds", "rounds"}


# -- clause semantics against a brute-force reading ------------------------------------

def _candidates(enc, limit):
    """Distinct models of the structural clauses (blocking on x/z)."""
    seen = []
    b = enc.b
    extra = []
    while len(seen) < limit:
        for cl in extra:
            b.add(cl)
        extra = []
        res = sat.solve(b)
        if not res.sat:
            break
        seen.append(res.model)
        extra.append([-l for l in enc.model_assumptions(res.model)])
    return seen


def _fresh(sys, n, mode="complete"):
    return synth.Encoding(sys, n, synth.SynthConfig(mode=mode, n_max=n))


@pytest.mark.parametrize("n", [1, 2])
def test_counterexample_clauses_mean_what_they_say(n):
    sys = HERMAN
    base = _fresh(sys, n)
    models = _candidates(base, 6)
    assert models
    words = [tuple(w) for w in _words("TB", 3) if w]
    for m in models:
        cand = base.decode(m)
        pairs = {(v, w) for v in words for w in words if len(v) == len(w) and rl.rel_accepts(cand, v, w)}
        for v in words[:8]:
            enc = _fresh(sys, n)
            enc.add_counterexample(Counterexample("missingDomain", v))
            got = sat.solve(enc.b, assumptions=enc.model_assumptions(m)).sat
            assert got == any(p[0] == v for p in pairs)
            enc = _fresh(sys, n)
            enc.add_counterexample(Counterexample("missingRange", v))
            got = sat.solve(enc.b, assumptions=enc.model_assumptions(m)).sat
            assert got == any(p[1] == v for p in pairs)
        for p1, p2 in itertools.islice(itertools.combinations(sorted(pairs), 2), 10):
            enc = _fresh(sys, n)
            enc.add_counterexample(Counterexample("contradictoryPairs", (p1, p2)))
            assert not sat.solve(enc.b, assumptions=enc.model_assumptions(m)).sat


def test_unknown_counterexample_kind():
    enc = _fresh(FLIP, 1)
    with pytest.raises(synth.SynthError):
        enc.add_counterexample(Counterexample("other", ()))


def test_candidate_gates_in_order():
    sigma = HERMAN.alphabet
    assert synth.check_candidate(HERMAN, rl.basic_rel("identity", sigma), "complete") is None
    gate, cex = synth.check_candidate(HERMAN, rl.basic_rel("inequality", sigma), "complete")
    assert gate == "functional" and cex.kind == "contradictoryPairs"
    gate, cex = synth.check_candidate(HERMAN, rl.from_pairs(sigma, [("T", "T")]), "complete")
    assert gate == "total" and cex.kind == "missingDomain"
