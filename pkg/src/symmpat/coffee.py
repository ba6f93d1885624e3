"""The coffee-can game as a system over two unary counters.

A configuration 1x^x ⊥x^* 1y^y ⊥y^* stores x white and y black beans; the
capacity of each buffer is the number of letters given to it.  Actions are
glued together from counter fragments acting on one buffer each.
"""
from __future__ import annotations

from . import automata as fa
from . import relations as rl
from .automata import Alphabet
from .modelio import parse_regex
from .relations import Rel
from .verifier import ParamSystem

SIGMA = Alphabet(("1x", "Bx", "1y", "By"))
CONFIGS = "1x* Bx* 1y* By*"


def dec(i: int, j: int, one: str, zero: str, sigma: Alphabet = SIGMA) -> Rel:
    """Counter guard value >= j, then subtract i."""
    if j < i:
        raise ValueError("cannot decrement below the guard")
    trans = []
    chain = j - i
    for c in range(chain):
        trans.append((c, (one, one), c + 1))
    top = chain
    trans.append((top, (one, one), top))
    cur = top
    for _ in range(i):
        trans.append((cur, (one, zero), cur + 1))
        cur += 1
    zstate = cur + 1
    trans.append((cur, (zero, zero), zstate))
    trans.append((zstate, (zero, zero), zstate))
    return Rel.build(sigma, zstate + 1, 0, trans, [cur, zstate])


def inc(i: int, j: int, one: str, zero: str, sigma: Alphabet = SIGMA) -> Rel:
    """Counter guard value >= j, then add i; a full buffer stays as it is."""
    trans = []
    for c in range(j):
        trans.append((c, (one, one), c + 1))
    top = j
    trans.append((top, (one, one), top))
    acc = [top]
    n = top + 1
    if i == 0:
        trans.append((top, (zero, zero), n))
        trans.append((n, (zero, zero), n))
        return Rel.build(sigma, n + 1, 0, trans, acc + [n])
    cur = top
    for _ in range(i):
        trans.append((cur, (zero, one), n))
        cur = n
        n += 1
    zstate = n
    n += 1
    trans.append((cur, (zero, zero), zstate))
    trans.append((zstate, (zero, zero), zstate))
    acc += [cur, zstate]
    # saturation: fewer than i free cells, nothing changes
    prev = top
    for _ in range(i - 1):
        trans.append((prev, (zero, zero), n))
        acc.append(n)
        prev = n
        n += 1
    return Rel.build(sigma, n, 0, trans, acc)


def then(*parts: Rel) -> Rel:
    base = parts[0].base
    for p in parts[1:]:
        base = fa.concat(base, p.base)
    return Rel(parts[0].sigma, fa.trim(base), check=False)


def configs() -> fa.Nfa:
    return parse_regex(CONFIGS, SIGMA)


def one_zero() -> fa.Nfa:
    """Encodings of x = 1, y = 0."""
    return parse_regex("1x Bx* By*", SIGMA)


def odd_y() -> fa.Nfa:
    return parse_regex("1x* Bx* 1y (1y 1y)* By*", SIGMA)


def coffee_can_system() -> ParamSystem:
    x = ("1x", "Bx")
    y = ("1y", "By")
    s = configs()
    stay = rl.from_nfa_identity(fa.intersect(s, fa.complement(one_zero())))
    step = rl.union_rel(
        # two white beans: put one white back
        then(dec(1, 2, *x), dec(0, 0, *y)),
        # two black beans: add a white, drop both blacks
        then(inc(1, 0, *x), dec(2, 2, *y)),
        # one of each: put the black back
        then(dec(1, 1, *x), dec(0, 1, *y)),
        stay,
    )
    actions = {"step": step}
    return ParamSystem("coffee-can", SIGMA, s, actions)


def coffee_can_pattern() -> Rel:
    """Hand-written functional pattern with finite image.

    Words of length >= 3 collapse to a fixed representative of their class:
    y odd to (0,1), (1,0) to itself, anything else to (2,0); shorter words
    are kept."""
    s = configs()
    long_ = fa.length_between(SIGMA, 3, None)
    short = fa.length_between(SIGMA, 0, 2)
    odd = fa.intersect(odd_y(), long_)
    ten = fa.intersect(one_zero(), long_)
    rest = fa.intersect(fa.intersect(s, long_),
                        fa.complement(fa.union(odd_y(), one_zero())))
    return rl.union_rel(
        rl.constant_map(odd, ("Bx", "Bx", "1y")),
        rl.constant_map(ten, ("1x", "Bx", "By")),
        rl.constant_map(rest, ("1x", "1x", "By")),
        rl.from_nfa_identity(fa.intersect(s, short)),
    )


def safety_sets():
    """Initial configurations (y odd) and bad ones (exactly one white bean left)."""
    return fa.intersect(configs(), odd_y()), one_zero()
