"""Parameterised permutation patterns: rotations and transpositions.

Positions are 1-based.  ``rot@i`` keeps the first i-1 letters and rotates the
rest right by one (a_i..a_n becomes a_n a_i..a_{n-1}); ``swap@i`` exchanges
positions i and i+1.  Words too short for the permutation are left alone.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

from .automata import Alphabet
from .relations import Rel


@dataclass(frozen=True)
class PermPatternSpec:
    kind: str  # "rotation" | "transposition"
    start: int

    @property
    def name(self) -> str:
        return f"{'rot' if self.kind == 'rotation' else 'swap'}@{self.start}"

    def build(self, sigma: Alphabet) -> Rel:
        if self.kind == "rotation":
            return rotation_from(sigma, self.start)
        return transposition_at(sigma, self.start)

    def apply(self, word: Sequence) -> tuple:
        w = tuple(word)
        i = self.start - 1
        if self.kind == "rotation":
            if len(w) - i < 2:
                return w
            return w[:i] + (w[-1],) + w[i:-1]
        if len(w) < i + 2:
            return w
        return w[:i] + (w[i + 1], w[i]) + w[i + 2:]


_SPEC_RE = re.compile(r"^(rot|swap)@(\d+)$")


def parse_pattern_name(name: str) -> PermPatternSpec:
    m = _SPEC_RE.match(name.strip())
    if not m or int(m.group(2)) < 1:
        raise ValueError(f"bad pattern name {name!r}; expected rot@i or swap@i with i >= 1")
    return PermPatternSpec("rotation" if m.group(1) == "rot" else "transposition", int(m.group(2)))


def rotation_from(sigma: Alphabet, i: int) -> Rel:
    if i < 1:
        raise ValueError("rotation start must be >= 1")
    k = len(sigma)
    syms = sigma.symbols
    q0 = i - 1
    trans = []
    for j in range(q0):
        for a in syms:
            trans.append((j, (a, a), j + 1))

    # gadget state for (letter carried from input, letter guessed as last)
    def g(a, b):
        return q0 + 1 + a * k + b

    for a in range(k):
        for b in range(k):
            trans.append((q0, (syms[a], syms[b]), g(a, b)))
            for a2 in range(k):
                trans.append((g(a, b), (syms[a2], syms[a]), g(a2, b)))
    acc = list(range(q0 + 1)) + [g(a, a) for a in range(k)]
    return Rel.build(sigma, q0 + 1 + k * k, 0, trans, acc)


def transposition_at(sigma: Alphabet, i: int) -> Rel:
    if i < 1:
        raise ValueError("transposition position must be >= 1")
    k = len(sigma)
    syms = sigma.symbols
    q0 = i - 1
    fin = q0 + 1 + k * k
    trans = []
    for j in range(q0):
        for a in syms:
            trans.append((j, (a, a), j + 1))

    def g(a, b):
        return q0 + 1 + a * k + b

    for a in range(k):
        for b in range(k):
            trans.append((q0, (syms[a], syms[b]), g(a, b)))
            trans.append((g(a, b), (syms[b], syms[a]), fin))
        trans.append((fin, (syms[a], syms[a]), fin))
    acc = list(range(q0 + 1)) + [g(a, a) for a in range(k)] + [fin]
    return Rel.build(sigma, fin + 1, 0, trans, acc)


def full_symmetry_generators(sigma: Alphabet, fixed_prefix: int = 0) -> list[Rel]:
    """Generators of the full symmetric group on positions after the prefix."""
    return [transposition_at(sigma, fixed_prefix + 1), rotation_from(sigma, fixed_prefix + 1)]


def library_specs(max_prefix: int) -> list[PermPatternSpec]:
    out = []
    for i in range(1, max_prefix + 2):
        out.append(PermPatternSpec("rotation", i))
        out.append(PermPatternSpec("transposition", i))
    return out


def library_check(sys, max_prefix: int):
    """Run the complete-mode check for every library pattern up to the prefix."""
    from .verifier import verify_symmetry_pattern

    rows = []
    for spec in library_specs(max_prefix):
        rep = verify_symmetry_pattern(sys, spec.build(sys.alphabet), "complete")
        rows.append((spec, rep.verdict == "yes", rep))
    return rows
