"""Graphviz text for automata, relations and pushdown automata.

Output is deterministic: nodes by state id, one edge per transition ordered
by (source, letter id, target).
"""
from __future__ import annotations

from .automata import Nfa
from .pushdown import Pda
from .relations import Rel


def _quote(s: str) -> str:
    s = str(s).replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
    return '"' + s + '"'


def _letter(sym) -> str:
    if isinstance(sym, tuple):
        if len(sym) == 2 and sym[1] == 1 and isinstance(sym[0], tuple):
            return _letter(sym[0]) + "'"  # marked stack symbol
        return "/".join(_letter(x) for x in sym)
    return str(sym)


def _graph(name: str, num_states: int, initial: int, accepting, edges, state_names=None) -> str:
    out = [f"digraph {_quote(name)} {{", "  rankdir=LR;", '  __start [shape=point, label=""];']
    for q in range(num_states):
        shape = "doublecircle" if q in accepting else "circle"
        label = state_names[q] if state_names else str(q)
        out.append(f"  q{q} [shape={shape}, label={_quote(label)}];")
    out.append(f"  __start -> q{initial};")
    for p, key, label, q in sorted(edges, key=lambda e: (e[0], e[1], e[3])):
        out.append(f"  q{p} -> q{q} [label={_quote(label)}];")
    out.append("}")
    return "\n".join(out) + "\n"


def nfa_to_dot(a: Nfa, name: str = "nfa") -> str:
    syms = a.alphabet.symbols
    edges = [(p, (x,), _letter(syms[x]), q) for p, x, q in a.transitions]
    return _graph(name, a.num_states, a.initial, a.accepting, edges)


def rel_to_dot(r: Rel, name: str = "relation") -> str:
    return nfa_to_dot(r.base, name)


def pda_to_dot(p: Pda, name: str = "pda") -> str:
    edges = []
    for t in p.transitions:
        push = " ".join(_letter(s) for s in t.push) or "ε"
        label = f"{_letter(t.letter)}, {_letter(t.top)} / {push}"
        edges.append((t.src, (_letter(t.letter), _letter(t.top), push), label, t.dst))
    return _graph(name, p.num_states, p.initial, p.accepting, edges, p.state_names)


def to_dot(obj, name: str | None = None) -> str:
    if isinstance(obj, Rel):
        return rel_to_dot(obj, name or "relation")
    if isinstance(obj, Nfa):
        return nfa_to_dot(obj, name or "nfa")
    if isinstance(obj, Pda):
        return pda_to_dot(obj, name or "pda")
    raise TypeError(f"cannot export {type(obj).__name__} to DOT")
