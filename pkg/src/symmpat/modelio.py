"""Reading and writing systems and patterns in a small text format.

    model NAME
    alphabet: a b c
    configs: REGEX
    action NAME:
      regex: BIREGEX
      regex: BIREGEX      (several lines: their union)
    action OTHER:
      states: p q
      init: p
      accept: q
      trans:
        p -a/b-> q

Regexes use juxtaposition, ``|``, ``*``, ``+``, ``?`` and parentheses.
Letters in a biregex are written ``a/b``; ``I`` stands for any ``a/a`` and
``#`` is the padding letter.  ``⊤``/``⊥`` may be written ``T``/``B``.
A ``#`` that is not part of a letter starts a comment.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources

from . import automata as fa
from . import relations as rl
from .automata import PAD, Alphabet, Nfa
from .relations import Rel
from .verifier import ParamSystem


class ParseError(ValueError):
    def __init__(self, msg: str, line: int = 0, col: int = 0):
        super().__init__(f"line {line}, col {col}: {msg}" if line else msg)
        self.line = line
        self.col = col


ALIASES = {"⊤": "T", "⊥": "B"}


def _normalise(text: str) -> str:
    for k, v in ALIASES.items():
        text = text.replace(k, v)
    return text


def _strip_comment(line: str) -> str:
    for i, ch in enumerate(line):
        if ch == "#":
            before = line[i - 1] if i else " "
            after = line[i + 1] if i + 1 < len(line) else " "
            if before != "/" and after != "/":
                return line[:i]
    return line


# -- regexes ------------------------------------------------------------------

_OPS = set("|*+?()")


def _tokens(text: str, line: int, col0: int):
    out = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in _OPS:
            out.append((ch, col0 + i))
            i += 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in _OPS:
                j += 1
            out.append((text[i:j], col0 + i))
            i = j
    return out


class _RegexParser:
    def __init__(self, text, line, col0, letter):
        self.toks = _tokens(text, line, col0)
        self.pos = 0
        self.line = line
        self.col0 = col0
        self.letter = letter  # token -> Nfa

    def error(self, msg):
        col = self.toks[self.pos][1] if self.pos < len(self.toks) else self.col0 + 1
        raise ParseError(msg, self.line, col)

    def peek(self):
        return self.toks[self.pos][0] if self.pos < len(self.toks) else None

    def parse(self, alphabet):
        self.alphabet = alphabet
        if not self.toks:
            self.error("empty regular expression")
        a = self.alt()
        if self.pos != len(self.toks):
            self.error(f"unexpected {self.peek()!r}")
        return a

    def alt(self):
        a = self.seq()
        while self.peek() == "|":
            self.pos += 1
            a = fa.union(a, self.seq())
        return a

    def seq(self):
        parts = []
        while self.peek() is not None and self.peek() not in ("|", ")"):
            parts.append(self.post())
        if not parts:
            return fa.epsilon(self.alphabet)
        a = parts[0]
        for b in parts[1:]:
            a = fa.concat(a, b)
        return a

    def post(self):
        a = self.atom()
        while self.peek() in ("*", "+", "?"):
            op = self.peek()
            self.pos += 1
            if op == "*":
                a = fa.star(a)
            elif op == "+":
                a = fa.plus(a)
            else:
                a = fa.union(a, fa.epsilon(self.alphabet))
        return a

    def atom(self):
        tok = self.peek()
        if tok is None:
            self.error("unexpected end of expression")
        if tok == "(":
            self.pos += 1
            a = self.alt()
            if self.peek() != ")":
                self.error("missing ')'")
            self.pos += 1
            return a
        if tok in _OPS:
            self.error(f"unexpected {tok!r}")
        try:
            a = self.letter(tok)
        except (ValueError, KeyError) as e:
            self.error(str(e))
        self.pos += 1
        return a


def parse_regex(text: str, sigma: Alphabet, line: int = 0, col0: int = 1) -> Nfa:
    text = _normalise(text)

    def letter(tok):
        if tok not in sigma:
            raise ValueError(f"unknown letter {tok!r}")
        return fa.letters(sigma, [tok])

    return _RegexParser(text, line, col0, letter).parse(sigma)


def parse_biregex(text: str, sigma: Alphabet, line: int = 0, col0: int = 1) -> Rel:
    text = _normalise(text)
    pal = rl.padded_alphabet(sigma)

    def letter(tok):
        if tok == "I":
            return fa.letters(pal, [(a, a) for a in sigma])
        if tok.count("/") != 1:
            raise ValueError(f"expected a letter pair a/b, got {tok!r}")
        a, b = tok.split("/")
        for s in (a, b):
            if s != PAD and s not in sigma:
                raise ValueError(f"unknown letter {s!r}")
        if a == PAD and b == PAD:
            raise ValueError("#/# is not a letter")
        return fa.letters(pal, [(a, b)])

    base = _RegexParser(text, line, col0, letter).parse(pal)
    try:
        return Rel(sigma, fa.trim(base))
    except fa.AutomatonError as e:
        raise ParseError(str(e), line, col0) from None


# -- documents ----------------------------------------------------------------

_TRANS_RE = re.compile(r"^(\S+)\s+-(\S+)->\s+(\S+)$")


@dataclass
class _Line:
    no: int
    indent: int
    text: str


def _lines(text: str) -> list[_Line]:
    out = []
    for no, raw in enumerate(_normalise(text).splitlines(), 1):
        body = _strip_comment(raw).rstrip()
        if body.strip():
            out.append(_Line(no, len(body) - len(body.lstrip()), body.strip()))
    return out


def _key(ln: _Line):
    if ":" not in ln.text:
        return None, None
    k, v = ln.text.split(":", 1)
    return k.strip(), v


def _parse_block(lines, i, sigma: Alphabet, pair: bool, owner: str):
    """Either ``regex: ...`` or an explicit states/init/accept/trans block."""
    if i >= len(lines):
        raise ParseError(f"{owner}: missing definition", lines[-1].no if lines else 0, 1)
    k, v = _key(lines[i])
    if k == "regex":
        # several regex lines in one block are read as their union
        parts = []
        while i < len(lines) and _key(lines[i])[0] == "regex":
            ln = lines[i]
            v = _key(ln)[1]
            col = ln.indent + ln.text.index(":") + 2
            parts.append(parse_biregex(v, sigma, ln.no, col) if pair
                         else parse_regex(v, sigma, ln.no, col))
            i += 1
        if pair:
            return (parts[0] if len(parts) == 1 else rl.union_rel(*parts)), i
        a = parts[0]
        for b in parts[1:]:
            a = fa.union(a, b)
        return a, i
    names: list[str] | None = None
    init = None
    accept: list[str] = []
    trans = []
    pal = rl.padded_alphabet(sigma) if pair else sigma
    while i < len(lines):
        ln = lines[i]
        k, v = _key(ln)
        if k == "states":
            names = v.split()
            if len(names) == 1 and names[0].isdigit():
                names = [str(j) for j in range(int(names[0]))]
        elif k == "init":
            init = v.strip()
        elif k == "accept":
            accept = v.split()
        elif k == "trans":
            i += 1
            while i < len(lines) and _TRANS_RE.match(lines[i].text):
                m = _TRANS_RE.match(lines[i].text)
                trans.append((m.group(1), m.group(2), m.group(3), lines[i]))
                i += 1
            continue
        else:
            break
        i += 1
    if names is None or init is None:
        ln = lines[i - 1] if i else lines[0]
        raise ParseError(f"{owner}: expected 'regex:' or a states/init/accept/trans block",
                         ln.no, ln.indent + 1)
    ids = {n: j for j, n in enumerate(names)}

    def sid(n, ln):
        if n not in ids:
            raise ParseError(f"unknown state {n!r}", ln.no, ln.indent + 1)
        return ids[n]

    first = lines[i - 1]
    edges = []
    for p, lab, q, ln in trans:
        if pair:
            if lab.count("/") != 1:
                raise ParseError(f"expected a letter pair, got {lab!r}", ln.no, ln.indent + 1)
            a, b = lab.split("/")
            letter = (a, b)
        else:
            letter = lab
        if letter not in pal:
            raise ParseError(f"unknown letter {lab!r}", ln.no, ln.indent + 1)
        edges.append((sid(p, ln), pal.id(letter), sid(q, ln)))
    nfa = Nfa(pal, len(names), sid(init, first), edges, [sid(n, first) for n in accept])
    if pair:
        try:
            return Rel(sigma, nfa), i
        except fa.AutomatonError as e:
            raise ParseError(f"{owner}: {e}", first.no, 1) from None
    return nfa, i


def _header(lines, word):
    if not lines or not lines[0].text.startswith(word + " "):
        ln = lines[0] if lines else _Line(1, 0, "")
        raise ParseError(f"expected '{word} NAME'", ln.no, ln.indent + 1)
    return lines[0].text.split(None, 1)[1].strip()


def _alphabet(lines, i):
    if i >= len(lines) or _key(lines[i])[0] != "alphabet":
        ln = lines[min(i, len(lines) - 1)]
        raise ParseError("expected 'alphabet: ...'", ln.no, ln.indent + 1)
    syms = _key(lines[i])[1].split()
    try:
        return Alphabet(syms)
    except fa.AutomatonError as e:
        raise ParseError(str(e), lines[i].no, 1) from None


def parse_model(text: str) -> ParamSystem:
    lines = _lines(text)
    name = _header(lines, "model")
    sigma = _alphabet(lines, 1)
    i = 2
    if i >= len(lines) or _key(lines[i])[0] != "configs":
        ln = lines[min(i, len(lines) - 1)]
        raise ParseError("expected 'configs:'", ln.no, ln.indent + 1)
    k, v = _key(lines[i])
    if v.strip():
        ln = lines[i]
        configs = parse_regex(v, sigma, ln.no, ln.indent + ln.text.index(":") + 2)
        i += 1
    else:
        configs, i = _parse_block(lines, i + 1, sigma, False, "configs")
    actions = {}
    while i < len(lines):
        ln = lines[i]
        m = re.match(r"^action\s+(\S+?)\s*:$", ln.text)
        if not m:
            raise ParseError(f"expected 'action NAME:', got {ln.text!r}", ln.no, ln.indent + 1)
        label = m.group(1)
        if label in actions:
            raise ParseError(f"duplicate action {label!r}", ln.no, ln.indent + 1)
        actions[label], i = _parse_block(lines, i + 1, sigma, True, f"action {label}")
        lp = rl.check_length_preserving(actions[label])
        if not lp:
            raise ParseError(f"action {label!r} is not length-preserving, e.g. {lp.witness}",
                             ln.no, ln.indent + 1)
    try:
        return ParamSystem(name, sigma, configs, actions)
    except fa.AutomatonError as e:
        raise ParseError(str(e)) from None


def parse_pattern(text: str, sigma: Alphabet | None = None) -> Rel:
    """``pattern NAME`` / optional ``alphabet:`` / ``relation:`` block."""
    lines = _lines(text)
    _header(lines, "pattern")
    i = 1
    if i < len(lines) and _key(lines[i])[0] == "alphabet":
        declared = _alphabet(lines, i)
        if sigma is not None and declared != sigma:
            raise ParseError("pattern alphabet differs from the model's", lines[i].no, 1)
        sigma = declared
        i += 1
    if sigma is None:
        raise ParseError("pattern needs an alphabet", lines[0].no, 1)
    if i >= len(lines) or _key(lines[i])[0] != "relation":
        ln = lines[min(i, len(lines) - 1)]
        raise ParseError("expected 'relation:'", ln.no, ln.indent + 1)
    k, v = _key(lines[i])
    if v.strip():
        ln = lines[i]
        return parse_biregex(v, sigma, ln.no, ln.indent + ln.text.index(":") + 2)
    r, i = _parse_block(lines, i + 1, sigma, True, "relation")
    if i != len(lines):
        raise ParseError("trailing input", lines[i].no, 1)
    return r


def parse_hints(text: str, sigma: Alphabet) -> list[tuple[tuple, tuple]]:
    out = []
    for ln in _lines(text):
        if "->" not in ln.text:
            raise ParseError("expected 'v -> w'", ln.no, ln.indent + 1)
        left, right = ln.text.split("->", 1)
        v, w = tuple(left.split()), tuple(right.split())
        for s in v + w:
            if s not in sigma:
                raise ParseError(f"unknown letter {s!r}", ln.no, ln.indent + 1)
        out.append((v, w))
    return out


def parse_words(text: str, sigma: Alphabet) -> tuple:
    text = _normalise(text).strip()
    if not text:
        return ()
    syms = text.split() if " " in text else _split_word(text, sigma)
    for s in syms:
        if s not in sigma:
            raise ParseError(f"unknown letter {s!r}")
    return tuple(syms)


def _split_word(text: str, sigma: Alphabet):
    # greedy longest-match so "1x1y" splits into 1x 1y
    out = []
    i = 0
    labels = sorted((s for s in sigma.symbols if isinstance(s, str)), key=len, reverse=True)
    while i < len(text):
        for s in labels:
            if text.startswith(s, i):
                out.append(s)
                i += len(s)
                break
        else:
            raise ParseError(f"cannot split {text!r} into letters")
    return out


# -- printing -----------------------------------------------------------------

def _fmt_nfa_block(a: Nfa, pair: bool, indent: str) -> list[str]:
    letters = a.alphabet.symbols
    out = [f"{indent}states: " + " ".join(f"q{i}" for i in range(a.num_states)),
           f"{indent}init: q{a.initial}",
           f"{indent}accept: " + " ".join(f"q{i}" for i in sorted(a.accepting)),
           f"{indent}trans:"]
    for p, x, q in sorted(a.transitions):
        lab = "/".join(letters[x]) if pair else letters[x]
        out.append(f"{indent}  q{p} -{lab}-> q{q}")
    return out


def format_model(sys: ParamSystem) -> str:
    out = [f"model {sys.name}", "alphabet: " + " ".join(sys.alphabet.symbols), "configs:"]
    out += _fmt_nfa_block(sys.configs, False, "  ")
    for label in sys.labels:
        out.append(f"action {label}:")
        out += _fmt_nfa_block(sys.actions[label].base, True, "  ")
    return "\n".join(out) + "\n"


def format_pattern(r: Rel, name: str = "pattern") -> str:
    out = [f"pattern {name}", "alphabet: " + " ".join(r.sigma.symbols), "relation:"]
    out += _fmt_nfa_block(r.base, True, "  ")
    return "\n".join(out) + "\n"


# -- built-in systems ---------------------------------------------------------

def _resource(name: str) -> str:
    return resources.files("symmpat").joinpath("models").joinpath(name).read_text(encoding="utf-8")


FILE_MODELS = ("herman", "israeli-jalfon", "israeli-jalfon-6", "resource-allocator",
               "dining-philosophers")
BUILTIN_NAMES = ("herman", "israeli-jalfon", "israeli-jalfon-6", "coffee-can",
                 "resource-allocator", "dining-philosophers")


def builtin_model(name: str) -> ParamSystem:
    if name == "coffee-can":
        from .coffee import coffee_can_system

        return coffee_can_system()
    if name not in FILE_MODELS:
        raise KeyError(f"unknown built-in model {name!r}; known: {', '.join(BUILTIN_NAMES)}")
    return parse_model(_resource(f"{name}.sym"))


def builtin_hints(name: str) -> list[tuple[tuple, tuple]] | None:
    fn = resources.files("symmpat").joinpath("models").joinpath(f"{name}.hints")
    if not fn.is_file():
        return None
    return parse_hints(fn.read_text(encoding="utf-8"), builtin_model(name).alphabet)


def load_model(ref: str) -> ParamSystem:
    """A built-in name or a path to a model file."""
    if ref in BUILTIN_NAMES:
        return builtin_model(ref)
    with open(ref, encoding="utf-8") as fh:
        return parse_model(fh.read())
