"""Line-oriented text format for weighted automata and their queries.

::

    wa qplus a
    state x out 0
    state y out 1
    trans x a 1 y
    trans y a 1 x
    trans y a 1 y
    incl x <= y

Vectors are written ``2/3*x + 1*y`` (a bare name means coefficient one, ``0``
is the zero vector); for the boolean semiring ``{x, y}`` is also accepted.
``equiv <set> == <set>`` asks for NFA language equivalence.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .lattice import Carrier
from .semirings import get_semiring
from .weighted import Vec, WAut


class ParseError(ValueError):
    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(f"line {line}: {message}" if line else message)
        self.line = line


@dataclass(frozen=True)
class WaQuery:
    kind: str  # "incl" | "equiv"
    left: Vec
    right: Vec
    line: int
    text: str


@dataclass(frozen=True)
class WaFile:
    aut: WAut
    queries: tuple


_TERM = re.compile(r"^\s*(?:([^*\s]+)\s*\*\s*)?([A-Za-z_][\w']*)\s*$")


def parse_vec(text: str, aut_states: dict, semiring, line: int = 0) -> Vec:
    text = text.strip()
    if text in ("0", "{}", ""):
        return Vec(())
    if text.startswith("{"):
        if not text.endswith("}"):
            raise ParseError(f"unterminated set {text!r}", line)
        names = [n.strip() for n in text[1:-1].split(",") if n.strip()]
        weights = {}
        for n in names:
            weights[_state(n, aut_states, line)] = semiring.one
        return Vec.of(weights, semiring)
    weights: dict = {}
    for term in text.split("+"):
        m = _TERM.match(term)
        if not m:
            raise ParseError(f"cannot read vector term {term.strip()!r}", line)
        coef_text, name = m.groups()
        try:
            coef = semiring.parse(coef_text) if coef_text is not None else semiring.one
        except ValueError as e:
            raise ParseError(str(e), line) from None
        x = _state(name, aut_states, line)
        weights[x] = semiring.add(weights[x], coef) if x in weights else coef
    return Vec.of(weights, semiring)


def _state(name: str, states: dict, line: int) -> int:
    if name not in states:
        raise ParseError(f"unknown state {name!r}", line)
    return states[name]


def parse_wa(text: str) -> WaFile:
    lines = [(i + 1, raw.split("#", 1)[0].strip()) for i, raw in enumerate(text.splitlines())]
    lines = [(n, l) for n, l in lines if l]
    if not lines or not lines[0][1].startswith("wa "):
        raise ParseError("expected header 'wa <semiring> <letters>'", lines[0][0] if lines else None)
    n0, header = lines[0]
    parts = header.split()
    if len(parts) < 3:
        raise ParseError("header needs a semiring and at least one letter", n0)
    try:
        s = get_semiring(parts[1])
    except KeyError as e:
        raise ParseError(str(e.args[0]), n0) from None
    alphabet = tuple(l for p in parts[2:] for l in p.split(",") if l)
    if len(set(alphabet)) != len(alphabet):
        raise ParseError("duplicate letter in alphabet", n0)

    names: list = []
    outs: list = []
    states: dict = {}
    raw_trans: list = []
    raw_queries: list = []
    for n, l in lines[1:]:
        head = l.split(None, 1)[0]
        if head == "state":
            m = re.fullmatch(r"state\s+(\S+)\s+out\s+(\S+)", l)
            if not m:
                raise ParseError("expected 'state <name> out <weight>'", n)
            name = m.group(1)
            if name in states:
                raise ParseError(f"state {name!r} declared twice", n)
            try:
                outs.append(s.parse(m.group(2)))
            except ValueError as e:
                raise ParseError(str(e), n) from None
            states[name] = len(names)
            names.append(name)
        elif head == "trans":
            p = l.split()
            if len(p) != 5:
                raise ParseError("expected 'trans <src> <letter> <weight> <dst>'", n)
            raw_trans.append((n, p[1:]))
        elif head in ("incl", "equiv"):
            raw_queries.append((n, head, l[len(head):]))
        else:
            raise ParseError(f"unknown directive {head!r}", n)

    trans: dict = {}
    for n, (src, letter, w, dst) in raw_trans:
        if letter not in alphabet:
            raise ParseError(f"letter {letter!r} not in alphabet", n)
        try:
            weight = s.parse(w)
        except ValueError as e:
            raise ParseError(str(e), n) from None
        x, y = _state(src, states, n), _state(dst, states, n)
        row = dict(trans.get((x, letter), Vec(())).items)
        row[y] = s.add(row[y], weight) if y in row else weight
        trans[(x, letter)] = Vec.of(row, s)
    try:
        aut = WAut(Carrier(len(names), tuple(names)), alphabet, s, tuple(outs), trans)
    except ValueError as e:
        raise ParseError(str(e)) from None

    queries = []
    for n, kind, body in raw_queries:
        sep = "<=" if kind == "incl" else "=="
        if body.count(sep) != 1:
            raise ParseError(f"expected '{kind} <lhs> {sep} <rhs>'", n)
        lhs, rhs = body.split(sep)
        queries.append(WaQuery(kind, parse_vec(lhs, states, s, n), parse_vec(rhs, states, s, n), n,
                               f"{kind}{body}".strip()))
    return WaFile(aut, tuple(queries))


def render_wa(aut: WAut, queries=()) -> str:
    s = aut.semiring
    out = [f"wa {s.name} {' '.join(aut.alphabet)}"]
    for i in range(aut.states.size):
        out.append(f"state {aut.name(i)} out {s.render(aut.out[i])}")
    for (x, a), v in sorted(aut.trans.items(), key=lambda kv: (kv[0][0], aut.alphabet.index(kv[0][1]))):
        for y, w in v.items:
            out.append(f"trans {aut.name(x)} {a} {s.render(w)} {aut.name(y)}")
    for q in queries:
        out.append(q.text)
    return "\n".join(out) + "\n"
