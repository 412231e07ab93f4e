"""Text format for nominal automata.

::

    orbit A arity 1 out 0
    otrans A pattern supp-1 -> elem(top)
    otrans A pattern fresh -> elem(A, s1)
    nomequiv elem(star0) == elem(star1) upto congruence
    hint elem(star0) == orbit-minus(A')

In ``otrans`` targets, names are ``s1``, ``s2`` (support) and ``l`` (the
letter read).  In queries and hints names are concrete: ``a``, ``b``, …
``orbit-minus(O, (a), (b))`` is the orbit O without the listed elements.
``hint`` lines add pairs to the initial relation of the preceding query.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field

from .gsos_format import split_top
from .nominal import (Elem, NomAut, NominalError, OrbitElem, OrbitMinus, make_set, parse_name)
from .wa_format import ParseError


@dataclass
class NomQuery:
    left: object
    right: object
    technique: str
    line: int
    text: str
    hints: list = field(default_factory=list)


@dataclass(frozen=True)
class NomFile:
    aut: NomAut
    queries: tuple


_CALL = re.compile(r"^(elem|orbit-minus)\((.*)\)$")


def parse_set_expr(text: str, line: int, symbolic: bool) -> tuple:
    text = text.strip()
    if text == "empty":
        return ()
    atoms = []
    for part in split_top(text, "+"):
        m = _CALL.match(part)
        if not m:
            raise ParseError(f"cannot read set expression {part!r}", line)
        kind, body = m.groups()
        args = split_top(body)
        if not args:
            raise ParseError(f"{kind} needs an orbit id", line)
        orbit = args[0]
        if kind == "elem":
            atoms.append(Elem(orbit, tuple(_name(a, line, symbolic) for a in args[1:])))
        else:
            excluded = []
            for a in args[1:]:
                inner = a[1:-1] if a.startswith("(") and a.endswith(")") else a
                excluded.append(tuple(_name(n, line, symbolic) for n in split_top(inner)))
            atoms.append(OrbitMinus(orbit, tuple(excluded)))
    return tuple(atoms)


def _name(text: str, line: int, symbolic: bool):
    text = text.strip()
    if symbolic:
        if text == "l" or re.fullmatch(r"s\d+", text):
            return text
        raise ParseError(f"targets may only use s1, s2, ... and l, got {text!r}", line)
    try:
        return parse_name(text)
    except NominalError as e:
        raise ParseError(str(e), line) from None


def concrete_set(expr: tuple, aut: NomAut, line: int):
    ar = aut.arities
    explicit, chunks = [], {}
    try:
        for atom in expr:
            if atom.orbit not in ar:
                raise ParseError(f"unknown orbit {atom.orbit!r}", line)
            tuples = [atom.names] if isinstance(atom, Elem) else list(atom.excluded)
            for t in tuples:
                if len(t) != ar[atom.orbit]:
                    raise ParseError(f"orbit {atom.orbit} has arity {ar[atom.orbit]}", line)
            if isinstance(atom, Elem):
                explicit.append(OrbitElem(atom.orbit, atom.names))
            else:
                exc = frozenset(atom.excluded)
                chunks[atom.orbit] = chunks[atom.orbit] & exc if atom.orbit in chunks else exc
    except NominalError as e:
        raise ParseError(str(e), line) from None
    return make_set(explicit, chunks, ar)


def parse_nominal(text: str) -> NomFile:
    orbits, outputs, rules = [], {}, {}
    raw_queries = []
    for n, raw in enumerate(text.splitlines(), start=1):
        l = raw.split("#", 1)[0].strip()
        if not l:
            continue
        head = l.split(None, 1)[0]
        if head == "orbit":
            m = re.fullmatch(r"orbit\s+(\S+)\s+arity\s+(\d+)\s+out\s+([01])", l)
            if not m:
                raise ParseError("expected 'orbit <id> arity <n> out <0|1>'", n)
            orbits.append((m.group(1), int(m.group(2))))
            outputs[m.group(1)] = m.group(3) == "1"
        elif head == "otrans":
            m = re.fullmatch(r"otrans\s+(\S+)\s+pattern\s+(fresh|supp-\d+)\s*->\s*(.+)", l)
            if not m:
                raise ParseError("expected 'otrans <orbit> pattern <supp-k|fresh> -> <set-expr>'", n)
            per = rules.setdefault(m.group(1), {})
            if m.group(2) in per:
                raise ParseError(f"pattern {m.group(2)} given twice for orbit {m.group(1)}", n)
            per[m.group(2)] = parse_set_expr(m.group(3), n, symbolic=True)
        elif head == "nomequiv":
            m = re.fullmatch(r"nomequiv\s+(.+?)\s*==\s*(.+?)(?:\s+upto\s+(\S+))?", l)
            if not m:
                raise ParseError("expected 'nomequiv <set> == <set> upto <technique>'", n)
            raw_queries.append(NomQuery(parse_set_expr(m.group(1), n, False),
                                        parse_set_expr(m.group(2), n, False),
                                        m.group(3) or "congruence", n, l))
        elif head == "hint":
            m = re.fullmatch(r"hint\s+(.+?)\s*==\s*(.+)", l)
            if not m:
                raise ParseError("expected 'hint <set> == <set>'", n)
            if not raw_queries:
                raise ParseError("hint before any nomequiv query", n)
            raw_queries[-1].hints.append((n, parse_set_expr(m.group(1), n, False),
                                          parse_set_expr(m.group(2), n, False)))
        else:
            raise ParseError(f"unknown directive {head!r}", n)
    try:
        aut = NomAut(tuple(orbits), outputs, rules)
    except NominalError as e:
        raise ParseError(str(e)) from None
    queries = []
    for q in raw_queries:
        q.left = concrete_set(q.left, aut, q.line)
        q.right = concrete_set(q.right, aut, q.line)
        q.hints = [(concrete_set(a, aut, n), concrete_set(b, aut, n)) for n, a, b in q.hints]
        queries.append(q)
    return NomFile(aut, tuple(queries))
