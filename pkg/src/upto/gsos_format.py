"""Text format for positive GSOS specifications and process queries.

::

    op | 2
    rule |: x1 -$l-> y1 => $l y1|x2
    rule |: x2 -$l-> y2 => $l x1|y2
    rule |: x1 -$l-> y1, x2 -~$l-> y2 => tau y1|y2
    axiom p -a-> p|p
    axiom q -~a-> q
    diverge {p|q}
    weakbisim {(tau.a.0, 0)} upto slf-unsound
    sim {(a.0, a.0 + b.0)} upto none

Negative premises (``x1 -a-/>``) are rejected.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

from .gsos import GsosError, GsosRule, GsosSpec, Premise, parse_term
from .wa_format import ParseError


@dataclass(frozen=True)
class GsosQuery:
    kind: str  # "diverge" | "weakbisim" | "sim"
    items: tuple  # terms, or pairs of terms
    technique: str
    line: int
    text: str


@dataclass(frozen=True)
class GsosFile:
    spec: GsosSpec
    queries: tuple


_PREMISE = re.compile(r"^x(\d+)\s*-(\S+?)->\s*(y\d+)$")
_ARROW = re.compile(r"^(\S+)\s+-(\S+?)->\s+(.+)$")


def split_top(text: str, sep: str = ",") -> list:
    """Split on ``sep`` outside parentheses."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out if s.strip()]


def _term(text: str, line: int, variables: bool = False):
    try:
        return parse_term(text.strip(), variables=variables)
    except GsosError as e:
        raise ParseError(str(e), line) from None


def _braced(text: str, line: int) -> str:
    text = text.strip()
    if not (text.startswith("{") and text.endswith("}")):
        raise ParseError("expected a braced list {...}", line)
    return text[1:-1]


def _pair(text: str, line: int) -> tuple:
    text = text.strip()
    if not (text.startswith("(") and text.endswith(")")):
        raise ParseError(f"expected a pair (t, u), got {text!r}", line)
    parts = split_top(text[1:-1])
    if len(parts) != 2:
        raise ParseError(f"expected a pair (t, u), got {text!r}", line)
    return _term(parts[0], line), _term(parts[1], line)


def parse_gsos(text: str) -> GsosFile:
    operators: dict = {}
    rules: list = []
    axioms: dict = {}
    queries: list = []
    for n, raw in enumerate(text.splitlines(), start=1):
        l = raw.split("#", 1)[0].strip()
        if not l:
            continue
        head, _, rest = l.partition(" ")
        if head == "op":
            p = rest.split()
            if len(p) != 2 or not p[1].isdigit():
                raise ParseError("expected 'op <name> <arity>'", n)
            if p[0] in operators:
                raise ParseError(f"operator {p[0]!r} declared twice", n)
            operators[p[0]] = int(p[1])
        elif head == "rule":
            rules.append(_rule(rest, n))
        elif head == "axiom":
            m = _ARROW.match(rest.strip())
            if not m:
                raise ParseError("expected 'axiom <const> -<label>-> <term>'", n)
            const, label, target = m.groups()
            axioms.setdefault(const, []).append((label, _term(target, n)))
        elif head == "diverge":
            items = tuple(_term(t, n) for t in split_top(_braced(rest, n)))
            queries.append(GsosQuery("diverge", items, "bhv-ctxl", n, l))
        elif head in ("weakbisim", "sim"):
            body, sep, tech = rest.rpartition(" upto ")
            if not sep:
                body, tech = rest, "none"
            items = tuple(_pair(p, n) for p in split_top(_braced(body, n)))
            queries.append(GsosQuery(head, items, tech.strip(), n, l))
        else:
            raise ParseError(f"unknown directive {head!r}", n)
    try:
        spec = GsosSpec(operators, tuple(rules), {c: tuple(v) for c, v in axioms.items()})
        for c, moves in spec.axioms.items():
            for _, t in moves:
                spec.check_term(t)
        for q in queries:
            for item in q.items:
                for t in (item if isinstance(item, tuple) else (item,)):
                    spec.check_term(t)
    except GsosError as e:
        raise ParseError(str(e)) from None
    return GsosFile(spec, tuple(queries))


def _rule(rest: str, n: int) -> GsosRule:
    op, colon, body = rest.partition(":")
    if not colon:
        raise ParseError("expected 'rule <op>: premises => <label> <target>'", n)
    lhs, arrow, rhs = body.partition("=>")
    if not arrow:
        raise ParseError("rule needs '=>'", n)
    premises = []
    for prem in split_top(lhs):
        if "/>" in prem or prem.startswith("not ") or "-/" in prem:
            raise ParseError("negative premises are not supported (positive GSOS only)", n)
        m = _PREMISE.match(prem)
        if not m:
            raise ParseError(f"cannot read premise {prem!r}", n)
        premises.append(Premise(int(m.group(1)) - 1, m.group(2), m.group(3)))
    label, _, target = rhs.strip().partition(" ")
    if not target.strip():
        raise ParseError("rule conclusion needs a label and a target term", n)
    try:
        return GsosRule(op.strip(), tuple(premises), label, _term(target, n, variables=True))
    except GsosError as e:
        raise ParseError(str(e), n) from None
