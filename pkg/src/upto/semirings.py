"""Ordered semirings with exact arithmetic (booleans and rationals)."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional


class SemiringValidationError(ValueError):
    pass


@dataclass(frozen=True)
class OrderedSemiring:
    name: str
    zero: Any
    one: Any
    add: Callable[[Any, Any], Any]
    mul: Callable[[Any, Any], Any]
    leq: Callable[[Any, Any], bool]
    monotone_add: bool
    monotone_mul: bool
    grid: tuple
    parse: Callable[[str], Any]
    is_field: bool = False
    nonneg: bool = False

    def __repr__(self):
        return f"OrderedSemiring({self.name})"

    def sum(self, xs) -> Any:
        total = self.zero
        for x in xs:
            total = self.add(total, x)
        return total

    def is_zero(self, x) -> bool:
        return x == self.zero

    def render(self, x) -> str:
        if isinstance(x, bool):
            return "1" if x else "0"
        return str(x)


def _parse_bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "t"):
        return True
    if t in ("0", "false", "f"):
        return False
    raise ValueError(f"not a boolean weight: {text!r}")


def _parse_fraction(text: str) -> Fraction:
    t = text.strip()
    if "." in t or "e" in t.lower():
        raise ValueError(f"weights must be exact rationals p/q, got {text!r}")
    return Fraction(t)


def _parse_nonneg(text: str) -> Fraction:
    q = _parse_fraction(text)
    if q < 0:
        raise ValueError(f"negative weight {text!r} in a non-negative semiring")
    return q


def _q_grid(lo: int, hi: int, nonneg: bool) -> tuple:
    vals = {Fraction(n, d) for n in range(lo * 2, hi * 2 + 1) for d in (1, 2)}
    vals = {v for v in vals if lo <= v <= hi and (v >= 0 or not nonneg)}
    return tuple(sorted(vals))


def boolean_semiring() -> OrderedSemiring:
    return OrderedSemiring(
        name="bool", zero=False, one=True,
        add=lambda a, b: a or b, mul=lambda a, b: a and b,
        leq=lambda a, b: (not a) or b,
        monotone_add=True, monotone_mul=True,
        grid=(False, True), parse=_parse_bool, nonneg=True)


def nonneg_rationals() -> OrderedSemiring:
    return OrderedSemiring(
        name="qplus", zero=Fraction(0), one=Fraction(1),
        add=lambda a, b: a + b, mul=lambda a, b: a * b, leq=lambda a, b: a <= b,
        monotone_add=True, monotone_mul=True,
        grid=_q_grid(0, 2, nonneg=True), parse=_parse_nonneg, nonneg=True)


def rationals() -> OrderedSemiring:
    return OrderedSemiring(
        name="q", zero=Fraction(0), one=Fraction(1),
        add=lambda a, b: a + b, mul=lambda a, b: a * b, leq=lambda a, b: a <= b,
        monotone_add=True, monotone_mul=False,
        grid=_q_grid(-2, 2, nonneg=False), parse=_parse_fraction, is_field=True)


@dataclass(frozen=True)
class MonotonicityReport:
    semiring: str
    add_holds: bool
    add_witness: Optional[tuple]
    mul_holds: bool
    mul_witness: Optional[tuple]
    checked: int


def _random_element(s: OrderedSemiring, rng: random.Random):
    if s.name == "bool":
        return rng.random() < 0.5
    lo = 0 if s.nonneg else -6
    return Fraction(rng.randint(lo, 6), rng.randint(1, 4))


def _find_violation(s: OrderedSemiring, op, quads) -> Optional[tuple]:
    for n1, m1, n2, m2 in quads:
        if s.leq(n1, m1) and s.leq(n2, m2) and not s.leq(op(n1, n2), op(m1, m2)):
            return (n1, m1, n2, m2)
    return None


def check_monotonicity(s: OrderedSemiring, samples: int = 1000, seed: int = 0) -> MonotonicityReport:
    """Search for quadruples n1<=m1, n2<=m2 breaking monotonicity of + or *.

    The grid is searched exhaustively, then ``samples`` random quadruples are
    drawn with a fixed seed.  Witnesses are reported as (n1, m1, n2, m2).
    """
    def quads():
        rng = random.Random(seed)
        yield from itertools.product(s.grid, repeat=4)
        for _ in range(samples):
            yield tuple(_random_element(s, rng) for _ in range(4))

    add_w = _find_violation(s, s.add, quads())
    mul_w = _find_violation(s, s.mul, quads())
    return MonotonicityReport(s.name, add_w is None, add_w, mul_w is None, mul_w,
                              len(s.grid) ** 4 + samples)


def check_laws(s: OrderedSemiring) -> list:
    """Semiring laws and order axioms on the grid; returns the list of failures."""
    g = s.grid
    failures = []
    for a, b, c in itertools.product(g, repeat=3):
        if s.add(s.add(a, b), c) != s.add(a, s.add(b, c)):
            failures.append(("add-assoc", a, b, c))
        if s.mul(s.mul(a, b), c) != s.mul(a, s.mul(b, c)):
            failures.append(("mul-assoc", a, b, c))
        if s.mul(a, s.add(b, c)) != s.add(s.mul(a, b), s.mul(a, c)):
            failures.append(("left-distrib", a, b, c))
        if s.mul(s.add(a, b), c) != s.add(s.mul(a, c), s.mul(b, c)):
            failures.append(("right-distrib", a, b, c))
        if s.leq(a, b) and s.leq(b, c) and not s.leq(a, c):
            failures.append(("leq-trans", a, b, c))
    for a, b in itertools.product(g, repeat=2):
        if s.add(a, b) != s.add(b, a):
            failures.append(("add-comm", a, b))
        if s.leq(a, b) and s.leq(b, a) and a != b:
            failures.append(("leq-antisym", a, b))
    for a in g:
        if s.add(a, s.zero) != a or s.mul(a, s.one) != a or s.mul(s.one, a) != a:
            failures.append(("units", a))
        if s.mul(a, s.zero) != s.zero or s.mul(s.zero, a) != s.zero:
            failures.append(("zero-absorbing", a))
        if not s.leq(a, a):
            failures.append(("leq-refl", a))
    return failures


def validate(s: OrderedSemiring, samples: int = 200, seed: int = 0) -> OrderedSemiring:
    """Reject a semiring whose claimed monotonicity flags are contradicted."""
    report = check_monotonicity(s, samples=samples, seed=seed)
    if s.monotone_add and not report.add_holds:
        raise SemiringValidationError(f"{s.name}: + claimed monotone, witness {report.add_witness}")
    if s.monotone_mul and not report.mul_holds:
        raise SemiringValidationError(f"{s.name}: * claimed monotone, witness {report.mul_witness}")
    failures = check_laws(s)
    if failures:
        raise SemiringValidationError(f"{s.name}: semiring law fails: {failures[0]}")
    return s


SEMIRINGS = {"bool": boolean_semiring, "qplus": nonneg_rationals, "q": rationals}
_validated: dict = {}


def get_semiring(name: str) -> OrderedSemiring:
    if name not in SEMIRINGS:
        raise KeyError(f"unknown semiring {name!r}; expected one of {sorted(SEMIRINGS)}")
    if name not in _validated:
        _validated[name] = validate(SEMIRINGS[name]())
    return _validated[name]
