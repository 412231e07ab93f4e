"""Weighted automata, their linear extension, and inclusion/equivalence checks.

A weighted automaton has an output weight per state and, per letter, a
finitely supported vector of successor weights.  Determinisation is lazy:
states of the determinised system are vectors, materialised only when the
worklist reaches them.
"""
from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Sequence

from . import exact
from .lattice import (COMPLETE, THEOREM_CITED, Carrier, CheckOutcome, Closure, Expansion, Rel, StepFn,
                      Verdict, run_upto_check, DEFAULT_BUDGET)
from .lts import refine
from .semirings import OrderedSemiring


class ConfigurationError(ValueError):
    """A technique was requested for a semiring that does not support it."""


@dataclass(frozen=True)
class Vec:
    """Finitely supported linear combination; ``items`` is sorted by state with no zeros."""

    items: tuple = ()

    @classmethod
    def of(cls, weights: Mapping, semiring: OrderedSemiring) -> "Vec":
        return cls(tuple(sorted((x, w) for x, w in weights.items() if not semiring.is_zero(w))))

    @classmethod
    def unit(cls, x: int, semiring: OrderedSemiring) -> "Vec":
        return cls(((x, semiring.one),))

    @classmethod
    def of_set(cls, states: Iterable[int]) -> "Vec":
        return cls(tuple((x, True) for x in sorted(set(states))))

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)

    def get(self, x, default=None):
        for y, w in self.items:
            if y == x:
                return w
        return default

    def support(self) -> frozenset:
        return frozenset(x for x, _ in self.items)

    def as_dict(self) -> dict:
        return dict(self.items)


ZERO = Vec(())


def vec_add(s: OrderedSemiring, u: Vec, v: Vec) -> Vec:
    acc = dict(u.items)
    for x, w in v.items:
        acc[x] = s.add(acc[x], w) if x in acc else w
    return Vec.of(acc, s)


def vec_scale(s: OrderedSemiring, r, v: Vec) -> Vec:
    return Vec.of({x: s.mul(r, w) for x, w in v.items}, s)


def vec_sum(s: OrderedSemiring, terms: Iterable[tuple]) -> Vec:
    """Σ r_i · v_i over (r_i, v_i) pairs."""
    acc: dict = {}
    for r, v in terms:
        for x, w in v.items:
            rw = s.mul(r, w)
            acc[x] = s.add(acc[x], rw) if x in acc else rw
    return Vec.of(acc, s)


@dataclass(frozen=True)
class WAut:
    states: Carrier
    alphabet: tuple
    semiring: OrderedSemiring
    out: tuple
    trans: Mapping  # (state, letter) -> Vec

    def __post_init__(self):
        if not self.alphabet:
            raise ValueError("alphabet must be nonempty")
        if len(self.out) != self.states.size:
            raise ValueError("one output weight per state expected")
        for (x, a), v in self.trans.items():
            if a not in self.alphabet:
                raise ValueError(f"letter {a!r} not in alphabet")
            if not 0 <= x < self.states.size or any(not 0 <= y < self.states.size for y, _ in v):
                raise ValueError(f"transition from {x} mentions an unknown state")

    def index(self, name: str) -> int:
        labels = self.states.labels or tuple(str(i) for i in range(self.states.size))
        try:
            return labels.index(name)
        except ValueError:
            raise KeyError(f"unknown state {name!r}") from None

    def name(self, i: int) -> str:
        return self.states.label(i)

    def row(self, x: int, a) -> Vec:
        return self.trans.get((x, a), ZERO)

    def render(self, v: Vec) -> str:
        if not v.items:
            return "0"
        if self.semiring.name == "bool":
            return "{" + ", ".join(self.name(x) for x, _ in v.items) + "}"
        return " + ".join(f"{w}*{self.name(x)}" for x, w in v.items)


def linear_output(aut: WAut, v: Vec):
    s = aut.semiring
    return s.sum(s.mul(w, aut.out[x]) for x, w in v.items)


def linear_step(aut: WAut, v: Vec, a) -> Vec:
    if a not in aut.alphabet:
        raise KeyError(f"letter {a!r} not in alphabet {aut.alphabet}")
    return vec_sum(aut.semiring, ((w, aut.row(x, a)) for x, w in v.items))


def word_weight(aut: WAut, v: Vec, word: Sequence) -> object:
    for a in word:
        v = linear_step(aut, v, a)
    return linear_output(aut, v)


def words_upto(alphabet: Sequence, length: int):
    for n in range(length + 1):
        yield from itertools.product(alphabet, repeat=n)


def reachable_fragment(aut: WAut, roots: Iterable[Vec], limit: int = 10_000) -> list:
    """All vectors reachable from ``roots`` under linear_step, in BFS order."""
    order: list = []
    seen: set = set()
    queue = deque()
    for r in roots:
        if r not in seen:
            seen.add(r)
            queue.append(r)
    while queue:
        v = queue.popleft()
        order.append(v)
        if len(order) > limit:
            raise OverflowError(f"reachable fragment exceeds {limit} vectors")
        for a in aut.alphabet:
            w = linear_step(aut, v, a)
            if w not in seen:
                seen.add(w)
                queue.append(w)
    return order


def step_relation_lifting(aut: WAut, fragment: Sequence[Vec]) -> StepFn:
    """The inclusion step on a step-closed set of vectors.

    (v, w) is in b(R) iff o#(v) <= o#(w) and (t#(v)(a), t#(w)(a)) ∈ R for every a.
    """
    fragment = list(fragment)
    index = {v: i for i, v in enumerate(fragment)}
    carrier = Carrier(len(fragment), tuple(aut.render(v) for v in fragment))
    leq = aut.semiring.leq
    outs = [linear_output(aut, v) for v in fragment]
    steps = [[index[linear_step(aut, v, a)] for a in aut.alphabet] for v in fragment]

    def apply(r: Rel) -> Rel:
        return Rel(carrier, frozenset(
            (i, j) for i in range(len(fragment)) for j in range(len(fragment))
            if leq(outs[i], outs[j]) and all((si, sj) in r.pairs for si, sj in zip(steps[i], steps[j]))))

    return StepFn(carrier, apply, "weighted-inclusion")


# --- contextual closure membership ---------------------------------------------

def _cover_union(target: tuple, pairs: Sequence[tuple]) -> Optional[list]:
    left, right = (set(target[0].support()), set(target[1].support()))
    chosen, lu, ru = [], set(), set()
    for i, (x, y) in enumerate(pairs):
        xs, ys = x.support(), y.support()
        if xs <= left and ys <= right:
            chosen.append(i)
            lu |= xs
            ru |= ys
    if lu == left and ru == right:
        return chosen
    return None


def saturate_cgr(start: frozenset, pairs: Sequence[tuple], record: bool = False):
    """Close a state set under the rewrite rules of R: X ⊆ u ⇒ u ∪ Y, Y ⊆ u ⇒ u ∪ X.

    Returns the normal form, plus the list of applied steps ``(index, direction)``
    when ``record`` is set.
    """
    u = set(start)
    steps = []
    sets = [(frozenset(x), frozenset(y)) for x, y in pairs]
    changed = True
    while changed:
        changed = False
        for i, (x, y) in enumerate(sets):
            if x <= u and not y <= u:
                u |= y
                steps.append((i, "lr"))
                changed = True
            if y <= u and not x <= u:
                u |= x
                steps.append((i, "rl"))
                changed = True
    return (frozenset(u), steps) if record else frozenset(u)


def ctx_membership_boolean(p: tuple, pairs: Sequence[tuple]) -> bool:
    """Decide p ∈ Cgr(R) for pairs of state sets via rewriting to normal forms."""
    sets = [(_as_set(x), _as_set(y)) for x, y in pairs]
    return saturate_cgr(_as_set(p[0]), sets) == saturate_cgr(_as_set(p[1]), sets)


def cgr_witness(p: tuple, pairs: Sequence[tuple]) -> Optional[dict]:
    sets = [(_as_set(x), _as_set(y)) for x, y in pairs]
    lu, lsteps = saturate_cgr(_as_set(p[0]), sets, record=True)
    ru, rsteps = saturate_cgr(_as_set(p[1]), sets, record=True)
    if lu != ru:
        return None
    return {"left": lsteps, "right": rsteps}


def replay_cgr(p: tuple, pairs: Sequence[tuple], witness: dict) -> bool:
    """Re-apply recorded rewrite steps, checking each is enabled, and compare."""
    sets = [(_as_set(x), _as_set(y)) for x, y in pairs]
    finals = []
    for side, start in (("left", p[0]), ("right", p[1])):
        u = set(_as_set(start))
        for i, direction in witness[side]:
            if not 0 <= i < len(sets):
                return False
            src, dst = sets[i] if direction == "lr" else sets[i][::-1]
            if not src <= u:
                return False
            u |= dst
        finals.append(frozenset(u))
    return finals[0] == finals[1]


def _as_set(x) -> frozenset:
    return x.support() if isinstance(x, Vec) else frozenset(x)


def _stack(s: OrderedSemiring, gens: Sequence[tuple], target: tuple, states: Sequence[int]):
    """Columns = generators (x_i ⊕ y_i); rows = coordinates of left then right."""
    a = []
    b = []
    for side in (0, 1):
        for z in states:
            a.append([Fraction(g[side].get(z, 0)) for g in gens])
            b.append(Fraction(target[side].get(z, 0)))
    return a, b


def _coords(gens: Sequence[tuple], target: tuple) -> list:
    support = set(target[0].support()) | set(target[1].support())
    for x, y in gens:
        support |= x.support() | y.support()
    return sorted(support)


def ctx_membership_semimodule(p: tuple, pairs: Sequence[tuple], s: OrderedSemiring,
                              diagonal: Sequence[int] = ()) -> Optional[list]:
    """Coefficients r with p = Σ r_i (x_i, y_i), or None.

    Over the non-negative rationals r_i >= 0 (LP feasibility); over the
    rationals r_i is unrestricted (Gaussian elimination).  ``diagonal`` adds
    the pairs (e_z, e_z) as extra generators.  The result lists
    ``(reference, coefficient)`` with references ``("r", i)`` or ``("d", z)``.
    """
    if s.name == "bool":
        raise ConfigurationError("use the union-based closure for the boolean semiring")
    gens, refs = _generators(s, pairs, diagonal)
    if not gens:
        return [] if not p[0].items and not p[1].items else None
    a, b = _stack(s, gens, p, _coords(gens, p))
    x = exact.solve_linear(a, b) if s.is_field else exact.feasible_nonneg(a, b)
    if x is None:
        return None
    return [(ref, c) for ref, c in zip(refs, x) if c != 0]


def monotone_ctx_membership(p: tuple, pairs: Sequence[tuple],
                            diagonal: Sequence[int] = ()) -> Optional[list]:
    """Decide membership in the monotone contextual closure over the rationals.

    Looks for s_q, u_q >= 0 with left = Σ s_q x_q − Σ u_q y_q and
    right = Σ s_q y_q − Σ u_q x_q: negative coefficients are only allowed on
    reversed pairs.  Result lists ``(reference, s, u)``.
    """
    from .semirings import rationals
    gens, refs = _generators(rationals(), pairs, diagonal)
    if not gens:
        return [] if not p[0].items and not p[1].items else None
    coords = _coords(gens, p)
    a, b = [], []
    for side in (0, 1):
        other = 1 - side
        for z in coords:
            a.append([Fraction(g[side].get(z, 0)) for g in gens] +
                     [-Fraction(g[other].get(z, 0)) for g in gens])
            b.append(Fraction(p[side].get(z, 0)))
    x = exact.feasible_nonneg(a, b)
    if x is None:
        return None
    k = len(gens)
    return [(ref, x[i], x[k + i]) for i, ref in enumerate(refs) if x[i] != 0 or x[k + i] != 0]


def _generators(s: OrderedSemiring, pairs, diagonal):
    gens = list(pairs)
    refs = [("r", i) for i in range(len(gens))]
    for z in diagonal:
        e = Vec(((z, s.one),))
        gens.append((e, e))
        refs.append(("d", z))
    return gens, refs


def _resolve(ref, pairs, s):
    kind, i = ref
    if kind == "r":
        return pairs[i]
    e = Vec(((i, s.one),))
    return e, e


def verify_combination(p: tuple, pairs: Sequence[tuple], witness: list, s: OrderedSemiring,
                       monotone: bool = False) -> bool:
    """Substitute a recorded coefficient witness back in; no solving involved."""
    try:
        if monotone:
            if any(c < 0 or d < 0 for _, c, d in witness):
                return False
            terms_l, terms_r = [], []
            for ref, c, d in witness:
                x, y = _resolve(ref, pairs, s)
                terms_l += [(Fraction(c), x), (Fraction(-d), y)]
                terms_r += [(Fraction(c), y), (Fraction(-d), x)]
            from .semirings import rationals
            q = rationals()
            return vec_sum(q, terms_l) == p[0] and vec_sum(q, terms_r) == p[1]
        if s.nonneg and any(c < 0 for _, c in witness):
            return False
        terms = [(Fraction(c), _resolve(ref, pairs, s)) for ref, c in witness]
        return (vec_sum(s, ((c, xy[0]) for c, xy in terms)) == p[0] and
                vec_sum(s, ((c, xy[1]) for c, xy in terms)) == p[1])
    except (IndexError, KeyError, TypeError, ValueError):
        return False


def verify_union_cover(p: tuple, pairs: Sequence[tuple], witness: list, diagonal=()) -> bool:
    lu, ru = set(), set()
    for ref in witness:
        kind, i = ref
        if kind == "r":
            if not 0 <= i < len(pairs):
                return False
            x, y = pairs[i]
            xs, ys = x.support(), y.support()
        else:
            if i not in diagonal:
                return False
            xs = ys = frozenset({i})
        lu |= xs
        ru |= ys
    return lu == set(p[0].support()) and ru == set(p[1].support())


# --- techniques ------------------------------------------------------------------

INCLUSION_TECHNIQUES = ("none", "ctx", "rctx", "mctx", "rmctx")
EQUIVALENCE_TECHNIQUES = ("none", "bisimilarity", "equivalence", "congruence")


def inclusion_closure(aut: WAut, technique: str) -> Closure:
    """The membership oracle for a technique, after checking semiring prerequisites."""
    s = aut.semiring
    if technique not in INCLUSION_TECHNIQUES:
        raise ConfigurationError(f"unknown inclusion technique {technique!r}")
    if technique == "none":
        return Closure("none", member_fn=lambda p, pool: p in pool, compat_evidence=THEOREM_CITED)
    reflexive = technique.startswith("r")
    diag = tuple(range(aut.states.size)) if reflexive else ()
    if technique.endswith("mctx"):
        if s.name != "q":
            raise ConfigurationError("monotone contextual closure is defined for the rationals")

        def explain(p, pool):
            return monotone_ctx_membership(p, list(pool), diag)
        return Closure(technique, explain=explain, compat_evidence=THEOREM_CITED, completeness=COMPLETE)
    if not (s.monotone_add and s.monotone_mul):
        raise ConfigurationError(
            f"contextual closure needs + and * monotone; semiring {s.name} fails the product "
            "condition (use mctx)")
    if s.name == "bool":
        def explain(p, pool):
            gens = list(pool)
            cover = _cover_union(p, gens + [(Vec.of_set({z}),) * 2 for z in diag])
            if cover is None:
                return None
            return [("r", i) if i < len(gens) else ("d", diag[i - len(gens)]) for i in cover]
    else:
        def explain(p, pool):
            return ctx_membership_semimodule(p, list(pool), s, diag)
    return Closure(technique, explain=explain, compat_evidence=THEOREM_CITED, completeness=COMPLETE)


def check_inclusion(aut: WAut, v: Vec, w: Vec, technique: str = "ctx",
                    budget: int = DEFAULT_BUDGET, word_audit_len: int = 8) -> CheckOutcome:
    """Try to prove v ≾ w (weight of v below weight of w on every word).

    Refutations carry the distinguishing word; proofs are followed by a word
    audit up to ``word_audit_len``, reported in ``outcome.oracle``.
    """
    closure = inclusion_closure(aut, technique)
    s = aut.semiring

    def expand(pair):
        x, y = pair
        ox, oy = linear_output(aut, x), linear_output(aut, y)
        if not s.leq(ox, oy):
            return Expansion(False, reason={"outputs": (ox, oy)})
        return Expansion(True, tuple((a, (linear_step(aut, x, a), linear_step(aut, y, a)))
                                     for a in aut.alphabet))

    outcome = run_upto_check([(v, w)], expand, closure, budget=budget)
    return _with_word_audit(aut, outcome, v, w, word_audit_len, s.leq)


def _with_word_audit(aut, outcome, v, w, length, rel):
    from dataclasses import replace
    if outcome.verdict is Verdict.PROVED and length >= 0:
        bad = next((word for word in words_upto(aut.alphabet, length)
                    if not rel(word_weight(aut, v, word), word_weight(aut, w, word))), None)
        return replace(outcome, oracle={"word_audit_len": length, "word_audit_ok": bad is None,
                                        "violating_word": bad})
    if outcome.verdict is Verdict.REFUTED:
        word = outcome.counterexample["word"]
        ok = not rel(word_weight(aut, v, word), word_weight(aut, w, word))
        return replace(outcome, oracle={"counterexample_validated": ok})
    return outcome


# --- NFA language equivalence ----------------------------------------------------

def nfa_bisimilarity(aut: WAut) -> list:
    """Strong bisimilarity quotient on the NFA states (a coalgebra morphism's kernel)."""
    def sig(x, block):
        return tuple(frozenset(block[y] for y in aut.row(x, a).support()) for a in aut.alphabet)
    return refine(aut.states.size, lambda x: bool(aut.out[x]), sig)


class _UnionFind:
    def __init__(self):
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        while self.parent[x] != x:
            self.parent[x] = self.parent[self.parent[x]]
            x = self.parent[x]
        return x

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[ra] = rb


def equivalence_closure(kind: str, aut: WAut) -> Closure:
    if kind == "none":
        return Closure("none", member_fn=lambda p, pool: p in pool, compat_evidence=THEOREM_CITED)
    if kind == "equivalence":
        def member(p, pool):
            uf = _UnionFind()
            for x, y in pool:
                uf.union(x, y)
            return p[0] == p[1] or uf.find(p[0]) == uf.find(p[1])
        return Closure("equivalence", member_fn=member, compat_evidence=THEOREM_CITED)
    if kind == "bisimilarity":
        q = nfa_bisimilarity(aut)

        def img(v):
            return frozenset(q[x] for x in v.support())

        def member(p, pool):
            a, b = img(p[0]), img(p[1])
            if a == b:
                return True
            images = {(img(x), img(y)) for x, y in pool}
            return (a, b) in images or (b, a) in images
        return Closure("bisimilarity", member_fn=member, compat_evidence=THEOREM_CITED)
    if kind == "congruence":
        return Closure("congruence", member_fn=lambda p, pool: ctx_membership_boolean(p, list(pool)),
                       explain=lambda p, pool: cgr_witness(p, list(pool)), compat_evidence=THEOREM_CITED)
    raise ConfigurationError(f"unknown equivalence technique {kind!r}")


def check_nfa_equivalence(aut: WAut, u: Iterable[int], v: Iterable[int], technique: str = "congruence",
                          budget: int = DEFAULT_BUDGET) -> CheckOutcome:
    """Language equivalence of two state sets by on-the-fly determinisation."""
    if aut.semiring.name != "bool":
        raise ConfigurationError("NFA equivalence needs the boolean semiring")
    closure = equivalence_closure(technique, aut)

    def expand(pair):
        x, y = pair
        ox, oy = linear_output(aut, x), linear_output(aut, y)
        if ox != oy:
            return Expansion(False, reason={"outputs": (ox, oy)})
        return Expansion(True, tuple((a, (linear_step(aut, x, a), linear_step(aut, y, a)))
                                     for a in aut.alphabet))

    start = (Vec.of_set(u), Vec.of_set(v))
    outcome = run_upto_check([start], expand, closure, budget=budget)
    return _with_word_audit(aut, outcome, start[0], start[1], -1, lambda a, b: a == b)
