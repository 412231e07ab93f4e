"""Orbit-finite nominal automata and equivalence up to equivariant congruence.

Names are natural numbers.  A state is an orbit element: an orbit id paired
with a tuple of distinct names (its support).  Determinised states are
finitely supported sets, kept as an explicit finite part plus, per orbit, a
cofinite chunk "every element of this orbit except these".

Transitions are given symbolically per orbit: a rule per letter pattern
(``supp-k``: the letter is the k-th support name; ``fresh``: it is none of
them) whose target expression mentions support names ``s1, s2, …`` and the
read letter ``l``.  Equivariance holds by construction.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

from .lattice import (SOUND_INCOMPLETE, THEOREM_CITED, CheckOutcome, Closure, Expansion, Verdict,
                      run_upto_check, DEFAULT_BUDGET)


class NominalError(ValueError):
    pass


class RepresentationOverflow(NominalError):
    """A set outside the explicit-plus-cofinite fragment would be needed."""


# --- names and permutations ----------------------------------------------------------

def name_str(n: int, primed: bool = False) -> str:
    base = chr(ord("a") + n) if n < 26 else f"n{n}"
    return base + ("'" if primed else "")


def parse_name(text: str) -> int:
    t = text.strip().rstrip("'")
    if len(t) == 1 and t.isalpha() and t.islower():
        return ord(t) - ord("a")
    if t.startswith("n") and t[1:].isdigit():
        return int(t[1:])
    raise NominalError(f"not a name: {text!r}")


@dataclass(frozen=True)
class Perm:
    """Finitely supported bijection on names; identity off ``mapping``'s keys."""

    mapping: tuple = ()  # sorted (src, dst) pairs

    def __post_init__(self):
        m = dict(self.mapping)
        if sorted(m.keys()) != sorted(m.values()):
            raise NominalError("permutation must be a bijection on its domain")
        object.__setattr__(self, "mapping", tuple(sorted((a, b) for a, b in m.items() if a != b)))

    @classmethod
    def swap(cls, a: int, b: int) -> "Perm":
        return cls(((a, b), (b, a))) if a != b else cls()

    def __call__(self, n: int) -> int:
        return dict(self.mapping).get(n, n)

    def inverse(self) -> "Perm":
        return Perm(tuple((b, a) for a, b in self.mapping))


def _rename(f, names: tuple) -> tuple:
    return tuple(f(n) for n in names)


# --- orbit elements and finitely supported sets ------------------------------------

@dataclass(frozen=True, order=True)
class OrbitElem:
    orbit: str
    support: tuple = ()

    def __post_init__(self):
        if len(set(self.support)) != len(self.support):
            raise NominalError(f"support of {self.orbit} element must be distinct names")


@dataclass(frozen=True)
class FinSuppSet:
    """Explicit elements plus per-orbit cofinite chunks ``(orbit, excluded supports)``.

    Canonical: an orbit with a chunk has no explicit elements; arity-0
    orbits are always explicit.  Use :func:`make_set` to build one.
    """

    explicit: frozenset = frozenset()
    cofinite: frozenset = frozenset()  # of (orbit, frozenset of support tuples)

    def chunks(self) -> dict:
        return {o: exc for o, exc in self.cofinite}

    def support(self) -> frozenset:
        names = {n for e in self.explicit for n in e.support}
        names |= {n for _, exc in self.cofinite for t in exc for n in t}
        return frozenset(names)

    def is_empty(self) -> bool:
        return not self.explicit and not self.cofinite

    def sort_key(self) -> tuple:
        return (tuple(sorted((e.orbit, e.support) for e in self.explicit)),
                tuple(sorted((o, tuple(sorted(exc))) for o, exc in self.cofinite)))


EMPTY = FinSuppSet()


def make_set(explicit: Iterable[OrbitElem] = (), chunks: Optional[Mapping] = None,
             arities: Optional[Mapping] = None) -> FinSuppSet:
    """Canonicalise an explicit part and a ``{orbit: excluded}`` map."""
    chunks = {o: frozenset(tuple(t) for t in exc) for o, exc in (chunks or {}).items()}
    explicit = set(explicit)
    if arities is not None:
        for o in list(chunks):
            if arities[o] == 0:
                if () not in chunks[o]:
                    explicit.add(OrbitElem(o, ()))
                del chunks[o]
    for e in list(explicit):
        if e.orbit in chunks:
            explicit.discard(e)
            chunks[e.orbit] = chunks[e.orbit] - {e.support}
    return FinSuppSet(frozenset(explicit), frozenset(chunks.items()))


def set_union(u: FinSuppSet, v: FinSuppSet) -> FinSuppSet:
    cu, cv = u.chunks(), v.chunks()
    chunks = {}
    for o in set(cu) | set(cv):
        if o in cu and o in cv:
            chunks[o] = cu[o] & cv[o]
        else:
            chunks[o] = cu.get(o, cv.get(o))
    return make_set(u.explicit | v.explicit, chunks)


def set_contains(u: FinSuppSet, e: OrbitElem) -> bool:
    if e in u.explicit:
        return True
    exc = u.chunks().get(e.orbit)
    return exc is not None and e.support not in exc


def set_subset(x: FinSuppSet, u: FinSuppSet) -> bool:
    if not all(set_contains(u, e) for e in x.explicit):
        return False
    cu = u.chunks()
    for o, exc in x.cofinite:
        if o not in cu or not cu[o] <= exc:
            return False
    return True


def apply_perm(pi, x):
    """Rename names in an OrbitElem or FinSuppSet; ``pi`` is a Perm or any injective map."""
    if isinstance(x, OrbitElem):
        return OrbitElem(x.orbit, _rename(pi, x.support))
    return FinSuppSet(frozenset(apply_perm(pi, e) for e in x.explicit),
                      frozenset((o, frozenset(_rename(pi, t) for t in exc)) for o, exc in x.cofinite))


def fresh_names(avoid: Iterable[int], k: int) -> list:
    avoid = set(avoid)
    out, n = [], 0
    while len(out) < k:
        if n not in avoid:
            out.append(n)
        n += 1
    return out


# --- set expressions and automata ---------------------------------------------------

@dataclass(frozen=True)
class Elem:
    orbit: str
    names: tuple = ()  # refs: "s1".., "l", or concrete ints


@dataclass(frozen=True)
class OrbitMinus:
    orbit: str
    excluded: tuple = ()  # tuple of ref tuples


SetExpr = tuple  # of Elem | OrbitMinus

_GENERIC = object()


@dataclass(frozen=True)
class NomAut:
    orbits: tuple  # of (id, arity)
    output: Mapping  # id -> bool
    rules: Mapping  # id -> {pattern: SetExpr}; pattern "fresh" or "supp-k"

    def __post_init__(self):
        ar = self.arities
        if len(ar) != len(self.orbits):
            raise NominalError("orbit ids must be unique")
        for o, n in self.orbits:
            if n > 2:
                raise NominalError(f"orbit {o}: arity {n} > 2 is not supported")
            want = {"fresh"} | {f"supp-{k}" for k in range(1, n + 1)}
            have = set(self.rules.get(o, {}))
            if have != want:
                raise NominalError(f"orbit {o}: rules must cover patterns {sorted(want)}, got {sorted(have)}")
            for pat, expr in self.rules[o].items():
                allowed = {f"s{k}" for k in range(1, n + 1)} | {"l"}
                for atom in expr:
                    if atom.orbit not in ar:
                        raise NominalError(f"orbit {o}: target mentions unknown orbit {atom.orbit}")
                    refs = atom.names if isinstance(atom, Elem) else [r for t in atom.excluded for r in t]
                    for r in refs:
                        if r not in allowed:
                            raise NominalError(f"orbit {o}: target may only use {sorted(allowed)}, got {r!r}")
                    tuples = [atom.names] if isinstance(atom, Elem) else list(atom.excluded)
                    for t in tuples:
                        if len(t) != ar[atom.orbit]:
                            raise NominalError(f"orbit {o}: {atom.orbit} needs {ar[atom.orbit]} names")
                        resolved = [f"s{pat[5:]}" if r == "l" and pat != "fresh" else r for r in t]
                        if len(set(resolved)) != len(resolved):
                            raise NominalError(f"orbit {o}, pattern {pat}: names in {t} coincide")
            if o not in self.output:
                raise NominalError(f"orbit {o}: missing output")

    @property
    def arities(self) -> dict:
        return dict(self.orbits)

    @property
    def max_arity(self) -> int:
        return max((n for _, n in self.orbits), default=0)

    def primed(self, orbit: str) -> bool:
        return orbit.endswith("'")


def _pattern(e: OrbitElem, a: int) -> str:
    for k, n in enumerate(e.support, start=1):
        if n == a:
            return f"supp-{k}"
    return "fresh"


def _eval(aut: NomAut, expr: SetExpr, env: dict) -> FinSuppSet:
    explicit, chunks = [], {}
    for atom in expr:
        if isinstance(atom, Elem):
            explicit.append(OrbitElem(atom.orbit, tuple(env[r] for r in atom.names)))
        else:
            exc = frozenset(tuple(env[r] for r in t) for t in atom.excluded)
            chunks[atom.orbit] = chunks[atom.orbit] & exc if atom.orbit in chunks else exc
    return make_set(explicit, chunks, aut.arities)


def _env(e: OrbitElem, a) -> dict:
    env = {f"s{k}": n for k, n in enumerate(e.support, start=1)}
    env["l"] = a
    return env


def elem_step(aut: NomAut, e: OrbitElem, a: int) -> FinSuppSet:
    return _eval(aut, aut.rules[e.orbit][_pattern(e, a)], _env(e, a))


def _chunk_step(aut: NomAut, orbit: str, exc: frozenset, a: int) -> FinSuppSet:
    """Successors of all elements o(b) with b ∉ exc: the special b = a, plus generic b."""
    if aut.arities[orbit] != 1:
        raise RepresentationOverflow(f"stepping a cofinite chunk of arity-{aut.arities[orbit]} orbit {orbit}")
    out = EMPTY
    if (a,) not in exc:
        out = elem_step(aut, OrbitElem(orbit, (a,)), a)
    avoid = frozenset({(a,)} | set(exc))
    explicit, chunks = [], {}
    for atom in aut.rules[orbit]["fresh"]:
        if isinstance(atom, Elem):
            if "s1" not in atom.names:
                explicit.append(OrbitElem(atom.orbit, tuple(a for _ in atom.names)))
            elif atom.names == ("s1",):
                chunks[atom.orbit] = chunks[atom.orbit] & avoid if atom.orbit in chunks else avoid
            else:
                raise RepresentationOverflow(
                    f"target {atom.orbit}{atom.names} over a cofinite chunk is not representable")
        else:
            # ⋃_b (O ∖ E(b)) = O ∖ (the tuples of E not mentioning b)
            kept = frozenset(tuple(a for _ in t) for t in atom.excluded if "s1" not in t)
            chunks[atom.orbit] = chunks[atom.orbit] & kept if atom.orbit in chunks else kept
    return set_union(out, make_set(explicit, chunks, aut.arities))


def set_step(aut: NomAut, u: FinSuppSet, a: int) -> FinSuppSet:
    out = EMPTY
    for e in sorted(u.explicit):
        out = set_union(out, elem_step(aut, e, a))
    for o, exc in sorted(u.cofinite, key=lambda c: c[0]):
        out = set_union(out, _chunk_step(aut, o, exc, a))
    return out


def set_output(aut: NomAut, u: FinSuppSet) -> bool:
    return any(aut.output[e.orbit] for e in u.explicit) or any(aut.output[o] for o, _ in u.cofinite)


def run_word(aut: NomAut, u: FinSuppSet, word: Sequence[int]) -> bool:
    for a in word:
        u = set_step(aut, u, a)
    return set_output(aut, u)


def relevant_letters(u: FinSuppSet, v: FinSuppSet, extra: Iterable[int] = ()) -> list:
    names = set(u.support()) | set(v.support()) | set(extra)
    return sorted(names) + fresh_names(names, 1)


# --- canonical orbit representatives ------------------------------------------------

MAX_ORDERINGS = 720


def canonical_pair(u: FinSuppSet, v: FinSuppSet) -> tuple:
    """Rename the pair's support to 0..k-1, choosing the least renaming found.

    All k! orderings are tried up to MAX_ORDERINGS; beyond that a single
    sorted renaming is used.  Equal results always mean the same orbit, so a
    non-minimal choice only costs duplicate representatives.
    """
    names = sorted(u.support() | v.support())
    if len(names) <= 6:
        orders = itertools.permutations(names)
    else:
        orders = [tuple(names)]
    best = None
    for order in orders:
        m = {n: i for i, n in enumerate(order)}
        cu, cv = apply_perm(m.__getitem__, u), apply_perm(m.__getitem__, v)
        key = (cu.sort_key(), cv.sort_key())
        if best is None or key < best[0]:
            best = (key, cu, cv)
    if best is None:
        return u, v
    return best[1], best[2]


@dataclass(frozen=True)
class NomPair:
    """A pair of sets; equality is up to renaming, the concrete pair rides along."""

    left: FinSuppSet
    right: FinSuppSet
    concrete: tuple = field(default=(), compare=False, hash=False)

    @classmethod
    def of(cls, u: FinSuppSet, v: FinSuppSet) -> "NomPair":
        cu, cv = canonical_pair(u, v)
        return cls(cu, cv, (u, v))

    def __iter__(self):
        return iter((self.left, self.right))

    def sides(self) -> tuple:
        return self.concrete or (self.left, self.right)


# --- equivariant congruence ---------------------------------------------------------

MAX_INSTANCES = 5_000


def _instances(pairs: Sequence[tuple], names: Sequence[int], limit: int = MAX_INSTANCES):
    """π·(X, Y) for π injective from supp(X, Y) into ``names``.

    Pairs with small supports come first; enumeration stops after ``limit``
    instances, which keeps membership sound but may lose completeness.
    """
    count = 0
    order = sorted(range(len(pairs)), key=lambda i: len(pairs[i][0].support() | pairs[i][1].support()))
    for i in order:
        x, y = pairs[i]
        supp = sorted(x.support() | y.support())
        for image in itertools.permutations(names, len(supp)):
            count += 1
            if count > limit:
                return
            m = dict(zip(supp, image))
            yield i, tuple(sorted(m.items())), apply_perm(m.__getitem__, x), apply_perm(m.__getitem__, y)


def _orbits_fit(src: FinSuppSet, u: FinSuppSet) -> bool:
    """Cheap necessary condition for some renaming of src to be included in u."""
    have = {e.orbit for e in u.explicit} | {o for o, _ in u.cofinite}
    chunked = {o for o, _ in u.cofinite}
    return {e.orbit for e in src.explicit} <= have and {o for o, _ in src.cofinite} <= chunked


def _saturate(start: FinSuppSet, rules: list, record: bool):
    u = start
    steps = []
    changed = True
    while changed:
        changed = False
        for i, pi, x, y in rules:
            for direction, src, dst in (("lr", x, y), ("rl", y, x)):
                if not _orbits_fit(src, u):
                    continue
                if set_subset(src, u) and not set_subset(dst, u):
                    u = set_union(u, dst)
                    steps.append((i, pi, direction))
                    changed = True
    return u, steps


def _rule_names(p: tuple, pairs: Sequence[tuple], k: int) -> list:
    names = set(p[0].support()) | set(p[1].support())
    for x, y in pairs:
        names |= x.support() | y.support()
    return sorted(names) + fresh_names(names, k)


def cgr_witness_equivariant(p: tuple, pairs: Sequence[tuple], k: int = 2) -> Optional[dict]:
    """Rewrite steps showing p ∈ Cgr(R) with R closed under renaming, or None."""
    pairs = [tuple(q) for q in pairs]
    rules = list(_instances(pairs, _rule_names(p, pairs, k)))
    lu, ls = _saturate(p[0], rules, True)
    ru, rs = _saturate(p[1], rules, True)
    if lu != ru:
        return None
    return {"left": ls, "right": rs}


def cgr_membership_equivariant(p: tuple, pairs: Sequence[tuple], k: int = 2) -> bool:
    return cgr_witness_equivariant(tuple(p), pairs, k) is not None


def replay_cgr_equivariant(p: tuple, pairs: Sequence[tuple], witness: Mapping) -> bool:
    """Re-apply recorded steps (pair index, renaming, direction), checking each is enabled."""
    pairs = [tuple(q) for q in pairs]
    finals = []
    for side, start in (("left", p[0]), ("right", p[1])):
        u = start
        for i, pi, direction in witness[side]:
            if not 0 <= i < len(pairs):
                return False
            m = dict(pi)
            x, y = pairs[i]
            supp = x.support() | y.support()
            if set(m) != set(supp) or len(set(m.values())) != len(m):
                return False
            x, y = apply_perm(m.__getitem__, x), apply_perm(m.__getitem__, y)
            src, dst = (x, y) if direction == "lr" else (y, x)
            if not set_subset(src, u):
                return False
            u = set_union(u, dst)
        finals.append(u)
    return finals[0] == finals[1]


def congruence_closure(aut: NomAut, k: Optional[int] = None) -> Closure:
    k = aut.max_arity + 1 if k is None else k

    def explain(p, pool):
        return cgr_witness_equivariant(tuple(p), [tuple(q) for q in pool], k)
    return Closure("congruence", explain=explain, completeness=SOUND_INCOMPLETE,
                   compat_evidence=THEOREM_CITED)


def check_nom_equivalence(aut: NomAut, u: FinSuppSet, v: FinSuppSet, technique: str = "congruence",
                          budget: int = DEFAULT_BUDGET, hints: Sequence[tuple] = (),
                          fresh_budget: Optional[int] = None) -> CheckOutcome:
    """Language equivalence of two determinised states over orbit representatives.

    ``hints`` are extra pairs seeded after the query; they become proof
    obligations like any other pair, so they can only help the search.
    """
    if technique == "congruence":
        closure = congruence_closure(aut, fresh_budget)
    elif technique == "none":
        closure = Closure("none", member_fn=lambda p, pool: p in pool, compat_evidence=THEOREM_CITED)
    else:
        raise NominalError(f"unknown nominal technique {technique!r}")

    def expand(p):
        x, y = p.sides()
        ox, oy = set_output(aut, x), set_output(aut, y)
        if ox != oy:
            return Expansion(False, reason={"outputs": (ox, oy), "sets": (x, y)})
        return Expansion(True, tuple((a, NomPair.of(set_step(aut, x, a), set_step(aut, y, a)))
                                     for a in relevant_letters(x, y)))

    init = [NomPair.of(u, v)] + [NomPair.of(x, y) for x, y in hints]
    outcome = run_upto_check(init, expand, closure, budget=budget)
    if outcome.verdict is Verdict.REFUTED:
        word = refutation_word(outcome)
        ok = run_word(aut, u, word) != run_word(aut, v, word)
        outcome = replace(outcome, oracle={"counterexample_validated": ok, "word": word})
    return outcome


def refutation_word(outcome: CheckOutcome) -> tuple:
    """The concrete word leading from the query to the failing pair.

    Hint pairs start their own words; a refuted hint says nothing about the
    query, which callers can detect as a failed validation.
    """
    return tuple(outcome.counterexample["word"])


# --- rendering ------------------------------------------------------------------------

def render_elem(aut: Optional[NomAut], e: OrbitElem) -> str:
    if not e.support:
        return e.orbit
    primed = e.orbit.endswith("'")
    if len(e.support) == 1 and aut is not None and _single_orbit_per_arity(aut, e.orbit):
        return name_str(e.support[0], primed)
    return f"{e.orbit}(" + ",".join(name_str(n) for n in e.support) + ")"


def _single_orbit_per_arity(aut: NomAut, orbit: str) -> bool:
    # a bare name is unambiguous only for orbits named like the name set, e.g. A and A'
    return orbit.rstrip("'") == "A"


def render_set(aut: Optional[NomAut], u: FinSuppSet) -> str:
    """Human-readable form, e.g. ``{a} ∪ (A' ∖ {a'})``."""
    parts = []
    if u.explicit:
        parts.append("{" + ", ".join(render_elem(aut, e) for e in sorted(u.explicit)) + "}")
    for o, exc in sorted(u.cofinite, key=lambda c: c[0]):
        if exc:
            ex = ", ".join(render_elem(aut, OrbitElem(o, t)) for t in sorted(exc))
            parts.append(f"({o} ∖ {{{ex}}})")
        else:
            parts.append(o)
    return " ∪ ".join(parts) if parts else "∅"


def render_set_expr(u: FinSuppSet) -> str:
    """The input grammar: ``elem(A, a) + orbit-minus(A', (a))``."""
    parts = []
    for e in sorted(u.explicit):
        parts.append(f"elem({e.orbit}" + "".join(f", {name_str(n)}" for n in e.support) + ")")
    for o, exc in sorted(u.cofinite, key=lambda c: c[0]):
        ex = "".join(", (" + ", ".join(name_str(n) for n in t) + ")" for t in sorted(exc))
        parts.append(f"orbit-minus({o}{ex})")
    return " + ".join(parts) if parts else "empty"


# --- the example automaton --------------------------------------------------------------

def duplicate_letter_automaton() -> NomAut:
    """Two states, * and ⋆, both accepting words in which some letter repeats.

    Orbits: star0 (*), A, star1 (⋆), A' and top.
    """
    return NomAut(
        orbits=(("star0", 0), ("A", 1), ("star1", 0), ("A'", 1), ("top", 0)),
        output={"star0": False, "A": False, "star1": False, "A'": False, "top": True},
        rules={
            "star0": {"fresh": (Elem("star0"), Elem("A", ("l",)))},
            "A": {"supp-1": (Elem("top"),), "fresh": (Elem("A", ("s1",)),)},
            "star1": {"fresh": (Elem("A", ("l",)), OrbitMinus("A'", (("l",),)))},
            "A'": {"supp-1": (Elem("A", ("s1",)),), "fresh": (Elem("A'", ("s1",)),)},
            "top": {"fresh": (Elem("top"),)},
        })


def spanning_hints() -> list:
    """The spanning pairs besides the query: ({a},{a,a'}), ({⊤},{a,⊤}), ({*}, A')."""
    a = 0
    return [
        (make_set([OrbitElem("A", (a,))]), make_set([OrbitElem("A", (a,)), OrbitElem("A'", (a,))])),
        (make_set([OrbitElem("top")]), make_set([OrbitElem("A", (a,)), OrbitElem("top")])),
        (make_set([OrbitElem("star0")]), make_set(chunks={"A'": ()})),
    ]
