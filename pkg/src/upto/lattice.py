"""Finite lattices of relations and predicates, closures, and the up-to checker.

Everything here works in the fibre above a finite carrier: a relation is a set
of index pairs, a predicate a set of indices.  Step functions are monotone maps
on these lattices; closures are the up-to techniques that get composed and
plugged into :func:`run_upto_check`.
"""
from __future__ import annotations

import enum
import itertools
import random
from collections import deque
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Iterable, Iterator, Optional, Sequence

# compat_evidence tags
THEOREM_CITED = "theorem-cited"
AUDIT_VERIFIED = "audit-verified"
UNVERIFIED = "unverified"

COMPLETE = "complete"
SOUND_INCOMPLETE = "sound-incomplete"

DEFAULT_BUDGET = 100_000


class CarrierMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Carrier:
    size: int
    labels: Optional[tuple] = None

    def __post_init__(self):
        if self.size < 0:
            raise ValueError("carrier size must be non-negative")
        if self.labels is not None and len(self.labels) != self.size:
            raise ValueError("one label per element expected")

    def label(self, i: int) -> str:
        return str(self.labels[i]) if self.labels is not None else str(i)

    def __iter__(self) -> Iterator[int]:
        return iter(range(self.size))


@dataclass(frozen=True)
class Rel:
    carrier: Carrier
    pairs: frozenset = frozenset()

    def __post_init__(self):
        n = self.carrier.size
        pairs = frozenset(self.pairs)
        for x, y in pairs:
            if not (0 <= x < n and 0 <= y < n):
                raise ValueError(f"pair {(x, y)} outside carrier of size {n}")
        object.__setattr__(self, "pairs", pairs)

    @classmethod
    def empty(cls, carrier: Carrier) -> "Rel":
        return cls(carrier, frozenset())

    @classmethod
    def full(cls, carrier: Carrier) -> "Rel":
        return cls(carrier, frozenset(itertools.product(range(carrier.size), repeat=2)))

    def __contains__(self, pair) -> bool:
        return pair in self.pairs

    def __iter__(self):
        return iter(sorted(self.pairs))

    def __len__(self) -> int:
        return len(self.pairs)

    def __le__(self, other: "Rel") -> bool:
        _same(self, other)
        return self.pairs <= other.pairs

    def __or__(self, other: "Rel") -> "Rel":
        _same(self, other)
        return Rel(self.carrier, self.pairs | other.pairs)

    def __and__(self, other: "Rel") -> "Rel":
        _same(self, other)
        return Rel(self.carrier, self.pairs & other.pairs)

    def with_pairs(self, pairs: Iterable) -> "Rel":
        return Rel(self.carrier, frozenset(pairs))


@dataclass(frozen=True)
class Pred:
    carrier: Carrier
    members: frozenset = frozenset()

    def __post_init__(self):
        members = frozenset(self.members)
        for x in members:
            if not 0 <= x < self.carrier.size:
                raise ValueError(f"element {x} outside carrier of size {self.carrier.size}")
        object.__setattr__(self, "members", members)

    @classmethod
    def empty(cls, carrier: Carrier) -> "Pred":
        return cls(carrier, frozenset())

    @classmethod
    def full(cls, carrier: Carrier) -> "Pred":
        return cls(carrier, frozenset(range(carrier.size)))

    def __contains__(self, x) -> bool:
        return x in self.members

    def __iter__(self):
        return iter(sorted(self.members))

    def __len__(self) -> int:
        return len(self.members)

    def __le__(self, other: "Pred") -> bool:
        _same(self, other)
        return self.members <= other.members

    def __or__(self, other: "Pred") -> "Pred":
        _same(self, other)
        return Pred(self.carrier, self.members | other.members)

    def __and__(self, other: "Pred") -> "Pred":
        _same(self, other)
        return Pred(self.carrier, self.members & other.members)


def _same(a, b) -> None:
    if a.carrier != b.carrier:
        raise CarrierMismatch(f"carriers differ: {a.carrier.size} vs {b.carrier.size}")


def _elements(x) -> frozenset:
    return x.pairs if isinstance(x, Rel) else x.members


def _rebuild(like, elems):
    return Rel(like.carrier, elems) if isinstance(like, Rel) else Pred(like.carrier, elems)


def all_relations(carrier: Carrier) -> Iterator[Rel]:
    """Every relation on the carrier, in a fixed order (2^(n^2) of them)."""
    cells = list(itertools.product(range(carrier.size), repeat=2))
    for mask in range(1 << len(cells)):
        yield Rel(carrier, frozenset(c for i, c in enumerate(cells) if mask >> i & 1))


def all_predicates(carrier: Carrier) -> Iterator[Pred]:
    for mask in range(1 << carrier.size):
        yield Pred(carrier, frozenset(i for i in range(carrier.size) if mask >> i & 1))


# --- relational algebra -----------------------------------------------------

def rel_compose(r: Rel, s: Rel) -> Rel:
    _same(r, s)
    succ: dict[int, set] = {}
    for y, z in s.pairs:
        succ.setdefault(y, set()).add(z)
    return Rel(r.carrier, frozenset((x, z) for x, y in r.pairs for z in succ.get(y, ())))


def sym(r: Rel) -> Rel:
    return Rel(r.carrier, frozenset((y, x) for x, y in r.pairs))


def rfl(carrier: Carrier) -> Rel:
    return Rel(carrier, frozenset((x, x) for x in range(carrier.size)))


def _check_map(f: Sequence[int], source: Carrier, target: Carrier) -> None:
    if len(f) != source.size:
        raise ValueError("index map must be total on its source")
    for y in f:
        if not 0 <= y < target.size:
            raise ValueError(f"index map value {y} out of range for target size {target.size}")


def direct_image(f: Sequence[int], r, target: Carrier):
    """Push a relation (or predicate) forward along ``f``."""
    _check_map(f, r.carrier, target)
    if isinstance(r, Rel):
        return Rel(target, frozenset((f[x], f[y]) for x, y in r.pairs))
    return Pred(target, frozenset(f[x] for x in r.members))


def inverse_image(f: Sequence[int], s, source: Carrier):
    """Pull back along ``f``: pairs whose images are related by ``s``."""
    _check_map(f, source, s.carrier)
    if isinstance(s, Rel):
        by_image: dict[int, list] = {}
        for x, fx in enumerate(f):
            by_image.setdefault(fx, []).append(x)
        return Rel(source, frozenset(
            (x, x2) for u, v in s.pairs for x in by_image.get(u, ()) for x2 in by_image.get(v, ())))
    return Pred(source, frozenset(x for x in range(source.size) if f[x] in s.members))


# --- step functions and fixpoints -------------------------------------------

@dataclass(frozen=True)
class StepFn:
    """A monotone map on Rel (kind ``"rel"``) or Pred (kind ``"pred"``) over one carrier."""

    carrier: Carrier
    apply: Callable[[Any], Any]
    description: str = ""
    kind: str = "rel"

    def __call__(self, x):
        if x.carrier != self.carrier:
            raise CarrierMismatch("argument lives over another carrier")
        out = self.apply(x)
        if out.carrier != self.carrier:
            raise CarrierMismatch(f"step {self.description!r} changed the carrier")
        return out

    def top(self):
        return Rel.full(self.carrier) if self.kind == "rel" else Pred.full(self.carrier)

    def bottom(self):
        return Rel.empty(self.carrier) if self.kind == "rel" else Pred.empty(self.carrier)

    def sample(self, rng: random.Random):
        n = self.carrier.size
        if self.kind == "rel":
            cells = list(itertools.product(range(n), repeat=2))
            return Rel(self.carrier, frozenset(c for c in cells if rng.random() < 0.5))
        return Pred(self.carrier, frozenset(i for i in range(n) if rng.random() < 0.5))

    def check_monotone(self, samples: int = 200, seed: int = 0) -> Optional[tuple]:
        """Sampled monotonicity check; returns a violating (R, S) with R <= S, or None."""
        rng = random.Random(seed)
        for _ in range(samples):
            small = self.sample(rng)
            big = _rebuild(small, _elements(small) | _elements(self.sample(rng)))
            if not _elements(self(small)) <= _elements(self(big)):
                return small, big
        return None


def kleene_iterates(b: StepFn) -> list:
    """The descending chain top, b(top), b(b(top)), ... up to stabilisation."""
    chain = [b.top()]
    while True:
        nxt = b(chain[-1])
        if nxt == chain[-1]:
            return chain
        chain.append(nxt)


def gfp(b: StepFn):
    """Greatest fixpoint by descending iteration from the top element.

    Terminates for monotone ``b`` since every strict descent removes at least
    one element of a finite lattice.
    """
    current = b.top()
    while True:
        nxt = b(current)
        if nxt == current:
            return current
        current = nxt


def lfp(b: StepFn):
    current = b.bottom()
    while True:
        nxt = b(current)
        if nxt == current:
            return current
        current = nxt


def is_invariant(r, b: StepFn) -> bool:
    if r.carrier != b.carrier:
        raise CarrierMismatch("relation and step function live over different carriers")
    return _elements(r) <= _elements(b(r))


def is_invariant_upto(r, b: StepFn, a: "Closure") -> bool:
    if r.carrier != b.carrier:
        raise CarrierMismatch("relation and step function live over different carriers")
    return _elements(r) <= _elements(b(a.apply(r)))


# --- closures -----------------------------------------------------------------

@dataclass(frozen=True)
class Closure:
    """A named up-to technique.

    ``apply`` maps a relation to its closure when the carrier is finite.
    ``member(pair, pairs)`` decides membership of one pair in the closure of a
    collection of pairs; closures over infinite state spaces (determinised
    automata, process terms) only provide ``member``.  ``explain`` optionally
    returns a checkable witness for a membership, or None.
    """

    name: str
    apply: Optional[Callable[[Any], Any]] = None
    member_fn: Optional[Callable[[Any, Any], bool]] = None
    completeness: str = COMPLETE
    compat_evidence: str = UNVERIFIED
    explain: Optional[Callable[[Any, Any], Any]] = None
    carrier: Optional[Carrier] = None
    sound: bool = True

    def member(self, pair, pairs) -> bool:
        if self.member_fn is not None:
            return bool(self.member_fn(pair, pairs))
        if self.explain is not None:
            return self.explain(pair, pairs) is not None
        if self.apply is None:
            raise TypeError(f"closure {self.name} has neither apply nor a membership oracle")
        if not isinstance(pairs, Rel):
            if self.carrier is None:
                raise TypeError(f"closure {self.name} needs a carrier to lift raw pairs")
            pairs = Rel(self.carrier, frozenset(pairs))
        return pair in self.apply(pairs)

    def with_evidence(self, evidence: str) -> "Closure":
        return replace(self, compat_evidence=evidence)


def _evidence(closures: Sequence[Closure]) -> str:
    return THEOREM_CITED if all(c.compat_evidence == THEOREM_CITED for c in closures) else UNVERIFIED


def identity_closure() -> Closure:
    return Closure("Id", apply=lambda r: r, member_fn=lambda p, rs: p in rs,
                   compat_evidence=THEOREM_CITED)


def rfl_closure() -> Closure:
    """Constant to the diagonal."""
    return Closure("Rfl", apply=lambda r: rfl(r.carrier), member_fn=lambda p, rs: p[0] == p[1],
                   compat_evidence=THEOREM_CITED)


def sym_closure() -> Closure:
    return Closure("Sym", apply=sym, member_fn=lambda p, rs: (p[1], p[0]) in rs,
                   compat_evidence=THEOREM_CITED)


def compose_self_closure() -> Closure:
    """R -> R (x) R; its omega-iterate is transitive closure."""
    return Closure("Cmp", apply=lambda r: rel_compose(r, r), compat_evidence=THEOREM_CITED)


def constant_closure(s: Rel, name: str = "Const") -> Closure:
    return Closure(name, apply=lambda r: s, carrier=s.carrier)


def compose_closure(a1: Closure, a2: Closure) -> Closure:
    """``a1`` after ``a2``."""
    if a1.apply is None or a2.apply is None:
        raise TypeError("composition needs closures with apply")
    return Closure(f"{a1.name}∘{a2.name}", apply=lambda r: a1.apply(a2.apply(r)),
                   compat_evidence=_evidence([a1, a2]), carrier=a1.carrier or a2.carrier,
                   sound=a1.sound and a2.sound)


def join_closure(closures: Sequence[Closure]) -> Closure:
    closures = list(closures)
    if not closures:
        raise ValueError("join of no closures")

    def apply(r):
        out = set()
        for c in closures:
            out |= _elements(c.apply(r))
        return _rebuild(r, out)

    return Closure("(" + "+".join(c.name for c in closures) + ")", apply=apply,
                   compat_evidence=_evidence(closures),
                   carrier=next((c.carrier for c in closures if c.carrier), None),
                   sound=all(c.sound for c in closures))


def iterate_omega(a: Closure) -> Closure:
    """Least fixpoint of S -> R ∪ A(S) above R, i.e. the union of all iterates."""

    def apply(r):
        current = r
        while True:
            nxt = _rebuild(r, _elements(current) | _elements(a.apply(current)))
            if nxt == current:
                return current
            current = nxt

    return Closure(f"{a.name}^ω", apply=apply, compat_evidence=_evidence([a]), carrier=a.carrier,
                   sound=a.sound)


def trn_closure() -> Closure:
    c = iterate_omega(compose_self_closure())
    return replace(c, name="Trn")


def eqv_closure() -> Closure:
    c = compose_closure(trn_closure(), join_closure([identity_closure(), sym_closure(), rfl_closure()]))
    return replace(c, name="Eqv")


def behavioural_closure(quotient: Sequence[int], name: str = "Bhv") -> Closure:
    """R -> ~R~ where ~ is the kernel of ``quotient`` (a coalgebra morphism's kernel)."""
    quotient = tuple(quotient)
    classes = Carrier(max(quotient) + 1 if quotient else 0)

    def apply(r):
        return inverse_image(quotient, direct_image(quotient, r, classes), r.carrier)

    def member(p, rs):
        if isinstance(p, tuple) and len(p) == 2 and not isinstance(rs, Pred):
            images = {(quotient[x], quotient[y]) for x, y in rs}
            return (quotient[p[0]], quotient[p[1]]) in images
        images = {quotient[x] for x in rs}
        return quotient[p] in images

    return Closure(name, apply=apply, member_fn=member, compat_evidence=THEOREM_CITED,
                   carrier=Carrier(len(quotient)))


def self_closure(s: Rel, name: str = "Slf") -> Closure:
    """R -> S (x) R (x) S for a fixed relation S (typically the computed gfp)."""
    return Closure(name, apply=lambda r: rel_compose(rel_compose(s, r), s), carrier=s.carrier)


# --- generic worklist ---------------------------------------------------------

class Verdict(str, enum.Enum):
    PROVED = "proved"
    REFUTED = "refuted"
    INCONCLUSIVE = "inconclusive"
    UNSOUND_ACCEPT = "accepted-by-unsound-technique"


@dataclass(frozen=True)
class Expansion:
    """Result of locally checking one pair: pass/fail plus successor obligations.

    ``successors`` is a sequence of ``(label, pair)``.  On failure ``reason``
    says what broke (e.g. the differing outputs, or the unmatched transition).
    """

    ok: bool
    successors: tuple = ()
    reason: Any = None


@dataclass(frozen=True)
class TraceEntry:
    pair: Any
    action: str  # "added" | "skipped" | "refuted"
    word: tuple = ()


@dataclass(frozen=True)
class CheckOutcome:
    verdict: Verdict
    technique: str
    relation: tuple = ()
    trace: tuple = ()
    counterexample: Any = None
    justifications: tuple = ()
    stats: dict = field(default_factory=dict)
    oracle: dict = field(default_factory=dict)

    @property
    def proved(self) -> bool:
        return self.verdict is Verdict.PROVED

    @property
    def added(self) -> int:
        return len(self.relation)

    @property
    def popped(self) -> int:
        return len(self.trace)


class _Pool:
    """R ∪ todo as an ordered, set-backed view handed to membership oracles."""

    __slots__ = ("items", "index")

    def __init__(self, items):
        self.items = list(items)
        self.index = set(self.items)

    def __contains__(self, p):
        return p in self.index

    def __iter__(self):
        return iter(self.items)

    def __len__(self):
        return len(self.items)


def run_upto_check(init: Iterable, expand: Callable, closure: Closure,
                   budget: int = DEFAULT_BUDGET, justify: bool = True) -> CheckOutcome:
    """FIFO worklist search for an invariant up to ``closure`` containing ``init``.

    ``expand(pair)`` returns an :class:`Expansion`; it may also accept a second
    argument ``covered`` (a predicate deciding membership in the closure of the
    current R ∪ todo), used by games with an existential choice.  A popped pair
    is checked locally first, so a failing pair refutes even when it is covered;
    a covered pair that passes is skipped, otherwise it joins R with its
    successors queued.  Unsound closures skip covered pairs without the local
    check.  The budget bounds the number of popped pairs.

    On success the certificate is R; every successor of every pair in R is
    re-justified against R alone, so the certificate replays without todo.
    """
    todo: deque = deque()
    queued: set = set()
    for p in init:
        if p not in queued:
            queued.add(p)
            todo.append((p, ()))
    relation: list = []
    rel_set: set = set()
    trace: list = []
    successors_of: dict = {}
    wants_cover = _accepts_cover(expand)

    while todo:
        if len(trace) >= budget:
            return CheckOutcome(Verdict.INCONCLUSIVE, closure.name, tuple(relation), tuple(trace),
                                stats={"budget": budget, "queued": len(todo)})
        p, word = todo.popleft()
        if p in rel_set:
            trace.append(TraceEntry(p, "skipped", word))
            continue
        pool = _Pool(relation + [q for q, _ in todo])
        skip = closure.member(p, pool)
        if skip and not closure.sound:
            # unsound techniques skip blindly; that is the behaviour under audit
            trace.append(TraceEntry(p, "skipped", word))
            continue
        if wants_cover:
            def covered(q, _pool=pool, _p=p):
                if q == _p or q in _pool:
                    return True
                return closure.member(q, _Pool(list(_pool) + [_p]))
            exp = expand(p, covered)
        else:
            exp = expand(p)
        if not exp.ok:
            trace.append(TraceEntry(p, "refuted", word))
            return CheckOutcome(Verdict.REFUTED, closure.name, tuple(relation), tuple(trace),
                                counterexample={"pair": p, "word": word, "reason": exp.reason})
        if skip:
            trace.append(TraceEntry(p, "skipped", word))
            continue
        trace.append(TraceEntry(p, "added", word))
        relation.append(p)
        rel_set.add(p)
        successors_of[p] = exp.successors
        for label, q in exp.successors:
            todo.append((q, word + (label,)))

    justifications = ()
    if justify:
        initial = [p for p in dict.fromkeys(init) if p not in rel_set]
        justifications = _justify(relation, successors_of, closure, initial)
    verdict = Verdict.PROVED if closure.sound else Verdict.UNSOUND_ACCEPT
    return CheckOutcome(verdict, closure.name, tuple(relation), tuple(trace),
                        justifications=justifications)


def _accepts_cover(fn) -> bool:
    import inspect
    try:
        params = [p for p in inspect.signature(fn).parameters.values()
                  if p.kind in (p.POSITIONAL_ONLY, p.POSITIONAL_OR_KEYWORD)]
    except (TypeError, ValueError):
        return False
    return len(params) >= 2


def _justify(relation: list, successors_of: dict, closure: Closure, initial=()) -> tuple:
    """Entries ``(i, label, q, reason)``: q is the ``label``-successor of relation[i].

    Initial pairs that were never added appear with ``i = -1`` and label None.
    """
    pool = _Pool(relation)
    out = []
    obligations = [(-1, None, q) for q in initial]
    obligations += [(i, label, q) for i, p in enumerate(relation) for label, q in successors_of[p]]
    for i, label, q in obligations:
        if q in pool:
            out.append((i, label, q, ("in-relation", relation.index(q))))
            continue
        witness = closure.explain(q, pool) if closure.explain is not None else None
        if witness is None and not closure.member(q, pool):
            raise AssertionError(
                f"closure {closure.name} is not idempotent on this run: {q!r} "
                "was covered at skip time but not by the final relation")
        out.append((i, label, q, ("closure", witness)))
    return tuple(out)
