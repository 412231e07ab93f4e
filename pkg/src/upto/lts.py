"""Finite labelled transition systems over integer states.

Used for explored fragments of GSOS processes and for the small fixed systems
the audit harness enumerates over.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, Hashable, Iterable, Sequence

from .lattice import Carrier, Pred, Rel, StepFn

TAU = "tau"


@dataclass(frozen=True)
class FiniteLts:
    size: int
    transitions: frozenset  # of (src, label, dst)
    labels: tuple = ()
    names: tuple = ()

    def __post_init__(self):
        trans = frozenset(self.transitions)
        for s, _, t in trans:
            if not (0 <= s < self.size and 0 <= t < self.size):
                raise ValueError(f"transition {s}->{t} outside {self.size} states")
        object.__setattr__(self, "transitions", trans)
        if not self.labels:
            object.__setattr__(self, "labels", tuple(sorted({l for _, l, _ in trans})))
        succ = [[] for _ in range(self.size)]
        for s, l, t in sorted(trans, key=repr):
            succ[s].append((l, t))
        object.__setattr__(self, "_succ", tuple(tuple(x) for x in succ))

    @property
    def carrier(self) -> Carrier:
        return Carrier(self.size, self.names or None)

    def succ(self, x: int) -> tuple:
        return self._succ[x]

    def moves(self, x: int, label) -> list:
        return [t for l, t in self._succ[x] if l == label]


def refine(n: int, initial: Callable[[int], Hashable],
           signature: Callable[[int, Sequence[int]], Hashable]) -> list:
    """Coarsest stable partition: returns a block index per state.

    Blocks are numbered in order of first occurrence so results are
    deterministic.  ``signature(x, block)`` must depend only on block ids of
    successors.
    """
    block = _renumber([initial(x) for x in range(n)])
    while True:
        new = _renumber([(block[x], signature(x, block)) for x in range(n)])
        if len(set(new)) == len(set(block)):
            return new
        block = new


def _renumber(keys: list) -> list:
    ids: dict = {}
    return [ids.setdefault(k, len(ids)) for k in keys]


def strong_bisimilarity(lts: FiniteLts) -> list:
    def sig(x, block):
        return frozenset((l, block[t]) for l, t in lts.succ(x))
    return refine(lts.size, lambda x: 0, sig)


def saturate(lts: FiniteLts) -> FiniteLts:
    """Weak transitions: x =tau=> x' iff x ->tau* x'; x =l=> x' iff ->tau* ->l ->tau*."""
    tau_closure = []
    for x in range(lts.size):
        seen = {x}
        queue = deque([x])
        while queue:
            y = queue.popleft()
            for t in lts.moves(y, TAU):
                if t not in seen:
                    seen.add(t)
                    queue.append(t)
        tau_closure.append(seen)
    weak = set()
    for x in range(lts.size):
        for y in tau_closure[x]:
            weak.add((x, TAU, y))
            for l, t in lts.succ(y):
                if l != TAU:
                    for z in tau_closure[t]:
                        weak.add((x, l, z))
    return FiniteLts(lts.size, frozenset(weak), lts.labels, lts.names)


def weak_bisimilarity(lts: FiniteLts) -> list:
    return strong_bisimilarity(saturate(lts))


def kernel(quotient: Sequence[int], carrier: Carrier) -> Rel:
    return Rel(carrier, frozenset((x, y) for x in range(len(quotient)) for y in range(len(quotient))
                                  if quotient[x] == quotient[y]))


# --- step functions whose greatest fixpoints are the usual behavioural relations

def bisimulation_step(lts: FiniteLts) -> StepFn:
    """xi^* o Rel(F) for F = P(L x -): the Egli-Milner step."""

    def apply(r: Rel) -> Rel:
        out = set()
        for x in range(lts.size):
            for y in range(lts.size):
                if _forth(lts, lts, x, y, r.pairs) and _forth(lts, lts, y, x, {(b, a) for a, b in r.pairs}):
                    out.add((x, y))
        return Rel(r.carrier, frozenset(out))

    return StepFn(lts.carrier, apply, "bisimulation")


def simulation_step(lts: FiniteLts) -> StepFn:
    def apply(r: Rel) -> Rel:
        return Rel(r.carrier, frozenset((x, y) for x in range(lts.size) for y in range(lts.size)
                                        if _forth(lts, lts, x, y, r.pairs)))
    return StepFn(lts.carrier, apply, "simulation")


def weak_bisimulation_step(lts: FiniteLts, weak: FiniteLts | None = None) -> StepFn:
    """Strong moves on one side answered by weak moves on the other, both ways."""
    weak = weak or saturate(lts)

    def apply(r: Rel) -> Rel:
        inv = {(b, a) for a, b in r.pairs}
        out = set()
        for x in range(lts.size):
            for y in range(lts.size):
                if _forth(lts, weak, x, y, r.pairs) and _forth(lts, weak, y, x, inv):
                    out.add((x, y))
        return Rel(r.carrier, frozenset(out))

    return StepFn(lts.carrier, apply, "weak-bisimulation")


def divergence_step(lts: FiniteLts) -> StepFn:
    def apply(p: Pred) -> Pred:
        return Pred(p.carrier, frozenset(x for x in range(lts.size)
                                         if any(t in p.members for t in lts.moves(x, TAU))))
    return StepFn(lts.carrier, apply, "divergence", kind="pred")


def _forth(strong: FiniteLts, answer: FiniteLts, x: int, y: int, pairs) -> bool:
    for l, x2 in strong.succ(x):
        if not any((x2, y2) in pairs for y2 in answer.moves(y, l)):
            return False
    return True


def similarity(lts: FiniteLts) -> Rel:
    from .lattice import gfp
    return gfp(simulation_step(lts))


def reachable(lts: FiniteLts, roots: Iterable[int]) -> set:
    seen = set(roots)
    queue = deque(seen)
    while queue:
        x = queue.popleft()
        for _, t in lts.succ(x):
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return seen
