"""Positive GSOS specifications, process terms, and the checkers built on them.

Terms are trees over a signature.  Two families of operators are implicit:
``l.`` prefixes (one per label, rule ``l.x -l-> x``) and the nullary ``0``.
Process constants are nullary symbols whose transitions come from axioms.

Labels are plain names, co-names ``~a`` and the silent ``tau``.  Rule label
patterns may use variables ``$l``; ``~$l`` is the complement of whatever
``$l`` binds (tau has no complement, so such instances are dropped).
"""
from __future__ import annotations

import itertools
from collections import Counter, deque
from dataclasses import dataclass, field, replace
from typing import Iterable, Optional, Sequence, Union

from .lattice import (SOUND_INCOMPLETE, THEOREM_CITED, CheckOutcome, Closure,
                      Expansion, Verdict, run_upto_check, DEFAULT_BUDGET)
from .lts import TAU, FiniteLts, similarity, strong_bisimilarity, weak_bisimilarity


class GsosError(ValueError):
    pass


class BoundExceeded(RuntimeError):
    """Exploration hit its state bound; distinct from 'no transition'."""


@dataclass(frozen=True, order=True)
class Term:
    op: str
    args: tuple = ()

    def __str__(self) -> str:
        return render_term(self)


@dataclass(frozen=True, order=True)
class Var:
    name: str  # "x1", "y2", ...

    def __str__(self) -> str:
        return self.name


NIL = Term("0")
PAR = "|"
SUM = "+"


def prefix(label: str, t: Term) -> Term:
    return Term(f"{label}.", (t,))


def par(*ts: Term) -> Term:
    out = ts[0]
    for t in ts[1:]:
        out = Term(PAR, (out, t))
    return out


def is_prefix(op: str) -> bool:
    return op.endswith(".") and len(op) > 1


def complement(label: str) -> Optional[str]:
    if label == TAU:
        return None
    return label[1:] if label.startswith("~") else "~" + label


@dataclass(frozen=True)
class Premise:
    arg: int  # 0-based argument index
    label: str  # pattern
    target: str  # premise variable name, e.g. "y1"


@dataclass(frozen=True)
class GsosRule:
    op: str
    premises: tuple
    label: str
    target: Union[Term, Var]

    def __post_init__(self):
        bound = {f"x{i + 1}" for i in range(max((p.arg for p in self.premises), default=-1) + 1)}
        bound |= {p.target for p in self.premises}
        for v in _vars(self.target):
            if not (v in bound or v.startswith("x")):
                raise GsosError(f"rule for {self.op}: target variable {v} is not bound")
        label_vars = {p.label.lstrip("~") for p in self.premises if p.label.lstrip("~").startswith("$")}
        if self.label.lstrip("~").startswith("$") and self.label.lstrip("~") not in label_vars:
            raise GsosError(f"rule for {self.op}: conclusion label {self.label} is not bound")


def _vars(t) -> Iterable[str]:
    if isinstance(t, Var):
        yield t.name
    else:
        for a in t.args:
            yield from _vars(a)


@dataclass(frozen=True)
class GsosSpec:
    operators: dict  # name -> arity
    rules: tuple
    axioms: dict = field(default_factory=dict)  # constant -> tuple of (label, Term)

    def __post_init__(self):
        for r in self.rules:
            if r.op not in self.operators:
                raise GsosError(f"rule for undeclared operator {r.op!r}")
            n = self.operators[r.op]
            for p in r.premises:
                if not 0 <= p.arg < n:
                    raise GsosError(f"rule for {r.op}: premise on argument {p.arg + 1} of {n}")
            for v in _vars(r.target):
                if v.startswith("x") and not 0 < int(v[1:]) <= n:
                    raise GsosError(f"rule for {r.op}: {v} out of range")
        for c in self.axioms:
            if c in self.operators and self.operators[c] != 0:
                raise GsosError(f"axiom for non-constant operator {c!r}")

    def rules_for(self, op: str) -> tuple:
        return tuple(r for r in self.rules if r.op == op)

    def arity(self, op: str) -> int:
        if is_prefix(op):
            return 1
        if op in self.operators:
            return self.operators[op]
        if op == "0" or op in self.axioms:
            return 0
        raise GsosError(f"unknown operator {op!r}")

    def check_term(self, t: Term) -> None:
        if self.arity(t.op) != len(t.args):
            raise GsosError(f"operator {t.op} expects {self.arity(t.op)} arguments, got {len(t.args)}")
        for a in t.args:
            self.check_term(a)


def ccs_rules() -> tuple:
    """Parallel composition with synchronisation, and binary choice."""
    x1, x2 = Var("x1"), Var("x2")
    y1, y2 = Var("y1"), Var("y2")
    return (
        GsosRule(PAR, (Premise(0, "$l", "y1"),), "$l", Term(PAR, (y1, x2))),
        GsosRule(PAR, (Premise(1, "$l", "y2"),), "$l", Term(PAR, (x1, y2))),
        GsosRule(PAR, (Premise(0, "$l", "y1"), Premise(1, "~$l", "y2")), TAU, Term(PAR, (y1, y2))),
        GsosRule(SUM, (Premise(0, "$l", "y1"),), "$l", y1),
        GsosRule(SUM, (Premise(1, "$l", "y2"),), "$l", y2),
    )


def ccs_spec(axioms: Optional[dict] = None, with_sum: bool = True) -> GsosSpec:
    ops = {PAR: 2, SUM: 2} if with_sum else {PAR: 2}
    rules = tuple(r for r in ccs_rules() if r.op in ops)
    return GsosSpec(ops, rules, dict(axioms or {}))


# --- transitions -------------------------------------------------------------------

def _match(pattern: str, label: str, env: dict) -> Optional[dict]:
    neg = pattern.startswith("~")
    core = pattern[1:] if neg else pattern
    if core.startswith("$"):
        if core in env:
            want = complement(env[core]) if neg else env[core]
            return env if want == label else None
        value = complement(label) if neg else label
        if value is None:
            return None
        return {**env, core: value}
    return env if pattern == label else None


def _label(pattern: str, env: dict) -> Optional[str]:
    neg = pattern.startswith("~")
    core = pattern[1:] if neg else pattern
    value = env[core] if core.startswith("$") else core
    return complement(value) if neg else value


def _subst(t, args: tuple, ys: dict) -> Term:
    if isinstance(t, Var):
        if t.name.startswith("x"):
            return args[int(t.name[1:]) - 1]
        return ys[t.name]
    return Term(t.op, tuple(_subst(a, args, ys) for a in t.args))


class Lts:
    """Memoised transition store for one spec; append-only."""

    def __init__(self, spec: GsosSpec):
        self.spec = spec
        self._store: dict = {}

    def transitions(self, t: Term) -> tuple:
        hit = self._store.get(t)
        if hit is not None:
            return hit
        out = self._derive(t)
        self._store[t] = out
        return out

    def _derive(self, t: Term) -> tuple:
        spec = self.spec
        if is_prefix(t.op):
            if len(t.args) != 1:
                raise GsosError(f"prefix {t.op} takes one argument")
            return ((t.op[:-1], t.args[0]),)
        if not t.args and t.op not in spec.operators:
            if t.op == "0" or t.op in spec.axioms:
                return tuple(sorted(set(spec.axioms.get(t.op, ()))))
            raise GsosError(f"unknown constant {t.op!r}")
        if t.op not in spec.operators:
            raise GsosError(f"unknown operator {t.op!r}")
        if len(t.args) != spec.operators[t.op]:
            raise GsosError(f"operator {t.op} expects {spec.operators[t.op]} arguments")
        out = set()
        for rule in spec.rules_for(t.op):
            choices = [[(l, u) for l, u in self.transitions(t.args[p.arg])] for p in rule.premises]
            for combo in itertools.product(*choices):
                env: Optional[dict] = {}
                ys = {}
                for p, (l, u) in zip(rule.premises, combo):
                    env = _match(p.label, l, env)
                    if env is None:
                        break
                    ys[p.target] = u
                if env is None:
                    continue
                label = _label(rule.label, env)
                if label is None:
                    continue
                out.add((label, _subst(rule.target, t.args, ys)))
        return tuple(sorted(out))

    def moves(self, t: Term, label: str) -> list:
        return [u for l, u in self.transitions(t) if l == label]

    def tau_closure(self, t: Term, bound: int = 10_000) -> list:
        seen = {t}
        order = [t]
        queue = deque([t])
        while queue:
            u = queue.popleft()
            for v in self.moves(u, TAU):
                if v not in seen:
                    if len(seen) >= bound:
                        raise BoundExceeded(f"tau-closure of {t} exceeds {bound} terms")
                    seen.add(v)
                    order.append(v)
                    queue.append(v)
        return order

    def weak_moves(self, t: Term, label: str, bound: int = 10_000) -> list:
        """All t' with t =label=> t'; ``tau`` includes t itself."""
        if label == TAU:
            return self.tau_closure(t, bound)
        out, seen = [], set()
        for u in self.tau_closure(t, bound):
            for v in self.moves(u, label):
                for w in self.tau_closure(v, bound):
                    if w not in seen:
                        seen.add(w)
                        out.append(w)
        return out

    def explore(self, roots: Iterable[Term], bound: int = 10_000) -> "Fragment":
        """Transition-closed fragment reachable from ``roots``, or BoundExceeded."""
        index: dict = {}
        terms: list = []
        queue = deque()
        for r in roots:
            if r not in index:
                index[r] = len(terms)
                terms.append(r)
                queue.append(r)
        edges = set()
        while queue:
            t = queue.popleft()
            for l, u in self.transitions(t):
                if u not in index:
                    if len(terms) >= bound:
                        raise BoundExceeded(f"fragment exceeds {bound} terms")
                    index[u] = len(terms)
                    terms.append(u)
                    queue.append(u)
                edges.add((index[t], l, index[u]))
        lts = FiniteLts(len(terms), frozenset(edges), names=tuple(render_term(t) for t in terms))
        return Fragment(tuple(terms), index, lts)


@dataclass(frozen=True)
class Fragment:
    terms: tuple
    index: dict
    lts: FiniteLts

    def quotient(self) -> list:
        return strong_bisimilarity(self.lts)

    def bisimilar(self, s: Term, t: Term) -> bool:
        q = strong_bisimilarity(self.lts)
        return q[self.index[s]] == q[self.index[t]]


def derive_transitions(spec: GsosSpec, t: Term) -> tuple:
    return Lts(spec).transitions(t)


# --- AC normal forms and the left context closure ---------------------------------

def ac_factors(t: Term, op: str = PAR) -> list:
    if t.op == op and len(t.args) == 2:
        return ac_factors(t.args[0], op) + ac_factors(t.args[1], op)
    return [t]


def ac_normal_form(t: Term, op: str = PAR) -> tuple:
    """Sorted multiset of the maximal non-``op`` factors, normalised recursively."""
    factors = [_ac_inner(f, op) for f in ac_factors(t, op)]
    return tuple(sorted(factors, key=repr))


def _ac_inner(t: Term, op: str):
    return (t.op, tuple(ac_normal_form(a, op) for a in t.args))


def left_ctx_member(t: Term, pred: Iterable[Term], op: str = PAR) -> bool:
    """Syntactic Ctx^ℓ membership: t ∈ P, or t = t1 | y with t1 ∈ Ctx^ℓ(P)."""
    pred = set(pred)
    while True:
        if t in pred:
            return True
        if t.op == op and len(t.args) == 2:
            t = t.args[0]
        else:
            return False


def bhv_left_ctx_witness(t: Term, pred: Iterable[Term], op: str = PAR) -> Optional[dict]:
    """An element s of P and a term (…(s|y1)…)|yn AC-equal to t, or None.

    This is the AC under-approximation of Bhv∘Ctx^ℓ: AC-equal parallel
    compositions are strongly bisimilar.
    """
    target = Counter(ac_normal_form(t, op))
    for s in pred:
        need = Counter(ac_normal_form(s, op))
        if need - target:
            continue
        spare = target - need
        leftovers = []
        for f in ac_factors(t, op):
            key = _ac_inner(f, op)
            if spare[key]:
                spare[key] -= 1
                leftovers.append(f)
        return {"element": s, "context": par(s, *leftovers)}
    return None


# --- divergence ---------------------------------------------------------------------

def divergence_closure(op: str = PAR) -> Closure:
    def explain(t, pool):
        return bhv_left_ctx_witness(t, list(pool), op)
    return Closure("Bhv∘Ctx^ℓ", explain=explain, completeness=SOUND_INCOMPLETE,
                   compat_evidence=THEOREM_CITED)


def check_divergence(spec: GsosSpec, pred: Sequence[Term], technique: str = "bhv-ctxl",
                     budget: int = DEFAULT_BUDGET, unfold: int = 20) -> CheckOutcome:
    """Try to show every term of ``pred`` diverges (has an infinite tau-path)."""
    for t in pred:
        spec.check_term(t)
    lts = Lts(spec)
    if technique in ("bhv-ctxl", "ctxl"):
        closure = divergence_closure()
        if technique == "ctxl":
            closure = Closure("Ctx^ℓ", member_fn=lambda t, pool: left_ctx_member(t, list(pool)),
                              compat_evidence=THEOREM_CITED)
    elif technique == "none":
        closure = Closure("none", member_fn=lambda t, pool: t in pool, compat_evidence=THEOREM_CITED)
    else:
        raise GsosError(f"unknown divergence technique {technique!r}")

    def expand(t, covered):
        succ = lts.moves(t, TAU)
        if not succ:
            return Expansion(False, reason={"no-tau-successor": t})
        pick = next((u for u in succ if covered(u)), succ[0])
        return Expansion(True, ((TAU, pick),))

    outcome = run_upto_check(list(dict.fromkeys(pred)), expand, closure, budget=budget)
    if outcome.verdict is Verdict.PROVED and unfold:
        paths = {t: tau_path(lts, t, unfold) for t in outcome.relation}
        outcome = replace(outcome, oracle={"unfold": unfold,
                                           "tau_paths_ok": all(p is not None for p in paths.values())})
    return outcome


def tau_path(lts: Lts, t: Term, length: int) -> Optional[list]:
    """A tau-path of exactly ``length`` steps from t, by depth-first search."""
    dead: set = set()

    def go(u, k):
        if k == 0:
            return [u]
        if (u, k) in dead:
            return None
        for v in lts.moves(u, TAU):
            rest = go(v, k - 1)
            if rest is not None:
                return [u] + rest
        dead.add((u, k))
        return None

    return go(t, length)


# --- simulation and weak bisimulation games ----------------------------------------

SIM_TECHNIQUES = ("none", "bhv", "slf", "trn", "ctx")
WEAK_TECHNIQUES = ("none", "bhv", "ctx", "slf-unsound", "trn-unsound")


def _ctx_member(p, pool, exclude: frozenset = frozenset()) -> bool:
    pool_set = set(pool)

    def go(s, t):
        if s == t or (s, t) in pool_set:
            return True
        return (s.op == t.op and s.op not in exclude and len(s.args) == len(t.args) and s.args and
                all(go(a, b) for a, b in zip(s.args, t.args)))
    return go(*p)


def _trn_member(p, pool) -> bool:
    succ: dict = {}
    for a, b in pool:
        succ.setdefault(a, set()).add(b)
    seen, queue = {p[0]}, deque([p[0]])
    while queue:
        u = queue.popleft()
        for v in succ.get(u, ()):
            if v == p[1]:
                return True
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return False


def _sandwich(rel_of, p, pool) -> bool:
    """p ∈ S ⊗ R ⊗ S where rel_of(u, v) decides S."""
    return any(rel_of(p[0], a) and rel_of(b, p[1]) for a, b in pool)


def game_closure(kind: str, technique: str, frag: Fragment) -> Closure:
    idx = frag.index
    strong_q = strong_bisimilarity(frag.lts)

    def bis(u, v):
        return strong_q[idx[u]] == strong_q[idx[v]]

    if technique == "none":
        return Closure("none", member_fn=lambda p, pool: p in pool, compat_evidence=THEOREM_CITED)
    if technique == "bhv":
        return Closure("Bhv", member_fn=lambda p, pool: _sandwich(bis, p, pool), compat_evidence=THEOREM_CITED)
    if kind == "sim":
        if technique == "slf":
            sim = similarity(frag.lts).pairs
            return Closure("Slf", member_fn=lambda p, pool: _sandwich(
                lambda u, v: (idx[u], idx[v]) in sim, p, pool), compat_evidence=THEOREM_CITED)
        if technique == "trn":
            return Closure("Trn", member_fn=lambda p, pool: _trn_member(p, pool), compat_evidence=THEOREM_CITED)
        if technique == "ctx":
            return Closure("Ctx", member_fn=lambda p, pool: _ctx_member(p, pool), compat_evidence=THEOREM_CITED)
    else:
        if technique == "ctx":
            return Closure("Ctx", member_fn=lambda p, pool: _ctx_member(p, pool, frozenset({SUM})),
                           compat_evidence=THEOREM_CITED)
        if technique == "slf-unsound":
            weak_q = weak_bisimilarity(frag.lts)
            return Closure("Slf-unsound", member_fn=lambda p, pool: _sandwich(
                lambda u, v: weak_q[idx[u]] == weak_q[idx[v]], p, pool), sound=False)
        if technique == "trn-unsound":
            return Closure("Trn-unsound", member_fn=lambda p, pool: _trn_member(p, pool), sound=False)
    raise GsosError(f"technique {technique!r} is not available for {kind}")


def _ground_truth(kind: str, frag: Fragment) -> set:
    if kind == "sim":
        return set(similarity(frag.lts).pairs)
    q = weak_bisimilarity(frag.lts)
    return {(i, j) for i in range(len(q)) for j in range(len(q)) if q[i] == q[j]}


def _prepare(spec: GsosSpec, pairs, bound: int):
    for s, t in pairs:
        spec.check_term(s)
        spec.check_term(t)
    lts = Lts(spec)
    frag = lts.explore([u for p in pairs for u in p], bound)
    return lts, frag


def check_simulation_upto(spec: GsosSpec, pairs: Sequence[tuple], technique: str = "none",
                          budget: int = DEFAULT_BUDGET, bound: int = 10_000) -> CheckOutcome:
    """Show every (x, y) of ``pairs`` is in similarity using a simulation up to ``technique``."""
    if technique not in SIM_TECHNIQUES:
        raise GsosError(f"unknown simulation technique {technique!r}")
    lts, frag = _prepare(spec, pairs, bound)
    closure = game_closure("sim", technique, frag)
    truth = _ground_truth("sim", frag)
    idx = frag.index

    def expand(p, covered):
        x, y = p
        succ = []
        for l, x2 in lts.transitions(x):
            cands = lts.moves(y, l)
            if not cands:
                return Expansion(False, reason={"transition": (x, l, x2), "unmatched_by": y})
            succ.append((l, _choose(x2, cands, covered, truth, idx)))
        return Expansion(True, tuple(succ))

    return _finish(run_upto_check(list(dict.fromkeys(pairs)), expand, closure, budget=budget),
                   pairs, truth, idx)


def check_weak_bisim_upto(spec: GsosSpec, pairs: Sequence[tuple], technique: str = "none",
                          budget: int = DEFAULT_BUDGET, bound: int = 10_000) -> CheckOutcome:
    """Weak bisimulation game: strong moves answered by weak moves, in both directions."""
    if technique not in WEAK_TECHNIQUES:
        raise GsosError(f"unknown weak bisimulation technique {technique!r}")
    lts, frag = _prepare(spec, pairs, bound)
    closure = game_closure("weak", technique, frag)
    truth = _ground_truth("weak", frag)
    idx = frag.index

    def expand(p, covered):
        x, y = p
        succ = []
        for l, x2 in lts.transitions(x):
            cands = lts.weak_moves(y, l, bound)
            if not cands:
                return Expansion(False, reason={"transition": (x, l, x2), "unmatched_by": y})
            succ.append((l, _choose(x2, cands, covered, truth, idx)))
        for l, y2 in lts.transitions(y):
            cands = lts.weak_moves(x, l, bound)
            if not cands:
                return Expansion(False, reason={"transition": (y, l, y2), "unmatched_by": x})
            succ.append((l, _choose(y2, cands, covered, truth, idx, flip=True)))
        return Expansion(True, tuple(succ))

    return _finish(run_upto_check(list(dict.fromkeys(pairs)), expand, closure, budget=budget),
                   pairs, truth, idx)


def _choose(mine, cands, covered, truth, idx, flip: bool = False):
    def pair(c):
        return (c, mine) if flip else (mine, c)
    for c in cands:
        if covered(pair(c)):
            return pair(c)
    for c in cands:
        a, b = pair(c)
        if (idx[a], idx[b]) in truth:
            return pair(c)
    return pair(cands[0])


def _finish(outcome: CheckOutcome, pairs, truth, idx) -> CheckOutcome:
    ground = {f"{render_term(s)} , {render_term(t)}": (idx[s], idx[t]) in truth for s, t in pairs}
    return replace(outcome, oracle={"ground_truth": ground})


# --- term syntax ---------------------------------------------------------------------

def render_term(t) -> str:
    if isinstance(t, Var):
        return t.name
    return _render(t, 0)


def _render(t, level: int) -> str:
    # levels: 0 = sum, 1 = par, 2 = prefix/atom
    if isinstance(t, Var):
        return t.name
    if t.op == SUM and len(t.args) == 2:
        s = f"{_render(t.args[0], 0)} + {_render(t.args[1], 1)}"
        return s if level == 0 else f"({s})"
    if t.op == PAR and len(t.args) == 2:
        s = f"{_render(t.args[0], 1)}|{_render(t.args[1], 2)}"
        return s if level <= 1 else f"({s})"
    if is_prefix(t.op):
        return f"{t.op}{_render(t.args[0], 2)}"
    if not t.args:
        return t.op
    return f"{t.op}(" + ", ".join(_render(a, 0) for a in t.args) + ")"


class _Tokens:
    def __init__(self, text: str):
        import re
        self.toks = re.findall(r"~?\$?[A-Za-z_][\w']*|\d+|[()+|.,]|\S", text)
        self.i = 0

    def peek(self, k: int = 0):
        j = self.i + k
        return self.toks[j] if j < len(self.toks) else None

    def next(self):
        tok = self.peek()
        if tok is None:
            raise GsosError("unexpected end of term")
        self.i += 1
        return tok

    def expect(self, tok):
        got = self.next()
        if got != tok:
            raise GsosError(f"expected {tok!r}, got {got!r}")


def parse_term(text: str, variables: bool = False, operators: Optional[dict] = None) -> Union[Term, Var]:
    """Parse ``a.p|q + 0``: ``+`` loosest, then left-associative ``|``, then prefixes.

    With ``variables`` set, names ``x1``, ``y2``, … are rule variables.
    Named operators of positive arity are written ``f(t1, t2)``.
    """
    toks = _Tokens(text)
    t = _parse_sum(toks, variables)
    if toks.peek() is not None:
        raise GsosError(f"trailing input {toks.peek()!r} in term {text!r}")
    return t


def _parse_sum(toks, variables):
    t = _parse_par(toks, variables)
    while toks.peek() == "+":
        toks.next()
        t = Term(SUM, (t, _parse_par(toks, variables)))
    return t


def _parse_par(toks, variables):
    t = _parse_prefix(toks, variables)
    while toks.peek() == "|":
        toks.next()
        t = Term(PAR, (t, _parse_prefix(toks, variables)))
    return t


def _parse_prefix(toks, variables):
    tok = toks.peek()
    if tok is None:
        raise GsosError("unexpected end of term")
    if tok == "(":
        toks.next()
        t = _parse_sum(toks, variables)
        toks.expect(")")
        return t
    if tok == "0":
        toks.next()
        return NIL
    if tok[0].isalpha() or tok[0] in "_~":
        toks.next()
        if toks.peek() == ".":
            toks.next()
            return Term(f"{tok}.", (_parse_prefix(toks, variables),))
        if tok.startswith("~"):
            raise GsosError(f"co-name {tok!r} is only allowed as a prefix label")
        if variables and tok[0] in "xy" and tok[1:].isdigit():
            return Var(tok)
        if toks.peek() == "(":
            toks.next()
            args = [_parse_sum(toks, variables)]
            while toks.peek() == ",":
                toks.next()
                args.append(_parse_sum(toks, variables))
            toks.expect(")")
            return Term(tok, tuple(args))
        return Term(tok)
    raise GsosError(f"unexpected token {tok!r}")
