"""Brute-force checks of the side conditions behind the up-to techniques.

Relation liftings are materialised over a concrete FX (all of it, or a
documented sub-carrier) as boolean matrices, so each condition is a plain
containment between two computed relations over FX.  Relations on X are
enumerated exhaustively (|X| = 3 gives 512) or sampled with a fixed seed.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .lattice import (AUDIT_VERIFIED, Closure, Rel, StepFn, all_relations, gfp)

CONDITIONS = ("star", "star2", "star3")  # (*), (**), (***)
LIFTINGS = ("canonical", "weighted", "lax", "weak")


@dataclass(frozen=True)
class AuditReport:
    condition: str
    instance: str
    holds: bool
    witness: Optional[dict] = None
    stats: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"condition": self.condition, "instance": self.instance,
                "outcome": "holds" if self.holds else "fails",
                "witness": _jsonable(self.witness), "stats": dict(self.stats)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, frozenset, set)):
        items = [_jsonable(v) for v in x]
        return sorted(items, key=repr) if isinstance(x, (set, frozenset)) else items
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, (np.bool_, np.integer)):
        return x.item()
    return x


# --- relations on X as boolean matrices ----------------------------------------------

def rel_from_mask(mask: int, n: int) -> np.ndarray:
    bits = (mask >> np.arange(n * n)) & 1
    return bits.reshape(n, n).astype(bool)


def rel_pairs(m: np.ndarray) -> list:
    return [tuple(int(v) for v in p) for p in np.argwhere(m)]


def compose(r: np.ndarray, s: np.ndarray) -> np.ndarray:
    return (r.astype(np.int64) @ s.astype(np.int64)) > 0


# --- liftings ----------------------------------------------------------------------------

@dataclass(frozen=True)
class Lifting:
    """A relation lifting over a materialised FX with ``size`` elements."""

    name: str
    n: int
    size: int
    lift: Callable[[np.ndarray], np.ndarray]
    render: Callable[[int], object]
    note: str = ""


def canonical_lifting(n: int = 3, labels: int = 2, forth_only: bool = False) -> Lifting:
    """Egli-Milner lifting of P(A×X); with ``forth_only`` the lax lifting F̃ for similarity."""
    items = [(a, x) for a in range(labels) for x in range(n)]
    k = len(items)
    masks = np.arange(1 << k)
    bits = ((masks[:, None] >> np.arange(k)) & 1).astype(bool)  # (2^k, k)
    lab = np.array([a for a, _ in items])
    st = np.array([x for _, x in items])

    def lift(r):
        m = (lab[:, None] == lab[None, :]) & r[st[:, None], st[None, :]]  # (k, k)
        # hit[i, V]: item i has an m-successor in V
        hit = (bits.astype(np.int64) @ m.T.astype(np.int64)).T > 0  # (k, 2^k)
        forth = np.all(~bits[:, :, None] | hit[None, :, :], axis=1)
        if forth_only:
            return forth
        hit_b = (bits.astype(np.int64) @ m.astype(np.int64)).T > 0  # item j has an m-predecessor in U
        back = np.all(~bits[:, :, None] | hit_b[None, :, :], axis=1).T
        return forth & back

    def render(i):
        return sorted(items[j] for j in range(k) if i >> j & 1)

    return Lifting("lax" if forth_only else "canonical", n, 1 << k, lift, render,
                   f"P(A×X), |A|={labels}, |X|={n}")


def weighted_lifting(n: int = 3, labels: int = 2) -> Lifting:
    """F̄ for FX = 2 × X^A over the boolean semiring: r ≤ s and φ(a) R ψ(a) for all a."""
    elems = [(r, phi) for r in (0, 1) for phi in itertools.product(range(n), repeat=labels)]
    out = np.array([r for r, _ in elems])
    phis = np.array([phi for _, phi in elems])

    def lift(r):
        m = out[:, None] <= out[None, :]
        for a in range(labels):
            m = m & r[phis[:, a][:, None], phis[:, a][None, :]]
        return m

    return Lifting("weighted", n, len(elems), lift, lambda i: elems[i], f"2 × X^A, |A|={labels}, |X|={n}")


def weak_lifting(n: int = 3, labels: int = 2) -> Lifting:
    """ρ ⊗ [F×F lax] on pairs (U, V) of at most one-element subsets of A×X.

    ((U1,V1),(U2,V2)) is related iff every element of U2 has an R-predecessor
    in V1 and every element of U1 has an R-successor in V2.
    """
    opts = [None] + [(a, x) for a in range(labels) for x in range(n)]
    elems = [(u, v) for u in opts for v in opts]

    def arr(side, part):
        return np.array([(-1 if e[side] is None else e[side][part]) for e in elems])

    u_l, u_s, v_l, v_s = arr(0, 0), arr(0, 1), arr(1, 0), arr(1, 1)

    def lift(r):
        def related(l1, s1, l2, s2):
            ok = (l1[:, None] == l2[None, :]) & (l1[:, None] >= 0)
            return ok & r[np.maximum(s1, 0)[:, None], np.maximum(s2, 0)[None, :]]
        # U2 empty, or V1's element is an R-predecessor of U2's element
        back = (u_l[None, :] < 0) | related(v_l, v_s, u_l, u_s)
        forth = (u_l[:, None] < 0) | related(u_l, u_s, v_l, v_s)
        return back & forth

    def render(i):
        u, v = elems[i]
        return ([u] if u else [], [v] if v else [])

    return Lifting("weak", n, len(elems), lift, render,
                   f"pairs of ≤1-element subsets of A×X, |A|={labels}, |X|={n}")


def get_lifting(name: str, n: int = 3, labels: int = 2) -> Lifting:
    if name == "canonical":
        return canonical_lifting(n, labels)
    if name == "lax":
        return canonical_lifting(n, labels, forth_only=True)
    if name == "weighted":
        return weighted_lifting(n, labels)
    if name == "weak":
        return weak_lifting(n, labels)
    raise KeyError(f"unknown lifting {name!r}; expected one of {LIFTINGS}")


# --- (*), (**), (***) ------------------------------------------------------------------------

def condition_holds(lifting: Lifting, condition: str, r: np.ndarray, s: Optional[np.ndarray] = None):
    """Evaluate one condition; returns (holds, offending FX pair or None)."""
    if condition == "star":
        lhs = np.eye(lifting.size, dtype=bool)
        rhs = lifting.lift(np.eye(lifting.n, dtype=bool))
    elif condition == "star2":
        lhs = lifting.lift(r).T
        rhs = lifting.lift(r.T)
    elif condition == "star3":
        lhs = compose(lifting.lift(r), lifting.lift(s))
        rhs = lifting.lift(compose(r, s))
    else:
        raise KeyError(condition)
    bad = np.argwhere(lhs & ~rhs)
    if len(bad):
        return False, (int(bad[0][0]), int(bad[0][1]))
    return True, None


def _star3_middle(lifting: Lifting, r, s, p: int, q: int) -> int:
    mid = lifting.lift(r)[p] & lifting.lift(s)[:, q]
    return int(np.argmax(mid))


def audit_star_conditions(lifting: str, condition: str, n: int = 3, labels: int = 2, mode: str = "auto",
                          samples: int = 1000, seed: int = 0) -> AuditReport:
    """Check (*) ``star``, (**) ``star2`` or (***) ``star3`` for one lifting.

    ``auto`` is exhaustive for (*) and (**) when 2^(n²) ≤ 512 and sampled for (***).
    """
    lf = get_lifting(lifting, n, labels)
    total = 1 << (n * n)
    if mode == "auto":
        mode = "sampled" if condition == "star3" or total > 512 else "exhaustive"
    instance = f"{lf.name}: {lf.note}, |FX|={lf.size}"
    if condition == "star":
        ok, bad = condition_holds(lf, "star", None)
        wit = None if ok else {"fx_pair": [lf.render(bad[0]), lf.render(bad[1])], "indices": bad}
        return AuditReport("(*)", instance, ok, wit, {"relations": 1, "mode": "exhaustive"})
    if mode == "exhaustive":
        if condition == "star2":
            candidates = ((m, None) for m in range(total))
        else:
            candidates = ((m1, m2) for m1 in range(total) for m2 in range(total))
    else:
        rng = random.Random(seed)
        if condition == "star2":
            candidates = ((rng.randrange(total), None) for _ in range(samples))
        else:
            candidates = ((rng.randrange(total), rng.randrange(total)) for _ in range(samples))
    count = 0
    for m1, m2 in candidates:
        count += 1
        r = rel_from_mask(m1, n)
        s = rel_from_mask(m2, n) if m2 is not None else None
        ok, bad = condition_holds(lf, condition, r, s)
        if not ok:
            wit = {"R": rel_pairs(r), "R_mask": m1, "fx_pair": [lf.render(bad[0]), lf.render(bad[1])],
                   "indices": bad}
            if s is not None:
                wit.update({"S": rel_pairs(s), "S_mask": m2,
                            "middle": lf.render(_star3_middle(lf, r, s, *bad))})
            return AuditReport(_cond_name(condition), instance, False, wit,
                               {"checked": count, "mode": mode, "seed": seed})
    if mode == "exhaustive":
        expected = total if condition == "star2" else total * total
        assert count == expected, (count, expected)
    return AuditReport(_cond_name(condition), instance, True, None,
                       {"checked": count, "mode": mode, "seed": seed, "relations": total})


def _cond_name(c: str) -> str:
    return {"star": "(*)", "star2": "(**)", "star3": "(***)"}[c]


def replay_star_witness(report: AuditReport, lifting: str, n: int = 3, labels: int = 2) -> bool:
    """True iff the recorded witness still violates the condition."""
    if report.holds or report.witness is None:
        return False
    lf = get_lifting(lifting, n, labels)
    cond = {"(*)": "star", "(**)": "star2", "(***)": "star3"}[report.condition]
    w = report.witness
    r = rel_from_mask(w["R_mask"], n) if "R_mask" in w else None
    s = rel_from_mask(w["S_mask"], n) if "S_mask" in w else None
    ok, bad = condition_holds(lf, cond, r, s)
    return not ok


# --- compatibility and soundness on concrete step functions ---------------------------------

def audit_compatibility(a: Closure, b: StepFn, instance: str = "") -> AuditReport:
    """Exhaustively test A(b(R)) ⊆ b(A(R)); the upgraded closure is in ``stats['closure']``."""
    if a.apply is None:
        raise ValueError(f"closure {a.name} has no apply; cannot audit")
    count = 0
    for r in all_relations(b.carrier):
        count += 1
        lhs = a.apply(b(r))
        rhs = b(a.apply(r))
        if not lhs.pairs <= rhs.pairs:
            bad = sorted(lhs.pairs - rhs.pairs)[0]
            return AuditReport("compatibility", instance or f"{a.name} vs {b.description}", False,
                               {"R": sorted(r.pairs), "pair": bad}, {"relations": count})
    expected = 1 << (b.carrier.size ** 2)
    assert count == expected
    closure = a if a.compat_evidence == "theorem-cited" else a.with_evidence(AUDIT_VERIFIED)
    return AuditReport("compatibility", instance or f"{a.name} vs {b.description}", True, None,
                       {"relations": count, "closure": closure})


class PreconditionError(ValueError):
    pass


def audit_soundness_and_preservation(a: Closure, b: StepFn, require_compat: bool = True,
                                     instance: str = "") -> AuditReport:
    """(i) R ⊆ b(A(R)) implies R ⊆ gfp(b); (ii) A(gfp(b)) ⊆ gfp(b); over all R."""
    if require_compat:
        pre = audit_compatibility(a, b)
        if not pre.holds:
            raise PreconditionError(f"{a.name} is not compatible with {b.description}: {pre.witness}")
    nu = gfp(b)
    count, invariants = 0, 0
    for r in all_relations(b.carrier):
        count += 1
        if r.pairs <= b(a.apply(r)).pairs:
            invariants += 1
            if not r.pairs <= nu.pairs:
                return AuditReport("soundness", instance or f"{a.name} vs {b.description}", False,
                                   {"R": sorted(r.pairs), "outside_gfp": sorted(r.pairs - nu.pairs)},
                                   {"relations": count, "invariants_up_to": invariants})
    preserved = a.apply(nu).pairs <= nu.pairs
    stats = {"relations": count, "invariants_up_to": invariants, "gfp_size": len(nu)}
    if not preserved:
        return AuditReport("preservation", instance or f"{a.name} vs {b.description}", False,
                           {"A(gfp)-gfp": sorted(a.apply(nu).pairs - nu.pairs)}, stats)
    return AuditReport("soundness+preservation", instance or f"{a.name} vs {b.description}", True, None, stats)


# --- distributive law / lifting corestriction -----------------------------------------------

DISTRIBUTIVE_INSTANCES = ("bool-canonical", "qplus-canonical", "q-canonical", "q-monotone", "gsos-parallel")


def audit_distributive_lifting(instance: str, samples: int = 300, seed: int = 0, n: int = 3) -> AuditReport:
    """Sample elements of T̄F̄R, apply λ componentwise, test membership in F̄T̄R."""
    if instance == "gsos-parallel":
        return _audit_gsos_parallel(samples, seed, n)
    try:
        sr_name, kind = instance.split("-")
    except ValueError:
        raise KeyError(f"unknown instance {instance!r}") from None
    if instance not in DISTRIBUTIVE_INSTANCES:
        raise KeyError(f"unknown instance {instance!r}; expected one of {DISTRIBUTIVE_INSTANCES}")
    return _audit_weighted(sr_name, kind, samples, seed, n)


def _audit_weighted(sr_name: str, kind: str, samples: int, seed: int, n: int) -> AuditReport:
    from .semirings import get_semiring
    from . import weighted as W
    s = get_semiring(sr_name)
    rng = random.Random(seed)
    coeffs = [c for c in s.grid if not s.is_zero(c)]
    outs = list(s.grid)
    label = f"{sr_name} {kind}: λ(Σ r_i (o_i, φ_i)) = (Σ r_i o_i, Σ r_i φ_i), |X|={n}, one letter"
    checked = 0
    for _ in range(samples):
        r = rel_from_mask(rng.randrange(1, 1 << (n * n)), n)
        pairs = rel_pairs(r)
        gens = [(W.Vec.unit(x, s), W.Vec.unit(y, s)) for x, y in pairs]
        terms = []
        for _ in range(rng.randint(1, 3)):
            x, y = rng.choice(pairs)
            o1, o2 = rng.choice(outs), rng.choice(outs)
            if not s.leq(o1, o2):
                o1, o2 = o2, o1
            left, right = (o1, x), (o2, y)  # an element of F̄R: o1 ≤ o2 and x R y
            c = rng.choice(coeffs)
            if kind == "monotone" and c < 0:
                left, right = right, left  # negative weights act on reversed pairs
            terms.append((c, left, right))
        checked += 1
        lo = s.sum(s.mul(c, l[0]) for c, l, _ in terms)
        ro = s.sum(s.mul(c, rr[0]) for c, _, rr in terms)
        lv = W.vec_sum(s, ((c, W.Vec.unit(l[1], s)) for c, l, _ in terms))
        rv = W.vec_sum(s, ((c, W.Vec.unit(rr[1], s)) for c, _, rr in terms))
        out_ok = s.leq(lo, ro)
        if s.name == "bool":
            succ_ok = W._cover_union((lv, rv), gens) is not None
        elif kind == "monotone":
            succ_ok = W.monotone_ctx_membership((lv, rv), gens) is not None
        else:
            succ_ok = W.ctx_membership_semimodule((lv, rv), gens, s) is not None
        if not (out_ok and succ_ok):
            wit = {"R": pairs, "terms": [(c, list(l), list(rr)) for c, l, rr in terms],
                   "lambda_left": (lo, [(x, w) for x, w in lv.items]),
                   "lambda_right": (ro, [(x, w) for x, w in rv.items]),
                   "failed": "output order" if not out_ok else "successor membership"}
            return AuditReport("λ-corestriction", label, False, wit, {"checked": checked, "seed": seed})
    return AuditReport("λ-corestriction", label, True, None, {"checked": checked, "seed": seed})


def _audit_gsos_parallel(samples: int, seed: int, n: int) -> AuditReport:
    """Parallel composition's λ against the divergence lifting and the left-context lifting.

    An element of T̄(F̄×Id)P is ((S, x), (T, y)) with S ∈ F̄P (some (tau, x') ∈ S
    with x' ∈ P) and x ∈ P; λ must land in F̄(𝕋̄P), i.e. yield a tau-move into a
    left context of P.
    """
    from .gsos import PAR, Term, complement, left_ctx_member
    from .lts import TAU
    labels = ["a", "~a", TAU]
    atoms = [Term(f"x{i}") for i in range(n)]
    rng = random.Random(seed)
    checked = 0
    label = f"parallel λ, divergence lifting, left-context lifting, |X|={n}"
    for _ in range(samples * 5):
        if checked >= samples:
            break
        p = {i for i in range(n) if rng.random() < 0.5}
        if not p:
            continue
        s = {(l, i) for l in labels for i in range(n) if rng.random() < 0.3}
        t = {(l, i) for l in labels for i in range(n) if rng.random() < 0.3}
        x = rng.choice(sorted(p))
        y = rng.randrange(n)
        if not any(l == TAU and i in p for l, i in s):
            continue
        checked += 1
        moves = {(l, Term(PAR, (atoms[i], atoms[y]))) for l, i in s}
        moves |= {(l, Term(PAR, (atoms[x], atoms[j]))) for l, j in t}
        moves |= {(TAU, Term(PAR, (atoms[i], atoms[j]))) for l, i in s for m, j in t
                  if l != TAU and complement(l) == m}
        pred = [atoms[i] for i in p]
        if not any(l == TAU and left_ctx_member(u, pred) for l, u in moves):
            return AuditReport("λ-corestriction", label, False,
                               {"P": sorted(p), "S": sorted(s), "T": sorted(t), "x": x, "y": y},
                               {"checked": checked, "seed": seed})
    return AuditReport("λ-corestriction", label, True, None, {"checked": checked, "seed": seed})


# --- fixed small systems and the closure suite --------------------------------------------------

def fixed_lts():
    """Three states: 0 -a-> 1, 0 -a-> 2, 1 -b-> 2, 2 -b-> 1; states 1 and 2 are bisimilar."""
    from .lts import FiniteLts
    return FiniteLts(3, frozenset({(0, "a", 1), (0, "a", 2), (1, "b", 2), (2, "b", 1)}))


def weak_counterexample_lts():
    """0 -tau-> 1 -a-> 2: transitivity is not compatible with the weak bisimulation step here."""
    from .lts import TAU, FiniteLts
    return FiniteLts(3, frozenset({(0, TAU, 1), (1, "a", 2)}))


def closure_suite(lts) -> list:
    """The finite-carrier closures checked against a step function on ``lts``."""
    from .lattice import (behavioural_closure, constant_closure, eqv_closure, identity_closure,
                          join_closure, rfl_closure, self_closure, sym_closure, trn_closure)
    from .lts import bisimulation_step, strong_bisimilarity
    c = lts.carrier
    nu = gfp(bisimulation_step(lts))
    return [
        identity_closure(), rfl_closure(), sym_closure(), trn_closure(), eqv_closure(),
        join_closure([identity_closure(), sym_closure(), rfl_closure()]),
        behavioural_closure(strong_bisimilarity(lts)),
        self_closure(nu),
        constant_closure(Rel.full(c), "Full"),
    ]


def soundness_meta_check(lts=None) -> dict:
    """Audit the suite against the bisimulation step, then check soundness for the survivors."""
    from .lts import bisimulation_step
    lts = lts or fixed_lts()
    b = bisimulation_step(lts)
    results = {}
    for a in closure_suite(lts):
        compat = audit_compatibility(a, b)
        entry = {"compatible": compat.holds}
        if compat.holds:
            verified = compat.stats["closure"]
            sound = audit_soundness_and_preservation(verified, b, require_compat=False)
            entry.update({"evidence": verified.compat_evidence, "sound": sound.holds,
                          "invariants_up_to": sound.stats["invariants_up_to"],
                          "relations": sound.stats["relations"]})
        else:
            entry["witness"] = compat.witness
        results[a.name] = entry
    return results


# --- GSOS congruence consequence ------------------------------------------------------------------

def _random_term(rng: random.Random, depth: int):
    from .gsos import NIL, PAR, SUM, Term, prefix
    if depth == 0 or rng.random() < 0.25:
        return NIL if rng.random() < 0.5 else prefix(rng.choice(["a", "b", "~a"]), NIL)
    k = rng.random()
    if k < 0.4:
        return prefix(rng.choice(["a", "b", "~a", "tau"]), _random_term(rng, depth - 1))
    op = SUM if k < 0.7 else PAR
    return Term(op, (_random_term(rng, depth - 1), _random_term(rng, depth - 1)))


def law_pair(rng: random.Random, depth: int = 2):
    """A pair of terms equated by one of s+0~s, s|0~s, s+s~s, commutativity of + and |."""
    from .gsos import NIL, PAR, SUM, Term
    s = _random_term(rng, depth)
    u = _random_term(rng, depth)
    law = rng.choice(["sum-unit", "par-unit", "sum-idem", "sum-comm", "par-comm"])
    if law == "sum-unit":
        return law, Term(SUM, (s, NIL)), s
    if law == "par-unit":
        return law, Term(PAR, (s, NIL)), s
    if law == "sum-idem":
        return law, Term(SUM, (s, s)), s
    if law == "sum-comm":
        return law, Term(SUM, (s, u)), Term(SUM, (u, s))
    return law, Term(PAR, (s, u)), Term(PAR, (u, s))


def one_hole_contexts(depth: int = 2, fillers=None) -> list:
    """All contexts of depth ≤ ``depth`` as functions, with a printable template."""
    from .gsos import NIL, PAR, SUM, Term, prefix, render_term
    fillers = fillers if fillers is not None else [NIL, prefix("a", NIL)]
    hole = Term("[]")
    layer = [lambda t, l=l: prefix(l, t) for l in ("a", "~a", "tau")]
    for f in fillers:
        for op in (SUM, PAR):
            layer.append(lambda t, f=f, op=op: Term(op, (t, f)))
            layer.append(lambda t, f=f, op=op: Term(op, (f, t)))
    contexts = [lambda t: t]
    frontier = [lambda t: t]
    for _ in range(depth):
        frontier = [lambda t, c=c, g=g: g(c(t)) for c in frontier for g in layer]
        contexts += frontier
    return [(render_term(c(hole)), c) for c in contexts]


def audit_congruence(pairs: int = 100, depth: int = 2, seed: int = 0) -> AuditReport:
    """Bisimilar law-generated pairs stay bisimilar under every small 1-hole context."""
    from .gsos import Lts, ccs_spec
    spec = ccs_spec()
    lts = Lts(spec)
    rng = random.Random(seed)
    contexts = one_hole_contexts(depth)
    checks = 0
    for k in range(pairs):
        law, s, t = law_pair(rng)
        frag = lts.explore([s, t])
        if not frag.bisimilar(s, t):
            return AuditReport("congruence", "law pair not bisimilar", False,
                               {"law": law, "s": str(s), "t": str(t)}, {"pairs": k})
        for template, c in contexts:
            cs, ct = c(s), c(t)
            checks += 1
            if not lts.explore([cs, ct]).bisimilar(cs, ct):
                return AuditReport("congruence", "context breaks bisimilarity", False,
                                   {"law": law, "s": str(s), "t": str(t), "context": template},
                                   {"pairs": k, "checks": checks})
    return AuditReport("congruence", f"prefix, parallel and choice; contexts of depth ≤ {depth}", True,
                       None, {"pairs": pairs, "contexts": len(contexts), "checks": checks, "seed": seed})


def audit_ac_soundness(samples: int = 100, seed: int = 0) -> AuditReport:
    """Random terms with equal AC normal forms are strongly bisimilar on their joint fragment."""
    from .gsos import Lts, PAR, Term, ac_normal_form, ccs_spec, par
    spec = ccs_spec()
    lts = Lts(spec)
    rng = random.Random(seed)
    for k in range(samples):
        factors = [_random_term(rng, 1) for _ in range(rng.randint(2, 4))]
        s = par(*factors)
        shuffled = factors[:]
        rng.shuffle(shuffled)
        # a random bracketing of the shuffled factors
        items = shuffled[:]
        while len(items) > 1:
            i = rng.randrange(len(items) - 1)
            items[i:i + 2] = [Term(PAR, (items[i], items[i + 1]))]
        t = items[0]
        assert ac_normal_form(s) == ac_normal_form(t)
        if not lts.explore([s, t]).bisimilar(s, t):
            return AuditReport("ac-soundness", "AC-equal terms", False, {"s": str(s), "t": str(t)},
                               {"checked": k + 1})
    return AuditReport("ac-soundness", "AC-equal parallel compositions", True, None,
                       {"checked": samples, "seed": seed})


# --- suite ----------------------------------------------------------------------------------------

def run_suite(samples: int = 1000, seed: int = 0) -> list:
    """The standard battery: star conditions for all liftings, and the λ audits."""
    reports = []
    for lifting in LIFTINGS:
        for cond in CONDITIONS:
            reports.append((lifting, audit_star_conditions(lifting, cond, samples=samples, seed=seed)))
    for inst in DISTRIBUTIVE_INSTANCES:
        reports.append((inst, audit_distributive_lifting(inst, seed=seed)))
    return reports
