import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from upto.audit import (DISTRIBUTIVE_INSTANCES, PreconditionError, audit_compatibility, audit_congruence,
                        audit_distributive_lifting, audit_soundness_and_preservation, audit_star_conditions,
                        closure_suite, condition_holds, fixed_lts, get_lifting, law_pair, one_hole_contexts,
                        rel_from_mask, replay_star_witness, soundness_meta_check, weak_counterexample_lts)
from upto.lattice import AUDIT_VERIFIED, Rel, all_relations, gfp, rfl_closure, trn_closure
from upto.lts import FiniteLts, bisimulation_step, weak_bisimulation_step


def egli_milner(u, v, r):
    # oracle: direct set-based definition of the canonical lifting on P(A×X)
    forth = all(any(a == b and r[x, y] for b, y in v) for a, x in u)
    back = all(any(a == b and r[x, y] for a, x in u) for b, y in v)
    return forth and back, forth


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 511))
def test_canonical_lifting_matches_set_definition(mask):
    r = rel_from_mask(mask, 3)
    lf, lax = get_lifting("canonical"), get_lifting("lax")
    m, mlax = lf.lift(r), lax.lift(r)
    for i in range(lf.size):
        for j in range(lf.size):
            em, fw = egli_milner(lf.render(i), lf.render(j), r)
            assert m[i, j] == em and mlax[i, j] == fw


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 511))
def test_weighted_lifting_matches_definition(mask):
    r = rel_from_mask(mask, 3)
    lf = get_lifting("weighted")
    m = lf.lift(r)
    for i, j in itertools.product(range(lf.size), repeat=2):
        (o1, f1), (o2, f2) = lf.render(i), lf.render(j)
        assert m[i, j] == (o1 <= o2 and all(r[x, y] for x, y in zip(f1, f2)))


@pytest.mark.parametrize("name, size", [("canonical", 64), ("lax", 64), ("weighted", 18), ("weak", 49)])
def test_carrier_sizes(name, size):
    assert get_lifting(name).size == size


@pytest.mark.parametrize("lifting, condition, holds", [
    ("canonical", "star", True), ("canonical", "star2", True), ("canonical", "star3", True),
    ("weighted", "star", True), ("weighted", "star2", False),
    ("lax", "star2", False),
    ("weak", "star2", True), ("weak", "star3", False),
])
def test_star_condition_outcomes(lifting, condition, holds):
    report = audit_star_conditions(lifting, condition, samples=1000, seed=0)
    assert report.holds is holds
    if not holds:
        assert replay_star_witness(report, lifting)
        json.dumps(report.to_dict())


def test_exhaustive_counts():
    r = audit_star_conditions("canonical", "star2")
    assert r.stats == {"checked": 512, "mode": "exhaustive", "seed": 0, "relations": 512}
    r = audit_star_conditions("canonical", "star3", samples=1000)
    assert r.stats["checked"] == 1000 and r.stats["mode"] == "sampled"


def test_weak_star_fails_on_arbitrary_carrier():
    # the weak lifting only satisfies (*) on coalgebras whose strong moves are weak moves
    r = audit_star_conditions("weak", "star")
    assert not r.holds and r.witness["fx_pair"]


def test_weak_star3_witness_composition():
    report = audit_star_conditions("weak", "star3", samples=1000, seed=0)
    w = report.witness
    lf = get_lifting("weak")
    r, s = rel_from_mask(w["R_mask"], 3), rel_from_mask(w["S_mask"], 3)
    p, q = w["indices"]
    mid = [m for m in range(lf.size) if lf.lift(r)[p, m] and lf.lift(s)[m, q]]
    assert mid and lf.render(mid[0]) == w["middle"]


def test_audit_is_deterministic():
    a = audit_star_conditions("weak", "star3", samples=500, seed=7)
    b = audit_star_conditions("weak", "star3", samples=500, seed=7)
    assert a.to_dict() == b.to_dict()


def test_replay_rejects_holding_report():
    assert not replay_star_witness(audit_star_conditions("canonical", "star2"), "canonical")


def test_condition_holds_unknown():
    with pytest.raises(KeyError):
        condition_holds(get_lifting("canonical"), "star4", np.eye(3, dtype=bool))


# --- λ-corestriction -----------------------------------------------------------------------------

@pytest.mark.parametrize("instance, holds", [
    ("bool-canonical", True), ("qplus-canonical", True), ("q-canonical", False),
    ("q-monotone", True), ("gsos-parallel", True),
])
def test_distributive_instances(instance, holds):
    assert instance in DISTRIBUTIVE_INSTANCES
    report = audit_distributive_lifting(instance, samples=200, seed=0)
    assert report.holds is holds
    if not holds:
        assert report.witness


# --- compatibility and soundness ---------------------------------------------------------------------

def test_rfl_on_two_states_enumerates_16():
    b = bisimulation_step(FiniteLts(2, {(0, "a", 1)}))
    report = audit_compatibility(rfl_closure(), b)
    assert report.holds and report.stats["relations"] == 16
    assert report.stats["closure"].compat_evidence == "theorem-cited"


def test_self_closure_upgraded_to_audit_verified():
    results = soundness_meta_check()
    slf = next(k for k in results if k.startswith("Slf"))
    assert results[slf]["evidence"] == AUDIT_VERIFIED


def test_trn_incompatible_with_weak_step():
    b = weak_bisimulation_step(weak_counterexample_lts())
    report = audit_compatibility(trn_closure(), b)
    assert not report.holds
    r = Rel(b.carrier, frozenset(map(tuple, report.witness["R"])))
    assert tuple(report.witness["pair"]) in trn_closure().apply(b(r)).pairs
    assert tuple(report.witness["pair"]) not in b(trn_closure().apply(r)).pairs


def test_soundness_precondition():
    b = weak_bisimulation_step(weak_counterexample_lts())
    with pytest.raises(PreconditionError):
        audit_soundness_and_preservation(trn_closure(), b)


def test_meta_check_zero_exceptions():
    results = soundness_meta_check()
    assert set(results) == {a.name for a in closure_suite(fixed_lts())}
    for name, entry in results.items():
        if entry["compatible"]:
            assert entry["sound"] and entry["relations"] == 512, name
    assert not results["Full"]["compatible"]


def test_meta_check_oracle_brute_force():
    # independent check for the audit-verified closures: every R ⊆ b(A(R)) lies in gfp(b)
    lts = fixed_lts()
    b = bisimulation_step(lts)
    nu = gfp(b)
    for a in closure_suite(lts):
        if not audit_compatibility(a, b).holds:
            continue
        bad = [r for r in all_relations(b.carrier) if r.pairs <= b(a.apply(r)).pairs and not r.pairs <= nu.pairs]
        assert bad == [], a.name


# --- congruence consequence ---------------------------------------------------------------------

def test_context_count():
    assert len(one_hole_contexts(2)) == 1 + 11 + 121


def test_law_pairs_deterministic():
    import random
    a = [law_pair(random.Random(4)) for _ in range(3)]
    b = [law_pair(random.Random(4)) for _ in range(3)]
    assert a == b


def test_congruence_small():
    report = audit_congruence(pairs=10, depth=1, seed=3)
    assert report.holds and report.stats["checks"] == 10 * 12
