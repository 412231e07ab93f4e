import pytest
from hypothesis import given, settings, strategies as st

from upto.audit import audit_ac_soundness
from upto.gsos import (NIL, PAR, SUM, BoundExceeded, GsosError, Lts, Term, ac_normal_form, bhv_left_ctx_witness,
                       ccs_spec, check_divergence, check_simulation_upto, check_weak_bisim_upto,
                       derive_transitions, left_ctx_member, par, parse_term, prefix, render_term, tau_path)
from upto.gsos_format import ParseError, parse_gsos
from upto.lattice import Verdict, gfp
from upto.lts import FiniteLts, saturate, similarity, weak_bisimilarity, weak_bisimulation_step

T = parse_term


@pytest.fixture
def divergence(inputs):
    return parse_gsos((inputs / "divergence.gsos").read_text())


@pytest.fixture
def weak(inputs):
    return parse_gsos((inputs / "weak.gsos").read_text())


# --- terms and transitions ----------------------------------------------------------------

@pytest.mark.parametrize("text", ["0", "a.0", "a.0 | b.0", "a.(b.0 + c.0)", "~a.0 | tau.0", "(a.0 | b.0) | c.0"])
def test_parse_render_roundtrip(text):
    assert T(render_term(T(text))) == T(text)


def test_parse_term_structure():
    assert T("a.0 | b.0") == Term(PAR, (prefix("a", NIL), prefix("b", NIL)))
    assert T("a.0 + b.0 | c.0") == Term(SUM, (prefix("a", NIL), Term(PAR, (prefix("b", NIL), prefix("c", NIL)))))


def test_prefix_transition():
    assert derive_transitions(ccs_spec(), T("a.b.0")) == (("a", T("b.0")),)
    assert derive_transitions(ccs_spec(), NIL) == ()


def test_parallel_interleaves_and_synchronises():
    got = set(derive_transitions(ccs_spec(), T("a.0 | ~a.0")))
    assert got == {("a", T("0 | ~a.0")), ("~a", T("a.0 | 0")), ("tau", T("0 | 0"))}


def test_tau_does_not_synchronise():
    got = set(derive_transitions(ccs_spec(), T("tau.0 | tau.0")))
    assert got == {("tau", T("0 | tau.0")), ("tau", T("tau.0 | 0"))}


def test_choice():
    assert set(derive_transitions(ccs_spec(), T("a.0 + b.c.0"))) == {("a", NIL), ("b", T("c.0"))}


def test_axioms(divergence):
    lts = Lts(divergence.spec)
    assert lts.transitions(T("p")) == (("a", T("p | p")),)
    assert set(lts.transitions(T("p | q"))) >= {("tau", T("p | p | q"))}


def test_unknown_constant(divergence):
    with pytest.raises(GsosError):
        Lts(divergence.spec).transitions(T("r"))


def test_weak_moves():
    lts = Lts(ccs_spec())
    t = T("tau.a.tau.0")
    assert lts.weak_moves(t, "tau") == [t, T("a.tau.0")]
    assert set(lts.weak_moves(t, "a")) == {T("tau.0"), NIL}
    assert lts.weak_moves(t, "b") == []


def test_explore_bound_is_reported(divergence):
    with pytest.raises(BoundExceeded):
        Lts(divergence.spec).explore([T("p")], bound=50)


# --- AC normal forms and left contexts ------------------------------------------------------

def test_ac_normal_form_identifies_reorderings():
    assert ac_normal_form(T("(a.0 | b.0) | c.0")) == ac_normal_form(T("c.0 | (b.0 | a.0)"))
    assert ac_normal_form(T("a.0 | a.0")) != ac_normal_form(T("a.0"))


def test_left_ctx_membership():
    p = T("p")
    assert left_ctx_member(T("p"), [p])
    assert left_ctx_member(T("(p | q) | p"), [p])
    assert not left_ctx_member(T("q | p"), [p])


def test_bhv_left_ctx_witness_uses_ac():
    w = bhv_left_ctx_witness(T("q | p"), [T("p")])
    assert w["element"] == T("p")
    assert ac_normal_form(w["context"]) == ac_normal_form(T("q | p"))
    assert left_ctx_member(w["context"], [T("p")])
    assert bhv_left_ctx_witness(T("q | q"), [T("p")]) is None


def test_ac_soundness_audit():
    report = audit_ac_soundness(samples=60, seed=1)
    assert report.holds, report.witness


# --- divergence -------------------------------------------------------------------------------

def test_divergence_single_element_invariant(divergence):
    (q,) = divergence.queries
    out = check_divergence(divergence.spec, q.items, q.technique)
    assert out.proved
    assert out.relation == (T("p | q"),)
    assert out.oracle["tau_paths_ok"]
    assert len(tau_path(Lts(divergence.spec), T("p | q"), 20)) == 21


def test_divergence_nil_refuted():
    out = check_divergence(ccs_spec(), [NIL])
    assert out.verdict is Verdict.REFUTED


def test_divergence_empty_predicate_proved():
    assert check_divergence(ccs_spec(), []).proved


def test_divergence_without_technique_inconclusive(divergence):
    out = check_divergence(divergence.spec, [T("p | q")], technique="none", budget=30)
    assert out.verdict is Verdict.INCONCLUSIVE


def test_divergence_loop_without_technique():
    spec = ccs_spec({"r": (("tau", Term("r")),)})
    assert check_divergence(spec, [Term("r")], technique="none").proved


# --- simulation and weak bisimulation ---------------------------------------------------------

def test_simulation_example(weak):
    q = next(q for q in weak.queries if q.kind == "sim")
    out = check_simulation_upto(weak.spec, q.items, q.technique)
    assert out.proved


def test_simulation_reverse_refuted():
    out = check_simulation_upto(ccs_spec(), [(T("a.0 + b.0"), T("a.0"))])
    assert out.verdict is Verdict.REFUTED


@pytest.mark.parametrize("technique", ["none", "bhv", "slf", "trn", "ctx"])
def test_simulation_techniques_agree_on_true_pair(technique):
    pairs = [(T("a.b.0 | c.0"), T("a.(b.0 + d.0) | c.0"))]
    assert check_simulation_upto(ccs_spec(), pairs, technique).proved


def test_unsound_technique_accepts_false_pair(weak):
    q = weak.queries[0]
    out = check_weak_bisim_upto(weak.spec, q.items, q.technique)
    assert out.verdict is Verdict.UNSOUND_ACCEPT
    assert out.oracle["ground_truth"] == {"tau.a.0 , 0": False}


def test_weak_bisim_true_pairs(weak):
    q = weak.queries[1]
    assert check_weak_bisim_upto(weak.spec, q.items, q.technique).proved


def test_weak_bisim_false_pair_refuted_without_technique():
    out = check_weak_bisim_upto(ccs_spec(), [(T("tau.a.0"), NIL)])
    assert out.verdict is Verdict.REFUTED


def test_weak_bisim_rejects_unknown_technique():
    with pytest.raises(GsosError):
        check_weak_bisim_upto(ccs_spec(), [(NIL, NIL)], "slf")


# --- saturated partition refinement against a brute-force gfp ----------------------------------

@st.composite
def small_lts(draw):
    n = draw(st.integers(1, 3))
    edges = draw(st.frozensets(st.tuples(st.integers(0, n - 1), st.sampled_from(["tau", "a"]),
                                         st.integers(0, n - 1)), max_size=5))
    return FiniteLts(n, edges, ("a", "tau"))


@settings(max_examples=40, deadline=None)
@given(small_lts())
def test_weak_bisimilarity_is_gfp(lts):
    q = weak_bisimilarity(lts)
    nu = gfp(weak_bisimulation_step(lts))
    assert nu.pairs == {(x, y) for x in range(lts.size) for y in range(lts.size) if q[x] == q[y]}


def test_saturation_adds_tau_reflexive_loops():
    sat = saturate(FiniteLts(2, {(0, "tau", 1)}))
    assert {(0, "tau", 0), (1, "tau", 1), (0, "tau", 1)} <= sat.transitions


def test_similarity_example():
    lts = FiniteLts(3, {(0, "a", 1), (2, "a", 1), (2, "b", 1)})
    assert (0, 2) in similarity(lts).pairs and (2, 0) not in similarity(lts).pairs


# --- file format ---------------------------------------------------------------------------------

def test_parse_inputs(divergence, weak):
    assert divergence.queries[0].kind == "diverge"
    assert [q.kind for q in weak.queries] == ["weakbisim", "weakbisim", "sim"]
    assert weak.queries[0].technique == "slf-unsound"


@pytest.mark.parametrize("text, fragment", [
    ("op | 2\nrule |: x1 -a-> y1, x2 -/b-> y2 => tau y1|x2", "negative premises"),
    ("op | 2\nop | 2", "declared twice"),
    ("frob", "unknown directive"),
    ("rule |: x1 -a-> y1 => a y1", "undeclared operator"),
    ("op | 2\nrule |: x1 -a-> y1 a y1", "=>"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_gsos(text)


def test_par_helper_left_nests():
    assert par(T("a.0"), T("b.0"), T("c.0")) == T("(a.0 | b.0) | c.0")
