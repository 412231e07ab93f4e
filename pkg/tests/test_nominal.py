import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from upto.lattice import Verdict
from upto.nominal import (EMPTY, NominalError, NomPair, OrbitElem, Perm, apply_perm, canonical_pair,
                          cgr_witness_equivariant, check_nom_equivalence, duplicate_letter_automaton,
                          make_set, name_str, parse_name, relevant_letters, render_set, replay_cgr_equivariant,
                          run_word, set_contains, set_output, set_step, set_union, spanning_hints)
from upto.nominal_format import ParseError, parse_nominal

AUT = duplicate_letter_automaton()
a, b, c = 0, 1, 2


def E(orbit, *names):
    return OrbitElem(orbit, tuple(names))


def S(*elems, **chunks):
    return make_set(elems, {k.replace("_", "'"): v for k, v in chunks.items()}, AUT.arities)


STAR0, STAR1 = S(E("star0")), S(E("star1"))


# --- names, permutations, sets -----------------------------------------------------------

@pytest.mark.parametrize("text, n", [("a", 0), ("c", 2), ("a'", 0), ("n30", 30)])
def test_parse_name(text, n):
    assert parse_name(text) == n


def test_name_str_roundtrip():
    for n in range(40):
        assert parse_name(name_str(n)) == n


def test_perm_swap_and_inverse():
    p = Perm.swap(0, 3)
    assert p(0) == 3 and p(3) == 0 and p(5) == 5
    assert Perm(((0, 1), (1, 2), (2, 0))).inverse()(0) == 2
    with pytest.raises(NominalError):
        Perm(((0, 1),))


def test_support_must_be_distinct():
    with pytest.raises(NominalError):
        E("A", 0, 0)


def test_chunk_membership():
    u = S(A_=frozenset({(a,)}))
    assert not set_contains(u, E("A'", a)) and set_contains(u, E("A'", 7))


def test_union_intersects_exclusions():
    u = set_union(S(A_=frozenset({(a,)})), S(A_=frozenset({(b,)})))
    assert u == S(A_=frozenset())
    assert set_union(S(E("A'", a)), S(A_=frozenset({(a,)}))) == S(A_=frozenset())


# --- transitions -----------------------------------------------------------------------------

def test_step_examples():
    assert set_step(AUT, STAR0, a) == S(E("star0"), E("A", a))
    assert set_step(AUT, S(E("A", a)), a) == S(E("top"))
    assert set_step(AUT, S(E("A", a)), b) == S(E("A", a))
    assert set_step(AUT, STAR1, a) == S(E("A", a), A_=frozenset({(a,)}))


def test_chunk_step_special_and_generic_letters():
    # A' \ {a'} reading a: generic b' stay b'; a' is excluded so no A(a)
    assert set_step(AUT, S(A_=frozenset({(a,)})), a) == S(A_=frozenset({(a,)}))
    # reading b: b' moves to A(b), the rest stay
    assert set_step(AUT, S(A_=frozenset({(a,)})), b) == S(E("A", b), A_=frozenset({(a,), (b,)}))


WINDOW = range(6)


def members(u, window=WINDOW):
    """The elements of u whose support lies in ``window``."""
    out = set()
    for o, n in AUT.orbits:
        for t in itertools.permutations(window, n):
            if set_contains(u, E(o, *t)):
                out.add(E(o, *t))
    return out


def pointwise_step(u, letter, window=range(8)):
    # oracle: step each element of a finite window separately and union
    out = set()
    for e in members(u, window):
        out |= members(set_step(AUT, S(e), letter))
    return out


finite_names = st.integers(0, 3)
elems = st.one_of(
    st.sampled_from([E("star0"), E("star1"), E("top")]),
    st.builds(lambda n: E("A", n), finite_names),
    st.builds(lambda n: E("A'", n), finite_names),
)


@st.composite
def fin_sets(draw):
    explicit = draw(st.lists(elems, max_size=3))
    chunks = {}
    if draw(st.booleans()):
        chunks["A'"] = frozenset((n,) for n in draw(st.lists(finite_names, max_size=2)))
    return make_set(explicit, chunks, AUT.arities)


@settings(max_examples=60, deadline=None)
@given(fin_sets(), finite_names)
def test_step_matches_pointwise_oracle(u, letter):
    assert members(set_step(AUT, u, letter)) == pointwise_step(u, letter)


@settings(max_examples=60, deadline=None)
@given(fin_sets(), fin_sets(), finite_names)
def test_step_distributes_over_union(u, v, letter):
    assert set_step(AUT, set_union(u, v), letter) == set_union(set_step(AUT, u, letter), set_step(AUT, v, letter))


@settings(max_examples=60, deadline=None)
@given(fin_sets(), finite_names, st.integers(0, 6), st.integers(0, 6))
def test_step_equivariant(u, letter, x, y):
    pi = Perm.swap(x, y)
    assert set_step(AUT, apply_perm(pi, u), pi(letter)) == apply_perm(pi, set_step(AUT, u, letter))


def test_relevant_letters():
    u, v = S(E("A", 2)), S(E("A'", 0))
    assert relevant_letters(u, v) == [0, 2, 1]
    assert relevant_letters(EMPTY, EMPTY) == [0]


def has_repeat(word):
    return len(set(word)) < len(word)


@pytest.mark.parametrize("start", [STAR0, STAR1])
def test_language_is_duplicate_letter_words(start):
    for n in range(5):
        for word in itertools.product(range(4), repeat=n):
            assert run_word(AUT, start, word) == has_repeat(word)


def test_sampled_long_words_agree():
    rng = random.Random(0)
    for _ in range(200):
        word = [rng.randrange(8) for _ in range(rng.randint(0, 7))]
        assert run_word(AUT, STAR0, word) == run_word(AUT, STAR1, word) == has_repeat(word)


# --- canonical representatives ---------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(fin_sets(), fin_sets(), st.integers(0, 6), st.integers(0, 6))
def test_canonical_pair_invariant_under_renaming(u, v, x, y):
    pi = Perm.swap(x, y)
    assert canonical_pair(u, v) == canonical_pair(apply_perm(pi, u), apply_perm(pi, v))
    assert NomPair.of(u, v) == NomPair.of(apply_perm(pi, u), apply_perm(pi, v))


# --- equivalence up to congruence ------------------------------------------------------------

def expected_four():
    return {NomPair.of(STAR0, STAR1)} | {NomPair.of(x, y) for x, y in spanning_hints()}


@pytest.fixture(scope="module")
def proof():
    return check_nom_equivalence(AUT, STAR0, STAR1, hints=spanning_hints())


def test_four_pair_certificate(proof):
    assert proof.proved
    assert set(proof.relation) == expected_four() and len(proof.relation) == 4


def test_rewrite_chain_pair_is_replayed(proof):
    # ({*, a}, {a} ∪ (A' ∖ {a'})) follows from the relation by rewriting
    target = (S(E("star0"), E("A", a)), S(E("A", a), A_=frozenset({(a,)})))
    pool = [tuple(p.sides()) for p in proof.relation]
    w = cgr_witness_equivariant(target, pool)
    assert w is not None and replay_cgr_equivariant(target, pool, w)
    assert w["left"] and w["right"]
    tampered = {"left": w["left"][:-1], "right": w["right"]}
    assert not replay_cgr_equivariant(target, pool, tampered)
    chain = [j for j in proof.justifications if j[2] == NomPair.of(*target)]
    assert chain and all(j[3][0] == "closure" for j in chain)


def test_rewrite_needs_the_relation():
    target = (S(E("star0"), E("A", a)), S(E("A", a), A_=frozenset({(a,)})))
    assert cgr_witness_equivariant(target, []) is None


def test_without_technique_inconclusive():
    out = check_nom_equivalence(AUT, STAR0, STAR1, technique="none", budget=200)
    assert out.verdict is Verdict.INCONCLUSIVE


def test_without_hints_never_refutes():
    out = check_nom_equivalence(AUT, STAR0, STAR1, budget=12)
    assert out.verdict in (Verdict.PROVED, Verdict.INCONCLUSIVE)


def test_inequivalent_refuted_with_validated_word():
    out = check_nom_equivalence(AUT, STAR0, S(E("A", a)))
    assert out.verdict is Verdict.REFUTED
    assert out.oracle["counterexample_validated"]
    word = out.oracle["word"]
    assert run_word(AUT, STAR0, word) != run_word(AUT, S(E("A", a)), word)


def test_output():
    assert set_output(AUT, S(E("top"))) and not set_output(AUT, STAR0)


def test_render():
    assert render_set(AUT, S(E("A", a), A_=frozenset({(a,)}))) == "{a} ∪ (A' ∖ {a'})"
    assert render_set(AUT, EMPTY) == "∅"


# --- file format -------------------------------------------------------------------------------

def test_parse_input_matches_builtin(inputs):
    nf = parse_nominal((inputs / "duplicate.nom").read_text())
    assert nf.aut == AUT
    (q,) = nf.queries
    assert (q.left, q.right) == (STAR0, STAR1)
    assert len(q.hints) == 3 and {NomPair.of(x, y) for x, y in q.hints} == {NomPair.of(x, y) for x, y in spanning_hints()}


@pytest.mark.parametrize("text, fragment", [
    ("orbit x arity 1 out 0\notrans x pattern fresh -> elem(x, s1)", "rules must cover"),
    ("orbit x arity 0 out 0\notrans x pattern fresh -> elem(y)", "unknown orbit"),
    ("orbit x arity 0 out 0\notrans x pattern fresh -> elem(x)\nhint elem(x) == elem(x)", "before any"),
    ("orbit x arity 0 out 0\notrans x pattern fresh -> elem(x)\nnomequiv elem(x) == elem(z) upto none", "unknown orbit"),
    ("frob", "unknown directive"),
])
def test_parse_errors(text, fragment):
    with pytest.raises(ParseError, match=fragment):
        parse_nominal(text)
