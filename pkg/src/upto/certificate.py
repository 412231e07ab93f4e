"""Certificates: serialisation of check outcomes and replay without search.

A certificate is a JSON document (schema ``upto/1``) holding, per query, the
final relation, the trace of processed pairs and, for every successor of every
pair in the relation, how it is covered: either it is itself in the relation
or the technique's membership witness is embedded (LP coefficients, rewrite
steps, AC contexts).  Replay re-parses the input, re-runs each local check and
verifies the embedded witnesses; no solver or saturation search is re-run.
"""
from __future__ import annotations

import hashlib
import json
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Callable, Optional

from .lattice import CheckOutcome, Verdict

SCHEMA = "upto/1"


class ReplayError(Exception):
    """First point where a certificate and its input disagree."""


def sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def jsonable(x):
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, Verdict):
        return x.value
    if isinstance(x, dict):
        return {str(k): jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [jsonable(v) for v in x]
    if isinstance(x, (set, frozenset)):
        return sorted((jsonable(v) for v in x), key=repr)
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    return str(x)


@dataclass
class Job:
    """Everything needed to run one query and to replay its certificate."""

    command: str
    technique: str
    line: int
    text: str
    run: Callable[[], CheckOutcome]
    encode: Callable[[Any], Any]
    decode: Callable[[Any], Any]
    initial: list
    local_ok: Callable[[Any], bool]
    check_successors: Callable[[Any, list], Optional[str]]
    verify_closure: Callable[[Any, list, Any], bool]
    decode_witness: Callable[[Any], Any] = lambda w: w
    encode_label: Callable[[Any], Any] = lambda l: l
    check_refutation: Callable[[dict], Optional[str]] = lambda cx: None
    sound: bool = True
    evidence: str = "theorem-cited"


# --- building certificates --------------------------------------------------------------

def result_record(job: Job, outcome: CheckOutcome) -> dict:
    enc = job.encode
    rec = {
        "query": {"line": job.line, "text": job.text},
        "technique": job.technique,
        "sound_technique": job.sound,
        "compat_evidence": job.evidence,
        "verdict": outcome.verdict.value,
        "relation": [enc(p) for p in outcome.relation],
        "trace": [{"pair": enc(t.pair), "action": t.action,
                   "word": [job.encode_label(l) for l in t.word]} for t in outcome.trace],
        "justifications": [
            {"from": i, "label": None if label is None else job.encode_label(label), "pair": enc(q),
             "by": reason[0], **({"index": reason[1]} if reason[0] == "in-relation"
                                 else {"witness": jsonable(_encode_witness(reason[1], enc))})}
            for i, label, q, reason in outcome.justifications],
        "counterexample": None,
        "oracle": jsonable(outcome.oracle),
        "stats": {"popped": outcome.popped, "added": outcome.added, **jsonable(outcome.stats)},
    }
    if outcome.counterexample is not None:
        cx = outcome.counterexample
        rec["counterexample"] = {"pair": enc(cx["pair"]), "word": [job.encode_label(l) for l in cx["word"]],
                                 "reason": jsonable(_encode_reason(cx["reason"], enc))}
    return rec


def _encode_witness(w, enc):
    # divergence witnesses carry terms
    if isinstance(w, dict) and "element" in w:
        return {"element": enc(w["element"]), "context": enc(w["context"])}
    return w


def _encode_reason(reason, enc):
    if not isinstance(reason, dict):
        return reason
    out = {}
    for k, v in reason.items():
        if k == "transition":
            out[k] = [enc(v[0]), v[1], enc(v[2])]
        elif k in ("unmatched_by", "no-tau-successor"):
            out[k] = enc(v)
        elif k == "sets":
            out[k] = None
        else:
            out[k] = v
    return {k: v for k, v in out.items() if v is not None}


def build_certificate(command: str, input_name: str, input_text: str, records: list) -> dict:
    return {"schema": SCHEMA, "command": command,
            "input": {"file": input_name, "sha256": sha256(input_text)},
            "results": records}


def dumps(doc: dict) -> str:
    return json.dumps(doc, indent=2, ensure_ascii=False, sort_keys=False) + "\n"


# --- replay -----------------------------------------------------------------------------

def replay_record(job: Job, rec: dict) -> str:
    """Validate one result record; raises ReplayError at the first mismatch."""
    where = f"query line {job.line}"
    if rec.get("technique") != job.technique:
        raise ReplayError(f"{where}: technique {rec.get('technique')!r} does not match {job.technique!r}")
    verdict = rec.get("verdict")
    try:
        relation = [job.decode(p) for p in rec["relation"]]
    except Exception as e:  # malformed pair text
        raise ReplayError(f"{where}: cannot read relation pair: {e}") from None
    for k, p in enumerate(relation):
        if not job.local_ok(p):
            raise ReplayError(f"{where}: relation pair #{k} {rec['relation'][k]} fails its local check")
    if verdict == Verdict.REFUTED.value:
        cx = rec.get("counterexample")
        if not cx:
            raise ReplayError(f"{where}: refuted without a counterexample")
        problem = job.check_refutation(cx)
        if problem:
            raise ReplayError(f"{where}: counterexample does not replay: {problem}")
        return "refutation confirmed"
    if verdict == Verdict.INCONCLUSIVE.value:
        return "inconclusive; nothing certified"
    if verdict not in (Verdict.PROVED.value, Verdict.UNSOUND_ACCEPT.value):
        raise ReplayError(f"{where}: unknown verdict {verdict!r}")
    expected = Verdict.PROVED.value if job.sound else Verdict.UNSOUND_ACCEPT.value
    if verdict != expected:
        raise ReplayError(f"{where}: verdict {verdict!r} but the technique requires {expected!r}")

    by_source: dict = {}
    for k, j in enumerate(rec["justifications"]):
        try:
            q = job.decode(j["pair"])
        except Exception as e:
            raise ReplayError(f"{where}: justification #{k}: cannot read pair: {e}") from None
        i = j["from"]
        if not -1 <= i < len(relation):
            raise ReplayError(f"{where}: justification #{k} refers to relation pair {i}")
        if j["by"] == "in-relation":
            idx = j.get("index")
            if not isinstance(idx, int) or not 0 <= idx < len(relation) or relation[idx] != q:
                raise ReplayError(f"{where}: justification #{k}: {j['pair']} is not relation pair {idx}")
        elif j["by"] == "closure":
            try:
                witness = job.decode_witness(j.get("witness"))
                ok = job.verify_closure(q, relation, witness)
            except (KeyError, IndexError, TypeError, ValueError) as e:
                raise ReplayError(f"{where}: justification #{k}: malformed witness: {e}") from None
            if not ok:
                raise ReplayError(f"{where}: justification #{k}: {j['pair']} is not covered by the "
                                  f"{job.technique} closure of the relation")
        else:
            raise ReplayError(f"{where}: justification #{k}: unknown kind {j['by']!r}")
        by_source.setdefault(i, []).append((j["label"], q))

    initial_cov = {q for _, q in by_source.get(-1, [])}
    for q in job.initial:
        if q not in relation and q not in initial_cov:
            raise ReplayError(f"{where}: initial pair {job.encode(q)} is neither in the relation nor covered")
    for k, p in enumerate(relation):
        problem = job.check_successors(p, by_source.get(k, []))
        if problem:
            raise ReplayError(f"{where}: relation pair #{k} {rec['relation'][k]}: {problem}")
    return f"{len(relation)} pairs, {len(rec['justifications'])} obligations checked"


def replay_document(doc: dict, input_text: str, jobs_for: Callable[[str, str, dict], Job]) -> list:
    """Replay a whole certificate; returns one message per result."""
    if doc.get("schema") != SCHEMA:
        raise ReplayError(f"unsupported schema {doc.get('schema')!r}")
    digest = sha256(input_text)
    if doc.get("input", {}).get("sha256") != digest:
        raise ReplayError("input file does not match the certificate (sha256 differs)")
    out = []
    for rec in doc.get("results", []):
        job = jobs_for(doc["command"], input_text, rec)
        out.append(replay_record(job, rec))
    return out


# --- domain adapters -----------------------------------------------------------------------

def _fr(x) -> Fraction:
    return Fraction(x)


def weighted_job(command: str, wf, query, technique: str, budget: int, word_audit_len: int = 8) -> Job:
    from . import weighted as W
    from .wa_format import parse_vec
    aut = wf.aut
    s = aut.semiring
    states = {aut.name(i): i for i in range(aut.states.size)}

    def encode(p):
        return [aut.render(p[0]), aut.render(p[1])]

    def decode(obj):
        return (parse_vec(obj[0], states, s), parse_vec(obj[1], states, s))

    incl = command == "wa-incl"
    if incl:
        W.inclusion_closure(aut, technique)  # configuration check up front

        def run():
            return W.check_inclusion(aut, query.left, query.right, technique, budget, word_audit_len)
    else:
        closure = W.equivalence_closure(technique, aut)

        def run():
            return W.check_nfa_equivalence(aut, query.left.support(), query.right.support(), technique, budget)

    def out_ok(p):
        a, b = W.linear_output(aut, p[0]), W.linear_output(aut, p[1])
        return s.leq(a, b) if incl else a == b

    def succs(p):
        return [(a, (W.linear_step(aut, p[0], a), W.linear_step(aut, p[1], a))) for a in aut.alphabet]

    def check_successors(p, recorded):
        if recorded != succs(p):
            return "recorded successors differ from the automaton's transitions"
        return None

    reflexive = technique.startswith("r")
    diag = tuple(range(aut.states.size)) if reflexive else ()

    def refs_ok(witness, refs):
        return all(kind == "r" or (kind == "d" and reflexive) for kind, _ in refs)

    if incl:
        if technique == "none":
            def verify(q, pool, w):
                return False
            decode_w = _identity
        elif s.name == "bool":
            def verify(q, pool, w):
                return refs_ok(w, w) and W.verify_union_cover(q, pool, w, diag)
            decode_w = lambda w: [tuple(r) for r in w]
        elif technique.endswith("mctx"):
            def verify(q, pool, w):
                return refs_ok(w, [r for r, _, _ in w]) and W.verify_combination(q, pool, w, s, monotone=True)
            decode_w = lambda w: [(tuple(r), _fr(c), _fr(d)) for r, c, d in w]
        else:
            def verify(q, pool, w):
                return refs_ok(w, [r for r, _ in w]) and W.verify_combination(q, pool, w, s)
            decode_w = lambda w: [(tuple(r), _fr(c)) for r, c in w]
    else:
        if technique == "congruence":
            def verify(q, pool, w):
                return W.replay_cgr(q, pool, w)
            decode_w = lambda w: {side: [tuple(x) for x in w[side]] for side in ("left", "right")}
        else:
            def verify(q, pool, w):
                return technique != "none" and closure.member(q, pool)
            decode_w = _identity

    def check_refutation(cx):
        word = tuple(cx["word"])
        if any(a not in aut.alphabet for a in word):
            return "word uses letters outside the alphabet"
        v, w = (query.left, query.right)
        a, b = W.word_weight(aut, v, word), W.word_weight(aut, w, word)
        bad = not s.leq(a, b) if incl else a != b
        return None if bad else f"word {''.join(word) or 'ε'} gives {a} and {b}"

    return Job(command, technique, query.line, query.text, run, encode, decode, [(query.left, query.right)],
               out_ok, check_successors, verify, decode_w, check_refutation=check_refutation)


def _identity(x):
    return x


def divergence_job(gf, query, technique: str, budget: int) -> Job:
    from .gsos import (Lts, ac_normal_form, check_divergence, left_ctx_member, parse_term,
                       render_term)
    from .lts import TAU
    lts = Lts(gf.spec)

    def decode(obj):
        t = parse_term(obj)
        gf.spec.check_term(t)
        return t

    def check_successors(t, recorded):
        if len(recorded) != 1:
            return "expected exactly one tau-successor obligation"
        label, u = recorded[0]
        if label != TAU or u not in lts.moves(t, TAU):
            return f"{render_term(u)} is not a tau-successor"
        return None

    def verify(q, pool, w):
        if technique == "bhv-ctxl":
            e, c = decode(w["element"]), decode(w["context"])
            return e in pool and left_ctx_member(c, [e]) and ac_normal_form(c) == ac_normal_form(q)
        if technique == "ctxl":
            return left_ctx_member(q, pool)
        return False

    def check_refutation(cx):
        t = decode(cx["pair"])
        return None if not lts.moves(t, TAU) else f"{cx['pair']} has a tau-successor"

    return Job("diverge", technique, query.line, query.text,
               lambda: check_divergence(gf.spec, list(query.items), technique, budget),
               render_term, decode, list(dict.fromkeys(query.items)),
               lambda t: bool(lts.moves(t, TAU)), check_successors, verify,
               check_refutation=check_refutation)


def game_job(kind: str, gf, query, technique: str, budget: int, bound: int = 10_000) -> Job:
    from .gsos import (Lts, check_simulation_upto, check_weak_bisim_upto, game_closure, parse_term,
                       render_term)
    spec = gf.spec
    lts = Lts(spec)
    pairs = list(query.items)
    frag = lts.explore([u for p in pairs for u in p], bound)
    closure = game_closure(kind, technique, frag)

    def encode(p):
        return [render_term(p[0]), render_term(p[1])]

    def decode(obj):
        p = (parse_term(obj[0]), parse_term(obj[1]))
        for t in p:
            spec.check_term(t)
        return p

    def answers(y, l):
        return lts.moves(y, l) if kind == "sim" else lts.weak_moves(y, l, bound)

    def obligations(p):
        x, y = p
        out = [(l, x2, y, False) for l, x2 in lts.transitions(x)]
        if kind == "weak":
            out += [(l, y2, x, True) for l, y2 in lts.transitions(y)]
        return out

    def local_ok(p):
        return all(answers(other, l) for l, _, other, _ in obligations(p))

    def check_successors(p, recorded):
        obl = obligations(p)
        if len(recorded) != len(obl):
            return f"{len(recorded)} successor obligations recorded, {len(obl)} moves to answer"
        for (l, mine, other, flip), (label, q) in zip(obl, recorded):
            got_mine, answer = (q[1], q[0]) if flip else (q[0], q[1])
            if label != l or got_mine != mine or answer not in answers(other, l):
                return f"move -{l}-> {render_term(mine)} is not answered by {encode(q)}"
        return None

    def verify(q, pool, w):
        return technique != "none" and closure.member(q, pool)

    def check_refutation(cx):
        r = cx.get("reason") or {}
        if "transition" not in r:
            return "missing transition witness"
        src, l, dst = r["transition"]
        src, dst = parse_term(src), parse_term(dst)
        other = parse_term(r["unmatched_by"])
        if (l, dst) not in lts.transitions(src):
            return "recorded transition does not exist"
        return None if not answers(other, l) else f"{r['unmatched_by']} can answer -{l}->"

    run = (lambda: check_simulation_upto(spec, pairs, technique, budget, bound)) if kind == "sim" else (
        lambda: check_weak_bisim_upto(spec, pairs, technique, budget, bound))
    return Job("sim" if kind == "sim" else "weak-bisim", technique, query.line, query.text, run, encode, decode,
               list(dict.fromkeys(pairs)), local_ok, check_successors, verify,
               check_refutation=check_refutation, sound=closure.sound, evidence=closure.compat_evidence)


def nominal_job(nf, query, technique: str, budget: int) -> Job:
    from .nominal import (NomPair, check_nom_equivalence, name_str, parse_name, relevant_letters,
                          render_set_expr, replay_cgr_equivariant, run_word, set_output, set_step)
    from .nominal_format import concrete_set, parse_set_expr
    aut = nf.aut

    def encode(p):
        return [render_set_expr(p.left), render_set_expr(p.right)]

    def decode(obj):
        u = concrete_set(parse_set_expr(obj[0], 0, False), aut, 0)
        v = concrete_set(parse_set_expr(obj[1], 0, False), aut, 0)
        return NomPair.of(u, v)

    def succs(p):
        x, y = p.left, p.right
        return [NomPair.of(set_step(aut, x, a), set_step(aut, y, a)) for a in relevant_letters(x, y)]

    def check_successors(p, recorded):
        if Counter(q for _, q in recorded) != Counter(succs(p)):
            return "recorded successors differ from the relevant-letter successors"
        return None

    def verify(q, pool, w):
        return technique == "congruence" and replay_cgr_equivariant(tuple(q), [tuple(x) for x in pool], w)

    def decode_w(w):
        return {side: [(int(i), tuple((int(a), int(b)) for a, b in pi), d) for i, pi, d in w[side]]
                for side in ("left", "right")}

    def check_refutation(cx):
        try:
            word = tuple(parse_name(a) for a in cx["word"])
        except Exception as e:
            return str(e)
        ok = run_word(aut, query.left, word) != run_word(aut, query.right, word)
        return None if ok else "the word is accepted from both sides or from neither"

    init = [NomPair.of(query.left, query.right)] + [NomPair.of(x, y) for x, y in query.hints]
    return Job("nom-equiv", technique, query.line, query.text,
               lambda: check_nom_equivalence(aut, query.left, query.right, technique, budget, query.hints),
               encode, decode, init, lambda p: set_output(aut, p.left) == set_output(aut, p.right),
               check_successors, verify, decode_w, encode_label=name_str, check_refutation=check_refutation)
