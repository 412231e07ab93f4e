"""Command-line front end.

Exit codes: 0 proved / holds / replay OK, 1 refuted / fails, 2 inconclusive or
accepted by an unsound technique, 64 usage error, 65 input parse error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import certificate as C
from .lattice import DEFAULT_BUDGET, Verdict

EXIT_OK, EXIT_FAIL, EXIT_UNKNOWN, EXIT_USAGE, EXIT_PARSE = 0, 1, 2, 64, 65

CHECKS = {
    # command: (query kinds in the file, default technique when the file gives none)
    "nfa-equiv": ("equiv", "congruence"),
    "wa-incl": ("incl", "ctx"),
    "diverge": ("diverge", "bhv-ctxl"),
    "sim": ("sim", None),
    "weak-bisim": ("weakbisim", None),
    "nom-equiv": ("nomequiv", None),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="upto", description="Coinduction up-to checkers with replayable certificates.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in CHECKS:
        c = sub.add_parser(name, help=f"run the {name} queries of an input file")
        c.add_argument("input", help="input file")
        c.add_argument("--technique", help="override the technique given in the file")
        c.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="maximum popped pairs")
        c.add_argument("--query", type=int, help="run only the N-th matching query (1-based)")
        c.add_argument("--format", choices=("text", "structured"), default="text")
        c.add_argument("--certificate", help="also write the structured certificate to this file")
        if name == "wa-incl":
            c.add_argument("--word-audit-len", type=int, default=8)
        if name in ("sim", "weak-bisim"):
            c.add_argument("--bound", type=int, default=10_000, help="exploration bound for fragments")

    a = sub.add_parser("audit", help="brute-force side-condition audits")
    a.add_argument("condition", choices=("star", "star2", "star3", "compat", "soundness", "distributive",
                                         "congruence", "ac", "suite"))
    a.add_argument("--lifting", default="canonical", help="canonical | weighted | lax | weak")
    a.add_argument("--instance", default="q-canonical", help="distributive-law instance")
    a.add_argument("--closure", default="Trn", help="closure for compat: Id Rfl Sym Trn Eqv Bhv Slf Full")
    a.add_argument("--step", default="bisimulation", help="bisimulation | simulation | weak")
    mode = a.add_mutually_exclusive_group()
    mode.add_argument("--exhaustive", action="store_true")
    mode.add_argument("--samples", type=int)
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--format", choices=("text", "structured"), default="text")

    r = sub.add_parser("replay", help="re-validate a certificate against its input file")
    r.add_argument("certificate")
    r.add_argument("input")
    return p


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(argv)
    except UsageError as e:
        print(f"upto: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as e:  # --help
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    try:
        if args.command == "replay":
            return _replay(args)
        if args.command == "audit":
            return _audit(args)
        return _check(args)
    except UsageError as e:
        print(f"upto: usage error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except _InputError as e:
        print(f"upto: {e}", file=sys.stderr)
        return EXIT_PARSE


class _InputError(Exception):
    pass


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise _InputError(f"cannot read {path}: {e.strerror}") from None


def _parse(command: str, text: str):
    from .gsos import GsosError
    from .nominal import NominalError
    from .wa_format import ParseError
    try:
        if command in ("nfa-equiv", "wa-incl"):
            from .wa_format import parse_wa
            return parse_wa(text)
        if command in ("diverge", "sim", "weak-bisim"):
            from .gsos_format import parse_gsos
            return parse_gsos(text)
        from .nominal_format import parse_nominal
        return parse_nominal(text)
    except (ParseError, GsosError, NominalError) as e:
        raise _InputError(f"parse error: {e}") from None


def _jobs(command: str, parsed, technique, budget: int, extra: dict, query_line=None) -> list:
    from .gsos import GsosError
    from .nominal import NominalError
    from .weighted import ConfigurationError
    kind, default = CHECKS[command]
    queries = [q for q in parsed.queries if getattr(q, "kind", "nomequiv") == kind]
    if query_line is not None:
        queries = [q for q in queries if q.line == query_line]
    jobs = []
    for q in queries:
        tech = technique or getattr(q, "technique", None) or default
        try:
            if command in ("nfa-equiv", "wa-incl"):
                jobs.append(C.weighted_job(command, parsed, q, tech, budget, extra.get("word_audit_len", 8)))
            elif command == "diverge":
                jobs.append(C.divergence_job(parsed, q, tech, budget))
            elif command in ("sim", "weak-bisim"):
                jobs.append(C.game_job("sim" if command == "sim" else "weak", parsed, q, tech, budget,
                                       extra.get("bound", 10_000)))
            else:
                jobs.append(C.nominal_job(parsed, q, tech, budget))
        except (ConfigurationError, GsosError, NominalError) as e:
            raise UsageError(f"query on line {q.line}: {e}") from None
    return jobs


def _exit_for(verdicts) -> int:
    vs = list(verdicts)
    if any(v == Verdict.REFUTED.value for v in vs):
        return EXIT_FAIL
    if any(v in (Verdict.INCONCLUSIVE.value, Verdict.UNSOUND_ACCEPT.value) for v in vs):
        return EXIT_UNKNOWN
    return EXIT_OK


def _check(args) -> int:
    text = _read(args.input)
    parsed = _parse(args.command, text)
    if args.budget < 1:
        raise UsageError("--budget must be positive")
    extra = {"word_audit_len": getattr(args, "word_audit_len", 8), "bound": getattr(args, "bound", 10_000)}
    jobs = _jobs(args.command, parsed, args.technique, args.budget, extra)
    if args.query is not None:
        if not 1 <= args.query <= len(jobs):
            raise UsageError(f"--query {args.query}: the file has {len(jobs)} matching queries")
        jobs = [jobs[args.query - 1]]
    if not jobs:
        raise UsageError(f"no {CHECKS[args.command][0]} queries in {args.input}")
    records, timings = [], []
    for job in jobs:
        t0 = time.perf_counter()
        try:
            outcome = job.run()
        except Exception as e:
            from .gsos import BoundExceeded
            from .nominal import RepresentationOverflow
            if isinstance(e, (BoundExceeded, RepresentationOverflow)):
                print(f"upto: query on line {job.line}: {e}", file=sys.stderr)
                return EXIT_UNKNOWN
            raise
        timings.append(time.perf_counter() - t0)
        records.append(C.result_record(job, outcome))
    doc = C.build_certificate(args.command, Path(args.input).name, text, records)
    if args.certificate:
        Path(args.certificate).write_text(C.dumps(doc), encoding="utf-8")
    if args.format == "structured":
        sys.stdout.write(C.dumps(doc))
    else:
        for rec, secs in zip(records, timings):
            _print_record(rec, secs)
    return _exit_for(r["verdict"] for r in records)


def _pair_text(p) -> str:
    return f"({p[0]}, {p[1]})" if isinstance(p, list) else str(p)


def _print_record(rec: dict, secs: float) -> None:
    q = rec["query"]
    print(f"query (line {q['line']}): {q['text']}")
    marker = "" if rec["sound_technique"] else "  [unsound technique]"
    print(f"  verdict: {rec['verdict']}  (technique {rec['technique']}, "
          f"evidence {rec['compat_evidence']}){marker}")
    st = rec["stats"]
    print(f"  pairs popped: {st['popped']}, in relation: {st['added']}, time {secs:.3f}s")
    if rec["verdict"] in (Verdict.PROVED.value, Verdict.UNSOUND_ACCEPT.value):
        print(f"  certificate ({len(rec['relation'])}):")
        for p in rec["relation"]:
            print(f"    {_pair_text(p)}")
    if rec["counterexample"]:
        cx = rec["counterexample"]
        word = " ".join(cx["word"]) or "ε"
        print(f"  counterexample: {_pair_text(cx['pair'])} after word {word}; {cx['reason']}")
    if rec["oracle"]:
        print(f"  oracle: {json.dumps(rec['oracle'], ensure_ascii=False)}")


# --- replay ---------------------------------------------------------------------------------

def _replay(args) -> int:
    try:
        doc = json.loads(_read(args.certificate))
    except json.JSONDecodeError as e:
        raise _InputError(f"certificate is not valid JSON: {e}") from None
    text = _read(args.input)
    command = doc.get("command")
    if command not in CHECKS:
        print(f"replay FAILED: unknown command {command!r}", file=sys.stderr)
        return EXIT_FAIL
    parsed = _parse(command, text)

    def jobs_for(cmd, _text, rec):
        line = rec.get("query", {}).get("line")
        found = _jobs(cmd, parsed, rec.get("technique"), DEFAULT_BUDGET, {}, query_line=line)
        if not found:
            raise C.ReplayError(f"no {CHECKS[cmd][0]} query on line {line} of the input")
        return found[0]

    try:
        messages = C.replay_document(doc, text, jobs_for)
    except C.ReplayError as e:
        print(f"replay FAILED: {e}")
        return EXIT_FAIL
    except UsageError as e:
        print(f"replay FAILED: {e}")
        return EXIT_FAIL
    for rec, msg in zip(doc["results"], messages):
        print(f"line {rec['query']['line']}: {rec['verdict']}: {msg}")
    print("replay OK")
    return EXIT_OK


# --- audit ------------------------------------------------------------------------------------

def _audit(args) -> int:
    from . import audit as A
    samples = args.samples if args.samples is not None else 1000
    mode = "exhaustive" if args.exhaustive else ("sampled" if args.samples is not None else "auto")
    reports = []
    if args.condition in ("star", "star2", "star3"):
        if args.lifting not in A.LIFTINGS:
            raise UsageError(f"--lifting must be one of {', '.join(A.LIFTINGS)}")
        reports.append(A.audit_star_conditions(args.lifting, args.condition, mode=mode, samples=samples,
                                               seed=args.seed))
    elif args.condition == "distributive":
        if args.instance not in A.DISTRIBUTIVE_INSTANCES:
            raise UsageError(f"--instance must be one of {', '.join(A.DISTRIBUTIVE_INSTANCES)}")
        reports.append(A.audit_distributive_lifting(args.instance, samples=min(samples, 1000), seed=args.seed))
    elif args.condition == "compat":
        closure, step = _closure_and_step(A, args.closure, args.step)
        rep = A.audit_compatibility(closure, step)
        if "closure" in rep.stats:
            rep = A.replace(rep, stats={**rep.stats, "closure": rep.stats["closure"].name,
                                        "evidence": rep.stats["closure"].compat_evidence})
        reports.append(rep)
    elif args.condition == "soundness":
        closure, step = _closure_and_step(A, args.closure, args.step)
        try:
            reports.append(A.audit_soundness_and_preservation(closure, step))
        except A.PreconditionError as e:
            print(f"precondition unmet: {e}", file=sys.stderr)
            return EXIT_FAIL
    elif args.condition == "congruence":
        reports.append(A.audit_congruence(pairs=min(samples, 100), seed=args.seed))
    elif args.condition == "ac":
        reports.append(A.audit_ac_soundness(samples=min(samples, 100), seed=args.seed))
    else:
        reports = [r for _, r in A.run_suite(samples=samples, seed=args.seed)]
    if args.format == "structured":
        sys.stdout.write(C.dumps({"schema": C.SCHEMA, "command": "audit",
                                  "reports": [r.to_dict() for r in reports]}))
    else:
        for r in reports:
            print(f"{r.condition:>22} {'holds' if r.holds else 'FAILS':>6}  {r.instance}")
            if r.witness:
                print(f"{'':>30}witness: {json.dumps(C.jsonable(r.witness), ensure_ascii=False)}")
    return EXIT_OK if all(r.holds for r in reports) else EXIT_FAIL


def _closure_and_step(A, closure_name: str, step_name: str):
    from .lts import bisimulation_step, simulation_step, weak_bisimulation_step
    lts = A.weak_counterexample_lts() if step_name == "weak" else A.fixed_lts()
    steps = {"bisimulation": bisimulation_step, "simulation": simulation_step, "weak": weak_bisimulation_step}
    if step_name not in steps:
        raise UsageError(f"--step must be one of {', '.join(steps)}")
    suite = {c.name: c for c in A.closure_suite(lts)}
    if closure_name not in suite:
        raise UsageError(f"--closure must be one of {', '.join(suite)}")
    return suite[closure_name], steps[step_name](lts)


if __name__ == "__main__":
    sys.exit(main())
