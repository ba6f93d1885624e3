"""Command line interface.

Exit codes: 0 verdict yes / success, 1 verdict no, 2 usage or parse error,
3 budget or timeout.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from typing import Sequence

from . import automata as fa
from . import coffee, dot, modelio, oracle, patterns, pushdown, report, synth
from . import relations as rl
from .automata import BudgetExceeded
from .modelio import ParseError
from .relations import Rel
from .verifier import ParamSystem, VerifyReport

log = logging.getLogger("symmpat")

EXIT_YES, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

BUILTIN_PATTERNS = ("identity", "coffee-can")


class UsageError(Exception):
    pass


# -- loading -------------------------------------------------------------------------

def load_pattern(ref: str, sigma=None) -> Rel:
    """A file, a library name (rot@i, swap@i) or a built-in pattern name."""
    if os.path.exists(ref):
        with open(ref, encoding="utf-8") as fh:
            return modelio.parse_pattern(fh.read(), sigma)
    if ref == "coffee-can":
        return coffee.coffee_can_pattern()
    if sigma is None:
        raise UsageError(f"pattern {ref!r} needs --model for its alphabet")
    if ref == "identity":
        return rl.basic_rel("identity", sigma)
    try:
        return patterns.parse_pattern_name(ref).build(sigma)
    except ValueError:
        raise UsageError(f"no pattern file or built-in pattern named {ref!r}") from None


def load_model(ref: str) -> ParamSystem:
    if ref not in modelio.BUILTIN_NAMES and not os.path.exists(ref):
        raise UsageError(f"unknown model {ref!r}; built-ins: {', '.join(modelio.BUILTIN_NAMES)}")
    return modelio.load_model(ref)


def load_hints(ref: str, sys: ParamSystem):
    if ref == "builtin":
        return modelio.builtin_hints(sys.name) or []
    with open(ref, encoding="utf-8") as fh:
        return modelio.parse_hints(fh.read(), sys.alphabet)


# -- output ------------------------------------------------------------------------------

def emit(args, payload: dict, text: str, dot_obj=None):
    if args.output == "json":
        print(json.dumps(payload, indent=2, ensure_ascii=False))
    elif args.output == "dot":
        if dot_obj is None:
            raise UsageError("this command has no DOT output")
        print(dot.to_dot(dot_obj), end="")
    else:
        print(text)


def report_text(rep: VerifyReport) -> str:
    lines = [f"verdict: {rep.verdict}"]
    if rep.gate:
        lines.append(f"failed check: {rep.gate}")
    if rep.counterexample:
        lines.append(f"counterexample: {rep.counterexample}")
    secs = rep.stats.get("seconds")
    if secs is not None:
        lines.append(f"time: {secs}s")
    return "\n".join(lines)


def verdict_code(ok: bool) -> int:
    return EXIT_YES if ok else EXIT_NO


# -- commands ----------------------------------------------------------------------------

def cmd_verify(args) -> int:
    sys_ = load_model(args.model)
    if args.reflection:
        pda = pushdown.build_reflection_pda(sys_.alphabet)
        rep = pushdown.verify_functional_hucf(sys_, pda)
        emit(args, rep.to_json(), report_text(rep), pda)
        return verdict_code(rep.ok)
    from .verifier import verify_symmetry_pattern

    ref = args.lib or args.pattern
    if ref is None:
        raise UsageError("verify needs --pattern, --lib or --reflection")
    r = load_pattern(ref, sys_.alphabet)
    rep = verify_symmetry_pattern(sys_, r, args.mode)
    emit(args, rep.to_json(), report_text(rep), r)
    return verdict_code(rep.ok)


def cmd_synth(args) -> int:
    sys_ = load_model(args.model)
    hints = load_hints(args.hints, sys_) if args.hints else ()
    safety = None
    if args.init or args.bad:
        if not (args.init and args.bad):
            raise UsageError("--init and --bad go together")
        safety = (modelio.parse_regex(args.init, sys_.alphabet), modelio.parse_regex(args.bad, sys_.alphabet))
    try:
        cfg = synth.SynthConfig(mode=args.mode, n_min=args.n_min, n_max=args.n_max, hints=hints,
                                image_finite=args.image_finite, non_identity=not args.allow_identity,
                                max_rounds=args.max_rounds, sat_timeout=args.sat_timeout,
                                on_timeout=args.on_timeout,
                                time_budget=args.time_budget, sat_cmd=args.sat_cmd,
                                dump_dir=args.dump_cnf, safety=safety)
    except ValueError as e:
        raise UsageError(str(e)) from None

    def trail(ev):
        log.info("n=%d round=%d %s %s", ev.n, ev.round, ev.event,
                 " ".join(f"{k}={v}" for k, v in ev.detail.items() if k != "counterexample"))

    res = synth.cegar_loop(sys_, cfg, log=trail)
    if res.pattern is not None and args.save:
        with open(args.save, "w", encoding="utf-8") as fh:
            fh.write(modelio.format_pattern(res.pattern, f"{sys_.name}-{args.mode}"))
    text = [f"status: {res.status}", f"rounds: {res.stats['rounds']}", f"time: {res.stats['seconds']}s"]
    if res.pattern is not None:
        text.insert(1, f"states: {res.n}")
        text.append(modelio.format_pattern(res.pattern, f"{sys_.name}-{args.mode}"))
    emit(args, res.to_json(), "\n".join(text), res.pattern)
    if res.status == "found":
        return EXIT_YES
    return EXIT_BUDGET if res.status == "timeout" else EXIT_NO


def cmd_image(args) -> int:
    from .verifier import compute_image

    sys_ = load_model(args.model)
    r = load_pattern(args.pattern, sys_.alphabet)
    img = compute_image(sys_, r)
    finite = fa.is_finite(img.configs)
    payload = {"verdict": "finite" if finite else "infinite", "counterexample": None,
               "stats": {"image_states": img.configs.num_states}}
    lines = [f"image: {'finite' if finite else 'infinite'} ({img.configs.num_states} states)"]
    if finite:
        words = fa.enumerate_words(img.configs, fa.trim(img.configs).num_states)
        payload["configs"] = [list(w) for w in words]
        lines += ["  " + " ".join(w) if w else "  (empty word)" for w in words]
    emit(args, payload, "\n".join(lines), img.configs)
    if args.check_finite:
        return verdict_code(finite)
    return EXIT_YES


def cmd_safety(args) -> int:
    from .verifier import check_safety_via_image

    sys_ = load_model(args.model)
    r = load_pattern(args.pattern, sys_.alphabet)
    init = modelio.parse_regex(args.init, sys_.alphabet)
    bad = modelio.parse_regex(args.bad, sys_.alphabet)
    rep = check_safety_via_image(sys_, r, init, bad)
    lines = [f"verdict: {rep.verdict}", f"reason: {rep.reason}"]
    if rep.trace:
        lines.append("trace: " + " -> ".join(" ".join(w) or "ε" for w in rep.trace))
    emit(args, rep.to_json(), "\n".join(lines))
    return verdict_code(rep.ok)


def cmd_props(args) -> int:
    sys_ = load_model(args.model) if args.model else None
    r = load_pattern(args.pattern, sys_.alphabet if sys_ else None)
    s = sys_.configs if sys_ else fa.universal(r.sigma)
    checks = {
        "functional": rl.check_functional(r),
        "injective": rl.check_injective(r),
        "total": rl.check_total_on(r, s),
        "surjective": rl.check_surjective_on(r, s),
        "length-preserving": rl.check_length_preserving(r),
        "length-decreasing": rl.check_length_decreasing(r),
    }
    payload = {"verdict": "yes" if all(checks.values()) else "no", "counterexample": None,
               "stats": {"states": r.base.num_states},
               "properties": {k: {"holds": bool(v), "witness": modelio_json(v.witness)}
                              for k, v in checks.items()}}
    lines = []
    for k, v in checks.items():
        extra = "" if v else f"  (witness: {v.witness})"
        lines.append(f"{k}: {'yes' if v else 'no'}{extra}")
    emit(args, payload, "\n".join(lines), r)
    return EXIT_YES


def modelio_json(x):
    if x is None:
        return None
    if isinstance(x, (tuple, list)):
        return [modelio_json(y) for y in x]
    return x


def cmd_library_check(args) -> int:
    sys_ = load_model(args.model)
    rows = patterns.library_check(sys_, args.max_prefix)
    payload = {"verdict": "yes" if any(ok for _, ok, _ in rows) else "no", "counterexample": None,
               "stats": {}, "patterns": [{"name": s.name, **rep.to_json()} for s, _, rep in rows]}
    text = "\n".join(f"{s.name:10} {rep.verdict:4} {rep.gate or ''}" for s, _, rep in rows)
    emit(args, payload, text)
    return EXIT_YES if payload["verdict"] == "yes" else EXIT_NO


def cmd_dump(args) -> int:
    sys_ = load_model(args.model)
    if args.pattern:
        obj = load_pattern(args.pattern, sys_.alphabet)
    elif args.action:
        if args.action not in sys_.actions:
            raise UsageError(f"model has no action {args.action!r}")
        obj = sys_.actions[args.action]
    elif args.reflection:
        obj = pushdown.build_reflection_pda(sys_.alphabet)
    else:
        obj = sys_.configs
    text = dot.to_dot(obj)
    if args.dot == "-":
        print(text, end="")
    else:
        with open(args.dot, "w", encoding="utf-8") as fh:
            fh.write(text)
    if args.text:
        print(modelio.format_model(sys_), end="")
    return EXIT_YES


def cmd_oracle(args) -> int:
    sys_ = load_model(args.model)
    sizes = range(1, args.max_len + 1)
    if args.pattern:
        from .verifier import verify_symmetry_pattern

        r = load_pattern(args.pattern, sys_.alphabet)
        rows = []
        for n in sizes:
            got = verify_symmetry_pattern(oracle.sized_system(sys_, n), r, "simulation").ok
            rows.append(oracle.OracleRow(sys_.name, n, args.pattern, got, oracle.brute_verdict(sys_, r, n)))
    else:
        rows = oracle.compare(sys_, sizes)
    agree = all(r.agree for r in rows)
    payload = {"verdict": "yes" if agree else "no", "counterexample": None,
               "stats": {"checked": len(rows), "disagreements": sum(not r.agree for r in rows)},
               "rows": [vars(r) for r in rows]}
    text = "\n".join(f"n={r.n} {r.candidate:16} verifier={r.verifier!s:5} brute={r.brute!s:5}"
                     f"{'' if r.agree else '  MISMATCH'}" for r in rows)
    emit(args, payload, text)
    return verdict_code(agree)


def cmd_dihedral(args) -> int:
    sys_ = load_model(args.model)
    rep = pushdown.check_dihedral_invariance(sys_)
    emit(args, rep.to_json(), report_text(rep))
    return verdict_code(rep.ok)


def cmd_bench(args) -> int:
    rows, tsv, png = report.run_bench(args.out, args.models or None, args.synth, args.time_budget)
    print("\t".join(report.COLUMNS))
    for r in rows:
        print("\t".join(r.cells()))
    print(f"# wrote {tsv} and {png}", file=sys.stderr)
    ok = all(r.verdict in ("yes", "found") for r in rows)
    return verdict_code(ok)


# -- parser ------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=("text", "json", "dot"), default="text")
    common.add_argument("--seed", type=int, default=None,
                        help="accepted for scripting compatibility; nothing here is randomised")
    common.add_argument("-v", "--verbose", action="store_true")

    p = argparse.ArgumentParser(prog="symmpat", description="Regular symmetry patterns for parameterised systems.")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("verify", parents=[common], help="check a pattern against a model")
    s.add_argument("--model", required=True)
    g = s.add_mutually_exclusive_group()
    g.add_argument("--pattern")
    g.add_argument("--lib", metavar="rot@i|swap@i")
    g.add_argument("--reflection", action="store_true")
    s.add_argument("--mode", choices=("simulation", "function", "complete"), default="complete")
    s.set_defaults(func=cmd_verify)

    s = sub.add_parser("synth", parents=[common], help="synthesise a pattern")
    s.add_argument("--model", required=True)
    s.add_argument("--mode", choices=synth.MODES, default="process")
    s.add_argument("--n-min", type=int, default=1)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--hints", help="hint file, or 'builtin' for the shipped hints")
    s.add_argument("--image-finite", action="store_true")
    s.add_argument("--allow-identity", action="store_true", help="do not force a non-identity transition")
    s.add_argument("--init", help="initial configurations (regex); with --bad, also require a safety proof")
    s.add_argument("--bad", help="bad configurations (regex)")
    s.add_argument("--max-rounds", type=int)
    s.add_argument("--sat-timeout", type=float)
    s.add_argument("--on-timeout", choices=("stop", "advance"), default="stop",
                   help="after a solver timeout: stop, or try the next state count")
    s.add_argument("--time-budget", type=float)
    s.add_argument("--sat-cmd", help=f"external DIMACS solver (also ${synth.sat.SAT_CMD_ENV})")
    s.add_argument("--dump-cnf", metavar="DIR")
    s.add_argument("--save", metavar="FILE", help="write the pattern in the pattern format")
    s.set_defaults(func=cmd_synth)

    s = sub.add_parser("image", parents=[common], help="image of the configurations under a pattern")
    s.add_argument("--model", required=True)
    s.add_argument("--pattern", required=True)
    s.add_argument("--check-finite", action="store_true")
    s.set_defaults(func=cmd_image)

    s = sub.add_parser("safety", parents=[common], help="certify safety through a finite image")
    s.add_argument("--model", required=True)
    s.add_argument("--pattern", required=True)
    s.add_argument("--init", required=True)
    s.add_argument("--bad", required=True)
    s.set_defaults(func=cmd_safety)

    s = sub.add_parser("props", parents=[common], help="relation properties of a pattern")
    s.add_argument("--pattern", required=True)
    s.add_argument("--model", help="take totality and surjectivity relative to its configurations")
    s.set_defaults(func=cmd_props)

    s = sub.add_parser("library-check", parents=[common], help="try the rotation and swap library")
    s.add_argument("--model", required=True)
    s.add_argument("--max-prefix", type=int, default=1)
    s.set_defaults(func=cmd_library_check)

    s = sub.add_parser("dump", parents=[common], help="write a DOT graph")
    s.add_argument("--model", required=True)
    s.add_argument("--dot", required=True, metavar="OUT", help="output file, '-' for stdout")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--action")
    g.add_argument("--pattern")
    g.add_argument("--reflection", action="store_true")
    s.add_argument("--text", action="store_true", help="also print the model document")
    s.set_defaults(func=cmd_dump)

    s = sub.add_parser("oracle", parents=[common], help="brute-force cross-check of the verifier")
    s.add_argument("--model", required=True)
    s.add_argument("--pattern")
    s.add_argument("--max-len", type=int, default=4)
    s.set_defaults(func=cmd_oracle)

    s = sub.add_parser("dihedral", parents=[common], help="rotation and reflection invariance")
    s.add_argument("--model", required=True)
    s.set_defaults(func=cmd_dihedral)

    s = sub.add_parser("bench", parents=[common], help="timing table (TSV) and chart (PNG)")
    s.add_argument("--out", default="bench-out")
    s.add_argument("--models", nargs="*", choices=list(report.TARGETS))
    s.add_argument("--synth", action="store_true", help="include synthesis runs")
    s.add_argument("--time-budget", type=float, help="per synthesis run, seconds")
    s.set_defaults(func=cmd_bench)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(message)s", stream=sys.stderr, force=True)
    try:
        return args.func(args)
    except (UsageError, ParseError, FileNotFoundError, fa.AutomatonError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as e:
        print(f"budget exceeded: {e}", file=sys.stderr)
        return EXIT_BUDGET


if __name__ == "__main__":
    sys.exit(main())
