"""Command-line front end.

Results go to stdout as stable ``key=value`` lines (or JSON with ``--json``),
diagnostics go to stderr.  Exit codes: 0 success, 1 check or verification
failure, 2 usage or parse error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .derivations import (
    Derivation,
    DerivationError,
    FormatError,
    check,
    classify_derivation,
    from_json,
    to_json,
)
from .fuzz import run_fuzz
from .generators import FuzzConfig, Generator
from .multitypes import TypeSyntaxError, parse_type
from .strategies import DEFAULT_FUEL, evaluate, t_family
from .synthesis import (
    SynthesisError,
    check_unfolding,
    mts_type_normal_form,
    synthesize_tight,
    to_hd,
    to_lsc,
    type_normal_form,
)
from .terms import NonPureTerm, ParseError, SystemTag, classify, parse, render, size

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


class Failed(Exception):
    pass


def _read_term(arg: str):
    text = _read_source(arg)
    try:
        return parse(text)
    except ParseError as exc:
        raise UsageError(f"cannot parse term: {exc}") from exc


def _read_source(arg: str) -> str:
    if arg.startswith("@"):
        try:
            return Path(arg[1:]).read_text()
        except OSError as exc:
            raise UsageError(f"cannot read {arg[1:]}: {exc.strerror}") from exc
    return arg


def _read_derivation(path: str) -> Derivation:
    text = _read_source("@" + path if not path.startswith("@") else path)
    try:
        return from_json(text)
    except FormatError as exc:
        raise UsageError(str(exc)) from exc


def _kv(pairs: dict) -> str:
    return " ".join(f"{k}={v}" for k, v in pairs.items())


def _emit(args, pairs: dict, extra_lines=()):
    if args.json:
        print(json.dumps(pairs, sort_keys=False))
        return
    for line in extra_lines:
        print(line)
    print(_kv(pairs))


def _emit_derivation(phi: Derivation, out: str | None):
    text = to_json(phi)
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _checked(phi: Derivation):
    try:
        return check(phi)
    except DerivationError as exc:
        raise Failed(str(exc)) from exc


def _judgement_pairs(j) -> dict:
    return {
        "context": str(j.context) or "{}",
        "term": render(j.subject),
        "type": str(j.conclusion),
        "indices": ",".join(map(str, j.indices)),
    }


# ---------------------------------------------------------------------------
# subcommands


def cmd_eval(args):
    system = SystemTag.parse(args.system)
    t = _read_term(args.term)
    trace = evaluate(system, t, args.fuel)
    pairs = {"normal": trace.reached_normal, "k": trace.k}
    if system is SystemTag.MX:
        pairs["e_total"] = trace.e_total
    if system is SystemTag.LSC:
        pairs.update(k_m=trace.k_m, k_e=trace.k_e)
    pairs["final"] = render(trace.final)
    if trace.reached_normal:
        pairs["size"] = size(system, trace.final)
    if args.json:
        if args.trace:
            pairs["steps"] = [
                {"kind": s.kind.value, "path": list(s.redex_path), "erased": s.erased, "result": render(s.result)}
                for s in trace.steps
            ]
        _emit(args, pairs)
    else:
        _emit(args, pairs, trace.lines() if args.trace else ())
    if not trace.reached_normal:
        print(f"fuel of {args.fuel} steps exhausted", file=sys.stderr)
        return FAILED
    return OK


def cmd_classify(args):
    system = SystemTag.parse(args.system)
    c = classify(system, _read_term(args.term))
    _emit(args, {"normal": c.normal, "neutral": c.neutral, "abs": c.abs})
    return OK


def cmd_size(args):
    system = SystemTag.parse(args.system)
    _emit(args, {"size": size(system, _read_term(args.term))})
    return OK


def cmd_type_nf(args):
    system = SystemTag.parse(args.system)
    t = _read_term(args.term)
    try:
        phi = type_normal_form(system, t)
    except SynthesisError as exc:
        raise Failed(str(exc)) from exc
    _emit_derivation(phi, args.out)
    return OK


def _summary(system: SystemTag, trace, phi: Derivation) -> dict:
    idx = phi.indices
    n = size(system, trace.final)
    if system is SystemTag.LSC:
        return {"b": idx[0], "e": idx[1], "r": idx[2], "k": trace.k, "k_m": trace.k_m, "k_e": trace.k_e, "size": n}
    pairs = {"b": idx[0], "r": idx[1], "k": trace.k, "size": n}
    if system is SystemTag.MX:
        pairs["e_total"] = trace.e_total
    return pairs


def summary_holds(system: SystemTag, s: dict) -> bool:
    if system is SystemTag.LSC:
        return s["b"] == 2 * s["k_m"] and s["e"] == s["k_e"] and s["r"] == s["size"]
    if system is SystemTag.MX:
        return s["b"] == 2 * s["k"] and s["r"] == s["size"] + s["e_total"]
    return s["b"] == 2 * s["k"] and s["r"] == s["size"]


def cmd_synthesize(args):
    system = SystemTag.parse(args.system)
    t = _read_term(args.term)
    try:
        trace, phi = synthesize_tight(system, t, args.fuel)
    except SynthesisError as exc:
        raise Failed(str(exc)) from exc
    _checked(phi)
    if args.out:
        _emit_derivation(phi, args.out)
    pairs = _summary(system, trace, phi)
    lines = list(trace.lines()) if args.trace else []
    if args.derivation:
        lines.append(phi.pretty())
    _emit(args, pairs, lines)
    if not summary_holds(system, pairs):
        print("summary violates the tight index equalities", file=sys.stderr)
        return FAILED
    return OK


def cmd_check(args):
    phi = _read_derivation(args.file)
    j = _checked(phi)
    flags = classify_derivation(phi)
    pairs = {"system": str(phi.system), **_judgement_pairs(j), **flags.as_dict()}
    _emit(args, pairs)
    return OK


def cmd_iso(args):
    phi = _read_derivation(args.file)
    _checked(phi)
    try:
        if args.direction == "to-lsc":
            out = to_lsc(phi)
        elif phi.system is SystemTag.LSC and args.unfold:
            out = check_unfolding(phi)
        else:
            out = to_hd(phi)
    except NonPureTerm as exc:
        raise Failed(f"NonPureTerm: {exc}") from exc
    except SynthesisError as exc:
        raise UsageError(str(exc)) from exc
    _checked(out)
    _emit_derivation(out, args.out)
    return OK


def cmd_mts(args):
    t = _read_term(args.term)
    tau = None
    if args.type:
        try:
            tau = parse_type(args.type)
        except TypeSyntaxError as exc:
            raise UsageError(str(exc)) from exc
    try:
        phi = mts_type_normal_form(t, tau)
    except SynthesisError as exc:
        raise Failed(str(exc)) from exc
    _emit_derivation(phi, args.out)
    return OK


def cmd_fuzz(args):
    system = SystemTag.parse(args.system)
    gen = Generator.SIMPLY_TYPED if args.simply_typed else Generator.ARBITRARY
    try:
        cfg = FuzzConfig(system, args.count, args.seed, args.max_size, args.fuel, gen)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    report = run_fuzz(cfg)
    if args.json:
        print(json.dumps(report.as_dict(), indent=2))
    else:
        for f in report.failures:
            print(f"FAIL\t{f.check_name}\t{f.term}\t{f.detail}")
        print(report.summary())
    return OK if report.ok else FAILED


def cmd_tn(args):
    if args.n < 1:
        raise UsageError("n must be at least 1")
    t = t_family(args.n)
    trace = evaluate(SystemTag.LSC, t, args.fuel)
    if not trace.reached_normal:
        raise Failed(f"t_{args.n} did not normalize within {args.fuel} steps")
    pairs = {"n": args.n, "k_m": trace.k_m, "k_e": trace.k_e}
    if args.show:
        print(render(t))
    _emit(args, pairs)
    return OK


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="tightbounds", description="Tight multi type derivations for lambda evaluation.")
    p.add_argument("--json", action="store_true", help="emit structured results as JSON")
    sub = p.add_subparsers(dest="command", required=True)

    def system_arg(sp):
        sp.add_argument("--system", "-s", required=True, choices=[s.value for s in SystemTag])

    def term_arg(sp):
        sp.add_argument("term", help="term text, or @FILE to read it from a file")

    def fuel_arg(sp):
        sp.add_argument("--fuel", type=int, default=DEFAULT_FUEL)

    sp = sub.add_parser("eval", help="evaluate a term with a strategy")
    system_arg(sp)
    fuel_arg(sp)
    sp.add_argument("--trace", action="store_true", help="print every step")
    term_arg(sp)
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("classify", help="normal / neutral / abs predicates")
    system_arg(sp)
    term_arg(sp)
    sp.set_defaults(func=cmd_classify)

    sp = sub.add_parser("size", help="strategy-specific size of a term")
    system_arg(sp)
    term_arg(sp)
    sp.set_defaults(func=cmd_size)

    sp = sub.add_parser("type-nf", help="tight typing of a normal form")
    system_arg(sp)
    term_arg(sp)
    sp.add_argument("--out", "-o")
    sp.set_defaults(func=cmd_type_nf)

    sp = sub.add_parser("synthesize", help="evaluate, then build a tight typing along the trace")
    system_arg(sp)
    fuel_arg(sp)
    sp.add_argument("--trace", action="store_true")
    sp.add_argument("--derivation", action="store_true", help="pretty-print the derivation")
    sp.add_argument("--out", "-o", help="write the derivation file here")
    term_arg(sp)
    sp.set_defaults(func=cmd_synthesize)

    sp = sub.add_parser("check", help="validate a derivation file")
    sp.add_argument("file")
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("iso", help="transport between head and linear head derivations")
    sp.add_argument("direction", choices=["to-lsc", "to-hd"])
    sp.add_argument("file")
    sp.add_argument("--unfold", action="store_true", help="to-hd: fold explicit substitutions first")
    sp.add_argument("--out", "-o")
    sp.set_defaults(func=cmd_iso)

    sp = sub.add_parser("mts", help="minimal traditional shrinking typing of an lo-normal form")
    term_arg(sp)
    sp.add_argument("--type", help="target type for a neutral term")
    sp.add_argument("--out", "-o")
    sp.set_defaults(func=cmd_mts)

    sp = sub.add_parser("fuzz", help="run the theorem battery on random terms")
    system_arg(sp)
    sp.add_argument("--count", type=int, default=100)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--max-size", type=int, default=12)
    sp.add_argument("--fuel", type=int, default=300)
    sp.add_argument("--simply-typed", action="store_true")
    sp.set_defaults(func=cmd_fuzz)

    sp = sub.add_parser("tn", help="linear head step counts of the t_n family")
    sp.add_argument("--n", type=int, required=True)
    fuel_arg(sp)
    sp.add_argument("--show", action="store_true", help="print the term first")
    sp.set_defaults(func=cmd_tn)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except NonPureTerm as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except Failed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FAILED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
