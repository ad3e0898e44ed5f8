"""Command-line entry point: ``subrank-gap <command> ...``.

Exit codes: 0 ok, 1 parse error, 2 zero tensor, 3 internal error,
4 certificate verification failure.
"""

from __future__ import annotations

import argparse
import hashlib
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import mpmath

from . import __version__
from .classifier import classify
from .corpus import DEFAULT_FIELD, named
from .degeneration import verify_certificate
from .errors import BudgetExceeded, NotTight, ParseError, SearchExhausted, SubrankGapError, ZeroTensor
from .fields import derive_seed, field_from_name
from .fileformat import (certificate_to_doc, dump_tensor, dumps, parse_certificate, parse_space,
                         parse_tensor)
from .oracle import SearchBudget, brute_restricts_to, brute_subrank, kronecker_power_subrank
from .subspace import classify_subspace
from .values import compute_constants, is_tight, support_of, tight_support_value

EXIT_OK, EXIT_PARSE, EXIT_ZERO, EXIT_INTERNAL, EXIT_VERIFY = 0, 1, 2, 3, 4
TOOL = "subrank-gap"


class _Exit(Exception):
    def __init__(self, code, message):
        super().__init__(message)
        self.code = code


def _read(path):
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _Exit(EXIT_PARSE, f"{path}: {exc.strerror}") from None


def _digest(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _emit(args, report: dict, text_lines):
    if args.format == "machine":
        sys.stdout.write(dumps({"tool": TOOL, "version": __version__, **report}))
    else:
        sys.stdout.write("\n".join(text_lines) + "\n")


# ------------------------------------------------------------------ classify

def _classify_one(path, master_seed, field_lift, digits, with_timings):
    """Classify one file; returns (exit code, result dict)."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        return EXIT_PARSE, {"input": str(path), "error": f"{exc.strerror}"}
    digest = _digest(text)
    seed = derive_seed(master_seed, digest)
    base = {"input": str(path), "digest": digest, "seed": seed}
    start = time.perf_counter()
    try:
        t = parse_tensor(text)
        g = classify(t, seed, field_lift=field_lift)
    except ParseError as exc:
        return EXIT_PARSE, {**base, "error": f"parse error: {exc}"}
    except ZeroTensor:
        return EXIT_ZERO, {**base, "error": "zero tensor"}
    except SubrankGapError as exc:
        return EXIT_INTERNAL, {**base, "error": f"{type(exc).__name__}: {exc}"}
    if g.value.symbol.isdigit():
        numeric = g.value.symbol
    else:
        with mpmath.workdps(digits):
            numeric = mpmath.nstr(g.value.numeric(max(digits, 10)), digits)
    result = {
        **base,
        "field": t.field.name,
        "work_field": g.work_field.name,
        "field_lift": field_lift,
        "bucket": g.bucket.value,
        "subcase": g.subcase_label,
        "value": {"kind": g.value.kind, "symbol": g.value.symbol, "numeric": numeric},
        "flattening_ranks": list(g.flattening_ranks),
        "slice_ranks": list(g.slice_ranks) if g.slice_ranks else None,
        "null_direction": g.null_direction,
        "null_directions": list(g.null_directions),
        "attempts": g.attempts,
        "notes": g.notes,
        "certificates": [certificate_to_doc(c.certificate, c.source, c.label)
                         for c in g.certificates],
    }
    if with_timings:
        result["seconds"] = round(time.perf_counter() - start, 6)
    return EXIT_OK, result


def _classify_text(r):
    if "error" in r:
        return [f"{r['input']}: {r['error']}"]
    lines = [f"input:        {r['input']}",
             f"field:        {r['field']}" + (f" (computations over {r['work_field']})"
                                               if r["work_field"] != r["field"] else ""),
             f"bucket:       {r['bucket']}",
             f"subcase:      {r['subcase']}",
             f"value:        {r['value']['kind']}({r['value']['symbol']}) = {r['value']['numeric']}",
             f"flattenings:  {tuple(r['flattening_ranks'])}"]
    if r["slice_ranks"]:
        lines.append(f"slice ranks:  {tuple(r['slice_ranks'])}")
    if r["null_directions"]:
        lines.append(f"null dirs:    {tuple(r['null_directions'])}")
    lines.append(f"seed:         {r['seed']}")
    for key, val in sorted(r["attempts"].items()):
        lines.append(f"attempts:     {key} = {val}")
    for c in r["certificates"]:
        lines.append(f"certificate:  {c['label']} ({c['type']}, source {c['source']}): verified")
    lines.extend(f"note:         {n}" for n in r["notes"])
    if "seconds" in r:
        lines.append(f"seconds:      {r['seconds']}")
    return lines


def cmd_classify(args):
    jobs = max(1, args.jobs)
    call = (args.seed, args.field_lift == "on", args.digits, args.timings)
    if jobs > 1 and len(args.paths) > 1:
        with ProcessPoolExecutor(jobs) as pool:
            outcomes = list(pool.map(_classify_one, args.paths, *([c] * len(args.paths)
                                                                   for c in call)))
    else:
        outcomes = [_classify_one(p, *call) for p in args.paths]
    if args.certificates_dir:
        out = Path(args.certificates_dir)
        out.mkdir(parents=True, exist_ok=True)
        for _, r in outcomes:
            for n, c in enumerate(r.get("certificates", []), 1):
                (out / f"{Path(r['input']).stem}.cert{n}.json").write_text(dumps(c))
    results = [r for _, r in outcomes]
    lines = []
    for r in results:
        if lines:
            lines.append("")
        lines.extend(_classify_text(r))
    report = {"command": "classify", "seed": args.seed, "results": results}
    _emit(args, report, lines)
    return max(code for code, _ in outcomes)


# ------------------------------------------------------------------ other commands

def cmd_constants(args):
    start = time.perf_counter()
    consts = compute_constants(args.digits)
    with mpmath.workdps(args.digits):
        vals = {k: mpmath.nstr(getattr(consts, k), args.digits) for k in ("c1", "c2", "tau")}
        residual = mpmath.nstr(consts.residual, 3)
    report = {"command": "constants", "digits": args.digits, **vals, "residual": residual}
    if args.timings:
        report["seconds"] = round(time.perf_counter() - start, 6)
    lines = [f"c1  = {vals['c1']}", f"c2  = {vals['c2']}", f"tau = {vals['tau']}",
             f"residual |h(2tau) - h(tau) + tau| = {residual}"]
    _emit(args, report, lines)
    return EXIT_OK


def _source_tensor(source_name, source_path, field):
    if source_path:
        return parse_tensor(_read(source_path))
    if source_name == "input":
        raise _Exit(EXIT_PARSE, "certificate source is the classified input; pass it with --source")
    return named(source_name, field)


def cmd_verify(args):
    cert, source_name = parse_certificate(_read(args.certificate))
    source = _source_tensor(source_name, args.source, cert.target.field)
    verdict = verify_certificate(source, cert)
    report = {"command": "verify", "ok": verdict.ok, "reason": verdict.reason,
              "label": cert.label, "type": "restriction" if hasattr(cert, "maps") else "degeneration"}
    _emit(args, report, [f"{'verified' if verdict.ok else 'FAILED'}: {verdict.reason}"])
    return EXIT_OK if verdict.ok else EXIT_VERIFY


def cmd_corpus(args):
    field = field_from_name(args.field)
    try:
        t = named(args.name, field)
    except KeyError as exc:
        raise _Exit(EXIT_PARSE, str(exc.args[0])) from None
    text = dump_tensor(t)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def _budget(args):
    return SearchBudget(args.budget_maps, args.budget_seconds)


def cmd_oracle(args):
    budget = _budget(args)
    t = parse_tensor(_read(args.path))
    report = {"command": f"oracle {args.oracle_command}", "field": t.field.name}
    try:
        if args.oracle_command == "subrank":
            res = brute_subrank(t, budget)
            report.update(subrank=res.value, complete=True)
            lines = [f"subrank over {t.field.name}: {res.value}"]
        elif args.oracle_command == "power":
            res = kronecker_power_subrank(t, args.n, budget)
            report.update(n=args.n, subrank=res.subrank, lower_bound=f"{res.lower_bound:.12g}",
                          complete=True)
            lines = [f"subrank of the Kronecker power n={args.n} over {t.field.name}: {res.subrank}",
                     f"asymptotic subrank >= {res.lower_bound:.12g}"]
        else:
            s = parse_tensor(_read(args.target))
            verdict, _ = brute_restricts_to(t, s, budget)
            report.update(restricts=verdict, complete=True)
            lines = [f"restricts over {t.field.name}: {'yes' if verdict else 'no'}"]
    except BudgetExceeded as exc:
        report.update(complete=False, best_lower_bound=exc.best, reason=str(exc))
        lines = [f"unknown: {exc}" + (f" (best lower bound {exc.best})" if exc.best else "")]
    _emit(args, report, lines)
    return EXIT_OK


def cmd_support_value(args):
    t = parse_tensor(_read(args.path))
    if t.is_zero():
        raise ZeroTensor("zero tensor")
    s = support_of(t)
    try:
        tight = is_tight(s)
        tight_doc = {"tight": tight.tight, "reason": tight.reason,
                     "witness": [{str(k + 1): v for k, v in w.items()} for w in tight.witness]
                     if tight.witness else None}
    except SearchExhausted as exc:
        tight_doc = {"tight": None, "reason": str(exc), "witness": None}
    try:
        val = tight_support_value(s, strict=args.strict, rng_seed=args.seed)
    except NotTight as exc:
        raise _Exit(EXIT_VERIFY, str(exc)) from None
    report = {"command": "support-value", "support_size": len(s.points), **tight_doc,
              "value": f"{val.value:.12f}", "log2_value": f"{val.log2_value:.12f}",
              "label": val.label}
    lines = [f"support size: {len(s.points)}",
             f"tight:        {tight_doc['tight']} ({tight_doc['reason']})",
             f"{val.label}: {val.value:.12f} (log2 {val.log2_value:.12f})"]
    _emit(args, report, lines)
    return EXIT_OK


def cmd_classify_space(args):
    s = parse_space(_read(args.path))
    cls = classify_subspace(s, args.seed, field_lift=args.field_lift == "on")
    report = {"command": "classify-space", "tag": cls.tag.value, "max_rank": cls.max_rank,
              "field": s.field.name, "work_field": cls.field.name if cls.field else s.field.name}
    lines = [f"class:    {cls.tag.value}", f"max rank: {cls.max_rank}"]
    if cls.row_transform is not None:
        f = cls.field
        report["row_transform"] = [[f.format(x) for x in r] for r in cls.row_transform.data]
        report["col_transform"] = [[f.format(x) for x in r] for r in cls.col_transform.data]
        lines.append(f"R = {report['row_transform']}")
        lines.append(f"C = {report['col_transform']}")
    _emit(args, report, lines)
    return EXIT_OK


# ------------------------------------------------------------------ parser

def _default_seed():
    raw = os.environ.get("SUBRANK_GAP_SEED")
    if raw is None:
        return 0
    try:
        return int(raw, 0) % 2**64
    except ValueError:
        raise SystemExit(f"SUBRANK_GAP_SEED must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=lambda s: int(s, 0) % 2**64, default=_default_seed(),
                        help="master seed (default: $SUBRANK_GAP_SEED or 0)")
    common.add_argument("--format", choices=("text", "machine"), default="text")
    common.add_argument("--timings", action="store_true",
                        help="include wall-clock timings (makes output nondeterministic)")

    parser = argparse.ArgumentParser(prog=TOOL, description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"{TOOL} {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("classify", parents=[common], help="gap bucket of tensor files")
    p.add_argument("paths", nargs="+")
    p.add_argument("--field-lift", choices=("on", "off"), default="on")
    p.add_argument("--digits", type=int, default=30, help="digits of the numeric value")
    p.add_argument("--jobs", type=int, default=1, help="parallel workers for several files")
    p.add_argument("--certificates-dir", help="also write each certificate to this directory")
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("constants", parents=[common], help="c1, c2 and tau")
    p.add_argument("--digits", type=int, default=30)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("verify", parents=[common], help="re-check a certificate file")
    p.add_argument("certificate")
    p.add_argument("--source", help="tensor file the certificate starts from "
                                    "(named sources such as W or D are built in)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("corpus", parents=[common], help="write a named tensor as a file")
    p.add_argument("name", help="I, W, D, N1, N2, N3, Nk(n), Diag(r)")
    p.add_argument("--field", default=DEFAULT_FIELD.name)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_corpus)

    p = sub.add_parser("oracle", help="exhaustive searches over small finite fields")
    osub = p.add_subparsers(dest="oracle_command", required=True)
    for name, helptext in (("subrank", "exact subrank"), ("restricts", "decide T >= S"),
                           ("power", "subrank of a Kronecker power")):
        q = osub.add_parser(name, parents=[common], help=helptext)
        q.add_argument("path")
        if name == "restricts":
            q.add_argument("target")
        if name == "power":
            q.add_argument("--n", type=int, choices=(1, 2), default=2)
        q.add_argument("--budget-maps", type=int, default=SearchBudget().max_maps)
        q.add_argument("--budget-seconds", type=float, default=SearchBudget().time_limit)
        q.set_defaults(func=cmd_oracle)

    p = sub.add_parser("support-value", parents=[common],
                       help="max-min marginal entropy of the support")
    p.add_argument("path")
    p.add_argument("--strict", action="store_true", help="fail unless the support is tight")
    p.set_defaults(func=cmd_support_value)

    p = sub.add_parser("classify-space", parents=[common], help="class of a matrix space")
    p.add_argument("path")
    p.add_argument("--field-lift", choices=("on", "off"), default="on")
    p.set_defaults(func=cmd_classify_space)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except _Exit as exc:
        print(str(exc), file=sys.stderr)
        return exc.code
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ZeroTensor:
        print("zero tensor", file=sys.stderr)
        return EXIT_ZERO
    except SubrankGapError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
