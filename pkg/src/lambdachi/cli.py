"""``lambdachi`` command line: gen, analyze, verify, campaign, oracle.

Exit codes: 0 everything passed, 1 an identity (or oracle comparison)
failed, 2 usage, input or configuration error.
"""

from __future__ import annotations

import argparse
import json
import sys
from contextlib import contextmanager
from typing import Iterator, TextIO

from .cohomology import DEFAULT_K_CAP
from .harness import CampaignConfig, analyze_spec, dumps, run_campaign, sample_spec
from .kernels import BACKEND
from .modules import BlockSpec, CyclicPGroup, ModuleInvariantError, SpecFormatError, build_module
from .oracle import DEFAULT_RANK_CAP, OracleRefusal, run_oracle

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


@contextmanager
def _output(path: str | None) -> Iterator[TextIO]:
    if path is None or path == "-":
        yield sys.stdout
        return
    try:
        fh = open(path, "w", encoding="utf-8", newline="\n")
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from exc
    with fh:
        yield fh


def load_spec(path: str) -> BlockSpec:
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"{path}: malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    try:
        return BlockSpec.from_json(doc)
    except SpecFormatError as exc:
        raise UsageError(f"{path}: {exc}") from exc
    except (ModuleInvariantError, ValueError) as exc:
        raise UsageError(f"{path}: invalid spec: {exc}") from exc


def _single(values: tuple[int, ...], flag: str) -> int:
    if len(values) != 1:
        raise UsageError(f"{flag} takes a single value for this command")
    return values[0]


def cmd_gen(args) -> int:
    p, n = _single(args.p, "--p"), _single(args.n, "--n")
    try:
        CyclicPGroup(p, n)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    if args.max_rank < 1:
        raise UsageError("--max-rank must be at least 1")
    spec = sample_spec(args.seed, p, n, args.max_rank, args.max_multiplicity, args.conjugator_bound,
                       args.finite_blocks)
    with _output(args.out) as fh:
        fh.write(json.dumps(spec.to_json(), sort_keys=True, indent=2) + "\n")
    return EXIT_OK


def cmd_analyze(args) -> int:
    spec = load_spec(args.spec)
    record = analyze_spec(spec, dual_check=not args.no_dual, k_cap=args.k_cap)
    with _output(args.out) as fh:
        fh.write(json.dumps(record.to_json(), sort_keys=True, indent=None if args.compact else 2) + "\n")
    if record.error is not None:
        print(f"error: {record.error}", file=sys.stderr)
    if args.command == "verify":
        for r in record.identities:
            status = "n/a " if not r.applicable else ("PASS" if r.passed else "FAIL")
            print(f"{status} {r.name}", file=sys.stderr)
        return EXIT_OK if record.passed else EXIT_FAIL
    return EXIT_OK if record.error is None else EXIT_FAIL


def cmd_campaign(args) -> int:
    try:
        config = CampaignConfig(
            seed=args.seed, primes=args.p, exponents=args.n, max_multiplicity=args.max_multiplicity,
            max_rank=args.max_rank, conjugator_bound=args.conjugator_bound, trials=args.trials,
            include_finite_blocks=args.finite_blocks, output_path=args.out, k_cap=args.k_cap,
            dual_check=args.dual_check, timing=args.timing)
    except ValueError as exc:
        raise UsageError(f"invalid campaign config: {exc}") from exc
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    with _output(args.out) as fh:
        summary = run_campaign(config, args.jobs, fh)
    if args.out not in (None, "-"):
        print(dumps(summary.to_json()))
    return EXIT_OK if summary.all_passed else EXIT_FAIL


def cmd_oracle(args) -> int:
    spec = load_spec(args.spec)
    try:
        report = run_oracle(build_module(spec), args.rank_cap)
    except OracleRefusal as exc:
        print(f"oracle refused: {exc}", file=sys.stderr)
        return EXIT_USAGE
    doc = {
        "agree": report.agree,
        "mismatches": report.mismatches,
        "oracle": _stringify(report.oracle),
        "pipeline": _stringify(report.pipeline),
    }
    with _output(args.out) as fh:
        fh.write(json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return EXIT_OK if report.agree else EXIT_FAIL


def _stringify(v):
    if isinstance(v, dict):
        return {k: _stringify(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_stringify(x) for x in v]
    if isinstance(v, bool):
        return v
    return str(v)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lambdachi", description="Euler characteristics and lambda-invariant "
                                     "identities for cyclic p-group lattices.")
    parser.add_argument("--version", action="version", version=f"%(prog)s (kernels: {BACKEND})")
    sub = parser.add_subparsers(dest="command", required=True)

    def common_sampling(sp, many: bool):
        kind = _int_list
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--p", type=kind, default=(2, 3, 5) if many else (2,),
                        help="prime" + (" list, comma separated" if many else ""))
        sp.add_argument("--n", type=kind, default=(1, 2, 3) if many else (2,),
                        help="exponent" + (" list, comma separated" if many else ""))
        sp.add_argument("--max-rank", type=int, default=20)
        sp.add_argument("--max-multiplicity", type=int, default=None)
        sp.add_argument("--conjugator-bound", type=int, default=3)
        sp.add_argument("--finite-blocks", action="store_true", help="attach random finite blocks")
        sp.add_argument("--out", default=None, help="output path (default stdout)")

    g = sub.add_parser("gen", help="sample a block spec")
    common_sampling(g, many=False)
    g.set_defaults(func=cmd_gen)

    for name, help_text in (("analyze", "analyze one spec"), ("verify", "analyze one spec; exit 1 on failure")):
        a = sub.add_parser(name, help=help_text)
        a.add_argument("spec", help="BlockSpec JSON file ('-' for stdin)")
        a.add_argument("--out", default=None)
        a.add_argument("--k-cap", type=int, default=DEFAULT_K_CAP, help="dual stabilisation cap on k")
        a.add_argument("--no-dual", action="store_true", help="skip the dual-module sign check")
        a.add_argument("--compact", action="store_true", help="single-line JSON")
        a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("campaign", help="seeded verification campaign, JSONL output")
    common_sampling(c, many=True)
    c.add_argument("--trials", type=int, default=500, help="trials per (p, n) pair")
    c.add_argument("--k-cap", type=int, default=DEFAULT_K_CAP)
    c.add_argument("--dual-check", action="store_true", help="also check the dual-module sign per trial")
    c.add_argument("--jobs", type=int, default=1, help="worker processes")
    c.add_argument("--timing", action="store_true", help="record per-trial wall time (output no longer "
                                                          "byte-reproducible)")
    c.set_defaults(func=cmd_campaign)

    o = sub.add_parser("oracle", help="brute-force cross-check of one spec")
    o.add_argument("spec")
    o.add_argument("--rank-cap", type=int, default=DEFAULT_RANK_CAP)
    o.add_argument("--out", default=None)
    o.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"lambdachi {args.command}: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
