"""Command-line entry point: ``oiglab {vt,orient,verify,simulate,exact}``.

Exit codes: 0 success, 1 a verification ran and failed, 2 bad usage or
configuration, 3 an exhaustive computation was too large.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import random
import sys
import warnings
from dataclasses import dataclass
from pathlib import Path

from . import __version__
from .adversarial import (
    AdversarialParams,
    AdversarialRule,
    find_accepted_seed,
)
from .concept_class import BitVector, build_bounded_ones_class, load_class_file, project
from .errors import CapacityError, InputError, OigLabError
from .experiment import RULES, ExperimentConfig, emit, exact_distribution, monte_carlo
from .oig import build_graph, closure_orientation, max_out_degree, orient_min_max_outdegree
from .vt_code import check_unique_neighborhoods, count_by_residue, residue

OUTPUT_DIR_ENV = "OIGLAB_OUTPUT_DIR"

log = logging.getLogger("oiglab")


@dataclass(frozen=True)
class GlobalOptions:
    seed: int = 0
    verbosity: int = 0
    output_dir: Path = Path(".")

    @classmethod
    def from_args(cls, args) -> GlobalOptions:
        return cls(args.seed, args.verbose, Path(os.environ.get(OUTPUT_DIR_ENV, ".")))


def _record(check: str, params: dict, result: dict, accepted_seed=None) -> str:
    return json.dumps(
        {"check": check, "params": params, "result": result, "accepted_seed": accepted_seed},
        sort_keys=True,
    )


def cmd_vt(args, opts: GlobalOptions) -> int:
    if args.vt_command == "residue":
        print(residue(BitVector.from_str(args.bits)))
    elif args.vt_command == "counts":
        print(",".join(str(c) for c in count_by_residue(args.m, args.k).counts))
    else:
        return _unique(args.m)
    return 0


def _unique(m: int) -> int:
    report = check_unique_neighborhoods(m)
    print(_record("unique", {"m": m}, report))
    return 0 if report["ok"] else 1


def cmd_orient(args, opts: GlobalOptions) -> int:
    cls = load_class_file(args.class_file)
    if args.subset is not None:
        cls = project(cls, BitVector.from_str(args.subset))
    g = build_graph(cls)
    if args.mode == "flow":
        o = orient_min_max_outdegree(g)
    else:
        center = BitVector.from_str(args.center) if args.center else BitVector.zeros(cls.domain_size)
        o = closure_orientation(g, center)
    for line in o.listing():
        print(line)
    print(f"max_out_degree: {max_out_degree(o)}")
    return 0


def _params(args) -> AdversarialParams:
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        params = AdversarialParams(args.n, args.d, args.delta, args.seed)
    for w in caught:
        log.warning("%s", w.message)
    return params


def cmd_verify(args, opts: GlobalOptions) -> int:
    if args.verify_command == "unique":
        return _unique(args.m)
    params = _params(args)
    common = {"n": params.n, "d": params.d, "delta": str(params.delta), "seed": params.seed}
    if args.verify_command == "matching":
        mode = args.mode or ("exhaustive" if params.n <= 6 else "sampled")
        ks = [args.k] if args.k else range(1, params.n + 1)
        failed = False
        for k in ks:
            search = find_accepted_seed(params, k, args.max_attempts, mode, args.samples)
            report = search.accepted_report or max(search.reports.values(), key=lambda r: r.heavy_fraction)
            result = {
                "out_degree_ok": report.out_degree_ok,
                "heavy_fraction": report.heavy_fraction,
                "heavy": report.heavy,
                "v1_checked": report.v1_checked,
                "v1_size": report.v1_size,
                "attempts": search.attempts,
                "accepted": search.accepted_seed is not None,
            }
            failed |= search.accepted_seed is None
            print(_record("matching", {**common, "k": k, "mode": mode}, result, search.accepted_seed))
        return 1 if failed else 0

    # validity: sample extension sets and measure the out-degree of the rule's orientations
    host = build_bounded_ones_class(params.m, params.d)
    rule = AdversarialRule(host, params, cache_size=16)
    rng = random.Random(params.seed)
    worst = 0
    for _ in range(args.samples):
        k = args.k or rng.randint(1, params.n)
        subset = BitVector.from_positions(params.m, rng.sample(range(1, params.m + 1), k + 1))
        worst = max(worst, max_out_degree(rule.orient(subset)))
    ok = worst <= params.d + 1
    print(_record("validity", {**common, "samples": args.samples}, {"max_out_degree": worst, "bound": params.d + 1, "ok": ok}))
    return 0 if ok else 1


def _config(args, rule=None, trials=1) -> ExperimentConfig:
    return ExperimentConfig(
        n=args.n,
        d=args.d,
        delta=args.delta,
        rule=rule or args.rule,
        trials=trials,
        seed=args.seed,
    )


def cmd_simulate(args, opts: GlobalOptions) -> int:
    config = _config(args, trials=args.trials)
    summary = monte_carlo(config, jobs=args.jobs, keep_records=args.format == "csv")
    out = args.out or opts.output_dir / f"simulate_n{config.n}_{config.rule}_seed{config.seed}.{args.format}"
    emit(summary, out, args.format)
    log.info("wrote %s", out)
    print(json.dumps({"out": str(out), "seed": config.seed, "mean": summary.mean, "standard_error": summary.se, "trials": summary.trials}))
    return 0


def cmd_exact(args, opts: GlobalOptions) -> int:
    law = exact_distribution(_config(args))
    text = json.dumps(law.to_dict(), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    return 0


def _fraction_arg(text: str):
    from fractions import Fraction

    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="64-bit seed (default 0)")
    common.add_argument("-v", "--verbose", action="count", default=argparse.SUPPRESS)

    parser = argparse.ArgumentParser(
        prog="oiglab",
        description="One-inclusion graph laboratory: VT codes, orientations and tail experiments.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--seed", type=int, default=0, help="64-bit seed (default 0)")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    vt = sub.add_parser("vt", parents=[common], help="Varshamov-Tenengolts code utilities")
    vt_sub = vt.add_subparsers(dest="vt_command", required=True)
    p = vt_sub.add_parser("residue", help="weighted-sum residue of a bit string")
    p.add_argument("bits")
    p = vt_sub.add_parser("counts", help="residue counts of the weight-k layer, as CSV")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p = vt_sub.add_parser("check-unique", help="exhaustive unique-neighborhood check")
    p.add_argument("--m", type=int, required=True)
    vt.set_defaults(func=cmd_vt)

    p = sub.add_parser("orient", parents=[common], help="orient the one-inclusion graph of a class file")
    p.add_argument("--class", dest="class_file", required=True, metavar="FILE")
    p.add_argument("--subset", help="project onto this subset first (bit string)")
    p.add_argument("--mode", choices=("flow", "closure"), required=True)
    p.add_argument("--center", help="closure center (default: all zeros)")
    p.set_defaults(func=cmd_orient)

    verify = sub.add_parser("verify", parents=[common], help="check the construction's guarantees")
    v_sub = verify.add_subparsers(dest="verify_command", required=True)
    for name in ("matching", "validity"):
        p = v_sub.add_parser(name, parents=[common])
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--delta", type=_fraction_arg, required=True)
        p.add_argument("--d", type=int, default=1)
        p.add_argument("--k", type=int, help="only this training-set size")
        if name == "matching":
            p.add_argument("--mode", choices=("exhaustive", "sampled"))
            p.add_argument("--max-attempts", type=int, default=64)
            p.add_argument("--samples", type=int, default=2000)
        else:
            p.add_argument("--samples", type=int, default=10_000)
    p = v_sub.add_parser("unique", parents=[common])
    p.add_argument("--m", type=int, required=True)
    verify.set_defaults(func=cmd_verify)

    for name, func in (("simulate", cmd_simulate), ("exact", cmd_exact)):
        p = sub.add_parser(name, parents=[common], help=f"{name} the PAC experiment")
        p.add_argument("--n", type=int, required=True)
        p.add_argument("--d", type=int, default=1)
        p.add_argument("--delta", type=_fraction_arg, default=_fraction_arg("0.1"))
        p.add_argument("--rule", choices=RULES, required=True)
        p.add_argument("--out", type=Path)
        if name == "simulate":
            p.add_argument("--trials", type=int, required=True)
            p.add_argument("--format", choices=("csv", "json"), default="json")
            p.add_argument("--jobs", type=int, default=1)
        p.set_defaults(func=func)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    opts = GlobalOptions.from_args(args)
    logging.basicConfig(
        level=logging.WARNING - 10 * min(opts.verbosity, 2),
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args, opts)
    except CapacityError as exc:
        print(json.dumps({"error": "capacity", "message": str(exc)}), file=sys.stderr)
        return 3
    except (InputError, OigLabError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 2
    except OSError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
