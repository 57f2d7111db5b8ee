"""Command line: ``samplable-ecc {lab,code,recon} ...``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from ..codes import dumps_code, random_code
from ..errors import SamplableEccError
from ..reconstruction import (
    OracleEnv,
    describe_forgeable,
    describe_invertible,
    description_ledger,
    enumerating_coder,
    lookup_table_coder,
    recover_forgeable,
    recover_invertible,
)
from ..sources import InjectiveMap
from .bounds import converse_max_rate, rand_bound
from .experiment import parse_config, run_experiment


def cmd_lab_run(args) -> int:
    cfg = parse_config(Path(args.config).read_text())
    report = run_experiment(cfg)
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    if args.csv:
        Path(args.csv).write_text(report.to_csv())
    for a in report.data["assertions"]:
        print(f"{'PASS' if a['pass'] else 'FAIL'}  {a['name']}", file=sys.stderr)
    return 0 if report.passed else 1


def cmd_lab_bounds(args) -> int:
    n, k, m = args.n, args.k, args.m
    gap = n - k - m
    if gap >= 0:
        print(f"rand_bound          2^-{gap} = {rand_bound(n, k, m):.6g}")
    else:
        print(f"rand_bound          undefined (n - k - m = {gap} < 0)")
    if args.eps is not None:
        r = converse_max_rate(n, m, args.eps)
        verdict = "ok" if k / n <= r else "violates"
        print(f"converse_max_rate   {r:.6f}")
        print(f"rate k/n            {k / n:.6f} ({verdict})")
    return 0


def cmd_code_gen(args) -> int:
    text = dumps_code(random_code(args.n, args.k, args.seed))
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def cmd_recon_demo(args) -> int:
    f = InjectiveMap.random(args.m, args.n, args.seed)
    env = OracleEnv(f)
    status = 0
    runs = [
        ("invertible", enumerating_coder, describe_invertible, recover_invertible),
        ("forgeable", lookup_table_coder, describe_forgeable, recover_forgeable),
    ]
    for variant, make, describe, recover in runs:
        coder = make(f, args.k, args.seed)
        desc = describe(env, coder, args.eps)
        ledger = description_ledger(desc, args.eps)
        same = recover(desc, coder) == f
        print(f"{variant} path ({coder.name} coder, q={coder.q}, size={ledger.size}, "
              f"floor={ledger.nominal_size})")
        for name, value in ledger.rows():
            print(f"  {name:<14}{value:>12}")
        print(f"  {'round trip':<14}{'ok' if same else 'MISMATCH':>12}")
        if not (same and ledger.within_bound):
            status = 1
    return status


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="samplable-ecc",
                                     description="Codes for samplable additive errors.")
    groups = parser.add_subparsers(dest="group", required=True)

    lab = groups.add_parser("lab", help="experiments and bounds").add_subparsers(dest="cmd", required=True)
    run = lab.add_parser("run", help="run an experiment config")
    run.add_argument("config")
    run.add_argument("--out", help="write the JSON report here instead of stdout")
    run.add_argument("--csv", help="write per-code / per-draw rows here")
    run.set_defaults(func=cmd_lab_run)
    bounds = lab.add_parser("bounds", help="print rate/error bounds")
    bounds.add_argument("--n", type=int, required=True)
    bounds.add_argument("--k", type=int, required=True)
    bounds.add_argument("--m", type=int, required=True)
    bounds.add_argument("--eps", type=float)
    bounds.set_defaults(func=cmd_lab_bounds)

    code = groups.add_parser("code", help="linear codes").add_subparsers(dest="cmd", required=True)
    gen = code.add_parser("gen", help="sample a random code")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--k", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_code_gen)

    recon = groups.add_parser("recon", help="reconstruction demos").add_subparsers(dest="cmd", required=True)
    demo = recon.add_parser("demo", help="describe and recover a random injective map")
    demo.add_argument("--m", type=int, default=3)
    demo.add_argument("--n", type=int, default=10)
    demo.add_argument("--k", type=int, default=2)
    demo.add_argument("--seed", type=int, default=0)
    demo.add_argument("--eps", type=float, default=0.5)
    demo.set_defaults(func=cmd_recon_demo)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (SamplableEccError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
