"""Command-line interface.

Subcommands: bound (coverage bound and sample size as JSON), sample
(draw a point cloud to CSV), betti (Betti numbers of a complex built
on a CSV point cloud), experiment (run a config file end to end),
oracle (brute-force validators).  Exit codes: 0 success or pass
verdict, 1 fail verdict, 2 usage or config error.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import bounds
from . import complexes as cpx
from . import experiments as exp
from . import geometry as geo
from . import sampling


def _cmd_bound(args: argparse.Namespace) -> int:
    model = geo.parse_model(args.model)
    if args.regime == bounds.NOISY and args.tube_r is None:
        raise exp.ConfigError("--tube-r is required with --regime noisy")
    params = geo.geometric_params(model, tube_r=args.tube_r)
    if args.regime == bounds.NOISY:
        adm = bounds.check_noisy_admissibility(params, args.eps, args.tube_r)
    else:
        adm = bounds.check_clean_admissibility(params, args.eps)
    phi = bounds.sample_size(params, args.eps, args.p, regime=args.regime)
    l = args.l if args.l is not None else phi
    bound = bounds.coverage_probability_lower_bound(params, args.eps, l, regime=args.regime)
    payload = {
        **bound.to_dict(),
        "phi": phi,
        "regime": args.regime,
        "admissibility": adm.to_dict(),
    }
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_sample(args: argparse.Namespace) -> int:
    model = geo.parse_model(args.model)
    if args.tube_r is not None:
        sample = sampling.sample_tube(model, args.l, args.tube_r, args.seed)
    else:
        sample = sampling.sample_uniform(model, args.l, args.seed)
    sampling.write_sample_csv(sample, args.output)
    note = ""
    if sample.acceptance_rate is not None:
        note = f" (acceptance rate {sample.acceptance_rate:.3f})"
    print(f"wrote {len(sample)} {sample.source} points to {args.output}{note}")
    return 0


def _cmd_betti(args: argparse.Namespace) -> int:
    sample = sampling.read_sample_csv(args.input)
    if args.complex == "cech":
        cx = cpx.build_cech_euclidean(sample, args.scale, args.max_dim)
    else:
        cx = cpx.build_rips(sample, args.scale, args.max_dim, metric=args.metric)
    betti = cpx.betti_numbers(cx)
    print(",".join(str(b) for b in betti))
    return 0


def _cmd_experiment(args: argparse.Namespace) -> int:
    config = exp.load_config(args.config)
    report = exp.run_experiment(config, workers=args.workers, figures=not args.no_figures)
    print(
        f"phi={report['phi']} l={report['l']} "
        f"density_rate={report['empirical_density_rate']:.3f} "
        f"homology_rate={report['empirical_homology_rate']:.3f} "
        f"bound_g={report['bound_g']:.3f} verdict={report['verdict']}"
    )
    print(f"report: {config.output}.report.json")
    print(f"trials: {config.output}.trials.csv")
    for path in report["figures"]:
        print(f"figure: {path}")
    return 0 if report["verdict"] == "pass" else 1


def _cmd_oracle(args: argparse.Namespace) -> int:
    from . import validation

    checks = validation.run_oracle_suites(args.suite, args.complexes, args.seed)
    worst = 0
    for check in checks:
        print(f"{'PASS' if check.ok else 'FAIL'} {check.name}: {check.detail}")
        worst = max(worst, 0 if check.ok else 1)
    return worst


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topoinfer",
        description="homology recovery from random samples of catalog manifolds",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bound", help="coverage bound, sample size and admissibility as JSON")
    b.add_argument("--model", required=True)
    b.add_argument("--eps", type=float, required=True)
    b.add_argument("--p", type=float, required=True)
    b.add_argument("--regime", choices=list(bounds.REGIMES), default=bounds.CLEAN)
    b.add_argument("--tube-r", type=float, default=None)
    b.add_argument("--l", type=int, default=None, help="evaluate g at this l instead of phi")
    b.set_defaults(func=_cmd_bound)

    s = sub.add_parser("sample", help="draw a seeded sample and write it as CSV")
    s.add_argument("--model", required=True)
    s.add_argument("--l", type=int, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--tube-r", type=float, default=None,
                   help="sample the tube T_r(M) instead of M itself")
    s.add_argument("--output", required=True)
    s.set_defaults(func=_cmd_sample)

    t = sub.add_parser("betti", help="Betti numbers of a complex built on a CSV point cloud")
    t.add_argument("--input", required=True)
    t.add_argument("--scale", type=float, required=True)
    t.add_argument("--complex", choices=["rips", "cech"], default="rips")
    t.add_argument("--metric", choices=[cpx.AMBIENT, cpx.INTRINSIC], default=cpx.AMBIENT)
    t.add_argument("--max-dim", type=int, default=1)
    t.set_defaults(func=_cmd_betti)

    e = sub.add_parser("experiment", help="run an experiment config end to end")
    e.add_argument("--config", required=True)
    e.add_argument("--workers", type=int, default=1)
    e.add_argument("--no-figures", action="store_true", help="skip figure rendering")
    e.set_defaults(func=_cmd_experiment)

    o = sub.add_parser("oracle", help="run the brute-force validator suites")
    o.add_argument("--suite", choices=["homology", "reach", "volume", "all"], default="all")
    o.add_argument("--complexes", type=int, default=200,
                   help="random complexes for the homology suite")
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=_cmd_oracle)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except exp.AdmissibilityError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
