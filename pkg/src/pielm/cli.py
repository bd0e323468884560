"""Command line entry point: ``pielm run | sweep | verify``."""

from __future__ import annotations

import argparse
import logging
import sys

from .config import load_config, make_config
from .runner import RunError, run, sweep, verify


def parse_seeds(text: str) -> list:
    """``"1..5"`` (inclusive) or ``"1,4,9"``."""
    text = text.strip()
    if ".." in text:
        a, b = text.split("..", 1)
        a, b = int(a), int(b)
        if b < a:
            raise argparse.ArgumentTypeError(f"empty seed range {text!r}")
        return list(range(a, b + 1))
    seeds = [int(s) for s in text.split(",") if s.strip()]
    if not seeds:
        raise argparse.ArgumentTypeError("empty seed list")
    return seeds


def _add_run_options(p):
    p.add_argument("--case", type=int, choices=(1, 2, 3, 4), default=None)
    p.add_argument("--config", help="sectioned key=value file; flags override it")
    p.add_argument("--out", help="output directory")
    p.add_argument("--M", type=int, help="hidden neurons")
    p.add_argument("--nc", type=int, help="collocation points per PDE / interface law")
    p.add_argument("--ni", type=int, help="points per time-slice law")
    p.add_argument("--nf", type=int, help="points per fixed-face law (default: ni)")
    p.add_argument("--rcond", type=float)
    p.add_argument("--weight-lo", dest="weight_lo", type=float)
    p.add_argument("--weight-hi", dest="weight_hi", type=float)
    p.add_argument("--strategy", choices=("random", "grid"))
    p.add_argument("--normalize-inputs", dest="normalize_inputs", action="store_true", default=None)
    p.add_argument("--include-fixed-neumann", dest="include_fixed_neumann", action="store_true", default=None)
    p.add_argument("--row-scale", dest="row_scale", help="label:factor[,label:factor]")
    p.add_argument("--grid", type=int, help="test-grid points per spatial axis")
    p.add_argument("--grid-t", dest="grid_t", type=int, help="test-grid time levels")
    p.add_argument("--trace-samples", dest="trace_samples", type=int)
    p.add_argument("--no-grid-csv", dest="write_grid", action="store_false",
                   help="skip solution_grid.csv (large for 2D cases)")


_CONFIG_KEYS = ("case", "seed", "M", "nc", "ni", "nf", "rcond", "weight_lo", "weight_hi", "strategy",
                "normalize_inputs", "include_fixed_neumann", "row_scale", "grid", "grid_t", "trace_samples", "out")


def _config_from(args):
    file_values = load_config(args.config) if args.config else {}
    overrides = {k: getattr(args, k, None) for k in _CONFIG_KEYS}
    cfg = make_config(file_values, **overrides)
    return cfg


def build_parser():
    parser = argparse.ArgumentParser(prog="pielm", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="solve one case and write reports")
    _add_run_options(p)
    p.add_argument("--seed", type=int)

    p = sub.add_parser("sweep", help="run a case over several seeds")
    _add_run_options(p)
    p.add_argument("--seeds", type=parse_seeds, required=True, help="a..b or comma list")

    p = sub.add_parser("verify", help="check case transcriptions and feature derivatives")
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--case", type=int, choices=(1, 2, 3, 4))
    g.add_argument("--all", action="store_true")
    p.add_argument("--samples", type=int, default=200)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    if args.command == "verify":
        return 0 if verify([1, 2, 3, 4] if args.all else [args.case], args.samples) else 1

    try:
        cfg = _config_from(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    if args.command == "run":
        try:
            rep = run(cfg, args.out, write_grid=args.write_grid)
        except (RunError, ValueError, ArithmeticError) as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        l2 = rep.relative_l2
        print(f"case {cfg.case} seed {cfg.seed}: relative L2 {l2['aggregate']:.3e} "
              f"(rank {rep.solver['rank']}, {rep.solver['rows']}x{rep.solver['cols']}, "
              f"solve {rep.timings['solve']:.3f} s)")
        for name, v in rep.boundary_traces.items():
            print(f"  trace {name}: relative L2 {v:.3e}")
        print(f"  report: {rep.artifacts['report']}")
        return 0

    stats, summary = sweep(cfg, args.seeds, args.out, write_grid=args.write_grid)
    for seed, v in zip(stats.seeds, stats.l2):
        print(f"seed {seed}: " + ("FAILED " + stats.failures[seed] if v is None else f"relative L2 {v:.3e}"))
    if summary["n_success"]:
        print(f"min {summary['l2_min']:.3e} median {summary['l2_median']:.3e} max {summary['l2_max']:.3e}")
    return 1 if stats.failures else 0


if __name__ == "__main__":
    sys.exit(main())
