"""
Command-line entry point.

    arbor simulate --model urrt --sizes 500,1000 --estimators descendant,jordan --out results
    arbor compare --config compare.cfg --svg
    arbor rates --model pa --alphas 1,1.2,1.4
    arbor oracle-check
    arbor gen --model pa -n 20 --seed 7
"""

import argparse
import json
import logging
import sys
from typing import List, Optional

from . import __version__, oracle, treegen
from .config import DEFAULT_RATE_SIZES, ExperimentConfig, parse_float_list, parse_int_list
from .exceptions import ArborError
from .experiment import compare, rates, simulate
from .models import MODELS, URRT
from .rng import make_rng

logger = logging.getLogger("arbor")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_ERROR = 2


def _experiment_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument("--config", help="key = value config file")
    parent.add_argument("--model", choices=MODELS)
    parent.add_argument("--sizes", help="comma-separated tree sizes")
    parent.add_argument("--alphas", help="comma-separated weight exponents")
    parent.add_argument("--estimators", help="comma-separated estimator names")
    parent.add_argument("--replicates", type=int)
    parent.add_argument("--seed", type=int)
    parent.add_argument("--out", dest="output_dir", help="output directory")
    parent.add_argument("--threads", type=int, help="worker processes (default: $ARBOR_THREADS or 1)")
    parent.add_argument("--bounds", action="store_true", default=None, help="also write bounds.csv")
    parent.add_argument("--svg", action="store_true", default=None, help="also render SVG plots")
    return parent


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="arbor",
        description="Estimate vertex arrival orders in random recursive trees.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    verbosity.add_argument("-q", "--quiet", action="store_true", help="warnings and errors only")

    commands = parser.add_subparsers(dest="command", required=True)
    flags = _experiment_flags()
    commands.add_parser("simulate", parents=[flags], help="risk samples and summaries")
    commands.add_parser("compare", parents=[flags], help="rank estimators by median risk")
    rates_cmd = commands.add_parser("rates", parents=[flags], help="fit growth exponents across sizes")
    rates_cmd.add_argument("--statistic", choices=("median", "mean"), default="median")

    check = commands.add_parser("oracle-check", help="run the exact-oracle self-checks")
    check.add_argument("--replicates", type=int, default=20000, help="Monte Carlo replicates per cell")
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--sizes", default="4,5", help="tree sizes for the Monte Carlo checks")
    check.add_argument("--alphas", default="1", help="weight exponents for the Monte Carlo checks")
    check.add_argument("--z-max", type=float, default=3.0, help="largest accepted |z| score")

    gen = commands.add_parser("gen", help="print one random tree")
    gen.add_argument("--model", choices=MODELS, default=URRT)
    gen.add_argument("-n", type=int, required=True, help="number of vertices")
    gen.add_argument("--seed", type=int, default=0)
    layout = gen.add_mutually_exclusive_group()
    layout.add_argument("--shuffle", action="store_true", help="hide the arrival order behind random labels")
    layout.add_argument("--parents", action="store_true", help="print the parent array instead of edges")
    return parser


def _load_config(args: argparse.Namespace) -> ExperimentConfig:
    config = ExperimentConfig.load(args.config) if args.config else ExperimentConfig()
    if args.command == "rates" and not args.config and args.sizes is None:
        config.sizes = list(DEFAULT_RATE_SIZES)
    config.apply(
        {
            key: getattr(args, key)
            for key in (
                "model", "sizes", "alphas", "estimators", "replicates",
                "seed", "output_dir", "threads", "bounds", "svg",
            )
        }
    )
    return config.validate()


def _run_simulate(args: argparse.Namespace) -> int:
    result = simulate(_load_config(args))
    result.write()
    print(result.summary_frame().to_string(index=False))
    return EXIT_OK


def _run_compare(args: argparse.Namespace) -> int:
    result = compare(_load_config(args))
    result.write()
    print(result.to_frame().to_string(index=False))
    return EXIT_OK


def _run_rates(args: argparse.Namespace) -> int:
    result = rates(_load_config(args), statistic=args.statistic)
    result.write()
    print(result.to_frame().to_string(index=False))
    return EXIT_OK


def _run_oracle_check(args: argparse.Namespace) -> int:
    report = oracle.self_check(
        replicates=args.replicates,
        sizes=parse_int_list("sizes", args.sizes),
        alphas=parse_float_list("alphas", args.alphas),
        seed=args.seed,
        z_max=args.z_max,
    )
    print(json.dumps(report.to_dict(), indent=2, default=str))
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def _run_gen(args: argparse.Namespace) -> int:
    rng = make_rng(args.seed)
    tree = treegen.generate(args.model, args.n, rng)
    if args.parents:
        print(tree.serialize())
    elif args.shuffle:
        labeled, _ = treegen.shuffle_labels(tree, rng)
        sys.stdout.write(labeled.to_edge_list())
    else:
        sys.stdout.write(tree.to_labeled().to_edge_list())
    return EXIT_OK


COMMANDS = {
    "simulate": _run_simulate,
    "compare": _run_compare,
    "rates": _run_rates,
    "oracle-check": _run_oracle_check,
    "gen": _run_gen,
}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except ArborError as e:
        logger.error("%s", e)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
