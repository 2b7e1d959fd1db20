"""Command-line interface.

Subcommands: ``fit`` (emit a block-model document), ``analytic`` (closed
forms only), ``mc`` (Monte Carlo only), ``sweep`` (both) and ``report``
(compare emitted CSVs).  Exit codes: 0 success, 2 configuration error,
3 numerical contract violation.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace

from ..correlation import (
    ChannelGeometry,
    build_jakes_covariance,
    default_block_count,
    eigen_spectrum,
    fit_block_model,
    model_distance,
    save_block_model,
)
from ..errors import ConfigError, ContractViolation, DomainError, ReportUnavailable
from .config import parse_config_file
from .report import compare_report
from .sweep import read_sweep_csv, run_experiment

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fasrsma",
        description="Outage/capacity analysis for fluid-antenna RSMA downlinks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    fit = sub.add_parser("fit", help="fit a block-correlation model and print it")
    fit.add_argument("--ports", type=int, required=True)
    fit.add_argument("--aperture", type=float, required=True)
    fit.add_argument("--mean-gain", type=float, default=1.0)
    fit.add_argument("--strategy", choices=("vbc", "cbc"), default="vbc")
    fit.add_argument("--cbc-rho", type=float, default=0.97)
    fit.add_argument("--blocks", default="auto", help="block count or 'auto'")
    fit.add_argument("--out", default=None, help="write the document here instead of stdout")

    for name, help_text in (
        ("analytic", "closed-form sweep (Monte Carlo disabled)"),
        ("mc", "Monte Carlo sweep (closed forms disabled)"),
        ("sweep", "full sweep: closed forms and Monte Carlo"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True)
        cmd.add_argument("--out", default=None, help="output directory override")
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--trials", type=int, default=None)
        cmd.add_argument("--strategy", choices=("vbc", "cbc", "tas"), default=None,
                         help="restrict to a single correlation strategy")

    rep = sub.add_parser("report", help="summarise emitted sweep CSVs")
    rep.add_argument("csv", nargs="+", help="CSV files produced by a sweep")
    return parser


def _run_sweep_command(args: argparse.Namespace) -> int:
    config = parse_config_file(args.config)
    if args.seed is not None:
        config = replace(config, seed=args.seed)
    if args.trials is not None:
        config = replace(config, trials=args.trials)
    if args.strategy is not None:
        config = replace(config, strategies=(args.strategy,))
    if args.command == "analytic":
        config = replace(config, mc_enabled=False)
    elif args.command == "mc":
        config = replace(config, strategies=())
    out_dir = args.out if args.out is not None else config.output_dir
    result = run_experiment(config, out_dir=out_dir)
    total = sum(len(rows) for rows in result.panels.values())
    print(f"wrote {len(result.panels)} panel file(s), {total} rows, to {out_dir}")
    return EXIT_OK


def _run_fit(args: argparse.Namespace) -> int:
    geom = ChannelGeometry(args.ports, args.aperture, args.mean_gain)
    spectrum = eigen_spectrum(build_jakes_covariance(geom))
    if args.blocks == "auto":
        count = default_block_count(spectrum)
    else:
        count = int(args.blocks)
    model = fit_block_model(
        spectrum, count, args.strategy, cbc_rho=args.cbc_rho, mean_gain=args.mean_gain
    )
    doc = save_block_model(model, geom, args.strategy, model_distance(spectrum, model))
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(doc)
        print(f"wrote {args.out}")
    else:
        sys.stdout.write(doc)
    return EXIT_OK


def _run_report(args: argparse.Namespace) -> int:
    rows = []
    for path in args.csv:
        with open(path, "r", encoding="utf-8") as fh:
            rows.extend(read_sweep_csv(fh.read()))
    sys.stdout.write(compare_report(rows))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "fit":
            return _run_fit(args)
        if args.command in ("analytic", "mc", "sweep"):
            return _run_sweep_command(args)
        if args.command == "report":
            return _run_report(args)
        raise AssertionError(f"unhandled command {args.command!r}")
    except (ConfigError, FileNotFoundError, ReportUnavailable) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ContractViolation, DomainError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
