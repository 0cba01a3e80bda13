# -*- coding: utf-8 -*-
"""Command-line interface: ``circmode <subcommand> [options]``.

Subcommands:
    test        likelihood-ratio multimodality test
    emtest      excess-mass baseline (or Watson U² with --fisher-marron)
    critbw      critical bandwidth h_k
    kde-curve   kernel density estimate on a grid, long-format CSV (h, x, density)
    simulate    Monte Carlo study over the model zoo, rejection-proportion table
    summarize   mean direction, resultant length and circular variance

Input files hold one angle per line, or a delimited table with a header row
(select the column with --column). Results go to stdout; logs go to stderr.
Exit status is 0 on success, 2 for unusable input or parameters and 1 for any
other failure.
"""

import argparse
import io
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from .bands import critical_bandwidth
from .circdist import AngleSample
from .config import Tuning, resolve_seed
from .emtest import excess_mass_test, fisher_marron_test
from .errors import CircModeError, IngestError, InvalidParameterError, TieError
from .ingest import AngleFileSpec, load_angles, summarize
from .kde import KdeSpec, kde_curve
from .lrtest import TestReport, format_report, run_test
from .simlab import TABLE_LAYOUTS, StudyDesign, export_table, run_study

logger = logging.getLogger(__name__)

JSON_SCHEMA = 1
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def _csv_list(cast):
    def parse(text: str):
        try:
            return [cast(item.strip()) for item in text.split(",") if item.strip()]
        except ValueError as exc:
            raise argparse.ArgumentTypeError(f"Cannot read '{text}' as a comma-separated list") from exc

    return parse


def _add_input_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--input", "-i", required=True, help="Angle file (one angle per line, or delimited with header)")
    parser.add_argument("--unit", choices=["radians", "degrees"], default="radians", help="Unit of the angles in the file")
    parser.add_argument(
        "--convention",
        choices=["compass", "math"],
        default="compass",
        help="compass: clockwise from north; math: counterclockwise from east",
    )
    parser.add_argument("--column", default=None, help="Column name or zero-based index in a delimited file")
    parser.add_argument("--strict", action="store_true", help="Fail on unreadable rows instead of skipping them")


def _add_output_argument(parser: argparse.ArgumentParser, default: str = "human"):
    parser.add_argument("--format", choices=["human", "json", "csv"], default=default, help="Output format")


def _add_bootstrap_arguments(parser: argparse.ArgumentParser):
    parser.add_argument("--k", type=int, default=1, help="Number of modes under the null hypothesis")
    parser.add_argument("--B", type=int, default=500, help="Number of bootstrap resamples")
    parser.add_argument("--alpha", type=float, default=0.05, help="Significance level")
    parser.add_argument("--seed", type=int, default=None, help="Master seed (default: $CIRCMODE_SEED, else fresh entropy)")
    parser.add_argument("--workers", type=int, default=1, help="Worker processes for the bootstrap")
    parser.add_argument(
        "--p-rule",
        choices=["strict", "conservative"],
        default="strict",
        help="strict: #{D* > D}/B; conservative: (1 + #{D* >= D})/(B + 1)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="circmode", description="Multimodality tests for circular data.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More log output on stderr (-v, -vv)")
    sub = parser.add_subparsers(dest="command", required=True)

    test = sub.add_parser("test", help="Likelihood-ratio multimodality test")
    _add_input_arguments(test)
    _add_bootstrap_arguments(test)
    _add_output_argument(test)
    test.add_argument(
        "--reuse-hk",
        action="store_true",
        help="Constrain every bootstrap replicate by the observed h_k instead of its own",
    )

    emtest = sub.add_parser("emtest", help="Excess-mass baseline test (unmodified calibration)")
    _add_input_arguments(emtest)
    _add_bootstrap_arguments(emtest)
    _add_output_argument(emtest)
    emtest.add_argument("--fisher-marron", action="store_true", help="Calibrate Watson U² instead of the excess mass")
    emtest.add_argument("--classical-u2", action="store_true", help="Scale U² by n instead of 1/n")

    critbw = sub.add_parser("critbw", help="Critical bandwidth h_k")
    _add_input_arguments(critbw)
    critbw.add_argument("--k", type=int, default=1, help="Target number of modes")
    _add_output_argument(critbw)

    curve = sub.add_parser("kde-curve", help="Kernel density estimate on a regular grid")
    _add_input_arguments(curve)
    curve.add_argument("--h", type=float, action="append", required=True, help="Bandwidth (repeat for several)")
    curve.add_argument("--grid-size", type=int, default=512, help="Number of grid points on (0, 2π]")
    _add_output_argument(curve, default="csv")

    simulate = sub.add_parser("simulate", help="Monte Carlo study over the model zoo")
    simulate.add_argument("--models", type=_csv_list(str), default=None, help="Model ids, e.g. M1,M6")
    simulate.add_argument("--layout", choices=sorted(TABLE_LAYOUTS), default=None, help="Models and k of a table layout")
    simulate.add_argument("--sizes", type=_csv_list(int), default=[100, 500, 1000], help="Sample sizes, e.g. 100,500")
    simulate.add_argument("--alphas", type=_csv_list(float), default=[0.01, 0.05, 0.10], help="Significance levels")
    simulate.add_argument("--M", type=int, default=1000, help="Monte Carlo runs per (model, size)")
    simulate.add_argument("--B", type=int, default=500, help="Bootstrap resamples per run")
    simulate.add_argument("--k", type=int, default=None, help="Number of modes under H0 (default 1, or the layout's)")
    simulate.add_argument("--test", choices=["lrt", "em"], default="lrt", help="Likelihood-ratio or excess-mass test")
    simulate.add_argument("--seed", type=int, default=None, help="Master seed (default: $CIRCMODE_SEED, else fresh entropy)")
    simulate.add_argument("--workers", type=int, default=1, help="Worker processes")
    simulate.add_argument("--checkpoint", default=None, help="JSON-lines file recording finished runs (resumable)")
    _add_output_argument(simulate, default="csv")

    summary = sub.add_parser("summarize", help="Descriptive summary of an angle file")
    _add_input_arguments(summary)
    _add_output_argument(summary)
    return parser


def _load(args) -> AngleSample:
    column = args.column
    if column is not None and column.isdigit():
        column = int(column)
    spec = AngleFileSpec(args.input, unit=args.unit, convention=args.convention, column=column)
    return load_angles(spec, strict=args.strict)


def _emit_json(payload: Dict[str, Any], out):
    document = {"schema": JSON_SCHEMA, **payload}
    out.write(json.dumps(document, sort_keys=True, indent=2) + "\n")


def _emit_csv(records: List[Dict[str, Any]], columns: Sequence[str], out):
    out.write(pd.DataFrame(records, columns=list(columns)).to_csv(index=False, lineterminator="\n"))


def _seed(args, out) -> int:
    seed, source = resolve_seed(args.seed)
    if source == "entropy" and args.format == "human":
        out.write(f"Seed drawn from entropy: {seed} (pass --seed {seed} to reproduce)\n")
    elif source == "entropy":
        logger.warning("Seed drawn from entropy: %d", seed)
    return seed


def _emit_report(args, report: TestReport, sample: AngleSample, out):
    if args.format == "json":
        _emit_json({"command": args.command, "input": args.input, "n": sample.n, "report": report.to_dict()}, out)
    elif args.format == "csv":
        record = {key: value for key, value in report.to_dict().items() if key not in ("replicates", "tuning")}
        record["n"] = sample.n
        _emit_csv([record], list(record), out)
    else:
        out.write(f"Input: {args.input} (n = {sample.n})\n")
        out.write(format_report(report) + "\n")


def cmd_test(args, out) -> int:
    sample = _load(args)
    seed = _seed(args, out)
    tuning = Tuning(p_value_rule=args.p_rule)
    report = run_test(
        sample,
        args.k,
        args.B,
        seed,
        alpha=args.alpha,
        tuning=tuning,
        workers=args.workers,
        reuse_critical_bandwidth=args.reuse_hk,
    )
    _emit_report(args, report, sample, out)
    return EXIT_OK


def cmd_emtest(args, out) -> int:
    sample = _load(args)
    seed = _seed(args, out)
    tuning = Tuning(p_value_rule=args.p_rule)
    if args.fisher_marron:
        report = fisher_marron_test(
            sample, args.k, args.B, seed, alpha=args.alpha, tuning=tuning, workers=args.workers, classical=args.classical_u2
        )
    else:
        report = excess_mass_test(sample, args.k, args.B, seed, alpha=args.alpha, tuning=tuning, workers=args.workers)
    _emit_report(args, report, sample, out)
    return EXIT_OK


def cmd_critbw(args, out) -> int:
    sample = _load(args)
    result = critical_bandwidth(sample, args.k)
    record = {
        "k": result.k,
        "h_k": result.h_k,
        "modes_at_hk": result.modes_at_hk,
        "modes_below": result.modes_below,
        "floor_hit": result.floor_hit,
        "bracketing_tol_rel": result.bracketing_tol_rel,
        "n": sample.n,
    }
    if args.format == "json":
        _emit_json({"command": "critbw", "input": args.input, "result": record}, out)
    elif args.format == "csv":
        _emit_csv([record], list(record), out)
    else:
        out.write(f"Critical bandwidth for at most {result.k} mode(s) (n = {sample.n}):\n")
        out.write(f"  h_{result.k} = {result.h_k:.6g}\n")
        out.write(f"  modes at h_{result.k}: {result.modes_at_hk}\n")
        if result.floor_hit:
            out.write(f"  floor hit: the estimate has at most {result.k} mode(s) at every bandwidth searched\n")
        else:
            out.write(f"  modes just below: {result.modes_below}\n")
    return EXIT_OK


def cmd_kde_curve(args, out) -> int:
    sample = _load(args)
    records = []
    for h in args.h:
        grid, density = kde_curve(KdeSpec(sample, h), args.grid_size)
        records.extend({"h": h, "x": float(x), "density": float(f)} for x, f in zip(grid, density))
    if args.format == "json":
        _emit_json({"command": "kde-curve", "input": args.input, "points": records}, out)
    elif args.format == "csv":
        _emit_csv(records, ["h", "x", "density"], out)
    else:
        for h in args.h:
            values = [r["density"] for r in records if r["h"] == h]
            out.write(f"h = {h:g}: {len(values)} points, max density {max(values):.6g}\n")
    return EXIT_OK


def cmd_simulate(args, out) -> int:
    seed = _seed(args, out)
    options = {"sample_sizes": args.sizes, "alphas": args.alphas, "M": args.M, "B": args.B, "seed": seed}
    if args.layout is not None:
        design = StudyDesign.for_layout(args.layout, **options)
        if args.k is not None:
            design = StudyDesign(design.models, k=args.k, **options)
        if args.models:
            raise InvalidParameterError("Use either --models or --layout, not both")
    else:
        design = StudyDesign.from_ids(args.models or ["M1", "M6"], k=args.k or 1, **options)
    which = "likelihood" if args.test == "lrt" else "excess_mass"
    result = run_study(design, which, workers=args.workers, checkpoint=args.checkpoint)
    if args.format == "json":
        rows = [
            {
                "model": row.model_id,
                "n": row.n,
                "alpha": row.alpha,
                "rejection_proportion": row.rejection_proportion,
                "mc_standard_error": row.mc_standard_error,
            }
            for row in result.rows
        ]
        _emit_json({"command": "simulate", "test": which, "k": design.k, "M": design.M, "B": design.B, "rows": rows}, out)
    else:
        out.write(export_table(result, args.layout))
    return EXIT_OK


def cmd_summarize(args, out) -> int:
    sample = _load(args)
    summary = summarize(sample)
    record = {
        "n": summary.n,
        "mean_direction": summary.mean_direction,
        "resultant_length": summary.resultant_length,
        "circular_variance": summary.circular_variance,
        "mean_defined": summary.mean_defined,
    }
    if args.format == "json":
        _emit_json({"command": "summarize", "input": args.input, "summary": record}, out)
    elif args.format == "csv":
        _emit_csv([record], list(record), out)
    else:
        mean = "undefined (resultant length ~ 0)" if summary.mean_direction is None else f"{summary.mean_direction:.6f} rad"
        out.write(f"n = {summary.n}\n")
        out.write(f"mean direction = {mean}\n")
        out.write(f"mean resultant length = {summary.resultant_length:.6f}\n")
        out.write(f"circular variance = {summary.circular_variance:.6f}\n")
    return EXIT_OK


COMMANDS = {
    "test": cmd_test,
    "emtest": cmd_emtest,
    "critbw": cmd_critbw,
    "kde-curve": cmd_kde_curve,
    "simulate": cmd_simulate,
    "summarize": cmd_summarize,
}


def main(argv: Optional[Sequence[str]] = None, out=None) -> int:
    """Run the CLI and return its exit status."""
    args = build_parser().parse_args(argv)
    out = out if out is not None else sys.stdout
    level = logging.WARNING if args.verbose == 0 else logging.INFO if args.verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    buffer = io.StringIO()
    try:
        status = COMMANDS[args.command](args, buffer)
    except TieError as exc:
        print(f"Error: {exc} Remove or investigate the repeated values before testing.", file=sys.stderr)
        return EXIT_USAGE
    except (IngestError, InvalidParameterError) as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CircModeError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    out.write(buffer.getvalue())
    return status


if __name__ == "__main__":
    sys.exit(main())
