#!/usr/bin/env python3
"""
CLI tool to test an angle file for multimodality and show how the verdict was reached.
"""
import argparse
import os
import pprint
import sys

# Adjust path to import from circmode module if script is in root
sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), ".")))

from circmode.bands import critical_bandwidth, likelihood_profile  # noqa: E402
from circmode.errors import CircModeError  # noqa: E402
from circmode.ingest import AngleFileSpec, read_angle_file  # noqa: E402
from circmode.kde import KdeSpec, count_modes  # noqa: E402
from circmode.lrtest import format_report, run_test  # noqa: E402


def parse_arguments(argv=None):
    """Parse command line arguments."""
    parser = argparse.ArgumentParser(description="Test an angle file for more than k modes.")
    parser.add_argument("angle_file", help="Input file, one angle per line")
    parser.add_argument("--unit", choices=["radians", "degrees"], default="radians")
    parser.add_argument("--convention", choices=["compass", "math"], default="compass")
    parser.add_argument("--k", type=int, default=1, help="Number of modes under the null hypothesis")
    parser.add_argument("--B", type=int, default=200, help="Bootstrap resamples")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument(
        "--debug-dump",
        action="store_true",
        help="Dump the critical bandwidth search and the likelihood profile",
    )
    return parser.parse_args(argv)


def read_sample(args):
    spec = AngleFileSpec(args.angle_file, unit=args.unit, convention=args.convention)
    try:
        result = read_angle_file(spec)
    except CircModeError as e:
        print(f"Error: {e}")
        sys.exit(1)

    if result.errors:
        print(f"Parser errors found in '{args.angle_file}':")
        for error in result.errors:
            print(f"  {error}")
    for warning in result.warnings:
        print(f"Warning: {warning}")

    if result.sample is None:
        print(f"No angles found in '{args.angle_file}'. Cannot perform analysis.")
        sys.exit(1)
    return result.sample


def dump_search(sample, args):
    critical = critical_bandwidth(sample, args.k)
    print("\n--- DEBUG DUMP: Critical bandwidth ---")
    pprint.pprint(critical)
    modes = count_modes(KdeSpec(sample, critical.h_k))
    print(f"Modes of the estimate at h_{args.k}:")
    pprint.pprint(modes.mode_locations)
    profile = likelihood_profile(sample, critical.h_k)
    print("\n--- DEBUG DUMP: Likelihood profile (h, l_CV) ---")
    pprint.pprint(profile.grid)


def main(argv=None):
    args = parse_arguments(argv)
    sample = read_sample(args)
    try:
        if args.debug_dump:
            dump_search(sample, args)
        report = run_test(sample, args.k, args.B, args.seed)
    except CircModeError as e:
        print(f"\nError during the test for '{args.angle_file}': {e}")
        sys.exit(1)
    print(f"\n--- Multimodality Report for {args.angle_file} ---")
    print(format_report(report))


if __name__ == "__main__":
    main()
