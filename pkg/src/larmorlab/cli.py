"""Command-line entry point.

One subcommand per scenario; every run writes a manifest with the fully
resolved configuration plus CSV tables (and companion figures) that
cross-reference the manifest hash.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import plots, reports, scenarios
from .config import ConfigError, config_items, load_config, refine_config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="larmorlab",
        description=(
            "Larmor-clock timing of transmitted and reflected subensembles "
            "for 1D barrier scattering"
        ),
    )
    sub = parser.add_subparsers(dest="scenario", required=True)
    descriptions = {
        "stationary": "transmission/reflection/phase sweep over k",
        "decompose": "stationary transmission/reflection field profiles at k0",
        "packet": "time-dependent occupancy and channel-norm traces",
        "larmor": "Larmor, dwell and phase times (all routes)",
        "hartman": "opacity sweep: dwell time vs saturating phase time",
        "verify": "direct-evolution check of the precession-clock relation",
        "probe": "asymptotic spin response to the field placement",
    }
    for name, helptext in descriptions.items():
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", metavar="PATH", help="key = value config file")
        p.add_argument("--out", metavar="DIR", default="out", help="output directory")
        p.add_argument(
            "--refine",
            type=int,
            default=1,
            metavar="FACTOR",
            help="multiply all grid resolutions (convergence checks)",
        )
        p.add_argument("--quiet", action="store_true", help="suppress console summary")
    return parser


def run(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
        if args.refine != 1:
            cfg = refine_config(cfg, args.refine)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    result = scenarios.SCENARIOS[args.scenario](cfg)

    os.makedirs(args.out, exist_ok=True)
    digest = reports.write_manifest(args.out, config_items(cfg))
    written = []
    for name, (header, rows) in result["tables"].items():
        written.append(reports.write_csv(args.out, name, header, rows, digest))
    written.extend(plots.render(args.scenario, result.get("figures"), args.out))

    if not args.quiet:
        for line in result.get("summary", []):
            print(line)
        for path in written:
            print(f"wrote {path}")
    return 0


def main():
    raise SystemExit(run())


if __name__ == "__main__":
    main()
