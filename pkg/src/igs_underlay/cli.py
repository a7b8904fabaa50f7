"""Command-line entry point: one subcommand per experiment scenario."""

from __future__ import annotations

import argparse
import sys
from typing import List, Optional

from ._quadrature import QuadratureError
from .experiments import SCENARIOS, ConfigError, default_config, load_config, run

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="igs-underlay",
        description="Sweeps of outage, design and energy-efficiency results for an "
                    "improper-signaling underlay SU sharing spectrum with a full-duplex PU.",
    )
    sub = parser.add_subparsers(dest="scenario", required=True, metavar="SCENARIO")
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} sweep")
        p.add_argument("--config", metavar="PATH", help="TOML config overriding the defaults")
        p.add_argument("--out", metavar="PATH", help="CSV output path (default: stdout)")
        p.add_argument("--seed", type=int, help="Monte Carlo master seed")
        p.add_argument("--samples", type=int, help="Monte Carlo samples per estimate")
        p.add_argument("--no-mc", action="store_true", help="analytic columns only")
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config, args.scenario) if args.config else default_config(args.scenario)
        mc = config.montecarlo
        config.montecarlo = type(mc)(
            enabled=mc.enabled and not args.no_mc,
            n=mc.n if args.samples is None else args.samples,
            seed=mc.seed if args.seed is None else args.seed,
        )
        out = args.out or config.output
        text = run(config, out)
    except ConfigError as exc:
        for d in exc.diagnostics:
            print(f"config error: {d}", file=sys.stderr)
        return EXIT_CONFIG
    except QuadratureError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"cannot write output: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if not out:
        sys.stdout.write(text)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
