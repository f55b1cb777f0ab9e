"""Command-line front end.

Usage::

    absorblab SCENARIO [--config PATH] [--out DIR] [--tolerance-scale X]

where SCENARIO is one of ``conditions``, ``flat-ode``, ``stationary``,
``theorem-b``, ``theorem-c``, ``non-uniqueness``, ``alpha2``.

Exit codes: 0 when every recorded check passed, 2 for configuration
errors (unknown key, bad value, unreadable file), 3 for numerical
failures or failed checks.  The worker count for embarrassingly
parallel scheme runs comes from the ``ABSORBLAB_THREADS`` environment
variable (default 1); it never affects results, only wall time.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .config import SCENARIOS, load_config
from .errors import AbsorbLabError, ConfigError
from .scenarios import run_scenario

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _worker_count() -> int:
    raw = os.environ.get("ABSORBLAB_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"ABSORBLAB_THREADS must be an integer, got {raw!r}")
    if n < 1:
        raise ConfigError(f"ABSORBLAB_THREADS must be >= 1, got {n}")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="absorblab",
        description="Absorption-threshold lab: run a scenario and write CSV + manifest.",
    )
    parser.add_argument("--version", action="version", version=f"absorblab {__version__}")
    sub = parser.add_subparsers(dest="scenario", required=True)
    for name in SCENARIOS:
        p = sub.add_parser(name, help=f"run the {name} scenario")
        p.add_argument("--config", metavar="PATH", default=None,
                       help="flat key = value config file (defaults apply if omitted)")
        p.add_argument("--out", metavar="DIR", default=f"out-{name}",
                       help="output directory (created if missing)")
        p.add_argument("--tolerance-scale", metavar="X", type=float, default=1.0,
                       help="multiply every pass/fail tolerance by X")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if not args.tolerance_scale > 0.0:
            raise ConfigError(
                f"--tolerance-scale must be positive, got {args.tolerance_scale:g}"
            )
        workers = _worker_count()
        config = load_config(args.scenario, args.config)
    except ConfigError as exc:
        print(f"absorblab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        manifest = run_scenario(config, args.out, args.tolerance_scale, workers)
    except ConfigError as exc:
        print(f"absorblab: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AbsorbLabError as exc:
        print(f"absorblab: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except Exception as exc:  # anything unexpected still maps to the failure code
        print(f"absorblab: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    failed = [name for name, ok in manifest.checks.items() if not ok]
    if failed:
        print(
            f"absorblab: {len(failed)} check(s) failed: {', '.join(sorted(failed))}",
            file=sys.stderr,
        )
        return EXIT_NUMERICAL
    print(f"absorblab: {args.scenario}: all {len(manifest.checks)} checks passed "
          f"({args.out}/manifest.json)")
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
