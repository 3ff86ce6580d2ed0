"""Command-line entry point: ``simulate <preset|config.toml> [options]``.

Precedence is flags > config file > defaults. ``POLARITON_WIRE_WORKERS`` sets
the worker count only when ``--workers`` is absent.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys
from pathlib import Path

from polariton_wire.config import parse_config, parse_override
from polariton_wire.errors import (
    ConfigError,
    DomainError,
    IntegrityError,
    NumericalError,
    ObservableError,
    ResourceGuardError,
)
from polariton_wire.presets import PRESETS, TIERS, run_preset, run_single

WORKERS_ENV = "POLARITON_WIRE_WORKERS"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_RESOURCE = 4


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="simulate",
        description="Exciton wave packet dynamics in a multimode polaritonic wire.",
        epilog=f"presets: {', '.join(PRESETS)}. Exit codes: 0 ok, 2 config, 3 numerical, 4 resource guard.",
    )
    p.add_argument("target", help="preset name or path to a TOML config file")
    p.add_argument("--seed", type=int, help="master seed for the disorder ensemble")
    p.add_argument("--realizations", type=int, help="number of disorder realizations")
    p.add_argument("--workers", type=int, help=f"worker processes (else ${WORKERS_ENV}, else config)")
    p.add_argument("--out", type=Path, help="output directory")
    p.add_argument("--override", action="append", default=[], metavar="SECTION.KEY=VALUE",
                   help="override one config value; repeatable")
    p.add_argument("--tier", choices=TIERS, default="desk", help="preset scale (default: desk)")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    return p


def _flag_overrides(args) -> list:
    flags = []
    if args.seed is not None:
        flags.append(("ensemble", "seed", args.seed))
    if args.realizations is not None:
        flags.append(("ensemble", "realizations", args.realizations))
    workers = args.workers
    if workers is None and os.environ.get(WORKERS_ENV):
        try:
            workers = int(os.environ[WORKERS_ENV])
        except ValueError as exc:
            raise ConfigError(f"${WORKERS_ENV} must be an integer, got {os.environ[WORKERS_ENV]!r}") from exc
    if workers is not None:
        flags.append(("ensemble", "workers", workers))
    return flags


def run(args) -> int:
    overrides = [parse_override(o) for o in args.override]
    flags = _flag_overrides(args)
    if args.target in PRESETS:
        out = args.out or Path("out") / args.target
        run_preset(args.target, out, args.tier, overrides, flags)
    else:
        path = Path(args.target)
        if path.suffix != ".toml" and not path.exists():
            raise ConfigError(f"{args.target!r} is neither a preset ({', '.join(PRESETS)}) nor a config file")
        cfg = parse_config(path, overrides + flags)
        out = args.out or Path(cfg["output"]["path"])
        run_single(cfg, out)
    print(f"wrote {out}")
    return EXIT_OK


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return run(args)
    except (ConfigError, DomainError) as exc:
        for line in getattr(exc, "violations", None) or [str(exc)]:
            print(f"config error: {line}", file=sys.stderr)
        return EXIT_CONFIG
    except (NumericalError, IntegrityError, ObservableError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ResourceGuardError as exc:
        print(f"resource guard: {exc}", file=sys.stderr)
        return EXIT_RESOURCE


if __name__ == "__main__":
    sys.exit(main())
