"""Command-line front end.

Subcommands::

    jiomber run --preset fig2 --set num_users=10 --runs 20 --out fig2.csv
    jiomber preset fig4 --show
    jiomber complexity --m 32 --d 6
    jiomber validate

Exit status is 0 on success, 1 for a configuration error and 2 when the
validation suite fails.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

from jiomber import __version__
from jiomber.complexity import format_csv, format_table
from jiomber.config import (
    PRESET_NAMES,
    ConfigError,
    ExperimentConfig,
    apply_overrides,
    dumps,
    loads,
    preset,
)
from jiomber.harness import curves_to_csv, curves_to_json, run_experiment
from jiomber.validation import format_checks, run_checks

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_VALIDATION = 2

logger = logging.getLogger("jiomber")


class _Parser(argparse.ArgumentParser):
    """Usage errors share the configuration-error exit status."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _add_experiment_flags(p: argparse.ArgumentParser):
    p.add_argument("--config", type=Path, help="flat key = value config file")
    p.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                   help="override one config key (repeatable)")
    p.add_argument("--runs", type=int, help="Monte-Carlo runs (shorthand for --set monte_carlo_runs=N)")
    p.add_argument("--seed", type=int, help="base seed (shorthand for --set base_seed=N)")
    p.add_argument("--workers", type=int, help="worker processes")
    p.add_argument("--out", type=Path, help="CSV output path; provenance JSON goes next to it")
    p.add_argument("--show", action="store_true", help="print the resolved config and exit")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="jiomber", description=__doc__.split("\n")[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="run an experiment from a config file and/or preset")
    run.add_argument("--preset", choices=PRESET_NAMES)
    _add_experiment_flags(run)

    pre = sub.add_parser("preset", help="run a named preset")
    pre.add_argument("name", choices=PRESET_NAMES)
    _add_experiment_flags(pre)

    cx = sub.add_parser("complexity", help="per-symbol operation counts")
    cx.add_argument("--m", type=int, default=32, help="number of antennas")
    cx.add_argument("--d", type=int, default=6, help="rank")
    cx.add_argument("--csv", action="store_true")

    sub.add_parser("validate", help="run the invariant suite")
    return parser


def resolve_config(args) -> tuple:
    """Base config (preset, then file), then overrides.  Returns ``(config, overrides)``."""
    name = getattr(args, "name", None) or getattr(args, "preset", None)
    config = preset(name) if name else ExperimentConfig()
    if args.config is not None:
        try:
            text = args.config.read_text()
        except OSError as exc:
            raise ConfigError(f"config {str(args.config)!r}: {exc.strerror}") from exc
        data = config.to_dict()
        data.update(loads(text))
        config = ExperimentConfig.from_dict(data)
    overrides = list(args.overrides)
    if args.runs is not None:
        overrides.append(f"monte_carlo_runs={args.runs}")
    if args.seed is not None:
        overrides.append(f"base_seed={args.seed}")
    if args.workers is not None:
        overrides.append(f"workers={args.workers}")
    return apply_overrides(config, overrides), overrides


def _run(args) -> int:
    config, overrides = resolve_config(args)
    if args.show:
        sys.stdout.write(dumps(config))
        return EXIT_OK
    t0 = time.perf_counter()
    curves = run_experiment(config)
    elapsed = time.perf_counter() - t0
    logger.info("%s: %d receivers, %d runs in %.1f s", config.name, len(curves), config.monte_carlo_runs, elapsed)
    csv_text = curves_to_csv(curves)
    provenance = {
        "version": __version__,
        "preset": getattr(args, "name", None) or getattr(args, "preset", None),
        "config_file": str(args.config) if args.config else None,
        "overrides": overrides,
        "argv": list(args.argv),
    }
    if args.out is None:
        sys.stdout.write(csv_text)
        return EXIT_OK
    args.out.parent.mkdir(parents=True, exist_ok=True)
    args.out.write_text(csv_text)
    args.out.with_suffix(".json").write_text(curves_to_json(config, curves, provenance))
    return EXIT_OK


def _complexity(args) -> int:
    try:
        text = format_csv(args.m, args.d) if args.csv else format_table(args.m, args.d)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    print(text)
    return EXIT_OK


def _validate(args) -> int:
    results = run_checks()
    print(format_checks(results))
    return EXIT_OK if all(c.passed for c in results) else EXIT_VALIDATION


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    args.argv = argv
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    handlers = {"run": _run, "preset": _run, "complexity": _complexity, "validate": _validate}
    try:
        return handlers[args.command](args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
