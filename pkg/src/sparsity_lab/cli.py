"""Command-line entry point: ``sparsity-lab [flags] MODE key=value ...``."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import budget
from .errors import ConfigError
from .harness import EXIT_CONFIG, MODES, build_config, parse_pairs, read_config_file, run


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which is reserved for bound failures
    def error(self, message):
        raise ConfigError(message)


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(
        prog="sparsity-lab",
        description="Exact experiments on sparse representations of squares.",
        epilog=f"Modes: {' | '.join(MODES)}.  Parameters are key=value pairs.",
    )
    p.add_argument("--config", type=Path, help="flat key=value file; '#' starts a comment")
    p.add_argument("--out", type=Path, help="output file (default: stdout)")
    p.add_argument("--format", choices=("csv", "jsonl"), dest="fmt")
    p.add_argument("--budget", type=int, help=f"workload budget; {budget.ENV_VAR} overrides it")
    p.add_argument("--seed", type=int)
    p.add_argument("mode", nargs="?", help="one of: " + ", ".join(MODES))
    p.add_argument("params", nargs="*", metavar="key=value")
    return p


def main(argv: list[str] | None = None) -> int:
    try:
        args = make_parser().parse_args(argv)
        raw: dict[str, str] = {}
        if args.config is not None:
            raw.update(read_config_file(args.config))
        raw.update(parse_pairs(args.params, "command line"))
        try:
            workload = budget.budget_from_env(args.budget)
        except ValueError:
            raise ConfigError(f"{budget.ENV_VAR} must be an integer") from None
        cfg = build_config(args.mode, raw, args.seed, workload, args.fmt, args.out)
    except (ConfigError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
