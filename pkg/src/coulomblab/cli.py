"""``lab <experiment> --config FILE [--seed N] [--threads N] [--out DIR]`` and ``lab describe <experiment>``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .harness import EXIT_INVALID, EXIT_OK, EXPERIMENTS, ConfigError, describe, make_config, parse_config, run


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="lab", description="Coulomb-gas and concentration-operator experiments.")
    ap.add_argument("experiment", help=f"one of: {', '.join(EXPERIMENTS)}, or 'describe'")
    ap.add_argument("target", nargs="?", help="experiment name for 'describe'")
    ap.add_argument("--config", type=Path, help="JSON run configuration")
    ap.add_argument("--seed", type=int)
    ap.add_argument("--threads", type=int, help="worker threads (default: LAB_THREADS or 1)")
    ap.add_argument("--out", help="output directory")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.experiment == "describe":
            if args.target is None:
                raise ConfigError("describe needs an experiment name")
            print(describe(args.target))
            return EXIT_OK
        if args.target is not None:
            raise ConfigError(f"unexpected argument {args.target!r}")
        if args.config is not None:
            try:
                text = args.config.read_text()
            except OSError as exc:
                raise ConfigError(f"cannot read {args.config}: {exc}") from exc
            data = parse_config(text, str(args.config))
        else:
            data = {}
        cfg = make_config(data, args.experiment, args.seed, args.threads, args.out)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    result = run(cfg)
    for path in result.artifacts:
        print(path)
    if result.message:
        print(result.message, file=sys.stderr)
    return result.status


if __name__ == "__main__":
    sys.exit(main())
