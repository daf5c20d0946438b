"""Command-line entry point: ``felix <command> --config FILE [options]``."""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .experiments.config import (
    DYNAMIC_KINDS,
    ConfigError,
    UnknownKind,
    load_config,
    resolve,
    schema_help,
)

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_UNKNOWN_KIND = 4
EXIT_IO = 5
EXIT_NO_CONVERGENCE = 6

COMMAND_KINDS = {
    "phase": ("phase2p",),
    "dynamics": DYNAMIC_KINDS,
    "toc": ("toc_sweep",),
}

EPILOG = f"""\
exit codes:
  {EXIT_OK}  success
  {EXIT_USAGE}  usage error (bad flags, FELIX_THREADS not a positive integer)
  {EXIT_INVALID}  invalid config (syntax, unknown key, bad value, kind does not fit the command)
  {EXIT_UNKNOWN_KIND}  unknown experiment.kind
  {EXIT_IO}  file could not be read or written
  {EXIT_NO_CONVERGENCE}  an equilibrium or dynamics run did not converge (outputs are still written)

environment:
  FELIX_THREADS  maximum number of worker processes (default: CPU count)

config keys:
{schema_help()}
"""


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="felix",
        description="Run prosocial-preference experiments from a config file.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"felix {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")
    helps = {
        "phase": "two-player phase diagram (kind phase2p)",
        "dynamics": "prosociality dynamics on a graph (cg_pd, er_dynamics, wealth_pd, custom)",
        "toc": "tragedy-of-the-commons sweep over q (toc_sweep)",
        "sweep": "repeat any experiment over the values of sweep.key",
        "validate": "check a config and print the resolved version",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, help=text, description=text, epilog=EPILOG,
                           formatter_class=argparse.RawDescriptionHelpFormatter)
        p.add_argument("--config", required=True, metavar="PATH", help="experiment config file")
        p.add_argument("--seed", type=int, metavar="N", help="override experiment.seed")
        p.add_argument("--replicates", type=int, metavar="N", help="override experiment.replicates")
        p.add_argument("--graph-file", metavar="PATH", help="use this edge list as the graph")
        p.add_argument("--quiet", action="store_true", help="print nothing on success")
        if name != "validate":
            p.add_argument("--out", default="out", metavar="DIR", help="output directory (default: out)")
    return parser


def _load(args) -> dict:
    raw = load_config(args.config)
    if args.seed is not None:
        raw["experiment.seed"] = args.seed
    if args.replicates is not None:
        raw["experiment.replicates"] = args.replicates
    if args.graph_file is not None:
        raw["graph.kind"] = "file"
        raw["graph.file"] = os.path.abspath(args.graph_file)
        raw.pop("graph.n", None)
        raw.pop("graph.mean_degree", None)
    cfg = resolve(raw)
    if args.command in COMMAND_KINDS and cfg["experiment.kind"] not in COMMAND_KINDS[args.command]:
        raise ConfigError(f"'{args.command}' cannot run experiment.kind = {cfg['experiment.kind']}")
    if args.command == "sweep" and "sweep.key" not in cfg:
        raise ConfigError("'sweep' needs sweep.key and sweep.values in the config")
    if args.command in COMMAND_KINDS and "sweep.key" in cfg:
        raise ConfigError("config has a sweep section; run it with 'felix sweep'")
    if cfg.get("graph.kind") == "file" and not os.path.isfile(cfg["graph.file"]):
        raise FileNotFoundError(cfg["graph.file"])
    return cfg


def main(argv=None) -> int:
    from .experiments.config import format_config
    from .experiments.output import write_outputs
    from .experiments.runners import WorkerCountError, execute, worker_count

    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    def say(msg):
        if not args.quiet:
            print(msg)

    try:
        cfg = _load(args)
        if args.command == "validate":
            say(format_config(cfg).rstrip())
            return EXIT_OK
        worker_count(1)
        result = execute(cfg)
        paths = write_outputs(args.out, result.tables, cfg, __version__, args.command)
    except WorkerCountError as exc:
        print(f"felix: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnknownKind as exc:
        print(f"felix: {exc}", file=sys.stderr)
        return EXIT_UNKNOWN_KIND
    except (ConfigError, ValueError) as exc:
        print(f"felix: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"felix: {exc}", file=sys.stderr)
        return EXIT_IO

    for p in paths:
        say(f"wrote {p}")
    if result.failures:
        print(f"felix: {len(result.failures)} run(s) did not converge:", file=sys.stderr)
        for line in result.failures[:10]:
            print(f"  {line}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
