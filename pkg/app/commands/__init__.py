"""
Argparse subcommands, one module per experiment group.

Every flag defaults to None so that only flags given on the command line
override the experiment defaults and the --config file.
"""
import argparse

from ..core.errors import UsageError
from ..schemas.experiment import OutputFormat
from . import invariant, models, total_variation, wasserstein

GROUPS = (wasserstein, total_variation, models, invariant)


class LabArgumentParser(argparse.ArgumentParser):
    """Reports bad arguments as UsageError (exit 1) instead of exiting with 2."""

    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def add_common_arguments(parser: argparse.ArgumentParser) -> None:
    run = parser.add_argument_group("run")
    run.add_argument("--config", metavar="FILE", help="key = value config file")
    run.add_argument("--replicas", type=int, help="Monte Carlo replica count")
    run.add_argument("--seed", type=int, help="master seed")
    run.add_argument("--threads", type=int, help="worker threads (default: LAB_THREADS or cpu count)")
    run.add_argument("--output", help="artifact path stem")
    run.add_argument("--format", choices=[f.value for f in OutputFormat], help="artifact format")
    run.add_argument("--plot", action="store_true", default=None, help="also write SVG plots")
    run.add_argument("--check", action="store_true", default=None,
                     help="compare against acceptance thresholds; exit 3 on failure")


def add_points(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--x", type=float, help="initial point of the first path")
    parser.add_argument("--y", type=float, help="initial point of the second path")


def add_time_grid(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--grid", "--times", dest="times", metavar="GRID",
                        help="time grid, start:stop:step or a comma list")
    parser.add_argument("--window-min", type=float, help="rate fit window start")
    parser.add_argument("--window-max", type=float, help="rate fit window end")


def build_parser(prog: str = "windowlab") -> argparse.ArgumentParser:
    parser = LabArgumentParser(prog=prog, description="TCP window-size process simulation and bound verification")
    parser.add_argument("-v", "--verbose", action="store_true", help="debug logging")
    subparsers = parser.add_subparsers(dest="experiment", required=True, metavar="EXPERIMENT")
    for group in GROUPS:
        group.register(subparsers)
    return parser
