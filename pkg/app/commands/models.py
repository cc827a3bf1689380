"""Subcommands for the two models with explicit laws: constant rate and storage."""
from ..services.experiments import EXPERIMENTS


def register(subparsers) -> None:
    from . import add_common_arguments, add_points, add_time_grid

    parser = subparsers.add_parser("constant-rate", help=EXPERIMENTS["constant-rate"].help)
    add_points(parser)
    add_time_grid(parser)
    parser.add_argument("--lambda", dest="lam", type=float, help="jump rate")
    parser.add_argument("--n", type=int, help="moment order")
    parser.add_argument("--t", type=float, help="extra coupling time; inf reports the stationary moment only")
    add_common_arguments(parser)

    parser = subparsers.add_parser("storage", help=EXPERIMENTS["storage"].help)
    add_points(parser)
    add_time_grid(parser)
    parser.add_argument("--alpha", type=float, help="input rate")
    parser.add_argument("--beta", type=float, help="release rate")
    parser.add_argument("--t", type=float, help="extra coupling time")
    add_common_arguments(parser)
