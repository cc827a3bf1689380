from ..services.experiments import EXPERIMENTS


def register(subparsers) -> None:
    from . import add_common_arguments

    parser = subparsers.add_parser("invariant-check", help=EXPERIMENTS["invariant-check"].help)
    parser.add_argument("--x", type=float, help="starting point of the stationary simulation")
    parser.add_argument("--t", type=float, help="burn-in time")
    add_common_arguments(parser)
