from ..services.experiments import EXPERIMENTS


def register(subparsers) -> None:
    from . import add_common_arguments, add_points, add_time_grid

    parser = subparsers.add_parser("tv-hybrid", help=EXPERIMENTS["tv-hybrid"].help)
    add_points(parser)
    add_time_grid(parser)
    parser.add_argument("--t0", type=float, help="lower limit on the contraction phase t1")
    parser.add_argument("--rounds", type=int, help="coalescence attempts per run")
    parser.add_argument("--eps", type=float, help="also report one-attempt success bounds for this eps")
    parser.add_argument("--t", type=float, help="attempt length for --eps (default: eps)")
    add_common_arguments(parser)
