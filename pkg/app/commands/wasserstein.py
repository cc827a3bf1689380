from ..services.experiments import EXPERIMENTS


def register(subparsers) -> None:
    from . import add_common_arguments, add_points, add_time_grid

    for name in ("fig2", "rate-coupling", "w1-true"):
        parser = subparsers.add_parser(name, help=EXPERIMENTS[name].help)
        add_points(parser)
        add_time_grid(parser)
        if name == "rate-coupling":
            parser.add_argument("--t0", type=float, help="start of the decay regime for the W1 bound")
        add_common_arguments(parser)

    parser = subparsers.add_parser("optimal-p", help=EXPERIMENTS["optimal-p"].help)
    parser.add_argument("--grid", dest="p_grid", metavar="GRID", help="p grid, start:stop:step or a comma list")
    add_common_arguments(parser)
