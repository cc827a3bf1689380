import logging
import sys
from pathlib import Path
from typing import List, Optional

from . import __version__
from .commands import build_parser
from .core.config import get_settings
from .core.errors import AcceptanceError, LabError, NumericalFailureError
from .core.worker_pool import configure_worker_pool
from .schemas.experiment import ExperimentConfig, ExperimentResult
from .services.artifacts import write_artifacts
from .services.experiments import resolve_config, run

logger = logging.getLogger(__name__)

# Command-line keys that are not ExperimentConfig fields
_CLI_ONLY = {"config", "verbose", "experiment"}


def configure_logging(verbose: bool = False) -> None:
    settings = get_settings()
    handlers: List[logging.Handler] = [logging.StreamHandler()]
    if settings.LOG_FILE and not settings.DEBUG:
        handlers.append(logging.FileHandler(settings.LOG_FILE))
    logging.basicConfig(
        level=logging.DEBUG if verbose or settings.DEBUG else logging.INFO,
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
        force=True,
    )


def _report(result: ExperimentResult) -> None:
    """Scalars, rates and check verdicts on stdout; artifacts carry the series."""
    out = sys.stdout
    out.write(f"{result.experiment} ({__version__})\n")
    for name, value in result.scalars.items():
        out.write(f"  {name} = {value!r}\n")
    for name, fit in result.rates.items():
        out.write(f"  rate[{name}] slope = {fit.slope:.6g} +/- {fit.slope_stderr:.3g} on {fit.window}\n")
    for check in result.checks:
        verdict = "PASS" if check.passed else "FAIL"
        out.write(f"  [{verdict}] {check.name}: {check.observed:.6g} vs {check.threshold:.6g}\n")


def execute(argv: Optional[List[str]] = None) -> ExperimentResult:
    args = build_parser().parse_args(argv)
    configure_logging(args.verbose)

    file_values = {}
    if args.config:
        path = Path(args.config)
        try:
            file_values = ExperimentConfig.parse_text(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise LabError(f"cannot read config file {path}: {e}") from e
    overrides = {k: v for k, v in vars(args).items() if k not in _CLI_ONLY}
    config = resolve_config(args.experiment, file_values, overrides)

    pool = configure_worker_pool(config.threads)
    try:
        result = run(config, pool)
    finally:
        pool.close()
    write_artifacts(result, plot=config.plot)
    _report(result)
    if config.check and not result.passed:
        raise AcceptanceError(result.failures())
    return result


def main(argv: Optional[List[str]] = None) -> int:
    try:
        execute(argv)
    except AcceptanceError as e:
        logger.warning(f"{len(e.failures)} acceptance check(s) failed")
        for failure in e.failures:
            logger.warning(f"  {failure}")
        return e.exit_code
    except NumericalFailureError as e:
        logger.warning(f"Numerical failure: {e}")
        return e.exit_code
    except LabError as e:
        logger.warning(f"Usage error: {e}")
        return e.exit_code
    except ValueError as e:
        logger.warning(f"Invalid value: {e}")
        return 1
    except Exception as e:
        logger.error(f"Unexpected error: {e}", exc_info=True)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
