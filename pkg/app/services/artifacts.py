"""
Result artifacts: CSV series and tables headed by the resolved config,
a JSON dump of the whole result, and optional SVG plots.
"""
import csv
import logging
from pathlib import Path
from typing import Iterable, List, Optional

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

from ..core.config import get_settings
from ..core.errors import LabError
from ..schemas.experiment import ExperimentResult, OutputFormat, SeriesRow

logger = logging.getLogger(__name__)

SERIES_COLUMNS = ("t", "estimate", "stderr", "bound", "lower_bound")


def output_stem(result: ExperimentResult) -> Path:
    if result.config.output:
        return Path(result.config.output)
    return Path(get_settings().OUTPUT_DIR) / result.experiment


def _header(result: ExperimentResult) -> List[str]:
    lines = [f"# version = {result.version}"]
    lines.extend(f"# {line}" for line in result.config.to_text().splitlines())
    return lines


def _columns(rows: List[SeriesRow]) -> List[str]:
    # optional columns only when some row carries them
    return [c for c in SERIES_COLUMNS if c in ("t", "estimate", "stderr") or any(getattr(r, c) is not None for r in rows)]


def _write_csv(path: Path, header: List[str], columns: List[str], rows: Iterable[dict]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        for line in header:
            handle.write(line + "\n")
        writer = csv.DictWriter(handle, fieldnames=columns, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: ("" if v is None else repr(v) if isinstance(v, float) else v) for k, v in row.items()})
    return path


def write_csv(result: ExperimentResult, stem: Optional[Path] = None) -> List[Path]:
    """One file per series (`<stem>.<series>.csv`) and per table."""
    stem = stem or output_stem(result)
    header = _header(result)
    written = []
    for name, rows in result.series.items():
        path = stem.with_name(f"{stem.name}.{name}.csv")
        written.append(_write_csv(path, header, _columns(rows), (r.model_dump() for r in rows)))
    for name, rows in result.tables.items():
        if not rows:
            continue
        path = stem.with_name(f"{stem.name}.{name}.csv")
        written.append(_write_csv(path, header, list(rows[0].keys()), rows))
    return written


def write_json(result: ExperimentResult, stem: Optional[Path] = None) -> Path:
    stem = stem or output_stem(result)
    path = stem.with_name(f"{stem.name}.json")
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(result.model_dump_json(indent=2), encoding="utf-8")
    return path


def write_plots(result: ExperimentResult, stem: Optional[Path] = None) -> List[Path]:
    """SVG per series: estimate with its confidence band and any bounds, log scale when positive."""
    stem = stem or output_stem(result)
    k = get_settings().CONFIDENCE_MULTIPLIER
    written = []
    # deterministic SVG output for identical results
    with matplotlib.rc_context({"svg.hashsalt": "windowlab"}):
        for name, rows in result.series.items():
            if not rows:
                continue
            ts = [r.t for r in rows]
            est = [r.estimate for r in rows]
            fig, ax = plt.subplots(figsize=(6, 4))
            ax.plot(ts, est, marker="o", markersize=3, label="estimate")
            ax.fill_between(ts, [r.estimate - k * r.stderr for r in rows],
                            [r.estimate + k * r.stderr for r in rows], alpha=0.2, label=f"±{k:g} stderr")
            if any(r.bound is not None for r in rows):
                ax.plot(ts, [r.bound for r in rows], linestyle="--", label="bound")
            if any(r.lower_bound is not None for r in rows):
                ax.plot(ts, [r.lower_bound for r in rows], linestyle=":", label="lower bound")
            if all(v > 0 for v in est):
                ax.set_yscale("log")
            ax.set_xlabel("t")
            ax.set_title(f"{result.experiment}: {name}")
            ax.legend()
            path = stem.with_name(f"{stem.name}.{name}.svg")
            path.parent.mkdir(parents=True, exist_ok=True)
            fig.savefig(path, format="svg", metadata={"Date": None})
            plt.close(fig)
            written.append(path)
    return written


def write_artifacts(result: ExperimentResult, plot: bool = False) -> List[Path]:
    try:
        fmt = result.config.format
        written: List[Path] = []
        if fmt in (OutputFormat.CSV, OutputFormat.BOTH):
            written.extend(write_csv(result))
        if fmt in (OutputFormat.JSON, OutputFormat.BOTH):
            written.append(write_json(result))
        if plot:
            written.extend(write_plots(result))
    except OSError as e:
        raise LabError(f"could not write artifacts: {e}") from e
    for path in written:
        logger.info(f"Wrote {path}")
    return written
