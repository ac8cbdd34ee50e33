# infrastructure/report_writer.py

import csv
import logging
from pathlib import Path
from typing import List, Sequence

from domain.contracts.i_raster_store import PathLike
from domain.entities.metric_report import MetricReport

logger = logging.getLogger(__name__)

LOSS_HEADER = ("epoch", "loss")


def write_loss_history(path: PathLike, history: Sequence[float]) -> None:
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(LOSS_HEADER)
        for epoch, loss in enumerate(history, start=1):
            writer.writerow([epoch, repr(float(loss))])
    logger.debug("wrote loss history %s (%d epochs)", target, len(history))


def write_metric_report(path: PathLike, reports: Sequence[MetricReport]) -> None:
    """Rows in the given order; evaluation puts the per-image rows first and the mean last."""
    target = Path(path)
    target.parent.mkdir(parents=True, exist_ok=True)
    with target.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(MetricReport.CSV_HEADER)
        for report in reports:
            writer.writerow([repr(float(v)) for v in report.as_row()])
    logger.debug("wrote metric report %s (%d rows)", target, len(reports))


def read_loss_history(path: PathLike) -> List[float]:
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        return [float(row["loss"]) for row in reader]
