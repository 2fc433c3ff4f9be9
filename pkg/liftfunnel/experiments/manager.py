"""
Sweep manager: runs instances, writes per-row and aggregate CSV files
"""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import partial
from pathlib import Path
from typing import List, Optional

import pandas as pd
import structlog

from liftfunnel.config import settings
from liftfunnel.experiments.worker import run_instance
from liftfunnel.schemas import CSV_COLUMNS, NUMERIC_COLUMNS, CsvRow, ExperimentConfig

logger = structlog.get_logger()

GROUP_COLUMNS = ["measure", "mechanism_name", "epsilon"]


@dataclass
class SweepResult:
    rows: pd.DataFrame
    aggregate: pd.DataFrame
    rows_path: Optional[str] = None
    aggregate_path: Optional[str] = None


def rows_frame(rows: List[CsvRow]) -> pd.DataFrame:
    return pd.DataFrame([row.to_record() for row in rows], columns=CSV_COLUMNS)


def aggregate_frame(rows: pd.DataFrame) -> pd.DataFrame:
    """Per (measure, mechanism, epsilon) means across instances, columns prefixed mean_"""
    grouped = rows.groupby(GROUP_COLUMNS, sort=True)
    means = grouped[NUMERIC_COLUMNS].mean().add_prefix("mean_")
    means.insert(0, "instances", grouped["instance_id"].nunique())
    return means.reset_index()


def write_csv(frame: pd.DataFrame, path: str):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(
        path,
        index=False,
        float_format=settings.float_format,
        encoding="utf-8",
        lineterminator="\n",
    )
    logger.info("CSV written", path=path, rows=len(frame))


class SweepManager:
    """Coordinates instance workers and CSV emission"""

    def __init__(self, max_workers: Optional[int] = None):
        self.max_workers = max_workers
        self.logger = structlog.get_logger()

    def collect(self, cfg: ExperimentConfig) -> List[CsvRow]:
        """Rows of all instances, in instance-id order"""
        workers = self.max_workers if self.max_workers is not None else settings.max_workers
        instance_ids = range(cfg.num_instances)
        self.logger.info(
            "Sweep started",
            instances=cfg.num_instances,
            kinds=[k.value for k in cfg.kinds],
            epsilons=len(cfg.sweep.epsilons),
            workers=workers,
        )
        if workers > 1:
            with ProcessPoolExecutor(max_workers=workers) as executor:
                per_instance = list(executor.map(partial(run_instance, cfg), instance_ids))
        else:
            per_instance = [run_instance(cfg, i) for i in instance_ids]
        return [row for rows in per_instance for row in rows]

    def run_sweep(self, cfg: ExperimentConfig, write: bool = True) -> SweepResult:
        rows = rows_frame(self.collect(cfg))
        aggregate = aggregate_frame(rows)
        result = SweepResult(rows=rows, aggregate=aggregate)
        if write:
            write_csv(rows, cfg.output_path)
            write_csv(aggregate, cfg.aggregate_path)
            result.rows_path = cfg.output_path
            result.aggregate_path = cfg.aggregate_path
        self.logger.info("Sweep finished", rows=len(rows))
        return result


# Global sweep manager instance
sweep_manager = SweepManager()


def run_sweep(cfg: ExperimentConfig, write: bool = True) -> SweepResult:
    return sweep_manager.run_sweep(cfg, write)
