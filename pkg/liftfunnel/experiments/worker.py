"""
Per-instance sweep pipeline
"""

from typing import List
import math

import structlog

from liftfunnel.core.errors import InstanceFailed, LiftFunnelError
from liftfunnel.core.mechanisms import SweepPoint, algorithm1, optimal_maxlift_mechanism
from liftfunnel.experiments.generator import generate_joint, instance_rng
from liftfunnel.schemas import CsvRow, ExperimentConfig, MeasureKind, MechanismName


class InstanceWorker:
    """Runs every mechanism and measure of a config on one random instance"""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.logger = structlog.get_logger().bind(seed=cfg.seed)

    def _row(self, instance_id: int, mechanism: MechanismName, point: SweepPoint) -> CsvRow:
        return CsvRow(
            instance_id=instance_id,
            measure=point.kind,
            mechanism_name=mechanism,
            epsilon=point.epsilon,
            utility_nats=point.utility,
            normalized_utility=point.normalized_utility,
            leakage_mi_nats=point.leakage_mi,
            max_lift=point.max_lift,
            log_max_lift=math.log(point.max_lift),
            max_measure=point.max_measure,
            display_leakage=point.display_leakage,
            candidate_count=point.candidate_count,
            wall_time_ms=point.wall_time_ms if self.cfg.record_timing else 0.0,
        )

    def run_kind(self, instance_id: int, joint, kind: MeasureKind) -> List[CsvRow]:
        rows = []
        for eps in self.cfg.sweep.epsilons:
            point = optimal_maxlift_mechanism(joint, eps, kind)
            rows.append(self._row(instance_id, MechanismName.MAX_LIFT, point))
        for point in algorithm1(joint, kind, self.cfg.sweep):
            rows.append(self._row(instance_id, MechanismName.ALGORITHM1, point))
        return rows

    def run(self, instance_id: int) -> List[CsvRow]:
        log = self.logger.bind(instance_id=instance_id)
        log.info("Instance started")
        try:
            joint = generate_joint(self.cfg.s_size, self.cfg.x_size, instance_rng(self.cfg.seed, instance_id))
            rows = []
            for kind in self.cfg.kinds:
                rows.extend(self.run_kind(instance_id, joint, kind))
        except (LiftFunnelError, ValueError, ArithmeticError) as e:
            log.error("Instance failed", error=str(e))
            raise InstanceFailed(instance_id, self.cfg.seed, e) from e
        log.info("Instance finished", rows=len(rows))
        return rows


def run_instance(cfg: ExperimentConfig, instance_id: int) -> List[CsvRow]:
    """Module-level entry point so process pools can pickle it"""
    return InstanceWorker(cfg).run(instance_id)
