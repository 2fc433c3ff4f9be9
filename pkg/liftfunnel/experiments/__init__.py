"""
Experiments package initialization
"""

from liftfunnel.experiments.generator import generate_joint, instance_rng, read_joint, write_joint
from liftfunnel.experiments.worker import InstanceWorker, run_instance
from liftfunnel.experiments.manager import SweepManager, SweepResult, run_sweep, sweep_manager
from liftfunnel.experiments.example1 import validate_example1

__all__ = [
    "generate_joint",
    "instance_rng",
    "read_joint",
    "write_joint",
    "InstanceWorker",
    "run_instance",
    "SweepManager",
    "SweepResult",
    "run_sweep",
    "sweep_manager",
    "validate_example1",
]
