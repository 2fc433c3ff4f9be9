"""
LiftFunnel

Privacy mechanisms for the privacy funnel and other lift-based leakage
measures: optimal max-lift mechanisms and the candidate-ladder heuristic.
"""

import os

from dotenv import load_dotenv


load_dotenv()


class Settings:
    """Application configuration settings"""

    # Numerical tolerances
    construction_tolerance: float = 1e-9
    input_tolerance: float = 1e-6
    distribution_tolerance: float = 1e-8
    feasibility_slack: float = 1e-9
    vertex_dedup_tolerance: float = 1e-7
    candidate_dedup_tolerance: float = 1e-9
    pivot_threshold: float = 1e-10
    weight_threshold: float = 1e-10

    def __init__(self):
        # Application
        self.app_name: str = "LiftFunnel"
        self.app_version: str = "1.0.0"
        self.debug: bool = os.getenv("LIFTFUNNEL_DEBUG", "false").lower() == "true"

        # Logging
        self.log_level: str = os.getenv("LIFTFUNNEL_LOG_LEVEL", "INFO")
        self.log_format: str = os.getenv("LIFTFUNNEL_LOG_FORMAT", "console")

        # Execution
        self.max_workers: int = int(os.getenv("LIFTFUNNEL_MAX_WORKERS", "1"))
        self.harvest_workers: int = int(os.getenv("LIFTFUNNEL_HARVEST_WORKERS", "1"))
        self.output_dir: str = os.getenv("LIFTFUNNEL_OUTPUT_DIR", "results")

        # Random instance generation
        self.marginal_floor: float = 1e-3
        self.max_redraws: int = 10_000

        # Example 1 validation
        self.example1_tolerance: float = 1e-3
        self.example1_lattice_step: float = 0.0025
        self.example1_epsilon_end: float = 0.5
        self.example1_final_refinement: int = 4000

        # CSV
        self.float_format: str = "%.17g"


# Global settings instance
settings = Settings()


def get_config() -> Settings:
    """Get the global settings instance"""
    return settings
