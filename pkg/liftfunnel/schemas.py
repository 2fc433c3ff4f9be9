"""
Common schemas and enumerations
"""

from enum import Enum
from pathlib import Path
from typing import List, Optional
import math

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from liftfunnel.config import settings
from liftfunnel.core.errors import ConfigError
from liftfunnel.utils.validation import (
    arithmetic_grid,
    parse_float_list,
    parse_kv_text,
    validate_epsilon_grid,
    validate_refinements,
)


class MeasureKind(str, Enum):
    """Semi-pointwise privacy measures"""
    SEMI_MI = "semi_mi"
    ELL_ONE = "ell_one"
    CHI_SQ = "chi_sq"

    def lift_bound(self, epsilon: float) -> float:
        """
        Max-lift bound that keeps every column within budget(epsilon).
        It is also the smallest max-lift a column can have when its measure
        equals the budget, which is what the candidate ladder relies on.
        """
        if self is MeasureKind.SEMI_MI:
            return math.exp(epsilon)
        if self is MeasureKind.ELL_ONE:
            return 1.0 + epsilon / 2.0
        return 1.0 + epsilon ** 2

    def budget(self, epsilon: float) -> float:
        """Threshold on the per-output measure"""
        if self is MeasureKind.CHI_SQ:
            return epsilon ** 2
        return epsilon

    def display(self, max_measure: float) -> float:
        """Leakage on the epsilon scale (square root for chi-square)"""
        if self is MeasureKind.CHI_SQ:
            return math.sqrt(max(max_measure, 0.0))
        return max_measure


class MechanismName(str, Enum):
    """Mechanism families emitted by sweeps"""
    MAX_LIFT = "max_lift"
    ALGORITHM1 = "algorithm1"


class SweepConfig(BaseModel):
    """Budget grid and candidate-ladder parameters"""
    model_config = ConfigDict(frozen=True)

    epsilons: List[float]
    refinement_counts: List[int]
    delta: float = Field(0.05, gt=0.0, lt=1.0)
    epsilon_end: float

    @model_validator(mode="after")
    def validate_grid(self):
        ok, errors = validate_epsilon_grid(self.epsilons)
        if not ok:
            raise ValueError("; ".join(errors))
        ok, errors = validate_refinements(self.refinement_counts, len(self.epsilons))
        if not ok:
            raise ValueError("; ".join(errors))
        if not self.epsilon_end > self.epsilons[-1]:
            raise ValueError(f"epsilon_end {self.epsilon_end!r} must exceed the last epsilon {self.epsilons[-1]!r}")
        return self

    @classmethod
    def from_grid(
        cls,
        epsilons: List[float],
        refinement: int = 5,
        final_refinement: int = 100,
        delta: float = 0.05,
        epsilon_end: float = 1.0,
    ) -> "SweepConfig":
        counts = [refinement] * (len(epsilons) - 1) + [final_refinement]
        return cls(epsilons=epsilons, refinement_counts=counts, delta=delta, epsilon_end=epsilon_end)

    def ladder(self) -> List[List[float]]:
        """eps_i + k (eps_{i+1} - eps_i) / n_i for 0 <= k < n_i, one list per budget"""
        bounds = list(self.epsilons) + [self.epsilon_end]
        return [
            [bounds[i] + k * (bounds[i + 1] - bounds[i]) / n for k in range(n)]
            for i, n in enumerate(self.refinement_counts)
        ]


class ExperimentConfig(BaseModel):
    """Random-instance sweep configuration"""
    model_config = ConfigDict(frozen=True)

    s_size: int = Field(4, ge=2)
    x_size: int = Field(7, ge=2)
    num_instances: int = Field(10, ge=1)
    seed: int = Field(0, ge=0, lt=2 ** 64)
    sweep: SweepConfig = Field(
        default_factory=lambda: SweepConfig.from_grid(arithmetic_grid(0.005, 0.17, 0.015))
    )
    kinds: List[MeasureKind] = Field(default_factory=lambda: [MeasureKind.SEMI_MI], min_length=1)
    output_path: str = Field(default_factory=lambda: str(Path(settings.output_dir) / "sweep.csv"))
    record_timing: bool = False

    @field_validator("kinds")
    @classmethod
    def unique_kinds(cls, v):
        if len(set(v)) != len(v):
            raise ValueError("Measure kinds must not repeat")
        return v

    @property
    def aggregate_path(self) -> str:
        path = Path(self.output_path)
        return str(path.with_name(f"{path.stem}_aggregate{path.suffix or '.csv'}"))

    @classmethod
    def from_mapping(cls, entries: dict) -> "ExperimentConfig":
        """Build from the flat key=value mapping of a config file"""
        known = {
            "s_size", "x_size", "num_instances", "seed", "epsilons", "eps_start", "eps_stop",
            "eps_step", "refinement", "final_refinement", "delta", "epsilon_end", "kinds",
            "output_path", "record_timing",
        }
        unknown = sorted(set(entries) - known)
        if unknown:
            raise ConfigError(f"Unknown config keys: {', '.join(unknown)}")

        try:
            if "epsilons" in entries:
                epsilons = parse_float_list(entries["epsilons"])
            else:
                epsilons = arithmetic_grid(
                    float(entries.get("eps_start", 0.005)),
                    float(entries.get("eps_stop", 0.17)),
                    float(entries.get("eps_step", 0.015)),
                )
            sweep = SweepConfig.from_grid(
                epsilons,
                refinement=int(entries.get("refinement", 5)),
                final_refinement=int(entries.get("final_refinement", 100)),
                delta=float(entries.get("delta", 0.05)),
                epsilon_end=float(entries.get("epsilon_end", 1.0)),
            )
            values = {"sweep": sweep}
            for key in ("s_size", "x_size", "num_instances", "seed"):
                if key in entries:
                    values[key] = int(entries[key])
            if "kinds" in entries:
                values["kinds"] = [k.strip() for k in entries["kinds"].split(",") if k.strip()]
            if "output_path" in entries:
                values["output_path"] = entries["output_path"]
            if "record_timing" in entries:
                flag = entries["record_timing"].lower()
                if flag not in ("true", "false"):
                    raise ValueError(f"record_timing must be true or false, got {flag!r}")
                values["record_timing"] = flag == "true"
            return cls(**values)
        except (ValueError, ValidationError) as e:
            raise ConfigError(f"Invalid experiment config: {e}") from e

    @classmethod
    def from_file(cls, path: str) -> "ExperimentConfig":
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as e:
            raise ConfigError(f"Cannot read config {path}: {e}") from e
        try:
            entries = parse_kv_text(text)
        except ValueError as e:
            raise ConfigError(str(e)) from e
        return cls.from_mapping(entries)


class CsvRow(BaseModel):
    """One (instance, measure, mechanism, epsilon) result"""
    instance_id: int
    measure: MeasureKind
    mechanism_name: MechanismName
    epsilon: float
    utility_nats: float
    normalized_utility: float
    leakage_mi_nats: float
    max_lift: float
    log_max_lift: float
    max_measure: float
    candidate_count: int
    wall_time_ms: float
    display_leakage: float

    @model_validator(mode="after")
    def finite_fields(self):
        for name, value in self.__dict__.items():
            if isinstance(value, float) and not math.isfinite(value):
                raise ValueError(f"Field {name} is not finite: {value!r}")
        return self

    def to_record(self) -> dict:
        record = self.model_dump()
        record["measure"] = self.measure.value
        record["mechanism_name"] = self.mechanism_name.value
        return record


CSV_COLUMNS: List[str] = list(CsvRow.model_fields.keys())
NUMERIC_COLUMNS: List[str] = [c for c in CSV_COLUMNS if c not in ("instance_id", "measure", "mechanism_name", "epsilon")]


class Example1Row(BaseModel):
    """Comparison of the heuristic with the closed-form Example 1 mechanism at one epsilon"""
    epsilon: float
    utility_algorithm: float
    utility_theoretical: float
    utility_gap: float
    max_chi_sq_algorithm: float
    max_chi_sq_theoretical: float
    chi_sq_gap: float
    max_lift_algorithm: float
    max_lift_theoretical: float
    max_lift_gap: float
    flagged: bool


class Example1Report(BaseModel):
    rows: List[Example1Row]
    tolerance: float

    @property
    def passed(self) -> bool:
        return not any(row.flagged for row in self.rows)

    @property
    def worst_gap(self) -> Optional[float]:
        return max((row.utility_gap for row in self.rows), default=None)
