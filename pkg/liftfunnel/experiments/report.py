"""
Aggregate summaries and the l1-versus-chi-square utility tendency check
"""

from dataclasses import dataclass
from typing import List

import pandas as pd
from rich.table import Table

from liftfunnel.schemas import MeasureKind, MechanismName


@dataclass(frozen=True)
class TendencyCheck:
    """Epsilons where mean l1 utility falls below mean chi-square utility"""
    compared: int
    violations: List[float]

    @property
    def violation_share(self) -> float:
        return len(self.violations) / self.compared if self.compared else 0.0

    @property
    def passed(self) -> bool:
        return self.violation_share <= 0.10


def read_aggregate(path: str) -> pd.DataFrame:
    return pd.read_csv(path)


def ell_one_over_chi_sq(aggregate: pd.DataFrame, mechanism: MechanismName = MechanismName.ALGORITHM1) -> TendencyCheck:
    """Compare mean utility of the l1 and chi-square runs at matched epsilon"""
    subset = aggregate[aggregate["mechanism_name"] == mechanism.value]
    utility = subset.pivot(index="epsilon", columns="measure", values="mean_utility_nats")
    needed = {MeasureKind.ELL_ONE.value, MeasureKind.CHI_SQ.value}
    if not needed <= set(utility.columns):
        return TendencyCheck(compared=0, violations=[])
    utility = utility.dropna(subset=list(needed))
    below = utility[MeasureKind.ELL_ONE.value] < utility[MeasureKind.CHI_SQ.value]
    return TendencyCheck(compared=len(utility), violations=[float(e) for e in utility.index[below]])


def aggregate_table(aggregate: pd.DataFrame) -> Table:
    table = Table(title="Sweep aggregate")
    for column in ("measure", "mechanism", "epsilon", "normalized utility", "I(S;Y) nats", "max-lift", "leakage"):
        table.add_column(column, justify="left" if column in ("measure", "mechanism") else "right")
    for record in aggregate.itertuples(index=False):
        table.add_row(
            record.measure,
            record.mechanism_name,
            f"{record.epsilon:.4f}",
            f"{record.mean_normalized_utility:.4f}",
            f"{record.mean_leakage_mi_nats:.5f}",
            f"{record.mean_max_lift:.4f}",
            f"{record.mean_display_leakage:.5f}",
        )
    return table


def example1_table(report) -> Table:
    table = Table(title=f"Example 1 validation (tolerance {report.tolerance:g} nats)")
    for column in ("epsilon", "utility (alg.)", "utility (closed form)", "|gap|", "max chi2 (alg.)", "max chi2 (closed form)", "status"):
        table.add_column(column, justify="right")
    for row in report.rows:
        table.add_row(
            f"{row.epsilon:.4f}",
            f"{row.utility_algorithm:.6f}",
            f"{row.utility_theoretical:.6f}",
            f"{row.utility_gap:.2e}",
            f"{row.max_chi_sq_algorithm:.3e}",
            f"{row.max_chi_sq_theoretical:.3e}",
            "[red]MISMATCH[/red]" if row.flagged else "[green]ok[/green]",
        )
    return table
