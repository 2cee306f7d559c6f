import logging
import math
from pathlib import Path
from typing import Dict, List, Optional

import pandas as pd

from domain.errors import OutputError
from domain.models import ResultRow

logger = logging.getLogger(__name__)

COLUMNS = list(ResultRow.model_fields)
METRICS = ("sin_theta_f", "excess_risk")


def _clean(text: str) -> str:
    """Keep CSV fields free of separators and quotes."""
    return " ".join(text.replace(",", ";").replace('"', "'").split())


def aggregate(rows: List[ResultRow]) -> pd.DataFrame:
    """Mean and standard error per (solver, sweep value) for each metric."""
    frame = pd.DataFrame([row.model_dump() for row in rows], columns=COLUMNS)
    grouped = frame.groupby(["solver", "sweep_value"], sort=False)[list(METRICS)]
    means = grouped.mean().add_suffix("_mean")
    stderrs = (grouped.std(ddof=1) / grouped.count().pow(0.5)).fillna(0.0).add_suffix("_se")
    return means.join(stderrs).reset_index()


class ResultRepository:
    """Stores experiment rows and persists them as results.csv and summary.md."""

    def __init__(self, output_dir: str):
        self.output_dir = Path(output_dir)
        self.runs: Dict[str, List[ResultRow]] = {}

    def ensure_writable(self) -> None:
        """Create the output directory and check a file can be written there."""
        marker = self.output_dir / ".write-check"
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            marker.touch()
            marker.unlink()
        except OSError as e:
            raise OutputError(f"cannot write results to {self.output_dir}: {e}") from e

    def save_rows(self, experiment_id: str, rows: List[ResultRow]) -> Path:
        """Write rows to CSV and the markdown summary; returns the CSV path."""
        self.runs[experiment_id] = list(rows)
        try:
            self.output_dir.mkdir(parents=True, exist_ok=True)
            csv_path = self.output_dir / "results.csv"
            frame = pd.DataFrame([row.model_dump() for row in rows], columns=COLUMNS)
            frame["error"] = frame["error"].map(_clean)
            frame.to_csv(csv_path, index=False, float_format="%.17g", na_rep="nan", lineterminator="\n")
            (self.output_dir / "summary.md").write_text(self.render_summary(experiment_id, rows), encoding="utf-8")
        except OSError as e:
            raise OutputError(f"cannot write results to {self.output_dir}: {e}") from e
        logger.info(f"Saved {len(rows)} rows for {experiment_id} to {csv_path}")
        return csv_path

    def get_rows(self, experiment_id: str) -> Optional[List[ResultRow]]:
        return self.runs.get(experiment_id)

    @staticmethod
    def render_summary(experiment_id: str, rows: List[ResultRow]) -> str:
        """Markdown tables, one per metric: solvers as rows, grid values as columns."""
        if not rows:
            return f"# {experiment_id}\n\nNo rows.\n"
        table = aggregate(rows)
        sweep_var = rows[0].sweep_var
        values = list(dict.fromkeys(table["sweep_value"]))
        lines = [f"# {experiment_id}", ""]
        failures = sum(1 for row in rows if row.error)
        if failures:
            lines += [f"{failures} row(s) failed and are excluded from the means.", ""]
        for metric in METRICS:
            lines += [f"## {metric} (mean ± stderr)", ""]
            lines.append("| solver | " + " | ".join(f"{sweep_var}={v:g}" for v in values) + " |")
            lines.append("|---" * (len(values) + 1) + "|")
            for solver, part in table.groupby("solver", sort=False):
                cells = []
                for value in values:
                    match = part[part["sweep_value"] == value]
                    if match.empty or math.isnan(match[f"{metric}_mean"].iloc[0]):
                        cells.append("n/a")
                    else:
                        cells.append(f"{match[f'{metric}_mean'].iloc[0]:.17g} ± {match[f'{metric}_se'].iloc[0]:.3g}")
                lines.append(f"| {solver} | " + " | ".join(cells) + " |")
            lines.append("")
        return "\n".join(lines)
