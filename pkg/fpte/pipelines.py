import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from fpte import __version__
from fpte.config import ScenarioConfig
from fpte.errors import NumericalFailure
from fpte.utils.normalizer import format_cell

logger = logging.getLogger(__name__)


@dataclass
class Table:
    """Rows yielded by a scenario; ``suffix`` distinguishes several tables of one run."""

    columns: list[str]
    rows: list[list] = field(default_factory=list)
    suffix: str = ""

    def add(self, *values):
        if len(values) != len(self.columns):
            raise ValueError(f"row has {len(values)} values for {len(self.columns)} columns")
        self.rows.append(list(values))


class TablePipeline:
    """Pipeline writing scenario tables as CSV with a JSON metadata sidecar."""

    def __init__(self, output_dir: str | Path, config: ScenarioConfig):
        self.output_dir = Path(output_dir)
        self.config = config
        self.written: list[Path] = []

    def _check_finite(self, table: Table):
        for row in table.rows:
            for column, value in zip(table.columns, row):
                if isinstance(value, (float, np.floating)) and not np.isfinite(value):
                    raise NumericalFailure(f"non-finite value in column {column!r}: {value!r}")

    def header_lines(self) -> list[str]:
        lines = [f"fpte {__version__}", f"seed = {self.config.seed}"]
        lines.extend(self.config.lines())
        return [f"# {line}" for line in lines]

    def process_table(self, table: Table) -> Path:
        """Write one table; returns the CSV path."""
        self._check_finite(table)
        stem = self.config.name + (f".{table.suffix}" if table.suffix else "")
        self.output_dir.mkdir(parents=True, exist_ok=True)
        csv_path = self.output_dir / f"{stem}.csv"

        with open(csv_path, "w", encoding="utf-8", newline="") as f:
            for line in self.header_lines():
                f.write(line + "\n")
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(table.columns)
            writer.writerows([format_cell(v) for v in row] for row in table.rows)

        # Save only essential metadata
        simple_meta = {
            "scenario": self.config.name,
            "kind": self.config.kind,
            "columns": table.columns,
            "rows": len(table.rows),
            "seed": self.config.seed,
            "file_name": csv_path.name,
        }
        metadata_path = csv_path.with_suffix(".json")
        with open(metadata_path, "w", encoding="utf-8") as f:
            json.dump(simple_meta, f, ensure_ascii=False, indent=2)

        self.written.extend([csv_path, metadata_path])
        logger.info(f"Wrote {len(table.rows)} rows to {csv_path}")
        return csv_path
