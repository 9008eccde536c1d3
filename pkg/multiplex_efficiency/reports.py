"""
Report records and their JSON / CSV / text renderings.

Every record carries the same top-level keys; values that do not apply are None.
Infinity is written as null in JSON and as "inf" in text and CSV.
"""

import json
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

REPORT_KEYS = ("n", "l", "gamma", "k", "efficiency", "h_in", "h_out", "diameter",
               "fixed_point_k", "redundant", "recommendation")

SIGNIFICANT_DIGITS = 6
BANNER_WIDTH = 70


def base_record(n: int, n_layers: int, gamma: Optional[float] = None,
                k: Optional[int] = None) -> Dict[str, Any]:
    record = {key: None for key in REPORT_KEYS}
    record.update(n=n, l=n_layers, gamma=gamma, k=k)
    return record


def to_jsonable(value: Any) -> Any:
    """numpy and non-finite values made JSON-safe (inf and nan become None)"""
    if isinstance(value, dict):
        return {str(key): to_jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(item) for item in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def format_number(value: Any) -> str:
    if value is None:
        return "-"
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return f"{value:.{SIGNIFICANT_DIGITS}g}"
    return str(value)


def format_vector(values) -> str:
    return "[" + ", ".join(format_number(v) for v in values) + "]"


@dataclass
class Report:
    """
    Output of one subcommand: structured records, an optional table and the
    human-readable text lines.
    """

    subcommand: str
    records: List[Dict[str, Any]] = field(default_factory=list)
    table: Optional[pd.DataFrame] = None
    lines: List[str] = field(default_factory=list)
    failure: Optional[Exception] = None

    def banner(self, title: str):
        self.lines.append("=" * BANNER_WIDTH)
        self.lines.append(title)
        self.lines.append("=" * BANNER_WIDTH)

    def to_json(self) -> str:
        records = []
        for record in self.records:
            ordered = {key: record.get(key) for key in REPORT_KEYS}
            ordered.update({key: value for key, value in record.items() if key not in ordered})
            records.append(to_jsonable(ordered))
        return json.dumps(records, indent=2)

    def to_csv(self) -> str:
        table = self.table
        if table is None:
            scalar_keys = [key for key in REPORT_KEYS
                           if not any(isinstance(r.get(key), (list, dict, np.ndarray))
                                      for r in self.records)]
            table = pd.DataFrame([{key: r.get(key) for key in scalar_keys} for r in self.records])
        table = table.copy()
        for column in table.columns:
            if pd.api.types.is_float_dtype(table[column]):
                table[column] = table[column].map(
                    lambda v: "inf" if np.isposinf(v) else ("-inf" if np.isneginf(v) else v))
        return table.to_csv(index=False, na_rep="")

    def to_text(self) -> str:
        return "\n".join(self.lines) + "\n"

    def render(self, output_format: str) -> str:
        if output_format == "json":
            return self.to_json() + "\n"
        if output_format == "csv":
            return self.to_csv()
        return self.to_text()


def matrix_lines(matrix: np.ndarray, labels) -> List[str]:
    """Square matrix as aligned text rows with vertex labels"""
    cells = [[format_number(float(v)) for v in row] for row in matrix]
    width = max([len(str(label)) for label in labels] + [len(c) for row in cells for c in row])
    lines = [" " * (width + 1) + " ".join(str(label).rjust(width) for label in labels)]
    for label, row in zip(labels, cells):
        lines.append(str(label).rjust(width) + " " + " ".join(c.rjust(width) for c in row))
    return lines
