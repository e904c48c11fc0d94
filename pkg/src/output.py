"""
Artifacts produced by the CLI commands and how they are written.
"""
import logging
import math
import os
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import pandas as pd

from src.interval import ExtendedInterval

logger = logging.getLogger(__name__)

FORMATS = ("csv", "json")


def cell(value: Optional[float]) -> str:
    """Six significant digits; "inf" for unbounded, "empty" for missing"""
    if value is None or (isinstance(value, float) and math.isnan(value)):
        return "empty"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = f"{value:.6g}"
    return "0" if text == "-0" else text


def interval_cells(interval: ExtendedInterval) -> List[str]:
    if interval.empty:
        return ["empty", "empty"]
    return [cell(interval.lower), cell(interval.upper)]


def flag(value: bool) -> str:
    return "true" if value else "false"


def json_cell(text: str) -> Any:
    """Numbers back as numbers, literals as strings"""
    if text in ("inf", "-inf", "empty", "true", "false", ""):
        return {"true": True, "false": False}.get(text, text)
    try:
        number = float(text)
    except ValueError:
        return text
    return int(number) if number.is_integer() and 'e' not in text and '.' not in text else number


@dataclass
class OutputBundle:
    tables: Dict[str, pd.DataFrame] = field(default_factory=dict)
    plots: Dict[str, str] = field(default_factory=dict)
    summary: List[str] = field(default_factory=list)

    def add_table(self, name: str, rows: List[Dict[str, str]], columns: List[str]) -> None:
        self.tables[name] = pd.DataFrame(rows, columns=columns, dtype=object)

    def extend(self, other: 'OutputBundle') -> None:
        self.tables.update(other.tables)
        self.plots.update(other.plots)
        self.summary.extend(other.summary)


def write_bundle(bundle: OutputBundle, out_dir: str, fmt: str = "csv") -> List[str]:
    """Write every artifact under out_dir and return the paths written"""
    if fmt not in FORMATS:
        raise ValueError(f"unknown format {fmt!r}, expected one of {FORMATS}")
    os.makedirs(out_dir, exist_ok=True)
    written = []
    for name, frame in bundle.tables.items():
        path = os.path.join(out_dir, f"{name}.{fmt}")
        if fmt == "csv":
            frame.to_csv(path, index=False, lineterminator="\n")
        else:
            records = frame.apply(lambda col: col.map(json_cell)) if len(frame) else frame
            with open(path, 'w', newline="\n") as f:
                f.write(records.to_json(orient="records", indent=2))
                f.write("\n")
        written.append(path)
    for name, svg in bundle.plots.items():
        path = os.path.join(out_dir, f"{name}.svg")
        with open(path, 'w', newline="\n") as f:
            f.write(svg)
        written.append(path)
    path = os.path.join(out_dir, "summary.txt")
    with open(path, 'w', newline="\n") as f:
        f.write("\n".join(bundle.summary) + "\n")
    written.append(path)
    logger.info("wrote %d artifacts to %s", len(written), out_dir)
    return written
