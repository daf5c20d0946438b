"""Plain-text outputs: CSV tables and the run manifest."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .config import format_config

FLOAT_FORMAT = "%.17g"


@dataclass
class Table:
    """Rows sharing a column list; ``units`` run parallel to ``columns``."""

    columns: list
    units: list
    rows: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.columns) != len(self.units):
            raise ValueError("each column needs a unit")

    def extend(self, other: "Table") -> None:
        if other.columns != self.columns:
            raise ValueError("cannot join tables with different columns")
        self.rows.extend(other.rows)


def _cell(v) -> str:
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, int):
        return str(v)
    if isinstance(v, float):
        return FLOAT_FORMAT % v
    if hasattr(v, "dtype"):
        return _cell(v.item())
    return str(v)


def format_csv(table: Table) -> str:
    header = "# " + ",".join(f"{c} [{u}]" for c, u in zip(table.columns, table.units))
    body = [",".join(_cell(v) for v in row) for row in table.rows]
    return "\n".join([header, *body]) + "\n"


def read_csv(path) -> tuple[list, list]:
    """Column names and raw string rows of a file written by :func:`write_csv`."""
    with open(path, encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or not lines[0].startswith("# "):
        raise ValueError(f"{path}: missing header line")
    cols = [c.split(" [")[0] for c in lines[0][2:].split(",")]
    return cols, [ln.split(",") for ln in lines[1:]]


def write_text(path, text: str) -> None:
    # newline="\n" keeps the bytes identical across platforms
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def write_outputs(out_dir, tables: dict, cfg: dict, version: str, command: str) -> list:
    """Write every table as ``<name>.csv`` plus ``manifest.cfg``; returns the paths."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for name, table in tables.items():
        path = os.path.join(out_dir, f"{name}.csv")
        write_text(path, format_csv(table))
        paths.append(path)
    manifest = dict(cfg)
    manifest["manifest.version"] = version
    header = (
        f"felix {version} manifest for '{command}'\n"
        f"rerun with: felix {command} --config <this file> --out <dir>"
    )
    path = os.path.join(out_dir, "manifest.cfg")
    write_text(path, format_config(manifest, header))
    paths.append(path)
    return paths
