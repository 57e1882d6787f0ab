"""Deterministic CSV and JSON serialization for engine results.

Every number is written with 17 significant digits so repeated runs of the
same configuration produce byte-identical artifacts suitable for golden-file
regression.
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Sequence

from .engine import CycleRecord

TRACE_COLUMNS = (
    "cycle_work",
    "cumulative_work",
    "p_bx",
    "p_by",
    "p_bz",
    "ergotropy_total",
    "ergotropy_incoherent",
    "ergotropy_coherent",
    "rel_entropy_coherence",
    "concurrence",
    "corr_mx",
    "corr_my",
    "corr_mz",
    "corr_bx",
    "corr_by",
    "corr_bz",
    "corr_xx",
    "corr_yy",
    "corr_zz",
)

ADVANTAGE_COLUMNS = (
    "cycle_index",
    "work_coherent",
    "work_incoherent",
    "advantage_ratio",
    "advantage_defined",
)


def fmt_float(x: float) -> str:
    """Render a float with 17 significant digits (exact round trip)."""
    return format(float(x), ".17g")


def record_row(record: CycleRecord) -> list[float]:
    """Flatten one cycle record into the TRACE_COLUMNS order."""
    pol = record.battery_polarization
    ergo = record.ergotropy
    corr = record.correlators
    return [
        record.cycle_work,
        record.cumulative_work,
        pol.px,
        pol.py,
        pol.pz,
        ergo.total,
        ergo.incoherent,
        ergo.coherent,
        record.coherence_rel_entropy,
        record.concurrence_post_stroke,
        *corr.medium,
        *corr.battery,
        *corr.joint,
    ]


def write_trace_csv(
    path,
    axis_name: str,
    axis_values: Sequence,
    records: Sequence[CycleRecord],
) -> None:
    """One CSV row per record, keyed by the given axis column."""
    if len(axis_values) != len(records):
        raise ValueError("axis values and records must have equal length")
    lines = [",".join((axis_name,) + TRACE_COLUMNS)]
    for axis, record in zip(axis_values, records):
        axis_text = str(axis) if isinstance(axis, int) else fmt_float(axis)
        lines.append(",".join([axis_text] + [fmt_float(v) for v in record_row(record)]))
    _write_text(path, "\n".join(lines) + "\n")


def write_advantage_csv(path, rows: Iterable[tuple[int, float, float, float | None]]) -> None:
    """Rows of (cycle_index, coherent work, incoherent work, ratio or None)."""
    lines = [",".join(ADVANTAGE_COLUMNS)]
    for index, w_coh, w_inc, ratio in rows:
        defined = ratio is not None
        lines.append(
            ",".join(
                [
                    str(index),
                    fmt_float(w_coh),
                    fmt_float(w_inc),
                    fmt_float(ratio) if defined else "nan",
                    "1" if defined else "0",
                ]
            )
        )
    _write_text(path, "\n".join(lines) + "\n")


def write_grid_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """Generic numeric grid CSV with the package float format."""
    lines = [",".join(header)]
    for row in rows:
        rendered = []
        for cell in row:
            if cell is None:
                rendered.append("nan")
            elif isinstance(cell, bool):
                rendered.append("1" if cell else "0")
            elif isinstance(cell, int):
                rendered.append(str(cell))
            else:
                rendered.append(fmt_float(cell))
        lines.append(",".join(rendered))
    _write_text(path, "\n".join(lines) + "\n")


def dumps_stable(obj, indent: int = 0) -> str:
    """JSON text with 17-significant-digit floats and stable layout."""
    pad = "  " * indent
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"non-finite float {obj} cannot be serialized to JSON")
        return fmt_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        inner = ",\n".join("  " * (indent + 1) + dumps_stable(v, indent + 1) for v in obj)
        return "[\n" + inner + "\n" + pad + "]"
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        inner = ",\n".join(
            "  " * (indent + 1) + json.dumps(str(k)) + ": " + dumps_stable(v, indent + 1)
            for k, v in obj.items()
        )
        return "{\n" + inner + "\n" + pad + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__} to JSON")


def write_json(path, obj) -> None:
    _write_text(path, dumps_stable(obj) + "\n")


def _write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
