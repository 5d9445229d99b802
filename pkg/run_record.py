#!/usr/bin/env python3
"""Benchmark records and their CSV / JSON encodings.

A `RunRecord` summarizes one (solver, instance, eps) cell; its `EpochRow`s
carry the per-epoch trace. CSV files hold one ``run`` row per record followed
by its ``epoch`` rows in the fixed column order `CSV_COLUMNS`. JSON files hold
the nested records under a versioned envelope. Floats are written with
``repr`` so both formats parse back to identical values.
"""

import csv
import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Optional, Union

RECORD_SCHEMA_VERSION = 1

STATUS_SUCCESS = "success"
STATUS_FAILED = "failed"

ROW_RUN = "run"
ROW_EPOCH = "epoch"

CSV_COLUMNS = (
    "row_type",
    "solver",
    "instance",
    "eps",
    "status",
    "error",
    "epochs",
    "f_calls",
    "grad_x_calls",
    "grad_y_calls",
    "grad_norm",
    "wall_time",
    "epoch",
    "t_k",
    "flag",
    "branch",
    "descent",
)

# Columns excluded when comparing runs for reproducibility.
NONDETERMINISTIC_COLUMNS = ("wall_time",)

FORMATS = ("csv", "json")


@dataclass
class EpochRow:
    """One epoch of a run, with cumulative oracle counts at its end."""

    epoch: int
    t_k: int
    flag: str
    branch: str
    descent: float
    f_calls: int
    grad_x_calls: int
    grad_y_calls: int

    @property
    def gradient_calls(self) -> int:
        return self.grad_x_calls + self.grad_y_calls


@dataclass
class RunRecord:
    """Outcome of one benchmark cell.

    ``grad_norm`` is the independently verified ||grad Phi(p)|| (None when the
    cell failed before producing a point).
    """

    solver: str
    instance: str
    eps: float
    status: str
    epochs: int
    f_calls: int
    grad_x_calls: int
    grad_y_calls: int
    grad_norm: Optional[float]
    wall_time: float
    error: str = ""
    rows: List[EpochRow] = field(default_factory=list)

    @property
    def succeeded(self) -> bool:
        return self.status == STATUS_SUCCESS

    @property
    def gradient_calls(self) -> int:
        return self.grad_x_calls + self.grad_y_calls

    @property
    def total_calls(self) -> int:
        return self.f_calls + self.gradient_calls

    def validate(self) -> None:
        """Check the record invariants: monotone cumulative calls, verified success."""
        if self.status not in (STATUS_SUCCESS, STATUS_FAILED):
            raise ValueError(f"status must be success or failed, got: {self.status}")
        previous = (0, 0, 0)
        for row in self.rows:
            current = (row.f_calls, row.grad_x_calls, row.grad_y_calls)
            if any(c < p for c, p in zip(current, previous)):
                raise ValueError(f"cumulative calls decrease at epoch {row.epoch}")
            previous = current
        if self.succeeded and (self.grad_norm is None or not self.grad_norm <= self.eps):
            raise ValueError(
                f"success record must have grad_norm <= eps={self.eps}, got: {self.grad_norm}"
            )

    def to_dict(self) -> Dict[str, object]:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: Dict[str, object]) -> "RunRecord":
        try:
            rows = [EpochRow(**row) for row in data.get("rows", [])]
            values = {k: v for k, v in data.items() if k != "rows"}
            return cls(rows=rows, **values)
        except TypeError as e:
            raise ValueError(f"Invalid run record: {e}") from e


def rows_from_traces(traces: Iterable) -> List[EpochRow]:
    """Flatten solver traces (anything with k, t_k, flag, branch, descent_est,
    oracle_calls) into epoch rows."""
    rows = []
    for trace in traces:
        calls = trace.oracle_calls
        rows.append(
            EpochRow(
                epoch=trace.k,
                t_k=trace.t_k,
                flag=trace.flag,
                branch=trace.branch,
                descent=float(trace.descent_est),
                f_calls=calls["f_calls"],
                grad_x_calls=calls["grad_x_calls"],
                grad_y_calls=calls["grad_y_calls"],
            )
        )
    return rows


def _fmt_float(value: Optional[float]) -> str:
    return "" if value is None else repr(float(value))


def _parse_float(text: str) -> Optional[float]:
    return None if text == "" else float(text)


def _csv_rows(record: RunRecord) -> List[Dict[str, str]]:
    base = {"solver": record.solver, "instance": record.instance, "eps": _fmt_float(record.eps)}
    lines = [
        dict(
            base,
            row_type=ROW_RUN,
            status=record.status,
            error=record.error,
            epochs=str(record.epochs),
            f_calls=str(record.f_calls),
            grad_x_calls=str(record.grad_x_calls),
            grad_y_calls=str(record.grad_y_calls),
            grad_norm=_fmt_float(record.grad_norm),
            wall_time=_fmt_float(record.wall_time),
        )
    ]
    for row in record.rows:
        lines.append(
            dict(
                base,
                row_type=ROW_EPOCH,
                epoch=str(row.epoch),
                t_k=str(row.t_k),
                flag=row.flag,
                branch=row.branch,
                descent=_fmt_float(row.descent),
                f_calls=str(row.f_calls),
                grad_x_calls=str(row.grad_x_calls),
                grad_y_calls=str(row.grad_y_calls),
            )
        )
    return lines


def write_csv(records: Iterable[RunRecord], path: Union[str, Path]) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS, restval="", lineterminator="\n")
        writer.writeheader()
        for record in records:
            writer.writerows(_csv_rows(record))


def read_csv(path: Union[str, Path]) -> List[RunRecord]:
    try:
        with open(path, newline="") as f:
            reader = csv.DictReader(f)
            if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
                raise ValueError(f"Unexpected CSV header in {path}: {reader.fieldnames}")
            lines = list(reader)
    except FileNotFoundError as e:
        raise FileNotFoundError(f"Records file not found: {path}") from e

    records: List[RunRecord] = []
    for number, line in enumerate(lines, start=2):
        try:
            if line["row_type"] == ROW_RUN:
                records.append(
                    RunRecord(
                        solver=line["solver"],
                        instance=line["instance"],
                        eps=float(line["eps"]),
                        status=line["status"],
                        error=line["error"],
                        epochs=int(line["epochs"]),
                        f_calls=int(line["f_calls"]),
                        grad_x_calls=int(line["grad_x_calls"]),
                        grad_y_calls=int(line["grad_y_calls"]),
                        grad_norm=_parse_float(line["grad_norm"]),
                        wall_time=float(line["wall_time"]),
                    )
                )
            elif line["row_type"] == ROW_EPOCH:
                if not records:
                    raise ValueError("epoch row before any run row")
                records[-1].rows.append(
                    EpochRow(
                        epoch=int(line["epoch"]),
                        t_k=int(line["t_k"]),
                        flag=line["flag"],
                        branch=line["branch"],
                        descent=float(line["descent"]),
                        f_calls=int(line["f_calls"]),
                        grad_x_calls=int(line["grad_x_calls"]),
                        grad_y_calls=int(line["grad_y_calls"]),
                    )
                )
            else:
                raise ValueError(f"unknown row_type {line['row_type']!r}")
        except (KeyError, TypeError, ValueError) as e:
            raise ValueError(f"Invalid CSV line {number} in {path}: {e}") from e
    return records


def _json_safe(value):
    if isinstance(value, float) and not math.isfinite(value):
        return repr(value)
    return value


def write_json(records: Iterable[RunRecord], path: Union[str, Path]) -> None:
    payload = []
    for record in records:
        data = record.to_dict()
        for row in data["rows"]:
            row["descent"] = _json_safe(row["descent"])
        payload.append(data)
    with open(path, "w") as f:
        json.dump({"schema_version": RECORD_SCHEMA_VERSION, "records": payload}, f, indent=2)
        f.write("\n")


def read_json(path: Union[str, Path]) -> List[RunRecord]:
    try:
        with open(path) as f:
            data = json.load(f)
    except FileNotFoundError as e:
        raise FileNotFoundError(f"Records file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ValueError(f"Invalid JSON in records file: {e}") from e
    if not isinstance(data, dict) or data.get("schema_version") != RECORD_SCHEMA_VERSION:
        raise ValueError(f"schema_version must be {RECORD_SCHEMA_VERSION} in {path}")
    records = []
    for item in data.get("records", []):
        for row in item.get("rows", []):
            if isinstance(row.get("descent"), str):
                row["descent"] = float(row["descent"])
        records.append(RunRecord.from_dict(item))
    return records


def write_records(records: List[RunRecord], path: Union[str, Path], fmt: str) -> None:
    if fmt == "csv":
        write_csv(records, path)
    elif fmt == "json":
        write_json(records, path)
    else:
        raise ValueError(f"format must be one of {list(FORMATS)}, got: {fmt}")


def read_records(path: Union[str, Path]) -> List[RunRecord]:
    """Read records, picking the parser from the file suffix (default CSV)."""
    if str(path).endswith(".json"):
        return read_json(path)
    return read_csv(path)


def deterministic_view(path: Union[str, Path]) -> List[List[str]]:
    """CSV content with the wall-time column blanked, for reproducibility checks."""
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    if not rows:
        return rows
    drop = [rows[0].index(name) for name in NONDETERMINISTIC_COLUMNS if name in rows[0]]
    for row in rows[1:]:
        for index in drop:
            if index < len(row):
                row[index] = ""
    return rows
