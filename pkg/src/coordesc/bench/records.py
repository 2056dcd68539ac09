"""Convergence records, trial aggregation and CSV export."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ..errors import ConfigurationError, FileError

COLUMNS = ("epoch", "objective", "grad_map_norm", "dist_to_ref", "flops", "elapsed_ns")


@dataclass
class ConvergenceRecord:
    """Per-epoch metrics of one run (epoch 0 is the starting point)."""

    rows: list[tuple] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    def append(self, epoch, objective, grad_map_norm, dist_to_ref, flops, elapsed_ns) -> None:
        if self.rows and epoch <= self.rows[-1][0]:
            raise ConfigurationError("epochs must be strictly increasing")
        if not math.isfinite(objective):
            raise ConfigurationError(f"objective is not finite at epoch {epoch}")
        self.rows.append((int(epoch), float(objective), float(grad_map_norm), float(dist_to_ref),
                          int(flops), int(elapsed_ns)))

    def column(self, name: str) -> np.ndarray:
        k = COLUMNS.index(name)
        return np.array([r[k] for r in self.rows])

    @property
    def final(self) -> tuple:
        return self.rows[-1]

    def epochs_to(self, column: str, tol: float) -> float:
        """First epoch at which ``column <= tol``; ``inf`` if never reached."""
        k = COLUMNS.index(column)
        for r in self.rows:
            if r[k] <= tol:
                return float(r[0])
        return math.inf

    def __len__(self) -> int:
        return len(self.rows)


def aggregate(records) -> ConvergenceRecord:
    """Per-epoch arithmetic mean across trials.

    Runs that stopped early are extended with their final row, i.e. a
    converged trial is treated as staying where it stopped.
    """
    records = list(records)
    if not records:
        raise ConfigurationError("nothing to aggregate")
    length = max(len(r) for r in records)
    table = np.empty((len(records), length, len(COLUMNS)))
    for t, rec in enumerate(records):
        arr = np.array(rec.rows, dtype=float)
        table[t, :len(arr)] = arr
        if len(arr) < length:
            pad = np.repeat(arr[-1:], length - len(arr), axis=0)
            pad[:, 0] = arr[-1, 0] + np.arange(1, length - len(arr) + 1)
            table[t, len(arr):] = pad
    mean = table.mean(axis=0)
    out = ConvergenceRecord(metadata=dict(records[0].metadata))
    out.metadata.pop("trial", None)
    out.metadata["trials"] = len(records)
    for row in mean:
        out.rows.append((int(round(row[0])), float(row[1]), float(row[2]), float(row[3]),
                         int(round(row[4])), int(round(row[5]))))
    return out


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def export_records(records, path) -> Path:
    """Write one record (or the mean of a list of records) as CSV with ``#`` metadata lines."""
    rec = aggregate(records) if isinstance(records, (list, tuple)) else records
    path = Path(path)
    lines = [f"# {k}={rec.metadata[k]}" for k in sorted(rec.metadata)]
    lines.append(",".join(COLUMNS))
    lines.extend(",".join(_fmt(v) for v in row) for row in rec.rows)
    try:
        if path.parent and not path.parent.exists():
            path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot write {path}: {exc}") from exc
    return path


def load_records(path) -> ConvergenceRecord:
    """Read a file written by :func:`export_records`."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileError(f"cannot read {path}: {exc}") from exc
    rec = ConvergenceRecord()
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, val = line[1:].strip().partition("=")
            rec.metadata[key] = val
        elif line and not line.startswith("epoch"):
            e, o, g, d, f, t = line.split(",")
            rec.rows.append((int(e), float(o), float(g), float(d), int(f), int(t)))
    return rec
