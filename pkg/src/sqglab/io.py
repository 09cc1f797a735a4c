"""
On-disk formats: snapshot fields, diagnostics CSV, and verdict reports.

Snapshot file layout (little-endian):
    bytes 0-3   magic "SQGF"
    uint32      format version (1)
    uint32      n (points per axis)
    float64     box side length L
    float64     snapshot time t
    float64     alpha
    n*n float64 field samples, row-major
"""

from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .grid import GridSpec, RealField
from .solver import DiagnosticRecord, SimulationResult
from .verify import VerdictRow

__all__ = [
    "SNAPSHOT_MAGIC",
    "write_snapshot",
    "read_snapshot",
    "write_diagnostics",
    "read_diagnostics",
    "write_run",
    "read_run_snapshots",
    "write_verdicts",
    "format_verdict_table",
]

SNAPSHOT_MAGIC = b"SQGF"
SNAPSHOT_VERSION = 1
DIAG_COLUMNS = ("time", "l2", "lcrit", "linf", "riesz_linf", "mean")


def write_snapshot(path, field: RealField, t: float, alpha: float) -> None:
    g = field.grid
    with open(path, "wb") as fh:
        fh.write(SNAPSHOT_MAGIC)
        fh.write(struct.pack("<I", SNAPSHOT_VERSION))
        fh.write(struct.pack("<I", g.n))
        fh.write(struct.pack("<d", g.box_length))
        fh.write(struct.pack("<d", t))
        fh.write(struct.pack("<d", alpha))
        fh.write(np.asarray(field.values, "<f8").tobytes())


def read_snapshot(path) -> tuple[RealField, float, float]:
    """Returns (field, t, alpha)."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != SNAPSHOT_MAGIC:
            raise ValueError(f"{path}: not a snapshot file (magic {magic!r})")
        (version,) = struct.unpack("<I", fh.read(4))
        if version != SNAPSHOT_VERSION:
            raise ValueError(f"{path}: unsupported snapshot version {version}")
        (n,) = struct.unpack("<I", fh.read(4))
        (L,) = struct.unpack("<d", fh.read(8))
        (t,) = struct.unpack("<d", fh.read(8))
        (alpha,) = struct.unpack("<d", fh.read(8))
        data = np.frombuffer(fh.read(8 * n * n), "<f8").reshape(n, n).copy()
    return RealField(GridSpec(n, L), data), t, alpha


def write_diagnostics(path, records) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(DIAG_COLUMNS)
        for r in records:
            w.writerow([repr(getattr(r, c)) for c in DIAG_COLUMNS])


def read_diagnostics(path) -> list[DiagnosticRecord]:
    out = []
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        if tuple(header) != DIAG_COLUMNS:
            raise ValueError(f"{path}: unexpected diagnostics columns {header}")
        for row in rd:
            out.append(DiagnosticRecord(*[float(x) for x in row]))
    return out


def snapshot_filename(index: int, t: float) -> str:
    return f"snapshot_{index:04d}_t{t:.6e}.sqgf"


def write_run(run_dir, result: SimulationResult) -> None:
    """Persist snapshots and the diagnostics series of one simulation."""
    d = Path(run_dir)
    d.mkdir(parents=True, exist_ok=True)
    write_diagnostics(d / "diagnostics.csv", result.diagnostics)
    for i, (t, field) in enumerate(result.snapshots):
        write_snapshot(d / snapshot_filename(i, t), field, t, result.config.alpha)


def read_run_snapshots(run_dir) -> list[tuple[float, RealField, float]]:
    """All snapshots in a run directory as (t, field, alpha), sorted by time."""
    d = Path(run_dir)
    files = sorted(d.glob("snapshot_*.sqgf"))
    if not files:
        raise FileNotFoundError(f"no snapshot files found in {d}")
    out = []
    for f in files:
        field, t, alpha = read_snapshot(f)
        out.append((t, field, alpha))
    out.sort(key=lambda x: x[0])
    return out


def write_verdicts(path, rows: list[VerdictRow]) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["check", "measured", "requirement", "passed"])
        for r in rows:
            w.writerow([r.name, repr(r.measured), r.requirement, int(r.passed)])


def format_verdict_table(rows: list[VerdictRow]) -> str:
    name_w = max([len(r.name) for r in rows] + [5])
    req_w = max([len(r.requirement) for r in rows] + [11])
    lines = [f"{'check':<{name_w}}  {'measured':>12}  {'requirement':<{req_w}}  verdict"]
    lines.append("-" * (name_w + req_w + 32))
    for r in rows:
        lines.append(
            f"{r.name:<{name_w}}  {r.measured:>12.5g}  {r.requirement:<{req_w}}  "
            + ("pass" if r.passed else "FAIL")
        )
    return "\n".join(lines)
