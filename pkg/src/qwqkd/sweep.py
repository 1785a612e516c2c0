"""Grid search over walk parameters minimizing c / maximizing noise tolerance.

A sweep evaluates :func:`qwqkd.security.compute_c` for every cell
``(P, F, theta, phi)`` of a :class:`SweepGrid` and keeps, per ``(P, F)``,
the cell with the smallest c (ties: smallest t, then theta, then phi in
grid order).  Cells are independent and heavy (``t_max`` step evolutions
each), so they are mapped over a process pool; the reduction is keyed on
grid order and therefore deterministic regardless of scheduling.  Completed
cells can be checkpointed to disk and a restarted sweep skips them.
"""

from __future__ import annotations

import csv
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from . import __version__
from .security import compute_c, max_tolerated_qber
from .walk import Flip, StepOrder

__all__ = [
    "SweepGrid",
    "SweepRow",
    "run_sweep",
    "fixed_walk_series",
    "rows_to_csv",
    "write_csv",
    "rows_to_json",
    "write_json",
]

CSV_HEADER = "P,F,theta,phi,t,c,Q_max"


@dataclass(frozen=True)
class SweepGrid:
    """Search grid; angles in radians, P values odd."""

    p_values: tuple[int, ...]
    theta_values: tuple[float, ...]
    phi_values: tuple[float, ...]
    flips: tuple[Flip, ...] = (Flip.I,)
    t_max: int = 5000

    def __post_init__(self) -> None:
        object.__setattr__(self, "p_values", tuple(int(p) for p in self.p_values))
        object.__setattr__(self, "theta_values", tuple(float(v) for v in self.theta_values))
        object.__setattr__(self, "phi_values", tuple(float(v) for v in self.phi_values))
        object.__setattr__(self, "flips", tuple(Flip(f) for f in self.flips))
        if not (self.p_values and self.theta_values and self.phi_values and self.flips):
            raise ValueError("grid axes must be non-empty")
        if any(p < 1 or p % 2 == 0 for p in self.p_values):
            raise ValueError(f"P values must be odd and positive, got {self.p_values}")
        if self.t_max < 1:
            raise ValueError(f"t_max must be >= 1, got {self.t_max}")

    @classmethod
    def pi_fractions(cls, p_values, denominator: int = 10,
                     flips=(Flip.I, Flip.X, Flip.Y), t_max: int = 5000) -> "SweepGrid":
        """Grid with theta, phi in {k pi / denominator | k = 0..denominator}."""
        angles = tuple(k * math.pi / denominator for k in range(denominator + 1))
        return cls(p_values=tuple(p_values), theta_values=angles,
                   phi_values=angles, flips=tuple(flips), t_max=t_max)

    def cells(self):
        """All cell index tuples (ip, if, it, ij) in grid order."""
        for ip in range(len(self.p_values)):
            for fi in range(len(self.flips)):
                for it in range(len(self.theta_values)):
                    for ij in range(len(self.phi_values)):
                        yield (ip, fi, it, ij)

    def describe(self) -> dict:
        d = asdict(self)
        d["flips"] = [f.value for f in self.flips]
        return d


@dataclass(frozen=True)
class SweepRow:
    """Best cell for one (P, F): the minimizing (theta, phi, t) and scores."""

    P: int
    flip: Flip
    theta: float
    phi: float
    t: int
    c: float
    q_max: float


def _evaluate_cell(work: tuple) -> tuple:
    cell, P, theta, phi, flip_value, t_max = work
    report = compute_c(P, theta, phi, Flip(flip_value), t_max)
    return cell, report.c, report.t_star


def _load_checkpoint(path: str, grid: SweepGrid) -> dict:
    done: dict = {}
    if not os.path.exists(path):
        return done
    with open(path) as fh:
        header = json.loads(fh.readline())
        if header.get("grid") != grid.describe():
            raise ValueError(f"checkpoint {path} was written for a different grid")
        for line in fh:
            line = line.strip()
            if not line:
                continue
            entry = json.loads(line)
            done[tuple(entry["cell"])] = (entry["c"], entry["t"])
    return done


def run_sweep(grid: SweepGrid, jobs: int | None = None,
              checkpoint_path: str | None = None, progress=None) -> list[SweepRow]:
    """Evaluate the grid and return the best row per (P, F) in grid order.

    ``jobs`` defaults to the available CPU count; ``progress`` may be a
    callable taking (done, total).  With ``checkpoint_path`` set, every
    completed cell is appended to a JSONL file and already-completed cells
    of an interrupted sweep are not recomputed.
    """
    cells = list(grid.cells())
    results: dict = {}
    ckpt_fh = None
    if checkpoint_path is not None:
        results.update(_load_checkpoint(checkpoint_path, grid))
        new_file = not os.path.exists(checkpoint_path)
        ckpt_fh = open(checkpoint_path, "a")
        if new_file:
            ckpt_fh.write(json.dumps({"grid": grid.describe()}) + "\n")
            ckpt_fh.flush()

    pending = [
        (cell,
         grid.p_values[cell[0]],
         grid.theta_values[cell[2]],
         grid.phi_values[cell[3]],
         grid.flips[cell[1]].value,
         grid.t_max)
        for cell in cells if cell not in results
    ]
    try:
        done_count = len(results)
        total = len(cells)
        if jobs is None:
            jobs = os.cpu_count() or 1
        if jobs <= 1 or len(pending) <= 1:
            iterator = map(_evaluate_cell, pending)
            _consume(iterator, results, ckpt_fh, progress, done_count, total)
        else:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                iterator = pool.map(_evaluate_cell, pending, chunksize=8)
                _consume(iterator, results, ckpt_fh, progress, done_count, total)
    finally:
        if ckpt_fh is not None:
            ckpt_fh.close()

    rows = []
    for ip, p in enumerate(grid.p_values):
        for fi, flip in enumerate(grid.flips):
            best_key = None
            best_cell = None
            for it in range(len(grid.theta_values)):
                for ij in range(len(grid.phi_values)):
                    c, t = results[(ip, fi, it, ij)]
                    key = (c, t, it, ij)
                    if best_key is None or key < best_key:
                        best_key = key
                        best_cell = (it, ij)
            c, t = results[(ip, fi) + best_cell]
            rows.append(SweepRow(
                P=p, flip=flip,
                theta=grid.theta_values[best_cell[0]],
                phi=grid.phi_values[best_cell[1]],
                t=t, c=c, q_max=max_tolerated_qber(c, p),
            ))
    return rows


def _consume(iterator, results, ckpt_fh, progress, done_count, total) -> None:
    for cell, c, t in iterator:
        results[cell] = (c, t)
        done_count += 1
        if ckpt_fh is not None:
            ckpt_fh.write(json.dumps({"cell": list(cell), "c": c, "t": t}) + "\n")
            ckpt_fh.flush()
        if progress is not None:
            progress(done_count, total)


def fixed_walk_series(theta: float, phi: float, flip: Flip,
                      p_values, t_max: int, jobs: int | None = None) -> list[SweepRow]:
    """One row per P for a fixed (theta, phi, F); only t is optimized."""
    grid = SweepGrid(p_values=tuple(p_values), theta_values=(theta,),
                     phi_values=(phi,), flips=(Flip(flip),), t_max=t_max)
    return run_sweep(grid, jobs=jobs)


def _format_row(row: SweepRow) -> list[str]:
    return [
        str(row.P),
        row.flip.value,
        f"{row.theta / math.pi:.6f}",
        f"{row.phi / math.pi:.6f}",
        str(row.t),
        f"{row.c:.6f}",
        f"{row.q_max:.6f}",
    ]


def rows_to_csv(rows: list[SweepRow]) -> str:
    """CSV text; theta and phi are serialized as multiples of pi."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER.split(","))
    for row in rows:
        writer.writerow(_format_row(row))
    return buf.getvalue()


def write_csv(rows: list[SweepRow], path: str) -> None:
    with open(path, "w") as fh:
        fh.write(rows_to_csv(rows))


def rows_to_json(rows: list[SweepRow], grid: SweepGrid | None = None) -> str:
    doc = {
        "tool": "qwqkd",
        "version": __version__,
        "grid": grid.describe() if grid is not None else None,
        "rows": [
            {
                "P": row.P,
                "F": row.flip.value,
                "theta": round(row.theta / math.pi, 6),
                "phi": round(row.phi / math.pi, 6),
                "t": row.t,
                "c": round(row.c, 6),
                "Q_max": round(row.q_max, 6),
            }
            for row in rows
        ],
    }
    return json.dumps(doc, indent=2)


def write_json(rows: list[SweepRow], path: str, grid: SweepGrid | None = None) -> None:
    with open(path, "w") as fh:
        fh.write(rows_to_json(rows, grid))
