"""Sweep orchestration and CSV output."""
from __future__ import annotations

import csv
import io
import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .config import RunConfig
from .errors import FlatModulator, NumericalError
from .spectrum import TransistorSpec
from .thermo import HeatReport, OperatingConditions, amplification, solve_point

CSV_COLUMNS = (
    "lambda", "T_M", "J_S", "J_M", "J_D", "alpha_S", "alpha_D",
    "p1", "p2", "p3", "p4", "p5", "p6", "residual",
)


@dataclass(frozen=True)
class SweepRow:
    lam: float
    T_M: float
    J_S: float
    J_M: float
    J_D: float
    alpha_S: float
    alpha_D: float
    populations: tuple[float, ...]
    residual: float

    def values(self) -> tuple[float, ...]:
        return (self.lam, self.T_M, self.J_S, self.J_M, self.J_D,
                self.alpha_S, self.alpha_D, *self.populations, self.residual)


@dataclass(frozen=True)
class SweepTable:
    rows: tuple[SweepRow, ...]

    def __len__(self):
        return len(self.rows)

    def lambdas(self) -> list[float]:
        seen = []
        for r in self.rows:
            if r.lam not in seen:
                seen.append(r.lam)
        return seen

    def block(self, lam: float) -> list[SweepRow]:
        return [r for r in self.rows if r.lam == lam]

    def column(self, name: str, lam: float | None = None) -> np.ndarray:
        i = CSV_COLUMNS.index(name)
        rows = self.rows if lam is None else self.block(lam)
        return np.array([r.values()[i] for r in rows])


def _solve(job):
    lam, spec, cond, T_M = job
    try:
        return solve_point(spec, cond, T_M)
    except NumericalError as exc:
        # keep the exception type so callers can still dispatch on it
        raise type(exc)(f"lambda = {lam:g}, T_M = {T_M:g}: {exc}") from exc


def _alphas(reports: list[HeatReport], lam: float):
    n = len(reports)
    try:
        curve = amplification(reports)
    except (ValueError, FlatModulator) as exc:
        if n >= 3:
            warnings.warn(f"lambda = {lam:g}: amplification undefined ({exc}); alpha columns set to NaN")
        return [math.nan] * n, [math.nan] * n
    return list(curve.alpha_S), list(curve.alpha_D)


def run_sweep(cfg: RunConfig, workers: int = 1) -> SweepTable:
    """Run the full pipeline on every (lambda, T_M) grid point.

    Points are independent and may be solved in worker processes; rows are
    always assembled in grid order, so the output does not depend on
    ``workers``. Amplification columns are NaN for a block where the factors
    are undefined (fewer than three points, or J_M not monotone).
    """
    cond: OperatingConditions = cfg.conditions()
    grid = [float(t) for t in cfg.T_M_grid()]
    devices: list[tuple[float, TransistorSpec]] = cfg.devices()
    jobs = [(lam, spec, cond, T) for lam, spec in devices for T in grid]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            reports = list(pool.map(_solve, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        reports = [_solve(job) for job in jobs]

    rows = []
    for b, (lam, _) in enumerate(devices):
        block = reports[b * len(grid):(b + 1) * len(grid)]
        a_S, a_D = _alphas(block, lam)
        for rep, aS, aD in zip(block, a_S, a_D):
            rows.append(
                SweepRow(
                    lam=float(lam), T_M=rep.T_M, J_S=rep.J_S, J_M=rep.J_M, J_D=rep.J_D,
                    alpha_S=float(aS), alpha_D=float(aD),
                    populations=tuple(float(p) for p in rep.populations.populations),
                    residual=float(rep.populations.residual),
                )
            )
    return SweepTable(tuple(rows))


def write_csv(table: SweepTable, fh, precision: int = 12) -> None:
    """UTF-8 comma-separated table with a header row; ``%.{precision}g`` numbers."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in table.rows:
        w.writerow([f"{v:.{precision}g}" for v in row.values()])


def to_csv(table: SweepTable, precision: int = 12) -> str:
    buf = io.StringIO()
    write_csv(table, buf, precision)
    return buf.getvalue()


def read_csv(text: str) -> SweepTable:
    reader = csv.reader(io.StringIO(text))
    header = tuple(next(reader))
    if header != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {header}")
    rows = []
    for rec in reader:
        v = [float(x) for x in rec]
        rows.append(SweepRow(v[0], v[1], v[2], v[3], v[4], v[5], v[6], tuple(v[7:13]), v[13]))
    return SweepTable(tuple(rows))
