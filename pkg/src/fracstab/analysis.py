"""Robust slope fits and box-counting fractal dimension estimation.

The slope estimator is the median of all pairwise slopes (pairs with equal
x are skipped); its error bar is the median absolute deviation of the
pairwise slopes from that median, and the intercept is the median residual.
Even-length medians are the mean of the two middle values throughout.

Exponent extraction follows the ensemble-mean-first convention: observables
are averaged over the ensemble per grid point, then the fit runs on the
log-log points. Box counting re-extracts the cluster structure at every box
size rather than re-tiling the finest-scale cluster.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .records import BoxCountRecord, DepthRecord, FitRow
from .structure import build_structure, coarse_grain, largest_cluster


@dataclass(frozen=True)
class FitResult:
    """A robust straight-line fit y = slope * x + intercept."""
    slope: float
    slope_err: float
    intercept: float
    n_points: int


def theil_sen(points: Iterable[tuple[float, float]]) -> FitResult:
    """Median-of-pairwise-slopes line fit with MAD error."""
    pts = np.asarray(list(points), dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
        raise ValueError("need at least two (x, y) points")
    xs, ys = pts[:, 0], pts[:, 1]
    ii, jj = np.triu_indices(len(xs), k=1)
    dx = xs[jj] - xs[ii]
    dy = ys[jj] - ys[ii]
    keep = dx != 0
    if not keep.any():
        raise ValueError("all x values coincide; no slope is defined")
    slopes = dy[keep] / dx[keep]
    slope = float(np.median(slopes))
    slope_err = float(np.median(np.abs(slope - slopes)))
    intercept = float(np.median(ys - slope * xs))
    return FitResult(slope, slope_err, intercept, len(xs))


def _single_p(records, kind: str) -> float:
    ps = {r.p for r in records}
    if len(ps) != 1:
        raise ValueError(f"{kind} records must belong to a single p, got {sorted(ps)}")
    return ps.pop()


def fit_depth_exponent(records: Sequence[DepthRecord]) -> FitResult:
    """Power-law exponent of ensemble-mean depth versus system size: slope
    of ln(mean depth) against ln(L) for one measurement probability."""
    records = list(records)
    if not records:
        raise ValueError("no depth records")
    _single_p(records, "depth")
    by_size: dict[int, list[int]] = {}
    for r in records:
        by_size.setdefault(r.L, []).append(r.depth_qubits)
    if len(by_size) < 2:
        raise ValueError("need at least two distinct system sizes")
    points = [(np.log(L), np.log(np.mean(depths)))
              for L, depths in sorted(by_size.items())]
    return theil_sen(points)


def fit_boxcount_slope(records: Sequence[BoxCountRecord],
                       b_values: Iterable[int] | None = None) -> FitResult:
    """Slope of ln(mean occupied boxes) against ln(box size) for one p.
    The fractal dimension is the magnitude of this (negative) slope."""
    records = list(records)
    if not records:
        raise ValueError("no box-count records")
    _single_p(records, "box-count")
    allowed = set(b_values) if b_values is not None else set(range(2, 21))
    by_b: dict[int, list[int]] = {}
    for r in records:
        if r.b in allowed:
            by_b.setdefault(r.b, []).append(r.n_boxes)
    if len(by_b) < 2:
        raise ValueError("need at least two distinct box sizes")
    points = [(np.log(b), np.log(np.mean(counts)))
              for b, counts in sorted(by_b.items())]
    return theil_sen(points)


def fractal_dimension(records: Sequence[BoxCountRecord],
                      b_values: Iterable[int] | None = None) -> tuple[float, float]:
    """(dimension, error) from the box-counting fit."""
    fit = fit_boxcount_slope(records, b_values)
    return -fit.slope, fit.slope_err


def box_count_state(state, box_size: int) -> int:
    """Boxes of the given size occupied by the largest entangled cluster.

    Coarse-grains first, extracts the structure of the boxed state, then
    counts the boxes inside the largest cluster (largest by qubit count,
    ties to the smallest starting index)."""
    elements = coarse_grain(state.n_qubits, box_size)
    structure = build_structure(state, elements)
    cluster = largest_cluster(structure)
    return len({q // box_size for q in cluster.qubits})


def box_count_membership(membership, box_size: int) -> int:
    """Boxes of the given size containing at least one marked cell; the
    classical analog of box_count_state for plain membership sets."""
    cells = np.asarray(membership).astype(bool)
    if not 1 <= box_size <= cells.size:
        raise ValueError("box size must be in [1, number of cells]")
    marked = np.nonzero(cells)[0]
    return int(np.unique(marked // box_size).size)


def largest_cluster_membership(state, box_size: int) -> np.ndarray:
    """Boolean qubit mask of the largest cluster at one box size."""
    elements = coarse_grain(state.n_qubits, box_size)
    structure = build_structure(state, elements)
    cluster = largest_cluster(structure)
    bits = np.zeros(state.n_qubits, dtype=bool)
    bits[list(cluster.qubits)] = True
    return bits


def format_fits_table(rows: Sequence[FitRow]) -> str:
    """Plain-text exponent table, one line per measurement probability."""
    def cell(v):
        return f"{v:.4f}" if v is not None else "-"
    lines = [f"{'p':>8} {'gamma':>10} {'gamma_err':>10} {'d':>10} {'d_err':>10}"]
    for r in sorted(rows, key=lambda r: r.p):
        lines.append(f"{r.p:>8.4g} {cell(r.gamma):>10} {cell(r.gamma_err):>10} "
                     f"{cell(r.d):>10} {cell(r.d_err):>10}")
    return "\n".join(lines)
