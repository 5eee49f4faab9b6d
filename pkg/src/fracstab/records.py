"""Observable records and their on-disk formats.

CSV schemas are fixed (exact headers, deterministic row order, repr-level
float formatting) so that reruns of the same manifest are byte-identical
and every row round-trips through parse/serialize without loss.
"""

from __future__ import annotations

import csv
import json
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

DEPTH_HEADER = ["p", "L", "realization", "seed", "depth_qubits", "n_clusters"]
BOXCOUNT_HEADER = ["p", "L", "b", "realization", "seed", "n_boxes"]
FITS_HEADER = ["p", "gamma", "gamma_err", "d", "d_err", "n_L_points", "n_b_points"]


@dataclass(frozen=True)
class DepthRecord:
    """Per-realization entanglement depth of the steady state."""
    p: float
    L: int
    realization: int
    seed: int
    depth_qubits: int
    n_clusters: int


@dataclass(frozen=True)
class BoxCountRecord:
    """Boxes occupied by the largest cluster at one coarse-graining scale."""
    p: float
    L: int
    b: int
    realization: int
    seed: int
    n_boxes: int


@dataclass(frozen=True)
class FitRow:
    """Fitted exponents for one measurement probability."""
    p: float
    gamma: float | None
    gamma_err: float | None
    d: float | None
    d_err: float | None
    n_L_points: int
    n_b_points: int


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def _write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def _read_csv(path, header: Sequence[str]) -> list[dict[str, str]]:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != list(header):
            raise ValueError(f"{path}: expected columns {','.join(header)}")
        return list(reader)


def write_depth_csv(path, records: Iterable[DepthRecord]) -> None:
    rows = sorted(records, key=lambda r: (r.p, r.L, r.realization))
    _write_csv(path, DEPTH_HEADER,
               [(r.p, r.L, r.realization, r.seed, r.depth_qubits, r.n_clusters)
                for r in rows])


def read_depth_csv(path) -> list[DepthRecord]:
    return [DepthRecord(p=float(row["p"]), L=int(row["L"]),
                        realization=int(row["realization"]),
                        seed=int(row["seed"]),
                        depth_qubits=int(row["depth_qubits"]),
                        n_clusters=int(row["n_clusters"]))
            for row in _read_csv(path, DEPTH_HEADER)]


def write_boxcount_csv(path, records: Iterable[BoxCountRecord]) -> None:
    rows = sorted(records, key=lambda r: (r.p, r.L, r.b, r.realization))
    _write_csv(path, BOXCOUNT_HEADER,
               [(r.p, r.L, r.b, r.realization, r.seed, r.n_boxes)
                for r in rows])


def read_boxcount_csv(path) -> list[BoxCountRecord]:
    return [BoxCountRecord(p=float(row["p"]), L=int(row["L"]), b=int(row["b"]),
                           realization=int(row["realization"]),
                           seed=int(row["seed"]), n_boxes=int(row["n_boxes"]))
            for row in _read_csv(path, BOXCOUNT_HEADER)]


def write_fits_csv(path, rows: Iterable[FitRow]) -> None:
    ordered = sorted(rows, key=lambda r: r.p)
    _write_csv(path, FITS_HEADER,
               [(r.p, r.gamma, r.gamma_err, r.d, r.d_err,
                 r.n_L_points, r.n_b_points) for r in ordered])


def read_fits_csv(path) -> list[FitRow]:
    def opt(s: str) -> float | None:
        return float(s) if s else None
    return [FitRow(p=float(row["p"]), gamma=opt(row["gamma"]),
                   gamma_err=opt(row["gamma_err"]), d=opt(row["d"]),
                   d_err=opt(row["d_err"]), n_L_points=int(row["n_L_points"]),
                   n_b_points=int(row["n_b_points"]))
            for row in _read_csv(path, FITS_HEADER)]


def write_snapshot(path, p: float, L: int, seed: int,
                   memberships: Sequence[tuple[int, np.ndarray]]) -> None:
    """Snapshot file: header "p=<p> L=<L> seed=<seed>", then one line per
    coarse-graining scale: "b=<k> <L membership chars>" (1 = qubit belongs
    to the largest entangled cluster)."""
    lines = [f"p={_fmt(p)} L={L} seed={seed}"]
    for b, bits in memberships:
        bits = np.asarray(bits).astype(int)
        if bits.size != L:
            raise ValueError("membership length must equal L")
        lines.append(f"b={b} " + "".join(map(str, bits)))
    Path(path).write_text("\n".join(lines) + "\n")


def read_snapshot(path):
    text = Path(path).read_text().splitlines()
    head = dict(item.split("=", 1) for item in text[0].split())
    memberships = []
    for line in text[1:]:
        if not line.strip():
            continue
        tag, bits = line.split(" ", 1)
        memberships.append((int(tag.split("=", 1)[1]),
                            np.array([int(c) for c in bits], dtype=np.uint8)))
    return float(head["p"]), int(head["L"]), int(head["seed"]), memberships


@dataclass
class RunManifest:
    """Everything needed to reproduce a scan's CSV bytes."""
    command: str
    config: dict
    tool_version: str
    started: str
    finished: str
    outputs: list[str]

    def write(self, path) -> None:
        Path(path).write_text(json.dumps(asdict(self), indent=2, sort_keys=True) + "\n")

    @classmethod
    def read(cls, path) -> "RunManifest":
        data = json.loads(Path(path).read_text())
        return cls(**data)
