"""Command-line orchestration: scans, fits, snapshots and oracle checks.

Configuration is a flat key = value file (# comments allowed); every
command also accepts a previously written manifest JSON as --config, which
reruns the scan with the exact resolved settings. CLI flags --seed,
--threads and --out override the config. Data goes to stdout/files only;
progress and summaries go to stderr.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (box_count_state, fit_boxcount_slope, fit_depth_exponent,
                       format_fits_table, largest_cluster_membership)
from .circuit import (CircuitConfig, EnsembleSpec, P_CRITICAL, mix_seed,
                      run_ensemble, run_realization, run_tasks)
from .crosscheck import crosscheck_realization
from .records import (BoxCountRecord, FitRow, RunManifest, read_boxcount_csv,
                      read_depth_csv, write_boxcount_csv, write_depth_csv,
                      write_fits_csv, write_snapshot)

OUT_DIR_ENV = "FRACSTAB_OUT_DIR"


# -- configuration ------------------------------------------------------------


def load_config(path: str | None) -> dict[str, str]:
    """Parse a flat key = value config file, or pull the embedded config out
    of a manifest JSON for byte-identical reruns."""
    if path is None:
        return {}
    text = Path(path).read_text()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        data = json.loads(text)
        config = data.get("config", data)
        return {str(k): str(v) for k, v in config.items()}
    config: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"{path}:{lineno}: expected key = value")
        key, value = line.split("=", 1)
        config[key.strip()] = value.strip()
    return config


def _floats(value: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in value.replace(",", " ").split())


def _ints(value: str) -> tuple[int, ...]:
    if ".." in value:
        lo, hi = value.split("..", 1)
        return tuple(range(int(lo), int(hi) + 1))
    return tuple(int(tok) for tok in value.replace(",", " ").split())


def _bool(value: str) -> bool:
    if value.lower() in ("1", "true", "yes", "on"):
        return True
    if value.lower() in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"expected a boolean, got {value!r}")


def _length_overrides(value: str) -> dict[float, int]:
    pairs = {}
    for tok in value.replace(",", " ").split():
        p, L = tok.split(":", 1)
        pairs[float(p)] = int(L)
    return pairs


def default_depth_p_grid() -> tuple[float, ...]:
    """Scan layout: 0.04 spacing up to the transition, 0.08 beyond it."""
    below = [round(0.04 * k, 2) for k in range(1, 5)]          # 0.04 .. 0.16
    above = [round(P_CRITICAL + 0.08 * k, 2) for k in range(1, 11)]  # 0.24 .. 0.96
    return tuple(below + above)


def default_boxcount_length(p: float) -> int:
    """Paper-scale sizes: smaller systems deep in the volume-law phase."""
    if p < 0.06:
        return 100
    if p < 0.12:
        return 160
    return 240


def _resolve_out_dir(args) -> Path:
    out = args.out or os.environ.get(OUT_DIR_ENV) or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _progress(label: str, total: int):
    every = max(1, total // 20)

    def report(done: int, _total: int):
        if done % every == 0 or done == total:
            print(f"{label}: {done}/{total}", file=sys.stderr, flush=True)

    return report


def _utcnow() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


# -- commands ------------------------------------------------------------------


def cmd_depth_scan(args) -> int:
    config = load_config(args.config)
    spec = EnsembleSpec(
        p_values=_floats(config.get("p_values", "")) or default_depth_p_grid(),
        L_values=_ints(config.get("L_values", "16,24,32,48,64,96,120,160,240")),
        n_realizations=int(config.get("n_realizations", "500")),
        coarse_b=int(config.get("coarse_b", "2")),
        master_seed=args.seed if args.seed is not None
        else int(config.get("master_seed", "0")),
        steps_factor=int(config.get("steps_factor", "4")),
        steps_override=int(config["steps"]) if "steps" in config else None,
        periodic=_bool(config.get("periodic", "false")),
    )
    threads = args.threads or int(config.get("threads", "0")) or None
    out_dir = _resolve_out_dir(args)
    started = _utcnow()

    records = []
    total = len(spec.tasks())
    summary = run_ensemble(spec, records.append, threads=threads,
                           progress=_progress("depth-scan", total))
    csv_path = out_dir / "depth.csv"
    write_depth_csv(csv_path, records)

    resolved = {
        "p_values": ",".join(repr(p) for p in spec.p_values),
        "L_values": ",".join(str(L) for L in spec.L_values),
        "n_realizations": str(spec.n_realizations),
        "coarse_b": str(spec.coarse_b),
        "master_seed": str(spec.master_seed),
        "steps_factor": str(spec.steps_factor),
        "periodic": str(spec.periodic).lower(),
    }
    if spec.steps_override is not None:
        resolved["steps"] = str(spec.steps_override)
    manifest_path = out_dir / "depth_manifest.json"
    RunManifest("depth-scan", resolved, __version__, started, _utcnow(),
                [str(csv_path)]).write(manifest_path)
    print(f"depth-scan: wrote {summary.n_records} records to {csv_path} "
          f"({summary.escalation_events} multi-element escalations)",
          file=sys.stderr)
    return 0


def cmd_boxcount_scan(args) -> int:
    config = load_config(args.config)
    p_values = _floats(config.get("p_values", "")) or default_depth_p_grid()
    b_values = _ints(config.get("b_values", "2..20"))
    n_realizations = int(config.get("n_realizations", "500"))
    master_seed = args.seed if args.seed is not None \
        else int(config.get("master_seed", "0"))
    steps_factor = int(config.get("steps_factor", "4"))
    steps = int(config["steps"]) if "steps" in config else None
    periodic = _bool(config.get("periodic", "false"))
    overrides = _length_overrides(config.get("L_for_p", ""))
    if "L_values" in config:
        fixed = _ints(config["L_values"])
        if len(fixed) != 1:
            raise SystemExit("boxcount-scan wants exactly one L per p; "
                             "use L_for_p for per-p sizes")
        lengths = {p: fixed[0] for p in p_values}
    else:
        lengths = {p: overrides.get(p, default_boxcount_length(p))
                   for p in p_values}
    for p, L in lengths.items():
        if max(b_values) > L:
            raise SystemExit(f"box size {max(b_values)} exceeds L={L} at p={p}")

    threads = args.threads or int(config.get("threads", "0")) or None
    out_dir = _resolve_out_dir(args)
    started = _utcnow()

    tasks = [(pi, r) for pi in range(len(p_values)) for r in range(n_realizations)]

    def worker(task):
        pi, r = task
        p = p_values[pi]
        L = lengths[p]
        seed = mix_seed(master_seed, pi, 0, r)
        cfg = CircuitConfig(n_qubits=L, p=p,
                            steps=steps if steps is not None else steps_factor * L,
                            master_seed=seed, periodic=periodic)
        state = run_realization(cfg)
        return [BoxCountRecord(p=p, L=L, b=b, realization=r, seed=seed,
                               n_boxes=box_count_state(state, b))
                for b in b_values]

    rows = []
    for chunk in run_tasks(tasks, worker, threads,
                           _progress("boxcount-scan", len(tasks))):
        rows.extend(chunk)
    csv_path = out_dir / "boxcount.csv"
    write_boxcount_csv(csv_path, rows)

    resolved = {
        "p_values": ",".join(repr(p) for p in p_values),
        "b_values": ",".join(str(b) for b in b_values),
        "L_for_p": ",".join(f"{p!r}:{L}" for p, L in sorted(lengths.items())),
        "n_realizations": str(n_realizations),
        "master_seed": str(master_seed),
        "steps_factor": str(steps_factor),
        "periodic": str(periodic).lower(),
    }
    if steps is not None:
        resolved["steps"] = str(steps)
    RunManifest("boxcount-scan", resolved, __version__, started, _utcnow(),
                [str(csv_path)]).write(out_dir / "boxcount_manifest.json")
    print(f"boxcount-scan: wrote {len(rows)} records to {csv_path}",
          file=sys.stderr)
    return 0


def cmd_fit(args) -> int:
    if not args.depth and not args.boxcount:
        raise SystemExit("fit needs --depth and/or --boxcount")
    depth_by_p: dict[float, list] = {}
    box_by_p: dict[float, list] = {}
    if args.depth:
        for r in read_depth_csv(args.depth):
            depth_by_p.setdefault(r.p, []).append(r)
    if args.boxcount:
        for r in read_boxcount_csv(args.boxcount):
            box_by_p.setdefault(r.p, []).append(r)
    rows = []
    for p in sorted(set(depth_by_p) | set(box_by_p)):
        gamma = gamma_err = d = d_err = None
        n_L = n_b = 0
        if p in depth_by_p:
            fit = fit_depth_exponent(depth_by_p[p])
            gamma, gamma_err = fit.slope, fit.slope_err
            n_L = len({r.L for r in depth_by_p[p]})
        if p in box_by_p:
            fit = fit_boxcount_slope(box_by_p[p])
            d, d_err = -fit.slope, fit.slope_err
            n_b = len({r.b for r in box_by_p[p]})
        rows.append(FitRow(p=p, gamma=gamma, gamma_err=gamma_err,
                           d=d, d_err=d_err, n_L_points=n_L, n_b_points=n_b))
    out_dir = _resolve_out_dir(args)
    csv_path = out_dir / "fits.csv"
    write_fits_csv(csv_path, rows)
    print(format_fits_table(rows))
    print(f"fit: wrote {len(rows)} rows to {csv_path}", file=sys.stderr)
    return 0


def cmd_snapshot(args) -> int:
    b_values = _ints(args.b)
    cfg = CircuitConfig(n_qubits=args.L, p=args.p,
                        steps=args.steps, master_seed=args.seed)
    state = run_realization(cfg)
    memberships = []
    for b in b_values:
        bits = largest_cluster_membership(state, b)
        memberships.append((b, bits))
    out_dir = _resolve_out_dir(args)
    path = out_dir / "snapshot.txt"
    write_snapshot(path, args.p, args.L, args.seed, memberships)
    if args.structure_out:
        from .structure import build_structure, coarse_grain, dump_text
        blocks = []
        for b in b_values:
            st = build_structure(state, coarse_grain(args.L, b))
            blocks.append(f"# b={b}\n" + dump_text(st))
        Path(args.structure_out).write_text("".join(blocks))
    print(f"snapshot: wrote {path}", file=sys.stderr)
    return 0


def cmd_oracle_check(args) -> int:
    if args.L > 10:
        raise SystemExit("oracle-check is capped at L = 10")
    p_values = _floats(args.p_values)
    failures = 0
    for trial in range(args.trials):
        p = p_values[trial % len(p_values)]
        seed = mix_seed(args.seed, trial)
        cfg = CircuitConfig(n_qubits=args.L, p=p, master_seed=seed)
        report = crosscheck_realization(cfg)
        if not report.ok:
            failures += 1
            print(f"MISMATCH p={p} L={args.L} seed={seed}: {report.describe()}")
    status = "pass" if failures == 0 else "FAIL"
    print(f"oracle-check: {args.trials} trials at L={args.L}, "
          f"{failures} failures -> {status}")
    return 0 if failures == 0 else 1


# -- entry point ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fracstab",
        description="Monitored Clifford circuit ensembles: entanglement "
                    "depth scans, box-counting fractal dimensions, robust fits.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", help="flat key=value config or manifest JSON")
        p.add_argument("--seed", type=lambda s: int(s, 0), default=None,
                       help="master seed (overrides config)")
        p.add_argument("--threads", type=int, default=None,
                       help="worker threads (default: all cores)")
        p.add_argument("--out", default=None,
                       help=f"output directory (default ${OUT_DIR_ENV} or .)")

    p = sub.add_parser("depth-scan", help="ensemble depth records over a (p, L) grid")
    common(p)
    p.set_defaults(func=cmd_depth_scan)

    p = sub.add_parser("boxcount-scan", help="largest-cluster box counts per box size")
    common(p)
    p.set_defaults(func=cmd_boxcount_scan)

    p = sub.add_parser("fit", help="exponent fits from scan CSVs")
    common(p)
    p.add_argument("--depth", help="depth.csv path")
    p.add_argument("--boxcount", help="boxcount.csv path")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("snapshot", help="largest-cluster bitmaps for one realization")
    common(p)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--L", type=int, required=True)
    p.add_argument("--b", default="1,2,4,8", help="box sizes, e.g. 1,2,4 or 2..8")
    p.add_argument("--steps", type=int, default=None)
    p.add_argument("--structure-out", default=None,
                   help="also dump cluster listings to this path")
    p.set_defaults(func=cmd_snapshot)

    p = sub.add_parser("oracle-check", help="coupled tableau/statevector comparison")
    common(p)
    p.add_argument("--L", type=int, default=6)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--p-values", default="0,0.2,0.5,1.0")
    p.set_defaults(func=cmd_oracle_check)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command in ("snapshot", "oracle-check") and args.seed is None:
        args.seed = 0
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
