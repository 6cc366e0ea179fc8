"""On-disk formats for runs, aggregates and report tables.

A run directory holds ``manifest.json``, a copy of the pool under ``pool/``
and one CSV per (strategy, run) under ``trajectories/``. Floats are written
with ``repr`` so every file parses back to the identical values, and missing
metric values are empty cells.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from .datasets import LabeledPool, load_pool, save_pool
from .errors import InvalidArgumentError, SchemaError
from .simulate import COMPARED_METRICS, EnsembleResult, RunTrajectory, compare_strategies, metric_names

RUN_FORMAT = "pareto-al-run/1"
MANIFEST_FILE = "manifest.json"
POOL_DIR = "pool"
TRAJECTORY_DIR = "trajectories"

SUMMARY_FILE = "summary.csv"
DENSITY_FILE = "density.csv"
COMPARISON_FILE = "comparison.csv"
AGGREGATE_META_FILE = "aggregate.json"

ERROR_CURVES_FILE = "error_curves.csv"
NDE_CURVES_FILE = "nde_curves.csv"
DISCOVERY_CURVES_FILE = "discovery_curves.csv"
SELECTIONS_FILE = "selection_density.csv"

CURVE_COLUMNS = ["case", "strategy", "scope", "metric", "iteration", "mean", "stderr"]


def fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    return "" if math.isnan(v) else repr(v)


def parse_float(text: str) -> float:
    return math.nan if text == "" else float(text)


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([c if isinstance(c, str) else fmt(c) for c in row])


def read_csv(path: Path, required: Sequence[str] = ()) -> tuple[list[str], list[dict[str, str]]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: empty file")
        missing = [c for c in required if c not in reader.fieldnames]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {missing}")
        return list(reader.fieldnames), list(reader)


def write_json(path: Path, obj):
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n", encoding="utf-8")


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# -- trajectories ---------------------------------------------------------------------------

def trajectory_filename(strategy: str, run: int) -> str:
    return f"{strategy}_run{run:03d}.csv"


def write_trajectory(path: Path, traj: RunTrajectory):
    names = metric_names(traj.D)
    rows = []
    for k in range(traj.K + 1):
        acquired = "" if k == 0 else int(traj.acquired[k - 1])
        vals = [traj.metrics[m][k] for m in names]
        vals[0] = int(vals[0])  # nndp
        rows.append([k, acquired, *vals])
    write_csv(path, ["iteration", "acquired_index", *names], rows)


def read_trajectory(path: Path, strategy: str, run: int, run_seed: int,
                    initial: Sequence[int]) -> RunTrajectory:
    header, rows = read_csv(path, ["iteration", "acquired_index", "nndp", "mean_stratum",
                                   "mnde_global", "mnde_shell"])
    names = header[2:]
    table = {m: np.array([parse_float(r[m]) for r in rows]) for m in names}
    acquired = np.array([int(r["acquired_index"]) for r in rows[1:]], dtype=np.int64)
    return RunTrajectory(strategy=strategy, run=run, run_seed=run_seed,
                         initial=np.asarray(initial, dtype=np.int64), acquired=acquired,
                         metrics=table)


def write_run_dir(out_dir: Path, pool: LabeledPool, results: Mapping[str, EnsembleResult],
                  config: dict) -> dict:
    """Write trajectories, the pool copy and the manifest; returns the manifest."""
    out_dir.mkdir(parents=True, exist_ok=True)
    save_pool(pool, out_dir / POOL_DIR)
    traj_dir = out_dir / TRAJECTORY_DIR
    traj_dir.mkdir(exist_ok=True)
    files = []
    runs = []
    first = next(iter(results.values()))
    for name, res in results.items():
        for t in res.trajectories:
            rel = f"{TRAJECTORY_DIR}/{trajectory_filename(name, t.run)}"
            write_trajectory(out_dir / rel, t)
            files.append({"strategy": name, "run": t.run, "path": rel,
                          "sha256": sha256(out_dir / rel)})
    for t in first.trajectories:
        runs.append({"run": t.run, "run_seed": t.run_seed, "initial": t.initial.tolist()})
    manifest = {
        "format": RUN_FORMAT,
        "config": config,
        "pool": pool.summary(),
        "strategies": list(results),
        "C": first.C, "K": first.K, "R": first.R, "master_seed": first.master_seed,
        "runs": runs,
        "files": files,
    }
    write_json(out_dir / MANIFEST_FILE, manifest)
    return manifest


def read_manifest(run_dir: Path) -> dict:
    path = run_dir / MANIFEST_FILE
    if not path.is_file():
        raise SchemaError(f"{run_dir}: no {MANIFEST_FILE}")
    manifest = json.loads(path.read_text(encoding="utf-8"))
    if manifest.get("format") != RUN_FORMAT:
        raise SchemaError(f"{path}: unsupported format {manifest.get('format')!r}")
    return manifest


def load_run_dir(run_dir) -> tuple[dict, LabeledPool, dict[str, EnsembleResult]]:
    """Parse a run directory back into ensemble results.

    Every trajectory file present must be listed in the manifest with a
    matching hash; anything else means results from different runs were mixed.
    """
    run_dir = Path(run_dir)
    manifest = read_manifest(run_dir)
    pool = load_pool(run_dir / POOL_DIR)
    listed = {f["path"]: f for f in manifest["files"]}
    present = {f"{TRAJECTORY_DIR}/{p.name}" for p in (run_dir / TRAJECTORY_DIR).glob("*.csv")}
    extra = sorted(present - set(listed))
    if extra:
        raise InvalidArgumentError(f"trajectory files not in this manifest: {extra}")
    runs = {r["run"]: r for r in manifest["runs"]}
    by_strategy: dict[str, list[RunTrajectory]] = {s: [] for s in manifest["strategies"]}
    for rel, entry in sorted(listed.items()):
        path = run_dir / rel
        if not path.is_file():
            raise SchemaError(f"missing trajectory file {rel}")
        if sha256(path) != entry["sha256"]:
            raise InvalidArgumentError(f"{rel} does not match the manifest (mixed runs?)")
        r = runs[entry["run"]]
        by_strategy[entry["strategy"]].append(
            read_trajectory(path, entry["strategy"], r["run"], r["run_seed"], r["initial"]))
    results = {
        s: EnsembleResult(strategy=s, trajectories=ts, n=pool.n, C=manifest["C"],
                          K=manifest["K"], master_seed=manifest["master_seed"],
                          pool_name=pool.name)
        for s, ts in by_strategy.items()
    }
    for s, res in results.items():
        if res.R != manifest["R"]:
            raise SchemaError(f"strategy {s}: {res.R} trajectories, manifest says {manifest['R']}")
    return manifest, pool, results


# -- aggregates -----------------------------------------------------------------------------

def write_aggregates(out_dir: Path, pool: LabeledPool, results: Mapping[str, EnsembleResult],
                     manifest: dict):
    out_dir.mkdir(parents=True, exist_ok=True)
    names = metric_names(pool.D)
    rows = []
    for s, res in results.items():
        for m in names:
            mean, se, count = res.summary(m)
            for k in range(res.K + 1):
                rows.append([s, m, k, mean[k], se[k], int(count[k])])
    write_csv(out_dir / SUMMARY_FILE,
              ["strategy", "metric", "iteration", "mean", "stderr", "count"], rows)

    counts = {s: res.selection_counts() for s, res in results.items()}
    write_csv(out_dir / DENSITY_FILE,
              ["pool_index", *pool.spec.names, *(f"count_{s}" for s in results)],
              ([i, *pool.Y_raw[i], *(int(counts[s][i]) for s in results)]
               for i in range(pool.n)))

    comp_rows = []
    for c in compare_strategies(results, COMPARED_METRICS):
        for k in range(c.mean_diff.shape[0]):
            comp_rows.append([c.strategy_a, c.strategy_b, c.metric, k, c.mean_diff[k],
                              c.stderr[k], int(c.n_pairs[k])])
    write_csv(out_dir / COMPARISON_FILE,
              ["strategy_a", "strategy_b", "metric", "iteration", "mean_diff", "stderr",
               "n_pairs"], comp_rows)

    write_json(out_dir / AGGREGATE_META_FILE, {
        "case": pool.name,
        "objectives": list(pool.spec.names),
        "strategies": list(results),
        "metrics": names,
        "C": manifest["C"], "K": manifest["K"], "R": manifest["R"],
        "master_seed": manifest["master_seed"],
        "pool": pool.summary(),
    })


def read_summary(agg_dir: Path) -> tuple[dict, list[dict[str, str]]]:
    meta_path = agg_dir / AGGREGATE_META_FILE
    if not meta_path.is_file() or not (agg_dir / SUMMARY_FILE).is_file():
        raise SchemaError(f"{agg_dir}: no aggregate files ({AGGREGATE_META_FILE}, {SUMMARY_FILE})")
    meta = json.loads(meta_path.read_text(encoding="utf-8"))
    _, rows = read_csv(agg_dir / SUMMARY_FILE,
                       ["strategy", "metric", "iteration", "mean", "stderr", "count"])
    return meta, rows


# -- report tables --------------------------------------------------------------------------

def _split_metric(metric: str) -> tuple[str, str]:
    """``mnde_shell`` -> (``mnde``, ``shell``); discovery metrics get scope ``acquired``."""
    for scope in ("global", "shell"):
        suffix = "_" + scope
        if metric.endswith(suffix):
            return metric[: -len(suffix)], scope
    return metric, "acquired"


def write_report(out_dir: Path, agg_dir: Path) -> list[Path]:
    meta, rows = read_summary(agg_dir)
    case = meta["case"]
    required = {"nndp", "mean_stratum", "mnde_global", "mnde_shell"}
    seen = {r["metric"] for r in rows}
    if not rows or not required <= seen:
        raise SchemaError(f"{agg_dir}: summary lacks metric(s) {sorted(required - seen)}")
    error, nde_rows, discovery = [], [], []
    for r in rows:
        metric, scope = _split_metric(r["metric"])
        line = [case, r["strategy"], scope, metric, r["iteration"], r["mean"], r["stderr"]]
        if metric == "mnde":
            error.append(line)
        elif scope == "acquired":
            discovery.append(line)
        else:
            nde_rows.append(line)
    key = lambda line: (line[1], line[2], line[3], int(line[4]))  # noqa: E731
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = [out_dir / ERROR_CURVES_FILE, out_dir / NDE_CURVES_FILE,
             out_dir / DISCOVERY_CURVES_FILE, out_dir / SELECTIONS_FILE]
    for path, table in zip(paths[:3], (error, nde_rows, discovery)):
        write_csv(path, CURVE_COLUMNS, sorted(table, key=key))

    density_path = agg_dir / DENSITY_FILE
    if not density_path.is_file():
        raise SchemaError(f"{agg_dir}: no {DENSITY_FILE}")
    header, dens = read_csv(density_path, ["pool_index"])
    objectives = meta["objectives"]
    strategies = [h[len("count_"):] for h in header if h.startswith("count_")]
    sel = []
    for s in strategies:
        for r in dens:
            sel.append([case, s, r["pool_index"], *(r[o] for o in objectives), r[f"count_{s}"]])
    write_csv(paths[3], ["case", "strategy", "pool_index", *objectives, "count"], sel)
    return paths


def read_curves(path: Path) -> list[dict[str, str]]:
    return read_csv(path, CURVE_COLUMNS)[1]
