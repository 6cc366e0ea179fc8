"""Candidate pools: synthetic generators, CSV ingestion and pool files."""

from __future__ import annotations

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Mapping, Sequence

import numpy as np

from .errors import EmptyPoolError, InvalidArgumentError, ParseError, SchemaError
from .pareto import Direction, ObjectiveSpec, StrataIndex, compute_strata

log = logging.getLogger(__name__)

FEATURES_FILE = "features.csv"
OUTPUTS_FILE = "outputs.csv"
METADATA_FILE = "metadata.json"

HYPERBOLIC_GUARD = 1e-6


@dataclass(frozen=True)
class LabeledPool:
    """Fully labeled candidate pool used for retrospective active learning."""

    X: np.ndarray
    Y_raw: np.ndarray
    spec: ObjectiveSpec
    name: str = "pool"
    feature_names: tuple[str, ...] = ()
    meta: Mapping[str, Any] = field(default_factory=dict)
    Y_canon: np.ndarray = field(init=False, repr=False)
    truth: StrataIndex = field(init=False, repr=False)

    def __post_init__(self):
        X = np.ascontiguousarray(self.X, dtype=float)
        Y = np.asarray(self.Y_raw, dtype=float)
        if X.ndim != 2 or Y.ndim != 2 or X.shape[0] != Y.shape[0]:
            raise InvalidArgumentError(f"inconsistent shapes X{X.shape} Y{Y.shape}")
        if X.shape[0] < 2:
            raise InvalidArgumentError("a pool needs at least 2 rows")
        if Y.shape[1] != self.spec.D:
            raise InvalidArgumentError(f"{Y.shape[1]} output columns for D={self.spec.D}")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Y))):
            raise InvalidArgumentError("pool values must be finite")
        names = tuple(self.feature_names) or tuple(f"x{j + 1}" for j in range(X.shape[1]))
        if len(names) != X.shape[1]:
            raise InvalidArgumentError("feature_names length does not match X")
        for arr in (X, Y):
            arr.setflags(write=False)
        Y_canon = self.spec.to_canonical(Y)
        Y_canon.setflags(write=False)
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y_raw", Y)
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "Y_canon", Y_canon)
        object.__setattr__(self, "truth", compute_strata(Y_canon))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def D(self) -> int:
        return self.spec.D

    def summary(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "n": self.n,
            "D": self.D,
            "frontier_size": int(self.truth.frontier.size),
            "max_stratum": self.truth.n_strata,
        }


def _synthetic(kind: str, n: int, seed: int, X: np.ndarray, Y: np.ndarray) -> LabeledPool:
    return LabeledPool(
        X=X, Y_raw=Y, spec=ObjectiveSpec.maximize_all(["y1", "y2"]),
        name=kind, meta={"case": kind, "n": n, "seed": seed},
    )


def _check_n(n: int):
    if int(n) != n or n < 2:
        raise InvalidArgumentError(f"pool size must be an integer >= 2, got {n!r}")


def gen_linear(n: int, seed: int) -> LabeledPool:
    _check_n(n)
    X = np.random.default_rng(seed).uniform(0.0, 1.0, size=(n, 2))
    Y = np.column_stack([X[:, 0] - X[:, 1], X[:, 0] + X[:, 1]])
    return _synthetic("linear", n, seed, X, Y)


def gen_circular(n: int, seed: int) -> LabeledPool:
    _check_n(n)
    rng = np.random.default_rng(seed)
    r = rng.uniform(0.0, 1.0, size=n)
    theta = rng.uniform(0.0, np.pi / 2, size=n)
    X = np.column_stack([r, theta])
    Y = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    return _synthetic("circular", n, seed, X, Y)


def gen_hyperbolic(n: int, seed: int) -> LabeledPool:
    _check_n(n)
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 10.0, size=(n, 2))
    # resample (rather than clip) to avoid manufacturing frontier ties
    small = X < HYPERBOLIC_GUARD
    while small.any():
        X[small] = rng.uniform(0.0, 10.0, size=int(small.sum()))
        small = X < HYPERBOLIC_GUARD
    Y = 1.0 / X
    return _synthetic("hyperbolic", n, seed, X, Y)


def gen_bat(n: int, seed: int) -> LabeledPool:
    _check_n(n)
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(0.0, 1.0, size=n)
    theta = rng.uniform(0.0, np.pi / 2, size=n)
    r = x1 + 2.0 * np.abs(theta - np.pi / 4)
    X = np.column_stack([x1, theta])
    Y = np.column_stack([r * np.cos(theta), r * np.sin(theta)])
    return _synthetic("bat", n, seed, X, Y)


GENERATORS: dict[str, Callable[[int, int], LabeledPool]] = {
    "linear": gen_linear,
    "circular": gen_circular,
    "hyperbolic": gen_hyperbolic,
    "bat": gen_bat,
}


def generate(case: str, n: int, seed: int) -> LabeledPool:
    try:
        gen = GENERATORS[case]
    except KeyError:
        raise InvalidArgumentError(
            f"unknown case {case!r}; expected one of {sorted(GENERATORS)}") from None
    return gen(n, seed)


TRANSFORMS: dict[str, Callable[[np.ndarray], np.ndarray]] = {
    "identity": lambda v: v,
    "square": np.square,
    "abs": np.abs,
    "log": np.log,
    "log10": np.log10,
}


@dataclass(frozen=True)
class OutputColumn:
    column: str
    direction: Direction = Direction.MAXIMIZE
    transform: str = "identity"
    name: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "direction", Direction.parse(self.direction))
        if self.transform not in TRANSFORMS:
            raise InvalidArgumentError(
                f"unknown transform {self.transform!r}; expected one of {sorted(TRANSFORMS)}")

    @property
    def axis_name(self) -> str:
        if self.name:
            return self.name
        return self.column if self.transform == "identity" else f"{self.transform}({self.column})"


@dataclass(frozen=True)
class CsvPoolConfig:
    features: Sequence[str]
    outputs: Sequence[OutputColumn]
    name: str | None = None

    def __post_init__(self):
        if not self.features:
            raise InvalidArgumentError("at least one feature column is required")
        if not self.outputs:
            raise InvalidArgumentError("at least one output column is required")
        outputs = tuple(o if isinstance(o, OutputColumn) else OutputColumn(**o)
                        for o in self.outputs)
        object.__setattr__(self, "features", tuple(self.features))
        object.__setattr__(self, "outputs", outputs)


def _parse_cell(text: str, row: int, column: str) -> float:
    text = text.strip()
    if text == "":
        return math.nan
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"row {row}, column {column!r}: cannot parse {text!r} as a number",
                         row=row, column=column) from None


def _read_numeric(path: Path, columns: Sequence[str]) -> np.ndarray:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise SchemaError(f"{path}: file is empty (header row required)") from None
        missing = [c for c in columns if c not in header]
        if missing:
            raise SchemaError(f"{path}: missing column(s) {missing}")
        pos = [header.index(c) for c in columns]
        rows = []
        # line 1 is the header
        for line_no, record in enumerate(reader, start=2):
            if not record or all(not cell.strip() for cell in record):
                continue
            if len(record) < len(header):
                raise ParseError(f"{path}: row {line_no} has {len(record)} of "
                                 f"{len(header)} fields", row=line_no)
            rows.append([_parse_cell(record[j], line_no, c) for j, c in zip(pos, columns)])
    return np.array(rows, dtype=float).reshape(len(rows), len(columns))


def load_csv_pool(path, config: CsvPoolConfig) -> LabeledPool:
    """Ingest a pre-featurized table; non-finite rows are dropped and logged."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundError(path)
    out_cols = [o.column for o in config.outputs]
    table = _read_numeric(path, list(config.features) + out_cols)
    p = len(config.features)
    X = table[:, :p]
    with np.errstate(all="ignore"):
        Y = np.column_stack([TRANSFORMS[o.transform](table[:, p + d])
                             for d, o in enumerate(config.outputs)])
    keep = np.all(np.isfinite(X), axis=1) & np.all(np.isfinite(Y), axis=1)
    dropped = int((~keep).sum())
    if dropped:
        log.info("%s: dropped %d row(s) with non-finite values", path, dropped)
    if keep.sum() == 0:
        raise EmptyPoolError(f"{path}: no usable rows")
    spec = ObjectiveSpec(tuple(o.axis_name for o in config.outputs),
                         tuple(o.direction for o in config.outputs))
    return LabeledPool(
        X=X[keep], Y_raw=Y[keep], spec=spec, name=config.name or path.stem,
        feature_names=tuple(config.features),
        meta={"source": path.name, "dropped_rows": dropped},
    )


def _fmt(v: float) -> str:
    return repr(float(v))


def _write_matrix(path: Path, names: Sequence[str], M: np.ndarray):
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["index", *names])
        for i, row in enumerate(M):
            w.writerow([i, *(_fmt(v) for v in row)])


def save_pool(pool: LabeledPool, out_dir) -> list[Path]:
    """Write ``features.csv``, ``outputs.csv`` (raw orientation) and ``metadata.json``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = [out / FEATURES_FILE, out / OUTPUTS_FILE, out / METADATA_FILE]
    _write_matrix(paths[0], pool.feature_names, pool.X)
    _write_matrix(paths[1], pool.spec.names, pool.Y_raw)
    meta = {
        "name": pool.name,
        "objectives": [{"name": n, "direction": d.value}
                       for n, d in zip(pool.spec.names, pool.spec.directions)],
        "features": list(pool.feature_names),
        "meta": dict(pool.meta),
        "summary": pool.summary(),
    }
    paths[2].write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return paths


def load_pool(in_dir) -> LabeledPool:
    """Inverse of :func:`save_pool`."""
    src = Path(in_dir)
    try:
        meta = json.loads((src / METADATA_FILE).read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise SchemaError(f"{src}: no {METADATA_FILE}") from None
    try:
        names = [o["name"] for o in meta["objectives"]]
        directions = [o["direction"] for o in meta["objectives"]]
        features = list(meta["features"])
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"{src / METADATA_FILE}: malformed metadata ({exc})") from None
    X = _read_numeric(src / FEATURES_FILE, features)
    Y = _read_numeric(src / OUTPUTS_FILE, names)
    return LabeledPool(X=X, Y_raw=Y, spec=ObjectiveSpec(tuple(names), tuple(directions)),
                       name=meta.get("name", src.name), feature_names=tuple(features),
                       meta=meta.get("meta", {}))
