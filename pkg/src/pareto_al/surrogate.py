"""Bagged regression-tree surrogate with per-output Gaussian summaries.

Each output axis gets its own independently trained ensemble. The
predictive standard deviation is the spread of tree predictions, floored
at a small multiple of the training column's sample standard deviation so
that downstream Z-scores stay finite.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _tree
from .errors import InsufficientDataError, InvalidArgumentError


@dataclass(frozen=True)
class SurrogateConfig:
    n_trees: int = 64
    min_leaf: int = 1
    feature_fraction: float = 1.0 / 3.0
    sd_floor_rel: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        if self.n_trees < 2:
            raise InvalidArgumentError("n_trees must be >= 2")
        if self.min_leaf < 1:
            raise InvalidArgumentError("min_leaf must be >= 1")
        if not 0.0 < self.feature_fraction <= 1.0:
            raise InvalidArgumentError("feature_fraction must lie in (0, 1]")
        if not self.sd_floor_rel > 0.0:
            raise InvalidArgumentError("sd_floor_rel must be > 0")


@dataclass(frozen=True)
class PredictiveSummary:
    """Gaussian predictive summaries for a batch of candidates.

    ``mean`` and ``sd`` both have shape ``(n, D)``; the implied covariance of
    row ``i`` is ``diag(sd[i] ** 2)``.
    """

    mean: np.ndarray
    sd: np.ndarray

    def __post_init__(self):
        mean = np.atleast_2d(np.asarray(self.mean, dtype=float))
        sd = np.atleast_2d(np.asarray(self.sd, dtype=float))
        if mean.shape != sd.shape:
            raise InvalidArgumentError(f"mean {mean.shape} and sd {sd.shape} differ in shape")
        if not (np.all(np.isfinite(mean)) and np.all(np.isfinite(sd))):
            raise InvalidArgumentError("predictive summary must be finite")
        if np.any(sd <= 0):
            raise InvalidArgumentError("predictive sd must be strictly positive")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "sd", sd)

    def __len__(self) -> int:
        return self.mean.shape[0]

    def __getitem__(self, idx) -> "PredictiveSummary":
        return PredictiveSummary(self.mean[idx], self.sd[idx])

    @property
    def D(self) -> int:
        return self.mean.shape[1]

    def scaled(self, c) -> "PredictiveSummary":
        c = np.asarray(c, dtype=float)
        return PredictiveSummary(self.mean * c, self.sd * c)


def column_scale(Y: np.ndarray) -> np.ndarray:
    """Per-column sample std, falling back to ``|mean|`` (then 1) for constant columns.

    The fallback keeps relative floors positive while still scaling with
    the column's units.
    """
    Y = np.asarray(Y, dtype=float)
    constant = np.ptp(Y, axis=0) == 0
    scale = np.std(Y, axis=0, ddof=1) if Y.shape[0] > 1 else np.zeros(Y.shape[1])
    scale = np.where(constant, np.abs(Y[0]), scale)
    return np.where(scale > 0, scale, 1.0)


def _tree_seeds(seed: int, axis: int, n_trees: int) -> np.ndarray:
    return np.array(
        [np.random.SeedSequence([seed, axis, t]).generate_state(1)[0] for t in range(n_trees)],
        dtype=np.uint32,
    )


class _Ensemble:
    """One output axis: flat node buffers for all trees."""

    def __init__(self, n_trees: int, n_rows: int):
        cap = 2 * n_rows - 1
        self.feature = np.full((n_trees, cap), -1, dtype=np.int64)
        self.threshold = np.zeros((n_trees, cap))
        self.left = np.zeros((n_trees, cap), dtype=np.int64)
        self.right = np.zeros((n_trees, cap), dtype=np.int64)
        self.value = np.zeros((n_trees, cap))
        self.bootstrap = np.zeros((n_trees, n_rows), dtype=np.int64)

    def _chunk(self, lo: int, hi: int):
        return (self.feature[lo:hi], self.threshold[lo:hi], self.left[lo:hi],
                self.right[lo:hi], self.value[lo:hi])

    def fit(self, X, y, seeds, min_leaf, max_features, workers):
        n_trees = seeds.shape[0]
        bounds = np.linspace(0, n_trees, max(1, min(workers, n_trees)) + 1).astype(int)

        def job(k):
            lo, hi = bounds[k], bounds[k + 1]
            self.bootstrap[lo:hi] = _tree.fit_trees(
                X, y, seeds[lo:hi], min_leaf, max_features, *self._chunk(lo, hi))

        _run(job, len(bounds) - 1, workers)

    def predict(self, Xq, workers) -> np.ndarray:
        n_trees = self.feature.shape[0]
        out = np.empty((n_trees, Xq.shape[0]))
        bounds = np.linspace(0, n_trees, max(1, min(workers, n_trees)) + 1).astype(int)

        def job(k):
            lo, hi = bounds[k], bounds[k + 1]
            out[lo:hi] = _tree.predict_trees(Xq, *self._chunk(lo, hi))

        _run(job, len(bounds) - 1, workers)
        return out


def _run(job, n_jobs: int, workers: int):
    if workers <= 1 or n_jobs == 1:
        for k in range(n_jobs):
            job(k)
        return
    with ThreadPoolExecutor(max_workers=workers) as pool:
        for fut in [pool.submit(job, k) for k in range(n_jobs)]:
            fut.result()


class SurrogateModel:
    """Fitted multi-output surrogate; immutable after :func:`fit`."""

    def __init__(self, cfg: SurrogateConfig, ensembles: list[_Ensemble], n_features: int,
                 sd_floor: np.ndarray, workers: int):
        self.cfg = cfg
        self._ensembles = ensembles
        self.n_features = n_features
        self.sd_floor = sd_floor
        self.workers = workers

    @property
    def D(self) -> int:
        return len(self._ensembles)

    def tree_predictions(self, X_query) -> np.ndarray:
        """Raw per-tree predictions, shape ``(D, n_trees, n_query)``."""
        Xq = _check_features(X_query, self.n_features)
        return np.stack([ens.predict(Xq, self.workers) for ens in self._ensembles])

    def bootstrap_rows(self, axis: int) -> np.ndarray:
        return self._ensembles[axis].bootstrap.copy()

    def predict(self, X_query) -> PredictiveSummary:
        P = self.tree_predictions(X_query)
        agree = np.ptp(P, axis=1) == 0
        spread = np.where(agree, 0.0, P.std(axis=1))
        # exact agreement returns the common value, not a rounded average
        mean = np.where(agree, P[:, 0, :], P.mean(axis=1))
        sd = np.maximum(spread, self.sd_floor[:, None])
        return PredictiveSummary(mean.T, sd.T)


def _check_features(X, p: int | None = None) -> np.ndarray:
    X = np.ascontiguousarray(X, dtype=float)
    if X.ndim != 2:
        raise InvalidArgumentError(f"feature matrix must be 2-d, got shape {X.shape}")
    if p is not None and X.shape[1] != p:
        raise InvalidArgumentError(f"expected {p} features, got {X.shape[1]}")
    if not np.all(np.isfinite(X)):
        raise InvalidArgumentError("features must be finite")
    return X


def fit(X_train, Y_train, cfg: SurrogateConfig | None = None, workers: int = 1) -> SurrogateModel:
    """Fit one bagged-tree ensemble per output column of ``Y_train``."""
    cfg = cfg or SurrogateConfig()
    X = _check_features(X_train)
    Y = np.asarray(Y_train, dtype=float)
    if Y.ndim == 1:
        Y = Y[:, None]
    if X.shape[0] < 2:
        raise InsufficientDataError(f"need at least 2 training rows, got {X.shape[0]}")
    if Y.shape[0] != X.shape[0]:
        raise InvalidArgumentError(f"{X.shape[0]} feature rows vs {Y.shape[0]} output rows")
    if X.shape[1] < 1:
        raise InvalidArgumentError("need at least one feature")
    if not np.all(np.isfinite(Y)):
        raise InvalidArgumentError("outputs must be finite")

    n, p = X.shape
    max_features = max(1, int(cfg.feature_fraction * p))
    ensembles = []
    for d in range(Y.shape[1]):
        ens = _Ensemble(cfg.n_trees, n)
        y = np.ascontiguousarray(Y[:, d])
        ens.fit(X, y, _tree_seeds(cfg.seed, d, cfg.n_trees), cfg.min_leaf, max_features, workers)
        ensembles.append(ens)
    sd_floor = cfg.sd_floor_rel * column_scale(Y)
    return SurrogateModel(cfg, ensembles, p, sd_floor, workers)


def predict(model: SurrogateModel, X_query) -> PredictiveSummary:
    return model.predict(X_query)
