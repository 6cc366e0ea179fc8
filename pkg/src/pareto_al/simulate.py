"""Retrospective active learning: single runs, seeded ensembles, comparisons.

A run hides the labels of a fully labeled pool, reveals a random initial
subset, and then repeatedly fits the surrogate, scores the unlabeled
candidates and reveals the argmax. Metric snapshot ``k`` is taken with the
model fit on the ``k``-th labeled set, before that iteration's acquisition.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping, Sequence

import numpy as np

from . import acquisition as acq
from . import metrics, surrogate
from .datasets import LabeledPool
from .errors import DegenerateScopeError, InvalidArgumentError, ParetoALError, RunError

log = logging.getLogger(__name__)

DEFAULT_C = 10
DEFAULT_K = 60
DEFAULT_R = 30

# metrics compared between strategies
COMPARED_METRICS = ("nndp", "mean_stratum", "mnde_global", "mnde_shell")


def derive_seed(*keys: int) -> int:
    """Deterministic 32-bit seed from a tuple of non-negative integers."""
    return int(np.random.SeedSequence([int(k) for k in keys]).generate_state(1)[0])


@dataclass(frozen=True)
class RunConfig:
    pool: LabeledPool = field(repr=False)
    acquisition: acq.AcquisitionConfig = acq.AcquisitionConfig()
    surrogate: surrogate.SurrogateConfig = surrogate.SurrogateConfig()
    C: int = DEFAULT_C
    K: int = DEFAULT_K
    run_seed: int = 0
    shell_depth: int = metrics.DEFAULT_SHELL_DEPTH

    def __post_init__(self):
        n = self.pool.n
        if not 2 <= self.C < n:
            raise InvalidArgumentError(f"C must satisfy 2 <= C < n={n}, got C={self.C}")
        if not 1 <= self.K <= n - self.C:
            raise InvalidArgumentError(
                f"K must satisfy 1 <= K <= n - C = {n - self.C}, got K={self.K}")
        if self.shell_depth < 1:
            raise InvalidArgumentError("shell_depth must be >= 1")

    @property
    def label(self) -> str:
        return self.acquisition.kind.label


def metric_names(D: int) -> list[str]:
    names = ["nndp", "mean_stratum", "mnde_global", "mnde_shell"]
    names += [f"nde_{d + 1}_global" for d in range(D)]
    names += [f"nde_{d + 1}_shell" for d in range(D)]
    return names


@dataclass
class RunTrajectory:
    """Record of one run; ``metrics[name][k]`` is the snapshot at iteration k."""

    strategy: str
    run: int
    run_seed: int
    initial: np.ndarray
    acquired: np.ndarray
    metrics: dict[str, np.ndarray]

    @property
    def K(self) -> int:
        return int(self.acquired.shape[0])

    @property
    def D(self) -> int:
        return sum(1 for k in self.metrics if k.endswith("_global") and k.startswith("nde_"))

    def labeled(self, k: int) -> np.ndarray:
        return np.concatenate([self.initial, self.acquired[:k]])

    def snapshots(self) -> list[metrics.MetricSnapshot]:
        D = self.D
        out = []
        for k in range(self.K + 1):
            out.append(metrics.MetricSnapshot(
                iteration=k,
                nndp=int(self.metrics["nndp"][k]),
                mean_stratum=float(self.metrics["mean_stratum"][k]),
                mnde_global=float(self.metrics["mnde_global"][k]),
                mnde_shell=float(self.metrics["mnde_shell"][k]),
                nde_per_output_global=np.array(
                    [self.metrics[f"nde_{d + 1}_global"][k] for d in range(D)]),
                nde_per_output_shell=np.array(
                    [self.metrics[f"nde_{d + 1}_shell"][k] for d in range(D)]),
            ))
        return out


def _model_errors(pool: LabeledPool, pred: np.ndarray, scope: metrics.ScopeSpec) -> np.ndarray:
    try:
        return metrics.scoped_nde(pool.Y_canon, pred, pool.truth, scope)
    except DegenerateScopeError:
        return np.full(pool.D, np.nan)


def run_once(cfg: RunConfig, run: int = 0) -> RunTrajectory:
    """Execute one retrospective run; deterministic in ``cfg``."""
    pool = cfg.pool
    n, D = pool.n, pool.D
    init_rng = np.random.default_rng(derive_seed(cfg.run_seed, 0))
    initial = np.sort(init_rng.choice(n, size=cfg.C, replace=False)).astype(np.int64)
    labeled = np.zeros(n, dtype=bool)
    labeled[initial] = True
    acq_cfg = replace(cfg.acquisition, seed=derive_seed(cfg.acquisition.seed, cfg.run_seed))
    shell = metrics.ScopeSpec.shell(cfg.shell_depth)
    whole = metrics.ScopeSpec()

    names = metric_names(D)
    table = {name: np.full(cfg.K + 1, np.nan) for name in names}
    acquired = np.empty(cfg.K, dtype=np.int64)
    order = list(initial)

    for k in range(cfg.K + 1):
        try:
            idx = np.array(order, dtype=np.int64)
            sur_cfg = replace(cfg.surrogate,
                              seed=derive_seed(cfg.surrogate.seed, cfg.run_seed, k))
            model = surrogate.fit(pool.X[idx], pool.Y_canon[idx], sur_cfg)
            summary = model.predict(pool.X)

            table["nndp"][k] = metrics.nndp(idx, pool.truth)
            table["mean_stratum"][k] = metrics.mean_stratum(idx, pool.truth)
            g = _model_errors(pool, summary.mean, whole)
            s = _model_errors(pool, summary.mean, shell)
            table["mnde_global"][k] = np.mean(g)
            table["mnde_shell"][k] = np.mean(s)
            for d in range(D):
                table[f"nde_{d + 1}_global"][k] = g[d]
                table[f"nde_{d + 1}_shell"][k] = s[d]

            if k == cfg.K:
                break
            remaining = np.flatnonzero(~labeled)
            ctx = acq.FrontierContext.from_outputs(pool.Y_canon[idx])
            scores = acq.score(summary[remaining], ctx, acq_cfg, iteration=k,
                               candidates=remaining)
            pick = acq.select_candidate(scores, remaining, acq_cfg, iteration=k)
        except ParetoALError as exc:
            raise RunError(str(exc), cfg.run_seed, k) from exc
        acquired[k] = pick
        labeled[pick] = True
        order.append(pick)

    return RunTrajectory(strategy=cfg.label, run=run, run_seed=cfg.run_seed,
                         initial=initial, acquired=acquired, metrics=table)


def _mean_se(values: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Column-wise mean, standard error and count, skipping NaNs."""
    ok = ~np.isnan(values)
    count = ok.sum(axis=0)
    safe = np.where(ok, values, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        mean = safe.sum(axis=0) / count
        dev = np.where(ok, values - mean, 0.0)
        var = (dev ** 2).sum(axis=0) / (count - 1)
        se = np.sqrt(var / count)
    mean = np.where(count > 0, mean, np.nan)
    se = np.where(count > 1, se, np.nan)
    return mean, se, count


@dataclass
class EnsembleResult:
    """R completed trajectories of one strategy plus their run manifest."""

    strategy: str
    trajectories: list[RunTrajectory]
    n: int
    C: int
    K: int
    master_seed: int
    pool_name: str = "pool"
    manifest: dict = field(default_factory=dict)

    def __post_init__(self):
        self.trajectories = sorted(self.trajectories, key=lambda t: t.run)

    @property
    def R(self) -> int:
        return len(self.trajectories)

    @property
    def run_seeds(self) -> list[int]:
        return [t.run_seed for t in self.trajectories]

    @property
    def metric_names(self) -> list[str]:
        return list(self.trajectories[0].metrics)

    def matrix(self, metric: str) -> np.ndarray:
        """Shape ``(R, K + 1)``."""
        return np.stack([t.metrics[metric] for t in self.trajectories])

    def mean(self, metric: str) -> np.ndarray:
        return _mean_se(self.matrix(metric))[0]

    def stderr(self, metric: str) -> np.ndarray:
        return _mean_se(self.matrix(metric))[1]

    def summary(self, metric: str):
        return _mean_se(self.matrix(metric))

    def selection_counts(self) -> np.ndarray:
        """Acquisition counts per pool index over all runs (initial sets excluded)."""
        picks = np.concatenate([t.acquired for t in self.trajectories])
        return np.bincount(picks, minlength=self.n)


def run_seeds(master_seed: int, R: int) -> list[int]:
    return [derive_seed(master_seed, r) for r in range(1, R + 1)]


def _run_job(args):
    cfg, r = args
    return run_once(cfg, run=r)


def run_ensemble(template: RunConfig, R: int, master_seed: int, workers: int = 1) -> EnsembleResult:
    """Run ``R`` seeded repetitions of ``template``; output is independent of ``workers``."""
    if R < 1:
        raise InvalidArgumentError("R must be >= 1")
    seeds = run_seeds(master_seed, R)
    jobs = [(replace(template, run_seed=s), r) for r, s in enumerate(seeds, start=1)]
    if workers > 1 and R > 1:
        with ProcessPoolExecutor(max_workers=workers) as ex:
            trajectories = list(ex.map(_run_job, jobs))
    else:
        trajectories = [_run_job(j) for j in jobs]
    manifest = {
        "strategy": template.label,
        "master_seed": master_seed,
        "R": R,
        "run_seeds": seeds,
        "initial_sets": [t.initial.tolist() for t in trajectories],
    }
    return EnsembleResult(strategy=template.label, trajectories=trajectories, n=template.pool.n,
                          C=template.C, K=template.K, master_seed=master_seed,
                          pool_name=template.pool.name, manifest=manifest)


@dataclass(frozen=True)
class Comparison:
    strategy_a: str
    strategy_b: str
    metric: str
    mean_diff: np.ndarray
    stderr: np.ndarray
    n_pairs: np.ndarray


def paired_difference(a: EnsembleResult, b: EnsembleResult, metric: str) -> Comparison:
    """Per-iteration mean and standard error of ``a - b`` paired by run index."""
    _check_comparable([a, b])
    mean, se, count = _mean_se(a.matrix(metric) - b.matrix(metric))
    return Comparison(a.strategy, b.strategy, metric, mean, se, count)


def _check_comparable(results: Sequence[EnsembleResult]):
    ref = results[0]
    for res in results[1:]:
        for attr in ("n", "C", "K", "R", "pool_name"):
            if getattr(res, attr) != getattr(ref, attr):
                raise InvalidArgumentError(
                    f"results differ in {attr}: {getattr(ref, attr)!r} vs {getattr(res, attr)!r}")
        if res.run_seeds != ref.run_seeds:
            raise InvalidArgumentError("results were not seeded from the same master seed")


def compare_strategies(results: Mapping[str, EnsembleResult],
                       metrics_: Sequence[str] = COMPARED_METRICS) -> list[Comparison]:
    """Paired differences for every unordered strategy pair, in mapping order."""
    items = list(results.items())
    if not items:
        raise InvalidArgumentError("no results to compare")
    _check_comparable([r for _, r in items])
    out = []
    for i in range(len(items)):
        for j in range(i + 1, len(items)):
            (na, a), (nb, b) = items[i], items[j]
            for m in metrics_:
                c = paired_difference(a, b, m)
                out.append(replace(c, strategy_a=na, strategy_b=nb))
    return out
