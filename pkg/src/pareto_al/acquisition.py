"""Acquisition functions for frontier-seeking active learning.

Every selectable criterion here is dimensionally homogeneous: its candidate
ranking is unchanged when any output axis is rescaled by a positive
constant, with the documented exception of the PCA hyperplane in HPI.
:func:`score_pnorm_distance` exists only to exhibit the failure of that
property for plain distances and is deliberately not a selectable kind.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from . import _pnd
from .errors import CapacityError, ExhaustedPoolError, InvalidArgumentError
from .pareto import pareto_frontier
from .surrogate import PredictiveSummary, column_scale

PND_EXACT_MAX_POINTS = 20


class Kind(str, enum.Enum):
    RANDOM = "random"
    SCV = "scv"
    PJE = "pje"
    HPI = "hpi"
    PND = "pnd"

    @classmethod
    def parse(cls, value) -> "Kind":
        if isinstance(value, Kind):
            return value
        key = str(value).strip().lower()
        # "mpnd" etc.: maximum-of-criterion naming
        if key.startswith("m") and key[1:] in {"scv", "pje", "hpi", "pnd"}:
            key = key[1:]
        try:
            return cls(key)
        except ValueError:
            raise InvalidArgumentError(f"unknown acquisition kind {value!r}") from None

    @property
    def label(self) -> str:
        return "random" if self is Kind.RANDOM else "m" + self.value


@dataclass(frozen=True)
class AcquisitionConfig:
    kind: Kind = Kind.PND
    mc_samples: int = 1000
    scv_mu_floor_rel: float = 1e-6
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "kind", Kind.parse(self.kind))
        if self.kind is Kind.PND and self.mc_samples < 100:
            raise InvalidArgumentError("mc_samples must be >= 100 for PND")
        if not self.scv_mu_floor_rel > 0:
            raise InvalidArgumentError("scv_mu_floor_rel must be > 0")


@dataclass(frozen=True)
class FrontierContext:
    """What an acquisition function may know about the labeled outputs."""

    train_outputs: np.ndarray
    frontier_indices: np.ndarray
    axis_max: np.ndarray

    @classmethod
    def from_outputs(cls, Y) -> "FrontierContext":
        Y = np.atleast_2d(np.asarray(Y, dtype=float))
        return cls(Y, pareto_frontier(Y), Y.max(axis=0))

    @property
    def frontier(self) -> np.ndarray:
        return self.train_outputs[self.frontier_indices]

    @property
    def D(self) -> int:
        return self.train_outputs.shape[1]

    def scaled(self, c) -> "FrontierContext":
        c = np.asarray(c, dtype=float)
        return FrontierContext(self.train_outputs * c, self.frontier_indices, self.axis_max * c)


@dataclass(frozen=True)
class Hyperplane:
    w: np.ndarray
    b: float
    fallback: bool = False


def score_scv(summary: PredictiveSummary, ctx: FrontierContext,
              cfg: AcquisitionConfig | None = None) -> np.ndarray:
    """Sum over outputs of sd / |mean|, with |mean| floored per axis."""
    rel = (cfg or AcquisitionConfig()).scv_mu_floor_rel
    floor = rel * column_scale(ctx.train_outputs)
    return np.sum(summary.sd / np.maximum(np.abs(summary.mean), floor), axis=1)


def score_pje(summary: PredictiveSummary, ctx: FrontierContext) -> np.ndarray:
    """Probability that every output jointly exceeds the labeled per-axis maxima."""
    z = (summary.mean - ctx.axis_max) / summary.sd
    # ndtr(z) == 1 - Phi(-z) without cancellation in the upper tail
    return np.prod(ndtr(z), axis=1)


def fit_hyperplane(ctx: FrontierContext) -> Hyperplane:
    """Least-variance principal direction of the labeled frontier.

    Falls back to reciprocal per-axis ranges of the labeled outputs when the
    frontier has fewer than D points or no variance at all.
    """
    F = ctx.frontier
    D = ctx.D
    fallback = F.shape[0] < D
    if not fallback:
        centered = F - F.mean(axis=0)
        cov = centered.T @ centered / max(F.shape[0] - 1, 1)
        evals, evecs = np.linalg.eigh(cov)
        fallback = not evals[-1] > 0
    if fallback:
        ranges = np.ptp(ctx.train_outputs, axis=0)
        w = np.where(ranges > 0, 1.0 / np.where(ranges > 0, ranges, 1.0), 1.0)
    else:
        w = evecs[:, 0]
    w = w / np.linalg.norm(w)
    total = w.sum()
    if total < 0 or (total == 0 and w[np.flatnonzero(w)[0]] < 0):
        w = -w
    b = float(w @ F.mean(axis=0))
    return Hyperplane(w=w, b=b, fallback=bool(fallback))


def score_hpi(summary: PredictiveSummary, plane: Hyperplane) -> np.ndarray:
    """Z-score of the predicted improvement past the hyperplane."""
    num = summary.mean @ plane.w - plane.b
    den = np.sqrt((summary.sd ** 2) @ (plane.w ** 2))
    return num / den


def score_pnd_mc(summary: PredictiveSummary, ctx: FrontierContext,
                 cfg: AcquisitionConfig | None = None, *, iteration: int = 0,
                 candidates=None) -> np.ndarray:
    """Monte Carlo probability of not being dominated by any labeled output.

    Each candidate draws from its own stream keyed by (seed, iteration,
    candidate id), so scores do not depend on evaluation order. ``candidates``
    gives the ids (pool indices); it defaults to ``0..len(summary)-1``.
    Samples are compared in standardized coordinates, which keeps the score
    unchanged under per-axis rescaling.
    """
    cfg = cfg or AcquisitionConfig()
    if cfg.mc_samples < 100:
        raise InvalidArgumentError("mc_samples must be >= 100")
    m = len(summary)
    ids = np.arange(m) if candidates is None else np.asarray(candidates)
    if ids.shape != (m,) or np.any(ids < 0):
        raise InvalidArgumentError("candidates must be one non-negative id per summary row")
    # a sample weakly below some labeled point is weakly below a frontier point
    F = np.ascontiguousarray(ctx.frontier)
    return _pnd.non_dominated_fraction(
        np.ascontiguousarray(summary.mean), np.ascontiguousarray(summary.sd), F,
        ids.astype(np.int64), np.int64(cfg.seed), np.int64(iteration), cfg.mc_samples)


def score_pnd_exact(summary: PredictiveSummary, ctx: FrontierContext) -> np.ndarray:
    """Exact non-domination probability by inclusion-exclusion over all labeled points."""
    T = ctx.train_outputs
    if T.shape[0] > PND_EXACT_MAX_POINTS:
        raise CapacityError(
            f"exact PND is exponential; at most {PND_EXACT_MAX_POINTS} points, got {T.shape[0]}")
    out = np.empty(len(summary))
    for i in range(len(summary)):
        mu, sd = summary.mean[i], summary.sd[i]
        p_dominated = 0.0
        for r in range(1, T.shape[0] + 1):
            sign = 1.0 if r % 2 else -1.0
            for subset in itertools.combinations(range(T.shape[0]), r):
                corner = T[list(subset)].min(axis=0)
                p_dominated += sign * float(np.prod(ndtr((corner - mu) / sd)))
        out[i] = min(1.0, max(0.0, 1.0 - p_dominated))
    return out


def score_pnorm_distance(y, frontier, p: float = 2.0) -> float:
    """Smallest p-norm distance from ``y`` to a frontier point.

    Mixes units across axes, so its rankings depend on the unit system.
    Not usable as an acquisition kind.
    """
    if not p > 0 or not np.isfinite(p):
        raise InvalidArgumentError(f"p must lie in (0, inf), got {p}")
    F = np.atleast_2d(np.asarray(frontier, dtype=float))
    if F.size == 0:
        raise InvalidArgumentError("frontier is empty")
    y = np.asarray(y, dtype=float)
    return float(np.min(np.sum(np.abs(F - y) ** p, axis=1) ** (1.0 / p)))


def score(summary: PredictiveSummary, ctx: FrontierContext, cfg: AcquisitionConfig, *,
          iteration: int = 0, candidates=None) -> np.ndarray | None:
    """Dispatch on ``cfg.kind``; returns ``None`` for Random (it ignores scores)."""
    kind = cfg.kind
    if kind is Kind.RANDOM:
        return None
    if kind is Kind.SCV:
        return score_scv(summary, ctx, cfg)
    if kind is Kind.PJE:
        return score_pje(summary, ctx)
    if kind is Kind.HPI:
        return score_hpi(summary, fit_hyperplane(ctx))
    return score_pnd_mc(summary, ctx, cfg, iteration=iteration, candidates=candidates)


def select_candidate(scores, remaining, cfg: AcquisitionConfig, *, iteration: int = 0) -> int:
    """Argmax over the remaining pool indices; ties go to the lowest index.

    ``scores[j]`` belongs to ``remaining[j]``. Random draws uniformly from
    ``remaining`` on a stream keyed by (seed, iteration).
    """
    remaining = np.asarray(remaining, dtype=np.int64)
    if remaining.size == 0:
        raise ExhaustedPoolError("no unlabeled candidates remain")
    if cfg.kind is Kind.RANDOM:
        rng = np.random.default_rng([cfg.seed, iteration])
        return int(np.sort(remaining)[rng.integers(remaining.size)])
    scores = np.asarray(scores, dtype=float)
    if scores.shape != remaining.shape:
        raise InvalidArgumentError(f"{scores.size} scores for {remaining.size} candidates")
    if np.any(np.isnan(scores)):
        raise InvalidArgumentError("scores contain NaN")
    best = np.flatnonzero(scores == scores.max())
    return int(remaining[best].min())
