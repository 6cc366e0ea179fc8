"""Candidate-discovery and model-accuracy metrics against ground-truth strata."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DegenerateScopeError, InvalidArgumentError
from .pareto import StrataIndex, pareto_shell

DEFAULT_SHELL_DEPTH = 2


class ScopeKind(str, enum.Enum):
    GLOBAL = "global"
    SHELL = "shell"


@dataclass(frozen=True)
class ScopeSpec:
    kind: ScopeKind = ScopeKind.GLOBAL
    shell_depth: int | None = None

    def __post_init__(self):
        kind = ScopeKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind is ScopeKind.SHELL:
            if self.shell_depth is None or int(self.shell_depth) != self.shell_depth \
                    or self.shell_depth < 1:
                raise InvalidArgumentError("shell scope needs an integer shell_depth >= 1")
        elif self.shell_depth is not None:
            raise InvalidArgumentError("global scope takes no shell_depth")

    @classmethod
    def shell(cls, depth: int = DEFAULT_SHELL_DEPTH) -> "ScopeSpec":
        return cls(ScopeKind.SHELL, depth)

    def rows(self, truth: StrataIndex) -> np.ndarray:
        if self.kind is ScopeKind.GLOBAL:
            return np.arange(truth.n)
        return pareto_shell(truth, self.shell_depth)


@dataclass(frozen=True)
class MetricSnapshot:
    iteration: int
    nndp: int
    mean_stratum: float
    mnde_global: float
    mnde_shell: float
    nde_per_output_global: np.ndarray = field(repr=False)
    nde_per_output_shell: np.ndarray = field(repr=False)


def nde(y_true, y_pred) -> float:
    """Root of residual sum of squares over total sum of squares."""
    y = np.asarray(y_true, dtype=float).ravel()
    yhat = np.asarray(y_pred, dtype=float).ravel()
    if y.shape != yhat.shape:
        raise InvalidArgumentError(f"shape mismatch {y.shape} vs {yhat.shape}")
    if y.size < 2:
        raise DegenerateScopeError(f"need at least 2 rows, got {y.size}")
    ss_tot = np.sum((y - y.mean()) ** 2)
    if not ss_tot > 0:
        raise DegenerateScopeError("true values are constant; NDE is undefined")
    return float(np.sqrt(np.sum((y - yhat) ** 2) / ss_tot))


def nde_per_output(Y_true, Y_pred) -> np.ndarray:
    Y = np.atleast_2d(np.asarray(Y_true, dtype=float))
    P = np.atleast_2d(np.asarray(Y_pred, dtype=float))
    if Y.shape != P.shape:
        raise InvalidArgumentError(f"shape mismatch {Y.shape} vs {P.shape}")
    out = np.empty(Y.shape[1])
    for d in range(Y.shape[1]):
        try:
            out[d] = nde(Y[:, d], P[:, d])
        except DegenerateScopeError as exc:
            raise DegenerateScopeError(f"output axis {d}: {exc}", axis=d) from None
    return out


def mnde(Y_true, Y_pred) -> float:
    """Mean of the per-output NDE values."""
    return float(np.mean(nde_per_output(Y_true, Y_pred)))


def scoped_nde(Y_true, Y_pred, truth: StrataIndex, scope: ScopeSpec) -> np.ndarray:
    """Per-output NDE restricted to the rows of ``scope`` (full-pool arrays in)."""
    Y = np.asarray(Y_true, dtype=float)
    P = np.asarray(Y_pred, dtype=float)
    if Y.shape != P.shape or Y.shape[0] != truth.n:
        raise InvalidArgumentError("predictions must cover the whole pool")
    rows = scope.rows(truth)
    if rows.size < 2:
        raise DegenerateScopeError(f"scope {scope} holds {rows.size} row(s)")
    return nde_per_output(Y[rows], P[rows])


def scoped_mnde(pool, predictions, scope: ScopeSpec) -> float:
    """MNDE of full-pool predictions over a global or ground-truth shell scope."""
    return float(np.mean(scoped_nde(pool.Y_canon, predictions, pool.truth, scope)))


def nndp(acquired, truth: StrataIndex) -> int:
    """Number of acquired indices on the ground-truth Pareto frontier."""
    idx = np.unique(np.asarray(acquired, dtype=np.int64))
    return int(np.count_nonzero(truth.stratum_of[idx] == 1))


def mean_stratum(acquired, truth: StrataIndex) -> float:
    idx = np.unique(np.asarray(acquired, dtype=np.int64))
    if idx.size == 0:
        raise InvalidArgumentError("acquired set is empty")
    return float(np.mean(truth.stratum_of[idx]))
