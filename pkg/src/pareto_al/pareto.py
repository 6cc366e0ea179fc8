"""Dominance, Pareto frontiers, strata and shells over finite point sets.

All routines assume the canonical orientation: every axis is maximized.
Minimize axes are negated once at ingestion (see :class:`ObjectiveSpec`).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import InvalidArgumentError


class Direction(str, enum.Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"

    @classmethod
    def parse(cls, value: "str | Direction") -> "Direction":
        if isinstance(value, Direction):
            return value
        key = str(value).strip().lower()
        aliases = {"max": "maximize", "min": "minimize"}
        try:
            return cls(aliases.get(key, key))
        except ValueError:
            raise InvalidArgumentError(f"unknown direction {value!r}") from None


@dataclass(frozen=True)
class ObjectiveSpec:
    """Names and optimization directions of the output axes."""

    names: tuple[str, ...]
    directions: tuple[Direction, ...]

    def __post_init__(self):
        names = tuple(str(n) for n in self.names)
        directions = tuple(Direction.parse(d) for d in self.directions)
        if not names:
            raise InvalidArgumentError("ObjectiveSpec needs at least one axis")
        if len(names) != len(directions):
            raise InvalidArgumentError("names and directions differ in length")
        if len(set(names)) != len(names):
            raise InvalidArgumentError(f"axis names must be unique: {names}")
        object.__setattr__(self, "names", names)
        object.__setattr__(self, "directions", directions)

    @classmethod
    def maximize_all(cls, names: Sequence[str]) -> "ObjectiveSpec":
        return cls(tuple(names), tuple(Direction.MAXIMIZE for _ in names))

    @property
    def D(self) -> int:
        return len(self.names)

    @property
    def signs(self) -> np.ndarray:
        """+1 for maximize axes, -1 for minimize axes."""
        return np.array([1.0 if d is Direction.MAXIMIZE else -1.0 for d in self.directions])

    def to_canonical(self, Y_raw) -> np.ndarray:
        Y = np.asarray(Y_raw, dtype=float)
        if Y.ndim != 2 or Y.shape[1] != self.D:
            raise InvalidArgumentError(f"expected an (n, {self.D}) output matrix, got {Y.shape}")
        return Y * self.signs

    def to_raw(self, Y_canon) -> np.ndarray:
        # sign flips are exact, so this is the inverse of to_canonical
        return self.to_canonical(Y_canon)


@dataclass(frozen=True)
class StrataIndex:
    """Partition of point indices into strata 1..S.

    ``strata[s - 1]`` holds the (sorted) indices of stratum ``s`` and
    ``stratum_of[i]`` is the 1-based stratum number of point ``i``.
    """

    strata: tuple[np.ndarray, ...]
    stratum_of: np.ndarray = field(repr=False)

    @property
    def n(self) -> int:
        return int(self.stratum_of.shape[0])

    @property
    def n_strata(self) -> int:
        return len(self.strata)

    @property
    def frontier(self) -> np.ndarray:
        return self.strata[0]

    def mean_stratum(self) -> float:
        return float(np.mean(self.stratum_of))


def _as_points(points) -> np.ndarray:
    Y = np.asarray(points, dtype=float)
    if Y.ndim == 1:
        Y = Y[None, :]
    if Y.ndim != 2:
        raise InvalidArgumentError(f"expected a 2-d point array, got shape {Y.shape}")
    if Y.shape[0] == 0:
        raise InvalidArgumentError("point set is empty")
    if Y.shape[1] == 0:
        raise InvalidArgumentError("points have zero dimensions")
    if not np.all(np.isfinite(Y)):
        raise InvalidArgumentError("points must be finite")
    return Y


def dominates(a, b) -> bool:
    """True iff ``a`` is >= ``b`` on every axis and > on at least one."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise InvalidArgumentError(f"dimension mismatch: {a.shape} vs {b.shape}")
    return bool(np.all(a >= b) and np.any(a > b))


def dominance_matrix(points) -> np.ndarray:
    """Boolean matrix ``M`` with ``M[i, j]`` true iff point i dominates point j."""
    Y = _as_points(points)
    ge = np.all(Y[:, None, :] >= Y[None, :, :], axis=2)
    gt = np.any(Y[:, None, :] > Y[None, :, :], axis=2)
    return ge & gt


def pareto_frontier(points) -> np.ndarray:
    """Sorted indices of the points dominated by no other point in the set."""
    M = dominance_matrix(points)
    return np.flatnonzero(~M.any(axis=0))


def compute_strata(points) -> StrataIndex:
    """Recursive non-dominated sort with cumulative removal of earlier strata."""
    M = dominance_matrix(points)
    n = M.shape[0]
    # number of not-yet-assigned points dominating each point
    n_dominators = M.sum(axis=0).astype(np.int64)
    stratum_of = np.zeros(n, dtype=np.int64)
    strata: list[np.ndarray] = []
    current = np.flatnonzero(n_dominators == 0)
    s = 1
    while current.size:
        stratum_of[current] = s
        strata.append(current)
        n_dominators -= M[current].sum(axis=0)
        n_dominators[stratum_of > 0] = -1
        current = np.flatnonzero(n_dominators == 0)
        s += 1
    assert np.all(stratum_of > 0)
    stratum_of.setflags(write=False)
    for arr in strata:
        arr.setflags(write=False)
    return StrataIndex(strata=tuple(strata), stratum_of=stratum_of)


def pareto_shell(index: StrataIndex, s: int) -> np.ndarray:
    """Sorted indices in the union of strata ``1..min(s, S)``."""
    if int(s) != s or s < 1:
        raise InvalidArgumentError(f"shell depth must be a positive integer, got {s!r}")
    return np.flatnonzero(index.stratum_of <= s)

