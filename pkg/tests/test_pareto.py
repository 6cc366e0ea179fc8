import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

import oracles
from pareto_al.errors import InvalidArgumentError
from pareto_al.pareto import (Direction, ObjectiveSpec, compute_strata, dominance_matrix,
                              dominates, pareto_frontier, pareto_shell)


def test_dominates_examples():
    assert dominates([1, 1], [0, 0])
    assert not dominates([1, 0], [0, 1])
    assert not dominates([0, 1], [1, 0])
    assert not dominates([1, 1], [1, 1])
    assert dominates([1, 0], [1, -1])


def test_dominates_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        dominates([1, 2], [1, 2, 3])


def test_frontier_four_points(four_points):
    assert pareto_frontier(four_points).tolist() == oracles.frontier(four_points.tolist()) == [0, 1]


def test_frontier_singleton_and_duplicates():
    assert pareto_frontier([[5.0, -1.0]]).tolist() == [0]
    assert pareto_frontier([[0.0, 0.0], [0.0, 0.0]]).tolist() == [0, 1]


def test_frontier_empty_raises():
    with pytest.raises(InvalidArgumentError):
        pareto_frontier(np.empty((0, 2)))
    with pytest.raises(InvalidArgumentError):
        compute_strata(np.empty((0, 2)))


def test_strata_four_points(four_points):
    idx = compute_strata(four_points)
    assert [s.tolist() for s in idx.strata] == oracles.strata(four_points.tolist())
    assert [s.tolist() for s in idx.strata] == [[0, 1], [3], [2]]
    assert idx.stratum_of[3] == 2


def test_strata_antichain_and_chain():
    anti = compute_strata([[0, 3], [1, 2], [2, 1], [3, 0]])
    assert anti.n_strata == 1
    chain = compute_strata([[0, 0], [1, 1], [2, 2]])
    assert [s.tolist() for s in chain.strata] == [[2], [1], [0]]


def test_strata_are_cumulative_not_single_step():
    # Removing only the previous stratum would put 0 back into stratum 3.
    pts = [[0, 0], [1, 1], [2, 2], [3, 3]]
    assert compute_strata(pts).stratum_of.tolist() == [4, 3, 2, 1]


def test_shell(four_points):
    idx = compute_strata(four_points)
    assert pareto_shell(idx, 1).tolist() == idx.frontier.tolist()
    assert pareto_shell(idx, 2).tolist() == [0, 1, 3]
    assert pareto_shell(idx, 3).tolist() == [0, 1, 2, 3]
    assert pareto_shell(idx, 99).tolist() == [0, 1, 2, 3]
    with pytest.raises(InvalidArgumentError):
        pareto_shell(idx, 0)


def test_objective_spec_orientation():
    spec = ObjectiveSpec(("kappa", "S2"), ("minimize", "maximize"))
    Y = np.array([[1.0, 2.0], [3.0, -4.0]])
    C = spec.to_canonical(Y)
    np.testing.assert_array_equal(C, [[-1.0, 2.0], [-3.0, -4.0]])
    np.testing.assert_array_equal(spec.to_raw(C), Y)
    assert spec.directions == (Direction.MINIMIZE, Direction.MAXIMIZE)
    with pytest.raises(InvalidArgumentError):
        ObjectiveSpec(("a", "a"), ("max", "max"))
    with pytest.raises(InvalidArgumentError):
        ObjectiveSpec((), ())


point_sets = st.integers(2, 3).flatmap(
    lambda D: arrays(np.int64, st.tuples(st.integers(1, 40), st.just(D)),
                     elements=st.integers(0, 6)))


@settings(max_examples=150, deadline=None)
@given(point_sets)
def test_strata_match_oracle(Y):
    idx = compute_strata(Y)
    assert [s.tolist() for s in idx.strata] == oracles.strata(Y.tolist())
    assert sum(s.size for s in idx.strata) == len(Y)
    assert np.all(idx.stratum_of >= 1)


@settings(max_examples=80, deadline=None)
@given(point_sets)
def test_dominance_antisymmetric_and_transitive(Y):
    M = dominance_matrix(Y)
    assert not np.any(M & M.T)
    # transitivity: (M @ M) > 0 implies M
    two_step = (M.astype(int) @ M.astype(int)) > 0
    assert not np.any(two_step & ~M)
    for i in range(min(len(Y), 6)):
        for j in range(min(len(Y), 6)):
            assert M[i, j] == oracles.dominates(Y[i], Y[j])


@settings(max_examples=60, deadline=None)
@given(point_sets, st.integers(0, 2 ** 32 - 1))
def test_strata_invariant_under_monotone_maps(Y, seed):
    rng = np.random.default_rng(seed)
    Yf = Y.astype(float)
    mapped = np.empty_like(Yf)
    for d in range(Y.shape[1]):
        a, b = rng.uniform(0.1, 5.0), rng.uniform(-3, 3)
        f = [lambda v: np.exp(a * v / 6.0), lambda v: a * v ** 3 + b, lambda v: np.arctan(a * v)][d % 3]
        mapped[:, d] = f(Yf[:, d])
    assert np.array_equal(compute_strata(Yf).stratum_of, compute_strata(mapped).stratum_of)
