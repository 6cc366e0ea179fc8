import numpy as np
import pytest

import oracles
from pareto_al import simulate as sim
from pareto_al.acquisition import AcquisitionConfig
from pareto_al.datasets import gen_bat, gen_circular, gen_linear
from pareto_al.errors import InvalidArgumentError
from pareto_al.surrogate import SurrogateConfig

FAST = SurrogateConfig(n_trees=8)


def cfg(pool, kind="random", **kw):
    return sim.RunConfig(pool=pool, acquisition=AcquisitionConfig(kind=kind, mc_samples=200),
                         surrogate=FAST, **kw)


def test_random_run_against_oracle_strata():
    pool = gen_linear(200, 5)
    t = sim.run_once(cfg(pool, C=10, K=20, run_seed=11))
    assert len(t.snapshots()) == 21
    assert np.all(np.diff(t.metrics["nndp"]) >= 0)
    first = set(oracles.strata(pool.Y_canon.tolist())[0])
    for k in range(21):
        lab = t.labeled(k)
        assert len(set(lab.tolist())) == 10 + k
        assert t.metrics["nndp"][k] == sum(i in first for i in lab)


def test_labeled_sets_nested_and_fresh():
    pool = gen_bat(60, 1)
    t = sim.run_once(cfg(pool, "pje", C=5, K=15, run_seed=3))
    assert not set(t.initial) & set(t.acquired)
    assert len(set(t.acquired)) == 15


@pytest.mark.parametrize("kind", ["random", "scv", "pje", "hpi", "pnd"])
def test_exhaustion(kind):
    pool = gen_circular(30, 2)
    t = sim.run_once(cfg(pool, kind, C=5, K=25, run_seed=4))
    assert sorted(t.labeled(25).tolist()) == list(range(30))
    assert t.metrics["nndp"][-1] == pool.truth.frontier.size
    assert t.metrics["mean_stratum"][-1] == pytest.approx(pool.truth.mean_stratum())


def test_run_deterministic():
    pool = gen_bat(80, 0)
    a = sim.run_once(cfg(pool, "pnd", C=6, K=5, run_seed=9))
    b = sim.run_once(cfg(pool, "pnd", C=6, K=5, run_seed=9))
    np.testing.assert_array_equal(a.acquired, b.acquired)
    for name in a.metrics:
        np.testing.assert_array_equal(a.metrics[name], b.metrics[name])


def test_degenerate_shell_recorded_as_missing():
    # outputs on a diagonal line: the frontier is one point, so a depth-1 shell is degenerate
    X = np.linspace(0, 1, 12)[:, None]
    Y = np.column_stack([X[:, 0], X[:, 0]])
    from pareto_al.datasets import LabeledPool
    from pareto_al.pareto import ObjectiveSpec
    pool = LabeledPool(X=X, Y_raw=Y, spec=ObjectiveSpec.maximize_all(["a", "b"]))
    t = sim.run_once(cfg(pool, C=4, K=2, shell_depth=1))
    assert np.all(np.isnan(t.metrics["mnde_shell"]))
    assert np.all(np.isfinite(t.metrics["mnde_global"]))


def test_config_validation():
    pool = gen_linear(20, 0)
    with pytest.raises(InvalidArgumentError):
        cfg(pool, C=1, K=2)
    with pytest.raises(InvalidArgumentError):
        cfg(pool, C=10, K=11)
    cfg(pool, C=10, K=10)


def test_ensemble_r1_equals_trajectory():
    pool = gen_linear(50, 1)
    res = sim.run_ensemble(cfg(pool, C=5, K=6), R=1, master_seed=3)
    t = res.trajectories[0]
    assert t.run_seed == sim.derive_seed(3, 1)
    for name in res.metric_names:
        np.testing.assert_array_equal(res.mean(name), t.metrics[name])
        assert np.all(np.isnan(res.stderr(name)))


def test_seed_sharing_across_strategies():
    pool = gen_bat(60, 2)
    a = sim.run_ensemble(cfg(pool, "random", C=5, K=3), R=3, master_seed=8)
    b = sim.run_ensemble(cfg(pool, "pje", C=5, K=3), R=3, master_seed=8)
    for ta, tb in zip(a.trajectories, b.trajectories):
        np.testing.assert_array_equal(ta.initial, tb.initial)
    assert len({tuple(t.initial) for t in a.trajectories}) == 3


def test_worker_count_does_not_change_results():
    pool = gen_bat(60, 2)
    tmpl = cfg(pool, "pnd", C=5, K=3)
    one = sim.run_ensemble(tmpl, R=3, master_seed=1, workers=1)
    two = sim.run_ensemble(tmpl, R=3, master_seed=1, workers=2)
    assert one.manifest == two.manifest
    for name in one.metric_names:
        np.testing.assert_array_equal(one.matrix(name), two.matrix(name))
    np.testing.assert_array_equal(one.selection_counts(), two.selection_counts())


def test_mean_se_skips_missing():
    v = np.array([[1.0, np.nan], [3.0, 2.0], [np.nan, np.nan]])
    mean, se, count = sim._mean_se(v)
    np.testing.assert_array_equal(mean, [2.0, 2.0])
    np.testing.assert_array_equal(count, [2, 1])
    assert se[0] == pytest.approx(np.std([1.0, 3.0], ddof=1) / np.sqrt(2))
    assert np.isnan(se[1])


def test_compare_strategies():
    pool = gen_linear(50, 1)
    a = sim.run_ensemble(cfg(pool, "random", C=5, K=4), R=2, master_seed=2)
    b = sim.run_ensemble(cfg(pool, "pje", C=5, K=4), R=2, master_seed=2)
    for c in sim.compare_strategies({"x": a, "y": a}):
        assert np.all(np.nan_to_num(c.mean_diff) == 0)
    rows = sim.compare_strategies({"random": a, "mpje": b})
    assert {c.metric for c in rows} == set(sim.COMPARED_METRICS)
    one_a = sim.run_ensemble(cfg(pool, "random", C=5, K=4), R=1, master_seed=2)
    one_b = sim.run_ensemble(cfg(pool, "pje", C=5, K=4), R=1, master_seed=2)
    d = sim.paired_difference(one_a, one_b, "nndp")
    np.testing.assert_array_equal(d.mean_diff, one_a.trajectories[0].metrics["nndp"]
                                  - one_b.trajectories[0].metrics["nndp"])
    with pytest.raises(InvalidArgumentError):
        sim.compare_strategies({"a": a, "b": sim.run_ensemble(cfg(pool, C=5, K=4), 2, 99)})
    with pytest.raises(InvalidArgumentError):
        sim.compare_strategies({"a": a, "b": sim.run_ensemble(cfg(pool, C=5, K=3), 2, 2)})
