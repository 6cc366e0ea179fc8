import csv
import json
from pathlib import Path

import pytest

from pareto_al import results
from pareto_al.cli import main

CONFIG = """\
dataset:
  synthetic: {{case: bat, n: 40, seed: 1}}
strategies: [random, mpnd]
surrogate: {{n_trees: 8}}
C: 5
K: {K}
R: 2
master_seed: 3
output_dir: runs
"""


def _files(d: Path) -> dict[str, bytes]:
    return {str(p.relative_to(d)): p.read_bytes() for p in sorted(d.rglob("*")) if p.is_file()}


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


@pytest.fixture
def run_dir(tmp_path):
    (tmp_path / "exp.yaml").write_text(CONFIG.format(K=4))
    assert main(["run", "--config", str(tmp_path / "exp.yaml")]) == 0
    return tmp_path / "runs"


def test_generate(tmp_path, capsys):
    assert main(["generate", "--case", "linear", "--n", "500", "--seed", "42",
                 "--out", str(tmp_path / "a")]) == 0
    assert "frontier=" in capsys.readouterr().out
    assert sorted(_files(tmp_path / "a")) == ["features.csv", "metadata.json", "outputs.csv"]
    main(["generate", "--case", "linear", "--n", "500", "--seed", "42", "--out", str(tmp_path / "b")])
    assert _files(tmp_path / "a") == _files(tmp_path / "b")


def test_generate_env_default(tmp_path, monkeypatch):
    monkeypatch.setenv("PARETO_AL_OUTPUT_DIR", str(tmp_path / "env"))
    assert main(["generate", "--case", "circular", "--n", "20"]) == 0
    assert (tmp_path / "env" / "outputs.csv").is_file()


def test_generate_usage_errors(tmp_path, monkeypatch):
    monkeypatch.delenv("PARETO_AL_OUTPUT_DIR", raising=False)
    with pytest.raises(SystemExit) as e:
        main(["generate", "--case", "spiral", "--out", str(tmp_path)])
    assert e.value.code == 2
    assert main(["generate", "--case", "bat"]) == 2
    assert main(["generate", "--case", "bat", "--n", "1", "--out", str(tmp_path)]) == 2


def test_generate_unwritable(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["generate", "--case", "bat", "--n", "10", "--out", str(blocker / "sub")]) == 1


def test_run_writes_trajectories(run_dir):
    traj = sorted(p.name for p in (run_dir / "trajectories").iterdir())
    assert traj == ["mpnd_run001.csv", "mpnd_run002.csv", "random_run001.csv", "random_run002.csv"]
    manifest = json.loads((run_dir / "manifest.json").read_text())
    assert manifest["config"]["strategies"][1]["name"] == "mpnd"
    assert len(manifest["runs"]) == 2
    header = next(csv.reader(open(run_dir / "trajectories" / traj[0])))
    assert header == ["iteration", "acquired_index", "nndp", "mean_stratum", "mnde_global",
                      "mnde_shell", "nde_1_global", "nde_2_global", "nde_1_shell", "nde_2_shell"]


def test_run_is_reproducible_and_thread_independent(run_dir, tmp_path):
    again = tmp_path / "again"
    assert main(["run", "--config", str(tmp_path / "exp.yaml"), "--out", str(again),
                 "--threads", "2"]) == 0
    assert _files(run_dir) == _files(again)


def test_run_validation_errors(tmp_path, capsys):
    (tmp_path / "bad.yaml").write_text(CONFIG.format(K=36))
    assert main(["run", "--config", str(tmp_path / "bad.yaml")]) == 2
    assert "K <= n - C" in capsys.readouterr().err
    (tmp_path / "extra.yaml").write_text(CONFIG.format(K=2) + "colour: red\n")
    assert main(["run", "--config", str(tmp_path / "extra.yaml")]) == 2
    assert "colour" in capsys.readouterr().err
    (tmp_path / "dupe.yaml").write_text(CONFIG.format(K=2).replace("[random, mpnd]", "[pnd, mpnd]"))
    assert main(["run", "--config", str(tmp_path / "dupe.yaml")]) == 2
    assert main(["run", "--config", str(tmp_path / "missing.yaml")]) == 2


def test_aggregate(run_dir, tmp_path):
    agg = tmp_path / "agg"
    assert main(["aggregate", "--in", str(run_dir), "--out", str(agg)]) == 0
    dens = _read(agg / "density.csv")
    for s in ("random", "mpnd"):
        assert sum(int(r[f"count_{s}"]) for r in dens) == 2 * 4
    comp = _read(agg / "comparison.csv")
    assert {(r["strategy_a"], r["strategy_b"]) for r in comp} == {("random", "mpnd")}


def test_aggregate_r1_matches_run(tmp_path):
    (tmp_path / "one.yaml").write_text(CONFIG.format(K=3).replace("R: 2", "R: 1"))
    assert main(["run", "--config", str(tmp_path / "one.yaml")]) == 0
    assert main(["aggregate", "--in", str(tmp_path / "runs"), "--out", str(tmp_path / "agg")]) == 0
    traj = _read(tmp_path / "runs" / "trajectories" / "random_run001.csv")
    summ = [r for r in _read(tmp_path / "agg" / "summary.csv")
            if r["strategy"] == "random" and r["metric"] == "mnde_global"]
    assert [r["mean"] for r in summ] == [r["mnde_global"] for r in traj]


def test_aggregate_permutation_invariant(run_dir, tmp_path):
    main(["aggregate", "--in", str(run_dir), "--out", str(tmp_path / "a1")])
    mpath = run_dir / "manifest.json"
    manifest = json.loads(mpath.read_text())
    manifest["files"].reverse()
    mpath.write_text(json.dumps(manifest))
    main(["aggregate", "--in", str(run_dir), "--out", str(tmp_path / "a2")])
    assert _files(tmp_path / "a1") == _files(tmp_path / "a2")


def test_aggregate_rejects_mixed_runs(run_dir, tmp_path):
    (tmp_path / "other.yaml").write_text(CONFIG.format(K=4).replace("master_seed: 3", "master_seed: 4"))
    main(["run", "--config", str(tmp_path / "other.yaml"), "--out", str(tmp_path / "o")])
    src = tmp_path / "o" / "trajectories" / "random_run001.csv"
    (run_dir / "trajectories" / "random_run001.csv").write_bytes(src.read_bytes())
    assert main(["aggregate", "--in", str(run_dir), "--out", str(tmp_path / "agg")]) == 2
    (run_dir / "trajectories" / "stray_run001.csv").write_text("x\n")
    assert main(["aggregate", "--in", str(run_dir), "--out", str(tmp_path / "agg")]) == 2


def test_report(run_dir, tmp_path):
    agg, rep = tmp_path / "agg", tmp_path / "rep"
    main(["aggregate", "--in", str(run_dir), "--out", str(agg)])
    assert main(["report", "--in", str(agg), "--out", str(rep)]) == 0
    err = results.read_curves(rep / "error_curves.csv")
    assert {(r["strategy"], r["scope"]) for r in err} == {
        (s, sc) for s in ("random", "mpnd") for sc in ("global", "shell")}
    disc = results.read_curves(rep / "discovery_curves.csv")
    assert {r["metric"] for r in disc} == {"nndp", "mean_stratum"}
    first = _files(rep)
    assert main(["report", "--in", str(agg), "--out", str(rep)]) == 0
    assert _files(rep) == first


def test_report_empty_dir(tmp_path):
    (tmp_path / "empty").mkdir()
    assert main(["report", "--in", str(tmp_path / "empty"), "--out", str(tmp_path / "r")]) == 2


def test_report_plots(run_dir, tmp_path):
    pytest.importorskip("matplotlib")
    agg, rep = tmp_path / "agg", tmp_path / "rep"
    main(["aggregate", "--in", str(run_dir), "--out", str(agg)])
    assert main(["report", "--in", str(agg), "--out", str(rep), "--plots"]) == 0
    assert (rep / "discovery.png").stat().st_size > 0
