import json

import numpy as np
import pytest

from dynpr import io as dio
from dynpr.cli import main

from .conftest import FOUR_A, FOUR_EDGES, FOUR_S_MAGNITUDE, dense_transition


@pytest.fixture
def graph(tmp_path):
    f = tmp_path / "graph.txt"
    f.write_bytes(FOUR_EDGES)
    return str(f)


def run(*argv):
    return main([str(a) for a in argv])


def read_csv(path):
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        return header, np.loadtxt(fh, delimiter=",", ndmin=2)


def test_static(graph, tmp_path):
    out = tmp_path / "s"
    assert run("static", "--graph", graph, "--out", out) == 0
    header, data = read_csv(out / "static.csv")
    assert header == ["node", "score"]
    assert data[:, 0].tolist() == [0, 1, 2, 3]
    oracle = np.linalg.solve(np.eye(4) - 0.85 * dense_transition(FOUR_A), np.full(4, 0.0375))
    np.testing.assert_allclose(data[:, 1], oracle, atol=1e-10)
    assert abs(data[:, 1].sum() - 1) <= 1e-10
    m = json.loads((out / "manifest.json").read_text())
    assert m["command"] == "static" and m["format_version"] == dio.FORMAT_VERSION


def test_static_alpha_zero_uses_activity(graph, tmp_path):
    act = tmp_path / "a.csv"
    act.write_text("node,epoch,count\n0,0,1\n1,0,3\n")
    out = tmp_path / "s"
    assert run("static", "--graph", graph, "--activity", act, "--alpha", 0, "--out", out) == 0
    _, data = read_csv(out / "static.csv")
    np.testing.assert_array_equal(data[:, 1], [0.25, 0.75, 0, 0])


def test_exit_codes(graph, tmp_path, capsys):
    out = tmp_path / "o"
    assert run("static", "--graph", tmp_path / "missing.txt", "--out", out) == 2
    assert "error" in capsys.readouterr().err
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n1 x\n")
    assert run("static", "--graph", bad, "--out", out) == 2
    assert "line 2" in capsys.readouterr().err
    assert run("evolve", "--graph", graph, "--tmax", 5, "--method", "euler", "--step", 1.5, "--out", out) == 1
    assert "2/(1+alpha)" in capsys.readouterr().err
    assert run("evolve", "--graph", graph, "--tmax", 5, "--theta", 0, "--out", out) == 1
    assert run("oscillate", "--graph", graph, "--k", 1, "--out", out) == 1
    assert run("static", "--graph", graph, "--alpha", 1.2, "--out", out) == 1
    assert run("evolve", "--graph", graph, "--tmax", 5, "--initial", "uniform", "--rtol", 1e-30,
               "--atol", 1e-300, "--out", out) == 3
    assert "underflow" in capsys.readouterr().err
    with pytest.raises(SystemExit) as exc:
        run("bogus")
    assert exc.value.code == 1


def test_evolve_constant_activity_matches_static(graph, tmp_path):
    act = tmp_path / "a.csv"
    act.write_text("node,epoch,count\n0,0,1\n1,0,1\n2,0,1\n3,0,1\n")
    assert run("static", "--graph", graph, "--out", tmp_path / "s") == 0
    assert run("evolve", "--graph", graph, "--activity", act, "--tmax", 50, "--initial", "uniform",
               "--grid", 1, "--out", tmp_path / "e") == 0
    traj = dio.read_trajectory(tmp_path / "e" / "trajectory.csv")
    x = dio.read_scores(tmp_path / "s" / "static.csv", "score")
    assert np.abs(traj.states[-1] - x).sum() <= 1e-6
    summary = json.loads((tmp_path / "e" / "summary.json").read_text())
    assert summary["max_sum_drift"] <= 1e-8


def test_evolve_epoch_grid_scales_with_timescale(graph, tmp_path):
    act = tmp_path / "a.csv"
    act.write_text("node,epoch,count\n0,0,1\n1,1,1\n2,2,1\n3,3,1\n")
    for s in (1, 2):
        assert run("evolve", "--graph", graph, "--activity", act, "--timescale", s,
                   "--grid", "epochs", "--out", tmp_path / f"e{s}") == 0
    t1 = dio.read_trajectory(tmp_path / "e1" / "trajectory.csv")
    t2 = dio.read_trajectory(tmp_path / "e2" / "trajectory.csv")
    np.testing.assert_array_equal(t1.times, [0, 1, 2, 3, 4])
    np.testing.assert_array_equal(t2.times, 2 * t1.times)
    assert t1.states.shape == t2.states.shape


def test_ranks_and_topk(graph, tmp_path):
    assert run("evolve", "--graph", graph, "--tmax", 5, "--out", tmp_path / "e") == 0
    traj_path = tmp_path / "e" / "trajectory.csv"
    assert run("ranks", "--trajectory", traj_path, "--transient", 2.5, "--topk", 2, "--out", tmp_path / "r") == 0
    header, data = read_csv(tmp_path / "r" / "ranks.csv")
    assert header == ["node", "cumulative", "variance", "difference", "transient@2.5"]
    # uniform teleportation from its own PageRank is an equilibrium
    np.testing.assert_allclose(data[:, 2:4], 0, atol=1e-9)
    topk = (tmp_path / "r" / "topk.csv").read_text().splitlines()
    assert topk[0] == "rank,cumulative,variance,difference,transient@2.5" and len(topk) == 3


def test_ranks_oscillation_difference(graph, tmp_path):
    assert run("oscillate", "--graph", graph, "--k", 4, "--grid", 0.01, "--out", tmp_path / "o") == 0
    rep = json.loads((tmp_path / "o" / "oscillate.json").read_text())
    np.testing.assert_allclose(rep["difference"], 2 * np.array(rep["amplitude"]), atol=5e-3)


def test_ranks_short_trajectory(tmp_path):
    f = tmp_path / "t.csv"
    f.write_text("t,node,score\n0,0,0.5\n0,1,0.5\n")
    assert run("ranks", "--trajectory", f, "--out", tmp_path / "r") == 1


def test_isim(tmp_path):
    a = tmp_path / "a.csv"
    b = tmp_path / "b.csv"
    dio.write_scores(a, {"score": [3.0, 2.0, 1.0]})
    dio.write_scores(b, {"score": [1.0, 2.0, 3.0]})
    assert run("isim", "--scores-a", a, "--scores-b", a, "--out", tmp_path / "i") == 0
    _, d = read_csv(tmp_path / "i" / "isim.csv")
    np.testing.assert_array_equal(d[:, 1], 0)
    assert run("isim", "--scores-a", a, "--scores-b", b, "--out", tmp_path / "i") == 0
    _, d = read_csv(tmp_path / "i" / "isim.csv")
    np.testing.assert_allclose(d[:, 1], [1.0, 0.75, 0.5])
    assert run("isim", "--scores-a", a, "--scores-b", b, "--topk", 4, "--out", tmp_path / "i") == 1


def test_oscillate_report(graph, tmp_path, capsys):
    assert run("oscillate", "--graph", graph, "--k", 4, "--out", tmp_path / "o") == 0
    printed = capsys.readouterr().out
    assert "0.0216 0.0261 0.0122 0.0235" in printed
    rep = json.loads((tmp_path / "o" / "oscillate.json").read_text())
    np.testing.assert_array_equal(np.round(rep["amplitude"], 4), FOUR_S_MAGNITUDE)
    assert rep["max_gap_inf"] <= 1e-3


def test_oscillate_identical_columns(graph, tmp_path):
    cols = tmp_path / "v.csv"
    cols.write_text("node,epoch,count\n" + "".join(f"{i},{j},{i + 1}\n" for i in range(4) for j in range(3)))
    assert run("oscillate", "--graph", graph, "--teleport-columns", cols, "--out", tmp_path / "o") == 0
    rep = json.loads((tmp_path / "o" / "oscillate.json").read_text())
    assert max(rep["amplitude"]) <= 1e-15


def test_predict(tmp_path):
    d = tmp_path / "fx"
    assert run("synth", "graph", "--seed", 3, "--nodes", 60, "--edges", 300, "--out", d) == 0
    assert run("synth", "diffusion", "--seed", 4, "--graph", d / "graph.txt", "--epochs", 24, "--out", d) == 0
    out = tmp_path / "p"
    assert run("predict", "--graph", d / "graph.txt", "--activity", d / "activity.csv",
               "--theta", "none,1", "--cohort", 20, "--out", out) == 0
    rep = json.loads((out / "predict.json").read_text())
    assert [r["theta"] for r in rep["results"]] == [None, 1.0]
    for c in rep["results"][0]["cohorts"].values():
        assert c["ratio"] < 1
    assert run("predict", "--graph", d / "graph.txt", "--activity", d / "activity.csv",
               "--window", 30, "--out", out) == 1


def test_synth_requires_seed(tmp_path):
    with pytest.raises(SystemExit) as exc:
        run("synth", "graph", "--out", tmp_path)
    assert exc.value.code == 1


def test_determinism_and_replay(graph, tmp_path):
    act = tmp_path / "a.csv"
    act.write_text("node,epoch,count\n0,0,5\n1,1,2\n2,1,1\n3,2,4\n")
    args = ["evolve", "--graph", graph, "--activity", act, "--theta", 2, "--grid", 0.05]
    assert run(*args, "--out", tmp_path / "r1") == 0
    assert run(*args, "--out", tmp_path / "r2") == 0
    a = (tmp_path / "r1" / "trajectory.csv").read_bytes()
    assert a == (tmp_path / "r2" / "trajectory.csv").read_bytes()
    assert run("replay", tmp_path / "r1" / "manifest.json", "--out", tmp_path / "r3") == 0
    assert (tmp_path / "r3" / "trajectory.csv").read_bytes() == a
    assert (tmp_path / "r3" / "summary.json").read_bytes() == (tmp_path / "r1" / "summary.json").read_bytes()
    # a modified input invalidates the manifest
    act.write_text("node,epoch,count\n0,0,1\n")
    assert run("replay", tmp_path / "r1" / "manifest.json", "--out", tmp_path / "r4") == 1


def test_trajectory_round_trip(tmp_path):
    from dynpr.integrate import Trajectory

    t = Trajectory([0.0, 0.1, 0.3], np.random.default_rng(0).random((3, 5)))
    dio.write_trajectory(tmp_path / "t.csv", t)
    back = dio.read_trajectory(tmp_path / "t.csv")
    np.testing.assert_array_equal(back.times, t.times)
    np.testing.assert_array_equal(back.states, t.states)
