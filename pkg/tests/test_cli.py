import json
import subprocess
import sys

import pytest

PY = [sys.executable, "-m", "plandiv.cli"]


def run_cli(*args):
    res = subprocess.run(PY + list(args), capture_output=True, text=True, timeout=600)
    assert res.returncode == 0, res.stderr
    return res.stdout


def stats_of(out):
    data = json.loads(out)
    data.pop("timing_ms")
    return data


@pytest.fixture(scope="module")
def grid_file(tmp_path_factory):
    path = tmp_path_factory.mktemp("cli") / "grid.graph"
    run_cli("gen", "--kind", "grid", "--n", "256", "--seed", "3", "--out", str(path))
    return str(path)


def test_gen_deterministic(tmp_path):
    p1, p2 = tmp_path / "a.graph", tmp_path / "b.graph"
    o1 = run_cli("gen", "--kind", "delaunay", "--n", "80", "--seed", "5", "--out", str(p1))
    o2 = run_cli("gen", "--kind", "delaunay", "--n", "80", "--seed", "5", "--out", str(p2))
    assert p1.read_bytes() == p2.read_bytes()
    s1, s2 = stats_of(o1), stats_of(o2)
    s1["metrics"].pop("path"), s2["metrics"].pop("path")
    assert s1 == s2


def test_cut_command_and_thread_determinism(grid_file):
    base = stats_of(run_cli("cut", "--graph", grid_file, "--s", "16", "--seed", "2"))
    again = stats_of(run_cli("cut", "--graph", grid_file, "--s", "16", "--seed", "2"))
    threaded = stats_of(
        run_cli("cut", "--graph", grid_file, "--s", "16", "--seed", "2", "--threads", "8")
    )
    assert base == again
    threaded["config"].pop("graph"), base["config"].pop("graph")
    threaded.pop("config"), base.pop("config")
    assert base == threaded


def test_divide_command(grid_file):
    out = stats_of(
        run_cli("divide", "--graph", grid_file, "--r", "64", "--s", "4",
                "--seed", "1", "--verify")
    )
    assert "max_region_boundary" in out["metrics"]
    out2 = stats_of(
        run_cli("divide", "--graph", grid_file, "--r", "64", "--s", "4",
                "--seed", "1", "--verify")
    )
    assert out == out2


def test_estimate_command(tmp_path):
    soup = tmp_path / "soup.graph"
    run_cli("gen", "--kind", "path_soup", "--n", "200", "--verts-per-path", "2",
            "--seed", "1", "--out", str(soup))
    o1 = stats_of(run_cli("estimate", "--graph", str(soup), "--param", "matching",
                          "--eps", "0.2", "--seed", "3", "--trials", "2"))
    o2 = stats_of(run_cli("estimate", "--graph", str(soup), "--param", "matching",
                          "--eps", "0.2", "--seed", "3", "--trials", "2"))
    assert o1 == o2
    assert len(o1["metrics"]["estimates"]) == 2


def test_mpc_command_determinism(grid_file):
    o1 = stats_of(run_cli("mpc", "--graph", grid_file, "--algo", "mst",
                          "--seed", "4", "--slack", "128"))
    o2 = stats_of(run_cli("mpc", "--graph", grid_file, "--algo", "mst",
                          "--seed", "4", "--slack", "128"))
    assert o1 == o2
    o3 = stats_of(run_cli("mpc", "--graph", grid_file, "--algo", "stpath",
                          "--seed", "4", "--slack", "128", "--args", "s=0,t=255"))
    assert o3["metrics"]["result"]["length"] > 0


def test_emst_command(tmp_path):
    import random

    rng = random.Random(0)
    csv = tmp_path / "pts.csv"
    csv.write_text("".join(f"{rng.uniform(0,10)},{rng.uniform(0,10)}\n" for _ in range(60)))
    o1 = stats_of(run_cli("emst", "--points", str(csv), "--seed", "2", "--check-brute"))
    assert o1["metrics"]["matches_bruteforce"] is True
    o2 = stats_of(run_cli("emst", "--points", str(csv), "--seed", "2", "--check-brute"))
    assert o1 == o2
