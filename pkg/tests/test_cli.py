import csv
import hashlib
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from bccr.channel import load_channel
from bccr.cli import main
from bccr.distribution import load_distribution
from bccr.linear_systems import LinearConstraint, LinearSystem
from bccr.region import compute_profile, membership, vertices
from bccr.simulator import SimConfig, load_sim_config, run_experiment


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def read_region(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    rows = list(csv.reader(io.StringIO("\n".join(body))))
    header, rows = rows[0], rows[1:]
    names = header[: header.index("relation")]
    constraints = [LinearConstraint(dict(zip(names, map(int, r[: len(names)]))), float(r[len(names) + 1])) for r in rows]
    return LinearSystem(tuple(names), tuple(constraints))


def test_region_of_degenerate_dist_is_origin(samples, tmp_path, capsys):
    out = tmp_path / "region.csv"
    code, _, _ = run(["region", samples / "orthogonal_channel.json", samples / "degenerate_dist.json", "--out", out], capsys)
    assert code == 0
    pts = vertices(read_region(out.read_text()))
    assert len(pts) == 1 and np.abs(pts).max() <= 1e-12
    assert (tmp_path / "region.profile.json").exists()


def test_region_output_is_reproducible(samples, tmp_path, capsys):
    args = ["region", samples / "random_channel.json", samples / "random_dist.json", "--variant", "nocm", "--seed", 4]
    first = run(args, capsys)[1]
    second = run(args, capsys)[1]
    assert first == second
    assert "# seed: 4" in first
    digest = hashlib.sha256((samples / "random_dist.json").read_bytes()).hexdigest()
    assert digest in first


def test_profile_constants_match_recomputation(samples, tmp_path, capsys):
    profile_path = tmp_path / "p.json"
    run(["region", samples / "random_channel.json", samples / "random_dist.json", "--profile-out", profile_path], capsys)
    written = json.loads(profile_path.read_text())["profile"]
    expected = compute_profile(load_distribution(samples / "random_dist.json"), load_channel(samples / "random_channel.json"))
    got = np.array([written[k] for k in expected.SCALARS] + written["iy1"] + written["iy2"])
    assert np.abs(got - expected.as_vector()).max() <= 1e-11


def test_missing_file(samples, capsys):
    code, _, err = run(["region", samples / "nope.json", samples / "random_dist.json"], capsys)
    assert code == 2 and "nope.json" in err


def test_invalid_json(samples, tmp_path, capsys):
    bad = tmp_path / "broken.json"
    bad.write_text("{not json")
    code, _, err = run(["region", bad, samples / "random_dist.json"], capsys)
    assert code == 2 and "broken.json" in err


def test_check_verdicts(samples, capsys):
    chan, dist = samples / "orthogonal_channel.json", samples / "degenerate_dist.json"
    code, out, _ = run(["check", chan, dist, "--point", "0,0,0"], capsys)
    assert code == 0 and json.loads(out)["verdict"] == "in"
    code, out, _ = run(["check", chan, dist, "--point", "5,5,5"], capsys)
    report = json.loads(out)
    assert code == 0 and report["verdict"] == "out" and report["violated"]


def test_check_agrees_with_membership(samples, capsys):
    chan, dist = samples / "orthogonal_channel.json", samples / "orthogonal_hk_dist.json"
    profile = compute_profile(load_distribution(dist), load_channel(chan))
    for point in [(0.0, 1.0, 1.0), (0.0, 1.0, 1.0 + 1e-4), (0.0, 0.5, 0.999)]:
        _, out, _ = run(["check", chan, dist, "--variant", "nocm", "--point", ",".join(map(str, point))], capsys)
        assert (json.loads(out)["verdict"] == "in") == membership(point[1:], profile, "nocm")


def test_compare_report(samples, capsys):
    _, out, _ = run(["compare", samples / "orthogonal_channel.json", samples / "degenerate_dist.json"], capsys)
    report = json.loads(out)
    assert all(r["violations"] == 0 for r in report["inclusions"])
    _, out, _ = run(["compare", samples / "random_channel.json", samples / "random_dist.json"], capsys)
    first = json.loads(out)["inclusions"][0]
    assert first["inner"] == "jiang" and first["violations"] == 0


def test_simulate_matches_engine(samples, capsys):
    args = [samples / "noiseless_broadcast_channel.json", samples / "wb_uniform_dist.json", samples / "sim_separation.json"]
    _, out, _ = run(["simulate", *args, "--trials", 30, "--seed", 2], capsys)
    report = json.loads(out)
    config = SimConfig(**{**load_sim_config(args[2]).to_json(), "trials": 30, "seed": 2})
    expected = run_experiment(load_distribution(args[1]), load_channel(args[0]), config)
    assert report["report"] == pytest.approx(expected.to_json())
    assert report["seed"] == 2 and set(report["inputs"]) == {"channel", "dist", "sim"}


def test_maccm_outputs(samples, tmp_path, capsys):
    dot = tmp_path / "plan.dot"
    _, out, _ = run(["maccm", samples / "mac_network.json", "--dot", dot], capsys)
    graph = json.loads(out)["graph"]
    assert len(graph["nodes"]) == 3 and len(graph["edges"]) == 2
    text = dot.read_text()
    assert text.startswith("// command: maccm") and "digraph" in text


def test_boundary_csv(samples, capsys):
    _, out, _ = run(["boundary", samples / "orthogonal_channel.json", "--variant", "nocm", "--budget", 20, "--sizes", "U1=2,V2=2"], capsys)
    rows = [r for r in csv.reader(io.StringIO(out)) if r and not r[0].startswith("#")]
    assert rows[0] == ["r0", "r1", "r2", "seed_index"]
    assert all(float(r[0]) == 0.0 for r in rows[1:])


def test_bad_sizes(samples, capsys):
    code, _, err = run(["boundary", samples / "orthogonal_channel.json", "--sizes", "U1"], capsys)
    assert code == 2 and "--sizes" in err


def test_console_entry_point(samples):
    proc = subprocess.run(
        [sys.executable, "-m", "bccr.cli", "maccm", str(samples / "bccr_network.json")], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "maccm"
