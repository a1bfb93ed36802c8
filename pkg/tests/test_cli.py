import json

import numpy as np
import pytest

from perfenvelope import SyntheticParams, generate_synthetic, read_matrix
from perfenvelope.cli import main
from perfenvelope.evaluators import (
    SplpInstance,
    cmcs_evaluator,
    enumerate_cmcs_configurations,
    sample_configurations,
)
from perfenvelope.evaluators.cmcs import DEFAULT_LIBRARY


@pytest.fixture
def synth(tmp_path):
    path = tmp_path / "m.csv"
    assert main(["synth", "--configs", "100", "--corr", "0.9", "--noise", "0.02", "--seed", "7", "-o", str(path)]) == 0
    return path


def test_synth_shape_and_golden(synth):
    lines = synth.read_text().splitlines()
    assert len(lines) == 101
    lib = generate_synthetic(SyntheticParams(100, 0.9, 0.02, 7))
    back = read_matrix(synth)
    assert [float(f"{v:.9g}") for v in lib.values[0]] == back.values[0].tolist()
    np.testing.assert_allclose(back.values, lib.values, rtol=5e-9, atol=1e-12)
    assert back.meta["seed"] == 7


def test_synth_deterministic(tmp_path, synth):
    other = tmp_path / "again.csv"
    main(["synth", "--configs", "100", "--corr", "0.9", "--noise", "0.02", "--seed", "7", "-o", str(other)])
    assert other.read_bytes() == synth.read_bytes()
    assert (tmp_path / "again.meta.json").read_bytes() == (tmp_path / "m.meta.json").read_bytes()


def test_race_metrics_pipeline(tmp_path, synth, capsys):
    r, t = tmp_path / "r.json", tmp_path / "t.json"
    assert main(["race", "--matrix", str(synth), "--pool-frac", "0.01", "--margin", "x1.2",
                 "--seed", "3", "-o", str(r)]) == 0
    assert main(["oracle", "--matrix", str(synth), "--pool-frac", "0.01", "-o", str(t)]) == 0
    capsys.readouterr()
    assert main(["metrics", "--result", str(r), "--truth", str(t)]) == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert len(out) == 1 and out[0].startswith("n_configs=100 speedup=")


def test_margin_off_pipeline(tmp_path, synth, capsys):
    r, t = tmp_path / "r.json", tmp_path / "t.json"
    main(["race", "--matrix", str(synth), "--margin", "off", "-o", str(r)])
    main(["oracle", "--matrix", str(synth), "-o", str(t)])
    capsys.readouterr()
    main(["metrics", "--result", str(r), "--truth", str(t)])
    line = capsys.readouterr().out
    assert "speedup=1.0000" in line and "overlap_top=true" in line and "overlap_pct=100.00" in line


def test_experiment_row(tmp_path, synth):
    out = tmp_path / "table.csv"
    assert main(["experiment", "--matrix", str(synth), "--repeats", "100", "--domain", "SYN", "-o", str(out)]) == 0
    header, row = out.read_text().splitlines()
    assert header == "domain,n_configs,speedup,overlap_top_pct,overlap_pct,repetitions"
    assert row.startswith("SYN,100,") and row.endswith(",100")


def test_figure_and_validate(tmp_path, synth, capsys):
    fig = tmp_path / "figure.csv"
    assert main(["figure", "--matrix", str(synth), "--fractions", "0.01,0.05", "-o", str(fig)]) == 0
    r, t = tmp_path / "r.json", tmp_path / "t.json"
    main(["race", "--matrix", str(synth), "-o", str(r)])
    main(["oracle", "--matrix", str(synth), "-o", str(t)])
    capsys.readouterr()
    assert main(["validate", str(synth), str(fig), str(r), str(t), str(tmp_path / "m.meta.json")]) == 0
    kinds = [line.split()[1] for line in capsys.readouterr().out.splitlines()]
    assert kinds == ["matrix", "figure", "result", "truth", "meta"]


def test_splp_gen_and_trace(tmp_path):
    d = tmp_path / "inst"
    assert main(["splp", "gen", "--facilities", "30", "--customers", "60", "--instances", "10",
                 "--seed", "1", "-o", str(d)]) == 0
    files = sorted(d.glob("*.json"))
    assert len(files) == 10
    assert [SplpInstance.load(f).seed for f in files] == list(range(1, 11))
    assert main(["validate", *map(str, files)]) == 0

    small = tmp_path / "small"
    main(["splp", "gen", "--facilities", "8", "--customers", "12", "--instances", "2", "--seed", "4", "-o", str(small)])
    m = tmp_path / "cmcs.csv"
    assert main(["splp", "trace", "--instances", str(small), "--library-size", "2", "--configs", "40",
                 "--seed", "9", "-o", str(m)]) == 0
    assert main(["validate", str(m)]) == 0
    # cross-check against direct library calls
    lib = DEFAULT_LIBRARY[:2]
    cfgs = sample_configurations(enumerate_cmcs_configurations(lib), 40, 9)
    insts = [SplpInstance.load(f) for f in sorted(small.glob("*.json"))]
    direct = cmcs_evaluator(insts, cfgs, library=lib).matrix
    np.testing.assert_allclose(read_matrix(m).values, direct.values, rtol=5e-9, atol=1e-12)


def test_exit_codes(tmp_path, synth, capsys):
    assert main(["synth"]) == 2
    assert main(["race", "--matrix", str(synth), "--margin", "x0.5"]) == 2
    assert main(["race", "--matrix", str(tmp_path / "missing.csv")]) == 3
    bad = tmp_path / "bad.csv"
    bad.write_text("config_id,t_1,t_2\n0,0.5\n")
    assert main(["validate", str(bad)]) == 3
    # schedule / size mismatch between result and truth
    other = tmp_path / "other.csv"
    main(["synth", "--configs", "50", "-o", str(other)])
    r, t = tmp_path / "r.json", tmp_path / "t.json"
    main(["race", "--matrix", str(synth), "-o", str(r)])
    main(["oracle", "--matrix", str(other), "-o", str(t)])
    capsys.readouterr()
    assert main(["metrics", "--result", str(r), "--truth", str(t)]) == 3
    err = capsys.readouterr().err
    assert str(r) in err and str(t) in err


def test_global_seed_position(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    main(["--seed", "5", "synth", "--configs", "20", "-o", str(a)])
    main(["synth", "--configs", "20", "--seed", "5", "-o", str(b)])
    assert a.read_bytes() == b.read_bytes()
    assert json.loads((tmp_path / "a.meta.json").read_text())["provenance"]["seed"] == 5
