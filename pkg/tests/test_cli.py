import csv
import hashlib
import json

import numpy as np
import pytest

from fractal_langevin import io
from fractal_langevin.cli import main, parse_curve, parse_grid
from fractal_langevin.errors import SchemaError
from fractal_langevin.pipeline import (
    bundled_config,
    config_hash,
    load_config,
    parse_config,
    run_pipeline,
)

DATA_FILES = ["staircase.csv", "trajectory.csv", "ensemble.bin", "density.csv", "report.json"]


def small_config(**over):
    raw = {"schema": 1, "curve": {"motif": "koch", "depth": 5, "origin": 0.0},
           "noise": {"family": "stable", "mu": 2.0, "D": 0.5},
           "t_end": 1.0, "n_steps": 50, "n_walkers": 10_000, "seed": 17,
           "record_times": [0, 10, 25, 50], "tests": ["ks", "ecf", "moments"], "moment_q": 2}
    raw.update(over)
    return raw


def write_config(path, raw):
    path.write_text(json.dumps(raw))
    return path


@pytest.fixture(scope="module")
def bundled_runs(tmp_path_factory):
    cfg = str(bundled_config("koch-gaussian.json"))
    a, b = tmp_path_factory.mktemp("a"), tmp_path_factory.mktemp("b")
    codes = [main(["run", "--config", cfg, "--out", str(a)]),
             main(["run", "--config", cfg, "--out", str(b), "--threads", "4"])]
    return codes, a, b


def test_bundled_config_passes(bundled_runs):
    codes, a, _ = bundled_runs
    assert codes == [0, 0]
    report = json.loads((a / "report.json").read_text())
    assert report["ks"]["pass"] is True


def test_rerun_is_byte_identical(bundled_runs):
    _, a, b = bundled_runs
    for name in DATA_FILES:
        assert (a / name).read_bytes() == (b / name).read_bytes(), name


def test_manifest_lists_existing_files(bundled_runs):
    _, a, b = bundled_runs
    man = json.loads((a / "manifest.json").read_text())
    assert man["passed"] is True
    assert [f["path"] for f in man["files"]] == DATA_FILES
    for f in man["files"]:
        assert hashlib.sha256((a / f["path"]).read_bytes()).hexdigest() == f["sha256"]
    assert man["config_hash"] == json.loads((b / "manifest.json").read_text())["config_hash"]


def test_config_hash_ignores_key_order():
    raw = small_config()
    shuffled = dict(reversed(list(raw.items())))
    assert config_hash(raw) == config_hash(shuffled)
    assert config_hash(raw) != config_hash(small_config(seed=18))


def test_schema_error_names_mu(tmp_path, capsys):
    p = write_config(tmp_path / "bad.json", small_config(noise={"mu": 3, "D": 0.5}))
    with pytest.raises(SchemaError) as info:
        load_config(p)
    assert info.value.path == "noise.mu" and info.value.pointer == "/noise/mu"
    assert main(["run", "--config", str(p), "--out", str(tmp_path / "o")]) == 2
    assert "noise.mu" in capsys.readouterr().err


def test_unknown_key_is_an_error():
    with pytest.raises(SchemaError) as info:
        parse_config(small_config(noise={"mu": 2, "D": 1, "sigma": 1}))
    assert info.value.path == "noise.sigma"
    with pytest.raises(SchemaError):
        parse_config(small_config(extra=1))


@pytest.mark.parametrize("over, path", [({"record_times": [0, 51]}, "record_times"),
                                        ({"schema": 2}, "schema"),
                                        ({"n_walkers": 0}, "n_walkers"),
                                        ({"curve": {"depth": 13}}, "curve.depth")])
def test_schema_bounds(over, path):
    with pytest.raises(SchemaError) as info:
        parse_config(small_config(**over))
    assert info.value.path == path


def test_failed_report_exits_nonzero(tmp_path, capsys):
    # Gaussian KS against a mu = 1.5 ensemble must fail
    raw = small_config(noise={"mu": 1.5, "D": 0.5}, tests=["ks"])
    p = write_config(tmp_path / "c.json", raw)
    assert main(["run", "--config", str(p), "--out", str(tmp_path / "o")]) == 1
    assert "ks" in capsys.readouterr().err
    assert json.loads((tmp_path / "o" / "manifest.json").read_text())["passed"] is False


def test_run_pipeline_without_curve(tmp_path):
    raw = small_config()
    del raw["curve"]
    man = run_pipeline(write_config(tmp_path / "c.json", raw), tmp_path / "o")
    assert man.passed
    assert [f["path"] for f in man.files] == ["ensemble.bin", "density.csv", "report.json"]


def test_parse_helpers():
    np.testing.assert_allclose(parse_grid("0.1:5:20"), np.linspace(0.1, 5, 20))
    spec = parse_curve("koch:6")
    assert (spec.motif, spec.depth) == ("koch", 6)
    assert parse_curve("line").depth == 8


def test_curve_and_staircase_commands(tmp_path, capsys):
    assert main(["curve", "--depth", "3", "--emit", str(tmp_path / "p.csv")]) == 0
    assert "65 vertices" in capsys.readouterr().out
    assert main(["staircase", "--curve", "koch:6", "--emit", str(tmp_path / "s.csv")]) == 0
    assert "total mass 0.8766" in capsys.readouterr().out
    assert sum(1 for _ in open(tmp_path / "s.csv")) == 4 ** 6 + 2


def test_fourier_command(tmp_path):
    assert main(["fourier", "--curve", "koch:5", "--grid", "0:1:3", "--emit", str(tmp_path / "f.csv")]) == 0
    rows = list(csv.reader(open(tmp_path / "f.csv")))
    assert rows[0] == ["v", "re", "im"] and float(rows[1][1]) == pytest.approx(0.876603, abs=1e-6)


def test_noise_check_command(tmp_path):
    out = tmp_path / "n.csv"
    assert main(["noise-check", "--mu", "1.5", "--D", "1", "--n", "500", "--seed", "3",
                 "--ecf", "0.5:2:4", "--emit", str(out)]) == 0
    rows = list(csv.reader(open(out)))
    assert rows[0] == ["k", "re", "im", "se"] and len(rows) == 5
    assert main(["noise-check", "--mu", "1.5", "--D", "1", "--n", "5", "--seed", "3",
                 "--emit", str(out)]) == 0
    assert len(out.read_text().splitlines()) == 6


@pytest.fixture(scope="module")
def simulated(tmp_path_factory):
    d = tmp_path_factory.mktemp("sim")
    cfg = write_config(d / "c.json", small_config())
    assert main(["simulate", "--config", str(cfg), "--out", str(d / "e.bin")]) == 0
    assert main(["simulate", "--config", str(cfg), "--out", str(d / "e3.bin"), "--threads", "3"]) == 0
    return d, cfg


def test_simulate_thread_independent(simulated):
    d, _ = simulated
    assert (d / "e.bin").read_bytes() == (d / "e3.bin").read_bytes()


def test_simulate_seed_override(simulated, tmp_path):
    d, cfg = simulated
    main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "s.bin"), "--seed", "99"])
    assert (tmp_path / "s.bin").read_bytes() != (d / "e.bin").read_bytes()


def test_simulate_csv(simulated, tmp_path):
    _, cfg = simulated
    out = tmp_path / "e.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(out)]) == 0
    header = out.read_text().split("\n", 1)[0]
    assert header == "t,walker,J,winding,x,y"


@pytest.mark.parametrize("test", ["ks", "ecf", "moments"])
def test_analyze_command(simulated, test, tmp_path):
    d, cfg = simulated
    rep = tmp_path / "r.json"
    args = ["analyze", "--ensemble", str(d / "e.bin"), "--config", str(cfg), "--test", test,
            "--emit", str(rep)]
    if test == "moments":
        args += ["--q", "2"]
    assert main(args) == 0
    assert json.loads(rep.read_text())["pass"] is True


def test_analyze_density(simulated, tmp_path):
    d, _ = simulated
    out = tmp_path / "d.csv"
    assert main(["analyze", "--ensemble", str(d / "e.bin"), "--test", "density", "--mu", "2",
                 "--D", "0.5", "--emit-density", str(out)]) == 0
    assert out.read_text().startswith("J,pdf_empirical,pdf_analytic,pdf_paper_printed")


def test_analyze_wrong_model_fails(simulated, capsys):
    d, _ = simulated
    assert main(["analyze", "--ensemble", str(d / "e.bin"), "--test", "ecf", "--mu", "1",
                 "--D", "0.5", "--emit", "-"]) == 1
    assert "failed" in capsys.readouterr().err


@pytest.mark.parametrize("kind", ["density", "ecf", "msd", "trajectory2d"])
def test_emit_command(simulated, kind, tmp_path):
    d, cfg = simulated
    out = tmp_path / f"{kind}.csv"
    assert main(["emit", "--ensemble", str(d / "e.bin"), "--config", str(cfg),
                 "--kind", kind, "--out", str(out)]) == 0
    assert out.exists()


def test_emit_trajectory_without_curve_is_an_error(simulated, tmp_path, capsys):
    d, _ = simulated
    code = main(["emit", "--ensemble", str(d / "e.bin"), "--mu", "2", "--D", "0.5",
                 "--kind", "trajectory2d", "--out", str(tmp_path / "t.csv")])
    assert code == 2 and "map_to_curve" in capsys.readouterr().err


def test_ensemble_file_reloads(simulated):
    d, _ = simulated
    ens = io.read_ensemble(d / "e.bin")
    assert ens.J.shape == (4, 10_000)
    np.testing.assert_array_equal(ens.J[0], 0.0)


def test_validate_subset(capsys):
    assert main(["validate", "--only", "1,2"]) == 0
    out = capsys.readouterr().out
    assert "[PASS]  1." in out and "2/2 criteria passed" in out
