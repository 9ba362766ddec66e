import io
import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from affine_rag import bench, cli
from affine_rag.cloud_io import load_cloud, write_cloud
from affine_rag.consensus import Mode
from affine_rag.errors import EmptyFile, ParseError
from affine_rag.metrics import MetricsRecord
from affine_rag.pipeline import rag_register
from affine_rag.synth import ScenarioConfig, make_scenario

SVG = "{http://www.w3.org/2000/svg}"


def svg_elements(path, tag, cls):
    root = ET.parse(path).getroot()
    return [e for e in root.iter() if e.tag in (tag, SVG + tag) and e.get("class") == cls]


# ---------------------------------------------------------------- cloud files

def test_load_cloud_basic(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("0 0 0\n1 1 1\n")
    x = load_cloud(p)
    assert x.shape == (3, 2)
    np.testing.assert_array_equal(x[:, 1], [1, 1, 1])


def test_load_cloud_comments_and_blanks(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("# header\n\n1 2   # trailing\n3 4\n")
    np.testing.assert_array_equal(load_cloud(p), [[1, 3], [2, 4]])


def test_load_cloud_inconsistent_width(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("0 0 0\n1 1 1\n2 2\n")
    with pytest.raises(ParseError) as info:
        load_cloud(p)
    assert info.value.lineno == 3
    assert "line 3" in str(info.value)


def test_load_cloud_non_numeric(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("1 2\nx 3\n")
    with pytest.raises(ParseError) as info:
        load_cloud(p)
    assert info.value.lineno == 2


def test_load_cloud_empty(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("# nothing\n\n")
    with pytest.raises(EmptyFile):
        load_cloud(p)


def test_cloud_round_trip(tmp_path, rng):
    x = rng.standard_normal((3, 50)) * 1e3
    p = tmp_path / "c.txt"
    write_cloud(p, x)
    assert np.max(np.abs(load_cloud(p) - x)) <= 1e-12
    assert b"\r" not in p.read_bytes()


# ---------------------------------------------------------------- grids

def test_exact_single_cell_grid():
    grid = bench.GridSpec(sigmas=[0.0], lambdas=[1.0], batch=1, n=20, trials=64)
    (rec,) = bench.run_grid(grid)
    assert rec.delta_L <= 1e-6
    assert rec.d_sigma == 0.0 and rec.d_lambda == 0.0


def test_default_grid_shape():
    grid = bench.GridSpec(batch=1, n=10, trials=1)
    buf = io.StringIO()
    records = bench.run_grid(grid, out=buf)
    lines = buf.getvalue().split("\n")
    assert len(records) == 48
    assert lines[-1] == "" and len(lines) == 50
    assert lines[0] == "sigma,lambda,d_sigma,d_lambda,delta_L,delta_Y,delta_X"
    # grid order: sigma outer, lambda inner
    assert [(r.sigma, r.lambda_) for r in records[:3]] == [(0.0, 1.0), (0.0, 0.95), (0.0, 0.90)]


def test_csv_format():
    rec = MetricsRecord(0.05, 0.9, 0.0381234567, 0.3, 1e-9, 2.5, 10.0)
    text = bench.format_csv([rec])
    assert text.endswith("\n") and "\r" not in text
    assert text.splitlines()[1] == "0.050000,0.900000,0.038123,0.300000,0.000000,2.500000,10.000000"


SMALL = bench.GridSpec(sigmas=[0.0, 0.1], lambdas=[1.0, 0.8], batch=2, n=20, trials=16, master_seed=7)


def _csv(grid, workers):
    buf = io.StringIO()
    bench.run_grid(grid, out=buf, workers=workers)
    return buf.getvalue()


def test_grid_rerun_identical():
    assert _csv(SMALL, 1) == _csv(SMALL, 1)


@pytest.mark.parametrize("workers", [4, 8])
def test_grid_worker_count_independent(workers):
    assert _csv(SMALL, workers) == _csv(SMALL, 1)


def test_grid_seed_changes_output():
    other = bench.GridSpec(**{**SMALL.__dict__, "master_seed": 8})
    assert _csv(other, 1) != _csv(SMALL, 1)


def test_failed_cell_recorded_as_nan():
    def flaky(x, y, opts):
        if x.shape[1] < y.shape[1]:
            raise ValueError("synthetic failure")
        return rag_register(x, y, opts)

    grid = bench.GridSpec(sigmas=[0.0], lambdas=[1.0, 0.5], batch=1, n=12, trials=4)
    buf = io.StringIO()
    full, partial = bench.run_grid(grid, out=buf, registrar=flaky)
    assert not math.isnan(full.delta_L)
    assert math.isnan(partial.delta_L) and math.isnan(partial.delta_X)
    assert buf.getvalue().splitlines()[2].startswith("0.000000,0.500000,nan")


def test_registrar_seam_receives_every_item():
    calls = []

    def spy(x, y, opts):
        calls.append(opts.trials)
        return rag_register(x, y, opts)

    grid = bench.GridSpec(sigmas=[0.0, 0.1], lambdas=[1.0], batch=3, n=10, trials=2)
    bench.run_grid(grid, registrar=spy)
    assert calls == [2] * 6


def test_specimen_grid(rng):
    specimen = rng.random((3, 25))
    grid = bench.GridSpec(sigmas=[0.0], lambdas=[0.8], batch=1, trials=4, specimen=specimen)
    (rec,) = bench.run_grid(grid)
    assert rec.d_lambda > 0


def test_derive_seed_distinct():
    seeds = {bench.derive_seed(0, i, j, b, r) for i in range(3) for j in range(3)
             for b in range(3) for r in range(2)}
    assert len(seeds) == 54


# ---------------------------------------------------------------- mode study

def test_mode_study_default_shape():
    assert len(bench.MODE_STUDY_SIGMAS) == 5 and len(bench.MODE_STUDY_TRIALS) == 6
    assert bench.MODE_STUDY_TRIALS[0] == 32 and bench.MODE_STUDY_TRIALS[-1] == 1024


def test_mode_study_smoke(tmp_path):
    study = bench.run_mode_study(n=12, sigmas=[0.05, 0.1], trial_counts=[4, 2], batch=1)
    assert study.trial_counts == [2, 4]
    for mode in (Mode.BEST, Mode.WEIGHTED):
        lines = study.to_csv(mode).splitlines()
        assert lines[0] == "sigma,trials,delta_L,delta_Y,delta_X,delta_H"
        assert len(lines) == 5
    paths = bench.write_mode_study_outputs(study, tmp_path)
    svgs = [p for p in paths if p.endswith(".svg")]
    assert len(svgs) == 4
    for p in svgs:
        assert len(svg_elements(p, "rect", "cell")) == 2 * 2 * 2


def test_mode_study_prefix_equals_separate_run():
    study = bench.run_mode_study(n=15, sigmas=[0.05], trial_counts=[8, 16], batch=2, master_seed=3)
    short = bench.run_mode_study(n=15, sigmas=[0.05], trial_counts=[8], batch=2, master_seed=3)
    for mode in (Mode.BEST, Mode.WEIGHTED):
        assert study.cells[mode][(0.05, 8)] == short.cells[mode][(0.05, 8)]


@pytest.mark.xfail(strict=False, reason="default weight constant too flat for WeightedSum at sigma=0; "
                                        "N=64 hit rate too low for BestMatch; see decisions ledger")
def test_mode_study_noiseless_exact_default_weights():
    study = bench.run_mode_study(n=30, sigmas=[0.0], trial_counts=[64, 128, 256, 512, 1024], batch=10)
    cells = [r.delta_H for mode in study.cells.values() for r in mode.values()]
    assert sum(h == 0.0 for h in cells) >= 0.9 * len(cells)


def test_mode_study_noiseless_exact_sharp_weights():
    # with a sharp weight constant both modes recover every scenario once N >= 256
    study = bench.run_mode_study(n=30, sigmas=[0.0], trial_counts=[256, 512, 1024], batch=10,
                                 c_override=10.0)
    for mode in (Mode.BEST, Mode.WEIGHTED):
        assert all(r.delta_H == 0.0 for r in study.cells[mode].values())


# ---------------------------------------------------------------- svg

def test_single_cell_svg(tmp_path):
    p = tmp_path / "one.svg"
    bench.emit_svg([MetricsRecord(0.0, 1.0, 0, 0, 0.2, 0.2, 0.3)], "delta_L", p)
    assert len(svg_elements(p, "rect", "cell")) == 1
    assert not svg_elements(p, "polygon", "overflow")


def test_svg_clamps_large_values(tmp_path):
    p = tmp_path / "big.svg"
    bench.emit_svg([MetricsRecord(0.0, 1.0, 0, 0, 7.0, 7.0, 7.0),
                    MetricsRecord(0.0, 0.5, 0, 0, 0.5, 0.5, 0.5)], "delta_X", p)
    assert len(svg_elements(p, "polygon", "overflow")) == 1
    text = p.read_text()
    assert "7.0" not in text and "7.00" not in text


def test_svg_nan_cell_does_not_crash(tmp_path):
    p = tmp_path / "nan.svg"
    bench.emit_svg([MetricsRecord.failed(0.0, 1.0)], "delta_L", p)
    ET.parse(p)


def test_grid_outputs(tmp_path):
    records = [MetricsRecord(s, l, 0, 0, 0.1, 0.2, 0.3) for s in (0.0, 0.1) for l in (1.0, 0.9)]
    paths = bench.write_grid_outputs(records, tmp_path)
    assert [p.rsplit("/", 1)[-1] for p in paths] == [
        "grid.csv", "grid_delta_L.svg", "grid_delta_Y.svg", "grid_delta_X.svg"]
    for p in paths[1:]:
        assert len(svg_elements(p, "rect", "cell")) == 4


# ---------------------------------------------------------------- command line

@pytest.fixture
def cloud_pair(tmp_path):
    gt = make_scenario(ScenarioConfig(n=12, seed=1))
    xp, yp = tmp_path / "x.txt", tmp_path / "y.txt"
    write_cloud(xp, gt.x)
    write_cloud(yp, gt.y)
    return gt, str(xp), str(yp)


def test_cli_register(cloud_pair, capsys):
    gt, xp, yp = cloud_pair
    assert cli.main(["--trials", "512", "register", xp, yp]) == 0
    out = json.loads(capsys.readouterr().out)
    assert set(out) >= {"linear_map", "translation", "matching", "best_objective", "mode"}
    assert np.allclose(out["linear_map"], gt.linear_map, atol=1e-6)


def test_cli_register_data_errors(tmp_path, cloud_pair):
    _, xp, yp = cloud_pair
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2 3\n4 5\n")
    assert cli.main(["register", str(bad), yp]) == 2
    assert cli.main(["register", str(tmp_path / "missing.txt"), yp]) == 2
    # more points in x than in y
    assert cli.main(["--trials", "2", "register", yp, xp]) == 0
    small = tmp_path / "small.txt"
    write_cloud(small, np.random.default_rng(0).random((3, 5)))
    assert cli.main(["--trials", "2", "register", xp, str(small)]) == 2


def test_cli_register_numeric_failure(tmp_path, cloud_pair):
    _, _, yp = cloud_pair
    flat = tmp_path / "flat.txt"
    t = np.linspace(0, 1, 12)
    write_cloud(flat, np.vstack([t, 2 * t, 3 * t]))
    assert cli.main(["--trials", "2", "register", str(flat), yp]) == 3


@pytest.mark.parametrize("argv", [[], ["frobnicate"], ["--trials", "0", "demo"],
                                  ["--mode", "median", "demo"], ["register", "only_one"]])
def test_cli_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as info:
        cli.main(argv)
    assert info.value.code == 1


def test_cli_demo(capsys):
    assert cli.main(["--trials", "32", "demo", "--n", "15"]) == 0
    out = capsys.readouterr().out
    assert "delta_L" in out and "delta_H" in out


def test_cli_grid_and_mode_study(tmp_path):
    out = tmp_path / "o"
    assert cli.main(["--trials", "2", "--threads", "2", "--out-dir", str(out), "grid",
                     "--sigmas", "0,0.1", "--lambdas", "1,0.9", "--batch", "1", "--n", "10"]) == 0
    assert (out / "grid.csv").read_text().count("\n") == 5
    assert cli.main(["--out-dir", str(out), "mode-study", "--n", "10", "--sigmas", "0.1",
                     "--trial-counts", "2,4", "--batch", "1"]) == 0
    assert (out / "mode_study_weighted.csv").exists()
    ET.parse(out / "mode_study_delta_H.svg")
