import json
from pathlib import Path

import numpy as np
import pytest

from fracdim.cli import RATIO_COLUMNS, TABLE1_COLUMNS, main
from fracdim.covariance import GridSpec
from fracdim.errors import ZeroVariogram
from fracdim.fileio import field_to_csv, field_to_raster, read_field, write_field

GOLDEN = Path(__file__).parent / "golden" / "table1_seed2.csv"


def run(argv, capsys):
    code = main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


def test_simulate_deterministic(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert run(["simulate", "--seed", "7", "--out", str(a)], capsys)[0] == 0
    assert run(["simulate", "--seed", "7", "--out", str(b)], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
    header = json.loads(a.read_text().splitlines()[0][1:])
    assert header["seed"] == 7 and header["config"]["seed"] == 7 and header["clamp_count"] == 0
    c = tmp_path / "c.csv"
    run(["simulate", "--seed", "7", "--part", "im", "--out", str(c)], capsys)
    assert read_field(c)[0].tolist() != read_field(a)[0].tolist()


def test_simulate_then_estimate_round_trip(tmp_path, capsys):
    hits = 0
    for seed in range(10):
        f = tmp_path / f"f{seed}.csv"
        run(["simulate", "--alpha", "1.0", "--seed", str(seed), "--out", str(f)], capsys)
        code, out, _ = run(["estimate", str(f)], capsys)
        assert code == 0
        rep = json.loads(out)
        assert rep["config"]["input"] == str(f) and rep["source_seed"] == seed
        hits += abs(rep["estimate"]["alpha_hat"] - 1.0) <= 3 * 0.041
    assert hits >= 8


def test_estimate_2d_raster_and_gls(tmp_path, capsys):
    f = tmp_path / "f.bin"
    assert run(["simulate", "--dim", "2", "--n0", "40,40", "--alpha", "0.8", "--seed", "3", "--out", str(f)], capsys)[0] == 0
    assert f.read_bytes()[:4] == b"FDRF"
    code, out, _ = run(["estimate", str(f), "--scheme", "gls"], capsys)
    rep = json.loads(out)["estimate"]
    assert code == 0 and rep["scheme"] == "gls" and abs(rep["alpha_hat"] - 0.8) < 0.3
    assert json.loads(out)["config"]["c"] == 10.0


def test_constant_file_exits_with_zero_variogram(tmp_path, capsys):
    f = tmp_path / "const.csv"
    grid = GridSpec((50,), 4)
    write_field(f, np.full(grid.shape, 2.5), grid, {"note": "constant"})
    code, _, err = run(["estimate", str(f)], capsys)
    assert code == ZeroVariogram.exit_code != 0
    assert "ZeroVariogram" in err


def test_error_exit_codes(tmp_path, capsys):
    assert run(["estimate", str(tmp_path / "missing.csv")], capsys)[0] == 9
    assert run(["simulate", "--alpha", "3.0"], capsys)[0] == 3
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2]")
    assert run(["simulate", "--config", str(bad)], capsys)[0] == 3
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 2


def test_config_file_and_flag_override(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"alpha": 0.5, "n0": 64, "seed": 11, "transform": "chisq1"}))
    code, out, _ = run(["simulate", "--config", str(cfg), "--seed", "12"], capsys)
    head = json.loads(out.splitlines()[0][1:])
    assert code == 0 and head["seed"] == 12 and head["alpha"] == 0.5 and head["transform"] == "chisq1"
    assert len(out.splitlines()) == 2 + 64 + 2 * 4


def test_field_file_round_trip(tmp_path):
    rng = np.random.default_rng(0)
    for grid in (GridSpec((7,), 2), GridSpec((5, 6), 1)):
        v = rng.normal(size=grid.shape)
        for name, blob in (("f.csv", field_to_csv(v, grid, {"k": 1})), ("f.bin", field_to_raster(v, grid, {"k": 1}))):
            p = tmp_path / name
            p.write_bytes(blob if isinstance(blob, bytes) else blob.encode())
            back, g2, meta = read_field(p)
            assert g2 == grid and meta["k"] == 1 and np.array_equal(back, v)


def test_table1_golden(tmp_path, capsys):
    out = tmp_path / "t1.csv"
    assert run(["table1", "--replications", "100", "--seed", "2", "--out", str(out)], capsys)[0] == 0
    lines = out.read_text().splitlines()
    assert lines[1] == ",".join(TABLE1_COLUMNS)
    assert len(lines) == 2 + 3 * 6 * 3
    assert out.read_text() == GOLDEN.read_text()


def test_small_reports(capsys):
    code, out, _ = run(["ratios", "--alpha", "1.0", "--sizes", "200,400", "--replications", "5", "--m", "4"], capsys)
    lines = out.splitlines()
    assert code == 0 and lines[1] == ",".join(RATIO_COLUMNS) and len(lines) == 4
    code, out, _ = run(
        ["mse-vs-m", "--alpha", "1.0", "--n0", "300", "--m-values", "2,4", "--replications", "4", "--format", "json"], capsys
    )
    rows = json.loads(out)["rows"]
    assert code == 0 and [r["m"] for r in rows] == [2, 2, 2, 4, 4, 4]
    # OLS1 and GLS1 coincide at m = 2
    assert rows[1]["mse"] == rows[2]["mse"]
    code, out, _ = run(["qq", "--alpha", "1.0", "--n0", "400", "--replications", "20"], capsys)
    head = json.loads(out.splitlines()[0][1:])
    assert code == 0 and np.isfinite(head["quartile_line"]["slope"]) and len(out.splitlines()) == 22
