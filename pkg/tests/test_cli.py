"""End-to-end tests of the command line front end.

Every test drives cli.main with a JSON config written to tmp_path and
asserts on exit codes, emitted files, and stderr wording. File-format
assertions (headers, 17-digit floats, byte-identical reruns) pin the
output contract, not just the numbers.
"""
import json
import math
from pathlib import Path

import numpy as np
import pytest

from uhlmann_chern import cli, models


def write_config(path: Path, *, variant="haldane", parameters=None,
                 resolution=(32, 32), run=None, **top) -> Path:
    if parameters is None:
        parameters = {"t1": 1.0, "t2": 0.5, "phi": math.pi / 2, "M": 0.0}
    cfg = {
        "model": {"variant": variant, "parameters": parameters},
        "grid": {"resolution": list(resolution)},
        "run": run or {"type": "sweep", "temperatures": [0.2, 1.0]},
    }
    cfg.update(top)
    path.write_text(json.dumps(cfg))
    return path


def read_csv(path: Path):
    lines = path.read_text().split("\n")
    header = lines[0]
    rows = [line.split(",") for line in lines[1:] if line]
    return header, rows


# -- config validation ---------------------------------------------------------


def test_missing_config_file(tmp_path, capsys):
    assert cli.main(["--config", str(tmp_path / "nope.json")]) == 2
    assert "config error" in capsys.readouterr().err


def test_invalid_json(tmp_path, capsys):
    path = tmp_path / "bad.json"
    path.write_text("{not json")
    assert cli.main(["--config", str(path)]) == 2
    assert "invalid JSON" in capsys.readouterr().err


def test_unknown_top_level_key(tmp_path, capsys):
    path = write_config(tmp_path / "c.json", junk=1)
    assert cli.main(["--config", str(path)]) == 2
    err = capsys.readouterr().err
    assert "config error" in err and "junk" in err


def test_unknown_model_parameter(tmp_path, capsys):
    path = write_config(
        tmp_path / "c.json",
        parameters={"t1": 1.0, "t2": 0.5, "phi": 1.0, "M": 0.0, "bogus": 2.0},
    )
    assert cli.main(["--config", str(path)]) == 2
    assert "bogus" in capsys.readouterr().err


def test_wrong_resolution_length(tmp_path, capsys):
    path = write_config(tmp_path / "c.json", resolution=(8, 8, 8))
    assert cli.main(["--config", str(path)]) == 2
    assert "grid.resolution" in capsys.readouterr().err


def test_empty_temperatures(tmp_path, capsys):
    path = write_config(tmp_path / "c.json", run={"type": "sweep", "temperatures": []})
    assert cli.main(["--config", str(path)]) == 2
    assert "temperatures: empty" in capsys.readouterr().err


def test_order_model_mismatch(tmp_path, capsys):
    path = write_config(
        tmp_path / "c.json",
        variant="four_band_gamma",
        parameters={"m": 1.5},
        resolution=(8, 8, 8, 8),
        run={"type": "sweep", "temperatures": [1.0], "order": 1},
    )
    assert cli.main(["--config", str(path)]) == 2
    assert "run.order" in capsys.readouterr().err


def test_map_needs_2d(tmp_path, capsys):
    path = write_config(
        tmp_path / "c.json",
        variant="four_band_gamma",
        parameters={"m": 1.5},
        resolution=(8, 8, 8, 8),
        run={"type": "map", "temperatures": [1.0]},
    )
    assert cli.main(["--config", str(path)]) == 2
    assert "map" in capsys.readouterr().err


def test_bad_workers(tmp_path, capsys):
    path = write_config(tmp_path / "c.json", workers=0)
    # 0 fails schema validation before command dispatch
    assert cli.main(["--config", str(path)]) == 2


# -- sweep ----------------------------------------------------------------------


def test_sweep_outputs(tmp_path):
    out = tmp_path / "out"
    path = write_config(tmp_path / "c.json", output_dir=str(out))
    assert cli.main(["--config", str(path)]) == 0

    header, rows = read_csv(out / "sweep.csv")
    assert header == "T_over_R0,n_U,imag_residual,route_disagreement"
    assert len(rows) == 2
    assert rows[0][0] == "0.20000000000000001"  # 17 significant digits
    assert float(rows[0][1]) > float(rows[1][1])

    summary = json.loads((out / "summary.json").read_text())
    assert summary["command"] == "sweep"
    assert summary["model_variant"] == "haldane"
    assert summary["grid_resolution"] == [32, 32]
    assert summary["order"] == 1
    assert summary["temperatures"] == [0.2, 1.0]
    assert summary["max_imag_residual"] <= 1e-10
    assert summary["max_route_disagreement"] <= 1e-5
    assert "version" in summary and "wall_time_s" in summary


def test_sweep_reruns_byte_identical(tmp_path):
    out_a = tmp_path / "a"
    out_b = tmp_path / "b"
    out_c = tmp_path / "c"
    path = write_config(tmp_path / "c.json", resolution=(16, 16))
    assert cli.main(["--config", str(path), "--out", str(out_a)]) == 0
    assert cli.main(["--config", str(path), "--out", str(out_b)]) == 0
    assert cli.main(["--config", str(path), "--out", str(out_c), "--workers", "2"]) == 0
    data = (out_a / "sweep.csv").read_bytes()
    assert data == (out_b / "sweep.csv").read_bytes()
    assert data == (out_c / "sweep.csv").read_bytes()
    assert b"\r" not in data


def test_out_flag_overrides_config(tmp_path):
    configured = tmp_path / "configured"
    actual = tmp_path / "actual"
    path = write_config(tmp_path / "c.json", resolution=(16, 16), output_dir=str(configured))
    assert cli.main(["--config", str(path), "--out", str(actual)]) == 0
    assert (actual / "sweep.csv").exists()
    assert not configured.exists()


# -- map --------------------------------------------------------------------------


def _run_map(tmp_path, name, temperature):
    out = tmp_path / name
    path = write_config(
        tmp_path / f"{name}.json",
        resolution=(24, 24),
        run={"type": "map", "temperatures": [temperature]},
        output_dir=str(out),
    )
    assert cli.main(["--config", str(path)]) == 0
    return out


def test_map_zero_temperature_matches_pure(tmp_path):
    out = _run_map(tmp_path, "cold", 0)
    header_t, trace_rows = read_csv(out / "curvature.csv")
    header_b, berry_rows = read_csv(out / "berry.csv")
    assert header_t == "kx,ky,Im_Tr_rhoFU"
    assert header_b == "kx,ky,Im_F_B"
    assert len(trace_rows) == len(berry_rows) == 24 * 24
    trace = np.array([float(r[2]) for r in trace_rows])
    berry = np.array([float(r[2]) for r in berry_rows])
    assert np.abs(trace - berry).max() <= 1e-6
    # coordinates agree row by row
    assert trace_rows[5][0] == berry_rows[5][0]
    assert trace_rows[5][1] == berry_rows[5][1]


def test_map_thermal_suppression(tmp_path):
    cold = _run_map(tmp_path, "cold", 0)
    warm = _run_map(tmp_path, "warm", 1.2)
    hot = _run_map(tmp_path, "hot", 1e8)
    amp = {}
    for name, out in (("cold", cold), ("warm", warm), ("hot", hot)):
        _, rows = read_csv(out / "curvature.csv")
        amp[name] = max(abs(float(r[2])) for r in rows)
    assert amp["warm"] < amp["cold"]
    assert amp["hot"] <= 1e-12


# -- chern ------------------------------------------------------------------------


def test_chern_first_order(tmp_path):
    out = tmp_path / "out"
    path = write_config(
        tmp_path / "c.json",
        resolution=(48, 48),
        run={"type": "chern"},
        output_dir=str(out),
    )
    assert cli.main(["--config", str(path)]) == 0
    payload = json.loads((out / "chern.json").read_text())
    assert payload["kind"] == "first"
    assert payload["value"] == 1


@pytest.mark.filterwarnings("ignore::uhlmann_chern.errors.ResolutionTooLowWarning")
def test_chern_second_order(tmp_path):
    out = tmp_path / "out"
    path = write_config(
        tmp_path / "c.json",
        variant="four_band_gamma",
        parameters={"m": 3.5},
        resolution=(12, 12, 12, 12),
        run={"type": "chern"},
        output_dir=str(out),
    )
    assert cli.main(["--config", str(path)]) == 0
    payload = json.loads((out / "chern.json").read_text())
    assert payload["kind"] == "second"
    assert payload["value"] == pytest.approx(-1.0, abs=0.3)


# -- verify -----------------------------------------------------------------------


def _verify_config(tmp_path, **top):
    return write_config(
        tmp_path / "v.json",
        resolution=(16, 16),
        run={"type": "verify"},
        **top,
    )


def test_verify_passes(tmp_path, capsys):
    path = _verify_config(tmp_path)
    assert cli.main(["--config", str(path)]) == 0
    out = capsys.readouterr().out
    assert "PASS  models.gamma anticommutation" in out
    assert "PASS  chern.quantization at zero temperature" in out
    assert "FAIL" not in out


def test_verify_accepts_tolerance_overrides(tmp_path):
    path = _verify_config(tmp_path, tolerances={"degeneracy": 1e-12})
    assert cli.main(["--config", str(path)]) == 0


def test_verify_catches_corrupted_table(tmp_path, capsys, monkeypatch):
    bad = models.GAMMA.copy()
    bad[3] = bad[2]
    bad.setflags(write=False)
    monkeypatch.setattr(models, "GAMMA", bad)
    path = _verify_config(tmp_path)
    assert cli.main(["--config", str(path)]) == 1
    captured = capsys.readouterr()
    assert "FAIL  models.gamma anticommutation" in captured.out
    assert "verify failure: models.gamma anticommutation" in captured.err
