import json

import pytest

from nvqst.cli import main
from nvqst.config import ExperimentConfig, load_config, parse_config
from nvqst.exceptions import ConfigError


def write_cfg(tmp_path, doc, name="cfg.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc) if not isinstance(doc, str) else doc)
    return str(path)


def noiseless(state="zero", n=1):
    return {"device": {"n": n}, "noise": {"enabled": False},
            "calibration": {"shots": None},
            "tomography": {"state": state, "shots_per_setting": None}}


def test_config_round_trip():
    cfg = load_config()
    assert parse_config(cfg.to_json()) == cfg
    assert isinstance(cfg, ExperimentConfig)


@pytest.mark.parametrize("text, fragment", [
    ('{"device": {"bogus": 1}}', "device.bogus"),
    ('{"tomography": {"seed": "3"}}', "tomography.seed"),
    ('{"noise": {"enabled": 1}}', "noise.enabled"),
    ('{"device":\n {"n": }}', "line 2"),
    ('{"tomography": {"state": "s1"}}', "tomography.state"),
])
def test_config_errors(text, fragment):
    with pytest.raises(ConfigError, match=fragment):
        parse_config(text)


def test_cli_config_error_exit_code(tmp_path, capsys):
    path = write_cfg(tmp_path, {"extra": {}})
    assert main(["tomo", "--config", path, "--out", str(tmp_path / "o")]) == 2
    assert "extra" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_cli_calibration_failure_exit_code(tmp_path):
    doc = {"calibration": {"r_max": 0.02, "r_min": 0.03}}
    out = tmp_path / "o"
    assert main(["calibrate", "--config", write_cfg(tmp_path, doc), "--out", str(out)]) == 3
    assert not out.exists()


def test_cli_calibrate_exact(tmp_path):
    doc = {"calibration": {"shots": None}}
    out = tmp_path / "o"
    assert main(["calibrate", "--config", write_cfg(tmp_path, doc), "--out", str(out)]) == 0
    payload = json.loads((out / "calibration.json").read_text())["payload"]
    assert payload["calibration"]["r_max"] == 0.03 and payload["calibration"]["r_min"] == 0.021


def test_cli_tomo_noiseless(tmp_path):
    out = tmp_path / "o"
    assert main(["tomo", "--config", write_cfg(tmp_path, noiseless()), "--out", str(out)]) == 0
    payload = json.loads((out / "result.json").read_text())["payload"]
    assert payload["fidelity"] == pytest.approx(1.0, abs=1e-9)
    assert payload["imag_rms"] >= 0
    assert len((out / "records.jsonl").read_text().splitlines()) == 3
    rows = (out / "matrix_raw.csv").read_text().splitlines()
    assert rows[0] == "row,col,re,im" and len(rows) == 5
    echoed = json.dumps(payload["config"])
    assert parse_config(echoed) == parse_config(json.dumps(noiseless()))


def test_cli_state_override_sets_register_size(tmp_path):
    out = tmp_path / "o"
    assert main(["tomo", "--state", "s2", "--seed", "4", "--out", str(out)]) == 0
    payload = json.loads((out / "result.json").read_text())["payload"]
    assert payload["config"]["device"]["n"] == 2 and payload["seed"] == 4
    assert len(payload["records"]) == 15


def test_cli_bad_state(tmp_path):
    assert main(["tomo", "--state", "nope", "--out", str(tmp_path)]) == 2


@pytest.mark.parametrize("n, count", [(1, 3), (2, 15), (3, 63)])
def test_cli_plan(tmp_path, n, count):
    out = tmp_path / "o"
    assert main(["plan", "--n", str(n), "--out", str(out)]) == 0
    doc = json.loads((out / f"schedule_n{n}.json").read_text())
    assert len(doc) == count
    assert all(abs(e["verification"] - 1.0) < 1e-12 for e in doc)


def test_cli_compare_outputs(tmp_path):
    out = tmp_path / "o"
    assert main(["compare", "--out", str(out)]) == 0
    doc = json.loads((out / "compare.json").read_text())["payload"]
    assert doc["budget"]["ratio"] > 100 and doc["c_x_agree"]
    assert (out / "speedup.csv").read_text().startswith("method,settings")
    assert json.loads((out / "budget.json").read_text())["settings_fast"] == 3
