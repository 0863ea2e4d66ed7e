import json

import numpy as np

from rfclutter import cli


def run(args):
    return cli.main(args)


def test_predict_writes_report(tmp_path):
    out = tmp_path / "p"
    assert run(["predict", "--out", str(out)]) == 0
    lines = (out / "predictions.csv").read_text().splitlines()
    assert lines[0].startswith("# units:")
    assert lines[1] == "label,d_s_m,gamma_sq,p0_db,measured_db,error_db"
    assert len(lines) == 2 + 14
    meta = json.loads((out / "run_meta.json").read_text())
    assert meta["command"] == "predict"
    assert "versions" in meta and "config" in meta


def test_synth_azimuth_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    for out in (a, b):
        assert run(["synth-azimuth", "--seed", "42", "--out", str(out)]) == 0
    assert (a / "azimuth_spectra.csv").read_bytes() == (b / "azimuth_spectra.csv").read_bytes()
    assert (a / "run_meta.json").read_bytes() == (b / "run_meta.json").read_bytes()


def test_synth_azimuth_seed_changes_data(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["synth-azimuth", "--seed", "1", "--out", str(a)]) == 0
    assert run(["synth-azimuth", "--seed", "2", "--out", str(b)]) == 0
    assert (a / "azimuth_spectra.csv").read_bytes() != (b / "azimuth_spectra.csv").read_bytes()


def test_metadata_round_trip(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert run(["synth-azimuth", "--seed", "7", "--ensemble", "2", "--out", str(a)]) == 0
    assert run(["synth-azimuth", "--config", str(a / "run_meta.json"), "--out", str(b)]) == 0
    assert (a / "azimuth_spectra.csv").read_bytes() == (b / "azimuth_spectra.csv").read_bytes()


def test_synth_delay_outputs_sidecar(tmp_path):
    out = tmp_path / "d"
    assert run(["synth-delay", "--seed", "5", "--out", str(out)]) == 0
    sidecar = json.loads((out / "delay_azimuth_map.json").read_text())
    data = np.fromfile(out / "delay_azimuth_map.f32", dtype=np.float32)
    assert data.size == sidecar["shape"][0] * sidecar["shape"][1]
    assert sidecar["axes"]["delay_ns"][0] == 0.0
    assert len(sidecar["axes"]["pointing_deg"]) == sidecar["shape"][1]
    assert (out / "delay_profile.csv").exists()


def test_scene_outputs(tmp_path):
    out = tmp_path / "s"
    assert run(["scene", "--seed", "5", "--duration", "1.0", "--out", str(out)]) == 0
    lines = (out / "scene_timeseries.csv").read_text().splitlines()
    assert lines[1] == "time_s,pointing_deg,power_db"
    assert len(lines) == 2 + 740
    sidecar = json.loads((out / "scene_map.json").read_text())
    assert sidecar["shape"] == [5, 148]


def test_config_file_overrides(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"room": {"width_m": 20.0, "length_m": 6.0}, "seed": 9}))
    out = tmp_path / "o"
    assert run(["predict", "--config", str(cfg), "--out", str(out)]) == 0
    meta = json.loads((out / "run_meta.json").read_text())
    assert meta["config"]["room"]["width_m"] == 20.0
    assert meta["seed"] == 9


def test_unknown_config_key_is_rejected(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"room": {"width_meters": 3.0}}))
    out = tmp_path / "o"
    assert run(["synth-azimuth", "--config", str(cfg), "--out", str(out)]) == 2
    assert not out.exists()  # no partial outputs on failure


def test_malformed_json_reports_line(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text('{\n  "room": {,}\n}')
    assert run(["synth-azimuth", "--config", str(cfg)]) == 2
    err = capsys.readouterr().err
    assert "cfg.json:2" in err


def test_invalid_config_value_exit_code(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"room": {"width_m": -1.0}}))
    assert run(["synth-azimuth", "--config", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_material_override(tmp_path):
    out = tmp_path / "m"
    assert run([
        "synth-azimuth", "--seed", "3", "--material", "gamma:0.25", "--out", str(out),
    ]) == 0
    meta = json.loads((out / "run_meta.json").read_text())
    assert meta["config"]["room"]["material"] == "gamma:0.25"


def test_validate_subset(tmp_path):
    out = tmp_path / "v"
    rc = run([
        "validate", "--seed", "11",
        "--checks", "fresnel_average,survey_prediction_rms", "--out", str(out),
    ])
    assert rc == 0
    report = json.loads((out / "validation_report.json").read_text())
    names = [c["name"] for c in report["checks"]]
    assert names == ["fresnel_average", "survey_prediction_rms"]
    assert all(c["passed"] for c in report["checks"])
    assert "runtime_s" not in report["checks"][0]
    runtimes = json.loads((out / "validation_runtimes.json").read_text())
    assert set(runtimes) == set(names)


def test_validate_unknown_check(tmp_path):
    rc = run(["validate", "--checks", "nope", "--out", str(tmp_path / "v")])
    assert rc == 3


def test_validate_reports_failure_with_exit_one(tmp_path, monkeypatch):
    from rfclutter import validation

    monkeypatch.setitem(
        validation.CHECKS, "fresnel_average",
        lambda seed: (False, 0.0, "forced failure", {}),
    )
    out = tmp_path / "v"
    rc = run(["validate", "--checks", "fresnel_average", "--out", str(out)])
    assert rc == 1
    report = json.loads((out / "validation_report.json").read_text())
    assert report["passed"] is False
