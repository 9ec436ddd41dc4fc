"""Command-line client, run against the in-process service."""

import json

import numpy as np
import pytest

from seastrain.cli import main
from seastrain.dassim import DasRecord
from seastrain.recordio import read_das_record, write_das_record


@pytest.fixture
def config_path(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(
        json.dumps(
            {
                "sim": {
                    "sample_rate_hz": 200.0,
                    "duration_s": 60.0,
                    "noise_rms": 0.0005,
                    "seed": 3,
                }
            }
        )
    )
    return path


def write_config(tmp_path, name, obj):
    path = tmp_path / name
    path.write_text(json.dumps(obj))
    return path


def simulate(tmp_path, config_path, name="rec.das", seed=None):
    out = tmp_path / name
    argv = ["simulate", "--config", str(config_path), "--out", str(out)]
    if seed is not None:
        argv += ["--seed", str(seed)]
    assert main(argv) == 0
    return out


def test_simulate_writes_deterministic_record(tmp_path, config_path, capsys):
    out = simulate(tmp_path, config_path, seed=42)
    first = out.read_bytes()
    assert "19 channels x 12000 samples" in capsys.readouterr().out
    simulate(tmp_path, config_path, seed=42)
    assert out.read_bytes() == first
    rec = read_das_record(out)
    assert rec.n_channels == 19


def test_simulate_csv_format(tmp_path):
    cfg = write_config(
        tmp_path, "small.json", {"sim": {"sample_rate_hz": 50.0, "duration_s": 2.0}}
    )
    out = tmp_path / "rec.csv"
    assert main(["simulate", "--config", str(cfg), "--out", str(out), "--format", "csv"]) == 0
    assert out.read_text().startswith("# das-record v1")


def test_simulate_invalid_config_exits_2(tmp_path, capsys):
    cfg = write_config(tmp_path, "bad.json", {"wave": {"period_s": 0}})
    code = main(["simulate", "--config", str(cfg), "--out", str(tmp_path / "x.das")])
    assert code == 2
    assert "wave.period_s" in capsys.readouterr().err


def test_simulate_unreadable_config_exits_2(tmp_path, capsys):
    code = main(
        ["simulate", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path / "x")]
    )
    assert code == 2
    assert "cannot read" in capsys.readouterr().err


def test_analyze_period(tmp_path, config_path, capsys):
    rec = simulate(tmp_path, config_path)
    capsys.readouterr()
    assert main(["analyze", "--in", str(rec), "--mode", "period"]) == 0
    out = capsys.readouterr().out
    assert "period 2.5" in out
    result = json.loads((tmp_path / "rec.period.result.json").read_text())
    assert result["period"]["period_s"] == pytest.approx(2.5, rel=0.01)
    assert (tmp_path / "rec.psd.csv").exists()


def test_analyze_with_channel_range(tmp_path, config_path):
    rec = simulate(tmp_path, config_path)
    assert main(["analyze", "--in", str(rec), "--range", "161:170", "--mode", "period"]) == 0
    result = json.loads((tmp_path / "rec.period.result.json").read_text())
    assert result["period"]["channel_position_m"] is None


def test_analyze_usage_errors(tmp_path, config_path, capsys):
    rec = simulate(tmp_path, config_path)
    assert main(["analyze", "--in", str(rec), "--mode", "height"]) == 2
    assert "calibration" in capsys.readouterr().err
    assert main(["analyze", "--in", str(rec), "--range", "abc", "--mode", "period"]) == 2
    assert (
        main(
            ["analyze", "--in", str(rec), "--range", "1:2", "--channel-x", "3",
             "--mode", "period"]
        )
        == 2
    )
    assert main(["analyze", "--in", str(tmp_path / "none.das"), "--mode", "period"]) == 2


def test_analyze_pure_noise_exits_1(tmp_path, capsys):
    rng = np.random.default_rng(0)
    rec = DasRecord(
        sample_rate_hz=200.0,
        channel_positions_m=161.0 + 0.8 * np.arange(19),
        data=rng.standard_normal((19, 24000)),
    )
    path = tmp_path / "noise.das"
    write_das_record(rec, path)
    code = main(["analyze", "--in", str(path), "--mode", "period"])
    assert code == 1
    assert "WeakPeak" in capsys.readouterr().err


def test_calibrate_and_height_flow(tmp_path, config_path, capsys):
    paths = []
    heights = (0.15, 0.30, 0.40)
    for i, h in enumerate(heights):
        cfg = write_config(
            tmp_path,
            f"cfg{i}.json",
            {
                "wave": {"height_m": h},
                "sim": {"sample_rate_hz": 200.0, "duration_s": 60.0,
                        "noise_rms": 0.0005, "seed": i},
            },
        )
        paths.append(simulate(tmp_path, cfg, name=f"h{i}.das"))
    cal = tmp_path / "calibration.json"
    argv = ["calibrate", "--out", str(cal)]
    for p, h in zip(paths, heights):
        argv += ["--in", str(p), "--height", str(h)]
    assert main(argv) == 0
    assert "RMSPE" in capsys.readouterr().out
    doc = json.loads(cal.read_text())
    assert doc["calibration"]["rmspe_percent"] < 0.5
    assert (tmp_path / "calibration.rms_samples.csv").exists()

    assert (
        main(
            ["analyze", "--in", str(paths[1]), "--mode", "height",
             "--calibration", str(cal)]
        )
        == 0
    )
    result = json.loads((tmp_path / "h1.height.result.json").read_text())
    assert result["height"]["height_m"] == pytest.approx(0.30, rel=0.05)


def test_calibrate_duplicate_heights_exits_2(tmp_path, config_path, capsys):
    rec = simulate(tmp_path, config_path)
    code = main(
        ["calibrate", "--in", str(rec), "--height", "0.3",
         "--in", str(rec), "--height", "0.3", "--out", str(tmp_path / "c.json")]
    )
    assert code == 2
    assert "distinct" in capsys.readouterr().err


def test_calibrate_mismatched_pairs_exits_2(tmp_path, config_path):
    rec = simulate(tmp_path, config_path)
    code = main(
        ["calibrate", "--in", str(rec), "--height", "0.3", "--height", "0.4",
         "--out", str(tmp_path / "c.json")]
    )
    assert code == 2


def test_doa_axial_wave(tmp_path, capsys):
    # wave along the C1 cable axis; C2 rotated so its relative DOA is +15
    base = {"wave": {"doa_deg": 0.0},
            "sim": {"sample_rate_hz": 200.0, "duration_s": 60.0,
                    "noise_rms": 0.0005, "seed": 8}}
    cfg1 = write_config(tmp_path, "c1.json", base | {"geometry": {"axis_angle_deg": 0.0}})
    cfg2 = write_config(tmp_path, "c2.json", base | {"geometry": {"axis_angle_deg": -15.0}})
    rec1 = simulate(tmp_path, cfg1, name="c1.das")
    rec2 = simulate(tmp_path, cfg2, name="c2.das")
    capsys.readouterr()
    assert main(["doa", "--in1", str(rec1), "--in2", str(rec2), "--delta-deg", "15"]) == 0
    assert "DOA C1" in capsys.readouterr().out
    result = json.loads((tmp_path / "c1__c2.doa.result.json").read_text())
    doa = result["doa"]
    assert doa["doa_c1_deg"] == pytest.approx(0.0, abs=0.5)
    assert doa["wavelength_m"] == pytest.approx(doa["apparent_wavelength_c1_m"], rel=1e-3)
    assert (tmp_path / "c1__c2.beam_spectra.csv").exists()
    assert (tmp_path / "c1__c2.wavelength_doa_curves.csv").exists()


def test_doa_zero_delta_exits_2(tmp_path, config_path):
    rec = simulate(tmp_path, config_path)
    assert main(["doa", "--in1", str(rec), "--in2", str(rec), "--delta-deg", "0"]) == 2


def test_reproduce_unwritable_outdir_exits_2(tmp_path, capsys):
    blocker = tmp_path / "file"
    blocker.write_text("not a directory")
    code = main(["reproduce", "--outdir", str(blocker), "--seed", "0"])
    assert code == 2
    assert "not writable" in capsys.readouterr().err


def test_unknown_command_exits_2():
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
