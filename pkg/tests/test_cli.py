import csv
import json

import numpy as np
import pytest

from chirpranging.cli import EXIT_CONFIG, EXIT_RUNTIME, main
from chirpranging.io import save_waveform
from chirpranging.ranging import TimingSpec
from chirpranging.signals import ChirpSpec, extract_window, generate_chirp

SMALL = ["--set", "receivers.nx=4", "--set", "receivers.ny=3", "--set", "receivers.spacing=0.5"]


def test_power_prints_table(tmp_path, capsys):
    assert main(["power", "--out", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "LDO + MEMS" in out and "2074.0" in out and "8.50 years" in out
    rows = list(csv.reader(open(tmp_path / "power.csv")))
    assert rows[0] == ["component", "active_nw", "passive_nw", "total_nw"]
    assert rows[-1][0] == "Total"
    assert abs(float(rows[-1][3]) - 9014.9) < 0.2


def test_grid_outputs(tmp_path):
    rc = main(["grid", "--scale", "desk", "--alpha", "0.3", "--snr", "3", "--out", str(tmp_path)]
              + SMALL)
    assert rc == 0
    names = {p.name for p in tmp_path.iterdir()}
    assert {"results.csv", "summary.json", "cdf_snr3.svg", "heatmap_maximum_snr3.svg"} <= names
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert set(summary["by_snr"]["3"]) == {"maximum", "window_quadratic_pos", "prominence_65",
                                           "delta_peak"}
    assert len((tmp_path / "results.csv").read_text().splitlines()) == 1 + 12 * 4


def test_grid_deterministic_with_workers(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["grid", "--alpha", "0.3", "--snr", "3", "--seed", "9"] + SMALL
    assert main(args + ["--out", str(a), "--workers", "2"]) == 0
    assert main(args + ["--out", str(b), "--workers", "1"]) == 0
    for name in ("results.csv", "summary.json", "heatmap_prominence_65_snr3.svg"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_env_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("CHIRPRANGING_OUT", str(tmp_path / "env"))
    assert main(["power"]) == 0
    assert (tmp_path / "env" / "power.csv").exists()


def test_config_error_exit_code(tmp_path, capsys):
    rc = main(["grid", "--alpha", "3", "--snr", "x", "--out", str(tmp_path)])
    assert rc == EXIT_CONFIG
    err = capsys.readouterr().err
    assert "absorption" in err and "snr_db" in err
    assert not any(tmp_path.iterdir())


def test_runtime_error_exit_code(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("# sample_rate=196000\nsample\n0.1\noops\n")
    assert main(["range", "--input", str(bad), "--out", str(tmp_path / "o")]) == EXIT_RUNTIME


def test_range_one_distance_per_input(tmp_path, capsys):
    tmpl = generate_chirp(ChirpSpec())
    timing = TimingSpec()
    paths = []
    for i, d in enumerate((0.8, 2.4)):
        snip = extract_window(tmpl, timing.wake_offset - d / 340, 0.001)
        p = tmp_path / f"rec{i}.csv"
        save_waveform(snip.with_samples(snip.samples * 0.05), p)
        paths.append(str(p))
    rc = main(["range", "--input", *paths, "--template", "paper-chirp",
               "--out", str(tmp_path / "o")])
    assert rc == 0
    rows = list(csv.DictReader(open(tmp_path / "o" / "ranges.csv")))
    assert len(rows) == 2 * 4
    for r in rows:
        truth = 0.8 if r["input"] == "rec0.csv" else 2.4
        assert abs(float(r["estimated_distance_m"]) - truth) <= 340 / 196000


def test_range_unknown_template(tmp_path):
    assert main(["range", "--input", "x.csv", "--template", "other",
                 "--out", str(tmp_path)]) == EXIT_CONFIG


@pytest.mark.parametrize("fmt", ["csv", "wav"])
def test_synth_and_rir(tmp_path, fmt):
    assert main(["synth", "--format", fmt, "--snr", "20", "--out", str(tmp_path)]) == 0
    assert (tmp_path / f"chirp.{fmt}").exists() and (tmp_path / f"snippet.{fmt}").exists()
    assert main(["rir", "--format", fmt, "--alpha", "0.9", "--out", str(tmp_path)]) == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["nonzero_taps"] > 1


def test_mc_small(tmp_path):
    rc = main(["mc", "--alpha", "0.9", "--snr", "20", "--trials", "30", "--estimator", "maximum",
               "--out", str(tmp_path)])
    assert rc == 0
    summary = json.loads((tmp_path / "summary.json").read_text())
    assert summary["by_snr"]["20"]["stats"]["maximum"]["n"] == 30
    assert (tmp_path / "cdf.svg").exists()


def test_ppf_and_compare_small(tmp_path):
    rc = main(["ppf", "--snr", "20", "--set", "estimators.ppf_values=10,65,1000",
               "--out", str(tmp_path / "p")] + SMALL)
    assert rc == 0
    assert len((tmp_path / "p" / "ppf.csv").read_text().splitlines()) == 4
    rc = main(["compare", "--snr", "3", "--snr", "20", "--out", str(tmp_path / "c")] + SMALL)
    assert rc == 0
    table = json.loads((tmp_path / "c" / "summary.json").read_text())["table"]
    assert len(table) == 4 * 3
