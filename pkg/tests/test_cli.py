import csv

import pytest

from greencell.cli import main
from greencell.output import TIMESERIES_HEADER, emit_timeseries
from greencell.engine import ScenarioConfig, run_monte_carlo

FAST = ["--iterations", "2", "--days", "1", "--sinr-drops", "100"]


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.reader(fh))


def test_timeseries_header_and_rows(tmp_path):
    res = run_monte_carlo(ScenarioConfig(tiers=1, iterations=2))
    path = emit_timeseries(res, tmp_path / "ts.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == (
        "hour,throughput_bps,grid_w,solar_w,savings_eq8_pct,savings_conv_pct,"
        "ee_bits_per_j,eci_j_per_bit,ee_defined"
    )
    assert tuple(lines[0].split(",")) == TIMESERIES_HEADER
    rows = _read(path)[1:]
    assert len(rows) == 168
    for r in rows:
        if r[8] == "0":
            assert r[6] == "" and float(r[7]) == 0 and float(r[2]) == 0
        for cell in r[1:6]:
            assert len(cell.replace("-", "").replace(".", "").split("e")[0].lstrip("0")) <= 6


def test_single_run_outputs(tmp_path):
    out = tmp_path / "run"
    rc = main(["--modes", "noncomp,dps,jt", "--out", str(out), *FAST])
    assert rc == 0
    for label in ("NONCOMP_no-share", "DPS_no-share", "JT_no-share"):
        assert len(_read(out / f"timeseries_{label}.csv")) == 25
    stems = ["throughput", "grid_power", "solar_power", "savings", "eci"]
    for s in stems:
        assert (out / f"hourly_{s}.png").exists() and (out / f"hourly_{s}.csv").exists()
    cdf = _read(out / "sinr_cdf.csv")
    assert cdf[0] == ["cdf", "NONCOMP_sinr_db", "DPS_sinr_db", "JT_sinr_db"]
    assert (out / "sinr_cdf.png").exists()
    assert (out / "config_echo.txt").exists() and (out / "summary.csv").exists()


def test_sweep_outputs(tmp_path):
    out = tmp_path / "sw"
    rc = main(["--sweep", "LINE_LOSS_PCT=0,50", "--modes", "all", "--out", str(out), *FAST])
    assert rc == 0
    rows = _read(out / "sweep.csv")
    assert rows[0] == ["axis_value", "scenario", "metric", "mean", "stderr"]
    wide = _read(out / "sweep_ee_bits_per_j.csv")
    assert len(wide[0]) == 1 + 6 and len(wide) == 3
    assert (out / "sweep_ee_bits_per_j.png").exists()


def test_no_plots(tmp_path):
    out = tmp_path / "np"
    assert main(["--no-plots", "--out", str(out), *FAST]) == 0
    assert not list(out.glob("*.png"))


def test_byte_identical_reruns(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    assert main(["--no-plots", "--out", str(a), "--seed", "5", *FAST]) == 0
    assert main(["--no-plots", "--out", str(b), "--seed", "5", "--workers", "2", *FAST]) == 0
    for name in ("timeseries_NONCOMP_no-share.csv", "summary.csv", "config_echo.txt"):
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_config_echo_reproduces_run(tmp_path):
    a = tmp_path / "a"
    assert main(["--no-plots", "--out", str(a), "--modes", "dps:on", *FAST]) == 0
    b = tmp_path / "b"
    assert main(["--no-plots", "--config", str(a / "config_echo.txt"), "--out", str(b), "--modes", "dps:on"]) == 0
    assert (a / "timeseries_DPS_share.csv").read_bytes() == (b / "timeseries_DPS_share.csv").read_bytes()


@pytest.mark.parametrize("argv", [
    ["--sweep", "WIND=1"],
    ["--modes", "cs"],
    ["--config", "/nonexistent/x.cfg"],
    ["--iterations", "0"],
])
def test_config_errors_exit_nonzero(tmp_path, argv, capsys):
    assert main([*argv, "--out", str(tmp_path / "o")]) != 0
    assert "greencell:" in capsys.readouterr().err


def test_bad_config_line_reported(tmp_path, capsys):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("iterations = 2\nstorage_capacity_wh = -5\n")
    assert main(["--config", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "line 2" in capsys.readouterr().err


def test_unwritable_output(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("")
    assert main(["--out", str(blocker / "sub"), *FAST]) != 0


def test_partial_sweep_flushed(tmp_path, monkeypatch):
    import greencell.sweep as sweep_mod

    real = sweep_mod.run_monte_carlo
    calls = {"n": 0}

    def flaky(cfg, **kw):
        calls["n"] += 1
        if calls["n"] == 2:
            raise OSError("disk gone")
        return real(cfg, **kw)

    monkeypatch.setattr(sweep_mod, "run_monte_carlo", flaky)
    out = tmp_path / "p"
    rc = main(["--sweep", "STORAGE_CAPACITY=500,1000", "--modes", "noncomp", "--out", str(out), *FAST])
    assert rc != 0
    rows = _read(out / "sweep.csv")
    assert {r[0] for r in rows[1:]} == {"500"}
