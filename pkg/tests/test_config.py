import pytest

from greencell.config import ConfigError, dump_config, load_config, parse_config
from greencell.energy import Redraw, SpatialMode
from greencell.engine import ScenarioConfig, run_monte_carlo
from greencell.radio import CompMode


def test_empty_file_gives_defaults(tmp_path):
    f = tmp_path / "empty.cfg"
    f.write_text("")
    cfg = load_config(f)
    assert cfg == ScenarioConfig()
    assert cfg.storage_capacity == 2000 and cfg.solar.panel_capacity == 1000
    assert cfg.channel.shadow_sigma == 8 and cfg.power.p_sleep == 54


def test_negative_storage_rejected():
    with pytest.raises(ConfigError) as e:
        parse_config("storage_capacity_wh = -5\n")
    assert e.value.line == 1 and e.value.key == "storage_capacity_wh"


def test_mode_and_sharing_mapping():
    cfg = parse_config("comp_mode = JT\nsharing = on\nspatial_mode = uniform_random\n")
    assert cfg.comp_mode is CompMode.JT and cfg.sharing_enabled
    assert cfg.solar.spatial_mode is SpatialMode.UNIFORM_RANDOM


@pytest.mark.parametrize("text, line", [
    ("# c\nbogus = 1\n", 2),
    ("iterations 5\n", 1),
    ("alpha = 0.9\n\nline_loss_pct = 10\n", 3),
    ("comp_mode = CS\n", 1),
    ("tiers = 3\n", 1),
    ("sharing = maybe\n", 1),
])
def test_errors_carry_line_numbers(text, line):
    with pytest.raises(ConfigError) as e:
        parse_config(text)
    assert e.value.line == line
    assert f"line {line}" in str(e.value)


def test_line_loss_sets_alpha():
    assert parse_config("line_loss_pct = 15").alpha == pytest.approx(0.85)


def test_links_and_profiles(tmp_path):
    prof = tmp_path / "sun.csv"
    prof.write_text("hour,wh_per_kw\n" + "\n".join(f"{h},{100 if 8 <= h < 16 else 0}" for h in range(24)))
    cfg = parse_config("alpha_links = 0-1:0.9, 2-3:0.5\nsolar_profile = sun.csv\n", tmp_path)
    assert cfg.alpha_links == (((0, 1), 0.9), ((2, 3), 0.5))
    assert cfg.solar.profile.daily_total == 800
    with pytest.raises(ConfigError):
        parse_config("solar_profile = missing.csv", tmp_path)


def test_dump_round_trip(tmp_path):
    prof = tmp_path / "sun.csv"
    prof.write_text("hour,wh_per_kw\n" + "\n".join(f"{h},{h}" for h in range(24)))
    text = (
        "comp_mode = DPS\nsharing = on\nalpha = 0.7\nstorage_capacity_wh = 1234.5\n"
        "solar_redraw = DAY\niterations = 2\nhorizon_days = 2\ntiers = 1\n"
        "alpha_links = 0-1:0.25\nsolar_profile = sun.csv\nmaster_seed = 99\n"
    )
    cfg = parse_config(text, tmp_path)
    echo = tmp_path / "echo.cfg"
    echo.write_text(dump_config(cfg))
    again = load_config(echo)
    assert again == cfg
    assert again.solar.redraw is Redraw.DAY
    a, b = run_monte_carlo(cfg), run_monte_carlo(again)
    assert (a.per_iteration["grid_wh"] == b.per_iteration["grid_wh"]).all()


def test_default_dump_round_trip():
    assert parse_config(dump_config(ScenarioConfig())) == ScenarioConfig()


def test_unreadable_file(tmp_path):
    with pytest.raises(ConfigError):
        load_config(tmp_path / "nope.cfg")
