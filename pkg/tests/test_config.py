import pytest

from polariton_wire.config import DEFAULTS, build_config, parse_config, parse_override
from polariton_wire.errors import ConfigError


def write(tmp_path, text):
    path = tmp_path / "run.toml"
    path.write_text(text)
    return path


MINIMAL = """
[wire]
n_molecules = 100
[modes]
count = 21
[coupling]
rabi_splitting_eV = 0.1
"""


def test_minimal_config(tmp_path):
    cfg = parse_config(write(tmp_path, MINIMAL))
    assert cfg["wire"]["n_molecules"] == 100
    assert cfg["wavepacket"]["sigma_x_nm"] == 60.0
    assert len(cfg.mode_set()) == 21


def test_defaults_match_reference_run():
    cfg = build_config({})
    assert cfg["wire"]["n_molecules"] == 5000
    assert cfg.mode_set().realized_cutoff == pytest.approx(11.63, abs=0.01)


def test_even_count_rejected(tmp_path):
    with pytest.raises(ConfigError, match="mode count must be odd"):
        parse_config(write(tmp_path, MINIMAL.replace("21", "20")))


def test_all_violations_reported(tmp_path):
    text = """
[wire]
n_molecules = 100
spacing_um = 0.01
colour = "red"
[modes]
count = 20
[coupling]
rabi_splitting_eV = -0.1
"""
    with pytest.raises(ConfigError) as err:
        parse_config(write(tmp_path, text))
    msgs = err.value.violations
    assert any("unit-suffix mismatch" in m and "spacing_nm" in m for m in msgs)
    assert any("wire.colour: unknown key" in m for m in msgs)


def test_cross_field_violations_collected():
    with pytest.raises(ConfigError) as err:
        build_config({"modes": {"count": 20}, "coupling": {"rabi_splitting_eV": -1.0},
                      "wavepacket": {"sigma_x_nm": 0.0}})
    assert len(err.value.violations) == 3


def test_cutoff_below_band():
    with pytest.raises(ConfigError, match="minimum cavity energy"):
        build_config({"modes": {"cutoff_eV": 1.0}})


def test_count_and_cutoff_conflict():
    with pytest.raises(ConfigError, match="not both"):
        build_config({"modes": {"count": 21, "cutoff_eV": 3.0}})


def test_override_switches_truncation_form():
    cfg = build_config({"modes": {"count": 21}}, ["modes.cutoff_eV=3.0"])
    assert cfg["modes"]["count"] is None
    back = cfg.replace(modes={"count": 41})
    assert back["modes"]["cutoff_eV"] is None and back["modes"]["count"] == 41


def test_parse_override():
    assert parse_override("wire.n_molecules=250") == ("wire", "n_molecules", 250)
    assert parse_override("modes.directionality=nonnegative-only") == ("modes", "directionality", "nonnegative-only")
    assert parse_override("time.snapshots_fs=[500, 1000]") == ("time", "snapshots_fs", [500, 1000])
    with pytest.raises(ConfigError):
        parse_override("n_molecules=3")


def test_type_errors():
    with pytest.raises(ConfigError, match="expected an integer"):
        build_config({"wire": {"n_molecules": 10.5}})
    with pytest.raises(ConfigError, match="expected a number"):
        build_config({"coupling": {"rabi_splitting_eV": "big"}})


def test_unknown_section():
    with pytest.raises(ConfigError, match="unknown section"):
        build_config({"cavity": {"q": 1}})


def test_malformed_and_missing(tmp_path):
    with pytest.raises(ConfigError, match="malformed"):
        parse_config(write(tmp_path, "[wire\n"))
    with pytest.raises(ConfigError, match="not found"):
        parse_config(tmp_path / "nope.toml")


def test_hash_stable_and_sensitive():
    a = build_config({"wire": {"n_molecules": 100}, "modes": {"count": 21}})
    b = build_config({"modes": {"count": 21}, "wire": {"n_molecules": 100}})
    assert a.config_hash == b.config_hash
    assert a.config_hash != a.replace(ensemble={"seed": 1}).config_hash


def test_defaults_not_mutated():
    build_config({"wire": {"n_molecules": 7}})
    assert DEFAULTS["wire"]["n_molecules"] == 5000


def test_time_grid_multiple():
    with pytest.raises(ConfigError, match="multiple"):
        build_config({"time": {"t_max_fs": 105.0, "dt_fs": 10.0}})
