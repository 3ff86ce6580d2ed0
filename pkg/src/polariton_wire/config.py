"""Run configuration: TOML parsing, overrides and cross-field validation."""

from __future__ import annotations

import copy
import hashlib
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

if sys.version_info >= (3, 11):
    import tomllib
else:  # pragma: no cover
    import tomli as tomllib

from polariton_wire.disorder import DisorderSpec
from polariton_wire.ensemble import SimulationSetup, time_grid
from polariton_wire.errors import ConfigError
from polariton_wire.hamiltonian import CouplingSpec
from polariton_wire.units import Directionality, WireConfig
from polariton_wire.wavepacket import WavepacketSpec

# section -> key -> default. Physical defaults follow the ordered-wire runs
# (N_M = 5000, a = 10 nm, 200 x 400 nm cross-section, eps = 3, 1601 modes).
DEFAULTS = {
    "wire": {
        "n_molecules": 5000,
        "spacing_nm": 10.0,
        "l_y_nm": 200.0,
        "l_z_nm": 400.0,
        "epsilon": 3.0,
        "exciton_energy_eV": 2.0,
    },
    "disorder": {"sigma_m_eV": 0.0, "sigma_a_nm": 0.0},
    "coupling": {"rabi_splitting_eV": 0.1},
    "wavepacket": {"sigma_x_nm": 60.0, "mean_momentum_per_nm": 0.0, "center_nm": None},
    "modes": {"count": 1601, "cutoff_eV": None, "directionality": "bidirectional"},
    "time": {"t_max_fs": 5000.0, "dt_fs": 10.0, "snapshots_fs": []},
    "ensemble": {"realizations": 1, "seed": 0, "workers": 1},
    "output": {
        "path": "out",
        "per_realization": False,
        "save_realizations": False,
        "spectrum_cache": None,
        "dump_hamiltonian": False,
    },
    "limits": {"max_dimension": 8000},
}

_UNIT_SUFFIXES = ("per_nm", "nm", "um", "mm", "m", "eV", "meV", "ev", "fs", "ps", "s")
_INT_KEYS = {("wire", "n_molecules"), ("modes", "count"), ("ensemble", "realizations"),
             ("ensemble", "seed"), ("ensemble", "workers"), ("limits", "max_dimension")}
_BOOL_KEYS = {("output", "per_realization"), ("output", "save_realizations"), ("output", "dump_hamiltonian")}
_STR_KEYS = {("modes", "directionality"), ("output", "path"), ("output", "spectrum_cache")}


def _split_unit(key: str):
    for suffix in _UNIT_SUFFIXES:
        if key.endswith("_" + suffix):
            return key[: -len(suffix) - 1], suffix
    return key, None


def _unknown_key_message(section: str, key: str) -> str:
    base, unit = _split_unit(key)
    if unit is not None:
        for known in DEFAULTS[section]:
            kbase, kunit = _split_unit(known)
            if kbase == base and kunit != unit:
                return f"{section}.{key}: unit-suffix mismatch, expected '{known}'"
    return f"{section}.{key}: unknown key"


@dataclass(frozen=True)
class RunConfig:
    """Validated configuration; ``values`` is the full section -> key -> value mapping."""

    values: dict

    def __getitem__(self, section):
        return self.values[section]

    def canonical_json(self) -> str:
        return json.dumps(self.values, sort_keys=True, separators=(",", ":"))

    @property
    def config_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def replace(self, **section_updates) -> "RunConfig":
        overrides = [(section, key, value) for section, updates in section_updates.items()
                     for key, value in updates.items()]
        return build_config(self.values, overrides)

    def with_overrides(self, overrides) -> "RunConfig":
        return build_config(self.values, overrides)

    def wire(self) -> WireConfig:
        w = self.values["wire"]
        return WireConfig(
            n_molecules=w["n_molecules"],
            spacing=w["spacing_nm"],
            l_y=w["l_y_nm"],
            l_z=w["l_z_nm"],
            epsilon=w["epsilon"],
            mean_exciton_energy=w["exciton_energy_eV"],
        )

    def setup(self) -> SimulationSetup:
        v = self.values
        m = v["modes"]
        return SimulationSetup(
            wire=self.wire(),
            disorder=DisorderSpec(v["disorder"]["sigma_m_eV"], v["disorder"]["sigma_a_nm"]),
            coupling=CouplingSpec(v["coupling"]["rabi_splitting_eV"]),
            wavepacket=WavepacketSpec(
                v["wavepacket"]["sigma_x_nm"],
                v["wavepacket"]["mean_momentum_per_nm"],
                v["wavepacket"]["center_nm"],
            ),
            times=time_grid(v["time"]["t_max_fs"], v["time"]["dt_fs"]),
            mode_count=m["count"] if m["cutoff_eV"] is None else None,
            cutoff_energy=m["cutoff_eV"],
            directionality=m["directionality"],
            snapshot_times=tuple(float(t) for t in v["time"]["snapshots_fs"]),
            cache_dir=v["output"]["spectrum_cache"],
        )

    def mode_set(self):
        return self.setup().mode_set()


def parse_override(text: str):
    """``section.key=value`` with the value read as a TOML literal (bare strings allowed)."""
    if "=" not in text:
        raise ConfigError(f"override {text!r} is not of the form section.key=value")
    path, raw = text.split("=", 1)
    path = path.strip()
    if path.count(".") != 1:
        raise ConfigError(f"override key {path!r} must be section.key")
    section, key = path.split(".")
    try:
        value = tomllib.loads(f"v = {raw.strip()}")["v"]
    except tomllib.TOMLDecodeError:
        value = raw.strip()
    return section, key, value


def _check_type(section, key, value, problems):
    name = f"{section}.{key}"
    if value is None:
        return value
    if (section, key) in _BOOL_KEYS:
        if not isinstance(value, bool):
            problems.append(f"{name}: expected a boolean")
        return value
    if (section, key) in _STR_KEYS:
        if not isinstance(value, str):
            problems.append(f"{name}: expected a string")
        return value
    if (section, key) == ("time", "snapshots_fs"):
        if not isinstance(value, list) or not all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in value):
            problems.append(f"{name}: expected a list of times")
            return []
        return [float(t) for t in value]
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        problems.append(f"{name}: expected a number, got {value!r}")
        return value
    if (section, key) in _INT_KEYS:
        if float(value) != int(value):
            problems.append(f"{name}: expected an integer, got {value!r}")
            return value
        return int(value)
    return float(value)


def build_config(data: dict, overrides=()) -> RunConfig:
    """Merge ``data`` and ``overrides`` onto the defaults and validate everything.

    All violations are collected and raised together as one ``ConfigError``.
    """
    problems = []
    merged = copy.deepcopy(DEFAULTS)
    explicit = set()

    def put(section, key, value):
        if section not in DEFAULTS:
            problems.append(f"[{section}]: unknown section")
            return
        if key not in DEFAULTS[section]:
            problems.append(_unknown_key_message(section, key))
            return
        merged[section][key] = _check_type(section, key, value, problems)
        explicit.add((section, key))

    for section, body in (data or {}).items():
        if not isinstance(body, dict):
            problems.append(f"{section}: expected a table")
            continue
        for key, value in body.items():
            put(section, key, value)
    for item in overrides:
        section, key, value = parse_override(item) if isinstance(item, str) else item
        # an override of one truncation form replaces the other
        if (section, key) == ("modes", "cutoff_eV") and value is not None:
            merged["modes"]["count"] = None
        elif (section, key) == ("modes", "count") and value is not None:
            merged["modes"]["cutoff_eV"] = None
        put(section, key, value)

    if problems:
        raise ConfigError(problems[0], problems)
    _validate(merged, explicit, problems)
    if problems:
        raise ConfigError(problems[0], problems)
    return RunConfig(merged)


def _validate(v, explicit, problems):
    w, m, t = v["wire"], v["modes"], v["time"]
    if w["n_molecules"] < 1:
        problems.append("wire.n_molecules must be >= 1")
    for key in ("spacing_nm", "l_y_nm", "l_z_nm", "exciton_energy_eV"):
        if not w[key] > 0:
            problems.append(f"wire.{key} must be > 0")
    if not w["epsilon"] >= 1:
        problems.append("wire.epsilon must be >= 1")
    for key in ("sigma_m_eV", "sigma_a_nm"):
        if not v["disorder"][key] >= 0:
            problems.append(f"disorder.{key} must be >= 0")
    if not v["coupling"]["rabi_splitting_eV"] >= 0:
        problems.append("coupling.rabi_splitting_eV must be >= 0")
    if not v["wavepacket"]["sigma_x_nm"] > 0:
        problems.append("wavepacket.sigma_x_nm must be > 0 (nm)")

    try:
        direction = Directionality(m["directionality"])
    except ValueError:
        problems.append(f"modes.directionality must be one of {[d.value for d in Directionality]}")
        direction = None
    if m["cutoff_eV"] is not None:
        if ("modes", "count") in explicit and m["count"] is not None:
            problems.append("modes: give either count or cutoff_eV, not both")
        m["count"] = None
    elif m["count"] is None:
        problems.append("modes: need count or cutoff_eV")
    else:
        if m["count"] < 1:
            problems.append("modes.count must be >= 1")
        elif direction is Directionality.BIDIRECTIONAL and m["count"] % 2 == 0:
            problems.append(f"modes.count: mode count must be odd for bidirectional sets (got {m['count']})")

    if not t["dt_fs"] > 0 or not t["t_max_fs"] > 0:
        problems.append("time.dt_fs and time.t_max_fs must be > 0")
    else:
        n = round(t["t_max_fs"] / t["dt_fs"])
        if not math.isclose(n * t["dt_fs"], t["t_max_fs"], rel_tol=1e-9):
            problems.append("time.t_max_fs must be a multiple of time.dt_fs")
    if any(s < 0 for s in t["snapshots_fs"]):
        problems.append("time.snapshots_fs must be >= 0")

    e = v["ensemble"]
    if e["realizations"] < 1:
        problems.append("ensemble.realizations must be >= 1")
    if e["workers"] < 1:
        problems.append("ensemble.workers must be >= 1")
    if not 0 <= e["seed"] < 2**64:
        problems.append("ensemble.seed must fit in 64 bits")

    if problems:
        return
    try:
        wire = WireConfig(w["n_molecules"], w["spacing_nm"], w["l_y_nm"], w["l_z_nm"], w["epsilon"],
                          w["exciton_energy_eV"])
        if m["cutoff_eV"] is not None and m["cutoff_eV"] < wire.min_cavity_energy:
            problems.append(
                f"modes.cutoff_eV={m['cutoff_eV']} is below the minimum cavity energy {wire.min_cavity_energy:.4f} eV"
            )
        center = v["wavepacket"]["center_nm"]
        if center is not None and not 0 <= center <= wire.length:
            problems.append(f"wavepacket.center_nm must lie within [0, {wire.length}] nm")
    except ConfigError as exc:
        problems.extend(exc.violations)


def load_toml(path) -> dict:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file {path} not found") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: malformed TOML ({exc})") from exc


def parse_config(path, overrides=()) -> RunConfig:
    return build_config(load_toml(path), overrides)

