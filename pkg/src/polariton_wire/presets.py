"""Named experiments: parameter sweeps over the wire model and their derived tables.

Each preset has a ``desk`` tier (N_M <= 1000, N_c <= 201, <= 25 realizations)
and a ``full`` tier at reference system sizes (N_M up to 20000).
"""

from __future__ import annotations

import json
import logging
import time
from pathlib import Path

import numpy as np

from polariton_wire.config import RunConfig, build_config
from polariton_wire.errors import ConfigError, IntegrityError
from polariton_wire.io import (
    MANIFEST_NAME,
    read_csv,
    sha256_file,
    verify_manifest,
    write_csv,
    write_failure_marker,
    write_manifest,
)
from polariton_wire.observables import (
    analytic_photon_weight,
    bin_sites,
    infinite_time_photon_weights,
    right_tail_probability,
    truncation_error,
    propagate_error_uncertainty,
)
from polariton_wire.runner import check_resources, run_config, run_info
from polariton_wire.spectrum import diagonalize
from polariton_wire.hamiltonian import assemble
from polariton_wire.disorder import sample_realization
from polariton_wire.transport import ballistic_fit, classify_shape
from polariton_wire.units import wavevector_at_energy
from polariton_wire.wavepacket import gaussian_initial_state

log = logging.getLogger(__name__)

TIERS = ("desk", "full")
SNAPSHOT_TIMES_FS = [500.0, 1000.0, 2000.0, 5000.0]
BIN_SIZE = 50

# (wire sizes, mode count) per tier
SIZE_SWEEP = {"desk": ([250, 500, 1000], 201), "full": ([1000, 5000, 10000, 15000, 20000], 1601)}
# (wire sizes, swept mode counts, reference mode count) per tier
CUTOFF_SWEEP = {
    "desk": ([500], [1, 5, 11, 21, 25, 31, 41, 51, 101, 201], 401),
    "full": ([5000, 10000, 20000], [1, 21, 51, 101, 151, 201, 401, 801], 1601),
}


class PresetRun:
    """Collects the files and per-run metadata of one preset invocation."""

    def __init__(self, name, tier, out_dir, base_overrides, run_overrides):
        self.name = name
        self.tier = tier
        self.out_dir = Path(out_dir)
        self.base_overrides = list(base_overrides)
        self.run_overrides = list(run_overrides)
        self.files = []
        self.runs = {}
        self.extra = {}

    def config(self, **sections) -> RunConfig:
        """Preset values, then user overrides, then the run-level flags (seed, workers, ...)."""
        cfg = build_config({}, self.base_overrides)
        cfg = cfg.replace(**sections) if sections else cfg
        return cfg.with_overrides(self.run_overrides) if self.run_overrides else cfg

    def run(self, label, cfg, extra_weights=None):
        result, files, info = run_config(cfg, self.out_dir / label, extra_weights)
        self.files.extend(files)
        self.runs[label] = info
        return result

    def table(self, name, header, rows):
        self.files.append(write_csv(self.out_dir / name, header, rows))


def _validate_plan(configs):
    for cfg in configs:
        check_resources(cfg)


# -- reference handling -----------------------------------------------------------


def pinned_reference(ctx: PresetRun, label: str, cfg: RunConfig):
    """Produce or reuse a reference run in its own directory with its own manifest.

    An existing reference is reused only if its manifest carries the same
    config hash and every checksum verifies; consumers record its hash.
    """
    ref_dir = ctx.out_dir / label
    manifest_path = ref_dir / MANIFEST_NAME
    if manifest_path.exists():
        try:
            manifest = verify_manifest(ref_dir)
            if manifest["runs"]["reference"]["config_hash"] == cfg.config_hash:
                log.info("reusing pinned reference %s", ref_dir)
                data = read_csv(ref_dir / "reference" / "trajectory.csv")
                return data, sha256_file(manifest_path)
        except (KeyError, ValueError, IntegrityError):
            log.warning("stale reference in %s; regenerating", ref_dir)
    start = time.time()
    _, files, info = run_config(cfg, ref_dir / "reference")
    write_manifest(ref_dir, {"preset": ctx.name, "tier": ctx.tier, "role": "reference",
                             "runs": {"reference": info}, "wall_time_s": round(time.time() - start, 3)}, files)
    data = read_csv(ref_dir / "reference" / "trajectory.csv")
    return data, sha256_file(manifest_path)


def _error_rows(result, ref):
    return propagate_error_uncertainty(result.d_mean, result.d_std, ref["d_mean"], ref["d_std"])


# -- presets --------------------------------------------------------------------------


def size_sweep(ctx: PresetRun):
    """Ordered wires of several lengths at fixed mode count."""
    sizes, n_c = SIZE_SWEEP[ctx.tier]
    configs = [ctx.config(wire={"n_molecules": n}, modes={"count": n_c}) for n in sizes]
    _validate_plan(configs)
    rows = []
    for n, cfg in zip(sizes, configs):
        res = ctx.run(f"n{n}", cfg)
        omega = cfg["coupling"]["rabi_splitting_eV"]
        fit = ballistic_fit(res.times, res.d_mean, omega)
        rows.append([n, ctx.runs[f"n{n}"]["realized_cutoff_eV"], fit["slope_per_fs"], fit["r_squared"],
                     fit["window_end_fs"], fit["plateau"]])
    ctx.table("shape.csv", ["n_molecules", "cutoff_eV", "slope_per_fs", "r_squared", "window_end_fs", "plateau"], rows)


def cutoff_sweep(ctx: PresetRun):
    """Ordered truncation error versus mode count against a high-N_c reference."""
    sizes, counts, ref_count = CUTOFF_SWEEP[ctx.tier]
    rows = []
    plan = [(n, ctx.config(wire={"n_molecules": n}, modes={"count": c})) for n in sizes for c in counts]
    refs = {n: ctx.config(wire={"n_molecules": n}, modes={"count": ref_count}) for n in sizes}
    _validate_plan([c for _, c in plan] + list(refs.values()))
    pins = {}
    for n in sizes:
        ref, digest = pinned_reference(ctx, f"reference_n{n}", refs[n])
        pins[f"n{n}"] = {"manifest_sha256": digest, "config_hash": refs[n].config_hash}
        for cfg in (c for m, c in plan if m == n):
            count = cfg["modes"]["count"]
            res = ctx.run(f"n{n}_nc{count}", cfg)
            err, unc = _error_rows(res, ref)
            rows.append([n, count, ctx.runs[f"n{n}_nc{count}"]["realized_cutoff_eV"], err, unc])
    ctx.extra["references"] = pins
    ctx.table("errors.csv", ["n_molecules", "n_modes", "cutoff_eV", "error", "error_uncertainty"], rows)


def disorder_sweep(ctx: PresetRun):
    """Ensemble-averaged truncation error under energetic disorder."""
    omega = 0.1
    if ctx.tier == "desk":
        n, counts, ref_count, ratios, reals = 500, [1, 21, 51, 101], 201, [0.2, 0.5], 25
    else:
        n, counts, ref_count, ratios, reals = 5000, [1, 21, 151, 201, 401, 801], 1601, [0.1, 0.2, 0.5, 1.0], 100
    common = dict(wire={"n_molecules": n}, coupling={"rabi_splitting_eV": omega},
                  time={"t_max_fs": 1000.0, "dt_fs": 10.0}, ensemble={"realizations": reals})
    rows = []
    pins = {}
    for ratio in ratios:
        dis = {"sigma_m_eV": round(ratio * omega, 12), "sigma_a_nm": 1.0}
        ref_cfg = ctx.config(**common, disorder=dis, modes={"count": ref_count})
        cfgs = [ctx.config(**common, disorder=dis, modes={"count": c}) for c in counts]
        _validate_plan([ref_cfg, *cfgs])
        tag = f"s{ratio:g}"
        ref, digest = pinned_reference(ctx, f"reference_{tag}", ref_cfg)
        pins[tag] = {"manifest_sha256": digest, "config_hash": ref_cfg.config_hash}
        for cfg in cfgs:
            count = cfg["modes"]["count"]
            label = f"{tag}_nc{count}"
            res = ctx.run(label, cfg)
            err, unc = _error_rows(res, ref)
            rows.append([ratio, count, ctx.runs[label]["realized_cutoff_eV"], err, unc,
                         res.photon_content_mean, res.photon_content_std])
    ctx.extra["references"] = pins
    ctx.table("errors.csv", ["sigma_ratio", "n_modes", "cutoff_eV", "error", "error_uncertainty",
                             "photon_content_mean", "photon_content_std"], rows)


def _ordered_weight_extras(cfg, result):
    """Infinite-time and analytic weights for an ordered run (same mode order)."""
    setup = cfg.setup()
    modes = setup.mode_set()
    real = sample_realization(setup.wire, setup.disorder, 0)
    spec = diagonalize(assemble(real, modes, setup.coupling))
    psi0 = gaussian_initial_state(real, setup.wavepacket, setup.wire, len(modes))
    inf = infinite_time_photon_weights(spec, psi0, setup.wire.n_molecules)
    ana = analytic_photon_weight(modes, setup.wavepacket, setup.wire.mean_exciton_energy,
                                 setup.coupling.rabi_splitting)
    return {"weight_infinite_time": inf.weights, "weight_analytic": ana,
            "argmax_indices": list(inf.argmax)}


def photon_weights(ctx: PresetRun):
    """Time-averaged photon mode weights, ordered and disordered, off-resonant packet."""
    e_m = 2.2
    if ctx.tier == "desk":
        n, n_c, reals = 500, 101, 10
    else:
        n, n_c, reals = 5000, 401, 100
    probe = ctx.config(wire={"n_molecules": n, "exciton_energy_eV": e_m})
    wire = probe.wire()
    q_bar = wavevector_at_energy(2.1, wire.q0, wire.epsilon)
    q_r = wavevector_at_energy(e_m, wire.q0, wire.epsilon)
    common = dict(wire={"n_molecules": n, "exciton_energy_eV": e_m}, modes={"count": n_c},
                  time={"t_max_fs": 5000.0, "dt_fs": 5.0})
    plan = []
    for omega in (0.05, 0.1, 0.2, 0.3):
        for qb, qtag in ((0.0, "q0"), (q_bar, "q2.1eV")):
            for sx in (60.0, 120.0):
                plan.append((f"ordered_om{omega:g}_{qtag}_sx{sx:g}", None, omega, qb, sx))
    for sm in (0.02, 0.05):
        for omega in (0.05, 0.1, 0.2):
            plan.append((f"disordered_sm{sm:g}_om{omega:g}", sm, omega, q_bar, 120.0))
    cfgs = []
    for label, sm, omega, qb, sx in plan:
        sections = dict(common, coupling={"rabi_splitting_eV": omega},
                        wavepacket={"sigma_x_nm": sx, "mean_momentum_per_nm": qb})
        if sm is not None:
            sections.update(disorder={"sigma_m_eV": sm, "sigma_a_nm": 1.0}, ensemble={"realizations": reals})
        cfgs.append(ctx.config(**sections))
    _validate_plan(cfgs)
    rows = []
    for (label, sm, omega, qb, sx), cfg in zip(plan, cfgs):
        ordered = sm is None
        res = ctx.run(label, cfg, _ordered_weight_extras if ordered else None)
        modes = cfg.mode_set()
        k = int(np.argmax(res.w_mean))
        rows.append([label, omega, qb, sx, modes.q[k], modes.energies[k],
                     abs(modes.q[k] - q_r) / modes.spacing, abs(modes.q[k] - qb) / modes.spacing])
    ctx.extra.update(q_bar_per_nm=q_bar, q_resonant_per_nm=q_r)
    ctx.table("argmax.csv", ["label", "omega_r_eV", "q_bar_per_nm", "sigma_x_nm", "argmax_q_per_nm",
                             "argmax_energy_eV", "spacings_from_q_r", "spacings_from_q_bar"], rows)


def unidirectional(ctx: PresetRun):
    """Bidirectional versus q >= 0 fields under disorder: binned packets and right tails."""
    if ctx.tier == "desk":
        n, n_c, reals = 1000, 201, 25
    else:
        n, n_c, reals = 5000, 401, 100
    common = dict(wire={"n_molecules": n}, coupling={"rabi_splitting_eV": 0.1},
                  disorder={"sigma_m_eV": 0.04, "sigma_a_nm": 1.0}, wavepacket={"sigma_x_nm": 120.0},
                  time={"t_max_fs": 5000.0, "dt_fs": 10.0, "snapshots_fs": SNAPSHOT_TIMES_FS},
                  ensemble={"realizations": reals})
    bi = ctx.config(**common, modes={"count": n_c})
    cutoff = bi.mode_set().realized_cutoff
    uni = ctx.config(**common, modes={"cutoff_eV": cutoff, "directionality": "nonnegative-only"})
    _validate_plan([bi, uni])
    res_bi = ctx.run("bidirectional", bi)
    res_uni = ctx.run("unidirectional", uni)

    wire = bi.wire()
    x0 = bi.setup().wavepacket.resolved_center(wire)
    threshold = x0 + bi["wavepacket"]["sigma_x_nm"]
    bin_rows, tail_rows = [], []
    for t in sorted(res_bi.snapshot_mean):
        tails = []
        for res in (res_bi, res_uni):
            per_real = [right_tail_probability(r.snapshots[t], r.metadata["positions"], threshold)
                        for r in res.records]
            tails.append((float(np.mean(per_real)), float(np.std(per_real, ddof=1)) if len(per_real) > 1 else 0.0))
        ratio = tails[1][0] / tails[0][0] if tails[0][0] > 0 else float("inf")
        tail_rows.append([t, threshold, tails[0][0], tails[0][1], tails[1][0], tails[1][1], ratio])
        bm, bs = bin_sites(res_bi.snapshot_mean[t], BIN_SIZE), bin_sites(res_bi.snapshot_std[t] ** 2, BIN_SIZE) ** 0.5
        um, us = bin_sites(res_uni.snapshot_mean[t], BIN_SIZE), bin_sites(res_uni.snapshot_std[t] ** 2, BIN_SIZE) ** 0.5
        for b in range(len(bm)):
            bin_rows.append([t, b, b * BIN_SIZE * wire.spacing, bm[b], bs[b], um[b], us[b]])
    ctx.table("bins.csv", ["time_fs", "bin_index", "bin_start_nm", "p_bi_mean", "p_bi_std",
                           "p_uni_mean", "p_uni_std"], bin_rows)
    ctx.table("right_tail.csv", ["time_fs", "threshold_nm", "p_bi_mean", "p_bi_std", "p_uni_mean",
                                 "p_uni_std", "ratio"], tail_rows)


def det_trajectories(ctx: PresetRun):
    """Ensemble-averaged d(t) across disorder strengths."""
    if ctx.tier == "desk":
        n, n_c, reals = 500, 101, 10
        grid = [(0.1, sm) for sm in (0.005, 0.02, 0.05)]
    else:
        n, n_c, reals = 5000, 1001, 100
        grid = [(om, round(r * om, 12)) for om in (0.05, 0.1) for r in (0.05, 0.1, 0.2, 0.5, 0.8, 1.0, 2.0)]
    cfgs = [ctx.config(wire={"n_molecules": n}, modes={"count": n_c}, coupling={"rabi_splitting_eV": om},
                       disorder={"sigma_m_eV": sm, "sigma_a_nm": 1.0}, ensemble={"realizations": reals})
            for om, sm in grid]
    _validate_plan(cfgs)
    rows = []
    for (om, sm), cfg in zip(grid, cfgs):
        label = f"om{om:g}_sm{sm:g}"
        res = ctx.run(label, cfg)
        fit = classify_shape(res.times, res.d_mean, om)
        rows.append([label, om, sm, fit["shape"], fit["breakpoint_fs"], fit["slope_before"],
                     fit["slope_after"], fit["r_squared"]])
    ctx.table("shape.csv", ["label", "omega_r_eV", "sigma_m_eV", "shape", "breakpoint_fs", "slope_before",
                            "slope_after", "r_squared"], rows)


PRESETS = {
    "size-sweep": size_sweep,
    "cutoff-sweep": cutoff_sweep,
    "disorder-sweep": disorder_sweep,
    "photon-weights": photon_weights,
    "unidirectional": unidirectional,
    "det-trajectories": det_trajectories,
}


def run_preset(name, out_dir, tier="desk", overrides=(), run_overrides=()) -> dict:
    """Run preset ``name`` into ``out_dir`` and return its manifest body.

    ``overrides`` adjust the preset's base physics (sweep axes stay fixed);
    ``run_overrides`` (seed, realizations, workers) apply to every run.
    """
    if name not in PRESETS:
        raise ConfigError(f"unknown preset {name!r}; choose from {sorted(PRESETS)}")
    if tier not in TIERS:
        raise ConfigError(f"unknown tier {tier!r}; choose from {TIERS}")
    ctx = PresetRun(name, tier, out_dir, overrides, run_overrides)
    ctx.out_dir.mkdir(parents=True, exist_ok=True)
    start = time.time()
    body = {"preset": name, "tier": tier, "overrides": list(map(str, overrides))}
    try:
        PRESETS[name](ctx)
    except BaseException as exc:
        write_failure_marker(ctx.out_dir, exc, body)
        raise
    body.update(runs=ctx.runs, wall_time_s=round(time.time() - start, 3), **ctx.extra)
    write_manifest(ctx.out_dir, body, ctx.files)
    return body


def run_single(cfg: RunConfig, out_dir) -> dict:
    """Run a single configuration file (no preset) with its own manifest."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    start = time.time()
    body = {"preset": None, "runs": {}}
    try:
        _, files, info = run_config(cfg, out_dir / "run")
    except BaseException as exc:
        write_failure_marker(out_dir, exc, {"config": cfg.values, "config_hash": cfg.config_hash})
        raise
    body["runs"]["run"] = info
    body["wall_time_s"] = round(time.time() - start, 3)
    write_manifest(out_dir, body, files)
    return body


def describe(name) -> str:
    return (PRESETS[name].__doc__ or "").strip()


def dump_plan(name) -> str:
    return json.dumps({"preset": name, "tiers": TIERS, "description": describe(name)})
