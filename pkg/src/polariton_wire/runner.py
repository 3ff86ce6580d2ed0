"""Execute one configured run and write its data files."""

from __future__ import annotations

import logging
from pathlib import Path

from polariton_wire.disorder import derive_seed, sample_realization
from polariton_wire.ensemble import run_ensemble
from polariton_wire.errors import ResourceGuardError
from polariton_wire.hamiltonian import assemble, implied_dipole_metadata
from polariton_wire.io import (
    photon_weight_table,
    write_json,
    write_realization_csv,
    write_record_csv,
    write_trajectory_csv,
)

log = logging.getLogger(__name__)


def check_resources(cfg) -> int:
    """Refuse runs whose Hamiltonian exceeds ``limits.max_dimension``."""
    dim = cfg["wire"]["n_molecules"] + len(cfg.mode_set())
    limit = cfg["limits"]["max_dimension"]
    if dim > limit:
        gib = 3 * 16 * dim * dim / 2**30
        raise ResourceGuardError(
            f"matrix dimension {dim} exceeds limits.max_dimension={limit} "
            f"(dense eigendecomposition needs roughly {gib:.1f} GiB); "
            f"rerun with --override limits.max_dimension={dim} if the machine can take it"
        )
    return dim


def run_info(cfg, result=None) -> dict:
    modes = cfg.mode_set()
    info = {
        "config": cfg.values,
        "config_hash": cfg.config_hash,
        "n_modes": len(modes),
        "realized_cutoff_eV": float(f"{modes.realized_cutoff:.4g}"),
        "dimension": cfg["wire"]["n_molecules"] + len(modes),
        "implied": implied_dipole_metadata(cfg.wire(), cfg.setup().coupling),
    }
    if result is not None:
        info.update(
            n_realizations=result.n_realizations,
            failed_realizations=result.failed_realizations,
            flags=result.flags,
            photon_content_mean=result.photon_content_mean,
            photon_content_std=result.photon_content_std,
        )
    return info


def run_config(cfg, out_dir, extra_weights=None):
    """Run the ensemble described by ``cfg`` and write its files into ``out_dir``.

    Returns ``(result, files, info)``. ``extra_weights`` may be a callable
    ``(cfg, result) -> dict`` whose output is merged into the weights sidecar.
    """
    out_dir = Path(out_dir)
    check_resources(cfg)
    setup = cfg.setup()
    ens = cfg["ensemble"]
    log.info("running %s: N_M=%d, %d modes, %d realizations", out_dir.name,
             setup.wire.n_molecules, len(setup.mode_set()), ens["realizations"])
    result = run_ensemble(setup, ens["realizations"], ens["seed"], ens["workers"])
    modes = setup.mode_set()

    files = [write_trajectory_csv(out_dir / "trajectory.csv", result)]
    extra = extra_weights(cfg, result) if extra_weights else None
    files.append(write_json(out_dir / "photon_weights.json", photon_weight_table(result, modes, extra)))

    out = cfg["output"]
    if out["per_realization"]:
        for i, rec in enumerate(result.records):
            files.append(write_record_csv(out_dir / "realizations" / f"trajectory_{i:04d}.csv", rec))
    if out["save_realizations"]:
        for i in range(ens["realizations"]):
            real = sample_realization(setup.wire, setup.disorder, derive_seed(ens["seed"], i))
            files.append(write_realization_csv(out_dir / "realizations" / f"sites_{i:04d}.csv", real))
    if out["dump_hamiltonian"]:
        real = sample_realization(setup.wire, setup.disorder, derive_seed(ens["seed"], 0))
        path = out_dir / "hamiltonian_0000.bin"
        path.parent.mkdir(parents=True, exist_ok=True)
        assemble(real, modes, setup.coupling).dump(path)
        files.append(path)
    return result, files, run_info(cfg, result)
