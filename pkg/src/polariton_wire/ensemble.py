"""Disorder ensembles: per-realization simulation and order-independent aggregation."""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from polariton_wire.disorder import DisorderSpec, derive_seed, sample_realization
from polariton_wire.errors import NumericalError, ObservableError
from polariton_wire.hamiltonian import CouplingSpec, assemble
from polariton_wire.observables import (
    TrajectoryRecord,
    molecular_population,
    photon_populations,
    propagate_error_uncertainty,
    wavepacket_width,
)
from polariton_wire.spectrum import SpectrumCache, diagonalize, evolve, propagate
from polariton_wire.units import Directionality, WireConfig, build_mode_set
from polariton_wire.wavepacket import WavepacketSpec, gaussian_initial_state

log = logging.getLogger(__name__)

MAX_FAILURE_FRACTION = 0.10


@dataclass(frozen=True)
class SimulationSetup:
    """Everything needed to simulate one realization, minus the seed."""

    wire: WireConfig
    disorder: DisorderSpec
    coupling: CouplingSpec
    wavepacket: WavepacketSpec
    times: tuple  # fs
    mode_count: int | None = None
    cutoff_energy: float | None = None
    directionality: str = Directionality.BIDIRECTIONAL.value
    snapshot_times: tuple = ()
    cache_dir: str | None = None

    def mode_set(self):
        return build_mode_set(self.wire, self.mode_count, self.cutoff_energy, self.directionality)

    @property
    def dimension(self) -> int:
        return self.wire.n_molecules + len(self.mode_set())


def run_realization(setup: SimulationSetup, seed: int) -> TrajectoryRecord:
    wire = setup.wire
    n = wire.n_molecules
    realization = sample_realization(wire, setup.disorder, seed)
    modes = setup.mode_set()

    cache = SpectrumCache(setup.cache_dir) if setup.cache_dir else None
    spec = None
    if cache is not None:
        key = SpectrumCache.key(realization, modes, setup.coupling)
        spec = cache.get(key)
    if spec is None:
        spec = diagonalize(assemble(realization, modes, setup.coupling))
        if cache is not None:
            cache.put(key, spec)

    psi0 = gaussian_initial_state(realization, setup.wavepacket, wire, len(modes))
    x0 = setup.wavepacket.resolved_center(wire)
    times = np.asarray(setup.times, dtype=float)
    width = np.empty(len(times))
    p_mol = np.empty(len(times))
    weight_sums = np.zeros(len(modes))
    norm_dev = 0.0
    for sl, states in evolve(spec, psi0, times):
        width[sl] = wavepacket_width(states, realization.positions, x0, wire.spacing)
        p_mol[sl] = molecular_population(states, n)
        weight_sums += photon_populations(states, n).sum(axis=0)
        norm_dev = max(norm_dev, float(np.max(np.abs(np.linalg.norm(states, axis=1) - 1))))
    if norm_dev > 1e-8:
        raise NumericalError(f"norm drift {norm_dev:.2e} during propagation (seed {seed})")

    snapshots = {}
    for t in setup.snapshot_times:
        psi_t = propagate(spec, psi0, t)
        snapshots[float(t)] = np.abs(psi_t[:n]) ** 2

    return TrajectoryRecord(
        times=times,
        width=width,
        p_mol=np.clip(p_mol, 0.0, 1.0),
        photon_weight_sums=weight_sums,
        snapshots=snapshots,
        metadata={"seed": int(seed), "max_norm_deviation": norm_dev, "positions": realization.positions},
    )


def compensated_sum(stack) -> np.ndarray:
    """Neumaier summation along axis 0; result is insensitive to row order."""
    stack = np.asarray(stack, dtype=float)
    total = np.zeros(stack.shape[1:])
    comp = np.zeros(stack.shape[1:])
    for row in stack:
        t = total + row
        big = np.abs(total) >= np.abs(row)
        comp += np.where(big, (total - t) + row, (row - t) + total)
        total = t
    return total + comp


def mean_and_std(stack):
    """Mean and (n-1)-denominator standard deviation along axis 0 (std 0 when n == 1)."""
    stack = np.asarray(stack, dtype=float)
    n = stack.shape[0]
    mean = compensated_sum(stack) / n
    if n < 2:
        return mean, np.zeros_like(mean)
    var = compensated_sum((stack - mean) ** 2) / (n - 1)
    return mean, np.sqrt(np.maximum(var, 0.0))


@dataclass(eq=False)
class EnsembleResult:
    n_realizations: int
    times: np.ndarray
    d_mean: np.ndarray
    d_std: np.ndarray
    pmol_mean: np.ndarray
    pmol_std: np.ndarray
    w_mean: np.ndarray  # per-mode, each realization normalized to max 1
    w_std: np.ndarray
    photon_content_mean: float  # time-averaged 1 - P_mol
    photon_content_std: float
    master_seed: int
    seeds: list
    failed_realizations: list = field(default_factory=list)
    snapshot_mean: dict = field(default_factory=dict)
    snapshot_std: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)
    records: list = field(default_factory=list)


def aggregate(records, master_seed: int = 0, failed=(), n_modes: int | None = None) -> EnsembleResult:
    """Reduce trajectory records to ensemble statistics.

    Records are reduced with compensated sums, so completion order does not
    change the result beyond rounding of the final division.
    """
    flags = []
    n = len(records)
    if n == 0:
        raise NumericalError("no successful realizations to aggregate")
    if n == 1:
        flags.append("single-realization: std reported as 0")
    times = records[0].times
    d_mean, d_std = mean_and_std([r.width for r in records])
    p_mean, p_std = mean_and_std([r.p_mol for r in records])

    w_rows = []
    for r in records:
        peak = r.photon_weight_sums.max() if r.photon_weight_sums.size else 0.0
        if peak > 0:
            w_rows.append(r.photon_weight_sums / peak)
        else:
            w_rows.append(np.zeros_like(r.photon_weight_sums))
            if "photon-weights-degenerate" not in flags:
                flags.append("photon-weights-degenerate")
    w_mean, w_std = mean_and_std(w_rows)

    content = np.array([[float(np.mean(1.0 - r.p_mol))] for r in records])
    c_mean, c_std = mean_and_std(content)

    snap_mean, snap_std = {}, {}
    for t in records[0].snapshots:
        snap_mean[t], snap_std[t] = mean_and_std([r.snapshots[t] for r in records])

    return EnsembleResult(
        n_realizations=n,
        times=times,
        d_mean=d_mean,
        d_std=d_std,
        pmol_mean=p_mean,
        pmol_std=p_std,
        w_mean=w_mean,
        w_std=w_std,
        photon_content_mean=float(c_mean[0]),
        photon_content_std=float(c_std[0]),
        master_seed=master_seed,
        seeds=[r.metadata.get("seed") for r in records],
        failed_realizations=list(failed),
        snapshot_mean=snap_mean,
        snapshot_std=snap_std,
        flags=flags,
        records=list(records),
    )


def _guarded(args):
    setup, index, seed = args
    try:
        return index, seed, run_realization(setup, seed), None
    except (NumericalError, ObservableError, np.linalg.LinAlgError) as exc:
        return index, seed, None, f"{type(exc).__name__}: {exc}"


def run_ensemble(setup: SimulationSetup, n_realizations: int, master_seed: int = 0, workers: int = 1) -> EnsembleResult:
    """Simulate ``n_realizations`` disorder samples and aggregate them.

    Realization ``i`` uses ``derive_seed(master_seed, i)``. Failed realizations
    are recorded and excluded; more than 10% failures aborts the run.
    """
    if n_realizations < 1:
        raise ValueError("n_realizations must be >= 1")
    seeds = [derive_seed(master_seed, i) for i in range(n_realizations)]
    jobs = [(setup, i, s) for i, s in enumerate(seeds)]

    outcomes = {}
    if setup.disorder.is_ordered:
        # every realization is identical; simulate once
        index, seed, record, err = _guarded(jobs[0])
        for i, s in enumerate(seeds):
            rec = None
            if record is not None:
                rec = TrajectoryRecord(record.times, record.width, record.p_mol, record.photon_weight_sums,
                                       record.snapshots, {**record.metadata, "seed": s})
            outcomes[i] = (s, rec, err)
    elif workers > 1 and n_realizations > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for index, seed, record, err in pool.map(_guarded, jobs):
                outcomes[index] = (seed, record, err)
    else:
        for job in jobs:
            index, seed, record, err = _guarded(job)
            outcomes[index] = (seed, record, err)

    records, failed = [], []
    for i in range(n_realizations):
        seed, record, err = outcomes[i]
        if record is None:
            log.warning("realization %d (seed %d) failed: %s", i, seed, err)
            failed.append({"index": i, "seed": seed, "error": err})
        else:
            records.append(record)
    if len(failed) > MAX_FAILURE_FRACTION * n_realizations:
        raise NumericalError(f"{len(failed)} of {n_realizations} realizations failed; aborting")
    return aggregate(records, master_seed, failed)


def compare_to_reference(result: EnsembleResult, reference: EnsembleResult):
    """Truncation error of ``result`` against ``reference`` with its 2-sigma uncertainty."""
    return propagate_error_uncertainty(result.d_mean, result.d_std, reference.d_mean, reference.d_std)


def time_grid(t_max: float, dt: float) -> tuple:
    n = int(round(t_max / dt))
    if not math.isclose(n * dt, t_max, rel_tol=1e-9, abs_tol=1e-9):
        raise ValueError(f"t_max={t_max} is not a multiple of dt={dt}")
    return tuple(float(i * dt) for i in range(n + 1))
