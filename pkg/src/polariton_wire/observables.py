"""Wave packet width, populations, photon mode weights and truncation error."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from polariton_wire.errors import ConfigError, ObservableError
from polariton_wire.units import CavityModeSet

MIN_MOLECULAR_POPULATION = 1e-12
DEGENERACY_TOL = 1e-10  # eV


@dataclass(eq=False)
class TrajectoryRecord:
    """Observables of one realization on a fixed time grid."""

    times: np.ndarray  # fs
    width: np.ndarray  # d(t), molecule counts
    p_mol: np.ndarray
    photon_weight_sums: np.ndarray  # sum_t |<q|psi(t)>|^2 per mode, unnormalized
    snapshots: dict = field(default_factory=dict)  # time (fs) -> per-site |c_n|^2
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if np.any(np.diff(self.times) <= 0):
            raise ConfigError("trajectory times must be strictly increasing")


@dataclass(frozen=True, eq=False)
class PhotonWeights:
    weights: np.ndarray  # normalized to max 1
    raw: np.ndarray
    argmax: tuple  # every mode index attaining the maximum, in mode order


def molecular_population(psi, n_molecules: int):
    """Sum of |c_n|^2 over molecular sites; ``psi`` may be a (n_t, dim) batch."""
    psi = np.asarray(psi)
    return np.sum(np.abs(psi[..., :n_molecules]) ** 2, axis=-1)


def photon_populations(psi, n_molecules: int):
    psi = np.asarray(psi)
    return np.abs(psi[..., n_molecules:]) ** 2


def wavepacket_width(psi, positions, x0: float, spacing: float):
    """Root-mean-square displacement from ``x0`` in units of ``spacing``.

    The molecular probabilities are conditioned on the exciton being on a
    molecule (divided by P_mol).
    """
    positions = np.asarray(positions, dtype=float)
    n = len(positions)
    p = np.abs(np.asarray(psi)[..., :n]) ** 2
    p_mol = p.sum(axis=-1)
    if np.any(p_mol <= MIN_MOLECULAR_POPULATION):
        raise ObservableError("wave packet width undefined: molecular population vanishes")
    x2 = (p @ ((positions - x0) ** 2)) / p_mol
    return np.sqrt(x2) / spacing


def _normalize_weights(raw) -> PhotonWeights:
    raw = np.asarray(raw, dtype=float)
    peak = raw.max() if raw.size else 0.0
    if not peak > 0:
        raise ObservableError("photon weights are identically zero (decoupled system?)")
    ties = tuple(int(i) for i in np.flatnonzero(raw == peak))
    return PhotonWeights(raw / raw[ties[0]], raw, ties)


def photon_weight_trajectory(states, n_molecules: int) -> PhotonWeights:
    """Time-summed photon mode weights from a (n_t, dim) state series, max-normalized."""
    states = np.asarray(states)
    if states.ndim != 2 or states.shape[0] < 2:
        raise ConfigError("need at least two time samples")
    return _normalize_weights(photon_populations(states, n_molecules).sum(axis=0))


def eigenvalue_clusters(eigenvalues, tol: float = DEGENERACY_TOL) -> np.ndarray:
    """Start indices of runs of (sorted) eigenvalues closer than ``tol``."""
    gaps = np.diff(eigenvalues)
    return np.concatenate(([0], np.flatnonzero(gaps >= tol) + 1))


def infinite_time_photon_weights(spec, psi0, n_molecules: int, tol: float = DEGENERACY_TOL) -> PhotonWeights:
    """Long-time average of |<q|psi(t)>|^2 from the eigen-expansion of psi0.

    Degenerate eigenvalues are grouped and their projector applied as a
    whole, since cross terms inside a degenerate cluster do not dephase.
    """
    c = spec.eigenvectors.conj().T @ np.asarray(psi0, dtype=complex)
    photon_rows = spec.eigenvectors[n_molecules:, :] * c[None, :]
    starts = eigenvalue_clusters(spec.eigenvalues, tol)
    projected = np.add.reduceat(photon_rows, starts, axis=1)
    return _normalize_weights(np.sum(np.abs(projected) ** 2, axis=1))


def hopfield_molecular_fraction(mode_energy, e_m: float, omega_r: float):
    """Molecular content of the lower polariton at photon energy ``mode_energy``."""
    if not omega_r > 0:
        raise ConfigError("hopfield fraction needs omega_r > 0")
    delta = np.asarray(mode_energy, dtype=float) - e_m
    frac = 0.5 * (1 + delta / np.sqrt(delta**2 + omega_r**2))
    return float(frac) if frac.ndim == 0 else frac


def analytic_photon_weight(modes: CavityModeSet, wavepacket, e_m: float, omega_r: float) -> np.ndarray:
    """Ordered-wire long-time photon weights, normalized to max 1.

    Product of the lower-polariton factor Pi(1 - Pi) and the momentum
    distribution of the initial packet. With sigma_x the rms width of the site
    probability that distribution is exp(-2 sigma_x^2 (q - q0bar)^2).
    """
    pi = hopfield_molecular_fraction(modes.energies, e_m, omega_r)
    w = pi * (1 - pi) * np.exp(-2 * wavepacket.sigma_x**2 * (modes.q - wavepacket.mean_momentum) ** 2)
    return w / w.max()


def _check_grids(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise ConfigError(f"time grids differ: {a.shape} vs {b.shape}")
    return a, b


def truncation_error(d, d_ref) -> float:
    """Mean relative deviation of d(t) from a converged reference."""
    d, d_ref = _check_grids(d, d_ref)
    if np.any(d_ref <= 0):
        raise ConfigError("reference width must be positive at every time")
    return float(np.mean(np.abs(d - d_ref) / d_ref))


def propagate_error_uncertainty(d_mean, d_std, d_ref_mean, d_ref_std, coverage: float = 2.0):
    """Truncation error and its first-order uncertainty.

    Input uncertainties are ``coverage`` standard deviations (2 by default)
    and time points are treated as independent.
    """
    d, r = _check_grids(d_mean, d_ref_mean)
    sd, sr = _check_grids(d_std, d_ref_std)
    _check_grids(d, sd)
    n = d.size
    s = np.sign(d - r)
    grad_d = s / (n * r)
    grad_r = -s * d / (n * r**2)
    var = np.sum((grad_d * coverage * sd) ** 2) + np.sum((grad_r * coverage * sr) ** 2)
    return truncation_error(d, r), math.sqrt(float(var))


def right_tail_probability(site_probabilities, positions, threshold: float):
    """Probability of an excited molecule strictly beyond ``threshold`` (nm)."""
    return float(np.sum(np.asarray(site_probabilities)[np.asarray(positions) > threshold]))


def bin_sites(site_probabilities, bin_size: int = 50) -> np.ndarray:
    """Sum site probabilities over consecutive groups of ``bin_size`` molecules."""
    p = np.asarray(site_probabilities, dtype=float)
    starts = np.arange(0, len(p), bin_size)
    return np.add.reduceat(p, starts)
