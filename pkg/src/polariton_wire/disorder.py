"""Seeded static disorder: Gaussian site energies and positions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from polariton_wire.errors import ConfigError
from polariton_wire.units import WireConfig

RNG_ALGORITHM = "numpy.PCG64+ziggurat-normal;seeds=splitmix64"

_MASK64 = (1 << 64) - 1
_GOLDEN_GAMMA = 0x9E3779B97F4A7C15


@dataclass(frozen=True)
class DisorderSpec:
    sigma_m: float = 0.0  # eV
    sigma_a: float = 0.0  # nm

    def __post_init__(self):
        if not (self.sigma_m >= 0 and self.sigma_a >= 0):
            raise ConfigError(f"disorder widths must be >= 0, got {self}")

    @property
    def is_ordered(self) -> bool:
        return self.sigma_m == 0 and self.sigma_a == 0


@dataclass(frozen=True, eq=False)
class MolecularRealization:
    energies: np.ndarray  # eV
    positions: np.ndarray  # nm, site order, unsorted
    seed: int

    def __len__(self):
        return len(self.energies)

    def to_columns(self) -> dict:
        return {
            "site": np.arange(1, len(self.energies) + 1),
            "energy_eV": self.energies,
            "position_nm": self.positions,
        }


def _splitmix64_finalize(z: int) -> int:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 & _MASK64
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB & _MASK64
    return z ^ (z >> 31)


def derive_seed(master_seed: int, realization_index: int) -> int:
    """Seed of realization ``realization_index`` within a run.

    This is the ``index + 1``-th output of a splitmix64 stream started at
    ``master_seed``, so it is injective in the index for a fixed master.
    """
    if realization_index < 0:
        raise ValueError("realization index must be >= 0")
    state = (int(master_seed) + (int(realization_index) + 1) * _GOLDEN_GAMMA) & _MASK64
    return _splitmix64_finalize(state)


def sample_realization(wire: WireConfig, spec: DisorderSpec, seed: int) -> MolecularRealization:
    n = wire.n_molecules
    lattice = np.arange(n, dtype=float) * wire.spacing
    if spec.is_ordered:
        return MolecularRealization(np.full(n, float(wire.mean_exciton_energy)), lattice, seed)

    rng = np.random.Generator(np.random.PCG64(int(seed) & _MASK64))
    energies = wire.mean_exciton_energy + spec.sigma_m * rng.standard_normal(n)
    positions = lattice + spec.sigma_a * rng.standard_normal(n)
    # square roots of E_n enter the coupling; redraw the (astronomically rare) non-positive ones
    bad = energies <= 0
    while bad.any():
        energies[bad] = wire.mean_exciton_energy + spec.sigma_m * rng.standard_normal(int(bad.sum()))
        bad = energies <= 0
    return MolecularRealization(energies, positions, seed)
