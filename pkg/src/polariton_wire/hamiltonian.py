"""Single-excitation light-matter Hamiltonian of the wire.

Basis order: molecular sites first, then photon modes in mode-set order.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass

import numpy as np

from polariton_wire.disorder import MolecularRealization
from polariton_wire.errors import ConfigError, DomainError, IntegrityError
from polariton_wire.units import CavityModeSet

_DUMP_MAGIC = b"PWHM"
_DUMP_VERSION = 1
_BASIS_TAG = b"MOL+PHOT"
_HEADER = struct.Struct("<4sIQQ8s")  # 32 bytes


@dataclass(frozen=True)
class CouplingSpec:
    rabi_splitting: float  # eV

    def __post_init__(self):
        if not self.rabi_splitting >= 0:
            raise ConfigError(f"rabi_splitting must be >= 0 eV, got {self.rabi_splitting}")


@dataclass(frozen=True, eq=False)
class HamiltonianMatrix:
    matrix: np.ndarray
    n_molecules: int
    n_modes: int

    @property
    def dimension(self) -> int:
        return self.n_molecules + self.n_modes

    @property
    def molecular_slice(self) -> slice:
        return slice(0, self.n_molecules)

    @property
    def photon_slice(self) -> slice:
        return slice(self.n_molecules, self.dimension)

    def dump(self, path) -> None:
        """Raw dump: 32-byte header then row-major little-endian complex128."""
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(_DUMP_MAGIC, _DUMP_VERSION, self.n_molecules, self.n_modes, _BASIS_TAG))
            fh.write(np.ascontiguousarray(self.matrix, dtype="<c16").tobytes())

    @classmethod
    def load(cls, path) -> "HamiltonianMatrix":
        with open(path, "rb") as fh:
            magic, version, n_mol, n_modes, tag = _HEADER.unpack(fh.read(_HEADER.size))
            if magic != _DUMP_MAGIC or version != _DUMP_VERSION or tag != _BASIS_TAG:
                raise IntegrityError(f"{path}: not a Hamiltonian dump (v{_DUMP_VERSION})")
            dim = n_mol + n_modes
            data = np.frombuffer(fh.read(), dtype="<c16")
        if data.size != dim * dim:
            raise IntegrityError(f"{path}: truncated matrix payload")
        return cls(data.reshape(dim, dim).astype(complex), int(n_mol), int(n_modes))


def coupling_element(e_n, x_n, q, mode_energy, omega_r, n_molecules):
    """Matrix element <1_n|H|q> (eV); broadcasts over array arguments."""
    e_n = np.asarray(e_n, dtype=float)
    mode_energy = np.asarray(mode_energy, dtype=float)
    if np.any(e_n <= 0) or np.any(mode_energy <= 0):
        raise DomainError("molecular and photon energies must be positive")
    if n_molecules < 1:
        raise DomainError("n_molecules must be >= 1")
    amplitude = 0.5 * omega_r * np.sqrt(e_n / (n_molecules * mode_energy))
    g = -1j * amplitude * np.exp(1j * np.asarray(q) * np.asarray(x_n))
    return complex(g) if g.ndim == 0 else g


def assemble(realization: MolecularRealization, modes: CavityModeSet, coupling: CouplingSpec) -> HamiltonianMatrix:
    n_mol = len(realization.energies)
    n_modes = len(modes)
    if len(realization.positions) != n_mol:
        raise ConfigError("realization energies and positions differ in length")
    dim = n_mol + n_modes
    h = np.zeros((dim, dim), dtype=complex)
    idx = np.arange(n_mol)
    h[idx, idx] = realization.energies
    jdx = np.arange(n_mol, dim)
    h[jdx, jdx] = modes.energies

    block = coupling_element(
        realization.energies[:, None],
        realization.positions[:, None],
        modes.q[None, :],
        modes.energies[None, :],
        coupling.rabi_splitting,
        n_mol,
    )
    h[:n_mol, n_mol:] = block
    h[n_mol:, :n_mol] = block.conj().T
    return HamiltonianMatrix(h, n_mol, n_modes)


def implied_dipole_metadata(wire, coupling: CouplingSpec) -> dict:
    """Molecular density and transition dipole implied by the chosen Rabi splitting.

    Uses Omega_R = mu * sqrt(hbar*omega_0 * rho / (2 eps)) in Gaussian-like
    units where mu is returned in sqrt(eV nm^3); informative metadata only.
    """
    rho = wire.n_molecules / (wire.length * wire.l_y * wire.l_z)
    e0 = wire.min_cavity_energy
    mu = coupling.rabi_splitting / math.sqrt(e0 * rho / (2 * wire.epsilon))
    return {"density_per_nm3": rho, "transition_dipole_sqrt_eV_nm3": mu}
