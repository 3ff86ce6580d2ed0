"""Coherent exciton wave packet dynamics in a lossless multimode polaritonic wire."""

from polariton_wire.units import (
    HBAR,
    LIGHT_SPEED,
    CavityModeSet,
    WireConfig,
    build_mode_set,
    mode_energy,
    transverse_wavevector,
)
from polariton_wire.disorder import DisorderSpec, MolecularRealization, derive_seed, sample_realization
from polariton_wire.hamiltonian import CouplingSpec, HamiltonianMatrix, assemble, coupling_element
from polariton_wire.spectrum import Spectrum, diagonalize, expand, propagate
from polariton_wire.wavepacket import WavepacketSpec, gaussian_initial_state

__version__ = "0.1.0"

__all__ = [
    "HBAR",
    "LIGHT_SPEED",
    "CavityModeSet",
    "CouplingSpec",
    "DisorderSpec",
    "HamiltonianMatrix",
    "MolecularRealization",
    "Spectrum",
    "WavepacketSpec",
    "WireConfig",
    "assemble",
    "build_mode_set",
    "coupling_element",
    "derive_seed",
    "diagonalize",
    "expand",
    "gaussian_initial_state",
    "mode_energy",
    "propagate",
    "sample_realization",
    "transverse_wavevector",
]
