"""Physical constants, wire geometry and the truncated cavity mode grid.

Units are eV, nm and fs throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from polariton_wire.errors import ConfigError, DomainError, EmptyModeSetError

HBAR = 0.6582119569  # eV fs
LIGHT_SPEED = 299.792458  # nm / fs


@dataclass(frozen=True)
class PhysicalConstants:
    hbar: float = HBAR
    c: float = LIGHT_SPEED


CONSTANTS = PhysicalConstants()


@dataclass(frozen=True)
class WireConfig:
    """Geometry and mean molecular parameters of the wire.

    The cavity length along x is ``n_molecules * spacing``; the transverse
    confinement lengths ``l_y`` and ``l_z`` fix the bottom of the photon band.
    """

    n_molecules: int
    spacing: float = 10.0
    l_y: float = 200.0
    l_z: float = 400.0
    epsilon: float = 3.0
    mean_exciton_energy: float = 2.0

    def __post_init__(self):
        problems = []
        if int(self.n_molecules) != self.n_molecules or self.n_molecules < 1:
            problems.append(f"n_molecules must be a positive integer, got {self.n_molecules!r}")
        if not self.spacing > 0:
            problems.append(f"spacing must be > 0 nm, got {self.spacing!r}")
        if not (self.l_y > 0 and self.l_z > 0):
            problems.append("transverse lengths l_y, l_z must be > 0 nm")
        if not self.epsilon >= 1:
            problems.append(f"epsilon must be >= 1, got {self.epsilon!r}")
        if not self.mean_exciton_energy > 0:
            problems.append("mean_exciton_energy must be > 0 eV")
        if problems:
            raise ConfigError(problems[0], problems)

    @property
    def length(self) -> float:
        return self.n_molecules * self.spacing

    @property
    def q0(self) -> float:
        return transverse_wavevector(self.l_y, self.l_z)

    @property
    def min_cavity_energy(self) -> float:
        return mode_energy(0.0, self.q0, self.epsilon)


class Directionality(str, Enum):
    BIDIRECTIONAL = "bidirectional"
    NONNEGATIVE = "nonnegative-only"


@dataclass(frozen=True, eq=False)
class CavityModeSet:
    """Retained photon modes, ordered by ascending ``m_x``."""

    m_x: np.ndarray
    q: np.ndarray
    energies: np.ndarray
    q0: float
    directionality: Directionality

    def __len__(self):
        return len(self.m_x)

    @property
    def realized_cutoff(self) -> float:
        return float(self.energies.max())

    @property
    def spacing(self) -> float:
        """Wave-vector spacing 2*pi/L_x of the grid."""
        if len(self.m_x) > 1:
            return float(self.q[1] - self.q[0])
        return float("nan")

    def index_of(self, m_x: int) -> int:
        hits = np.flatnonzero(self.m_x == m_x)
        if hits.size == 0:
            raise KeyError(m_x)
        return int(hits[0])


def transverse_wavevector(l_y: float, l_z: float) -> float:
    """Band-bottom wave vector for the lowest transverse mode (n_y = n_z = 1)."""
    if not (l_y > 0 and l_z > 0):
        raise DomainError(f"confinement lengths must be positive, got l_y={l_y}, l_z={l_z}")
    return math.pi * math.sqrt(1.0 / l_y**2 + 1.0 / l_z**2)


def mode_energy(q, q0: float, epsilon: float):
    """Photon energy (eV) of the mode with wave vector ``q`` (scalar or array)."""
    if not epsilon >= 1:
        raise DomainError(f"relative permittivity must be >= 1, got {epsilon}")
    if not q0 > 0:
        raise DomainError(f"q0 must be positive, got {q0}")
    q = np.asarray(q, dtype=float)
    e = HBAR * LIGHT_SPEED / math.sqrt(epsilon) * np.sqrt(q0 * q0 + q * q)
    return float(e) if e.ndim == 0 else e


def wavevector_at_energy(energy: float, q0: float, epsilon: float) -> float:
    """Non-negative q whose photon energy equals ``energy``."""
    k = energy * math.sqrt(epsilon) / (HBAR * LIGHT_SPEED)
    if k < q0:
        raise DomainError(f"{energy} eV lies below the cavity band bottom")
    return math.sqrt(k * k - q0 * q0)


def build_mode_set(
    wire: WireConfig,
    mode_count: int | None = None,
    cutoff_energy: float | None = None,
    directionality: Directionality | str = Directionality.BIDIRECTIONAL,
) -> CavityModeSet:
    """Truncate the cavity field by mode count or by cutoff energy.

    Bidirectional count-form sets keep ``|m_x| <= (N_c - 1) / 2``; a
    nonnegative-only count keeps ``m_x = 0 .. N_c - 1``. The energy form keeps
    every mode at or below ``cutoff_energy`` in either case.
    """
    directionality = Directionality(directionality)
    if (mode_count is None) == (cutoff_energy is None):
        raise ConfigError("give exactly one of mode_count or cutoff_energy")
    q0 = wire.q0
    length = wire.length

    if mode_count is not None:
        if int(mode_count) != mode_count or mode_count < 1:
            raise ConfigError(f"mode count must be a positive integer, got {mode_count!r}")
        mode_count = int(mode_count)
        if directionality is Directionality.BIDIRECTIONAL:
            if mode_count % 2 == 0:
                raise ConfigError(f"mode count must be odd for bidirectional sets, got {mode_count}")
            m_max = (mode_count - 1) // 2
        else:
            m_max = mode_count - 1
    else:
        e_min = mode_energy(0.0, q0, wire.epsilon)
        if cutoff_energy < e_min:
            raise EmptyModeSetError(
                f"cutoff {cutoff_energy} eV is below the minimum cavity energy {e_min:.4f} eV"
            )
        q_max = wavevector_at_energy(cutoff_energy, q0, wire.epsilon)
        m_max = int(math.floor(q_max * length / (2 * math.pi))) + 1
        while m_max > 0 and mode_energy(2 * math.pi * m_max / length, q0, wire.epsilon) > cutoff_energy:
            m_max -= 1

    if directionality is Directionality.BIDIRECTIONAL:
        m = np.arange(-m_max, m_max + 1)
    else:
        m = np.arange(0, m_max + 1)
    q = 2 * math.pi * m / length
    return CavityModeSet(
        m_x=m,
        q=q,
        energies=mode_energy(q, q0, wire.epsilon),
        q0=q0,
        directionality=directionality,
    )
