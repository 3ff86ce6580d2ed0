"""Hermitian eigendecomposition and exact spectral time evolution."""

from __future__ import annotations

import hashlib
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from polariton_wire.errors import IntegrityError, NumericalError
from polariton_wire.units import HBAR

HERMITICITY_TOL = 1e-12

_CACHE_MAGIC = b"PWSP"
_CACHE_VERSION = 1
_CACHE_HEADER = struct.Struct("<4sIQ32s")  # magic, version, dimension, key digest


@dataclass(frozen=True, eq=False)
class Spectrum:
    eigenvalues: np.ndarray  # eV, ascending
    eigenvectors: np.ndarray  # columns are eigenstates

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues)


def matrix_digest(matrix: np.ndarray) -> str:
    return hashlib.sha256(np.ascontiguousarray(matrix).tobytes()).hexdigest()


def diagonalize(h) -> Spectrum:
    """Full eigendecomposition of a Hamiltonian (``HamiltonianMatrix`` or ndarray)."""
    matrix = getattr(h, "matrix", h)
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise IntegrityError(f"expected a square matrix, got shape {matrix.shape}")
    asym = np.max(np.abs(matrix - matrix.conj().T)) if matrix.size else 0.0
    if asym > HERMITICITY_TOL:
        raise IntegrityError(f"matrix is not Hermitian (max |H - H^dagger| = {asym:.3e})")
    try:
        w, v = np.linalg.eigh(matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"eigensolver failed to converge (matrix sha256 {matrix_digest(matrix)})") from exc
    order = np.argsort(w, kind="stable")
    return Spectrum(w[order], v[:, order])


def expand(spec: Spectrum, psi0) -> np.ndarray:
    """Eigenbasis coefficients <chi|psi0>."""
    return spec.eigenvectors.conj().T @ np.asarray(psi0, dtype=complex)


def recombine(spec: Spectrum, coeffs) -> np.ndarray:
    return spec.eigenvectors @ coeffs


def propagate(spec: Spectrum, psi0, t: float) -> np.ndarray:
    """psi(t) = V exp(-i E t / hbar) V^dagger psi0 for a single time ``t`` (fs)."""
    c = expand(spec, psi0)
    return spec.eigenvectors @ (np.exp(-1j * spec.eigenvalues * (t / HBAR)) * c)


def evolve(spec: Spectrum, psi0, times, chunk: int = 256):
    """Yield ``(time_slice, states)`` blocks with ``states`` of shape (n_t, dim).

    The expansion into the eigenbasis is done once and amortised over all times.
    """
    times = np.asarray(times, dtype=float)
    c = expand(spec, psi0)
    vt = spec.eigenvectors.T  # (chi, basis)
    for start in range(0, len(times), chunk):
        block = times[start:start + chunk]
        phases = np.exp(-1j * np.outer(block / HBAR, spec.eigenvalues))
        yield slice(start, start + len(block)), (phases * c) @ vt


def energy_expectation(spec: Spectrum, psi) -> float:
    c = expand(spec, psi)
    return float(np.sum(np.abs(c) ** 2 * spec.eigenvalues))


def save_spectrum(spec: Spectrum, path, key: str) -> None:
    """Versioned binary spectrum file; ``key`` is a hex sha256 of the Hamiltonian inputs."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    with open(tmp, "wb") as fh:
        fh.write(_CACHE_HEADER.pack(_CACHE_MAGIC, _CACHE_VERSION, spec.dimension, bytes.fromhex(key)))
        fh.write(np.ascontiguousarray(spec.eigenvalues, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(spec.eigenvectors, dtype="<c16").tobytes())
    tmp.replace(path)


def load_spectrum(path, key: str | None = None) -> Spectrum:
    with open(path, "rb") as fh:
        magic, version, dim, digest = _CACHE_HEADER.unpack(fh.read(_CACHE_HEADER.size))
        if magic != _CACHE_MAGIC or version != _CACHE_VERSION:
            raise IntegrityError(f"{path}: unsupported spectrum cache format")
        if key is not None and digest != bytes.fromhex(key):
            raise IntegrityError(f"{path}: cache key mismatch")
        w = np.frombuffer(fh.read(8 * dim), dtype="<f8").astype(float)
        v = np.frombuffer(fh.read(16 * dim * dim), dtype="<c16")
    if w.size != dim or v.size != dim * dim:
        raise IntegrityError(f"{path}: truncated spectrum cache")
    return Spectrum(w, v.reshape(dim, dim).astype(complex))


class SpectrumCache:
    """Directory of spectra keyed by a hash of the Hamiltonian inputs."""

    def __init__(self, directory):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)

    @staticmethod
    def key(realization, modes, coupling) -> str:
        h = hashlib.sha256()
        for arr in (realization.energies, realization.positions, modes.q, modes.energies):
            h.update(np.ascontiguousarray(arr, dtype="<f8").tobytes())
        h.update(struct.pack("<d", coupling.rabi_splitting))
        return h.hexdigest()

    def path(self, key: str) -> Path:
        return self.directory / f"{key}.spec"

    def get(self, key: str):
        p = self.path(key)
        return load_spectrum(p, key) if p.exists() else None

    def put(self, key: str, spec: Spectrum) -> None:
        save_spectrum(spec, self.path(key), key)
