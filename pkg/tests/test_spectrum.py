import numpy as np
import pytest

from polariton_wire import expand, propagate
from polariton_wire.errors import IntegrityError
from polariton_wire.spectrum import (
    SpectrumCache,
    diagonalize,
    energy_expectation,
    evolve,
    load_spectrum,
    recombine,
    save_spectrum,
)
from polariton_wire.units import HBAR

from conftest import ordered_system


def random_hermitian(rng, n):
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return (a + a.conj().T) / 2


def test_diagonal_input():
    spec = diagonalize(np.diag([3.0, 1.0, 2.0]))
    assert spec.eigenvalues.tolist() == [1.0, 2.0, 3.0]
    assert np.allclose(np.abs(spec.eigenvectors), np.eye(3)[:, [1, 2, 0]])


def test_reconstruction(rng):
    h = random_hermitian(rng, 50)
    spec = diagonalize(h)
    v, w = spec.eigenvectors, spec.eigenvalues
    assert np.linalg.norm(v @ np.diag(w) @ v.conj().T - h) <= 1e-10 * np.linalg.norm(h)
    assert np.allclose(v.conj().T @ v, np.eye(50), atol=1e-12)
    assert np.all(np.diff(w) >= 0)


def test_non_hermitian_rejected():
    h = np.array([[1.0, 0.5], [0.4, 1.0]])
    with pytest.raises(IntegrityError):
        diagonalize(h)


def test_identity_at_zero(rng):
    spec = diagonalize(random_hermitian(rng, 20))
    psi = rng.normal(size=20) + 1j * rng.normal(size=20)
    psi /= np.linalg.norm(psi)
    assert np.max(np.abs(propagate(spec, psi, 0.0) - psi)) <= 1e-12


def test_stationary_state(rng):
    spec = diagonalize(random_hermitian(rng, 20))
    v = spec.eigenvectors[:, 7]
    out = propagate(spec, v, 13.0)
    assert np.allclose(out, np.exp(-1j * spec.eigenvalues[7] * 13.0 / HBAR) * v, atol=1e-12)


def test_expand_cases(rng):
    spec = diagonalize(random_hermitian(rng, 10))
    c = expand(spec, spec.eigenvectors[:, 3])
    assert abs(c[3]) == pytest.approx(1.0) and np.allclose(np.delete(c, 3), 0, atol=1e-12)
    mix = (spec.eigenvectors[:, 1] + spec.eigenvectors[:, 5]) / np.sqrt(2)
    assert np.abs(expand(spec, mix))[[1, 5]] ** 2 == pytest.approx([0.5, 0.5])
    psi = rng.normal(size=10) + 1j * rng.normal(size=10)
    assert np.max(np.abs(recombine(spec, expand(spec, psi)) - psi)) <= 1e-10


def test_group_property_and_time_reversal(rng):
    spec = diagonalize(random_hermitian(rng, 30))
    psi = rng.normal(size=30) + 0j
    psi /= np.linalg.norm(psi)
    a = propagate(spec, propagate(spec, psi, 4.0), 7.0)
    assert np.allclose(a, propagate(spec, psi, 11.0), atol=1e-10)
    assert np.allclose(propagate(spec, propagate(spec, psi, 250.0), -250.0), psi, atol=1e-10)


def test_evolve_matches_propagate(rng):
    spec = diagonalize(random_hermitian(rng, 15))
    psi = rng.normal(size=15) + 0j
    times = np.linspace(0, 100, 23)
    blocks = list(evolve(spec, psi, times, chunk=5))
    assert len(blocks) == 5
    states = np.concatenate([s for _, s in blocks])
    for t, s in zip(times, states):
        assert np.allclose(s, propagate(spec, psi, t), atol=1e-12)


def test_unitarity_and_energy_on_physical_model():
    _, real, modes, h, spec = ordered_system(200, 41)
    psi = np.zeros(241, complex)
    psi[100] = 1
    e0 = energy_expectation(spec, psi)
    for _, states in evolve(spec, psi, np.arange(0, 2000, 10.0)):
        assert np.max(np.abs(np.linalg.norm(states, axis=1) - 1)) < 1e-10
        energies = np.einsum("ti,ij,tj->t", states.conj(), h.matrix, states).real
        assert np.max(np.abs(energies - e0)) / e0 < 1e-10


def test_cache_roundtrip(tmp_path, rng):
    spec = diagonalize(random_hermitian(rng, 12))
    key = "ab" * 32
    save_spectrum(spec, tmp_path / "s.spec", key)
    back = load_spectrum(tmp_path / "s.spec", key)
    assert np.array_equal(back.eigenvalues, spec.eigenvalues)
    assert np.array_equal(back.eigenvectors, spec.eigenvectors)
    with pytest.raises(IntegrityError):
        load_spectrum(tmp_path / "s.spec", "cd" * 32)


def test_spectrum_cache(tmp_path):
    from polariton_wire import CouplingSpec

    _, real, modes, _, spec = ordered_system(20, 5)
    cache = SpectrumCache(tmp_path)
    key = SpectrumCache.key(real, modes, CouplingSpec(0.1))
    assert cache.get(key) is None
    cache.put(key, spec)
    assert np.array_equal(cache.get(key).eigenvalues, spec.eigenvalues)
    assert key != SpectrumCache.key(real, modes, CouplingSpec(0.2))
