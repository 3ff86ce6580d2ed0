import math

import numpy as np
import pytest

from polariton_wire import WavepacketSpec, gaussian_initial_state
from polariton_wire.errors import ConfigError, ObservableError
from polariton_wire.observables import (
    analytic_photon_weight,
    bin_sites,
    eigenvalue_clusters,
    hopfield_molecular_fraction,
    infinite_time_photon_weights,
    molecular_population,
    photon_weight_trajectory,
    propagate_error_uncertainty,
    right_tail_probability,
    truncation_error,
    wavepacket_width,
)
from polariton_wire.spectrum import evolve
from polariton_wire.units import wavevector_at_energy

from conftest import ordered_system


def test_single_site_width():
    positions = 10.0 * np.arange(11)
    psi = np.zeros(11)
    psi[8] = 1
    assert wavepacket_width(psi, positions, 50.0, 10.0) == pytest.approx(3.0)


def test_symmetric_pair_width():
    positions = 10.0 * np.arange(21)
    psi = np.zeros(21)
    psi[[3, 17]] = 1 / np.sqrt(2)
    assert wavepacket_width(psi, positions, 100.0, 10.0) == pytest.approx(7.0)


def test_width_conditioned_on_molecules():
    positions = 10.0 * np.arange(5)
    psi = np.array([0, 0.6, 0, 0, 0, 0.8])  # last entry is a photon
    assert wavepacket_width(psi, positions, 30.0, 10.0) == pytest.approx(2.0)


def test_width_undefined_without_molecules():
    psi = np.array([0, 0, 1.0])
    with pytest.raises(ObservableError):
        wavepacket_width(psi, np.array([0.0, 10.0]), 5.0, 10.0)


def test_populations():
    psi = np.array([0.6, 0, 0, 0.8j])
    assert molecular_population(psi, 3) == pytest.approx(0.36)
    assert molecular_population(np.array([0, 0, 1.0]), 2) == 0.0


def test_hopfield_values():
    assert hopfield_molecular_fraction(2.0, 2.0, 0.1) == 0.5
    assert hopfield_molecular_fraction(2.1, 2.0, 0.1) == pytest.approx(0.5 * (1 + 1 / math.sqrt(2)))
    assert hopfield_molecular_fraction(2.1, 2.0, 0.1) == pytest.approx(0.8536, abs=1e-4)
    assert hopfield_molecular_fraction(1e6, 2.0, 0.1) == pytest.approx(1.0)
    vals = hopfield_molecular_fraction(np.linspace(0, 5, 50), 2.0, 0.1)
    assert np.all((vals >= 0) & (vals <= 1))


def test_truncation_error_cases():
    ref = np.linspace(1, 5, 20)
    assert truncation_error(ref, ref) == 0.0
    assert truncation_error(1.1 * ref, ref) == pytest.approx(0.1)
    with pytest.raises(ConfigError):
        truncation_error(ref[:5], ref)


def test_uncertainty_zero_and_linear():
    ref = np.linspace(2, 6, 30)
    d = 1.05 * ref
    assert propagate_error_uncertainty(d, 0 * d, ref, 0 * ref) == (pytest.approx(0.05), 0.0)
    _, u1 = propagate_error_uncertainty(d, 1e-4 * ref, ref, 1e-4 * ref)
    _, u2 = propagate_error_uncertainty(d, 2e-4 * ref, ref, 2e-4 * ref)
    assert u2 == pytest.approx(2 * u1, rel=1e-12)


def test_uncertainty_matches_monte_carlo(rng):
    n = 40
    ref = np.linspace(3, 9, n)
    d = 1.1 * ref
    sd, sr = 0.01 * d, 0.015 * ref
    _, unc = propagate_error_uncertainty(d, sd, ref, sr, coverage=2.0)
    samples = [truncation_error(d + sd * rng.standard_normal(n), ref + sr * rng.standard_normal(n))
               for _ in range(4000)]
    assert unc / 2 == pytest.approx(np.std(samples), rel=0.2)


def test_single_mode_weight_is_one():
    _, real, modes, _, spec = ordered_system(50, 1)
    psi = np.zeros(51, complex)
    psi[25] = 1
    states = np.concatenate([s for _, s in evolve(spec, psi, np.arange(0, 200, 5.0))])
    assert photon_weight_trajectory(states, 50).weights.tolist() == [1.0]
    assert infinite_time_photon_weights(spec, psi, 50).weights.tolist() == [1.0]


def test_eigenstate_weights():
    _, _, _, _, spec = ordered_system(40, 7)
    chi = spec.eigenvectors[:, 45]
    w = infinite_time_photon_weights(spec, chi, 40)
    expected = np.abs(chi[40:]) ** 2
    assert np.allclose(w.weights, expected / expected.max(), atol=1e-10)


def test_clusters():
    starts = eigenvalue_clusters(np.array([1.0, 1.0 + 1e-12, 2.0, 3.0, 3.0]))
    assert starts.tolist() == [0, 2, 3]


def test_infinite_time_agrees_with_long_average():
    wire, real, modes, _, spec = ordered_system(200, 21)
    psi0 = gaussian_initial_state(real, WavepacketSpec(60.0, 0.003), wire, 21)
    inf = infinite_time_photon_weights(spec, psi0, 200)
    states = np.concatenate([s for _, s in evolve(spec, psi0, np.arange(0, 20000, 5.0))])
    avg = photon_weight_trajectory(states, 200)
    big = inf.weights > 0.05
    assert np.max(np.abs(avg.weights[big] - inf.weights[big]) / inf.weights[big]) < 0.1


def test_mirror_symmetric_weights():
    wire, real, modes, _, spec = ordered_system(200, 21)
    psi0 = gaussian_initial_state(real, WavepacketSpec(60.0), wire, 21)
    w = infinite_time_photon_weights(spec, psi0, 200).weights
    assert np.max(np.abs(w - w[::-1])) <= 1e-10


def test_zero_coupling_flagged():
    wire, real, modes, _, spec = ordered_system(20, 3, omega=0.0)
    psi0 = gaussian_initial_state(real, WavepacketSpec(30.0), wire, 3)
    with pytest.raises(ObservableError):
        infinite_time_photon_weights(spec, psi0, 20)


def test_analytic_weight_limits():
    _, _, modes, _, _ = ordered_system(500, 101, e_m=2.2)
    # strong coupling: the momentum factor dominates, peak at q_bar
    w = analytic_photon_weight(modes, WavepacketSpec(120.0, 0.0056), 2.2, 5.0)
    assert abs(modes.q[np.argmax(w)] - 0.0056) <= modes.spacing
    # compact packet, weak coupling: peak at the resonant mode
    w = analytic_photon_weight(modes, WavepacketSpec(10.0, 0.0), 2.2, 0.01)
    q_r = wavevector_at_energy(2.2, modes.q0, 3.0)
    assert abs(abs(modes.q[np.argmax(w)]) - q_r) <= modes.spacing
    assert w.max() == 1.0


def test_tail_and_bins():
    p = np.arange(10, dtype=float)
    positions = 10.0 * np.arange(10)
    assert right_tail_probability(p, positions, 65.0) == 7 + 8 + 9
    assert bin_sites(p, 4).tolist() == [6.0, 22.0, 17.0]
