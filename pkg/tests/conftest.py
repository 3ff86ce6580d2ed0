import numpy as np
import pytest

from polariton_wire import (
    CouplingSpec,
    DisorderSpec,
    WavepacketSpec,
    WireConfig,
    assemble,
    build_mode_set,
    diagonalize,
    sample_realization,
)
from polariton_wire.ensemble import SimulationSetup, time_grid


def make_setup(n=100, n_c=21, omega=0.1, sigma_x=60.0, q_bar=0.0, e_m=2.0, t_max=500.0, dt=10.0,
               sigma_m=0.0, sigma_a=0.0, directionality="bidirectional", cutoff=None, snapshots=()):
    return SimulationSetup(
        wire=WireConfig(n, mean_exciton_energy=e_m),
        disorder=DisorderSpec(sigma_m, sigma_a),
        coupling=CouplingSpec(omega),
        wavepacket=WavepacketSpec(sigma_x, q_bar),
        times=time_grid(t_max, dt),
        mode_count=None if cutoff is not None else n_c,
        cutoff_energy=cutoff,
        directionality=directionality,
        snapshot_times=tuple(snapshots),
    )


def ordered_system(n=100, n_c=21, omega=0.1, e_m=2.0):
    wire = WireConfig(n, mean_exciton_energy=e_m)
    real = sample_realization(wire, DisorderSpec(), 0)
    modes = build_mode_set(wire, n_c)
    h = assemble(real, modes, CouplingSpec(omega))
    return wire, real, modes, h, diagonalize(h)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


ACCEPTANCE_LINES = []


def record_criterion(number, ok, detail):
    """Log one acceptance line (shown in the terminal summary) and assert it."""
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
