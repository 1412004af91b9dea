import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from onsim.grid import Grid
from onsim.metrics import (
    WIDE_GRID,
    avg_gate_fidelity,
    coherent_gate_fidelity,
    fidelity_sweeps,
    gate_fidelity_curve,
    gate_fidelity_q,
    state_fidelity,
    trace_distance,
)
from onsim.fock import coherent_state, fock_state
from onsim.states import coherent_x_wavefunction, fock_wavefunction, squeezed_vacuum_wavefunction

CLOSED_PREFACTOR = math.sqrt(2 * math.sqrt(2) / 3)


def test_state_fidelity_examples(grid):
    vac, one = fock_wavefunction(0, grid), fock_wavefunction(1, grid)
    assert state_fidelity(vac, vac) == pytest.approx(1, abs=1e-14)
    assert state_fidelity(vac, one) < 1e-10
    assert state_fidelity(vac, coherent_x_wavefunction(1.0, grid)) == pytest.approx(math.exp(-0.25), abs=1e-8)
    assert state_fidelity(vac, vac.with_amplitudes(3j * vac.amplitudes)) == pytest.approx(1, abs=1e-14)
    assert state_fidelity(fock_state(0, 5), coherent_state(0.5, 5)) == pytest.approx(math.exp(-0.125), abs=1e-6)


def test_state_fidelity_errors(grid):
    vac = fock_wavefunction(0, grid)
    with pytest.raises(ValueError):
        state_fidelity(vac, vac.with_amplitudes(np.zeros(grid.n_points)))
    with pytest.raises(TypeError):
        state_fidelity(vac, fock_state(0, 3))


def test_trace_distance_examples(grid):
    vac, one = fock_wavefunction(0, grid), fock_wavefunction(1, grid)
    assert trace_distance(vac, vac) == pytest.approx(0, abs=1e-7)
    assert trace_distance(vac, one) == pytest.approx(1, abs=1e-12)
    mix = vac.with_amplitudes(0.6 * vac.amplitudes + 0.8 * one.amplitudes)
    assert trace_distance(vac, mix) == pytest.approx(0.8, abs=1e-10)


def test_gate_fidelity_closed_form_center(grid):
    assert gate_fidelity_q(fock_wavefunction(0, grid), 0.0) == pytest.approx(CLOSED_PREFACTOR, abs=1e-6)
    assert CLOSED_PREFACTOR == pytest.approx(0.9709835, abs=1e-7)


@pytest.mark.parametrize("x0", [-1.0, 0.0, 1.5])
def test_gate_fidelity_closed_form(grid, x0):
    psi = coherent_x_wavefunction(x0, grid)
    for q in np.linspace(-3, 3, 61):
        assert gate_fidelity_q(psi, q) == pytest.approx(coherent_gate_fidelity(q, x0), abs=1e-6)


def test_gate_fidelity_curve_matches_pointwise(grid):
    psi = fock_wavefunction(2, grid)
    curve = gate_fidelity_curve(psi)
    for i in (500, 1800, 2048, 2600):
        assert curve[i] == pytest.approx(gate_fidelity_q(psi, grid.points[i]), abs=1e-12)
    coarse = Grid.symmetric(5, 51)
    np.testing.assert_allclose(gate_fidelity_curve(psi, coarse), [gate_fidelity_q(psi, q) for q in coarse.points])


def test_gate_fidelity_bounds(grid):
    psi = fock_wavefunction(3, grid)
    for q in np.linspace(-6, 6, 25):
        f = gate_fidelity_q(psi, q)
        assert 0 < f < 1
        a_q = np.exp(-0.5 * (grid.points + q) ** 2)
        num = np.trapezoid(psi.density * a_q, dx=grid.dx)
        den = np.trapezoid(psi.density * a_q ** 2, dx=grid.dx)
        assert num ** 2 <= den + 1e-12


def test_gate_fidelity_needs_normalized(grid):
    psi = fock_wavefunction(0, grid)
    with pytest.raises(ValueError):
        gate_fidelity_q(psi.with_amplitudes(psi.amplitudes), 0.0)
    with pytest.raises(ValueError):
        avg_gate_fidelity(psi.with_amplitudes(psi.amplitudes), 0.1)


@settings(max_examples=25, deadline=None)
@given(seed=st.integers(0, 10_000), q=st.floats(-3, 3))
def test_gate_fidelity_phase_blind(seed, q):
    g = Grid.symmetric(12, 1024)
    psi = coherent_x_wavefunction(0.3, g)
    rng = np.random.default_rng(seed)
    theta = rng.uniform(0, 2 * np.pi, g.n_points)
    twisted = psi.with_amplitudes(psi.amplitudes * np.exp(1j * theta), True)
    assert gate_fidelity_q(twisted, q) == pytest.approx(gate_fidelity_q(psi, q), abs=1e-12)


def test_avg_fidelity_zero_strength_oracle(grid):
    # vacuum resource: p(q) = N(-x0, 1), F_q closed form => sqrt(2 sqrt2 / 3) / sqrt(1 + 1/6)
    want = CLOSED_PREFACTOR / math.sqrt(1 + 1 / 6)
    for x0 in (0.0, 1.5):
        rep = avg_gate_fidelity(coherent_x_wavefunction(x0, grid), 0.0)
        assert rep.average == pytest.approx(want, abs=1e-10)
        assert rep.average < 1
        assert rep.gate.strength == 0.0 and rep.gate.order == 3


def test_avg_fidelity_report_fields(grid):
    rep = avg_gate_fidelity(fock_wavefunction(1, grid), 0.1, "fock:1")
    assert rep.test_state == "fock:1"
    assert len(rep.per_q) == grid.n_points
    assert np.all((rep.f_q >= 0) & (rep.f_q <= 1))
    assert np.trapezoid(rep.density, rep.q) == pytest.approx(1, abs=1e-6)
    assert 0 < rep.average <= 1


@pytest.mark.parametrize("gamma", [0.0, 0.05, 0.1])
def test_displacement_invariance(grid, gamma):
    vals = [avg_gate_fidelity(coherent_x_wavefunction(x0, grid), gamma).average for x0 in (-1.0, 0.0, 1.5)]
    assert max(vals) - min(vals) <= 1e-4


def test_sweep_gamma():
    rows = fidelity_sweeps("gamma")
    assert len(rows) == 21
    assert rows[0][0] == 0 and rows[-1][0] == pytest.approx(0.1)
    assert all(0.85 <= f <= 0.95 for _, f in rows)
    vac0 = avg_gate_fidelity(fock_wavefunction(0, Grid.default()), 0.0).average
    assert rows[0][1] == pytest.approx(vac0, abs=1e-8)


def test_sweep_fock_and_squeezing():
    fock = fidelity_sweeps("fock")
    assert [v for v, _ in fock] == list(range(6))
    f = [v for _, v in fock]
    assert all(a > b for a, b in zip(f, f[1:]))
    sq = fidelity_sweeps("squeezing")
    assert len(sq) == 20 and sq[-1][0] == 9.5
    s = [v for _, v in sq]
    assert all(a > b for a, b in zip(s, s[1:]))


def test_sweep_squeezing_zero_db_is_vacuum():
    (row,) = fidelity_sweeps("squeezing", [0.0])
    (ref,) = fidelity_sweeps("fock", [0])
    assert row[1] == pytest.approx(ref[1], abs=1e-10)


def test_sweep_unknown():
    with pytest.raises(ValueError):
        fidelity_sweeps("temperature")


def test_squeezed_sweep_grid_independent():
    # the wide grid shares dx with the default grid; the answer should not depend on extent
    psi_w = squeezed_vacuum_wavefunction(3.0, WIDE_GRID, quadrature="p")
    psi_d = squeezed_vacuum_wavefunction(3.0, Grid.default(), quadrature="p")
    assert avg_gate_fidelity(psi_w, 0.1).average == pytest.approx(avg_gate_fidelity(psi_d, 0.1).average, abs=1e-10)
