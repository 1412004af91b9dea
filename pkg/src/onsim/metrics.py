"""Gate-performance figures of merit for the damped cubic gate A_q V(gamma).

For outcome q the output A_q V psi is compared with V psi.  The cubic phase
cancels in the overlap, leaving

    F_q = int |psi|^2 A_q / (int |psi|^2 A_q^2)^{1/2},   A_q(x) = exp(-(x+q)^2/2),

which is then averaged over the homodyne density p(q) of the 03 resource at
the same strength.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import _correlate, _trapezoid_weights, homodyne_density, resource_03
from .grid import Grid, NumericalGuardError, integrate
from .states import (
    GateSpec,
    PositionWaveFunction,
    coherent_x_wavefunction,
    fock_wavefunction,
    squeezed_vacuum_wavefunction,
)

__all__ = [
    "FidelityReport",
    "state_fidelity",
    "trace_distance",
    "gate_fidelity_q",
    "gate_fidelity_curve",
    "coherent_gate_fidelity",
    "avg_gate_fidelity",
    "fidelity_sweeps",
    "SWEEP_KINDS",
    "WIDE_GRID",
]

# p-squeezed inputs up to 9.5 dB spread to |x| ~ 20; same spacing as the default grid
WIDE_GRID = Grid.symmetric(24.0, 8191)

SWEEP_KINDS = ("gamma", "squeezing", "fock")


@dataclass(frozen=True)
class FidelityReport:
    q: np.ndarray
    f_q: np.ndarray
    density: np.ndarray
    average: float
    gate: GateSpec
    test_state: str = ""

    @property
    def per_q(self):
        return list(zip(self.q.tolist(), self.f_q.tolist()))


def state_fidelity(psi, phi) -> float:
    """|<psi|phi>| between normalized copies; wavefunctions or Fock vectors."""
    if isinstance(psi, PositionWaveFunction) != isinstance(phi, PositionWaveFunction):
        raise TypeError("compare two wavefunctions or two Fock vectors")
    if isinstance(psi, PositionWaveFunction):
        overlap = psi.inner(phi)
        n_psi, n_phi = psi.norm2(), phi.norm2()
    else:
        psi, phi = np.asarray(psi), np.asarray(phi)
        overlap = np.vdot(psi, phi)
        n_psi, n_phi = float(np.vdot(psi, psi).real), float(np.vdot(phi, phi).real)
    if not (n_psi > 0 and n_phi > 0):
        raise ValueError("fidelity with a zero-norm state is undefined")
    return min(abs(overlap) / math.sqrt(n_psi * n_phi), 1.0)


def trace_distance(psi, phi) -> float:
    f = state_fidelity(psi, phi)
    return math.sqrt(max(0.0, 1.0 - f * f))


def gate_fidelity_q(psi: PositionWaveFunction, q: float) -> float:
    if not psi.normalized:
        raise ValueError("gate fidelity needs a normalized test state")
    a_q = np.exp(-0.5 * (psi.x + q) ** 2)
    num = float(integrate(psi.density * a_q, psi.grid).real)
    den = float(integrate(psi.density * a_q * a_q, psi.grid).real)
    if not den > 0:
        raise NumericalGuardError(f"damping A_q has no overlap with the state at q = {q}")
    return num / math.sqrt(den)


def gate_fidelity_curve(psi: PositionWaveFunction, q_grid: Grid | None = None) -> np.ndarray:
    """F_q at every point of ``q_grid``.

    With the x-grid spacing the bulk of the curve comes from two FFT
    correlations; remote outcomes are integrated directly.  Outcomes so remote
    that the denominator underflows get F_q = 0.
    """
    grid = psi.grid
    q_grid = q_grid or grid
    if not math.isclose(q_grid.dx, grid.dx, rel_tol=1e-12):
        return np.array([gate_fidelity_q(psi, q) for q in q_grid.points])
    y = grid.x_min + q_grid.x_min + grid.dx * np.arange(grid.n_points + q_grid.n_points - 1)
    w = _trapezoid_weights(grid) * psi.density
    num = _correlate(w, np.exp(-0.5 * y * y))
    den = _correlate(w, np.exp(-y * y))
    out = np.zeros_like(num)
    # FFT round-off is absolute (~1e-16 of the peak); redo small values by direct quadrature
    ok = den > 1e-6 * den.max()
    out[ok] = np.clip(num[ok], 0.0, None) / np.sqrt(den[ok])
    tail = np.flatnonzero(~ok)
    x = grid.points
    for start in range(0, len(tail), 256):
        idx = tail[start:start + 256]
        a_q = np.exp(-0.5 * (x[None, :] + q_grid.points[idx, None]) ** 2)
        n_t = a_q @ w
        a_q *= a_q
        d_t = a_q @ w
        good = d_t > 0
        out[idx[good]] = n_t[good] / np.sqrt(d_t[good])
    return np.minimum(out, 1.0)


def coherent_gate_fidelity(q: float, x0: float) -> float:
    """Closed form (2 sqrt 2 / 3)^{1/2} exp(-(q + x0)^2 / 12) for x-displaced vacua."""
    return math.sqrt(2.0 * math.sqrt(2.0) / 3.0) * math.exp(-((q + x0) ** 2) / 12.0)


def avg_gate_fidelity(psi: PositionWaveFunction, a0: float, label: str = "") -> FidelityReport:
    """F averaged over p(q) of the 03 resource with strength a0 (target gamma = a0)."""
    if not psi.normalized:
        raise ValueError("gate fidelity needs a normalized test state")
    dens = homodyne_density(psi, resource_03(a0, psi.grid))
    f_q = gate_fidelity_curve(psi, dens.grid)
    avg = float(integrate(dens.values * f_q, dens.grid).real)
    return FidelityReport(dens.grid.points, f_q, dens.values, avg, GateSpec(3, a0), label)


def _sweep_state(kind: str, value: float, grid: Grid) -> PositionWaveFunction:
    if kind == "gamma":
        return coherent_x_wavefunction(value, grid)
    if kind == "squeezing":
        return squeezed_vacuum_wavefunction(value, grid, quadrature="p")
    if kind == "fock":
        return fock_wavefunction(int(value), grid)
    raise ValueError(f"unknown sweep kind {kind!r}; choose from {SWEEP_KINDS}")


def fidelity_sweeps(kind: str, values=None, gamma: float = 0.1, x0: float = 0.0,
                    grid: Grid | None = None):
    """Rows ``(parameter, average fidelity)`` for one reference sweep.

    gamma:     coherent input at ``x0``, gate strength swept over [0, 0.1]
    squeezing: p-squeezed vacuum, 0 .. 9.5 dB, at ``gamma``
    fock:      Fock inputs n = 0 .. 5, at ``gamma``
    """
    if kind not in SWEEP_KINDS:
        raise ValueError(f"unknown sweep kind {kind!r}; choose from {SWEEP_KINDS}")
    if values is None:
        values = {
            "gamma": np.round(np.arange(21) * 0.005, 12),
            "squeezing": np.round(np.arange(20) * 0.5, 12),
            "fock": np.arange(6),
        }[kind]
    if grid is None:
        grid = WIDE_GRID if kind == "squeezing" else Grid.default()
    rows = []
    for v in sorted(values):
        if kind == "gamma":
            rep = avg_gate_fidelity(_sweep_state(kind, x0, grid), float(v), f"coherent:{x0:g}")
        else:
            rep = avg_gate_fidelity(_sweep_state(kind, v, grid), gamma, f"{kind}:{v:g}")
        rows.append((float(v), rep.average))
    return rows
