"""Position-representation states and single-mode gates acting on them.

Wavefunctions use x = (a + a^dagger)/sqrt(2), so the vacuum is
pi^{-1/4} exp(-x^2/2) and has <x^2> = 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import BoundaryMassError, Grid, airy_ai, hermite, integrate

__all__ = [
    "PositionWaveFunction",
    "GateSpec",
    "ONSpec",
    "fock_amplitude",
    "fock_wavefunction",
    "coherent_x_wavefunction",
    "squeezed_vacuum_wavefunction",
    "on_wavefunction",
    "apply_phase_gate",
    "apply_damping",
    "expectation",
    "wigner_cubic",
    "normalize",
    "check_boundary",
]

BOUNDARY_GUARD = 1e-12


@dataclass(frozen=True)
class PositionWaveFunction:
    grid: Grid
    amplitudes: np.ndarray
    normalized: bool = True

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex)
        if amps.shape != (self.grid.n_points,):
            raise ValueError(
                f"amplitudes have shape {amps.shape}, grid has {self.grid.n_points} points"
            )
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        if self.normalized and abs(self.norm2() - 1.0) > 1e-6:
            raise ValueError(f"state flagged normalized has norm^2 {self.norm2():.3g}")

    @property
    def x(self) -> np.ndarray:
        return self.grid.points

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def norm2(self) -> float:
        return float(integrate(self.density, self.grid).real)

    def inner(self, other: "PositionWaveFunction") -> complex:
        """<self|other> by quadrature."""
        if other.grid != self.grid:
            raise ValueError("states live on different grids")
        return complex(integrate(np.conj(self.amplitudes) * other.amplitudes, self.grid))

    def with_amplitudes(self, amplitudes, normalized: bool = False) -> "PositionWaveFunction":
        return PositionWaveFunction(self.grid, amplitudes, normalized)


@dataclass(frozen=True)
class GateSpec:
    """Quadrature phase gate exp(i * strength * x^order)."""

    order: int
    strength: float

    def __post_init__(self):
        if self.order < 1:
            raise ValueError("gate order must be >= 1")


@dataclass(frozen=True)
class ONSpec:
    """Resource state (|0> + a|N>) / sqrt(1 + |a|^2)."""

    n: int
    a: complex

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("ON states need N >= 1")

    @property
    def c(self) -> float:
        return 1.0 / math.sqrt(1.0 + abs(self.a) ** 2)

    @classmethod
    def from_strength(cls, n: int, a0: float) -> "ONSpec":
        """ON state whose wavefunction bracket is ``1 + i a0 (x^N + lower order)``.

        The leading coefficient of psi_N relative to the vacuum is
        sqrt(2^N / N!), hence a = i a0 sqrt(N! / 2^N): i sqrt(3) a0 / 2 for
        N = 3 and i sqrt(3/2) a0 for N = 4.
        """
        return cls(n, 1j * a0 * math.sqrt(math.factorial(n) / 2.0 ** n))


def normalize(psi: PositionWaveFunction) -> PositionWaveFunction:
    n2 = psi.norm2()
    if not n2 > 0:
        raise ValueError("cannot normalize a zero-norm state")
    return PositionWaveFunction(psi.grid, psi.amplitudes / math.sqrt(n2), True)


def check_boundary(psi: PositionWaveFunction, guard: float = BOUNDARY_GUARD) -> None:
    edge = max(abs(psi.amplitudes[0]) ** 2, abs(psi.amplitudes[-1]) ** 2)
    if edge > guard:
        raise BoundaryMassError(
            f"|psi|^2 = {edge:.3g} at the grid edge exceeds {guard:g}; use a larger grid (--xmax)"
        )


def fock_amplitude(n: int, x):
    """psi_n(x) = pi^{-1/4} (2^n n!)^{-1/2} H_n(x) exp(-x^2/2), at arbitrary x."""
    if n < 0:
        raise ValueError("Fock index must be non-negative")
    x = np.asarray(x, dtype=float)
    log_norm = -0.25 * math.log(math.pi) - 0.5 * (n * math.log(2.0) + math.lgamma(n + 1))
    return hermite(n, x) * np.exp(log_norm - 0.5 * x * x)


def fock_wavefunction(n: int, grid: Grid) -> PositionWaveFunction:
    psi = PositionWaveFunction(grid, fock_amplitude(n, grid.points), False)
    check_boundary(psi)
    return PositionWaveFunction(grid, psi.amplitudes, True)


def coherent_x_wavefunction(x0: float, grid: Grid) -> PositionWaveFunction:
    """x-displaced vacuum pi^{-1/4} exp(-(x - x0)^2 / 2)."""
    x = grid.points
    psi = PositionWaveFunction(grid, math.pi ** -0.25 * np.exp(-0.5 * (x - x0) ** 2), False)
    check_boundary(psi)
    return PositionWaveFunction(grid, psi.amplitudes, True)


def squeezed_vacuum_wavefunction(db: float, grid: Grid, quadrature: str = "x") -> PositionWaveFunction:
    """Squeezed vacuum with the named quadrature's variance reduced by 10^(db/10).

    ``quadrature="x"`` gives (s/pi)^{1/4} exp(-s x^2/2) with s = 10^(db/10);
    ``quadrature="p"`` squeezes momentum, which widens the x distribution by
    the same factor.
    """
    if db < 0:
        raise ValueError("squeezing in dB must be non-negative")
    if quadrature not in ("x", "p"):
        raise ValueError("quadrature must be 'x' or 'p'")
    s = 10.0 ** (db / 10.0)
    if quadrature == "p":
        s = 1.0 / s
    x = grid.points
    psi = PositionWaveFunction(grid, (s / math.pi) ** 0.25 * np.exp(-0.5 * s * x * x), False)
    check_boundary(psi)
    return PositionWaveFunction(grid, psi.amplitudes, True)


def on_amplitude(spec: ONSpec, x):
    x = np.asarray(x, dtype=float)
    return spec.c * (fock_amplitude(0, x) + spec.a * fock_amplitude(spec.n, x))


def on_wavefunction(spec: ONSpec, grid: Grid) -> PositionWaveFunction:
    return PositionWaveFunction(grid, on_amplitude(spec, grid.points), True)


def apply_phase_gate(psi: PositionWaveFunction, gate: GateSpec) -> PositionWaveFunction:
    """psi(x) -> psi(x) exp(i gamma x^N); the modulus is untouched."""
    phase = np.exp(1j * gate.strength * psi.x ** gate.order)
    return PositionWaveFunction(psi.grid, psi.amplitudes * phase, psi.normalized)


def apply_damping(psi: PositionWaveFunction, q: float):
    """Apply A_q = exp(-(x + q)^2 / 2); returns ``(unnormalized state, norm^2)``."""
    out = PositionWaveFunction(psi.grid, psi.amplitudes * np.exp(-0.5 * (psi.x + q) ** 2), False)
    return out, out.norm2()


def _momentum_derivative(psi: PositionWaveFunction) -> np.ndarray:
    k = 2.0 * np.pi * np.fft.fftfreq(psi.grid.n_points, d=psi.grid.dx)
    return np.fft.ifft(1j * k * np.fft.fft(psi.amplitudes))


def expectation(psi: PositionWaveFunction, observable: str) -> float:
    """<x>, <x^2> or <p> of a normalized state."""
    if not psi.normalized:
        raise ValueError("expectation values need a normalized state")
    x = psi.x
    if observable == "x":
        f = x * psi.density
    elif observable in ("x2", "x^2"):
        f = x * x * psi.density
    elif observable == "p":
        f = np.conj(psi.amplitudes) * (-1j) * _momentum_derivative(psi)
    else:
        raise ValueError(f"unknown observable {observable!r}")
    return float(integrate(f, psi.grid).real)


def wigner_cubic(gamma: float, x_range, p_range) -> np.ndarray:
    """Wigner function Ai(b0 (3 gamma x^2 - p)) of the cubic phase state, N0 = 1.

    The cubic phase state is not normalizable, so only the shape (parabolic
    contours) is meaningful.  Returns an array indexed ``[i_x, i_p]``.
    """
    if gamma == 0:
        raise ValueError("the cubic-state Wigner function is singular at gamma = 0")
    b0 = float(np.cbrt(4.0 / (3.0 * gamma)))
    x = np.asarray(x_range, dtype=float)[:, None]
    p = np.asarray(p_range, dtype=float)[None, :]
    return airy_ai(b0 * (3.0 * gamma * x * x - p))
