"""Gate teleportation with a resource state, x-homodyne detection and feed-forward.

Coupling the input and the resource with C_X^dagger = exp(i x1 p2) and
measuring the resource's x quadrature with outcome q applies the filter
phi_r(x + q) to the input wavefunction, with outcome density

    p(q) = integral |psi(x)|^2 |phi_r(x + q)|^2 dx.

For the 03 resource the filter is exp(-(x+q)^2/2) [1 + i a0 ((x+q)^3 - 3(x+q)/2)].
Reading the bracket as the exponential exp(i a0 (...)) (valid for small a0),
the Gaussian feed-forward turns it into A_q exp(i a0 x^3).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve

from .grid import DensitySamples, Grid, NumericalGuardError, integrate, sample_from_density, translate_samples
from .states import (
    GateSpec,
    ONSpec,
    PositionWaveFunction,
    apply_damping,
    apply_phase_gate,
    normalize,
    on_amplitude,
    on_wavefunction,
)

__all__ = [
    "CircuitOutcome",
    "PostSelectSpec",
    "shift_resource",
    "effective_operator",
    "unitarized_filter",
    "homodyne_density",
    "density_at",
    "feed_forward",
    "ideal_output",
    "run_deterministic",
    "run_postselected",
    "translate",
    "squeezed_effective",
    "quartic_effective",
    "product_step",
    "resource_03",
    "MASS_WARNING",
    "analytic_shifted_on",
]

MASS_WARNING = 0.999


@dataclass(frozen=True)
class PostSelectSpec:
    q0: float
    eps: float

    def __post_init__(self):
        if not self.eps > 0:
            raise ValueError("post-selection window half-width must be positive")


@dataclass(frozen=True)
class CircuitOutcome:
    q: float
    output: PositionWaveFunction
    raw_norm2: float
    density: DensitySamples
    accepted: bool = True
    acceptance_mass: float | None = None


def resource_03(a0: float, grid: Grid) -> PositionWaveFunction:
    return on_wavefunction(ONSpec.from_strength(3, a0), grid)


def _same_grid(psi: PositionWaveFunction, phi: PositionWaveFunction) -> None:
    if psi.grid != phi.grid:
        raise ValueError("input and resource must share one x-grid")


def shift_resource(phi: PositionWaveFunction, q: float, method: str = "spectral") -> np.ndarray:
    """Samples of phi(x + q) on phi's own grid; zero beyond the grid.

    ``method="spectral"`` uses band-limited (Fourier) interpolation,
    ``method="cubic"`` a cubic spline through the samples.
    """
    if method == "spectral":
        return translate_samples(phi.amplitudes, phi.grid, q)
    if method == "cubic":
        from scipy.interpolate import CubicSpline

        x = phi.grid.points
        spline = CubicSpline(x, phi.amplitudes)
        xs = x + q
        out = np.where((xs >= x[0]) & (xs <= x[-1]), spline(np.clip(xs, x[0], x[-1])), 0.0)
        return out.astype(complex)
    raise ValueError(f"unknown interpolation method {method!r}")


def effective_operator(psi: PositionWaveFunction, phi: PositionWaveFunction, q: float,
                       method: str = "spectral") -> PositionWaveFunction:
    """Conditional output phi_r(x + q) psi(x) for homodyne outcome q (unnormalized)."""
    _same_grid(psi, phi)
    return psi.with_amplitudes(psi.amplitudes * shift_resource(phi, q, method))


def unitarized_filter(x, q: float, a0: float) -> np.ndarray:
    """exp(-(x+q)^2/2) exp(i a0 ((x+q)^3 - 3(x+q)/2)): the 03 filter with its bracket exponentiated."""
    y = np.asarray(x, dtype=float) + q
    return np.exp(-0.5 * y * y + 1j * a0 * (y ** 3 - 1.5 * y))


def _correlate(weights: np.ndarray, kernel_ext: np.ndarray) -> np.ndarray:
    # out[j] = sum_k weights[k] * kernel_ext[j + k]
    return fftconvolve(kernel_ext, weights[::-1], mode="valid")


def _trapezoid_weights(grid: Grid) -> np.ndarray:
    w = np.full(grid.n_points, grid.dx)
    w[0] = w[-1] = 0.5 * grid.dx
    return w


def homodyne_density(psi: PositionWaveFunction, phi: PositionWaveFunction, q_grid: Grid | None = None,
                     renormalize: bool = True) -> DensitySamples:
    """Outcome density p(q) on ``q_grid`` (defaults to the x-grid).

    When the q-grid has the x-grid spacing the whole curve is one FFT
    correlation; otherwise each q is integrated separately.  The result is
    rescaled to unit integral over the q-grid; a :class:`NumericalGuardError`
    is raised if less than ``MASS_WARNING`` of the mass was covered.
    """
    _same_grid(psi, phi)
    grid = psi.grid
    q_grid = q_grid or grid
    if math.isclose(q_grid.dx, grid.dx, rel_tol=1e-12, abs_tol=0.0):
        # x_k + q_j = x_min + q_min + (k + j) dx
        ext = translate_samples(np.abs(phi.amplitudes) ** 2, grid, q_grid.x_min,
                                start=0, count=grid.n_points + q_grid.n_points - 1)
        values = _correlate(_trapezoid_weights(grid) * psi.density, ext)
    else:
        values = np.array([density_at(psi, phi, q) for q in q_grid.points])
    values = np.clip(np.real(values), 0.0, None)
    dens = DensitySamples(q_grid, values)
    mass = dens.total()
    if renormalize:
        if mass < MASS_WARNING:
            raise NumericalGuardError(f"q-grid too narrow: it covers only {mass:.6f} of p(q)")
        dens = DensitySamples(q_grid, values / mass)
    return dens


def density_at(psi: PositionWaveFunction, phi: PositionWaveFunction, q: float) -> float:
    """p(q) at a single outcome by direct quadrature."""
    shifted = translate_samples(np.abs(phi.amplitudes) ** 2, phi.grid, q)
    return float(integrate(psi.density * shifted, psi.grid).real)


def feed_forward(psi: PositionWaveFunction, q: float, a0: float) -> PositionWaveFunction:
    """Multiply by e^{i3a0q/2} e^{-i a0 (3x^2 q + 3x q^2 + q^3)} e^{i 3 a0 x / 2}."""
    x = psi.x
    phase = 1.5 * a0 * q - a0 * (3 * x * x * q + 3 * x * q * q + q ** 3) + 1.5 * a0 * x
    return psi.with_amplitudes(psi.amplitudes * np.exp(1j * phase), psi.normalized)


def ideal_output(psi: PositionWaveFunction, q: float, a0: float) -> PositionWaveFunction:
    """Normalized A_q exp(i a0 x^3) psi, composed from the single-mode primitives."""
    gated = apply_phase_gate(psi, GateSpec(3, a0))
    damped, _ = apply_damping(gated, q)
    return normalize(damped)


def _filtered_output(psi, phi, q, a0, unitarize):
    raw = effective_operator(psi, phi, q)
    if unitarize:
        filtered = psi.with_amplitudes(psi.amplitudes * unitarized_filter(psi.x, q, a0))
    else:
        filtered = raw
    return raw, filtered


def run_deterministic(psi: PositionWaveFunction, a0: float, u: float, unitarize: bool = True,
                      resource: PositionWaveFunction | None = None) -> CircuitOutcome:
    """One run with dynamic feed-forward.

    The homodyne outcome is drawn by inverse CDF from p(q) of the actual 03
    resource.  ``raw_norm2`` is the squared norm of the raw filtered state,
    i.e. the unrenormalized p(q).  With ``unitarize`` (default) the output is
    built from the exponentiated filter, which the feed-forward maps exactly
    onto A_q exp(i a0 x^3); otherwise the raw first-order filter is used.
    """
    if not psi.normalized:
        raise ValueError("input state must be normalized")
    phi = resource if resource is not None else resource_03(a0, psi.grid)
    dens = homodyne_density(psi, phi)
    q = sample_from_density(dens, u)
    raw, filtered = _filtered_output(psi, phi, q, a0, unitarize)
    out = normalize(feed_forward(filtered, q, a0))
    return CircuitOutcome(q=q, output=out, raw_norm2=raw.norm2(), density=dens)


def translate(psi: PositionWaveFunction, t: float) -> PositionWaveFunction:
    """X(t) = exp(-i t p): psi(x) -> psi(x - t), by band-limited interpolation."""
    moved = psi.with_amplitudes(translate_samples(psi.amplitudes, psi.grid, -t))
    if psi.normalized and abs(moved.norm2() - 1.0) < 1e-6:
        return moved.with_amplitudes(moved.amplitudes, True)
    return moved


def run_postselected(psi: PositionWaveFunction, a0: float, spec: PostSelectSpec, u: float,
                     conditional: bool = False, unitarize: bool = True) -> CircuitOutcome:
    """Fixed-correction variant: keep only outcomes with |q - q0| <= eps.

    The input is pre-displaced by X(-q0) and the kept output post-processed
    by Z(3 a0 / 2) X(q0), so an outcome at q0 yields A_0 exp(i a0 x^3) psi.
    ``u`` is a uniform variate for p(q); with ``conditional=True`` it is
    mapped into the accepted window, i.e. the draw is conditioned on success.
    """
    if not psi.normalized:
        raise ValueError("input state must be normalized")
    phi = resource_03(a0, psi.grid)
    shifted_in = translate(psi, -spec.q0)
    dens = homodyne_density(shifted_in, phi)
    lo, hi = spec.q0 - spec.eps, spec.q0 + spec.eps
    mass = dens.mass_between(lo, hi)
    if conditional:
        if not mass > 0:
            raise NumericalGuardError("post-selection window has zero probability")
        cdf = dens.cdf()
        c_lo, c_hi = np.interp([lo, hi], dens.grid.points, cdf)
        u = float(np.clip((c_lo + u * (c_hi - c_lo)) / cdf[-1], 0.0, np.nextafter(1.0, 0.0)))
    q = sample_from_density(dens, u)
    if conditional:
        q = min(max(q, lo), hi)  # CDF round-off at the window edges
    accepted = abs(q - spec.q0) <= spec.eps
    raw, filtered = _filtered_output(shifted_in, phi, q, a0, unitarize)
    x = psi.x
    corrected = translate(filtered, spec.q0)
    corrected = corrected.with_amplitudes(corrected.amplitudes * np.exp(1.5j * a0 * x))
    return CircuitOutcome(q=q, output=normalize(corrected), raw_norm2=raw.norm2(), density=dens,
                          accepted=accepted, acceptance_mass=mass)


def squeezed_effective(q: float, r: float, a0: float, grid: Grid) -> np.ndarray:
    """Diagonal kernel exp(-(x/r + q)^2 / 2 + i a0 (x/r)^3) of the squeezed effective operator."""
    if not r > 0:
        raise ValueError("squeezing factor r must be positive")
    s = grid.points / r
    return np.exp(-0.5 * (s + q) ** 2 + 1j * a0 * s ** 3)


def quartic_effective(psi: PositionWaveFunction, q: float, a0: float):
    """First-order quartic filter from the 04 resource and its exponentiated form.

    raw   = e^{-(x+q)^2/2} [1 + i a0 ((x+q)^4 - 3(x+q)^2 + 3/4)] psi
    expo  = e^{-beta (x+q)^2/2} e^{i a0 (x+q)^4} psi,  beta = 1 + 6 i a0

    ``expo`` omits the constant phase e^{i 3 a0 / 4}.
    """
    y = psi.x + q
    raw = np.exp(-0.5 * y * y) * (1 + 1j * a0 * (y ** 4 - 3 * y * y + 0.75))
    beta = 1 + 6j * a0
    expo = np.exp(-0.5 * beta * y * y + 1j * a0 * y ** 4)
    return psi.with_amplitudes(raw * psi.amplitudes), psi.with_amplitudes(expo * psi.amplitudes)


def product_step(psi: PositionWaveFunction, gamma: float, n_steps: int) -> PositionWaveFunction:
    """Apply the first-order filter (1 + i gamma x^3 / n) n times: (1 + i gamma x^3/n)^n psi."""
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    step = 1 + 1j * gamma * psi.x ** 3 / n_steps
    amps = psi.amplitudes.copy()
    for _ in range(n_steps):
        amps = amps * step
    return psi.with_amplitudes(amps)


def analytic_shifted_on(spec: ONSpec, grid: Grid, q: float) -> np.ndarray:
    """phi_r(x + q) for an ON resource, evaluated from its closed form."""
    return on_amplitude(spec, grid.points + q)
