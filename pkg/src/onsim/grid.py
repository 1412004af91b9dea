"""Uniform position grids, quadrature, special functions and density sampling.

Everything that lives in the position representation is sampled on a
:class:`Grid`.  Integrals are trapezoid sums, which converge spectrally fast
for the smooth, exponentially localized integrands used throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "Grid",
    "DensitySamples",
    "NumericalGuardError",
    "BoundaryMassError",
    "integrate",
    "hermite",
    "airy_ai",
    "sample_from_density",
    "translate_samples",
]

DEFAULT_XMAX = 12.0
DEFAULT_NPOINTS = 4096


class NumericalGuardError(ValueError):
    """A numerical guard (mass coverage, norm, cutoff) was violated."""


class BoundaryMassError(NumericalGuardError):
    """A state carries non-negligible weight at the edge of its grid."""


@dataclass(frozen=True)
class Grid:
    """Uniform 1-D lattice ``x_k = x_min + k * dx`` for ``k = 0 .. n_points-1``."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self):
        if not self.x_max > self.x_min:
            raise ValueError(f"x_max must exceed x_min, got [{self.x_min}, {self.x_max}]")
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise ValueError(f"n_points must be an integer >= 2, got {self.n_points}")

    @classmethod
    def symmetric(cls, x_max: float = DEFAULT_XMAX, n_points: int = DEFAULT_NPOINTS) -> "Grid":
        return cls(-float(x_max), float(x_max), int(n_points))

    @classmethod
    def default(cls) -> "Grid":
        return cls.symmetric(DEFAULT_XMAX, DEFAULT_NPOINTS)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n_points - 1)

    @property
    def points(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n_points)

    @property
    def is_symmetric(self) -> bool:
        return self.x_min == -self.x_max

    def refined(self) -> "Grid":
        """Same extent with the spacing halved (grid-doubling checks)."""
        return Grid(self.x_min, self.x_max, 2 * self.n_points - 1)

    def __len__(self) -> int:
        return self.n_points


@dataclass(frozen=True)
class DensitySamples:
    """Non-negative density values on a grid, e.g. a homodyne distribution p(q)."""

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.shape != (self.grid.n_points,):
            raise ValueError("density length does not match the grid")
        if np.any(values < 0) or not np.all(np.isfinite(values)):
            raise ValueError("density values must be finite and non-negative")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    def total(self) -> float:
        return float(integrate(self.values, self.grid).real)

    def mean(self) -> float:
        return float(integrate(self.grid.points * self.values, self.grid).real) / self.total()

    def variance(self) -> float:
        m = self.mean()
        q = self.grid.points
        return float(integrate((q - m) ** 2 * self.values, self.grid).real) / self.total()

    def mass_between(self, lo: float, hi: float) -> float:
        """Integral of the (linearly interpolated) density over ``[lo, hi]``."""
        q = self.grid.points
        lo, hi = max(lo, q[0]), min(hi, q[-1])
        if hi <= lo:
            return 0.0
        inner = (q > lo) & (q < hi)
        xs = np.concatenate(([lo], q[inner], [hi]))
        ys = np.interp(xs, q, self.values)
        return float(np.trapezoid(ys, xs))

    def cdf(self) -> np.ndarray:
        """Cumulative trapezoid integral at every grid point (starts at 0)."""
        v = self.values
        steps = 0.5 * (v[1:] + v[:-1]) * self.grid.dx
        return np.concatenate(([0.0], np.cumsum(steps)))


def integrate(samples, grid: Grid) -> complex:
    """Trapezoid-rule integral of ``samples`` over ``grid``."""
    samples = np.asarray(samples)
    if samples.shape != (grid.n_points,):
        raise ValueError(
            f"expected {grid.n_points} samples, got shape {samples.shape}"
        )
    return np.trapezoid(samples, dx=grid.dx)


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by upward three-term recurrence."""
    if n < 0:
        raise ValueError("hermite order must be non-negative")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * x
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h if h.ndim else float(h)


# Ai(0) and -Ai'(0)
_AI0 = 3.0 ** (-2.0 / 3.0) / math.gamma(2.0 / 3.0)
_AIP0 = 3.0 ** (-1.0 / 3.0) / math.gamma(1.0 / 3.0)

# Maclaurin window; outside it the asymptotic series are more accurate than
# the cancelling power series in double precision.
_SERIES_LO = -7.0
_SERIES_HI = 5.0


def _airy_series(t: float) -> float:
    t3 = t * t * t
    f_term, g_term = 1.0, t
    f_sum, g_sum = f_term, g_term
    k = 0
    while True:
        f_term *= t3 / ((3 * k + 2) * (3 * k + 3))
        g_term *= t3 / ((3 * k + 3) * (3 * k + 4))
        f_sum += f_term
        g_sum += g_term
        k += 1
        if k > 4 and abs(f_term) < 1e-18 * max(abs(f_sum), 1.0) and abs(g_term) < 1e-18 * max(abs(g_sum), 1.0):
            break
    return _AI0 * f_sum - _AIP0 * g_sum


def _airy_u(k_max: int) -> list[float]:
    u = [1.0]
    for k in range(1, k_max + 1):
        u.append(u[-1] * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / (216.0 * k * (2 * k - 1)))
    return u


_U = _airy_u(40)


def _airy_asymptotic_positive(t: float) -> float:
    zeta = 2.0 / 3.0 * t ** 1.5
    total, prev = 0.0, math.inf
    for k, uk in enumerate(_U):
        term = uk / zeta ** k
        if term > prev:
            break
        total += (-1) ** k * term
        prev = term
        if term < 1e-17:
            break
    return math.exp(-zeta) / (2.0 * math.sqrt(math.pi) * t ** 0.25) * total


def _airy_asymptotic_negative(z: float) -> float:
    zeta = 2.0 / 3.0 * z ** 1.5
    p_sum = q_sum = 0.0
    prev = math.inf
    for k, uk in enumerate(_U):
        term = uk / zeta ** k
        if term > prev:
            break
        prev = term
        sign = (-1) ** (k // 2)
        if k % 2 == 0:
            p_sum += sign * term
        else:
            q_sum += sign * term
        if term < 1e-17:
            break
    phase = zeta - math.pi / 4.0
    return (math.cos(phase) * p_sum + math.sin(phase) * q_sum) / (math.sqrt(math.pi) * z ** 0.25)


def _airy_scalar(t: float) -> float:
    if not math.isfinite(t):
        raise ValueError("airy_ai needs a finite argument")
    if t > _SERIES_HI:
        return _airy_asymptotic_positive(t)
    if t < _SERIES_LO:
        return _airy_asymptotic_negative(-t)
    return _airy_series(t)


def airy_ai(t):
    """Airy function Ai(t).

    Maclaurin series on [-7, 5]; the standard asymptotic expansions outside.
    Absolute accuracy is better than 1e-10 on [-10, 10].
    """
    arr = np.asarray(t, dtype=float)
    if arr.ndim == 0:
        return _airy_scalar(float(arr))
    flat = arr.ravel()
    # Ai only depends on t; evaluate each distinct value once
    uniq, inverse = np.unique(flat, return_inverse=True)
    vals = np.array([_airy_scalar(float(v)) for v in uniq])
    return vals[inverse].reshape(arr.shape)


def sample_from_density(density: DensitySamples, u: float) -> float:
    """Inverse-CDF draw from ``density`` for a uniform variate ``u`` in [0, 1).

    The cumulative distribution is the trapezoid integral at grid points and is
    linearly interpolated between them, so the map ``u -> q`` is monotone and
    deterministic.
    """
    if not 0.0 <= u < 1.0:
        raise ValueError(f"u must lie in [0, 1), got {u}")
    cdf = density.cdf()
    total = cdf[-1]
    if not total > 0:
        raise NumericalGuardError("density has zero total mass")
    target = u * total
    q = density.grid.points
    # first index whose cumulative mass exceeds the target
    k = int(np.searchsorted(cdf, target, side="right"))
    if k == 0:
        return float(q[0])
    if k >= len(cdf):
        return float(q[-1])
    lo, hi = cdf[k - 1], cdf[k]
    frac = (target - lo) / (hi - lo)
    return float(q[k - 1] + frac * density.grid.dx)


def translate_samples(values, grid: Grid, shift: float, start: int = 0, count: int | None = None) -> np.ndarray:
    """Band-limited evaluation of ``f(x_j + shift)`` for ``j = start .. start+count-1``.

    ``values`` are samples ``f(x_k)`` on ``grid``; ``x_j`` extends the grid
    lattice beyond its ends where ``j`` is out of range.  ``f`` is taken to
    vanish outside the grid.  The integer part of the shift is an exact index
    offset; the fractional part is applied as a Fourier phase ramp on a
    zero-padded copy, which is exact for band-limited samples.
    """
    values = np.asarray(values)
    n = grid.n_points
    if values.shape != (n,):
        raise ValueError("sample length does not match the grid")
    if count is None:
        count = n
    dx = grid.dx
    m = int(round(shift / dx))
    frac = shift - m * dx

    if frac == 0.0:
        shifted, pad = values.astype(complex if np.iscomplexobj(values) else float), 0
    else:
        pad = n
        padded = np.zeros(3 * n, dtype=complex)
        padded[pad:pad + n] = values
        k = 2.0 * np.pi * np.fft.fftfreq(3 * n, d=dx)
        shifted = np.fft.ifft(np.fft.fft(padded) * np.exp(1j * k * frac))
        if not np.iscomplexobj(values):
            shifted = shifted.real

    out = np.zeros(count, dtype=shifted.dtype)
    idx = pad + start + m + np.arange(count)
    ok = (idx >= 0) & (idx < len(shifted))
    out[ok] = shifted[idx[ok]]
    return out
