"""Truncated photon-number-basis algebra for one and two modes.

Single-mode states are 1-D complex arrays ``c[n]``; two-mode states are 2-D
arrays ``c[m, n]`` (first index: mode 0).  Evolutions exponentiate the
truncated generator.  Two-mode generators conserve either the total photon
number (beam splitter) or the photon-number difference (two-mode squeezer),
so they are exponentiated block by block, which equals exponentiating the
dense truncated matrix.
"""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.linalg import expm

from .grid import BoundaryMassError, Grid
from .states import BOUNDARY_GUARD, PositionWaveFunction

__all__ = [
    "CutoffWarning",
    "TAIL_GUARD",
    "fock_state",
    "coherent_state",
    "annihilation",
    "creation",
    "annihilate",
    "create",
    "tail_mass",
    "check_tail",
    "displace",
    "single_mode_squeeze",
    "beamsplitter",
    "two_mode_squeeze",
    "tmss",
    "product_state",
    "postselect",
    "mean_photon",
    "fidelity",
    "fock_to_position",
    "symplectic_form",
    "is_symplectic",
    "compose_symplectic",
    "single_mode_squeezer_symplectic",
    "beamsplitter_symplectic",
    "two_mode_squeezer_symplectic",
    "density_matrix",
    "partial_trace",
]

TAIL_GUARD = 1e-10


class CutoffWarning(RuntimeWarning):
    """Population in the top Fock levels exceeds the tail guard."""


def fock_state(n: int, cutoff: int) -> np.ndarray:
    if not 0 <= n <= cutoff:
        raise ValueError(f"|{n}> does not fit below cutoff {cutoff}")
    v = np.zeros(cutoff + 1, dtype=complex)
    v[n] = 1.0
    return v


def coherent_state(alpha: complex, cutoff: int) -> np.ndarray:
    """Analytic coefficients exp(-|alpha|^2/2) alpha^n / sqrt(n!), via logarithms."""
    n = np.arange(cutoff + 1)
    r = abs(alpha)
    if r == 0:
        return fock_state(0, cutoff)
    log_mag = -0.5 * r * r + n * math.log(r) - 0.5 * np.array([math.lgamma(k + 1) for k in n])
    phase = np.exp(1j * n * np.angle(alpha))
    return np.exp(log_mag) * phase


def annihilation(cutoff: int) -> np.ndarray:
    return np.diag(np.sqrt(np.arange(1, cutoff + 1)), 1).astype(complex)


def creation(cutoff: int) -> np.ndarray:
    return annihilation(cutoff).T.copy()


def annihilate(v: np.ndarray) -> np.ndarray:
    """(a v)_n = sqrt(n+1) v_{n+1}; exact on the truncated space."""
    v = np.asarray(v, dtype=complex)
    out = np.zeros_like(v)
    out[:-1] = np.sqrt(np.arange(1, len(v))) * v[1:]
    return out


def create(v: np.ndarray) -> np.ndarray:
    """(a^dagger v)_n = sqrt(n) v_{n-1}; the top level is dropped."""
    v = np.asarray(v, dtype=complex)
    out = np.zeros_like(v)
    out[1:] = np.sqrt(np.arange(1, len(v))) * v[:-1]
    return out


def tail_mass(v: np.ndarray) -> float:
    """Largest population in the top two Fock levels of any mode."""
    v = np.asarray(v)
    p = np.abs(v) ** 2
    if v.ndim == 1:
        return float(p[-2:].sum())
    return max(float(p[-2:, :].sum()), float(p[:, -2:].sum()))


def check_tail(v: np.ndarray, guard: float = TAIL_GUARD, what: str = "state") -> float:
    t = tail_mass(v)
    if t > guard:
        warnings.warn(
            f"{what}: population {t:.3g} in the top Fock levels exceeds {guard:g}; raise the cutoff",
            CutoffWarning,
            stacklevel=3,
        )
    return t


def _evolve(v: np.ndarray, generator: np.ndarray, guard: float) -> np.ndarray:
    out = expm(generator) @ np.asarray(v, dtype=complex)
    check_tail(out, guard)
    return out


def displace(v: np.ndarray, beta: complex, guard: float = TAIL_GUARD) -> np.ndarray:
    """D(beta) = exp(beta a^dagger - beta^* a) on the truncated space."""
    cutoff = len(v) - 1
    a = annihilation(cutoff)
    return _evolve(v, beta * a.T - np.conj(beta) * a, guard)


def single_mode_squeeze(v: np.ndarray, r: float, guard: float = TAIL_GUARD) -> np.ndarray:
    """S(r) = exp(r (a^2 - a^dagger^2) / 2); r > 0 squeezes x."""
    cutoff = len(v) - 1
    a = annihilation(cutoff)
    return _evolve(v, 0.5 * r * (a @ a - a.T @ a.T), guard)


def beamsplitter(v: np.ndarray, theta: float, phi: float = 0.0, guard: float = TAIL_GUARD) -> np.ndarray:
    """BS = exp(theta (e^{i phi} a^dagger b - e^{-i phi} a b^dagger)).

    With phi = 0, BS|psi>|0> = |psi>|0> - theta a|psi>|1> + O(theta^2).
    Blocks of fixed total photon number are exponentiated separately.
    """
    v = np.asarray(v, dtype=complex)
    na, nb = v.shape[0] - 1, v.shape[1] - 1
    out = np.zeros_like(v)
    up = theta * np.exp(1j * phi)
    for total in range(na + nb + 1):
        k = np.arange(max(0, total - nb), min(na, total) + 1)
        amps = v[k, total - k]
        if len(k) == 1:
            out[k, total - k] = amps
            continue
        if not np.any(amps):
            continue
        # a^dagger b : |k, N-k> -> sqrt((k+1)(N-k)) |k+1, N-k-1>
        w = np.sqrt((k[:-1] + 1.0) * (total - k[:-1]))
        gen = np.diag(up * w, -1) - np.diag(np.conj(up) * w, 1)
        out[k, total - k] = expm(gen) @ amps
    check_tail(out, guard)
    return out


def two_mode_squeeze(v: np.ndarray, r: float, guard: float = TAIL_GUARD) -> np.ndarray:
    """S2(r) = exp(r (a^dagger b^dagger - a b)), block-diagonal in n_a - n_b."""
    v = np.asarray(v, dtype=complex)
    na, nb = v.shape[0] - 1, v.shape[1] - 1
    out = np.zeros_like(v)
    for diff in range(-nb, na + 1):
        kb = np.arange(max(0, -diff), min(nb, na - diff) + 1)
        ka = kb + diff
        amps = v[ka, kb]
        if len(kb) == 1:
            out[ka, kb] = amps
            continue
        if not np.any(amps):
            continue
        w = np.sqrt((ka[:-1] + 1.0) * (kb[:-1] + 1.0))
        gen = r * (np.diag(w, -1) - np.diag(w, 1))
        out[ka, kb] = expm(gen) @ amps
    check_tail(out, guard)
    return out


def tmss(r: float, cutoffs, guard: float = TAIL_GUARD) -> np.ndarray:
    """sech r * sum_n tanh(r)^n |n, n>."""
    if np.isscalar(cutoffs):
        cutoffs = (int(cutoffs), int(cutoffs))
    na, nb = cutoffs
    out = np.zeros((na + 1, nb + 1), dtype=complex)
    n = np.arange(min(na, nb) + 1)
    out[n, n] = np.tanh(r) ** n / np.cosh(r)
    check_tail(out, guard, "tmss")
    return out


def product_state(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    return np.outer(u, w)


def postselect(v: np.ndarray, mode: int, outcome: int):
    """Project ``mode`` (0 or 1) of a two-mode state onto |outcome>.

    Returns the unnormalized single-mode residue and its squared norm, which
    is the outcome probability for a normalized input.
    """
    v = np.asarray(v)
    if mode not in (0, 1):
        raise ValueError("mode must be 0 or 1")
    if not 0 <= outcome < v.shape[mode]:
        raise ValueError(f"outcome {outcome} exceeds the cutoff of mode {mode}")
    residue = v[outcome, :].copy() if mode == 0 else v[:, outcome].copy()
    return residue, float(np.vdot(residue, residue).real)


def mean_photon(v: np.ndarray) -> float:
    p = np.abs(np.asarray(v)) ** 2
    return float(np.dot(np.arange(len(p)), p) / p.sum())


def fidelity(u: np.ndarray, w: np.ndarray) -> float:
    """|<u|w>| between normalized copies of two Fock vectors."""
    nu, nw = np.linalg.norm(u), np.linalg.norm(w)
    if nu == 0 or nw == 0:
        raise ValueError("fidelity of a zero vector is undefined")
    return float(abs(np.vdot(u, w)) / (nu * nw))


def fock_to_position(v: np.ndarray, grid: Grid) -> PositionWaveFunction:
    """sum_n c_n psi_n(x) using the normalized Hermite-function recurrence."""
    v = np.asarray(v, dtype=complex)
    x = grid.points
    psi_prev = np.pi ** -0.25 * np.exp(-0.5 * x * x)
    total = v[0] * psi_prev
    if len(v) > 1:
        psi = math.sqrt(2.0) * x * psi_prev
        total = total + v[1] * psi
        for n in range(1, len(v) - 1):
            psi_prev, psi = psi, math.sqrt(2.0 / (n + 1)) * x * psi - math.sqrt(n / (n + 1)) * psi_prev
            total = total + v[n + 1] * psi
    out = PositionWaveFunction(grid, total, False)
    edge = max(abs(total[0]) ** 2, abs(total[-1]) ** 2)
    if edge > BOUNDARY_GUARD:
        raise BoundaryMassError(f"|psi|^2 = {edge:.3g} at the grid edge; use a larger grid")
    norm2 = float(np.vdot(v, v).real)
    return PositionWaveFunction(grid, out.amplitudes, abs(norm2 - 1.0) < 1e-8)


# -- symplectic (x1, p1, x2, p2) matrices --------------------------------------

def symplectic_form(modes: int) -> np.ndarray:
    return np.kron(np.eye(modes), np.array([[0.0, 1.0], [-1.0, 0.0]]))


def is_symplectic(s: np.ndarray, tol: float = 1e-12) -> bool:
    s = np.asarray(s, dtype=float)
    if s.ndim != 2 or s.shape[0] != s.shape[1] or s.shape[0] % 2:
        return False
    omega = symplectic_form(s.shape[0] // 2)
    return bool(np.max(np.abs(s.T @ omega @ s - omega)) <= tol)


def compose_symplectic(*mats: np.ndarray) -> np.ndarray:
    """Matrix product ``mats[0] @ mats[1] @ ...`` of symplectic matrices."""
    if not mats:
        raise ValueError("nothing to compose")
    out = np.eye(np.asarray(mats[0]).shape[0])
    for m in mats:
        if not is_symplectic(m):
            raise ValueError("input matrix is not symplectic")
        out = out @ np.asarray(m, dtype=float)
    return out


def single_mode_squeezer_symplectic(r: float) -> np.ndarray:
    return np.diag([math.exp(-r), math.exp(r)])


def beamsplitter_symplectic(theta: float = math.pi / 4) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    i2 = np.eye(2)
    return np.block([[c * i2, s * i2], [-s * i2, c * i2]])


def two_mode_squeezer_symplectic(r: float) -> np.ndarray:
    """BS(pi/4)^{-1} (S(r) + S(r)^{-1}) BS(pi/4) for direct-sum squeezers."""
    s = single_mode_squeezer_symplectic(r)
    local = np.block([[s, np.zeros((2, 2))], [np.zeros((2, 2)), np.linalg.inv(s)]])
    bs = beamsplitter_symplectic(math.pi / 4)
    return compose_symplectic(np.linalg.inv(bs), local, bs)


# -- density operators (validation of the displacement element only) ------------

def density_matrix(v: np.ndarray) -> np.ndarray:
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, np.conj(v))


def partial_trace(v: np.ndarray, keep: int = 0) -> np.ndarray:
    """Reduced density matrix of mode ``keep`` from a pure two-mode array."""
    v = np.asarray(v, dtype=complex)
    if keep == 0:
        return v @ v.conj().T
    if keep == 1:
        return v.T @ v.conj()
    raise ValueError("keep must be 0 or 1")

