"""Optical preparation of the 03 resource state and its elementary building blocks.

Pipeline: a two-mode squeezed vacuum with y = tanh r, the three-fold filter
Y = (a + b1)(a + b2)(a + b3) on one arm, and a vacuum projection on that same
arm.  The surviving arm carries

    b1 b2 b3 |0> + y (b1 b2 + b2 b3 + b3 b1) |1> + sqrt(2) y^2 (b1 + b2 + b3) |2> + sqrt(6) y^3 |3>.

Choosing the b_k as c times the three cube roots of i kills the |1> and |2>
terms and leaves i c^3 |0> + sqrt(6) y^3 |3>, i.e. |0> - i sqrt(6) (y/c)^3 |3>
up to normalization.  ``c`` is a signed real here: c < 0 flips the sign of the
|3> coefficient, which is how a target a = +i sqrt(3) a0 / 2 is reached with
a0 > 0.  With c' = -c / 6^{1/6} the same state is |0> + i (y/c')^3 |3>;
:attr:`PrepParams.c_rescaled` reports c'.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import fock
from .grid import NumericalGuardError

__all__ = [
    "PrepParams",
    "root_betas",
    "prepare_on3_ideal",
    "prepare_on3_circuit",
    "solve_prep_params",
    "filter_matrix",
    "displaced_chain_matrix",
    "photon_subtract_bs",
    "photon_add_via_s2",
    "tmss_arm_identity_residual",
    "DisplacementReport",
    "displace_by_bs",
]

DEFAULT_CUTOFF = 40

# 1 - F <= K * theta^2 (resp. r^2) for the subtraction / addition elements,
# for inputs with photon-number variance below ~100 and theta, r <= 0.2.
SUBTRACTION_K = 1.0
ADDITION_K = 1.0


def root_betas(c: float) -> tuple[complex, complex, complex]:
    return tuple(c * cmath.exp(1j * phi) for phi in (math.pi / 6, 5 * math.pi / 6, 3 * math.pi / 2))


@dataclass(frozen=True)
class PrepParams:
    r: float
    c: float
    betas: tuple = field(default=None)
    a0: float | None = None

    def __post_init__(self):
        if self.c == 0:
            raise ValueError("c = 0 makes the filter a pure three-photon subtraction")
        if self.betas is None:
            object.__setattr__(self, "betas", root_betas(self.c))
        if len(self.betas) != 3:
            raise ValueError("need exactly three displacement amplitudes")

    @property
    def y(self) -> float:
        return math.tanh(self.r)

    @property
    def c_rescaled(self) -> float:
        return -self.c / 6.0 ** (1.0 / 6.0)


def _elementary(betas):
    b1, b2, b3 = betas
    return b1 + b2 + b3, b1 * b2 + b2 * b3 + b3 * b1, b1 * b2 * b3


def prepare_on3_ideal(params: PrepParams, cutoff: int = 3, normalize: bool = True) -> np.ndarray:
    """Closed-form output of the filter-and-project pipeline on the free arm."""
    e1, e2, e3 = _elementary(params.betas)
    y = params.y
    v = np.zeros(max(cutoff, 3) + 1, dtype=complex)
    v[:4] = [e3, y * e2, math.sqrt(2.0) * y * y * e1, math.sqrt(6.0) * y ** 3]
    if normalize:
        v = v / np.linalg.norm(v)
    return v


def filter_matrix(betas, cutoff: int) -> np.ndarray:
    """(a + b1)(a + b2)(a + b3) on the truncated space (exact: a only lowers)."""
    a = fock.annihilation(cutoff)
    eye = np.eye(cutoff + 1)
    out = eye.astype(complex)
    for b in betas:
        out = out @ (a + b * eye)
    return out


def _displacement_matrix(beta: complex, cutoff: int) -> np.ndarray:
    from scipy.linalg import expm

    a = fock.annihilation(cutoff)
    return expm(beta * a.T - np.conj(beta) * a)


def displaced_chain_matrix(betas, cutoff: int) -> np.ndarray:
    """D(-b1) a D(b1 - b2) a D(b2 - b3) a D(b3), equal to the filter up to a scalar."""
    b1, b2, b3 = betas
    a = fock.annihilation(cutoff)
    d = lambda beta: _displacement_matrix(beta, cutoff)  # noqa: E731
    return d(-b1) @ a @ d(b1 - b2) @ a @ d(b2 - b3) @ a @ d(b3)


def prepare_on3_circuit(params: PrepParams, cutoff: int = DEFAULT_CUTOFF, path: str = "direct",
                        guard: float = fock.TAIL_GUARD):
    """Simulate the preparation in the truncated two-mode Fock space.

    Returns ``(state, probability)``: the normalized state of the free arm and
    the probability that the vacuum projection succeeds on the filtered state.
    The filter Y is not trace preserving and its overall scale is arbitrary,
    so the probability is taken relative to the filtered two-mode norm.
    ``path="chain"`` applies the filter as the displaced-annihilation chain.
    """
    state = fock.tmss(params.r, cutoff, guard)
    if path == "direct":
        y_op = filter_matrix(params.betas, cutoff)
    elif path == "chain":
        y_op = displaced_chain_matrix(params.betas, cutoff)
    else:
        raise ValueError(f"unknown path {path!r}")
    filtered = state @ y_op.T  # filter acts on mode 1
    residue, weight = fock.postselect(filtered, 1, 0)
    total = float(np.vdot(filtered, filtered).real)
    if not weight > 0:
        raise NumericalGuardError("vacuum projection has zero probability")
    return residue / math.sqrt(weight), weight / total


def solve_prep_params(a0_target: float, y: float = 0.5) -> PrepParams:
    """Squeezing and filter amplitude producing the 03 state with a = i sqrt(3) a0 / 2.

    Solves sqrt(6) (y / |c|)^3 = sqrt(3) a0 / 2 with c < 0.  For ``a0 = 0``
    the vacuum recipe (no squeezing) is returned.
    """
    if not 0 < y < 1:
        raise ValueError("y = tanh r must lie in (0, 1)")
    if a0_target < 0:
        raise ValueError("a0_target must be non-negative")
    if a0_target == 0:
        return PrepParams(r=0.0, c=1.0, a0=0.0)
    c = -y * (2.0 * math.sqrt(2.0) / a0_target) ** (1.0 / 3.0)
    return PrepParams(r=math.atanh(y), c=c, a0=a0_target)


def photon_subtract_bs(psi: np.ndarray, theta: float):
    """Beam splitter onto a vacuum ancilla, then a single-photon click on the ancilla.

    Returns ``(normalized output, click probability)``.  The output equals
    cos(theta)^n a|psi> normalized, so it approaches a|psi> with
    1 - F <= SUBTRACTION_K theta^2; the click probability is theta^2 <n> to
    leading order.
    """
    psi = np.asarray(psi, dtype=complex)
    if not 0 < theta <= 0.2:
        raise ValueError("theta must lie in (0, 0.2]")
    if np.allclose(fock.annihilate(psi), 0):
        raise ValueError("nothing to subtract: a|psi> = 0")
    cutoff = len(psi) - 1
    joint = fock.beamsplitter(fock.product_state(psi, fock.fock_state(0, cutoff)), theta)
    out, prob = fock.postselect(joint, 1, 1)
    return out / math.sqrt(prob), prob


def photon_add_via_s2(psi: np.ndarray, r: float, pad: int = 6, ancilla_cutoff: int = 12):
    """Weak two-mode squeezer with a vacuum ancilla, then a single-photon click.

    The output cutoff is ``len(psi) - 1 + pad``.  Fidelity to a^dagger|psi>
    obeys 1 - F <= ADDITION_K r^2; the click probability is r^2 (<n> + 1) to
    leading order.
    """
    psi = np.asarray(psi, dtype=complex)
    if not 0 < r <= 0.2:
        raise ValueError("r must lie in (0, 0.2]")
    cutoff = len(psi) - 1 + pad
    grown = np.zeros(cutoff + 1, dtype=complex)
    grown[: len(psi)] = psi
    joint = fock.two_mode_squeeze(fock.product_state(grown, fock.fock_state(0, ancilla_cutoff)), r)
    out, prob = fock.postselect(joint, 1, 1)
    return out / math.sqrt(prob), prob


def tmss_arm_identity_residual(r: float, cutoff: int = DEFAULT_CUTOFF) -> float:
    """max |(1 x a)|TMSS> - (y a^dagger x 1)|TMSS>| over all coefficients."""
    state = fock.tmss(r, cutoff)
    a = fock.annihilation(cutoff)
    lhs = state @ a.T
    rhs = math.tanh(r) * (a.T @ state)
    return float(np.max(np.abs(lhs - rhs)))


@dataclass(frozen=True)
class DisplacementReport:
    rho: np.ndarray
    target: np.ndarray
    alpha: complex
    fidelity: float
    purity: float


def displace_by_bs(psi: np.ndarray, z: complex, theta: float, pad: int = 12,
                   guard: float = fock.TAIL_GUARD) -> DisplacementReport:
    """Displace ``psi`` by mixing it with a strong coherent beam |z> on a weak beam splitter.

    The beam splitter carries a quarter-wave phase (phi = pi/2), so the
    reduced state approaches D(i z sin theta) rho D^dagger as theta -> 0 with
    z sin theta fixed.  Fidelity is sqrt(<target|rho|target>).
    """
    psi = np.asarray(psi, dtype=complex)
    cutoff = len(psi) - 1 + pad
    grown = np.zeros(cutoff + 1, dtype=complex)
    grown[: len(psi)] = psi
    zabs = abs(z)
    anc_cutoff = int(math.ceil(zabs * zabs + 12.0 * zabs + 20))
    ancilla = fock.coherent_state(z, anc_cutoff)
    fock.check_tail(ancilla, guard, "coherent ancilla")
    joint = fock.beamsplitter(fock.product_state(grown, ancilla), theta, phi=math.pi / 2, guard=guard)
    rho = fock.partial_trace(joint, keep=0)
    alpha = 1j * z * math.sin(theta)
    target = fock.displace(grown, alpha, guard=guard)
    target = target / np.linalg.norm(target)
    fid = math.sqrt(max(float(np.vdot(target, rho @ target).real), 0.0))
    purity = float(np.trace(rho @ rho).real)
    return DisplacementReport(rho, target, alpha, fid, purity)
