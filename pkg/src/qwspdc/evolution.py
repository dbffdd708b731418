"""
Real-space state-vector simulation of the split-step walk on a finite
open lattice x in [-L, L], with spin basis H = (1, 0), V = (0, 1).

One step applies, right to left, coin(theta2), a translation, coin(theta1)
and a second translation. The coin is the real rotation
[[cos t, -sin t], [sin t, cos t]].
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray
from scipy.stats import binom

from .core import wrap_angle
from .errors import EdgeOverflow, InsufficientData

__all__ = [
    "Convention",
    "Homogeneous",
    "Boundary",
    "WalkState",
    "WalkStats",
    "SYMMETRIC_SPIN",
    "localized_state",
    "step",
    "evolve",
    "walk_stats",
    "scaling_exponent",
    "classical_baseline",
    "bound_state_fraction",
    "ring_step_matrix",
]

SYMMETRIC_SPIN = (1 / np.sqrt(2), 1j / np.sqrt(2))


class Convention(str, enum.Enum):
    HALF = "half"
    FULL = "full"


@dataclass(frozen=True)
class Homogeneous:
    theta1: float
    theta2: float

    def __post_init__(self):
        object.__setattr__(self, "theta1", wrap_angle(self.theta1))
        object.__setattr__(self, "theta2", wrap_angle(self.theta2))

    def angles_at(self, x: NDArray[np.int64]):
        return np.full(x.shape, self.theta1), np.full(x.shape, self.theta2)


@dataclass(frozen=True)
class Boundary:
    """theta1_left on x < 0, theta1_right on x >= 0, uniform theta2."""

    theta1_left: float
    theta1_right: float
    theta2: float

    def __post_init__(self):
        for name in ("theta1_left", "theta1_right", "theta2"):
            object.__setattr__(self, name, wrap_angle(getattr(self, name)))

    def angles_at(self, x: NDArray[np.int64]):
        return np.where(x < 0, self.theta1_left, self.theta1_right), np.full(x.shape, self.theta2)


@dataclass
class WalkState:
    """Amplitudes of shape (2L + 1, 2); row i is site x = i - L, column 0 is H."""

    amplitudes: NDArray[np.complex128]
    step_count: int = 0

    @property
    def half_width(self) -> int:
        return (self.amplitudes.shape[0] - 1) // 2

    @property
    def positions(self) -> NDArray[np.int64]:
        L = self.half_width
        return np.arange(-L, L + 1)

    def norm(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass
class WalkStats:
    positions: NDArray[np.int64]
    position_distribution: NDArray[np.float64]
    mean: float
    sigma: float
    step_count: int = field(default=0)


def localized_state(half_width: int, spin=SYMMETRIC_SPIN, x0: int = 0) -> WalkState:
    """Walker at site ``x0`` with the given (normalised) spinor."""
    spin = np.asarray(spin, dtype=complex)
    norm = np.linalg.norm(spin)
    if norm == 0:
        raise ValueError("spin must be non-zero")
    amps = np.zeros((2 * half_width + 1, 2), dtype=complex)
    amps[x0 + half_width] = spin / norm
    return WalkState(amps, 0)


def _coin(psi, theta):
    c, s = np.cos(theta), np.sin(theta)
    h, v = psi[:, 0].copy(), psi[:, 1]
    psi[:, 0] = c * h - s * v
    psi[:, 1] = s * h + c * v


def _shift_h_right(psi, periodic):
    if periodic:
        psi[:, 0] = np.roll(psi[:, 0], 1)
    else:
        psi[1:, 0] = psi[:-1, 0].copy()
        psi[0, 0] = 0


def _shift_v_left(psi, periodic):
    if periodic:
        psi[:, 1] = np.roll(psi[:, 1], -1)
    else:
        psi[:-1, 1] = psi[1:, 1].copy()
        psi[-1, 1] = 0


def _apply_step(psi, theta1, theta2, convention, periodic=False):
    _coin(psi, theta2)
    _shift_v_left(psi, periodic)
    if convention is Convention.FULL:
        _shift_h_right(psi, periodic)
    _coin(psi, theta1)
    _shift_h_right(psi, periodic)
    if convention is Convention.FULL:
        _shift_v_left(psi, periodic)


def step(state: WalkState, profile, convention: Convention = Convention.HALF) -> WalkState:
    """
    Apply one split-step; returns a new state.

    With the HALF convention the first translation moves only V (x -> x - 1)
    and the second only H (x -> x + 1). With FULL both translations move H
    right and V left.

    Raises
    ------
    EdgeOverflow
        If any amplitude sits within two sites of the lattice edge.
    """
    convention = Convention(convention)
    amps = state.amplitudes
    if np.any(amps[:2] != 0) or np.any(amps[-2:] != 0):
        raise EdgeOverflow(
            f"support reaches the lattice edge (L={state.half_width}) at step {state.step_count}"
        )
    psi = amps.copy()
    theta1, theta2 = profile.angles_at(state.positions)
    _apply_step(psi, theta1, theta2, convention)
    return WalkState(psi, state.step_count + 1)


def walk_stats(state: WalkState) -> WalkStats:
    prob = np.sum(np.abs(state.amplitudes) ** 2, axis=1)
    x = state.positions
    total = prob.sum()
    mean = float(np.dot(x, prob) / total)
    var = float(np.dot((x - mean) ** 2, prob) / total)
    return WalkStats(x, prob, mean, np.sqrt(max(var, 0.0)), state.step_count)


def evolve(initial: WalkState, profile, steps: int,
           convention: Convention = Convention.HALF) -> list[WalkStats]:
    """Stats after 0, 1, ..., ``steps`` steps (``steps + 1`` entries)."""
    convention = Convention(convention)
    reach = 4 * steps + 2 if convention is Convention.FULL else 2 * steps + 2
    if initial.half_width <= reach:
        raise EdgeOverflow(
            f"lattice half-width {initial.half_width} too small for {steps} steps (need > {reach})"
        )
    state = initial
    out = [walk_stats(state)]
    for _ in range(steps):
        state = step(state, profile, convention)
        out.append(walk_stats(state))
    return out


def scaling_exponent(stats: list[WalkStats], fit_range: tuple[int, int]) -> float:
    """Least-squares slope of log sigma_N against log N for N in ``fit_range`` (inclusive)."""
    lo, hi = fit_range
    sel = [s for s in stats if lo <= s.step_count <= hi]
    if len(sel) < 2:
        raise InsufficientData(f"need at least two samples in N in [{lo}, {hi}], got {len(sel)}")
    n = np.array([s.step_count for s in sel], dtype=float)
    sigma = np.array([s.sigma for s in sel])
    if np.any(n <= 0) or np.any(sigma <= 0):
        raise InsufficientData("log-log fit needs N > 0 and sigma_N > 0")
    slope, _ = np.polyfit(np.log(n), np.log(sigma), 1)
    return float(slope)


def classical_baseline(steps: int) -> WalkStats:
    """Unbiased classical +-1 random walk after ``steps`` steps (binomial distribution)."""
    if steps < 1:
        raise ValueError(f"steps must be >= 1, got {steps}")
    x = np.arange(-steps, steps + 1)
    prob = np.zeros(x.size)
    prob[::2] = binom.pmf(np.arange(steps + 1), steps, 0.5)
    return WalkStats(x, prob, 0.0, float(np.sqrt(steps)), steps)


def bound_state_fraction(profile, steps: int, radius: int, spin=SYMMETRIC_SPIN) -> float:
    """Probability P(|x| <= radius) after ``steps`` half-steps from the origin."""
    state = localized_state(2 * steps + 3, spin)
    for _ in range(steps):
        state = step(state, profile, Convention.HALF)
    prob = np.sum(np.abs(state.amplitudes) ** 2, axis=1)
    return float(prob[np.abs(state.positions) <= radius].sum())


def ring_step_matrix(profile, num_sites: int,
                     convention: Convention = Convention.HALF) -> NDArray[np.complex128]:
    """
    Dense one-step operator on a periodic ring of ``num_sites`` sites.

    Basis index is ``2 * site + spin`` with sites 0..num_sites-1.
    """
    convention = Convention(convention)
    dim = 2 * num_sites
    x = np.arange(num_sites)
    theta1, theta2 = profile.angles_at(x)
    out = np.empty((dim, dim), dtype=complex)
    for col in range(dim):
        psi = np.zeros((num_sites, 2), dtype=complex)
        psi[col // 2, col % 2] = 1.0
        _apply_step(psi, theta1, theta2, convention, periodic=True)
        out[:, col] = psi.reshape(-1)
    return out
