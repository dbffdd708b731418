"""
Topological diagnostics of the split-step walk: Zak phases from a discrete
Wilson loop, the winding of the planar Bloch angle, and sector maps over the
(theta1, theta2) plane.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import NDArray

from .core import (
    GAP_TOL,
    Band,
    WalkAngles,
    band_eigenvector,
    dispersion,
    momentum_grid,
    relative_phase,
    relative_phase_curve,
)
from .errors import DegenerateOverlap, GapClosure, NonQuantized, PhaseUndefined

__all__ = [
    "ZakResult",
    "WindingResult",
    "PhaseDiagram",
    "BOUNDARY",
    "wilson_loop_phase",
    "zak_phase",
    "phi_difference",
    "tangent_ratio",
    "winding_number",
    "phase_diagram",
]

OVERLAP_TOL = 1e-6
RESIDUAL_TOL = 0.05
BOUNDARY = 99
"""Sentinel stored in ``PhaseDiagram.winding`` for cells without a valid invariant."""


def _wrap(phase):
    """Map onto (-pi, pi]."""
    return np.pi - np.mod(np.pi - phase, 2.0 * np.pi)


@dataclass(frozen=True)
class ZakResult:
    zak_plus: float
    zak_minus: float
    zak_total: float
    num_k: int


@dataclass(frozen=True)
class WindingResult:
    w: int
    samples: int
    residual: float = 0.0


@dataclass(frozen=True)
class PhaseDiagram:
    """Winding numbers on a (theta1, theta2) grid; ``winding[i, j]`` is at (theta1[i], theta2[j])."""

    theta1: NDArray[np.float64]
    theta2: NDArray[np.float64]
    winding: NDArray[np.int64]

    @property
    def boundary(self) -> NDArray[np.bool_]:
        return self.winding == BOUNDARY


def wilson_loop_phase(vectors: NDArray[np.complex128]) -> float:
    """
    Berry phase -Im log prod_j <u_j|u_{j+1}> of a closed loop of spinors.

    ``vectors`` has shape (M, 2); the loop is closed by pairing the last
    sample with the first.
    """
    v = np.asarray(vectors, dtype=complex)
    overlaps = np.sum(np.conj(v) * np.roll(v, -1, axis=0), axis=1)
    smallest = np.min(np.abs(overlaps))
    if smallest < OVERLAP_TOL:
        raise DegenerateOverlap(
            f"consecutive eigenvector overlap {smallest:.3g} < {OVERLAP_TOL:g}; refine the k-grid"
        )
    # accumulate the phase of unit overlaps to avoid under/overflow of the product
    total = np.sum(np.angle(overlaps))
    return float(_wrap(-total))


def zak_phase(angles: WalkAngles, num_k: int = 1024, gap_tol: float = GAP_TOL) -> ZakResult:
    """Per-band and summed Zak phases on ``momentum_grid(num_k)``, each in (-pi, pi]."""
    if num_k < 64:
        raise ValueError(f"num_k must be >= 64, got {num_k}")
    k = momentum_grid(num_k)
    phases = {}
    for band in Band:
        u = band_eigenvector(angles, k, band, gap_tol)
        phases[band] = wilson_loop_phase(u.as_array())
    total = _wrap(phases[Band.PLUS] + phases[Band.MINUS])
    return ZakResult(phases[Band.PLUS], phases[Band.MINUS], float(total), num_k)


def phi_difference(angles: WalkAngles) -> float:
    """phi(-pi/2) - phi(pi/2), each phase on the single-argument arctangent branch."""
    lo = relative_phase(angles, -np.pi / 2, principal=True)
    hi = relative_phase(angles, np.pi / 2, principal=True)
    return lo - hi


def tangent_ratio(angles: WalkAngles) -> float:
    """tan(theta2) / tan(theta1); printed next to ``phi_difference`` for comparison."""
    return float(np.tan(angles.theta2) / np.tan(angles.theta1))


def winding_number(angles: WalkAngles, num_k: int = 512) -> WindingResult:
    """
    Signed number of turns of (n_x, n_y) as k sweeps the zone once.

    Counterclockwise turns count positive. The sampled curve is closed
    across the zone edge using phi(k + 2 pi) = phi(k).

    Raises
    ------
    PhaseUndefined
        If phi is undefined at a sampled momentum.
    NonQuantized
        If the turn count is further than 0.05 from an integer, or a single
        grid step turns the angle by more than pi/2 (too coarse to resolve).
    """
    if num_k < 64:
        raise ValueError(f"num_k must be >= 64, got {num_k}")
    _, phi = relative_phase_curve(angles, num_k)
    closing = _wrap(phi[0] - phi[-1])
    steps = np.abs(np.diff(np.append(phi, phi[-1] + closing)))
    if steps.max() > np.pi / 2:
        raise NonQuantized(f"phase step {steps.max():.3f} rad exceeds pi/2; increase num_k")
    turns = (phi[-1] + closing - phi[0]) / (2.0 * np.pi)
    w = int(np.round(turns))
    residual = float(abs(turns - w))
    if residual >= RESIDUAL_TOL:
        raise NonQuantized(f"winding {turns:.4f} is not near an integer")
    return WindingResult(w, num_k, residual)


def phase_diagram(theta1_range: tuple[float, float], theta2_range: tuple[float, float],
                  grid: int, num_k: int = 256, gap_tol: float = GAP_TOL) -> PhaseDiagram:
    """
    Winding number on a ``grid`` x ``grid`` lattice of angle pairs (endpoints included).

    Cells where the sampled gap closes, phi is undefined, or the winding is
    not quantized hold ``BOUNDARY``.
    """
    if grid < 1:
        raise ValueError(f"grid must be positive, got {grid}")
    t1 = np.linspace(*theta1_range, grid) if grid > 1 else np.array([theta1_range[0]], float)
    t2 = np.linspace(*theta2_range, grid) if grid > 1 else np.array([theta2_range[0]], float)
    k = momentum_grid(num_k)
    out = np.full((t1.size, t2.size), BOUNDARY, dtype=np.int64)
    for i, a in enumerate(t1):
        for j, b in enumerate(t2):
            angles = WalkAngles(a, b)
            if np.min(np.abs(np.sin(dispersion(angles, k)))) <= gap_tol:
                continue
            try:
                out[i, j] = winding_number(angles, num_k).w
            except (GapClosure, PhaseUndefined, NonQuantized):
                pass
    return PhaseDiagram(t1, t2, out)
