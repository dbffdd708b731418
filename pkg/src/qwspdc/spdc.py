"""
SPDC coupling amplitude Gamma(k_s, k_i) for a pump driving two sublattices,
with signal and idler phase matching set by the walk's band structure.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .core import (
    Band,
    PHASE_TOL,
    WalkAngles,
    band_eigenvector,
    bloch_numerators,
    momentum_grid,
    relative_phase,
)
from .errors import GridDegenerate, InvalidGrid

__all__ = [
    "PumpKind",
    "PhaseSign",
    "AbsConvention",
    "PumpEnvelope",
    "SpdcConfig",
    "CouplingGrid",
    "pump_amplitude",
    "coupling_nz0",
    "coupling_two_sublattice",
    "coupling_grid",
    "joint_position_map",
    "position_axis",
    "MAX_INVALID_FRACTION",
]

MAX_INVALID_FRACTION = 0.01


class PumpKind(str, enum.Enum):
    CONSTANT = "constant"
    GAUSSIAN = "gaussian"


class PhaseSign(enum.IntEnum):
    CORRELATED = 1
    ANTICORRELATED = -1


class AbsConvention(str, enum.Enum):
    ABS_SUM = "abs-sum"
    PRODUCT = "product"


@dataclass(frozen=True)
class PumpEnvelope:
    """
    Pump amplitudes on the two sublattices.

    For a Gaussian pump both amplitudes are multiplied by
    exp(-(k_total - center)^2 / (2 sigma^2)), with sigma in radians of total
    transverse momentum.
    """

    kind: PumpKind = PumpKind.CONSTANT
    amplitude1: float = 1.0
    amplitude2: float = 1.0
    sigma: float | None = None
    center: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "kind", PumpKind(self.kind))
        if not (np.isfinite(self.amplitude1) and np.isfinite(self.amplitude2)):
            raise ValueError("pump amplitudes must be finite")
        if self.kind is PumpKind.GAUSSIAN and not (self.sigma is not None and self.sigma > 0):
            raise ValueError(f"Gaussian pump needs sigma > 0, got {self.sigma!r}")

    @classmethod
    def constant(cls, amplitude1=1.0, amplitude2=1.0):
        return cls(PumpKind.CONSTANT, amplitude1, amplitude2)

    @classmethod
    def gaussian(cls, sigma, amplitude1=1.0, amplitude2=1.0, center=0.0):
        return cls(PumpKind.GAUSSIAN, amplitude1, amplitude2, sigma, center)


@dataclass(frozen=True)
class SpdcConfig:
    signal_angles: WalkAngles
    idler_angles: WalkAngles
    phase_sign: PhaseSign = PhaseSign.CORRELATED
    gamma0: float = 1.0
    abs_convention: AbsConvention = AbsConvention.ABS_SUM

    def __post_init__(self):
        object.__setattr__(self, "phase_sign", PhaseSign(self.phase_sign))
        object.__setattr__(self, "abs_convention", AbsConvention(self.abs_convention))
        if not self.gamma0 > 0:
            raise ValueError(f"gamma0 must be positive, got {self.gamma0!r}")


@dataclass(frozen=True)
class CouplingGrid:
    """``values[i, j]`` is Gamma(k_values[i], k_values[j]); NaN marks invalid cells."""

    num_k: int
    k_values: NDArray[np.float64]
    values: NDArray[np.complex128]

    @property
    def invalid(self) -> NDArray[np.bool_]:
        return np.isnan(self.values)

    @property
    def invalid_count(self) -> int:
        return int(self.invalid.sum())

    def intensity(self) -> NDArray[np.float64]:
        """|Gamma|^2, NaN on invalid cells."""
        return np.abs(self.values) ** 2


def pump_amplitude(env: PumpEnvelope, k_total: ArrayLike):
    """Sublattice pump amplitudes (e1, e2) at total momentum ``k_total``."""
    k_total = np.asarray(k_total, dtype=float)
    if env.kind is PumpKind.CONSTANT:
        g = np.ones_like(k_total)
    else:
        g = np.exp(-((k_total - env.center) ** 2) / (2.0 * env.sigma**2))
    e1, e2 = env.amplitude1 * g, env.amplitude2 * g
    if g.ndim == 0:
        return float(e1), float(e2)
    return e1, e2


def _gamma_from_phases(cfg, env, ks, ki, phi_s, phi_i):
    e1, e2 = pump_amplitude(env, np.add(ks, ki))
    total = phi_s + int(cfg.phase_sign) * phi_i
    if cfg.abs_convention is AbsConvention.ABS_SUM:
        total = np.abs(total)
    return cfg.gamma0 * (e1 * np.exp(-1j * total) + e2)


def coupling_nz0(cfg: SpdcConfig, env: PumpEnvelope, ks: ArrayLike, ki: ArrayLike):
    """
    Gamma = gamma0 (e1 exp(-i |phi_s + s phi_i|) + e2), s = +-1 from ``cfg.phase_sign``.

    The ``PRODUCT`` convention drops the absolute value in the exponent.
    Raises PhaseUndefined if phi is undefined at ks or ki.
    """
    phi_s = relative_phase(cfg.signal_angles, ks)
    phi_i = relative_phase(cfg.idler_angles, ki)
    out = _gamma_from_phases(cfg, env, np.asarray(ks, float), np.asarray(ki, float), phi_s, phi_i)
    return complex(out) if np.ndim(out) == 0 else out


def coupling_two_sublattice(cfg: SpdcConfig, env: PumpEnvelope, ks: ArrayLike, ki: ArrayLike,
                            band_s: Band = Band.PLUS, band_i: Band = Band.PLUS):
    """
    Gamma = gamma0 sum_j e_j(ks + ki) u_s,j(ks) u_i,j(ki) with gauge-fixed band spinors.

    For the anticorrelated sign the idler spinor is complex-conjugated,
    which reverses its relative phase. Raises GapClosure if either arm is
    gapless at the requested momentum.
    """
    us = band_eigenvector(cfg.signal_angles, ks, band_s)
    ui = band_eigenvector(cfg.idler_angles, ki, band_i)
    ui0, ui1 = ui.c0, ui.c1
    if cfg.phase_sign is PhaseSign.ANTICORRELATED:
        ui0, ui1 = np.conj(ui0), np.conj(ui1)
    e1, e2 = pump_amplitude(env, np.add(ks, ki))
    out = cfg.gamma0 * (e1 * us.c0 * ui0 + e2 * us.c1 * ui1)
    return complex(out) if np.ndim(out) == 0 else out


def _masked_phase(angles, k):
    x, y, _ = bloch_numerators(angles, k)
    phi = np.arctan2(y, x)
    return np.where(np.hypot(x, y) <= PHASE_TOL, np.nan, phi)


def coupling_grid(cfg: SpdcConfig, env: PumpEnvelope, num_k: int,
                  max_invalid_fraction: float = MAX_INVALID_FRACTION) -> CouplingGrid:
    """
    ``coupling_nz0`` on the M x M grid of ``momentum_grid(num_k)``.

    Cells where the phase is undefined hold NaN. Raises GridDegenerate when
    more than ``max_invalid_fraction`` of the cells are invalid.
    """
    if num_k < 16:
        raise ValueError(f"num_k must be >= 16, got {num_k}")
    k = momentum_grid(num_k)
    phi_s = _masked_phase(cfg.signal_angles, k)[:, None]
    phi_i = _masked_phase(cfg.idler_angles, k)[None, :]
    values = _gamma_from_phases(cfg, env, k[:, None], k[None, :], phi_s, phi_i)
    grid = CouplingGrid(num_k, k, values)
    frac = grid.invalid_count / values.size
    if frac > max_invalid_fraction:
        raise GridDegenerate(
            f"{grid.invalid_count} of {values.size} cells invalid ({frac:.2%} > {max_invalid_fraction:.0%})"
        )
    return grid


def position_axis(num_k: int) -> NDArray[np.int64]:
    """Lattice-site labels of the rows/columns of ``joint_position_map``."""
    return np.arange(-(num_k // 2), num_k - num_k // 2)


def joint_position_map(grid: CouplingGrid) -> NDArray[np.float64]:
    """
    Joint signal/idler site probabilities from the 2D DFT of Gamma.

    Entry [a, b] is the probability of the pair at sites
    (position_axis[a], position_axis[b]); the map sums to one.
    """
    if grid.invalid_count:
        raise InvalidGrid(f"grid has {grid.invalid_count} invalid cells")
    # sum_k Gamma(k) exp(-i k x); the -pi grid offset only changes phases
    amp = np.fft.fftshift(np.fft.fft2(grid.values))
    prob = np.abs(amp) ** 2
    total = prob.sum()
    if total == 0:
        raise InvalidGrid("grid is identically zero")
    return prob / total
