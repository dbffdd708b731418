"""
Momentum-space description of the split-step quantum walk.

The one-step operator at quasimomentum k is ``exp(-i E(k) n(k).sigma)`` with

    cos E = cos k cos t1 cos t2 - sin t1 sin t2
    n     = (sin k sin t1 cos t2,
             cos k sin t1 cos t2 + sin t2 cos t1,
             -sin k cos t2 cos t1) / sin E

All functions accept a scalar k or a NumPy array of momenta and broadcast.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .errors import GapClosure, PhaseUndefined

__all__ = [
    "Band",
    "WalkAngles",
    "BlochVector",
    "BandEigenvector",
    "wrap_angle",
    "wrap_momentum",
    "momentum_grid",
    "dispersion",
    "bloch_numerators",
    "bloch_vector",
    "ratio_form_spinor",
    "normalized_form_spinor",
    "spinor_from_bloch",
    "band_eigenvector",
    "relative_phase",
    "relative_phase_curve",
    "GAP_TOL",
    "PHASE_TOL",
]

GAP_TOL = 1e-9
PHASE_TOL = 1e-12
_CLAMP_TOL = 1e-12


def wrap_angle(theta: ArrayLike) -> NDArray[np.float64] | float:
    """Map an angle onto (-pi, pi]."""
    theta = np.asarray(theta, dtype=float)
    inside = (theta > -np.pi) & (theta <= np.pi)
    out = np.where(inside, theta, np.pi - np.mod(np.pi - theta, 2.0 * np.pi))
    return float(out) if out.ndim == 0 else out


def wrap_momentum(k: ArrayLike) -> NDArray[np.float64] | float:
    """Map a quasimomentum onto the first Brillouin zone [-pi, pi)."""
    k = np.asarray(k, dtype=float)
    inside = (k >= -np.pi) & (k < np.pi)
    out = np.where(inside, k, np.mod(k + np.pi, 2.0 * np.pi) - np.pi)
    return float(out) if out.ndim == 0 else out


def momentum_grid(num_k: int) -> NDArray[np.float64]:
    """Uniform grid of ``num_k`` momenta on [-pi, pi), starting at -pi."""
    return -np.pi + 2.0 * np.pi * np.arange(num_k) / num_k


class Band(enum.IntEnum):
    PLUS = 1
    MINUS = -1


@dataclass(frozen=True)
class WalkAngles:
    """Coin-angle pair (theta1, theta2), canonicalised onto (-pi, pi]."""

    theta1: float
    theta2: float

    def __post_init__(self):
        for name in ("theta1", "theta2"):
            value = float(getattr(self, name))
            if not np.isfinite(value):
                raise ValueError(f"{name} must be finite, got {value!r}")
            object.__setattr__(self, name, wrap_angle(value))


@dataclass(frozen=True)
class BlochVector:
    """Unit vector n(k) and quasi-energy E(k); fields are floats or arrays."""

    nx: NDArray[np.float64] | float
    ny: NDArray[np.float64] | float
    nz: NDArray[np.float64] | float
    energy: NDArray[np.float64] | float

    @property
    def lam(self):
        """Norm of (nx, ny, nz); one up to rounding."""
        return np.sqrt(np.square(self.nx) + np.square(self.ny) + np.square(self.nz))

    def as_array(self) -> NDArray[np.float64]:
        return np.stack(np.broadcast_arrays(self.nx, self.ny, self.nz), axis=-1)


@dataclass(frozen=True)
class BandEigenvector:
    """Gauge-fixed band spinor (c0 real and non-negative)."""

    band: Band
    c0: NDArray[np.complex128] | complex
    c1: NDArray[np.complex128] | complex

    def as_array(self) -> NDArray[np.complex128]:
        return np.stack(np.broadcast_arrays(self.c0, self.c1), axis=-1)


def _cos_energy(angles: WalkAngles, k):
    t1, t2 = angles.theta1, angles.theta2
    return np.cos(k) * np.cos(t1) * np.cos(t2) - np.sin(t1) * np.sin(t2)


def dispersion(angles: WalkAngles, k: ArrayLike):
    """
    Quasi-energy E(k) on the principal arccos branch [0, pi].

    Rounding can push the arccos argument past +-1 by a few ulps; such
    overshoot (up to 1e-12) is clamped.
    """
    c = np.asarray(_cos_energy(angles, np.asarray(k, dtype=float)))
    overshoot = np.max(np.abs(c)) - 1.0 if c.size else 0.0
    assert overshoot <= _CLAMP_TOL, f"cos E out of range by {overshoot:g}"
    energy = np.arccos(np.clip(c, -1.0, 1.0))
    return float(energy) if energy.ndim == 0 else energy


def bloch_numerators(angles: WalkAngles, k: ArrayLike):
    """The three Bloch-vector components multiplied by sin E (never singular)."""
    k = np.asarray(k, dtype=float)
    s1, c1 = np.sin(angles.theta1), np.cos(angles.theta1)
    s2, c2 = np.sin(angles.theta2), np.cos(angles.theta2)
    x = np.sin(k) * s1 * c2
    y = np.cos(k) * s1 * c2 + s2 * c1
    z = -np.sin(k) * c2 * c1
    return x, y, z


def bloch_vector(angles: WalkAngles, k: ArrayLike, gap_tol: float = GAP_TOL) -> BlochVector:
    """
    Unit Bloch vector n(k).

    Raises
    ------
    GapClosure
        If |sin E(k)| <= gap_tol at any requested k.
    """
    k_arr = np.asarray(k, dtype=float)
    energy = np.asarray(dispersion(angles, k_arr))
    x, y, z = np.broadcast_arrays(*bloch_numerators(angles, k_arr))
    # |numerators| = sin E identically; it stays accurate near band touchings
    # where sin(arccos(.)) does not
    sin_e = np.sqrt(x**2 + y**2 + z**2)
    closed = sin_e <= gap_tol
    if np.any(closed):
        idx = np.flatnonzero(closed.ravel())[0]
        raise GapClosure(np.broadcast_to(k_arr, closed.shape).ravel()[idx],
                         np.broadcast_to(energy, closed.shape).ravel()[idx], gap_tol)
    if energy.ndim == 0:
        return BlochVector(float(x / sin_e), float(y / sin_e), float(z / sin_e), float(energy))
    return BlochVector(x / sin_e, y / sin_e, z / sin_e, energy)


def ratio_form_spinor(nx, ny, nz, band: Band):
    """
    Eigenvector of n.sigma as (1, (nx + i ny) / (nz +- lam)), normalised.

    Singular where nz +- lam = 0, i.e. n = (0, 0, -+1).
    """
    sign = int(band)
    nx, ny, nz = (np.asarray(a, dtype=float) for a in (nx, ny, nz))
    lam = np.sqrt(nx**2 + ny**2 + nz**2)
    ratio = (nx + 1j * ny) / (nz + sign * lam)
    norm = np.sqrt(1.0 + np.abs(ratio) ** 2)
    return (1.0 / norm).astype(complex), ratio / norm


def normalized_form_spinor(nx, ny, nz, band: Band):
    """
    Eigenvector of n.sigma as (nx - i ny, +-lam - nz) / sqrt(2 lam^2 -+ 2 nz lam).

    Singular where nz = +-lam, i.e. n = (0, 0, +-1); regular at the poles of
    ``ratio_form_spinor``.
    """
    sign = int(band)
    nx, ny, nz = (np.asarray(a, dtype=float) for a in (nx, ny, nz))
    lam = np.sqrt(nx**2 + ny**2 + nz**2)
    norm = np.sqrt(2.0 * lam**2 - 2.0 * sign * nz * lam)
    return (nx - 1j * ny) / norm, (sign * lam - nz + 0j) / norm


def _fix_gauge(c0, c1):
    c0 = np.asarray(c0, dtype=complex)
    c1 = np.asarray(c1, dtype=complex)
    mag0 = np.abs(c0)
    tiny = mag0 < 1e-300
    ref = np.where(tiny, c1, c0)
    ref_mag = np.abs(ref)
    phase = np.where(ref_mag > 0, np.conj(ref) / np.where(ref_mag > 0, ref_mag, 1.0), 1.0)
    c0 = c0 * phase
    c1 = c1 * phase
    # c0 is real to rounding after the rotation; drop the imaginary residue
    return c0.real + 0j, c1


def spinor_from_bloch(nx, ny, nz, band: Band):
    """
    Gauge-fixed eigenvector of n.sigma for eigenvalue +-|n|.

    The ratio form is used on the hemisphere where its denominator is at
    least |n| and the normalised form elsewhere, so neither is evaluated
    near its pole.
    """
    band = Band(band)
    sign = int(band)
    nx, ny, nz = np.broadcast_arrays(*(np.asarray(a, dtype=float) for a in (nx, ny, nz)))
    use_ratio = sign * nz >= 0
    with np.errstate(divide="ignore", invalid="ignore"):
        r0, r1 = ratio_form_spinor(nx, ny, nz, band)
        f0, f1 = normalized_form_spinor(nx, ny, nz, band)
    c0 = np.where(use_ratio, r0, f0)
    c1 = np.where(use_ratio, r1, f1)
    c0, c1 = _fix_gauge(c0, c1)
    if c0.ndim == 0:
        return complex(c0), complex(c1)
    return c0, c1


def band_eigenvector(angles: WalkAngles, k: ArrayLike, band: Band,
                     gap_tol: float = GAP_TOL) -> BandEigenvector:
    """Gauge-fixed Bloch eigenvector u_+-(k) of the walk Hamiltonian."""
    n = bloch_vector(angles, k, gap_tol)
    c0, c1 = spinor_from_bloch(n.nx, n.ny, n.nz, band)
    return BandEigenvector(Band(band), c0, c1)


def relative_phase(angles: WalkAngles, k: ArrayLike, principal: bool = False):
    """
    Planar angle phi(k) of (n_x, n_y).

    By default the two-argument arctangent is used, giving phi in (-pi, pi].
    With ``principal=True`` the single-argument branch atan(n_y / n_x) in
    (-pi/2, pi/2] is returned instead.

    Raises
    ------
    PhaseUndefined
        When both planar numerators vanish (|.| <= 1e-12).
    """
    k_arr = np.asarray(k, dtype=float)
    x, y, _ = bloch_numerators(angles, k_arr)
    x, y = np.broadcast_arrays(x, y)
    bad = np.hypot(x, y) <= PHASE_TOL
    if np.any(bad):
        raise PhaseUndefined(np.broadcast_to(k_arr, x.shape).ravel()[np.flatnonzero(bad.ravel())[0]])
    phi = np.arctan2(y, x)
    # atan2 returns -pi only for y = -0.0; map onto the half-open range
    phi = np.where(phi <= -np.pi, np.pi, phi)
    if principal:
        phi = phi - np.pi * np.round(phi / np.pi)
        phi = np.where(phi <= -np.pi / 2, phi + np.pi, phi)
    return float(phi) if phi.ndim == 0 else phi


def relative_phase_curve(angles: WalkAngles, num_k: int):
    """
    phi(k) on ``momentum_grid(num_k)``, unwrapped to a continuous curve.

    Returns
    -------
    (k, phi) : tuple of ndarray
        ``phi[0]`` lies on the principal (-pi, pi] branch and consecutive
        samples differ by less than pi.
    """
    if num_k < 16:
        raise ValueError(f"num_k must be >= 16, got {num_k}")
    k = momentum_grid(num_k)
    return k, np.unwrap(relative_phase(angles, k))
