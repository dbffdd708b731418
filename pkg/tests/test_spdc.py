import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwspdc.core import WalkAngles, momentum_grid, relative_phase
from qwspdc.errors import GridDegenerate, InvalidGrid, PhaseUndefined
from qwspdc.spdc import (
    AbsConvention,
    CouplingGrid,
    PhaseSign,
    PumpEnvelope,
    SpdcConfig,
    coupling_grid,
    coupling_nz0,
    coupling_two_sublattice,
    joint_position_map,
    position_axis,
    pump_amplitude,
)

ARM = WalkAngles(0.01, 0.001)


def config(sign=PhaseSign.CORRELATED, arm=ARM, idler=None, **kw):
    return SpdcConfig(arm, idler or arm, sign, **kw)


def period_index(num_k, j):
    """Grid index of -k_j on momentum_grid(num_k)."""
    return (num_k - j) % num_k


class TestPump:
    def test_constant(self):
        assert pump_amplitude(PumpEnvelope.constant(0.3, 0.7), 2.5) == (0.3, 0.7)

    def test_gaussian_value(self):
        e1, e2 = pump_amplitude(PumpEnvelope.gaussian(2.0), 1.0)
        assert e1 == e2 == pytest.approx(math.exp(-1 / 8))

    def test_gaussian_center(self):
        env = PumpEnvelope.gaussian(0.5, center=1.0)
        assert pump_amplitude(env, 1.0) == (1.0, 1.0)

    def test_monotone_in_offset(self):
        k = np.linspace(0, 2 * np.pi, 200)
        e1, _ = pump_amplitude(PumpEnvelope.gaussian(1.3), k)
        assert np.all(np.diff(e1) < 0)
        e1n, _ = pump_amplitude(PumpEnvelope.gaussian(1.3), -k)
        assert e1n == pytest.approx(e1)

    def test_rejects_bad_sigma(self):
        with pytest.raises(ValueError):
            PumpEnvelope.gaussian(0.0)
        with pytest.raises(ValueError):
            PumpEnvelope("gaussian")

    def test_rejects_bad_gamma0(self):
        with pytest.raises(ValueError):
            SpdcConfig(ARM, ARM, gamma0=0.0)


class TestCouplingNz0:
    def test_phases_cancel(self):
        # anticorrelated sign with identical arms at equal momenta: exponent vanishes
        g = coupling_nz0(config(PhaseSign.ANTICORRELATED), PumpEnvelope.constant(), 0.8, 0.8)
        assert g == pytest.approx(2.0, abs=1e-15)

    def test_correlated_intensity(self):
        phi = relative_phase(ARM, 1.2)
        g = coupling_nz0(config(), PumpEnvelope.constant(), 1.2, 1.2)
        assert abs(g) ** 2 == pytest.approx(2 + 2 * math.cos(2 * phi), abs=1e-12)

    def test_abs_and_product_share_magnitude(self, rng):
        ks, ki = rng.uniform(-np.pi, np.pi, (2, 500))
        for sign in PhaseSign:
            a = coupling_nz0(config(sign), PumpEnvelope.constant(), ks, ki)
            b = coupling_nz0(config(sign, abs_convention=AbsConvention.PRODUCT), PumpEnvelope.constant(), ks, ki)
            assert np.abs(a) == pytest.approx(np.abs(b), abs=1e-12)

    def test_undefined_phase(self):
        with pytest.raises(PhaseUndefined):
            coupling_nz0(config(arm=WalkAngles(0.0, 0.0)), PumpEnvelope.constant(), 0.3, 0.3)

    def test_triangle_bound(self, rng):
        ks, ki = rng.uniform(-np.pi, np.pi, (2, 10_000))
        a1, a2 = rng.uniform(-2, 2, 2)
        env = PumpEnvelope.constant(a1, a2)
        g = coupling_nz0(config(gamma0=1.7), env, ks, ki)
        assert np.all(np.abs(g) <= 1.7 * (abs(a1) + abs(a2)) + 1e-12)

    def test_single_sublattice_magnitude(self):
        env = PumpEnvelope.constant(0.8, 0.0)
        g = coupling_nz0(config(gamma0=2.0), env, np.linspace(-3, 3, 11), 0.4)
        assert np.abs(g) == pytest.approx(np.full(11, 1.6), abs=1e-15)

    @settings(max_examples=200)
    @given(st.floats(-math.pi, math.pi), st.floats(-math.pi, math.pi), st.sampled_from(list(PhaseSign)))
    def test_exchange(self, ks, ki, sign):
        cfg, env = config(sign, arm=WalkAngles(0.7, 0.2)), PumpEnvelope.gaussian(1.1)
        assert coupling_nz0(cfg, env, ks, ki) == pytest.approx(coupling_nz0(cfg, env, ki, ks), abs=1e-14)


class TestTwoSublattice:
    def test_matches_product_form_on_flat_nz(self, rng):
        # theta1 = pi/2 puts n_z = 0 everywhere, so both spinors are (1, e^{i phi}) / sqrt 2
        s_arm, i_arm = WalkAngles(math.pi / 2, 0.3), WalkAngles(math.pi / 2, -0.7)
        ks, ki = rng.uniform(-np.pi, np.pi, (2, 200))
        env = PumpEnvelope.gaussian(2.0, 0.6, 1.3)
        for sign in PhaseSign:
            cfg = SpdcConfig(s_arm, i_arm, sign, 1.4, AbsConvention.PRODUCT)
            total = relative_phase(s_arm, ks) + int(sign) * relative_phase(i_arm, ki)
            two = coupling_two_sublattice(cfg, env, ks, ki)
            product = coupling_nz0(cfg, env, ks, ki)
            assert two == pytest.approx(0.5 * np.exp(1j * total) * product, abs=1e-9)

    def test_single_sublattice_magnitude(self):
        arm = WalkAngles(math.pi / 2, 0.3)
        env = PumpEnvelope.constant(0.8, 0.0)
        g = coupling_two_sublattice(SpdcConfig(arm, arm, gamma0=2.0), env, np.linspace(-3, 3, 9), 0.4)
        assert np.abs(g) == pytest.approx(np.full(9, 0.8), abs=1e-12)


class TestGrid:
    def test_shape_and_axis(self):
        g = coupling_grid(config(), PumpEnvelope.constant(), 32)
        assert g.values.shape == (32, 32)
        assert g.k_values[0] == -math.pi
        assert g.invalid_count == 0

    def test_matches_pointwise(self):
        cfg, env = config(PhaseSign.ANTICORRELATED), PumpEnvelope.gaussian(10.0)
        g = coupling_grid(cfg, env, 64)
        i, j = 5, 41
        assert g.values[i, j] == pytest.approx(coupling_nz0(cfg, env, g.k_values[i], g.k_values[j]), abs=1e-15)

    def test_refinement_consistent(self):
        cfg, env = config(), PumpEnvelope.gaussian(10.0)
        coarse = coupling_grid(cfg, env, 256).values
        fine = coupling_grid(cfg, env, 512).values[::2, ::2]
        assert np.max(np.abs(coarse - fine)) < 1e-9

    def test_exchange_symmetric(self):
        for sign in PhaseSign:
            v = coupling_grid(config(sign), PumpEnvelope.gaussian(3.0), 64).values
            assert v == pytest.approx(v.T, abs=1e-14)

    def test_complementarity(self):
        # anticorrelated at (ks, ki) and correlated at (ks, -ki) carry exactly opposite
        # interference terms because phi(-k) = pi - phi(k)
        m = 128
        env = PumpEnvelope.constant(0.9, 0.4)
        anti = coupling_grid(config(PhaseSign.ANTICORRELATED, gamma0=1.3), env, m).values
        corr = coupling_grid(config(PhaseSign.CORRELATED, gamma0=1.3), env, m).values
        flipped = corr[:, [period_index(m, j) for j in range(m)]]
        total = np.abs(anti) ** 2 + np.abs(flipped) ** 2
        assert total == pytest.approx(np.full((m, m), 2 * 1.3**2 * (0.9**2 + 0.4**2)), abs=1e-12)

    def test_wide_gaussian_approaches_constant(self):
        for sign in PhaseSign:
            a = coupling_grid(config(sign), PumpEnvelope.gaussian(500.0), 256).values
            c = coupling_grid(config(sign), PumpEnvelope.constant(), 256).values
            assert np.all(np.abs(a - c) <= 1e-4 * np.abs(c) + 1e-14)

    def test_deviation_shrinks_with_sigma(self):
        c = coupling_grid(config(), PumpEnvelope.constant(), 64).values
        devs = [np.max(np.abs(coupling_grid(config(), PumpEnvelope.gaussian(s), 64).values - c))
                for s in (1.0, 3.0, 10.0, 100.0)]
        assert all(a > b for a, b in zip(devs, devs[1:]))

    def test_degenerate(self):
        with pytest.raises(GridDegenerate):
            coupling_grid(config(arm=WalkAngles(0.0, 0.0)), PumpEnvelope.constant(), 32)

    def test_coarse(self):
        with pytest.raises(ValueError):
            coupling_grid(config(), PumpEnvelope.constant(), 8)


class TestJointPositionMap:
    def grid(self, values):
        m = values.shape[0]
        return CouplingGrid(m, momentum_grid(m), values.astype(complex))

    def test_constant_is_delta_at_origin(self):
        p = joint_position_map(self.grid(np.ones((16, 16))))
        axis = position_axis(16)
        a, b = np.unravel_index(np.argmax(p), p.shape)
        assert (axis[a], axis[b]) == (0, 0)
        assert p[a, b] == pytest.approx(1.0)

    def test_plane_wave_shifts_peak(self):
        k = momentum_grid(32)
        values = np.exp(1j * (k[:, None] - k[None, :]))
        p = joint_position_map(self.grid(values))
        axis = position_axis(32)
        a, b = np.unravel_index(np.argmax(p), p.shape)
        assert (axis[a], axis[b]) == (1, -1)
        assert p[a, b] == pytest.approx(1.0)

    def test_normalized(self):
        p = joint_position_map(coupling_grid(config(), PumpEnvelope.gaussian(10.0), 64))
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(p >= 0)

    def test_axis(self):
        assert position_axis(4).tolist() == [-2, -1, 0, 1]
        assert position_axis(5).tolist() == [-2, -1, 0, 1, 2]

    def test_invalid(self):
        v = np.ones((16, 16), dtype=complex)
        v[3, 4] = np.nan
        with pytest.raises(InvalidGrid):
            joint_position_map(self.grid(v))
        with pytest.raises(InvalidGrid):
            joint_position_map(self.grid(np.zeros((16, 16))))
