import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from logsplit import nonlinear as nl
from logsplit import spectral as sp

RNG = np.random.default_rng(20240818)


def wide_complex(n, rng=RNG, zero_frac=0.02):
    """Magnitudes over the full float range plus exact zeros."""
    mag = 10.0 ** rng.uniform(-300, 3, n)
    mag[rng.random(n) < zero_frac] = 0.0
    return mag * np.exp(1j * rng.uniform(-np.pi, np.pi, n))


CORNERS = np.array([0.0, 1e-300, 1e-15, 1.0, -1.0, 1e3 * 1j], dtype=complex)

complex_values = st.builds(
    lambda m, a: complex(m * np.exp(1j * a)),
    st.one_of(st.just(0.0), st.floats(1e-300, 1e3)),
    st.floats(-np.pi, np.pi),
)


class TestNonlinearity:
    def test_hand_values(self):
        assert nl.log_nonlin(0.0) == 0.0
        assert nl.log_nonlin(-1.0) == 0.0  # ln|z|^2 vanishes on the unit circle
        assert complex(nl.log_nonlin(2.0)) == pytest.approx(2 * np.log(4.0))
        e = np.e
        assert complex(nl.log_nonlin(1j * e)) == pytest.approx(2j * e)

    def test_reg_reduces_at_eps_zero(self):
        z = wide_complex(100)
        np.testing.assert_array_equal(nl.log_nonlin_reg(z, 0.0), nl.log_nonlin(z))

    def test_reg_at_zero_argument(self):
        assert nl.log_nonlin_reg(0.0, 1e-3) == 0.0

    def test_rejects_negative_eps(self):
        with pytest.raises(ValueError):
            nl.log_nonlin_reg(1.0, -0.1)


class TestFlow:
    def test_zero_is_fixed_point(self):
        out = nl.log_flow(np.array([0.0 + 0.0j]), 0.7, -16.0)
        assert out[0] == 0.0

    def test_unit_circle_is_fixed(self):
        z = np.exp(1j * np.linspace(-3, 3, 17))
        np.testing.assert_allclose(nl.log_flow(z, 2.5, -4.0), z, atol=1e-14)

    def test_closed_form_phase(self):
        out = complex(nl.log_flow(np.e + 0j, 0.25, -2.0))
        assert out == pytest.approx(np.e * np.exp(1j * 1.0), rel=1e-14)

    def test_magnitude_preserved(self):
        z = wide_complex(5000)
        out = nl.log_flow(z, 0.9, -16.0)
        np.testing.assert_allclose(np.abs(out), np.abs(z), rtol=1e-13)

    def test_semigroup(self):
        z = np.concatenate([wide_complex(2000), CORNERS])
        two_step = nl.log_flow(nl.log_flow(z, 0.3, -2.0), 0.5, -2.0)
        one_step = nl.log_flow(z, 0.8, -2.0)
        scale = np.maximum(1.0, np.abs(z))
        assert np.max(np.abs(two_step - one_step) / scale) < 1e-12

    def test_inverse(self):
        z = wide_complex(1000)
        back = nl.log_flow(nl.log_flow(z, 0.6, -3.0), -0.6, -3.0)
        np.testing.assert_allclose(back, z, rtol=1e-12, atol=0)

    def test_reg_flow_matches_at_eps_zero(self):
        z = wide_complex(256)
        np.testing.assert_array_equal(nl.log_flow_reg(z, 0.4, -1.0, 0.0), nl.log_flow(z, 0.4, -1.0))

    def test_field_wrapper(self):
        g = sp.TorusGrid.for_modes(4)
        f = sp.PhysicalField(g, np.full(g.nodes_per_dim, 2.0 + 0j))
        out = nl.log_flow(f, 0.1, -1.0)
        assert isinstance(out, sp.PhysicalField)
        # phase is -2 lam t ln|w| = +0.2 ln 2
        np.testing.assert_allclose(out.values, 2.0 * np.exp(0.2j * np.log(2.0)), rtol=1e-14)


class TestUpsilon:
    def test_small_eps_dominated_by_log_eps(self):
        assert nl.upsilon(1e-6, 1.0, 2.0) == pytest.approx(abs(np.log(1e-6)) + 1)

    def test_large_field_dominates(self):
        big = np.exp(30.0) - 1.0
        assert nl.upsilon(0.5, big) == pytest.approx(31.0)

    def test_rejects_nonpositive_eps(self):
        with pytest.raises(ValueError):
            nl.upsilon(0.0)


def _sweep_pairs():
    z1 = np.concatenate([wide_complex(50000), CORNERS, CORNERS])
    z2 = np.concatenate([wide_complex(50000), CORNERS, CORNERS[::-1]])
    return z1, z2


class TestScalarInequalities:
    def test_reg_gap_sweep(self):
        for eps in (1e-8, 1e-3, 0.5):
            rep = nl.reg_gap_check(_sweep_pairs()[0], eps)
            assert rep.holds, rep

    def test_reg_gap_matches_direct_difference(self):
        # the log1p evaluation inside the check agrees with literal
        # subtraction of the two nonlinearities at moderate magnitudes
        z = wide_complex(5000)
        z = z[(np.abs(z) > 1e-6) & (np.abs(z) < 10.0)]
        eps = 1e-3
        direct = np.abs(nl.log_nonlin_reg(z, eps) - nl.log_nonlin(z))
        stable = 2.0 * np.abs(z) * np.log1p(eps / np.abs(z))
        np.testing.assert_allclose(direct, stable, atol=1e-12)

    def test_reg_flow_gap_matches_direct_difference(self):
        z = wide_complex(5000)
        z = z[(np.abs(z) > 1e-6) & (np.abs(z) < 10.0)]
        t, lam, eps = 0.7, -16.0, 1e-4
        direct = np.abs(nl.log_flow_reg(z, t, lam, eps) - nl.log_flow(z, t, lam))
        dphi = 2.0 * lam * t * np.log1p(eps / np.abs(z))
        stable = 2.0 * np.abs(z) * np.abs(np.sin(0.5 * dphi))
        np.testing.assert_allclose(direct, stable, atol=1e-12)

    def test_reg_pair_lipschitz_sweep(self):
        z1, z2 = _sweep_pairs()
        rep = nl.reg_pair_lipschitz_check(z1, z2, 1e-3)
        assert rep.holds, rep

    def test_pair_lipschitz_sweep(self):
        z1, z2 = _sweep_pairs()
        for eps in (1e-6, 1e-2):
            rep = nl.pair_lipschitz_check(z1, z2, eps)
            assert rep.holds, rep

    def test_imag_monotonicity_sweep(self):
        z1, z2 = _sweep_pairs()
        rep = nl.imag_monotonicity_check(z1, z2)
        assert rep.holds, rep

    def test_flow_pointwise_lipschitz_sweep(self):
        z1, z2 = _sweep_pairs()
        for t, lam in ((0.1, -1.0), (0.9, -16.0), (0.0, -5.0)):
            rep = nl.flow_pointwise_lipschitz_check(z1, z2, t, lam)
            assert rep.holds, rep

    def test_reg_flow_gap_sweep(self):
        w = _sweep_pairs()[0]
        rep = nl.reg_flow_gap_check(w, 0.7, -16.0, 1e-4)
        assert rep.holds, rep

    @settings(max_examples=300, deadline=None)
    @given(complex_values, complex_values)
    def test_imag_monotonicity_property(self, z1, z2):
        assert nl.imag_monotonicity_check(z1, z2).holds

    @settings(max_examples=300, deadline=None)
    @given(complex_values, complex_values)
    def test_reg_pair_lipschitz_property(self, z1, z2):
        assert nl.reg_pair_lipschitz_check(z1, z2, 1e-3).holds

    @settings(max_examples=300, deadline=None)
    @given(complex_values, complex_values, st.floats(0.0, 2.0))
    def test_flow_lipschitz_property(self, z1, z2, t):
        assert nl.flow_pointwise_lipschitz_check(z1, z2, t, -16.0).holds

    def test_injected_violation_is_caught(self):
        z1, z2 = _sweep_pairs()
        rep = nl.imag_monotonicity_check(z1, z2, bound_scale=0.1)
        assert not rep.holds
        assert rep.margin < 0
        assert len(rep.witness) == 2


def _smooth_pair(n_modes=33, decay=2, seed=5):
    rng = np.random.default_rng(seed)
    k = np.arange(-n_modes, n_modes + 1)
    g = sp.TorusGrid.for_modes(n_modes, oversample=8)
    c = (rng.standard_normal(2 * n_modes + 1) + 1j * rng.standard_normal(2 * n_modes + 1)) / (1.0 + k**2) ** (decay / 2)
    d = c + 0.01 * (rng.standard_normal(2 * n_modes + 1) + 1j * rng.standard_normal(2 * n_modes + 1)) / (1.0 + k**2) ** (decay / 2)
    return sp.synthesize(sp.SpectralField(g, c)), sp.synthesize(sp.SpectralField(g, d))


class TestFieldInequalities:
    def test_flow_l2_lipschitz(self):
        u, v = _smooth_pair()
        for t, lam in ((0.25, -4.0), (1.0, -16.0)):
            rep = nl.flow_l2_lipschitz_check(u, v, t, lam)
            assert rep.holds, rep

    def test_reg_flow_gradient(self):
        u, _ = _smooth_pair()
        rep = nl.reg_flow_gradient_check(u, 0.1, -16.0, 1e-3)
        assert rep.holds, rep
        with pytest.raises(ValueError):
            nl.reg_flow_gradient_check(u, 0.1, -16.0, 0.0)

    def test_upsilon_l2(self):
        u, v = _smooth_pair()
        rep = nl.upsilon_l2_check(u, v, 1e-3)
        assert rep.holds, rep

    def test_field_injection(self):
        u, v = _smooth_pair()
        rep = nl.flow_l2_lipschitz_check(u, v, 1.0, -16.0, bound_scale=1e-3)
        assert not rep.holds
