"""Coordinate map construction and the two shear-frame Laplacians."""

import numpy as np
import pytest
from numpy.testing import assert_allclose
from scipy.optimize import brentq

from inviscid_damping_lab import elliptic
from inviscid_damping_lab.sim import new_state
from inviscid_damping_lab.spectral import (
    DomainSpec,
    SpectralField,
    l2_norm,
    project_nonzero_x,
    sobolev_norm,
)
from conftest import random_field, single_mode


def fluct_field(domain, seed=1, decay=0.5):
    """Smooth random data without x-average content and with zero mean."""
    f = project_nonzero_x(random_field(domain, seed=seed))
    return SpectralField(domain, f.coeffs * np.exp(-decay * domain.mode_magnitude))


def cos_coords(domain, t, amp, with_vpp=True):
    """Synthetic coordinates with v' = 1 + amp cos(eta0 v)."""
    v = domain.y_nodes
    vp = 1.0 + amp * np.cos(domain.eta0 * v)
    vpp = -amp * domain.eta0 * np.sin(domain.eta0 * v) * vp if with_vpp else np.zeros_like(v)
    return elliptic.CoordFields(
        domain=domain, t=t, v_of_y=v, vprime=vp, vdoubleprime=vpp, monotone_flag=True
    )


class TestBuildCoords:
    def planted_state(self, domain, c0, t):
        st = new_state(fluct_field(domain))
        st.t = t
        phi = np.zeros(domain.N_y, dtype=complex)
        phi[1] = t * c0 / 2j
        phi[-1] = -t * c0 / 2j  # spectrum of c0 * sin(eta0 y), scaled by t
        st.phi_accum = phi
        return st

    def test_zero_phi_identity(self, small_domain):
        st = new_state(fluct_field(small_domain))
        st.t = 2.0
        coords = elliptic.build_coords(st)
        assert_allclose(coords.v_of_y, small_domain.y_nodes, atol=0)
        assert_allclose(coords.vprime, 1.0, atol=1e-14)
        assert_allclose(coords.vdoubleprime, 0.0, atol=1e-14)
        assert coords.monotone_flag

    def test_planted_sine_map(self):
        d = DomainSpec(L_y=np.pi, N_x=8, N_y=128)
        c0 = 0.01
        st = self.planted_state(d, c0, t=2.0)
        coords = elliptic.build_coords(st)
        assert np.max(np.abs(coords.vprime - 1.0)) == pytest.approx(
            c0 * d.eta0, rel=1e-4
        )
        # compare against the exact v'(v) through numerical inversion of v(y)
        for j in range(0, d.N_y, 16):
            vj = d.y_nodes[j]
            yj = brentq(lambda y: y + c0 * np.sin(d.eta0 * y) - vj, vj - 0.1, vj + 0.1)
            exact = 1.0 + c0 * d.eta0 * np.cos(d.eta0 * yj)
            assert coords.vprime[j] == pytest.approx(exact, abs=1e-6)

    def test_monotonicity_failure_detected(self):
        d = DomainSpec(L_y=np.pi, N_x=8, N_y=128)
        st = self.planted_state(d, 1.5 / d.eta0, t=2.0)  # slope crosses zero
        with pytest.raises(elliptic.MonotonicityError, match="not strictly increasing"):
            elliptic.build_coords(st)

    def test_requires_positive_time(self, small_domain):
        st = new_state(fluct_field(small_domain))
        with pytest.raises(ValueError, match="t > 0"):
            elliptic.build_coords(st)


class TestSolvabilityMargin:
    def test_zero_data_margin_one(self, small_domain):
        st = new_state(
            SpectralField(small_domain, np.zeros((16, 32), dtype=complex))
        )
        assert elliptic.solvability_margin(st) == pytest.approx(1.0)

    def test_steady_amplitude(self, small_domain):
        # x-averaged amplitude a held for time t gives margin 1 - a
        d = small_domain
        c = np.zeros((16, 32), dtype=complex)
        st = new_state(SpectralField(d, c))
        a = 0.25
        profile = a * np.cos(d.eta0 * d.y_nodes)
        from inviscid_damping_lab.spectral import profile_to_spectral

        st.t = 4.0
        st.favg_accum = 4.0 * profile_to_spectral(d, profile)
        assert elliptic.solvability_margin(st) == pytest.approx(1.0 - a, abs=1e-12)


class TestDeltaL:
    def test_t_zero_is_laplacian(self, small_domain):
        f = single_mode(small_domain, 1, 2)
        out = elliptic.apply_delta_L(f, 0.0)
        assert out.coeffs[1, 2] == pytest.approx(-(1 + (2 * small_domain.eta0) ** 2))

    def test_critical_time_symbol(self, small_domain):
        f = single_mode(small_domain, 1, 3)
        out = elliptic.apply_delta_L(f, 3.0)
        assert out.coeffs[1, 3] == pytest.approx(-1.0)

    def test_invert_examples(self, small_domain):
        f = single_mode(small_domain, 1, 0)
        assert elliptic.invert_delta_L(f, 0.0).coeffs[1, 0] == pytest.approx(-1.0)
        f = single_mode(small_domain, 1, 3)
        assert elliptic.invert_delta_L(f, 3.0).coeffs[1, 3] == pytest.approx(-1.0)

    @pytest.mark.parametrize("t", [0.0, 1.0, 2.0, 3.0, 7.5])
    def test_mutual_inverse(self, small_domain, t):
        f = random_field(small_domain, seed=17)
        c = f.coeffs.copy()
        c[0, 0] = 0.0
        f = SpectralField(small_domain, c)
        back = elliptic.apply_delta_L(elliptic.invert_delta_L(f, t), t)
        assert np.max(np.abs(back.coeffs - f.coeffs)) < 1e-12 * np.max(np.abs(f.coeffs))


class TestDeltaT:
    def test_identity_coords_exact(self, small_domain):
        f = random_field(small_domain, seed=18, band_limited=False)
        coords = elliptic.identity_coords(small_domain, 2.5)
        a = elliptic.apply_delta_t(f, coords, 2.5)
        b = elliptic.apply_delta_L(f, 2.5)
        assert np.array_equal(a.coeffs, b.coeffs)

    def test_zero_phi_zero_output(self, small_domain):
        f = SpectralField(small_domain, np.zeros((16, 32), dtype=complex))
        coords = cos_coords(small_domain, 1.0, 0.05)
        assert np.max(np.abs(elliptic.apply_delta_t(f, coords, 1.0).coeffs)) == 0.0

    def test_hand_expanded_three_terms(self):
        """Single mode against the symbolically expanded coefficient products."""
        d = DomainSpec(L_y=np.pi, N_x=16, N_y=32)
        k0, n0 = 2, 3
        phi = single_mode(d, k0, n0)
        t = 1.5
        delta = 0.04
        coords = cos_coords(d, t, delta, with_vpp=False)
        out = elliptic.apply_delta_t(phi, coords, t)

        # (v')^2 - 1 = 2 delta cos(eta0 v) + delta^2 cos^2(eta0 v) shifts eta
        # by 0, +-eta0, +-2 eta0 with the stated weights
        a_shift = {
            0: delta ** 2 / 2.0,
            1: delta,
            -1: delta,
            2: delta ** 2 / 4.0,
            -2: delta ** 2 / 4.0,
        }
        expected = np.zeros((16, 32), dtype=complex)
        for kk, nn in ((k0, n0), (-k0, -n0)):
            eta_m = d.eta0 * nn
            s2 = (1j * (eta_m - t * kk)) ** 2
            expected[kk % 16, nn % 32] += -(kk ** 2) + s2
            for dn, w in a_shift.items():
                expected[kk % 16, (nn + dn) % 32] += w * s2
        assert_allclose(out.coeffs, expected, rtol=0, atol=1e-12)


class TestInvertDeltaT:
    def test_identity_coords_one_iteration(self, small_domain):
        f = fluct_field(small_domain, seed=19)
        coords = elliptic.identity_coords(small_domain, 2.0)
        result = elliptic.invert_delta_t(f, coords, 2.0, tol=1e-12)
        assert result.iterations == 1
        expected = elliptic.invert_delta_L(f, 2.0)
        assert_allclose(result.phi.coeffs, expected.coeffs, atol=1e-15)

    def test_perturbative_convergence(self, small_domain):
        f = fluct_field(small_domain, seed=20)
        coords = cos_coords(small_domain, 2.0, 0.01)
        result = elliptic.invert_delta_t(f, coords, 2.0, tol=1e-10, max_iter=20)
        assert result.iterations <= 20
        assert result.residuals[-1] < 1e-10
        assert all(b < a for a, b in zip(result.residuals, result.residuals[1:]))

    def test_residual_oracle(self, small_domain):
        f = fluct_field(small_domain, seed=21)
        coords = cos_coords(small_domain, 3.0, 0.03)
        result = elliptic.invert_delta_t(f, coords, 3.0, tol=1e-10)
        res = elliptic.apply_delta_t(result.phi, coords, 3.0)
        rel = l2_norm(SpectralField(small_domain, res.coeffs - f.coeffs)) / l2_norm(f)
        assert rel <= 1e-10

    def test_guard_refusal(self, small_domain):
        f = fluct_field(small_domain, seed=22)
        coords = cos_coords(small_domain, 2.0, 0.6, with_vpp=False)
        with pytest.raises(elliptic.ContractionGuardError, match="refused"):
            elliptic.invert_delta_t(f, coords, 2.0)

    def test_x_average_content_rejected(self, small_domain):
        f = random_field(small_domain, seed=23)
        c = f.coeffs.copy()
        c[0, 0] = 0.0
        coords = cos_coords(small_domain, 2.0, 0.01)
        with pytest.raises(ValueError, match="x-average"):
            elliptic.invert_delta_t(SpectralField(small_domain, c), coords, 2.0)

    def test_lossy_estimate_boundedness(self):
        """(1+t^2) ||P_{!=0} phi||_{H^2} stays bounded for near-identity coords."""
        d = DomainSpec(L_y=np.pi, N_x=16, N_y=64)
        f = fluct_field(d, seed=24, decay=0.8)
        worst = 0.0
        for t in np.linspace(0.0, 20.0, 21):
            coords = cos_coords(d, float(t), 0.02)
            phi = elliptic.invert_delta_t(f, coords, float(t), tol=1e-9).phi
            worst = max(worst, (1 + t * t) * sobolev_norm(phi, 2.0))
        assert worst <= 4.0 * sobolev_norm(f, 4.0)
