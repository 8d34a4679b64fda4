import math

import numpy as np
import pytest

from freqlock import series
from freqlock.errors import InvalidParams, StepUnderflow
from freqlock.interp import fourier_coefficients, spectral_derivative
from freqlock.lienard import (LimitCycleSettings, State, SystemParams,
                              find_limit_cycle, integrate_rk4, rhs_perturbed,
                              rhs_unperturbed, taylor_step, _march_period)

T0_REF = 3.698939867513906
U0_REF = 0.979106186033891


class TestParams:
    def test_design_area_enforced(self):
        with pytest.raises(InvalidParams):
            SystemParams(4.0, 5.0)
        with pytest.raises(InvalidParams):
            SystemParams(2.0, 0.5)

    def test_message_names_the_condition(self):
        with pytest.raises(InvalidParams, match="alpha > beta > 1"):
            SystemParams(4.0, 5.0)


class TestRhs:
    def test_origin_is_fixed_point(self):
        p = SystemParams(5.0, 4.0)
        assert rhs_unperturbed(p, State(0.0, 0.0)) == (0.0, 0.0)

    def test_unit_displacement(self):
        p = SystemParams(5.0, 4.0)
        du, dv = rhs_unperturbed(p, State(1.0, 0.0))
        assert (du, dv) == (0.0, -5.0)

    def test_unit_velocity(self):
        p = SystemParams(5.0, 4.0)
        du, dv = rhs_unperturbed(p, State(0.0, 1.0))
        assert (du, dv) == (1.0, 3.0)

    def test_perturbed_reduces_at_mu_zero(self, harmonic):
        w = 2.7
        p = SystemParams(5.0, 4.0, mu=0.0, omega=w)
        st = State(0.3, -0.4, 1.1)
        du, dv = rhs_perturbed(p, harmonic, st)
        du0, dv0 = rhs_unperturbed(p, st)
        assert du == st.v
        assert dv == pytest.approx(-st.v * p.h(st.u) / w - p.k(st.u) / w**2, rel=1e-15)

    def test_drive_vanishes_at_unit_u_zero_v(self, harmonic):
        w = 2.0
        p0 = SystemParams(5.0, 4.0, mu=0.0, omega=w)
        p1 = SystemParams(5.0, 4.0, mu=0.3, omega=w)
        for u in (1.0, -1.0):
            st = State(u, 0.0, 0.77)
            assert rhs_perturbed(p1, harmonic, st) == rhs_perturbed(p0, harmonic, st)

    def test_perturbed_spot_value(self, harmonic):
        # independent evaluation of the rescaled field at one state
        alpha, beta, w, mu, tau0 = 5.0, 4.0, 3.4, 0.1, 0.2
        u, v, tau = 0.5, -0.3, 1.3
        p = SystemParams(alpha, beta, mu=mu, omega=w, tau0=tau0)
        f = math.sin(tau + tau0)
        fp = math.cos(tau + tau0)
        h = 1 - beta + 3 * beta * u * u
        k = u * (alpha - beta + beta * u * u)
        psi = (w * v * (3 * u * u - 1) * f + u * (u * u - 1) * (f + w * fp)) / w**2
        expect = -v * h / w - k / w**2 - mu * psi
        assert rhs_perturbed(p, harmonic, State(u, v, tau))[1] == pytest.approx(
            expect, rel=1e-14)


class TestRK4:
    @staticmethod
    def _sho(state):
        return state.v, -state.u

    def test_harmonic_oscillator_round_trip(self):
        out = integrate_rk4(self._sho, State(1.0, 0.0), 1e-3,
                            int(round(2 * math.pi / 1e-3)))
        # step does not divide 2 pi exactly; compare against the exact flow
        t = int(round(2 * math.pi / 1e-3)) * 1e-3
        assert out.u == pytest.approx(math.cos(t), abs=1e-10)
        assert out.v == pytest.approx(-math.sin(t), abs=1e-10)

    def test_zero_steps_identity(self):
        st = State(0.3, 0.7, 0.1)
        out = integrate_rk4(self._sho, st, 0.1, 0)
        assert (out.u, out.v, out.tau) == (0.3, 0.7, 0.1)

    def test_fourth_order_convergence(self):
        T = 1.0
        errs = []
        for h in (1e-2, 5e-3):
            out = integrate_rk4(self._sho, State(1.0, 0.0), h, int(round(T / h)))
            errs.append(abs(out.u - math.cos(T)))
        order = math.log2(errs[0] / errs[1])
        assert 3.8 <= order <= 4.2


class TestTaylorStep:
    def test_leading_coefficients_at_anchor(self, cycle):
        p = SystemParams(5.0, 4.0)
        u_poly, v_poly, h = taylor_step(p, State(cycle.U0, 0.0), 30, radius=0.05)
        r1 = -cycle.U0 * (5.0 - 4.0 + 4.0 * cycle.U0**2)
        assert u_poly[1] == 0.0
        assert u_poly[2] == pytest.approx(r1 / 2.0, rel=1e-14)
        assert h > 1e-4

    def test_agrees_with_rk4(self, cycle):
        p = SystemParams(5.0, 4.0)
        u_poly, v_poly, h = taylor_step(p, State(cycle.U0, 0.0), 30, radius=0.05)
        rk = integrate_rk4(lambda s: rhs_unperturbed(p, s), State(cycle.U0, 0.0),
                           1e-5, int(round(h / 1e-5)))
        t = int(round(h / 1e-5)) * 1e-5
        assert series.evaluate(u_poly, t) == pytest.approx(rk.u, abs=1e-11)

    def test_underflow_on_absurd_radius_demand(self):
        p = SystemParams(5.0, 4.0)
        huge = State(1e6, 0.0)
        with pytest.raises(StepUnderflow):
            taylor_step(p, huge, 6, radius=1e-11)

    def test_series_at_zero_crossing(self):
        # through (0, c) the curvature is -c h(0) = -c (1 - beta)
        c = 1.37
        sym = series.lienard_series(5.0, 4.0, 0.0, c, 8)
        assert sym[2] == pytest.approx(-c * (1.0 - 4.0) / 2.0, rel=1e-14)
        assert sym[0] == 0.0 and sym[1] == c


class TestLimitCycle:
    def test_golden_period_and_amplitude(self, cycle):
        assert cycle.T0 == pytest.approx(T0_REF, abs=1e-11)
        assert cycle.U0 == pytest.approx(U0_REF, abs=1e-11)

    def test_golden_frequency(self, cycle):
        assert cycle.Omega0 == pytest.approx(1.69864489, abs=1e-7)

    def test_antisymmetry_half_period(self, cycle):
        # u0(t + T0/2) = -u0(t) on the sample grid via the interpolant
        from freqlock.interp import interpolate
        t = cycle.u_samples.nodes
        shifted = interpolate(cycle.u_samples, t + cycle.T0 / 2.0)
        assert np.max(np.abs(shifted + cycle.u)) < 1e-10

    def test_only_odd_harmonics(self, cycle):
        c = fourier_coefficients(cycle.u_samples)
        even = np.abs(c[2::2])
        assert np.max(even) < 1e-10
        assert abs(c[0]) < 1e-10

    def test_ode_residual_via_spectral_derivatives(self, cycle):
        p = SystemParams(5.0, 4.0)
        du = spectral_derivative(cycle.u_samples)
        ddu = spectral_derivative(cycle.u_samples, order=2)
        res = ddu.values + du.values * p.h(cycle.u) + p.k(cycle.u)
        assert np.max(np.abs(res)) < 1e-8
        assert np.max(np.abs(du.values - cycle.v)) < 1e-10

    def test_anchor_conditions(self, cycle):
        assert cycle.v[0] == 0.0
        assert cycle.u[0] == cycle.U0 > 0

    def test_idempotent(self, cycle):
        p = SystemParams(5.0, 4.0)
        T0, nxt, _ = _march_period(p, State(cycle.U0, 0.0, 0.0),
                                   LimitCycleSettings())
        assert abs(T0 - cycle.T0) < 1e-12
        assert abs(nxt.u - cycle.U0) < 1e-12

    def test_closure_error_small(self, cycle):
        assert cycle.closure_error < 1e-12

    def test_series_pieces_cover_period(self, cycle):
        assert len(cycle.series_pieces) == cycle.K
        assert cycle.series_pieces[0][0] == 0.0
