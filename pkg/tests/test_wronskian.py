import math

import numpy as np
import pytest

from freqlock import series
from freqlock import wronskian as wr
from freqlock.errors import SingularitySpacing
from freqlock.interp import interpolate, spectral_derivative
from freqlock.lienard import LimitCycleSettings, SystemParams, find_limit_cycle

F0_REF = 0.757499334158
GAMMA_REF = -54.855909271256
A_ROMBERG_REF = 16.0813516305191
A_CLOSED_REF = 16.0813516307791


class TestF:
    def test_f0_golden(self, wdata):
        assert wdata.f0 == pytest.approx(F0_REF, abs=1e-9)

    def test_f0_positive(self, wdata):
        assert wdata.f0 > 0

    def test_F_tilde_vanishes_at_ends(self, cycle, wdata):
        ft = wdata.F_tilde
        assert ft.values[0] == pytest.approx(0.0, abs=1e-12)
        assert interpolate(ft, cycle.T0) == pytest.approx(0.0, abs=1e-10)

    def test_F_growth_rate(self, cycle, wdata):
        _, _, F = wr.compute_F(cycle, wdata.sigma)
        T0 = cycle.T0
        assert (F(2 * T0) - F(T0)) == pytest.approx(
            wdata.floquet_mean * T0, rel=1e-12)


class TestSeries:
    def test_leading_structure(self, cycle):
        w = wr.w11_series(5.0, 4.0, cycle.U0, 10)
        assert w[0] == pytest.approx(1.0, rel=1e-13)
        assert abs(w[1]) < 1e-13

    def test_R2_closed_form(self, cycle):
        # the curvature is -k'(U0)/2; the sign follows from the variational
        # equation at the anchor (w'' = -k'(U0) there)
        w = wr.w11_series(5.0, 4.0, cycle.U0, 10)
        kp = 5.0 - 4.0 + 3.0 * 4.0 * cycle.U0**2
        assert w[2] == pytest.approx(-kp / 2.0, rel=1e-12)

    def test_R3_closed_form(self, cycle):
        w = wr.w11_series(5.0, 4.0, cycle.U0, 10)
        a, b, U2 = 5.0, 4.0, cycle.U0**2
        six_r3 = (a - b * (1 + a - b) + 3 * b * (1 + 3 * a - 4 * b) * U2
                  + 15 * b * b * U2 * U2)
        assert w[3] == pytest.approx(six_r3 / 6.0, rel=1e-11)

    def test_matches_variational_recurrence(self, cycle):
        w = wr.w11_series(5.0, 4.0, cycle.U0, 10)
        u = series.lienard_series(5.0, 4.0, cycle.U0, 0.0, 14)
        w_ref = series.variational_series(5.0, 4.0, u, 1.0, 0.0, 10)
        assert np.max(np.abs(w - w_ref) / np.maximum(np.abs(w_ref), 1.0)) < 1e-11


class TestGrid:
    def test_initial_conditions(self, cycle, wdata):
        assert wdata.w11[0] == 1.0
        # w'(0) = 0: the step away from 1 starts at quadratic order
        h = wdata.cycle.T0 / wdata.cycle.K
        w_ser = wr.w11_series(5.0, 4.0, cycle.U0, 10)
        assert wdata.w11[1] == pytest.approx(series.evaluate(w_ser, h), abs=1e-12)
        kp = 5.0 - 4.0 + 12.0 * wdata.cycle.U0**2
        assert wdata.w11[1] == pytest.approx(1.0 - kp * h * h / 2.0, abs=1e-3)

    def test_matches_taylor_oracle(self, cycle, wdata):
        # independent marching of the variational equation
        K, T0 = cycle.K, cycle.T0
        dt = T0 / K
        w, dw, u, v = 1.0, 0.0, cycle.U0, 0.0
        worst = 0.0
        for i in range(2 * K):
            upoly = series.lienard_series(5.0, 4.0, u, v, 30)
            wpoly = series.variational_series(5.0, 4.0, upoly, w, dw, 30)
            w = series.evaluate(wpoly, dt)
            dw = series.evaluate(series.differentiate(wpoly), dt)
            u = series.evaluate(upoly, dt)
            v = series.evaluate(series.differentiate(upoly), dt)
            worst = max(worst, abs(wdata.w11[i + 1] - w))
        assert worst < 1e-9

    def test_variational_residual_spectral(self, cycle, wdata):
        # assemble w11 = a + exp(-m t) b and push it through the equation
        p = SystemParams(5.0, 4.0)
        m = wdata.floquet_mean
        t = cycle.u_samples.nodes
        a, b = wdata.a, wdata.b
        da, dda = spectral_derivative(a), spectral_derivative(a, 2)
        db, ddb = spectral_derivative(b), spectral_derivative(b, 2)
        emt = np.exp(-m * t)
        w = a.values + emt * b.values
        dw = da.values + emt * (db.values - m * b.values)
        ddw = dda.values + emt * (ddb.values - 2 * m * db.values + m * m * b.values)
        stiff = 6.0 * 4.0 * cycle.u * cycle.v + (1.0 + 12.0 * cycle.u**2)
        res = ddw + p.h(cycle.u) * dw + stiff * w
        assert np.max(np.abs(res)) < 1e-6

    def test_spacing_guard(self, cycle):
        _, _, F = wr.compute_F(cycle, 1.0)
        with pytest.raises(SingularitySpacing):
            wr.w11_grid(cycle, F, wr.WronskianSettings(r_c=0.92))

    def test_r_c_independence(self, cycle, core):
        _, _, F = wr.compute_F(cycle, 1.0)
        w_alt = wr.w11_grid(cycle, F, wr.WronskianSettings(r_c=2e-2))
        assert np.max(np.abs(w_alt - core["w11"])) < 1e-7


class TestExtract:
    def test_gamma_golden(self, wdata):
        assert wdata.gamma_hat == pytest.approx(GAMMA_REF, abs=5e-7)
        # 8 significant figures
        assert abs(wdata.gamma_hat / GAMMA_REF - 1.0) < 5e-9

    def test_b_periodic(self, wdata):
        assert wdata.b_periodicity_gap < 1e-8

    def test_b_starts_at_one(self, wdata):
        # a(0) = gamma * u0'(0) = 0, so b(0) = w11(0) = 1
        assert wdata.b.values[0] == pytest.approx(1.0, abs=1e-10)

    def test_reconstruction_on_grid(self, cycle, wdata):
        t = cycle.u_samples.nodes
        recon = wdata.a.values + np.exp(-wdata.floquet_mean * t) * wdata.b.values
        assert np.max(np.abs(recon - wdata.w11[: cycle.K])) < 1e-8

    def test_least_squares_residual(self, cycle, wdata):
        t = cycle.u_samples.nodes
        m = wdata.floquet_mean
        res = wdata.w11[: cycle.K] - np.exp(-m * t) * wdata.b.values - wdata.a.values
        assert math.sqrt(np.mean(res**2)) < 1e-8

    def test_gamma_is_the_minimizer(self, cycle, wdata):
        t = np.arange(cycle.K + 1) * (cycle.T0 / cycle.K)
        udot = np.concatenate([cycle.v, cycle.v[:1]])
        w = wdata.w11[: cycle.K + 1]
        b = np.concatenate([wdata.b.values, wdata.b.values[:1]])
        part = w - np.exp(-wdata.floquet_mean * t) * b

        def sse(g):
            r = part - g * udot
            return np.dot(r, r)

        g0 = wdata.gamma_unscaled
        assert sse(g0) < sse(g0 + 1e-6)
        assert sse(g0) < sse(g0 - 1e-6)


class TestA:
    def test_quadrature_golden(self, wdata):
        assert wdata.A_quad == pytest.approx(A_ROMBERG_REF, abs=1e-6)

    def test_closed_form_golden(self, wdata):
        assert wdata.A_closed == pytest.approx(A_CLOSED_REF, abs=1e-9)

    def test_agreement_ten_figures(self, wdata):
        assert abs(wdata.A_quad / wdata.A_closed - 1.0) < 5e-10

    def test_periodic_quadrature_route(self, cycle, wdata):
        quad, closed = wr.compute_A(cycle, wdata.F_tilde, wdata.b, wdata.sigma,
                                    method="periodic")
        assert abs(quad / closed - 1.0) < 5e-10

    def test_A_equals_minus_r1_sigma(self, cycle, wdata):
        # with r1 in resonance-rescaled time the identity A = -r1 sigma holds
        # for the plain (unscaled) quadrature mean; the reported A carries
        # the extra sigma^2 of the anchor-solution convention
        r1_resc = wdata.r1 / wdata.sigma**2
        assert wdata.A_quad / wdata.sigma**2 == pytest.approx(
            -r1_resc * wdata.sigma, rel=1e-9)

    def test_rho4(self, cycle, core):
        wd4 = wr.build(cycle, p=4, q=1, core=core)
        assert wd4.A_closed == pytest.approx(2 * A_CLOSED_REF, rel=1e-12)
        assert wd4.f0 == pytest.approx(F0_REF / 2.0, abs=1e-9)
        assert abs(wd4.A_quad / wd4.A_closed - 1.0) < 5e-10


class TestGridConvergence:
    def test_doubling_K(self, cycle, wdata):
        fine = find_limit_cycle(SystemParams(5.0, 4.0),
                                LimitCycleSettings(n_samples=301))
        wd_fine = wr.build(fine, p=2, q=1)
        assert abs(wd_fine.f0 / wdata.f0 - 1.0) < 1e-8
        assert abs(wd_fine.gamma_hat / wdata.gamma_hat - 1.0) < 1e-8
        assert abs(wd_fine.A_quad / wdata.A_quad - 1.0) < 1e-8
