import math

import numpy as np
import pytest
from scipy import special

from foudrift.fgn import spawn_rng
from foudrift.kernels import (
    KernelParams,
    KernelSingularityError,
    abar_closed,
    abar_envelope_constant,
    cu2_closed_form,
    cu2_quadrature,
    cu3_importance_mc,
    cu3_quadrature,
    gamma2_finite_T,
    half_line_A_closed,
    half_line_kernel_A,
    kernel_a,
    truncated_aT_closed,
    truncated_kernel_aT,
)
from foudrift.constants import c2_closed_form
from foudrift.quadrature import QuadratureSpec

FAST = QuadratureSpec(rel_tol=1e-5, abs_tol=1e-9)


class TestParams:
    def test_derived_constants(self):
        p = KernelParams(theta=2.0, hurst=0.6)
        assert p.alpha_h == pytest.approx(0.6 * 0.2, rel=1e-15)
        assert p.k_u == pytest.approx(-2.0**1.2 / (4 * 0.36 * special.gamma(1.2)), rel=1e-14)
        assert p.k_u < 0
        assert 0 < p.alpha_h < 0.375

    def test_domain(self):
        with pytest.raises(ValueError):
            KernelParams(theta=0.0, hurst=0.6)
        with pytest.raises(ValueError):
            KernelParams(theta=1.0, hurst=0.75)
        with pytest.raises(ValueError):
            KernelParams(theta=1.0, hurst=0.5)


class TestKernelA:
    def test_origin_values(self):
        p = KernelParams(theta=3.0, hurst=0.6)
        assert kernel_a(0.0, 0.0, 1.0, p) == pytest.approx(1.0, rel=1e-15)

    def test_blowup_direction(self):
        p = KernelParams(theta=1.5, hurst=0.6)
        small = kernel_a(0.0, 1.0, 1.0 + 1e-8, p)
        smaller = kernel_a(0.0, 1.0, 1.0 + 1e-10, p)
        assert smaller > small > math.exp(-1.5)

    def test_translation_invariance(self):
        p = KernelParams(theta=2.0, hurst=0.55)
        a = kernel_a(0.3, 1.1, 2.9, p)
        b = kernel_a(0.3 + 5.7, 1.1 + 5.7, 2.9 + 5.7, p)
        assert a == pytest.approx(b, rel=1e-12)

    def test_singularity_raises(self):
        p = KernelParams(theta=1.0, hurst=0.6)
        with pytest.raises(KernelSingularityError):
            kernel_a(0.0, 1.0, 1.0, p)


class TestHalfLineMarginal:
    def test_frozen_values(self):
        # 30-digit direct integration of the defining integral
        a = half_line_kernel_A(1.0, 2.0, KernelParams(theta=2.0, hurst=0.6))
        assert float(a) == pytest.approx(2.0037459064540468, rel=1e-9)
        b = half_line_kernel_A(0.5, 3.7, KernelParams(theta=1.0, hurst=0.55))
        assert float(b) == pytest.approx(1.3929037990009339, rel=1e-9)

    def test_closed_matches_quadrature(self):
        for theta, hurst in ((1.0, 0.55), (2.0, 0.7), (0.7, 0.625)):
            p = KernelParams(theta=theta, hurst=hurst)
            for x in (0.0, 0.3, 1.7, 5.0, 25.0):
                for y in (0.0, 0.3, 1.7, 5.0, 25.0):
                    q = half_line_kernel_A(x, y, p)
                    c = half_line_A_closed(x, y, p)
                    assert float(q) == pytest.approx(float(c), rel=1e-8), (x, y)

    def test_quadrature_carries_error_estimate(self):
        p = KernelParams(theta=1.0, hurst=0.6)
        val = half_line_kernel_A(1.0, 2.0, p)
        # reported estimate is conservative but near the requested rel_tol,
        # and honest: the closed form sits inside it
        assert val.error < 1e-6 * float(val)
        assert abs(float(val) - float(half_line_A_closed(1.0, 2.0, p))) <= val.error

    def test_deep_diagonal_approaches_full_line_value(self):
        # A(x, x) -> 2 Gamma(2H-1) theta^{1-2H} for x >> 1/theta; near the
        # upper end of the admissible range this is within 0.05% of
        # 2*sqrt(pi) = 3.5449077..., the H -> 3/4 full-line value
        for theta, hurst in ((1.0, 0.55), (1.0, 0.7), (2.0, 0.625), (1.0, 0.7499)):
            p = KernelParams(theta=theta, hurst=hurst)
            target = 2 * special.gamma(2 * hurst - 1) * theta ** (1 - 2 * hurst)
            assert half_line_A_closed(60.0 / theta, 60.0 / theta, p) == pytest.approx(
                target, rel=1e-10
            )
        assert 2 * special.gamma(2 * 0.7499 - 1) == pytest.approx(
            2 * math.sqrt(math.pi), rel=5e-4
        )

    def test_dominated_by_full_line_envelope(self):
        p = KernelParams(theta=2.0, hurst=0.6)
        xs = np.array([0.0, 0.1, 0.9, 3.0, 12.0])
        for x in xs:
            for y in xs:
                assert half_line_A_closed(x, y, p) <= abar_closed(abs(x - y), p) * (1 + 1e-12)

    def test_envelope_constant_bound(self):
        # abar(r) <= C (1 and r^{2H-2}) with the explicit constant
        for theta, hurst in ((1.0, 0.55), (2.0, 0.7), (0.7, 0.74)):
            p = KernelParams(theta=theta, hurst=hurst)
            c = abar_envelope_constant(p)
            r = np.logspace(-6, 3, 200)
            bound = c * np.minimum(1.0, r ** (2 * hurst - 2))
            assert np.all(abar_closed(r, p) <= bound * (1 + 1e-12))

    def test_monte_carlo_cross_check(self):
        # importance-sampled estimate of A(1,2) at (theta=2, H=0.6): mixture
        # of a two-sided exponential around the kink and a power draw on
        # each side of the algebraic singularity
        theta, hurst, x, y = 2.0, 0.6, 1.0, 2.0
        p = KernelParams(theta=theta, hurst=hurst)
        s = 2 * hurst - 1
        rng = spawn_rng(99)
        n = 400_000
        pick = rng.random(n) < 0.5
        exp_draw = x + np.where(rng.random(n) < 0.5, 1.0, -1.0) * rng.exponential(1 / theta, n)
        radius = rng.random(n) ** (1 / s)  # density s r^{s-1} on (0, 1]
        sign = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        u = np.where(pick, exp_draw, y + sign * radius)
        # carry the drawn radius exactly: y + 1e-17 rounds back to y in floats
        r = np.where(pick, np.abs(u - y), radius)
        # equal-weight mixture of the two-sided exponential around x and the
        # signed power draw around y
        q = (0.25 * theta * np.exp(-theta * np.abs(u - x))
             + 0.25 * s * np.where(r <= 1.0, r ** (s - 1.0), 0.0))
        f = np.where(u >= 0, np.exp(-theta * np.abs(x - u)) * r ** (s - 1.0), 0.0)
        w = f / q
        est = w.mean()
        se = w.std(ddof=1) / math.sqrt(n)
        assert abs(est - float(half_line_A_closed(x, y, p))) <= 3 * se


class TestTruncatedMarginal:
    def test_monotone_in_horizon_and_limit(self):
        p = KernelParams(theta=1.0, hurst=0.6)
        x, y = 3.0, 5.0
        vals = [float(truncated_aT_closed(x, y, t, p)) for t in (8.0, 16.0, 40.0, 120.0)]
        assert vals == sorted(vals)
        assert vals[-1] == pytest.approx(float(half_line_A_closed(x, y, p)), rel=1e-10)

    def test_frozen_origin_value(self):
        # int_0^10 e^{-z} z^{-0.8} dz at 25 digits
        p = KernelParams(theta=1.0, hurst=0.6)
        assert float(truncated_kernel_aT(0.0, 0.0, 10.0, p)) == pytest.approx(
            4.5908370100235238, rel=1e-9
        )
        assert truncated_aT_closed(0.0, 0.0, 10.0, p) == pytest.approx(
            4.5908370100235238, rel=1e-12
        )

    def test_near_diagonal_finite_and_bounded(self):
        p = KernelParams(theta=2.0, hurst=0.55)
        horizon = 20.0
        x = horizon / 2
        for dy in (1e-6, -1e-6):
            v = float(truncated_aT_closed(x, x + dy, horizon, p))
            assert np.isfinite(v) and v > 0
            bound = abar_envelope_constant(p) * min(1.0, abs(dy) ** (2 * 0.55 - 2))
            assert v <= bound

    def test_closed_matches_quadrature(self):
        p = KernelParams(theta=2.0, hurst=0.65)
        horizon = 12.0
        for x, y in ((0.0, 0.0), (1.0, 7.0), (7.0, 1.0), (6.0, 6.5), (11.9, 0.1)):
            q = truncated_kernel_aT(x, y, horizon, p)
            c = truncated_aT_closed(x, y, horizon, p)
            assert float(q) == pytest.approx(float(c), rel=1e-8)

    def test_domain_checks(self):
        p = KernelParams(theta=1.0, hurst=0.6)
        with pytest.raises(ValueError):
            truncated_kernel_aT(-0.1, 0.5, 1.0, p)
        with pytest.raises(ValueError):
            truncated_aT_closed(0.1, 1.5, 1.0, p)


class TestOrderTwoConstant:
    def test_closed_form_values(self):
        # 30-digit gamma-function evaluations
        assert cu2_closed_form(KernelParams(2.0, 0.55)) == pytest.approx(
            4.0690159819601994, rel=1e-13
        )
        assert cu2_closed_form(KernelParams(1.0, 0.6)) == pytest.approx(
            2.1739549781247955, rel=1e-13
        )

    def test_classical_limit(self):
        for theta in (1.0, 2.0):
            val = cu2_closed_form(KernelParams(theta, 0.5001))
            assert val == pytest.approx(2 * theta, rel=0.01)

    def test_linear_in_theta(self):
        for hurst in (0.55, 0.7):
            a = cu2_closed_form(KernelParams(1.0, hurst))
            b = cu2_closed_form(KernelParams(3.5, hurst))
            assert b == pytest.approx(3.5 * a, rel=1e-13)

    @pytest.mark.parametrize("theta", [1.0, 2.0])
    @pytest.mark.parametrize("hurst", [0.55, 0.6, 0.625, 0.7])
    def test_quadrature_matches_closed_form(self, theta, hurst):
        p = KernelParams(theta, hurst)
        closed = cu2_closed_form(p)
        quad = cu2_quadrature(p)
        assert abs(float(quad) - closed) / closed <= 1e-4

    def test_quadrature_scaling(self):
        a = float(cu2_quadrature(KernelParams(1.0, 0.6), FAST))
        b = float(cu2_quadrature(KernelParams(2.0, 0.6), FAST))
        assert b == pytest.approx(2 * a, rel=1e-4)

    def test_positive_integrand(self):
        p = KernelParams(2.0, 0.6)
        xs = np.linspace(0.01, 30.0, 50)
        vals = half_line_A_closed(0.0, xs, p) * half_line_A_closed(xs, 0.0, p)
        assert np.all(vals > 0)


class TestOrderThreeConstant:
    def test_sign_negative(self):
        v = cu3_quadrature(KernelParams(2.0, 0.55), FAST)
        assert float(v) < 0

    def test_linear_in_theta(self):
        a = float(cu3_quadrature(KernelParams(1.0, 0.55), FAST))
        b = float(cu3_quadrature(KernelParams(2.0, 0.55), FAST))
        assert b == pytest.approx(2 * a, rel=1e-3)

    def test_refining_tolerance_stays_within_error(self):
        p = KernelParams(2.0, 0.6)
        coarse = cu3_quadrature(p, FAST)
        fine = cu3_quadrature(p)
        assert abs(float(coarse) - float(fine)) <= max(coarse.error, 1e-6 * abs(float(fine)))

    def test_domain_error_beyond_two_thirds(self):
        with pytest.raises(ValueError, match="2/3"):
            cu3_quadrature(KernelParams(2.0, 0.7))

    def test_importance_mc_agrees(self):
        p = KernelParams(2.0, 0.6)
        quad = float(cu3_quadrature(p, FAST))
        mc, se = cu3_importance_mc(p, 2_000_000, seed=5)
        assert mc < 0
        assert abs(mc - quad) <= 3 * se

    def test_importance_mc_domain(self):
        with pytest.raises(ValueError, match="0.625"):
            cu3_importance_mc(KernelParams(2.0, 0.65), 1000, seed=0)


class TestGammaTwoFiniteHorizon:
    def test_small_horizon_frozen_value(self):
        # independent 25-digit tanh-sinh double integral
        g = gamma2_finite_T(KernelParams(1.0, 0.6), 5.0)
        assert float(g) == pytest.approx(1.620743462893143, rel=1e-7)

    def test_converges_upward_to_limit_constant(self):
        p = KernelParams(2.0, 0.7)
        c0 = cu2_closed_form(p)
        vals = [float(gamma2_finite_T(p, t, FAST)) for t in (50.0, 100.0, 200.0)]
        gaps = [c0 - v for v in vals]
        assert all(v < c0 for v in vals)
        assert gaps == sorted(gaps, reverse=True)

    def test_residual_matches_variance_correction(self):
        p = KernelParams(2.0, 0.7)
        c0 = cu2_closed_form(p)
        c2 = c2_closed_form(2.0, 0.7)
        residuals = {
            t: (float(gamma2_finite_T(p, t)) - c0) / t ** (4 * 0.7 - 3)
            for t in (200.0, 400.0)
        }
        assert abs(residuals[200.0] / residuals[400.0] - 1) < 0.15
        for r in residuals.values():
            assert abs(r / c2 - 1) < 0.20

    def test_large_horizon_within_remainder_heuristic(self):
        p = KernelParams(2.0, 0.55)
        c0 = cu2_closed_form(p)
        c2 = c2_closed_form(2.0, 0.55)
        g = float(gamma2_finite_T(p, 1e4))
        assert abs(g - c0) <= 2 * abs(c2) * 1e4 ** (4 * 0.55 - 3)

    def test_positive(self):
        assert float(gamma2_finite_T(KernelParams(1.0, 0.55), 10.0, FAST)) > 0
