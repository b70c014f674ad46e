import dataclasses
import math

import pytest
from scipy import special

from foudrift.constants import assemble_constants, c2_closed_form, internal_consistency_check
from foudrift.estimator import BetaSpec
from foudrift.fou import ModelParams
from foudrift.kernels import KernelParams, cu2_closed_form
from foudrift.quadrature import QuadratureSpec

FAST = QuadratureSpec(rel_tol=1e-5, abs_tol=1e-9)

LATTICE = [
    ModelParams(theta=theta, sigma=sigma, hurst=hurst, x0=x0)
    for theta in (1.0, 2.0)
    for hurst in (0.55, 0.6, 0.625, 0.7, 0.74)
    for sigma in (0.5, 1.0)
    for x0 in (0.0, 1.0)
]


def assemble_fast(params, beta=None):
    with_c3 = params.hurst <= 0.625
    return assemble_constants(params, beta, FAST, with_c3_prime=with_c3)


class TestAssembly:
    def test_lattice_identities(self):
        for params in LATTICE:
            c = assemble_fast(params)
            assert internal_consistency_check(c) == [], params

    def test_lam_direct_arithmetic(self):
        c = assemble_fast(ModelParams(theta=2.0, sigma=1.0, hurst=0.58, x0=0.0))
        assert c.lam == pytest.approx((2 * 0.58 + 1) / 4.0, rel=1e-14)

    def test_above_switch_mean_terms_vanish(self):
        c = assemble_fast(ModelParams(theta=2.0, sigma=1.0, hurst=0.7, x0=1.0))
        assert c.kappa == 0.0
        assert c.tau == 0.0
        assert c.c1 == 0.0
        assert c.c3_prime is None and c.c3 is None

    def test_bias_correct_zeroes_mean_coefficient(self):
        c = assemble_fast(
            ModelParams(theta=2.0, sigma=1.0, hurst=0.55, x0=1.0), BetaSpec("bias_correct")
        )
        assert abs(c.c1) < 1e-12
        assert c.c12_plus == -c.beta_at_theta

    def test_c0_c2_closed_forms(self):
        for theta in (1.0, 2.0):
            for hurst in (0.55, 0.7):
                c = assemble_fast(ModelParams(theta=theta, sigma=1.0, hurst=hurst, x0=0.0))
                assert c.c0 == cu2_closed_form(KernelParams(theta, hurst))
                assert c.c2 == c2_closed_form(theta, hurst)
                assert c.c0 > 0 and c.c2 < 0

    def test_homogeneity_in_theta_and_sigma(self):
        base = assemble_fast(ModelParams(theta=1.0, sigma=1.0, hurst=0.7, x0=0.0))
        theta_scaled = assemble_fast(ModelParams(theta=2.0, sigma=1.0, hurst=0.7, x0=0.0))
        assert theta_scaled.c0 == pytest.approx(2 * base.c0, rel=1e-13)
        assert theta_scaled.mu_slope == pytest.approx(
            base.mu_slope * 2.0 ** (-2 * 0.7 - 1), rel=1e-13
        )
        sigma_scaled = assemble_fast(ModelParams(theta=1.0, sigma=0.5, hurst=0.7, x0=0.0))
        assert sigma_scaled.mu_slope == pytest.approx(0.25 * base.mu_slope, rel=1e-13)

    def test_x0_enters_only_through_bias_limit(self):
        a = assemble_fast(ModelParams(theta=2.0, sigma=1.0, hurst=0.6, x0=0.0))
        b = assemble_fast(ModelParams(theta=2.0, sigma=1.0, hurst=0.6, x0=1.0))
        for name in ("c0", "c2", "c3", "c3_prime", "lam", "kappa", "q",
                     "mu_slope", "mu_half_curvature"):
            assert getattr(a, name) == getattr(b, name), name
        assert a.bias_limit != b.bias_limit
        assert a.tau != b.tau
        assert a.c1 != b.c1
        assert a.c11_plus != b.c11_plus
        assert b.bias_limit - a.bias_limit == pytest.approx(1.0 / (2 * 2.0), rel=1e-12)

    def test_both_correction_terms_active_at_seam(self):
        from foudrift.density import DensityModel

        c = assemble_fast(ModelParams(theta=2.0, sigma=1.0, hurst=0.625, x0=1.0))
        model = DensityModel(c, 100.0, "expansion")
        d1, d2, d3 = model.coefficients()
        assert d2 != 0.0 and d3 != 0.0 and d1 != 0.0

    def test_c3_prime_on_request_between_switch_and_two_thirds(self):
        params = ModelParams(theta=2.0, sigma=1.0, hurst=0.65, x0=0.0)
        lazy = assemble_constants(params, spec=FAST, with_c3_prime=False)
        assert lazy.c3_prime is None
        eager = assemble_constants(params, spec=FAST, with_c3_prime=True)
        assert eager.c3_prime is not None and eager.c3_prime < 0

    def test_c3_prime_cache_hits(self):
        params = ModelParams(theta=2.0, sigma=1.0, hurst=0.55, x0=0.0)
        a = assemble_fast(params)
        b = assemble_fast(dataclasses.replace(params, x0=1.0))
        assert a.c3_prime == b.c3_prime  # same (theta, hurst, spec) key

    def test_c3_prime_refused_beyond_two_thirds(self):
        params = ModelParams(theta=2.0, sigma=1.0, hurst=0.7, x0=0.0)
        with pytest.raises(ValueError, match="2/3"):
            assemble_constants(params, spec=FAST, with_c3_prime=True)

    def test_sigma_zero_rejected(self):
        with pytest.raises(ValueError):
            assemble_constants(ModelParams(theta=1.0, sigma=0.0, hurst=0.6, x0=0.0))

    def test_hurst_domain(self):
        with pytest.raises(ValueError):
            assemble_constants(ModelParams(theta=1.0, sigma=1.0, hurst=0.8, x0=0.0))


class TestConsistencyCheck:
    def test_fault_injection_flags_exactly_the_touched_identities(self):
        params = ModelParams(theta=2.0, sigma=1.0, hurst=0.6, x0=1.0)
        good = assemble_fast(params)
        assert internal_consistency_check(good) == []
        bad = dataclasses.replace(good, c0=good.c0 * 1.01)
        messages = internal_consistency_check(bad)
        assert messages, "corrupting c0 must be detected"
        joined = " ".join(messages)
        assert "c1" in joined and "c3" in joined and "c11_plus" in joined
        assert "lam =" not in joined  # lam identity does not involve c0

    def test_lam_fault_detected(self):
        params = ModelParams(theta=2.0, sigma=1.0, hurst=0.6, x0=1.0)
        good = assemble_fast(params)
        bad = dataclasses.replace(good, lam=good.lam * 1.01)
        assert any("lam" in m for m in internal_consistency_check(bad))


def test_bias_limit_classical_pieces():
    # x0 enters as x0^2/(2 theta); the sigma part is negative for H > 1/2
    c = assemble_fast(ModelParams(theta=2.0, sigma=1.0, hurst=0.6, x0=0.0))
    alpha_h = 0.6 * 0.2
    expected = -0.5 * alpha_h * (4 * 0.6 - 1) * special.gamma(0.2) * 2.0 ** (-2.2)
    assert c.bias_limit == pytest.approx(expected, rel=1e-13)
    assert c.bias_limit < 0
