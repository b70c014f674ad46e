"""Assembly of every scalar entering the expansion densities.

All coefficients are closed forms in (theta, sigma, hurst, x0) except the
third-order constant ``c3_prime``, which comes from the two-dimensional
kernel quadrature and is cached per (theta, hurst, quadrature spec).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field

from scipy import special

from . import estimator, kernels
from .estimator import BetaSpec, beta_value, q_exponent
from .fou import ModelParams
from .quadrature import QuadratureSpec

__all__ = [
    "ExpansionConstants",
    "assemble_constants",
    "internal_consistency_check",
    "c2_closed_form",
]

_C3_CACHE: dict = {}
_C3_LOCK = threading.Lock()

# Third-order terms are dropped (coefficient undefined, and asymptotically
# negligible) once the defining integral diverges.
_C3_DOMAIN_HI = 2.0 / 3.0


def c2_closed_form(theta: float, hurst: float) -> float:
    """First finite-horizon variance correction:

    -(2H-1) theta^{4H-2} / (2 H^2 (3-4H) Gamma(2H)^2); negative on (1/2, 3/4).
    """
    h = hurst
    return -(
        (2 * h - 1) * theta ** (4 * h - 2)
        / (2 * h * h * (3 - 4 * h) * special.gamma(2 * h) ** 2)
    )


def _c3_prime_cached(theta: float, hurst: float, spec: QuadratureSpec) -> float:
    key = (theta, hurst, spec)
    with _C3_LOCK:
        hit = _C3_CACHE.get(key)
    if hit is not None:
        return hit
    kp = kernels.KernelParams(theta=theta, hurst=hurst)
    value = float(kernels.cu3_quadrature(kp, spec))
    with _C3_LOCK:
        _C3_CACHE[key] = value
    return value


@dataclass(frozen=True)
class ExpansionConstants:
    """Every scalar of the second-order densities for one model point.

    ``c3_prime`` (and hence ``c3``) is None for hurst >= 2/3, where the
    defining integral diverges; the density layer then omits the
    corresponding term, which is asymptotically below the expansion order
    there anyway.
    """

    theta: float
    sigma: float
    hurst: float
    x0: float
    c0: float
    c2: float
    c3_prime: float | None
    c3: float | None
    mu_slope: float
    mu_half_curvature: float
    bias_limit: float
    lam: float
    kappa: float
    tau: float
    c1: float
    c11_plus: float
    c12_plus: float
    q: float
    beta_at_theta: float
    beta: BetaSpec = field(default_factory=BetaSpec)


def assemble_constants(
    params: ModelParams,
    beta: BetaSpec | None = None,
    spec: QuadratureSpec | None = None,
    *,
    with_c3_prime: bool | None = None,
) -> ExpansionConstants:
    """Evaluate all expansion coefficients at the given model point.

    ``beta`` is evaluated at ``params.theta`` (pass the true value for
    density work, a plug-in estimate for estimation-side corrections).
    ``with_c3_prime`` defaults to computing the third-order constant
    whenever it is defined (hurst < 2/3); pass False to skip the
    quadrature when only the hurst > 5/8 density terms are needed.
    """
    beta = beta or BetaSpec()
    spec = spec or QuadratureSpec()
    theta, sigma, h, x0 = params.theta, params.sigma, params.hurst, params.x0
    if not 0.5 < h < 0.75:
        raise ValueError(f"hurst must lie in (1/2, 3/4), got {h}")
    if sigma <= 0:
        raise ValueError("sigma must be positive for the expansion constants")

    kp = kernels.KernelParams(theta=theta, hurst=h)
    c0 = kernels.cu2_closed_form(kp)
    c2 = c2_closed_form(theta, h)
    slope = estimator.mu_slope(theta, sigma, h)
    curv = estimator.mu_half_curvature(theta, sigma, h)
    b_inf = estimator.bias_limit(theta, sigma, h, x0)
    lam = estimator.quadratic_coefficient(theta, h)
    beta_here = beta_value(beta, theta, sigma, h, x0)

    active = h <= 0.625
    kappa = lam if active else 0.0
    tau = (b_inf / slope if active else 0.0) - beta_here
    c1 = tau + kappa * c0
    c11_plus = b_inf / slope + lam * c0
    c12_plus = -beta_here

    if with_c3_prime is None:
        with_c3_prime = h < _C3_DOMAIN_HI
    if with_c3_prime and h >= _C3_DOMAIN_HI:
        raise ValueError(f"c3_prime is undefined for hurst >= 2/3, got {h}")
    c3_prime = _c3_prime_cached(theta, h, spec) if with_c3_prime else None
    c3 = c3_prime + 3.0 * lam * c0 * c0 if c3_prime is not None else None

    return ExpansionConstants(
        theta=theta, sigma=sigma, hurst=h, x0=x0,
        c0=c0, c2=c2, c3_prime=c3_prime, c3=c3,
        mu_slope=slope, mu_half_curvature=curv, bias_limit=b_inf,
        lam=lam, kappa=kappa, tau=tau, c1=c1,
        c11_plus=c11_plus, c12_plus=c12_plus,
        q=q_exponent(h), beta_at_theta=beta_here, beta=beta,
    )


def internal_consistency_check(c: ExpansionConstants, rel_tol: float = 1e-12) -> list[str]:
    """Verify the algebraic identities tying the constants together.

    Returns a list of human-readable violation messages (empty when all
    identities hold to ``rel_tol``): the slope/curvature ratio identity
    for lam, the composition of c1 and c3, the split of the mean-shift
    coefficient between the two density variants, the indicator gating of
    kappa and tau, and the seam values at hurst = 5/8.
    """
    bad: list[str] = []

    def close(a: float, b: float, scale: float = 1.0) -> bool:
        return abs(a - b) <= rel_tol * max(abs(a), abs(b), scale)

    lam_ratio = -c.mu_half_curvature / c.mu_slope
    if not close(c.lam, lam_ratio):
        bad.append(f"lam = {c.lam!r} != -half_curvature/slope = {lam_ratio!r}")
    if not close(c.lam, 0.5 * (2 * c.hurst + 1) / c.theta):
        bad.append("lam != (2H+1)/(2 theta)")

    active = c.hurst <= 0.625
    if not close(c.kappa, c.lam if active else 0.0):
        bad.append(f"kappa = {c.kappa!r} inconsistent with indicator gating")
    tau_expect = (c.bias_limit / c.mu_slope if active else 0.0) - c.beta_at_theta
    if not close(c.tau, tau_expect):
        bad.append(f"tau = {c.tau!r} != {tau_expect!r}")
    if not close(c.c1, c.tau + c.kappa * c.c0):
        bad.append(f"c1 = {c.c1!r} != tau + kappa c0 = {c.tau + c.kappa * c.c0!r}")
    if c.c3 is not None and c.c3_prime is not None:
        if not close(c.c3, c.c3_prime + 3 * c.lam * c.c0**2):
            bad.append("c3 != c3_prime + 3 lam c0^2")
    if not close(c.c11_plus, c.bias_limit / c.mu_slope + c.lam * c.c0):
        bad.append("c11_plus != bias_limit/slope + lam c0")
    if not close(c.c12_plus, -c.beta_at_theta):
        bad.append("c12_plus != -beta(theta)")
    gap = (0.0 if active else 1.0) * (c.bias_limit / c.mu_slope + c.lam * c.c0)
    if not close(c.c11_plus + c.c12_plus, c.c1 + gap):
        bad.append("c11_plus + c12_plus != c1 + inactive-indicator remainder")
    if c.hurst == 0.625:
        if not close(c.q, 0.5) or not close(3.0 - 4.0 * c.hurst, c.q):
            bad.append("q branches disagree at the 5/8 seam")
    return bad
