"""Singular exponential-power kernels and the limit-constant integrals.

Everything here concerns the kernel

    a(x1, x2, x3) = exp(-theta |x1 - x2|) |x2 - x3|^{2H-2},

its one-variable marginals on the half line and on [0, T], and the chain
integrals of those marginals that produce the second- and third-order
limit constants of the scaled quadratic functional:

* ``cu2_closed_form``   -- gamma-function formula for the order-2 constant,
* ``cu2_quadrature``    -- the same constant from the defining integral
                           (independent numerical route; the module's
                           central cross-check),
* ``cu3_quadrature``    -- the order-3 constant, which has no closed form,
* ``cu3_importance_mc`` -- brute-force importance-sampled Monte Carlo of
                           the raw five-dimensional integral behind the
                           order-3 constant,
* ``gamma2_finite_T``   -- the finite-horizon second moment whose large-T
                           expansion the constants describe.

The marginals have two implementations: adaptive QUADPACK quadrature with
an explicit singularity-removing substitution (``half_line_kernel_A``,
``truncated_kernel_aT``), and closed forms built from incomplete gamma
functions and Kummer's 1F1 (``half_line_A_closed``, ``truncated_aT_closed``).
The closed forms are vectorized and feed the heavy chain integrals; the
quadrature route exists as their independent pointwise check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.integrate
from scipy import special

from .fgn import spawn_rng
from .quadrature import QuadratureError, QuadratureSpec, QuadValue, adaptive_quadrature

__all__ = [
    "KernelParams",
    "KernelSingularityError",
    "kernel_a",
    "abar_closed",
    "abar_envelope_constant",
    "half_line_A_closed",
    "truncated_aT_closed",
    "half_line_kernel_A",
    "truncated_kernel_aT",
    "cu2_closed_form",
    "cu2_quadrature",
    "cu3_quadrature",
    "cu3_importance_mc",
    "gamma2_finite_T",
]

# Switch points for the asymptotic branches of the scaled special functions.
_SU_ASYMPTOTIC_Z = 600.0
_FT_ASYMPTOTIC_Z = 40.0
_ASYMPTOTIC_TERMS = 30
# Beyond this, exp(log) would overflow; tail integrands take their limit value.
_LOG_HUGE = 600.0


class KernelSingularityError(ValueError):
    """Raised when the kernel is evaluated on its singular set x2 == x3."""


@dataclass(frozen=True)
class KernelParams:
    """Kernel parameters (theta, hurst) with the derived constants.

    ``alpha_h`` = H(2H-1) is the long-memory covariance factor and
    ``k_u`` = -theta^{2H} / (4 H^2 Gamma(2H)) the normalization of the
    quadratic-functional kernel; k_u < 0 and alpha_h in (0, 3/8) on the
    admissible range 1/2 < H < 3/4.
    """

    theta: float
    hurst: float

    def __post_init__(self) -> None:
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if not 0.5 < self.hurst < 0.75:
            raise ValueError(f"hurst must lie in (1/2, 3/4), got {self.hurst}")

    @property
    def alpha_h(self) -> float:
        return self.hurst * (2.0 * self.hurst - 1.0)

    @property
    def k_u(self) -> float:
        h = self.hurst
        return -self.theta ** (2 * h) / (4 * h * h * special.gamma(2 * h))

    @property
    def power(self) -> float:
        """Exponent s = 2H - 1 of the algebraic kernel factor |.|^{s-1}."""
        return 2.0 * self.hurst - 1.0


def kernel_a(x1, x2, x3, params: KernelParams):
    """exp(-theta |x1-x2|) |x2-x3|^{2H-2}; positive, translation invariant.

    The exponent 2H-2 lies in (-1, -1/2): the blow-up at x2 == x3 is
    integrable but the point itself is outside the domain.
    """
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    x3 = np.asarray(x3, dtype=float)
    if np.any(x2 == x3):
        raise KernelSingularityError("kernel is singular at x2 == x3")
    out = np.exp(-params.theta * np.abs(x1 - x2)) * np.abs(x2 - x3) ** (params.power - 1.0)
    return out if out.ndim else float(out)


# --------------------------------------------------------------------------
# closed-form marginals
# --------------------------------------------------------------------------

def _su_scaled(s: float, z) -> np.ndarray:
    """e^z Gamma(s, z), stable for all z >= 0.

    Direct product below z = 600; Poincare asymptotic series
    z^{s-1} sum_k (s-1)(s-2)...(s-k) z^{-k} above, where the truncation
    error is below the first omitted term (< 1e-40 relative at the switch).
    """
    z = np.asarray(z, dtype=float)
    out = np.empty(z.shape)
    small = z <= _SU_ASYMPTOTIC_Z
    zs = z[small]
    out[small] = np.exp(zs) * special.gamma(s) * special.gammaincc(s, zs)
    zb = z[~small]
    if zb.size:
        acc = np.ones_like(zb)
        term = np.ones_like(zb)
        for k in range(1, _ASYMPTOTIC_TERMS):
            term = term * (s - k) / zb
            acc += term
        out[~small] = zb ** (s - 1.0) * acc
    return out


def _exp_decay_power_int(s: float, theta: float, c) -> np.ndarray:
    """int_0^c e^{-theta (c - v)} v^{s-1} dv for c >= 0.

    Kummer form (c^s / s) 1F1(1; s+1; -theta c) for moderate theta c;
    Watson expansion c^{s-1}/theta * sum_k (1-s)_k (theta c)^{-k} beyond.
    """
    c = np.asarray(c, dtype=float)
    out = np.zeros(c.shape)
    z = theta * c
    small = z <= _FT_ASYMPTOTIC_Z
    cs = c[small]
    pos = cs > 0
    val = np.zeros(cs.shape)
    val[pos] = cs[pos] ** s / s * special.hyp1f1(1.0, s + 1.0, -theta * cs[pos])
    out[small] = val
    cb = c[~small]
    if cb.size:
        acc = np.ones_like(cb)
        term = np.ones_like(cb)
        for k in range(1, _ASYMPTOTIC_TERMS):
            term = term * (k - s) / (theta * cb)
            acc += term
        out[~small] = cb ** (s - 1.0) / theta * acc
    return out


def half_line_A_closed(x, y, params: KernelParams) -> np.ndarray:
    """A(x, y) = int_0^inf exp(-theta |x-u|) |u-y|^{2H-2} du, closed form.

    Assembled from incomplete gamma functions and 1F1; vectorized over
    broadcastable x, y >= 0.  Agrees with the quadrature route
    ``half_line_kernel_A`` to special-function precision.
    """
    s = params.power
    theta = params.theta
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    if np.any(x < 0) or np.any(y < 0):
        raise ValueError("x and y must be nonnegative")
    d = x - y
    gs = special.gamma(s)
    th_s = theta ** (-s)
    dd = np.where(d >= 0, d, 0.0)
    ge = (
        np.exp(-theta * dd) * th_s * gs * special.gammainc(s, theta * y)
        + _exp_decay_power_int(s, theta, dd)
        + th_s * _su_scaled(s, theta * dd)
    )
    cc = np.where(d < 0, -d, 0.0)
    lt = (
        _exp_decay_power_int(s, theta, cc)
        + th_s * (_su_scaled(s, theta * cc) - np.exp(-theta * x) * _su_scaled(s, theta * y))
        + np.exp(-theta * cc) * th_s * gs
    )
    out = np.where(d >= 0, ge, lt)
    return out if out.ndim else float(out)


def truncated_aT_closed(x, y, horizon: float, params: KernelParams) -> np.ndarray:
    """a_T(x, y) = int_0^T exp(-theta |x-u|) |u-y|^{2H-2} du, closed form.

    Requires 0 <= x, y <= T.  Increases in T and converges to
    ``half_line_A_closed`` as both arguments sit deep inside (0, T).
    """
    s = params.power
    theta = params.theta
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    if np.any(x < 0) or np.any(y < 0) or np.any(x > horizon) or np.any(y > horizon):
        raise ValueError("x and y must lie in [0, horizon]")
    d = x - y
    gs = special.gamma(s)
    th_s = theta ** (-s)
    dd = np.where(d >= 0, d, 0.0)
    ge = (
        np.exp(-theta * dd) * th_s * gs * special.gammainc(s, theta * y)
        + _exp_decay_power_int(s, theta, dd)
        + th_s * (
            _su_scaled(s, theta * dd)
            - np.exp(-theta * (horizon - x)) * _su_scaled(s, theta * (horizon - y))
        )
    )
    cc = np.where(d < 0, -d, 0.0)
    lt = (
        _exp_decay_power_int(s, theta, cc)
        + th_s * (_su_scaled(s, theta * cc) - np.exp(-theta * x) * _su_scaled(s, theta * y))
        + np.exp(-theta * cc) * th_s * gs * special.gammainc(s, theta * (horizon - y))
    )
    out = np.where(d >= 0, ge, lt)
    return out if out.ndim else float(out)


def _half_line_A_diff(d, y, params: KernelParams) -> np.ndarray:
    """A(y + d, y) evaluated from the difference d directly.

    Equivalent to ``half_line_A_closed(y + d, y, ...)`` but conditioned on
    d instead of the rounded coordinate y + d, which matters when |d| is
    below the floating resolution of y (cusp windows at large y).
    """
    s = params.power
    theta = params.theta
    d, y = np.broadcast_arrays(np.asarray(d, float), np.asarray(y, float))
    gs = special.gamma(s)
    th_s = theta ** (-s)
    dd = np.where(d >= 0, d, 0.0)
    ge = (
        np.exp(-theta * dd) * th_s * gs * special.gammainc(s, theta * y)
        + _exp_decay_power_int(s, theta, dd)
        + th_s * _su_scaled(s, theta * dd)
    )
    cc = np.where(d < 0, -d, 0.0)
    x = np.maximum(y + d, 0.0)
    lt = (
        _exp_decay_power_int(s, theta, cc)
        + th_s * (_su_scaled(s, theta * cc) - np.exp(-theta * x) * _su_scaled(s, theta * y))
        + np.exp(-theta * cc) * th_s * gs
    )
    out = np.where(d >= 0, ge, lt)
    return out if out.ndim else float(out)


def abar_closed(r, params: KernelParams) -> np.ndarray:
    """Full-line envelope abar(r) = int_R exp(-theta |z|) |z-r|^{2H-2} dz.

    Dominates the half-line marginal: A(x, y) <= abar(|x-y|) for all
    x, y >= 0, with abar(0) = 2 Gamma(2H-1) theta^{1-2H}.
    """
    s = params.power
    theta = params.theta
    r = np.abs(np.asarray(r, dtype=float))
    out = (
        _exp_decay_power_int(s, theta, r)
        + theta ** (-s) * _su_scaled(s, theta * r)
        + np.exp(-theta * r) * theta ** (-s) * special.gamma(s)
    )
    return out if out.ndim else float(out)


def abar_envelope_constant(params: KernelParams) -> float:
    """Explicit C with abar(r) <= C (1 and r^{2H-2}) for all r > 0."""
    h = params.hurst
    theta = params.theta
    return (
        2.0 ** (3 - 2 * h) / theta * (1.0 + math.exp(-1.0) / (2 * h - 1))
        + 2.0 / theta
        + 2.0 / (2 * h - 1)
    )


# --------------------------------------------------------------------------
# quadrature marginals (independent route)
# --------------------------------------------------------------------------

def _quad_piece(f, lo: float, hi: float, spec: QuadratureSpec):
    val, err = scipy.integrate.quad(
        f, lo, hi, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
        limit=max(spec.max_subdivisions, 50),
    )
    return val, err


def _marginal_quadrature(x: float, y: float, lo: float, hi: float,
                         params: KernelParams, spec: QuadratureSpec):
    """Integrate exp(-theta|x-u|) |u-y|^{s-1} over [lo, hi] by pieces.

    Splits at the exponential kink u = x and the algebraic singularity
    u = y; on the pieces adjacent to y the substitution v = |u-y|^{2H-1}
    removes the blow-up exactly (the image integrand is
    exp(-theta |x - y -+ v^{1/(2H-1)}|) / (2H-1)).
    """
    s = params.power
    theta = params.theta
    plain = lambda u: math.exp(-theta * abs(x - u)) * abs(u - y) ** (s - 1.0)
    cuts = sorted({lo, hi} | {p for p in (x, y) if lo < p < hi})
    total = 0.0
    err = 0.0
    for a, b in zip(cuts[:-1], cuts[1:]):
        if spec.singularity_split and a == y:
            g = lambda v: math.exp(-theta * abs(x - y - v ** (1.0 / s))) / s
            val, e = _quad_piece(g, 0.0, (b - y) ** s, spec)
        elif spec.singularity_split and b == y:
            g = lambda v: math.exp(-theta * abs(x - y + v ** (1.0 / s))) / s
            val, e = _quad_piece(g, 0.0, (y - a) ** s, spec)
        else:
            val, e = _quad_piece(plain, a, b, spec)
        total += val
        err += e
    return total, err


def half_line_kernel_A(x: float, y: float, params: KernelParams,
                       spec: QuadratureSpec | None = None) -> QuadValue:
    """A(x, y) by adaptive quadrature with tail truncation.

    The window [min(x,y) - R/theta, max(x,y) + R/theta] (clipped to the
    half line, R = spec.tail_cutoff) covers both the exponential bump at
    u = x and the singularity at u = y; the discarded tails are bounded by
    exp(-R) (R/theta)^{2H-2} / theta each, and that analytic bound is added
    to the reported error estimate.
    """
    spec = spec or QuadratureSpec()
    if x < 0 or y < 0:
        raise ValueError("x and y must be nonnegative")
    window = spec.tail_cutoff / params.theta
    lo = max(0.0, min(x, y) - window)
    hi = max(x, y) + window
    total, err = _marginal_quadrature(x, y, lo, hi, params, spec)
    tail = 2.0 * math.exp(-spec.tail_cutoff) * window ** (params.power - 1.0) / params.theta
    return QuadValue(total, err + tail)


def truncated_kernel_aT(x: float, y: float, horizon: float, params: KernelParams,
                        spec: QuadratureSpec | None = None) -> QuadValue:
    """a_T(x, y) by adaptive quadrature on [0, T] with the same splitting."""
    spec = spec or QuadratureSpec()
    if not (0 <= x <= horizon and 0 <= y <= horizon):
        raise ValueError("x and y must lie in [0, horizon]")
    window = spec.tail_cutoff / params.theta
    lo = max(0.0, min(x, y) - window)
    hi = min(horizon, max(x, y) + window)
    total, err = _marginal_quadrature(x, y, lo, hi, params, spec)
    tail = 2.0 * math.exp(-spec.tail_cutoff) * window ** (params.power - 1.0) / params.theta
    return QuadValue(total, err + tail)


# --------------------------------------------------------------------------
# limit constants
# --------------------------------------------------------------------------

def cu2_closed_form(params: KernelParams) -> float:
    """Order-2 limit constant in gamma-function form.

    theta (4H-1)/(2H)^2 * {1 + Gamma(3-4H) Gamma(4H-1) / (Gamma(2H) Gamma(2-2H))};
    positive on (1/2, 3/4), linear in theta, with a pole of Gamma(3-4H) at
    H = 3/4 excluded by the domain check, and limit 2 theta as H -> 1/2+
    (the classical Ornstein-Uhlenbeck asymptotic variance).
    """
    h = params.hurst
    theta = params.theta
    ratio = (
        special.gamma(3 - 4 * h) * special.gamma(4 * h - 1)
        / (special.gamma(2 * h) * special.gamma(2 - 2 * h))
    )
    return theta * (4 * h - 1) / (2 * h) ** 2 * (1.0 + ratio)


def _bulk_cutoff(theta: float) -> float:
    return 30.0 / theta + 5.0


def cu2_quadrature(params: KernelParams, spec: QuadratureSpec | None = None) -> QuadValue:
    """Order-2 limit constant from the defining chain integral.

    Computes 2 k_u^2 alpha_h^2 * 4 int_0^inf A(0,x) A(x,0) dx with the
    closed-form marginal.  The tail is mapped to a finite interval by
    w = x^{-(3-4H)}, under which the integrand tends to the constant
    2 / (p theta^2) with p = 3-4H; no truncation error is incurred.
    Exists as the independent oracle for ``cu2_closed_form`` and as the
    dimension-reduction template for ``cu3_quadrature``.
    """
    spec = spec or QuadratureSpec()
    theta = params.theta
    p = 3.0 - 4.0 * params.hurst
    one_ms = 1.0 - params.power  # = 2 - 2H
    x0 = _bulk_cutoff(theta)

    def bulk(x):
        return half_line_A_closed(0.0, x, params) * half_line_A_closed(x, 0.0, params)

    def tail(w):
        out = np.full(w.shape, 2.0 / (p * theta * theta))
        live = w > 0
        logx = np.where(live, -np.log(np.where(live, w, 1.0)) / p, 0.0)
        safe = live & (logx < _LOG_HUGE)
        if np.any(safe):
            x = np.exp(logx[safe])
            scaled = (
                half_line_A_closed(0.0, x, params) * x ** one_ms
                * half_line_A_closed(x, 0.0, params) * x ** one_ms
            )
            out[safe] = scaled / p
        return out

    bulk_val = adaptive_quadrature(bulk, [0.0, 0.5 * x0, x0], spec)
    tail_val = adaptive_quadrature(tail, [0.0, x0 ** (-p)], spec)
    front = 8.0 * params.k_u ** 2 * params.alpha_h ** 2
    value = front * (float(bulk_val) + float(tail_val))
    return QuadValue(value, abs(front) * (bulk_val.error + tail_val.error))


def _cu3_inner(z: float, params: KernelParams, spec: QuadratureSpec,
               err_acc: list) -> float:
    """int_0^inf A(0,y) A(y,z) dy for one z >= 0.

    Bulk panels split at the cusp y = z; once z is large the cusp window
    is integrated in shifted coordinates v = y - z (the difference-form
    kernel keeps full resolution where y + v would round back to y).  The
    tail beyond max(x0, 2z) uses the same w = y^{-(3-4H)} map as cu2,
    whose integrand approaches 2 / (p theta^2) once y dominates z.
    """
    theta = params.theta
    p = 3.0 - 4.0 * params.hurst
    one_ms = 1.0 - params.power
    x0 = _bulk_cutoff(theta)
    y1 = max(x0, 2.0 * z)

    def bulk(y):
        return half_line_A_closed(0.0, y, params) * half_line_A_closed(y, z, params)

    def tail(w):
        out = np.full(w.shape, 2.0 / (p * theta * theta))
        live = w > 0
        logy = np.where(live, -np.log(np.where(live, w, 1.0)) / p, 0.0)
        safe = live & (logy < _LOG_HUGE)
        if np.any(safe):
            y = np.exp(logy[safe])
            out[safe] = (
                half_line_A_closed(0.0, y, params) * y ** one_ms
                * half_line_A_closed(y, z, params) * y ** one_ms
            ) / p
        return out

    pieces = []
    if z <= x0:
        breaks = sorted({0.0, y1} | {v for v in (z, x0) if 0.0 < v < y1})
        pieces.append(adaptive_quadrature(bulk, breaks, spec))
    else:
        window = min(0.5 * z, x0)

        def cusp(v):
            return (half_line_A_closed(0.0, z + v, params)
                    * _half_line_A_diff(v, z, params))

        lo_breaks = sorted({0.0, z - window} | ({x0} if x0 < z - window else set()))
        pieces.append(adaptive_quadrature(bulk, lo_breaks, spec))
        pieces.append(adaptive_quadrature(cusp, [-window, 0.0, window], spec))
        if z + window < y1:
            pieces.append(adaptive_quadrature(bulk, [z + window, y1], spec))
    pieces.append(adaptive_quadrature(tail, [0.0, y1 ** (-p)], spec))
    err_acc.append(sum(v.error for v in pieces))
    return sum(float(v) for v in pieces)


def cu3_quadrature(params: KernelParams, spec: QuadratureSpec | None = None) -> QuadValue:
    """Order-3 limit constant 24 k_u^3 alpha_h^3 * J with

        J = int_0^inf int_0^inf A(0,y) A(y,z) A(z,0) dy dz,

    the dimension reduction of the raw five-fold chain integral obtained by
    integrating the exponential variables first.  Defined for
    H in (1/2, 2/3); the double integral diverges at H >= 2/3.  The sign is
    always negative (k_u < 0, J > 0).

    The outer tail uses w = z^{-(4-6H)}; its integrand approaches
    (2/theta) C_inner / (4-6H) where C_inner = (2/theta^2)(B(s,s) + B(1-2s,s))
    is the exact limit of z^{3-4H} times the inner integral.
    """
    spec = spec or QuadratureSpec()
    if not params.hurst < 2.0 / 3.0:
        raise ValueError(
            "order-3 constant is defined for hurst < 2/3 (the defining "
            f"integral diverges beyond), got {params.hurst}"
        )
    theta = params.theta
    s = params.power
    p_out = 4.0 - 6.0 * params.hurst
    q_in = 3.0 - 4.0 * params.hurst
    one_ms = 1.0 - s
    x0 = _bulk_cutoff(theta)
    inner_spec = QuadratureSpec(
        rel_tol=0.01 * spec.rel_tol,
        abs_tol=0.01 * spec.abs_tol,
        max_subdivisions=spec.max_subdivisions,
        tail_cutoff=spec.tail_cutoff,
        singularity_split=spec.singularity_split,
    )
    inner_errors: list = []
    c_inner = (2.0 / theta**2) * (special.beta(s, s) + special.beta(1.0 - 2.0 * s, s))
    limit_out = (2.0 / theta) * c_inner / p_out

    def outer_bulk(z):
        z = np.atleast_1d(z)
        inner = np.array([_cu3_inner(v, params, inner_spec, inner_errors) for v in z])
        return inner * half_line_A_closed(z, 0.0, params)

    def outer_tail(w):
        out = np.full(w.shape, limit_out)
        live = w > 0
        logz = np.where(live, -np.log(np.where(live, w, 1.0)) / p_out, 0.0)
        safe = live & (logz < _LOG_HUGE / max(q_in, one_ms))
        idx = np.nonzero(safe)[0]
        for i in idx:
            z = math.exp(logz[i])
            inner = _cu3_inner(z, params, inner_spec, inner_errors)
            out[i] = (
                inner * z ** q_in
                * float(half_line_A_closed(z, 0.0, params)) * z ** one_ms
            ) / p_out
        return out

    bulk_val = adaptive_quadrature(outer_bulk, [0.0, 0.5 * x0, x0], spec)
    tail_val = adaptive_quadrature(outer_tail, [0.0, x0 ** (-p_out)], spec)
    front = 24.0 * params.k_u ** 3 * params.alpha_h ** 3
    value = front * (float(bulk_val) + float(tail_val))
    err = bulk_val.error + tail_val.error + (max(inner_errors) if inner_errors else 0.0)
    return QuadValue(value, abs(front) * err)


def gamma2_finite_T(params: KernelParams, horizon: float,
                    spec: QuadratureSpec | None = None) -> QuadValue:
    """Finite-horizon second moment of the scaled quadratic functional:

        2 k_u^2 alpha_h^2 / T * int_{[0,T]^2} a_T(x,y) a_T(y,x) dx dy.

    Positive, and converging to ``cu2_closed_form`` from the direction of
    the T^{4H-3} correction as T grows.  The integrand is symmetric under
    (x, y) swap, so only the x < y triangle is integrated.
    """
    spec = spec or QuadratureSpec()
    if horizon <= 0:
        raise ValueError("horizon must be positive")
    window = min(20.0 / params.theta, 0.25 * horizon)
    inner_spec = QuadratureSpec(
        rel_tol=0.01 * spec.rel_tol,
        abs_tol=0.01 * spec.abs_tol,
        max_subdivisions=spec.max_subdivisions,
        tail_cutoff=spec.tail_cutoff,
        singularity_split=spec.singularity_split,
    )
    inner_errors: list = []

    def inner(x: float) -> float:
        if x >= horizon:
            return 0.0

        def f(y):
            return (
                truncated_aT_closed(x, y, horizon, params)
                * truncated_aT_closed(y, x, horizon, params)
            )

        breaks = sorted({x, horizon} | {
            v for v in (x + window, horizon - window) if x < v < horizon
        })
        val = adaptive_quadrature(f, breaks, inner_spec)
        inner_errors.append(val.error)
        return float(val)

    def outer(x):
        x = np.atleast_1d(x)
        return np.array([inner(v) for v in x])

    breaks = sorted({0.0, horizon} | {
        v for v in (window, horizon - window) if 0.0 < v < horizon
    })
    tri = adaptive_quadrature(outer, breaks, spec)
    front = 2.0 * params.k_u ** 2 * params.alpha_h ** 2 / horizon
    value = front * 2.0 * float(tri)
    err = 2.0 * (tri.error + horizon * (max(inner_errors) if inner_errors else 0.0))
    return QuadValue(value, abs(front) * err)


# --------------------------------------------------------------------------
# Monte Carlo oracle for the order-3 constant
# --------------------------------------------------------------------------

def _sample_power_mixture(rng: np.random.Generator, n: int, s: float, eta: float):
    """Draw from the density 0.5 s t^{s-1} on (0,1] + 0.5 eta t^{-1-eta} on (1,inf)."""
    u = rng.random(n)
    v = rng.random(n)
    inner = v ** (1.0 / s)
    outer = (1.0 - v) ** (-1.0 / eta)
    t = np.where(u < 0.5, inner, outer)
    pdf = np.where(t <= 1.0, 0.5 * s * t ** (s - 1.0), 0.5 * eta * t ** (-1.0 - eta))
    return t, pdf


def cu3_importance_mc(params: KernelParams, n_samples: int, seed: int,
                      batch_size: int = 1_000_000):
    """Importance-sampled Monte Carlo of the raw five-fold chain integral.

    Estimates J5 = int_{(0,inf)^5} a(0,x2,x3) a(x3,x4,x5) a(x5,x6,0) and
    returns (24 k_u^3 alpha_h^3 J5_hat, standard error of that estimate).
    Deliberately does not reuse the marginal reduction, so it is an
    end-to-end check of ``cu3_quadrature``.

    The proposal follows the chain: x2 ~ Exp(theta); the two algebraic
    links get +-1 signs and radii from a power/Pareto mixture whose tail
    exponent eta = (1 - 4s)/3 keeps the weights square-integrable for
    s = 2H-1 <= 1/4; the exponential links get +-Exp(theta) increments;
    the last coordinate mixes a Gamma(s, theta/2) draw (covering the
    x6 -> 0 singularity) with a Laplace draw centered at x5 (covering the
    exponential glue).
    """
    s = params.power
    theta = params.theta
    if s >= 0.25:
        raise ValueError(
            "importance sampler requires hurst <= 0.625 for finite variance, "
            f"got {params.hurst}"
        )
    eta = (1.0 - 4.0 * s) / 3.0
    gamma_rate = 0.5 * theta
    rng = spawn_rng(seed)
    total = 0.0
    total_sq = 0.0
    count = 0
    while count < n_samples:
        n = min(batch_size, n_samples - count)
        x2 = rng.exponential(1.0 / theta, n)
        d1, q1 = _sample_power_mixture(rng, n, s, eta)
        x3 = x2 + np.where(rng.random(n) < 0.5, d1, -d1)
        d2 = rng.exponential(1.0 / theta, n)
        x4 = x3 + np.where(rng.random(n) < 0.5, d2, -d2)
        d3, q3 = _sample_power_mixture(rng, n, s, eta)
        x5 = x4 + np.where(rng.random(n) < 0.5, d3, -d3)
        gam = rng.gamma(s, 1.0 / gamma_rate, n)
        lap = x5 + np.where(rng.random(n) < 0.5, 1.0, -1.0) * rng.exponential(1.0 / theta, n)
        pick = rng.random(n) < 0.5
        x6 = np.where(pick, gam, lap)

        valid = (x3 > 0) & (x4 > 0) & (x5 > 0) & (x6 > 0)
        w = np.zeros(n)
        if np.any(valid):
            x5v, x6v = x5[valid], x6[valid]
            q6 = (
                0.5 * gamma_rate ** s * x6v ** (s - 1.0)
                * np.exp(-gamma_rate * x6v) / special.gamma(s)
                + 0.25 * theta * np.exp(-theta * np.abs(x6v - x5v))
            )
            w[valid] = (
                8.0 / theta**2
                * d1[valid] ** (s - 1.0) / q1[valid]
                * d3[valid] ** (s - 1.0) / q3[valid]
                * np.exp(-theta * np.abs(x5v - x6v)) * x6v ** (s - 1.0) / q6
            )
        total += w.sum()
        total_sq += (w * w).sum()
        count += n
    mean = total / count
    var = max(total_sq / count - mean * mean, 0.0) / count
    front = 24.0 * params.k_u ** 3 * params.alpha_h ** 3
    return front * mean, abs(front) * math.sqrt(var)
