"""Second-order expansion densities, their CDFs, and analytic moments.

The densities have the Edgeworth form phi(x; 0, c0) (1 + sum_k d_k H_k(x))
with variance-c0 Hermite polynomials H_k and horizon-dependent scalar
coefficients d_1, d_2, d_3.  Because H_k phi = (-d/dx)^k phi, the CDF and
the low moments are available in closed form, and every correction term
integrates to exactly zero, so the signed density is exactly normalized.
Correction terms may push the density slightly negative in the tails;
values are returned as-is (clamping would break the normalization and
moment identities used as cross-checks downstream).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy import special

from .constants import ExpansionConstants

__all__ = [
    "Variant",
    "DensityModel",
    "hermite",
    "normal_pdf",
    "normal_cdf",
    "expansion_pdf",
    "expansion_cdf",
    "expansion_moment",
]

Variant = Literal["normal_only", "expansion", "expansion_plus"]

_VARIANTS = ("normal_only", "expansion", "expansion_plus")


def hermite(k: int, x, c0: float):
    """Variance-c0 Hermite polynomial H_k(x) = e^{x^2/2c0} (-d/dx)^k e^{-x^2/2c0}.

    Supported orders: H_1 = x/c0, H_2 = x^2/c0^2 - 1/c0,
    H_3 = x^3/c0^3 - 3x/c0^2.
    """
    if c0 <= 0:
        raise ValueError("c0 must be positive")
    x = np.asarray(x, dtype=float)
    if k == 1:
        out = x / c0
    elif k == 2:
        out = x * x / c0**2 - 1.0 / c0
    elif k == 3:
        out = x**3 / c0**3 - 3.0 * x / c0**2
    else:
        raise ValueError(f"unsupported Hermite order {k}")
    return out if out.ndim else float(out)


def normal_pdf(x, c0: float):
    x = np.asarray(x, dtype=float)
    out = np.exp(-0.5 * x * x / c0) / math.sqrt(2.0 * math.pi * c0)
    return out if out.ndim else float(out)


def normal_cdf(x, c0: float):
    x = np.asarray(x, dtype=float)
    out = special.ndtr(x / math.sqrt(c0))
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class DensityModel:
    """One evaluable density: constants + horizon + variant.

    "normal_only" is the plain Gaussian limit N(0, c0); "expansion" keeps
    the indicator-gated correction terms (variance term for hurst in
    [5/8, 3/4), skewness term for hurst in (1/2, 5/8], mean shift at order
    T^{-q}); "expansion_plus" keeps all terms with the mean shift split
    into its T^{-1/2} and T^{-q} parts.
    """

    constants: ExpansionConstants
    horizon: float
    variant: Variant = "expansion"

    def __post_init__(self) -> None:
        if self.horizon <= 0:
            raise ValueError("horizon must be positive")
        if self.variant not in _VARIANTS:
            raise ValueError(f"unknown variant {self.variant!r}")

    def coefficients(self) -> tuple[float, float, float]:
        """Hermite coefficients (d1, d2, d3) of the variant at this horizon."""
        c = self.constants
        t = self.horizon
        if self.variant == "normal_only":
            return 0.0, 0.0, 0.0
        c3 = c.c3 if c.c3 is not None else 0.0
        if self.variant == "expansion":
            d1 = c.c1 * t ** (-c.q)
            d2 = 0.5 * c.c2 * t ** (4 * c.hurst - 3) if c.hurst >= 0.625 else 0.0
            d3 = c3 / 3.0 / math.sqrt(t) if c.hurst <= 0.625 else 0.0
            return d1, d2, d3
        d1 = c.c11_plus / math.sqrt(t) + c.c12_plus * t ** (-c.q)
        d2 = 0.5 * c.c2 * t ** (4 * c.hurst - 3)
        d3 = c3 / 3.0 / math.sqrt(t)
        return d1, d2, d3


def expansion_pdf(model: DensityModel, x):
    """Signed density phi(x;0,c0) (1 + d1 H1 + d2 H2 + d3 H3); not clamped."""
    c0 = model.constants.c0
    d1, d2, d3 = model.coefficients()
    x = np.asarray(x, dtype=float)
    corr = 1.0 + d1 * hermite(1, x, c0) + d2 * hermite(2, x, c0) + d3 * hermite(3, x, c0)
    out = normal_pdf(x, c0) * corr
    return out if out.ndim else float(out)


def expansion_cdf(model: DensityModel, x):
    """Antiderivative Phi(x;0,c0) - phi(x;0,c0) (d1 + d2 H1 + d3 H2).

    Tends to 0 at -inf and 1 at +inf; may be locally non-monotone where
    the signed density dips negative (documented, not an error).
    """
    c0 = model.constants.c0
    d1, d2, d3 = model.coefficients()
    x = np.asarray(x, dtype=float)
    out = normal_cdf(x, c0) - normal_pdf(x, c0) * (
        d1 + d2 * hermite(1, x, c0) + d3 * hermite(2, x, c0)
    )
    return out if out.ndim else float(out)


def expansion_moment(model: DensityModel, order: int) -> float:
    """Exact moments of the signed density about zero.

    Using int x^m (-d/dx)^k phi = m!/(m-k)! * (Gaussian moment m-k):
    mean = d1, second moment = c0 + 2 d2, third moment = 6 d3 + 3 c0 d1.
    """
    c0 = model.constants.c0
    d1, d2, d3 = model.coefficients()
    if order == 1:
        return d1
    if order == 2:
        return c0 + 2.0 * d2
    if order == 3:
        return 6.0 * d3 + 3.0 * c0 * d1
    raise ValueError(f"unsupported moment order {order}")
