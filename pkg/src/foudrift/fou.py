"""Fractional Ornstein-Uhlenbeck trajectories and the quadratic functional.

The process dX = -theta X dt + sigma dB is simulated from an exact-in-law
driver path B through pathwise integration by parts of the Wiener integral:

    X_{k+1} = e^{-theta dt} X_k
              + sigma [ (1 - theta dt/2) B_{k+1}
                        - e^{-theta dt} (1 + theta dt/2) B_k ],

which is the exact solution with the inner ds-integral of
e^{theta s} B_s replaced by its trapezoid over each step.  Only the
smooth ds-integral carries discretization error; the drift and the
additive noise enter exactly.  All exponentials carry nonpositive
arguments, so the recursion is overflow-free for any theta * horizon.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.signal

from .fgn import SampleGrid, SamplePath, cumulate_to_fbm, simulate_fgn, validate_hurst

__all__ = [
    "FouSimulationError",
    "ModelParams",
    "FouPath",
    "simulate_fou",
    "fou_from_fbm",
    "integrate_q",
]

# Largest per-step exponent representable in double precision.
_EXP_LIMIT = 700.0


class FouSimulationError(RuntimeError):
    """Raised when a trajectory cannot be computed in double precision."""


@dataclass(frozen=True)
class ModelParams:
    """Model quadruple (theta, sigma, hurst, x0).

    Simulation accepts any hurst in (0, 1) and sigma >= 0 (sigma = 0 gives
    the deterministic relaxation x0 e^{-theta t}); the estimation and
    expansion layers further require hurst in (1/2, 3/4) and sigma > 0.
    """

    theta: float
    sigma: float
    hurst: float
    x0: float

    def __post_init__(self) -> None:
        if not self.theta > 0:
            raise ValueError(f"theta must be positive, got {self.theta}")
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        validate_hurst(self.hurst)


@dataclass(frozen=True)
class FouPath:
    """Simulated trajectory; values[k] at time k * grid.dt, values[0] = x0."""

    grid: SampleGrid
    values: np.ndarray
    params: ModelParams
    seed: int
    stream: int = 0


def fou_from_fbm(params: ModelParams, grid: SampleGrid, fbm_values: np.ndarray) -> np.ndarray:
    """Run the exact-solution recursion on a given driver path (length steps+1)."""
    b = np.asarray(fbm_values, dtype=float)
    if b.shape != (grid.steps + 1,):
        raise ValueError(f"driver path must have length {grid.steps + 1}, got {b.shape}")
    dt = grid.dt
    if params.theta * dt > _EXP_LIMIT:
        raise FouSimulationError(
            f"theta * dt = {params.theta * dt:.3g} exceeds the double-precision "
            "exponent range"
        )
    decay = np.exp(-params.theta * dt)
    half = 0.5 * params.theta * dt
    drive = params.sigma * ((1.0 - half) * b[1:] - decay * (1.0 + half) * b[:-1])
    x, _ = scipy.signal.lfilter([1.0], [1.0, -decay], drive, zi=np.array([decay * params.x0]))
    values = np.empty(grid.steps + 1)
    values[0] = params.x0
    values[1:] = x
    values.flags.writeable = False
    return values


def simulate_fou(params: ModelParams, grid: SampleGrid, seed: int, stream: int = 0) -> FouPath:
    """Simulate one trajectory; deterministic in (params, grid, seed, stream)."""
    noise = simulate_fgn(params.hurst, grid, seed, stream)
    driver = cumulate_to_fbm(noise)
    values = fou_from_fbm(params, grid, driver.values)
    return FouPath(grid=grid, values=values, params=params, seed=seed, stream=stream)


def integrate_q(path) -> float:
    """Trapezoid-rule approximation of the time integral of X_t^2.

    Accepts a FouPath or SamplePath (anything with .values and .grid.dt).
    Exact for piecewise-linear X^2; always nonnegative, and zero only for
    the identically-zero path.
    """
    values = np.asarray(path.values, dtype=float)
    if values.size < 2:
        raise ValueError("path must contain at least two points")
    sq = values * values
    return float(np.trapezoid(sq, dx=path.grid.dt))
