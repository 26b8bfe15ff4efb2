"""Noisy simulation and stylized-facts statistics.

The stochastic variant perturbs the aggregate excess demand with i.i.d.
normal shocks inside the bounded price adjustment, so a single step never
moves the price by more than the adjustment caps allow regardless of shock
size.  Shocks come from per-run Philox streams (counter-based, documented,
platform-stable) so every path is reproducible from (seed, stream index).

Statistics operate on log-returns R_t = log(P_t) - log(P_{t-1}); kurtosis is
reported in the non-excess convention (normal = 3).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional, Union

import numpy as np

from . import _kernels
from .errors import DegenerateSeries, TooShort
from .equilibria import unbiased_steady_state, with_reference_bounds
from .dynamics import resolve_initial
from .model import ModelParams, State, noisy_step  # noqa: F401  (noisy_step re-exported here)

__all__ = [
    "NoiseConfig",
    "StochasticPath",
    "ReturnsSeries",
    "KurtosisCell",
    "noisy_step",
    "reference_shock_scale",
    "simulate_stochastic",
    "log_returns",
    "kurtosis",
    "autocorrelation",
    "kurtosis_grid",
]

# Shock scale used throughout the reference experiments: s = 0.15 * P*/F*.
SHOCK_SCALE_FACTOR = 0.15


@dataclass(frozen=True)
class NoiseConfig:
    """Shock size, seed and run length for one stochastic experiment.

    s = None resolves to the reference scaling 0.15 * P*/F* of the local
    parameter set.  length counts total iterations; the first burn_in of
    them are discarded.
    """

    s: Optional[float] = None
    seed: int = 0
    length: int = 200_000
    burn_in: int = 10_000

    def __post_init__(self) -> None:
        if self.s is not None and self.s < 0:
            raise ValueError(f"s must be >= 0, got {self.s}")
        if self.length <= self.burn_in:
            raise ValueError(
                f"length ({self.length}) must exceed burn_in ({self.burn_in})"
            )
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")


def reference_shock_scale(params: ModelParams) -> float:
    """The experiment's shock standard deviation, 0.15 * P*/F*."""
    return SHOCK_SCALE_FACTOR * unbiased_steady_state(params).P / params.F_star


@dataclass(frozen=True)
class StochasticPath:
    """Post-burn-in path of one noisy run; truncated paths carry a flag."""

    states: np.ndarray  # (n_valid, 3)
    truncated: bool
    s: float
    seed: int
    stream_index: int

    @property
    def Y(self) -> np.ndarray:
        return self.states[:, 0]

    @property
    def P(self) -> np.ndarray:
        return self.states[:, 1]

    @property
    def Z(self) -> np.ndarray:
        return self.states[:, 2]

    def __len__(self) -> int:
        return self.states.shape[0]


def _stream(seed: int, stream_index: int) -> np.random.Generator:
    # Distinct entropy tuples give provably distinct Philox streams.
    return np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, stream_index))))


def simulate_stochastic(params: ModelParams, initial: Union[State, str],
                        noise: NoiseConfig,
                        stream_index: int = 0) -> StochasticPath:
    """Seeded noisy path; s = 0 reproduces the deterministic orbit exactly."""
    s0 = resolve_initial(params, initial)
    s_val = reference_shock_scale(params) if noise.s is None else noise.s
    if s_val > 0.0:
        shocks = s_val * _stream(noise.seed, stream_index).standard_normal(noise.length)
    else:
        shocks = np.zeros(noise.length)
    pv = _kernels.pack_params(params)
    out, n_valid, diverged = _kernels.iterate_path(
        pv, s0.Y, s0.P, s0.Z, noise.burn_in, noise.length - noise.burn_in,
        shocks, 1e9,
    )
    return StochasticPath(out[:n_valid].copy(), bool(diverged), s_val,
                          noise.seed, stream_index)


@dataclass(frozen=True)
class ReturnsSeries:
    """Log-returns of a price path; entries with non-positive prices are skipped."""

    returns: np.ndarray
    n_invalid: int
    source: Optional[StochasticPath] = None


def _price_array(path) -> np.ndarray:
    if isinstance(path, StochasticPath):
        return path.P
    return np.asarray(path, dtype=float)


def log_returns(path) -> ReturnsSeries:
    """R_t = log(P_t) - log(P_{t-1}) wherever both prices are positive."""
    prices = _price_array(path)
    if prices.size < 2:
        raise TooShort(f"need at least 2 prices, got {prices.size}")
    valid = (prices[1:] > 0.0) & (prices[:-1] > 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.log(prices[1:]) - np.log(prices[:-1])
    source = path if isinstance(path, StochasticPath) else None
    return ReturnsSeries(r[valid], int(np.count_nonzero(~valid)), source)


def _series_array(series) -> np.ndarray:
    if isinstance(series, ReturnsSeries):
        return series.returns
    return np.asarray(series, dtype=float)


def kurtosis(series) -> float:
    """Fourth standardized moment (normal = 3, non-excess convention)."""
    x = _series_array(series)
    if x.size < 4:
        raise DegenerateSeries(f"need at least 4 entries, got {x.size}")
    centered = x - x.mean()
    m2 = np.mean(centered**2)
    if m2 == 0.0:
        raise DegenerateSeries("zero variance")
    return float(np.mean(centered**4) / m2**2)


def autocorrelation(series, max_lag: int, include_zero: bool = False) -> np.ndarray:
    """Sample autocorrelation at lags 1..max_lag (biased normalization).

    Pass raw returns for linear dependence, absolute returns for volatility
    clustering.  include_zero prepends the trivial lag-0 value 1.
    """
    x = _series_array(series)
    if max_lag < 1:
        raise ValueError(f"max_lag must be >= 1, got {max_lag}")
    if x.size <= max_lag:
        raise TooShort(f"series of length {x.size} too short for max_lag {max_lag}")
    centered = x - x.mean()
    denom = np.dot(centered, centered)
    if denom == 0.0:
        raise DegenerateSeries("zero variance")
    acf = np.empty(max_lag)
    for lag in range(1, max_lag + 1):
        acf[lag - 1] = np.dot(centered[:-lag], centered[lag:]) / denom
    if include_zero:
        return np.concatenate([[1.0], acf])
    return acf


@dataclass(frozen=True)
class KurtosisCell:
    beta: float
    omega: float
    kurtosis: float
    n_valid: int
    flags: tuple[str, ...] = ()


def kurtosis_grid(params: ModelParams,
                  beta_range: tuple[float, float],
                  omega_range: tuple[float, float],
                  resolution: tuple[int, int],
                  noise: NoiseConfig,
                  initial: Union[State, str] = "plus",
                  rescale_bounds: bool = True,
                  workers: int = 1) -> list[KurtosisCell]:
    """Kurtosis of log-returns per (beta, omega) cell, beta-major order.

    Every cell runs an independent seeded path (stream derived from the base
    seed and the cell's linear index) with the shock scale 0.15 * P*/F* of
    the local parameter set unless noise.s overrides it.  Degenerate or
    truncated cells carry NaN kurtosis and an annotation.
    """
    nb, nw = resolution
    if nb < 1 or nw < 1:
        raise ValueError(f"resolution must be >= 1 per axis, got {resolution}")
    betas = np.linspace(beta_range[0], beta_range[1], nb)
    omegas = np.linspace(omega_range[0], omega_range[1], nw)
    jobs = []
    idx = 0
    for beta in betas:
        for omega in omegas:
            p_cell = replace(params, beta=float(beta), omega=float(omega))
            if rescale_bounds:
                p_cell = with_reference_bounds(p_cell)
            jobs.append((idx, float(beta), float(omega), p_cell))
            idx += 1

    def run(job) -> KurtosisCell:
        stream_index, beta, omega, p_cell = job
        path = simulate_stochastic(p_cell, initial, noise, stream_index=stream_index)
        flags: tuple[str, ...] = ("truncated",) if path.truncated else ()
        try:
            series = log_returns(path)
            value = kurtosis(series)
            n_valid = series.returns.size
        except (DegenerateSeries, TooShort) as exc:
            value = float("nan")
            n_valid = 0
            flags = flags + (f"error:{type(exc).__name__}",)
        return KurtosisCell(beta, omega, value, n_valid, flags)

    workers = max(1, min(workers, len(jobs)))
    if workers == 1:
        return [run(job) for job in jobs]
    # The path kernel releases the GIL; cells keep their seed-derived stream
    # indices, so the output is identical for any worker count.
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run, jobs))
