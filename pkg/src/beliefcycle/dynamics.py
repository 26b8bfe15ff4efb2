"""Deterministic orbit machinery: simulation, attractor classification,
bifurcation diagrams, basin slices and a largest-Lyapunov estimator.

Long-run behavior is summarized in the paper-style taxonomy: fixed point,
period-k cycle with k <= 32, "high cardinality" (anything with more than 32
points: long cycles, closed invariant curves, chaos), or divergent.  Grids
evaluate cells independently through compiled kernels; one-dimensional
sweeps support the follow-the-attractor protocol where each parameter value
is seeded from the previous value's final state.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional, Sequence, Union

import numpy as np

from . import _kernels
from .errors import DivergentOrbit
from .equilibria import unbiased_steady_state, with_reference_bounds
from .model import ModelParams, State

__all__ = [
    "OrbitConfig",
    "OrbitSample",
    "AttractorKind",
    "AttractorClass",
    "BifurcationPoint",
    "Bifurcation2D",
    "BasinSlice",
    "resolve_initial",
    "simulate",
    "classify_attractor",
    "bifurcation_1d",
    "bifurcation_2d",
    "basin_slice",
    "lyapunov_largest",
]

MAX_PERIOD = _kernels.MAX_PERIOD

# The paper's standard perturbed initial data around the unbiased steady state.
INITIAL_OFFSET = 1e-3

# Catalog entries unify when their representative sets are this close
# (in units of match_tol).
CATALOG_TOL_FACTOR = 100.0


@dataclass(frozen=True)
class OrbitConfig:
    """Transient length, sample size and detection tolerances for orbits.

    match_tol = None resolves per parameter set to 1e-6 * (1 + |P*|).
    sample should be at least twice the maximum detectable period (32) for
    reliable classification.
    """

    transient: int = 10_000
    sample: int = 512
    divergence_cutoff: float = 1e9
    match_tol: Optional[float] = None

    def __post_init__(self) -> None:
        if self.transient < 0:
            raise ValueError(f"transient must be >= 0, got {self.transient}")
        if self.sample < 1:
            raise ValueError(f"sample must be >= 1, got {self.sample}")
        if not self.divergence_cutoff > 0:
            raise ValueError("divergence_cutoff must be positive")
        if self.match_tol is not None and not self.match_tol > 0:
            raise ValueError("match_tol must be positive when given")

    def resolved_match_tol(self, params: ModelParams) -> float:
        if self.match_tol is not None:
            return self.match_tol
        return 1e-6 * (1.0 + abs(unbiased_steady_state(params).P))


def _settle_tol(params: ModelParams) -> float:
    star = unbiased_steady_state(params)
    return 1e-12 * (1.0 + max(abs(star.Y), abs(star.P)))


def resolve_initial(params: ModelParams, initial: Union[State, str]) -> State:
    """Turn an initial-datum preset into a concrete state.

    'plus' and 'minus' perturb the unbiased steady state by +-1e-3 in every
    coordinate, the conventions used throughout the reference figures.
    """
    if isinstance(initial, State):
        return initial
    if isinstance(initial, tuple) and len(initial) == 3:
        return State(*map(float, initial))
    star = unbiased_steady_state(params)
    if initial == "plus":
        return State(star.Y + INITIAL_OFFSET, star.P + INITIAL_OFFSET, star.Z + INITIAL_OFFSET)
    if initial == "minus":
        return State(star.Y - INITIAL_OFFSET, star.P - INITIAL_OFFSET, star.Z - INITIAL_OFFSET)
    if initial == "star":
        return star.state
    raise ValueError(f"unknown initial preset {initial!r}; use plus, minus, star or a State")


@dataclass(frozen=True)
class OrbitSample:
    """Post-transient states of one orbit; divergent orbits are truncated."""

    states: np.ndarray  # (n_valid, 3)
    divergent: bool

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


def simulate(params: ModelParams, initial: Union[State, str],
             config: OrbitConfig = OrbitConfig()) -> OrbitSample:
    """Iterate the map, discard the transient and return the sampled tail."""
    s0 = resolve_initial(params, initial)
    pv = _kernels.pack_params(params)
    shocks = np.zeros(config.transient + config.sample)
    out, n_valid, diverged = _kernels.iterate_path(
        pv, s0.Y, s0.P, s0.Z, config.transient, config.sample,
        shocks, config.divergence_cutoff,
    )
    return OrbitSample(out[:n_valid].copy(), bool(diverged))


class AttractorKind(str, Enum):
    FIXED_POINT = "FIXED_POINT"
    PERIOD = "PERIOD"
    HIGH_CARDINALITY = "HIGH_CARDINALITY"
    DIVERGENT = "DIVERGENT"


@dataclass(frozen=True)
class AttractorClass:
    """Long-run classification of one orbit."""

    kind: AttractorKind
    period: int  # 1 for fixed points, k for cycles, 0 otherwise
    representatives: np.ndarray  # (m, 3), m <= 33
    mean: Optional[State]

    @property
    def class_code(self) -> str:
        """Compact code used in CSV outputs: FP, P2..P32, HC or DIV."""
        if self.kind is AttractorKind.FIXED_POINT:
            return "FP"
        if self.kind is AttractorKind.PERIOD:
            return f"P{self.period}"
        if self.kind is AttractorKind.HIGH_CARDINALITY:
            return "HC"
        return "DIV"


def _class_from_code(kind_code: int, period: int, reps: np.ndarray,
                     mean: np.ndarray) -> AttractorClass:
    reps = reps[~np.isnan(reps[:, 0])]
    if kind_code == _kernels.KIND_DIVERGENT:
        return AttractorClass(AttractorKind.DIVERGENT, 0, reps, None)
    mean_state = State(float(mean[0]), float(mean[1]), float(mean[2]))
    if kind_code == _kernels.KIND_HIGH_CARDINALITY:
        return AttractorClass(AttractorKind.HIGH_CARDINALITY, 0, reps, mean_state)
    if kind_code == 1:
        return AttractorClass(AttractorKind.FIXED_POINT, 1, reps, mean_state)
    return AttractorClass(AttractorKind.PERIOD, int(period), reps, mean_state)


def _classify_cells(pv_cells: np.ndarray, inits: np.ndarray,
                    match_tols: np.ndarray, settle_tols: np.ndarray,
                    config: OrbitConfig, workers: int = 1):
    n = pv_cells.shape[0]
    out_kind = np.empty(n, dtype=np.int32)
    out_period = np.empty(n, dtype=np.int32)
    out_reps = np.empty((n, MAX_PERIOD + 1, 3))
    out_mean = np.empty((n, 3))

    def run(lo: int, hi: int) -> None:
        _kernels.classify_grid(
            pv_cells[lo:hi], inits[lo:hi], config.transient, config.sample,
            config.divergence_cutoff, match_tols[lo:hi], settle_tols[lo:hi],
            out_kind[lo:hi], out_period[lo:hi], out_reps[lo:hi], out_mean[lo:hi],
        )

    workers = max(1, min(workers, n))
    if workers == 1:
        run(0, n)
    else:
        # The kernel releases the GIL, so thread chunks run concurrently;
        # each writes a disjoint slice of the preallocated outputs.
        from concurrent.futures import ThreadPoolExecutor

        edges = np.linspace(0, n, workers + 1).astype(int)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(run, int(a), int(b))
                for a, b in zip(edges[:-1], edges[1:]) if b > a
            ]
            for fut in futures:
                fut.result()
    return out_kind, out_period, out_reps, out_mean


def classify_attractor(params: ModelParams, initial: Union[State, str],
                       config: OrbitConfig = OrbitConfig()) -> AttractorClass:
    """Classify the orbit's long-run attractor from one initial state."""
    s0 = resolve_initial(params, initial)
    pv_cells = _kernels.pack_params(params)[None, :]
    inits = np.array([[s0.Y, s0.P, s0.Z]])
    match_tols = np.array([config.resolved_match_tol(params)])
    settle_tols = np.array([_settle_tol(params)])
    kinds, periods, reps, means = _classify_cells(
        pv_cells, inits, match_tols, settle_tols, config
    )
    return _class_from_code(int(kinds[0]), int(periods[0]), reps[0], means[0])


@dataclass(frozen=True)
class BifurcationPoint:
    axis_value: float
    P_samples: np.ndarray
    attractor: AttractorClass


def bifurcation_1d(params: ModelParams, axis: str, grid: Sequence[float],
                   seeding: str = "follow",
                   initial: Union[State, str] = "plus",
                   config: OrbitConfig = OrbitConfig(),
                   rescale_bounds: bool = True) -> list[BifurcationPoint]:
    """One-dimensional bifurcation diagram along beta or omega.

    seeding='follow' starts each grid point from the previous point's final
    state (the first point from `initial`), tracking one attractor branch
    through its bifurcations; 'fixed' reseeds every point from `initial`.
    The grid must be strictly monotone, ascending or descending.  With
    rescale_bounds the adjustment caps follow the local steady state, the
    protocol used for all reference diagrams.
    """
    if axis not in ("beta", "omega", "b"):
        raise ValueError(f"axis must be beta, omega or b, got {axis!r}")
    if seeding not in ("follow", "fixed"):
        raise ValueError(f"seeding must be follow or fixed, got {seeding!r}")
    grid = np.asarray(list(grid), dtype=float)
    if grid.size == 0:
        return []
    if grid.size > 1:
        diffs = np.diff(grid)
        if not (np.all(diffs > 0) or np.all(diffs < 0)):
            raise ValueError("grid must be strictly monotone")

    points: list[BifurcationPoint] = []
    carry: Optional[State] = None
    for value in grid:
        p_here = replace(params, **{axis: float(value)})
        if rescale_bounds:
            p_here = with_reference_bounds(p_here)
        if seeding == "fixed" or carry is None:
            s0 = resolve_initial(p_here, initial)
        else:
            s0 = carry
        orbit = simulate(p_here, s0, config)
        att = _classify_sample(p_here, orbit, config)
        points.append(BifurcationPoint(float(value), orbit.P.copy(), att))
        if seeding == "follow":
            if orbit.divergent or len(orbit) == 0:
                carry = None  # reseed after a divergent cell
            else:
                carry = State(*orbit.states[-1])
    return points


def _classify_sample(params: ModelParams, orbit: OrbitSample,
                     config: OrbitConfig) -> AttractorClass:
    # Classification of an already-computed sample, same rule as the grids.
    if orbit.divergent:
        return AttractorClass(AttractorKind.DIVERGENT, 0, orbit.states[-33:], None)
    tol = config.resolved_match_tol(params)
    n = len(orbit)
    k = int(_kernels.minimal_period(orbit.states, n, tol))
    if k > 0:
        reps = orbit.states[n - k:]
        mean = reps.mean(axis=0)
        kind = AttractorKind.FIXED_POINT if k == 1 else AttractorKind.PERIOD
        return AttractorClass(kind, k, reps.copy(), State(*mean))
    reps = orbit.states[max(0, n - (MAX_PERIOD + 1)):]
    mean = orbit.states.mean(axis=0)
    return AttractorClass(AttractorKind.HIGH_CARDINALITY, 0, reps.copy(), State(*mean))


@dataclass(frozen=True)
class Bifurcation2D:
    betas: np.ndarray
    omegas: np.ndarray
    kinds: np.ndarray    # (n_beta, n_omega) kind codes: 0 DIV, 1..32 period, 33 HC
    periods: np.ndarray

    def class_code(self, i: int, j: int) -> str:
        code = int(self.kinds[i, j])
        if code == _kernels.KIND_DIVERGENT:
            return "DIV"
        if code == _kernels.KIND_HIGH_CARDINALITY:
            return "HC"
        return "FP" if code == 1 else f"P{code}"


def bifurcation_2d(params: ModelParams,
                   beta_range: tuple[float, float],
                   omega_range: tuple[float, float],
                   resolution: tuple[int, int],
                   initial: Union[State, str] = "plus",
                   config: OrbitConfig = OrbitConfig(),
                   rescale_bounds: bool = True,
                   workers: int = 1) -> Bifurcation2D:
    """Attractor-class grid over the (beta, omega) plane with fixed seeding.

    Every cell uses the same initial-datum rule; adjustment caps are
    recomputed from the local steady state cell by cell (the reference
    protocol) unless rescale_bounds is disabled.
    """
    nb, nw = resolution
    if nb < 1 or nw < 1:
        raise ValueError(f"resolution must be >= 1 per axis, got {resolution}")
    betas = np.linspace(beta_range[0], beta_range[1], nb)
    omegas = np.linspace(omega_range[0], omega_range[1], nw)

    n_cells = nb * nw
    pv_cells = np.empty((n_cells, len(_kernels.PARAM_FIELDS)))
    inits = np.empty((n_cells, 3))
    match_tols = np.empty(n_cells)
    settle_tols = np.empty(n_cells)
    idx = 0
    for beta in betas:
        for omega in omegas:
            p_cell = replace(params, beta=float(beta), omega=float(omega))
            if rescale_bounds:
                p_cell = with_reference_bounds(p_cell)
            s0 = resolve_initial(p_cell, initial)
            pv_cells[idx] = _kernels.pack_params(p_cell)
            inits[idx] = (s0.Y, s0.P, s0.Z)
            match_tols[idx] = config.resolved_match_tol(p_cell)
            settle_tols[idx] = _settle_tol(p_cell)
            idx += 1

    kinds, periods, _, _ = _classify_cells(pv_cells, inits, match_tols,
                                           settle_tols, config, workers)
    return Bifurcation2D(betas, omegas,
                         kinds.reshape(nb, nw).copy(),
                         periods.reshape(nb, nw).copy())


@dataclass(frozen=True)
class BasinSlice:
    """Basin labels on the Y = Z plane, keyed to a catalog of attractors.

    labels[i, j] is the catalog index of the attractor reached from
    (Y_values[i], P_values[j], Y_values[i]); -1 marks divergent cells.
    Catalog entries are ordered by ascending mean price.
    """

    Y_values: np.ndarray
    P_values: np.ndarray
    labels: np.ndarray
    catalog: tuple[AttractorClass, ...]
    match_tol: float


def _hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    # Symmetric Hausdorff distance in the Chebyshev metric.
    d = np.max(np.abs(a[:, None, :] - b[None, :, :]), axis=2)
    return max(d.min(axis=1).max(), d.min(axis=0).max())


def basin_slice(params: ModelParams,
                Y_range: tuple[float, float],
                P_range: tuple[float, float],
                resolution: Union[int, tuple[int, int]],
                config: OrbitConfig = OrbitConfig(),
                workers: int = 1) -> BasinSlice:
    """Rasterize the basins of attraction on the Y = Z slice.

    Each grid cell starts an orbit at (Y, P, Z=Y); attractors found across
    cells are deduplicated into a catalog by representative-set matching,
    and cells are labeled by catalog index.
    """
    if isinstance(resolution, int):
        ny = np_ = resolution
    else:
        ny, np_ = resolution
    if ny < 2 or np_ < 2:
        raise ValueError(f"resolution must be >= 2 per axis, got {resolution}")
    y_vals = np.linspace(Y_range[0], Y_range[1], ny)
    p_vals = np.linspace(P_range[0], P_range[1], np_)

    n_cells = ny * np_
    pv = _kernels.pack_params(params)
    pv_cells = np.broadcast_to(pv, (n_cells, pv.size)).copy()
    yy, pp = np.meshgrid(y_vals, p_vals, indexing="ij")
    inits = np.column_stack([yy.ravel(), pp.ravel(), yy.ravel()])
    tol = config.resolved_match_tol(params)
    match_tols = np.full(n_cells, tol)
    settle_tols = np.full(n_cells, _settle_tol(params))

    kinds, periods, reps, means = _classify_cells(pv_cells, inits, match_tols,
                                                  settle_tols, config, workers)

    catalog: list[AttractorClass] = []
    labels = np.full(n_cells, -1, dtype=np.int64)
    cat_tol = CATALOG_TOL_FACTOR * tol
    for i in range(n_cells):
        if kinds[i] == _kernels.KIND_DIVERGENT:
            continue
        cls = _class_from_code(int(kinds[i]), int(periods[i]), reps[i], means[i])
        found = -1
        for j, entry in enumerate(catalog):
            if entry.kind is not cls.kind or entry.period != cls.period:
                continue
            if _hausdorff(entry.representatives, cls.representatives) < cat_tol:
                found = j
                break
        if found < 0:
            catalog.append(cls)
            found = len(catalog) - 1
        labels[i] = found

    # Relabel by ascending mean price.
    order = sorted(range(len(catalog)), key=lambda j: catalog[j].mean.P)
    rank = {old: new for new, old in enumerate(order)}
    labels = np.array([rank[v] if v >= 0 else -1 for v in labels], dtype=np.int64)
    catalog = [catalog[j] for j in order]

    return BasinSlice(y_vals, p_vals, labels.reshape(ny, np_),
                      tuple(catalog), tol)


def lyapunov_largest(params: ModelParams, initial: Union[State, str],
                     steps: int = 20_000, renorm_interval: int = 10,
                     divergence_cutoff: float = 1e9) -> float:
    """Largest Lyapunov exponent (nats/iteration) along one orbit.

    Tangent vectors ride the finite-difference Jacobian of the map with
    periodic renormalization; negative values indicate an attracting fixed
    point or cycle, positive values sensitive dependence.
    """
    if steps < 1000:
        raise ValueError(f"steps must be >= 1000 for a usable estimate, got {steps}")
    if renorm_interval < 1:
        raise ValueError("renorm_interval must be >= 1")
    s0 = resolve_initial(params, initial)
    pv = _kernels.pack_params(params)
    exponent, diverged = _kernels.lyapunov_path(
        pv, s0.Y, s0.P, s0.Z, steps, renorm_interval, divergence_cutoff
    )
    if diverged:
        raise DivergentOrbit("base orbit left the divergence cutoff before completion")
    return float(exponent)
