"""Toolkit for a multiplier-accelerator economy coupled to a stock market
with evolutionarily switching optimistic/pessimistic fundamentalists.

Modules
-------
model       pure evaluation of the three-dimensional map and its pieces
equilibria  steady states (closed-form and root-found) and sweeps
stability   Jacobians, stability verdicts, scenario taxonomy, mirror map
dynamics    orbits, attractor classification, bifurcation diagrams, basins
stochastic  noisy simulation and stylized-facts statistics
cli         batch command-line interface writing CSV
"""

__version__ = "0.1.0"

from .model import ModelParams, SigmoidSpec, State, step, noisy_step
from .equilibria import (
    BiasedBounds,
    StateLabel,
    SteadyState,
    SteadyStateSet,
    biased_bounds,
    biased_steady_states,
    pitchfork_condition,
    sweep_steady_states,
    unbiased_steady_state,
    with_reference_bounds,
)
from .stability import (
    JacobianEval,
    ScenarioKind,
    ScenarioResult,
    StabilityReport,
    beta_mirror,
    classify_scenario,
    effective_slope,
    farebrother_report,
    jacobian_at,
    stability_region_grid,
)
from .dynamics import (
    AttractorClass,
    AttractorKind,
    BasinSlice,
    OrbitConfig,
    basin_slice,
    bifurcation_1d,
    bifurcation_2d,
    classify_attractor,
    lyapunov_largest,
    simulate,
)
from .stochastic import (
    NoiseConfig,
    ReturnsSeries,
    autocorrelation,
    kurtosis,
    kurtosis_grid,
    log_returns,
    simulate_stochastic,
)

__all__ = [
    "ModelParams", "SigmoidSpec", "State", "step", "noisy_step",
    "BiasedBounds", "StateLabel", "SteadyState", "SteadyStateSet",
    "biased_bounds", "biased_steady_states", "pitchfork_condition",
    "sweep_steady_states", "unbiased_steady_state", "with_reference_bounds",
    "JacobianEval", "ScenarioKind", "ScenarioResult", "StabilityReport",
    "beta_mirror", "classify_scenario", "effective_slope",
    "farebrother_report", "jacobian_at", "stability_region_grid",
    "AttractorClass", "AttractorKind", "BasinSlice", "OrbitConfig",
    "basin_slice", "bifurcation_1d", "bifurcation_2d", "classify_attractor",
    "lyapunov_largest", "simulate",
    "NoiseConfig", "ReturnsSeries", "autocorrelation", "kurtosis",
    "kurtosis_grid", "log_returns", "simulate_stochastic",
]
