"""Core evaluation of the three-dimensional economy map.

The state is (Y, P, Z): national income, asset price, and lagged income
(Z_t = Y_{t-1}).  One iteration updates

    Y' = A + c*Y + gamma * g_I(Y - Z) + omega*h*P
    P' = P + sigma * g_P(mu * ((1-omega)*F* + omega*d*Y - P + b*(2*alpha - 1)))
    Z' = Y

where alpha is the fraction of optimistic fundamentalists, determined by a
logit comparison of the two groups' squared forecasting errors, and g_I, g_P
are bounded piecewise-tanh adjustment functions with unit slope at zero.

Everything here is a pure function of immutable values; the numerical
analysis layers (equilibria, stability, dynamics, stochastic) build on these
primitives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

from .errors import NonFinite

__all__ = [
    "SigmoidSpec",
    "ModelParams",
    "State",
    "sigmoid_eval",
    "sigmoid_deriv",
    "optimist_fraction",
    "squared_errors",
    "excess_demand",
    "fundamental_value",
    "step",
    "noisy_step",
]


@dataclass(frozen=True)
class SigmoidSpec:
    """Bounds of one bounded adjustment function: a1 caps gains, a2 caps losses."""

    a1: float
    a2: float

    def __post_init__(self) -> None:
        if not (self.a1 > 0 and self.a2 > 0):
            raise ValueError(f"sigmoid bounds must be positive, got a1={self.a1}, a2={self.a2}")


@dataclass(frozen=True)
class ModelParams:
    """All structural, behavioral and interaction parameters of the economy.

    A       : sum of the autonomous expenditure components (currency units)
    c       : marginal propensity to consume, in (0, 1)
    gamma   : accelerator strength, > 0
    omega   : degree of interaction between the two markets, in [0, 1]
    h       : propensity to invest out of stock wealth, > 0
    sigma   : market-maker price reactivity, > 0
    mu      : agents' demand reactivity, > 0
    F_star  : exogenous fundamental value, > 0 (currency units)
    d       : income-to-fundamental linkage, > 0
    b       : optimism/pessimism bias, > 0 (currency units)
    beta    : intensity of choice, >= 0 (1/currency^2); beta = 0 freezes the
              fractions at one half
    sig_I   : bounds of the investment adjustment function
    sig_P   : bounds of the price adjustment function
    """

    A: float
    c: float
    gamma: float
    omega: float
    h: float
    sigma: float
    mu: float
    F_star: float
    d: float
    b: float
    beta: float
    sig_I: SigmoidSpec
    sig_P: SigmoidSpec

    def __post_init__(self) -> None:
        if not (0.0 < self.c < 1.0):
            raise ValueError(f"c must lie in (0, 1), got {self.c}")
        if not (0.0 <= self.omega <= 1.0):
            raise ValueError(f"omega must lie in [0, 1], got {self.omega}")
        for name in ("gamma", "h", "sigma", "mu", "F_star", "d", "b"):
            v = getattr(self, name)
            if not v > 0.0:
                raise ValueError(f"{name} must be strictly positive, got {v}")
        if not self.beta >= 0.0:
            raise ValueError(f"beta must be non-negative, got {self.beta}")
        if not self.A > 0.0:
            raise ValueError(f"A must be strictly positive, got {self.A}")

    @property
    def well_posed(self) -> bool:
        """True when 1 - c - h*d > 0, which keeps the steady state defined for every omega."""
        return 1.0 - self.c - self.h * self.d > 0.0

    def with_bounds(self, sig_I: SigmoidSpec, sig_P: SigmoidSpec) -> "ModelParams":
        return replace(self, sig_I=sig_I, sig_P=sig_P)


class State(NamedTuple):
    """One point (Y, P, Z) of the phase space; Z carries last period's income."""

    Y: float
    P: float
    Z: float


def sigmoid_eval(spec: SigmoidSpec, z: float) -> float:
    """Bounded adjustment: a1*tanh(z/a1) for z >= 0, a2*tanh(z/a2) for z < 0.

    The seam at z = 0 belongs to the upper branch; both branches agree there
    in value and first two derivatives, so the choice only pins down tests.
    """
    a = spec.a1 if z >= 0.0 else spec.a2
    return a * math.tanh(z / a)


def sigmoid_deriv(spec: SigmoidSpec, z: float) -> float:
    """Derivative of sigmoid_eval: sech^2(z/a) on each branch, equal to 1 at z = 0."""
    a = spec.a1 if z >= 0.0 else spec.a2
    t = math.tanh(z / a)
    return 1.0 - t * t


def _logistic(x: float) -> float:
    # Exponent-sign split keeps exp() from overflowing for any finite x.
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    t = math.exp(x)
    return t / (1.0 + t)


def fundamental_value(params: ModelParams, Y: float) -> float:
    """True (unobserved) fundamental: (1-omega)*F* + omega*d*Y."""
    return (1.0 - params.omega) * params.F_star + params.omega * params.d * Y


def optimist_fraction(params: ModelParams, P: float, Y: float) -> float:
    """Share of optimists next period, 1/(1 + exp(-4*b*beta*(P - fundamental))).

    Saturates cleanly to 0 or 1 for large exponents; beta = 0 gives 1/2.
    """
    x = 4.0 * params.b * params.beta * (P - fundamental_value(params, Y))
    return _logistic(x)


def squared_errors(params: ModelParams, P_prev: float, F_true_prev: float) -> tuple[float, float]:
    """Squared forecasting errors (optimists, pessimists) against last price."""
    e_o = F_true_prev + params.b - P_prev
    e_p = F_true_prev - params.b - P_prev
    return e_o * e_o, e_p * e_p


def excess_demand(params: ModelParams, P: float, Y: float, alpha: float) -> float:
    """Aggregate excess demand mu*((1-omega)*F* + omega*d*Y - P + b*(2*alpha - 1))."""
    return params.mu * (fundamental_value(params, Y) - P + params.b * (2.0 * alpha - 1.0))


def noisy_step(params: ModelParams, s: State, shock: float) -> State:
    """One map iteration with an additive shock inside the price adjustment.

    The shock perturbs the aggregate excess demand, i.e. the argument of g_P;
    the income and lag updates are untouched.  shock = 0 reproduces step()
    bitwise.
    """
    alpha = optimist_fraction(params, s.P, s.Y)
    ed = excess_demand(params, s.P, s.Y, alpha) + shock
    y1 = (
        params.A
        + params.c * s.Y
        + params.gamma * sigmoid_eval(params.sig_I, s.Y - s.Z)
        + params.omega * params.h * s.P
    )
    p1 = s.P + params.sigma * sigmoid_eval(params.sig_P, ed)
    out = State(y1, p1, s.Y)
    if not (math.isfinite(y1) and math.isfinite(p1)):
        raise NonFinite(f"map produced a non-finite state from {s}: {out}")
    return out


def step(params: ModelParams, s: State) -> State:
    """One application of the deterministic map G."""
    return noisy_step(params, s, 0.0)
