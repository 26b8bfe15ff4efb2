"""Steady states of the map: the unbiased one in closed form, the biased pair by root-finding.

A unique steady state S* exists for every admissible parameter set.  When the
bias and the intensity of choice are jointly strong enough (2*beta*b^2 > 1) a
symmetric pair of biased steady states S^L < S* < S^H appears.  Their prices
solve an implicit scalar equation; it is convenient to write it in the
deviation variable

    W = (1 - c - omega^2*d*h)/(1 - c) * (P - P*)

for which the equation reads  W + b = 2b / (1 + exp(-4*b*beta*W)).  W = 0 is
always a root (that is S*); the biased roots live in (-b, 0) and (0, b) and
are hunted by safeguarded bracketed root-finding on the corresponding price
intervals.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from enum import Enum
from typing import Iterable, Optional

from scipy.optimize import brentq

from .errors import IllPosed, RootNotBracketed
from .model import ModelParams, SigmoidSpec, State, _logistic

__all__ = [
    "StateLabel",
    "SteadyState",
    "BiasedBounds",
    "SteadyStateSet",
    "SweepRow",
    "unbiased_steady_state",
    "pitchfork_condition",
    "biased_bounds",
    "biased_steady_states",
    "sweep_steady_states",
    "reference_bounds",
    "with_reference_bounds",
]

# Below this margin on 2*beta*b^2 - 1 the biased roots are numerically
# indistinguishable from P*; they are reported absent instead.
NEAR_BIFURCATION_MARGIN = 1e-8

# Offset excluding the known root at P* from the search brackets.
_BRACKET_EPS = 1e-9


class StateLabel(str, Enum):
    UNBIASED = "UNBIASED"
    LOW = "LOW"
    HIGH = "HIGH"


@dataclass(frozen=True)
class SteadyState:
    Y: float
    P: float
    Z: float
    label: StateLabel

    @property
    def state(self) -> State:
        return State(self.Y, self.P, self.Z)


@dataclass(frozen=True)
class BiasedBounds:
    """Closed-form enclosure of the biased pair: P_lo < P^L < P* < P^H < P_hi."""

    P_lo: float
    P_hi: float
    Y_lo: float
    Y_hi: float


@dataclass(frozen=True)
class SteadyStateSet:
    star: SteadyState
    low: Optional[SteadyState]
    high: Optional[SteadyState]
    bounds: BiasedBounds
    pitchfork_active: bool
    flags: tuple[str, ...] = ()

    def __iter__(self):
        if self.low is not None:
            yield self.low
        yield self.star
        if self.high is not None:
            yield self.high


def _denominator(params: ModelParams) -> float:
    return 1.0 - params.c - params.omega**2 * params.d * params.h


def unbiased_steady_state(params: ModelParams) -> SteadyState:
    """Closed-form S*; independent of b and beta."""
    D = _denominator(params)
    if D <= 0.0:
        raise IllPosed(f"1 - c - omega^2*d*h = {D} <= 0; steady state undefined")
    w, c = params.omega, params.c
    y = (params.A + w * (1.0 - w) * params.h * params.F_star) / D
    p = ((1.0 - w) * (1.0 - c) * params.F_star + w * params.d * params.A) / D
    return SteadyState(y, p, y, StateLabel.UNBIASED)


def pitchfork_condition(params: ModelParams) -> bool:
    """True iff the biased pair exists, i.e. b > 1/sqrt(2*beta).

    Equality keeps the steady state unique; beta = 0 always returns False.
    """
    return params.beta > 0.0 and 2.0 * params.beta * params.b**2 > 1.0


def biased_bounds(params: ModelParams) -> BiasedBounds:
    star = unbiased_steady_state(params)
    D = _denominator(params)
    dp = (1.0 - params.c) / D * params.b
    dy = params.h * params.omega / D * params.b
    return BiasedBounds(star.P - dp, star.P + dp, star.Y - dy, star.Y + dy)


def _income_from_price(params: ModelParams, P: float) -> float:
    # Y = (A + omega*h*P)/(1 - c), the income branch of the fixed-point system.
    return (params.A + params.omega * params.h * P) / (1.0 - params.c)


def _price_residual(params: ModelParams, P: float, P_star: float) -> float:
    # W + b - 2b*logistic(4*b*beta*W), the implicit steady-state equation.
    D = _denominator(params)
    w_dev = D / (1.0 - params.c) * (P - P_star)
    return w_dev + params.b - 2.0 * params.b * _logistic(4.0 * params.b * params.beta * w_dev)


def _solve_bracket(params: ModelParams, lo: float, hi: float, P_star: float) -> float:
    f_lo = _price_residual(params, lo, P_star)
    f_hi = _price_residual(params, hi, P_star)
    if f_lo == 0.0:
        return lo
    if f_hi == 0.0:
        return hi
    if f_lo * f_hi > 0.0:
        # For very large beta the logistic saturates and the residual at the
        # outer bound is rounding noise of arbitrary sign; an endpoint that
        # already beats the convergence tolerance by two orders is the root.
        noise_floor = 1e-13 * max(1.0, params.b)
        if min(abs(f_lo), abs(f_hi)) < noise_floor:
            return lo if abs(f_lo) <= abs(f_hi) else hi
        raise RootNotBracketed(
            f"no sign change on [{lo}, {hi}] (f = {f_lo}, {f_hi}); "
            "tolerance or parameter pathology"
        )
    root = brentq(
        lambda p: _price_residual(params, p, P_star), lo, hi, xtol=1e-12, rtol=8.9e-16
    )
    return float(root)


def _meaningful_bias(params: ModelParams) -> bool:
    # Positivity of the biased states holds when b < min(d*A/(1-c), F*).
    return params.b < min(params.d * params.A / (1.0 - params.c), params.F_star)


def biased_steady_states(params: ModelParams) -> SteadyStateSet:
    """S* plus, when the pitchfork is active, the biased pair by bracketed root-finding."""
    star = unbiased_steady_state(params)
    bounds = biased_bounds(params)
    if not pitchfork_condition(params):
        return SteadyStateSet(star, None, None, bounds, False)
    if 2.0 * params.beta * params.b**2 - 1.0 <= NEAR_BIFURCATION_MARGIN:
        return SteadyStateSet(star, None, None, bounds, False, ("near-bifurcation",))

    eps = _BRACKET_EPS * max(1.0, abs(star.P))
    p_low = _solve_bracket(params, bounds.P_lo, star.P - eps, star.P)
    p_high = _solve_bracket(params, star.P + eps, bounds.P_hi, star.P)

    flags: tuple[str, ...] = () if _meaningful_bias(params) else ("a2-violated",)
    y_low = _income_from_price(params, p_low)
    y_high = _income_from_price(params, p_high)
    low = SteadyState(y_low, p_low, y_low, StateLabel.LOW)
    high = SteadyState(y_high, p_high, y_high, StateLabel.HIGH)
    return SteadyStateSet(star, low, high, bounds, True, flags)


@dataclass(frozen=True)
class SweepRow:
    axis_value: float
    Y_L: Optional[float]
    Y_star: Optional[float]
    Y_H: Optional[float]
    P_L: Optional[float]
    P_star: Optional[float]
    P_H: Optional[float]
    flags: tuple[str, ...] = ()


def sweep_steady_states(
    params: ModelParams, axis: str, grid: Iterable[float]
) -> list[SweepRow]:
    """One SteadyStateSet per grid point along beta, b or omega.

    Absent biased states leave their cells empty; per-point failures are
    annotated in the row flags instead of aborting the sweep.
    """
    if axis not in ("beta", "b", "omega"):
        raise ValueError(f"axis must be one of beta, b, omega; got {axis!r}")
    rows = []
    for value in grid:
        try:
            sset = biased_steady_states(replace(params, **{axis: float(value)}))
        except (IllPosed, RootNotBracketed, ValueError) as exc:
            rows.append(
                SweepRow(float(value), None, None, None, None, None, None,
                         (f"error:{type(exc).__name__}",))
            )
            continue
        low, high = sset.low, sset.high
        rows.append(
            SweepRow(
                float(value),
                low.Y if low else None,
                sset.star.Y,
                high.Y if high else None,
                low.P if low else None,
                sset.star.P,
                high.P if high else None,
                sset.flags,
            )
        )
    return rows


def reference_bounds(params: ModelParams) -> tuple[SigmoidSpec, SigmoidSpec]:
    """Adjustment bounds scaled to the local unbiased steady state.

    Caps grow with the size of the economy: a1_I = 3*Y*(1-c)/A, a2_I = 2*a1_I,
    a1_P = 2*P*/F*, a2_P = 2*a1_P.  At omega = 0 this is (3, 6) and (2, 4).
    """
    star = unbiased_steady_state(params)
    a1_i = 3.0 * star.Y * (1.0 - params.c) / params.A
    a1_p = 2.0 * star.P / params.F_star
    return SigmoidSpec(a1_i, 2.0 * a1_i), SigmoidSpec(a1_p, 2.0 * a1_p)


def with_reference_bounds(params: ModelParams) -> ModelParams:
    sig_i, sig_p = reference_bounds(params)
    return params.with_bounds(sig_i, sig_p)
