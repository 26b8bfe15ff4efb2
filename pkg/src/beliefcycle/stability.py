"""Local stability analysis at the steady states.

At any steady state the Jacobian of the map reduces to

    [[c + gamma, omega*h, -gamma],
     [omega*d*E, 1 - E,    0    ],
     [1,         0,        0    ]]

where the effective slope E is mu*sigma*(1 - 2*b^2*beta) at the unbiased
state and mu*sigma*(1 + 2*beta*(W^2 - b^2)) at the biased ones (W is the
price deviation variable; the two biased states share the same E by
symmetry).  Stability is decided by four polynomial inequalities on the
characteristic-cubic coefficients (the Farebrother conditions), with the
eigenvalues computed independently from the cubic as a cross-check and for
reporting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Optional

import numpy as np
from scipy.optimize import brentq

from .errors import NotASteadyState, OutOfDomain, TargetAbsent
from .equilibria import (
    StateLabel,
    SteadyState,
    biased_steady_states,
    unbiased_steady_state,
)
from .model import ModelParams, step

__all__ = [
    "JacobianEval",
    "StabilityReport",
    "ScenarioKind",
    "ScenarioResult",
    "RegionCell",
    "effective_slope",
    "jacobian_at",
    "characteristic_coefficients",
    "solve_cubic",
    "farebrother_report",
    "classify_scenario",
    "stability_region_grid",
    "beta_mirror",
]

RESIDUAL_TOL = 1e-6
AXIS_BISECT_TOL = 1e-6


def _check_steady(params: ModelParams, state: SteadyState) -> None:
    s = state.state
    nxt = step(params, s)
    residual = max(abs(nxt[i] - s[i]) for i in range(3))
    if residual > RESIDUAL_TOL:
        raise NotASteadyState(
            f"fixed-point residual {residual:.3e} exceeds {RESIDUAL_TOL} at {state}"
        )


def effective_slope(params: ModelParams, state: SteadyState) -> tuple[float, float]:
    """(E_eff, W) at a residual-checked steady state.

    W is the scaled price deviation from P*; it vanishes at the unbiased
    state, where E_eff reduces to mu*sigma*(1 - 2*b^2*beta).
    """
    _check_steady(params, state)
    if state.label is StateLabel.UNBIASED:
        w_dev = 0.0
    else:
        star = unbiased_steady_state(params)
        D = 1.0 - params.c - params.omega**2 * params.d * params.h
        w_dev = D / (1.0 - params.c) * (state.P - star.P)
    e_eff = params.mu * params.sigma * (1.0 + 2.0 * params.beta * (w_dev**2 - params.b**2))
    return e_eff, w_dev


@dataclass(frozen=True)
class JacobianEval:
    matrix: np.ndarray
    E_eff: float
    W: float
    at: StateLabel


def jacobian_at(params: ModelParams, state: SteadyState) -> JacobianEval:
    """Analytic 3x3 Jacobian of the map at a steady state."""
    e_eff, w_dev = effective_slope(params, state)
    c, gam, w, h, d = params.c, params.gamma, params.omega, params.h, params.d
    matrix = np.array(
        [
            [c + gam, w * h, -gam],
            [w * d * e_eff, 1.0 - e_eff, 0.0],
            [1.0, 0.0, 0.0],
        ]
    )
    return JacobianEval(matrix, e_eff, w_dev, state.label)


def characteristic_coefficients(params: ModelParams, e_eff: float) -> tuple[float, float, float]:
    """(C1, C2, C3) of lambda^3 + C1*lambda^2 + C2*lambda + C3."""
    c, gam = params.c, params.gamma
    dh_w2 = params.omega**2 * params.d * params.h
    c1 = -c - gam - 1.0 + e_eff
    c2 = 2.0 * gam + c - c * e_eff - gam * e_eff - dh_w2 * e_eff
    c3 = gam * (e_eff - 1.0)
    return c1, c2, c3


def solve_cubic(c1: float, c2: float, c3: float) -> tuple[complex, complex, complex]:
    """Roots of the monic real cubic lambda^3 + c1*lambda^2 + c2*lambda + c3.

    Closed-form solve on the depressed cubic (trigonometric branch for three
    real roots, cancellation-safe Cardano otherwise), then one Newton polish
    per root.
    """
    shift = c1 / 3.0
    p = c2 - c1 * c1 / 3.0
    q = 2.0 * c1**3 / 27.0 - c1 * c2 / 3.0 + c3
    disc = 0.25 * q * q + p**3 / 27.0

    if disc > 0.0:
        s = math.sqrt(disc)
        big = -q / 2.0 - math.copysign(s, q)  # larger-magnitude Cardano term, no cancellation
        u = math.copysign(abs(big) ** (1.0 / 3.0), big)
        v = 0.0 if u == 0.0 else -p / (3.0 * u)
        t_real = u + v
        re = -t_real / 2.0
        im = math.sqrt(3.0) / 2.0 * abs(u - v)
        roots = [complex(t_real, 0.0), complex(re, im), complex(re, -im)]
    else:
        m = 2.0 * math.sqrt(max(-p / 3.0, 0.0))
        if m == 0.0:
            roots = [0j, 0j, 0j]
        else:
            arg = max(-1.0, min(1.0, -4.0 * q / m**3))
            phi = math.acos(arg) / 3.0
            roots = [complex(m * math.cos(phi + 2.0 * math.pi * k / 3.0), 0.0) for k in range(3)]

    polished = []
    for t in roots:
        lam = t - shift
        f = ((lam + c1) * lam + c2) * lam + c3
        fp = (3.0 * lam + 2.0 * c1) * lam + c2
        if abs(fp) > 1e-30:
            lam = lam - f / fp
        polished.append(lam)
    # Keep the complex pair an exact conjugate pair after polishing.
    if polished[1].imag != 0.0:
        polished[2] = polished[1].conjugate()
    return tuple(polished)


@dataclass(frozen=True)
class StabilityReport:
    at: StateLabel
    E_eff: float
    W: float
    coeffs: tuple[float, float, float]
    farebrother: tuple[bool, bool, bool, bool]
    margins: tuple[float, float, float, float]
    stable: bool
    eigenvalues: tuple[complex, complex, complex]
    spectral_radius: float


def farebrother_report(params: ModelParams, state: SteadyState) -> StabilityReport:
    """Characteristic coefficients, the four stability inequalities, and eigenvalues.

    The four margins are 1+C1+C2+C3, 1-C1+C2-C3, 1-C2+C1*C3-C3^2 and 3-C2;
    the steady state is locally asymptotically stable iff all are positive.
    The first margin equals E_eff*(1-c-omega^2*d*h), so its sign is the sign
    of E_eff; at the unbiased state that is the pitchfork condition
    2*b^2*beta < 1.
    """
    e_eff, w_dev = effective_slope(params, state)
    c1, c2, c3 = characteristic_coefficients(params, e_eff)
    margins = (
        1.0 + c1 + c2 + c3,
        1.0 - c1 + c2 - c3,
        1.0 - c2 + c1 * c3 - c3 * c3,
        3.0 - c2,
    )
    conditions = tuple(m > 0.0 for m in margins)
    eigenvalues = solve_cubic(c1, c2, c3)
    return StabilityReport(
        at=state.label,
        E_eff=e_eff,
        W=w_dev,
        coeffs=(c1, c2, c3),
        farebrother=conditions,
        margins=margins,
        stable=all(conditions),
        eigenvalues=eigenvalues,
        spectral_radius=max(abs(lam) for lam in eigenvalues),
    )


class ScenarioKind(str, Enum):
    UNCONDITIONALLY_STABLE = "UNCONDITIONALLY_STABLE"
    UNCONDITIONALLY_UNSTABLE = "UNCONDITIONALLY_UNSTABLE"
    STABILIZING = "STABILIZING"
    DESTABILIZING = "DESTABILIZING"
    MIXED = "MIXED"
    # Umbrella term for a verdict that does not depend on the parameter at
    # all; the classifier reports the specific unconditional label instead.
    NEUTRAL = "NEUTRAL"


@dataclass(frozen=True)
class ScenarioResult:
    kind: ScenarioKind
    thresholds: tuple[float, ...]
    axis: str
    target: StateLabel
    lo: float
    hi: float

    @property
    def neutral(self) -> bool:
        """True when the verdict is constant along the scanned axis."""
        return self.kind in (
            ScenarioKind.UNCONDITIONALLY_STABLE,
            ScenarioKind.UNCONDITIONALLY_UNSTABLE,
        )


def _stable_at(params: ModelParams, axis: str, x: float, target: StateLabel) -> Optional[bool]:
    p = replace(params, **{axis: float(x)})
    if target is StateLabel.UNBIASED:
        return farebrother_report(p, unbiased_steady_state(p)).stable
    sset = biased_steady_states(p)
    state = sset.high if target is StateLabel.HIGH else sset.low
    if state is None:
        return None
    return farebrother_report(p, state).stable


def classify_scenario(
    params: ModelParams,
    axis: str,
    lo: float,
    hi: float,
    target: StateLabel = StateLabel.UNBIASED,
    n_scan: int = 801,
) -> ScenarioResult:
    """Stability profile of one steady state along beta or omega.

    Scans n_scan points on [lo, hi], bisects every verdict flip to 1e-6 axis
    precision and maps the profile onto the scenario taxonomy.  Grid points
    where a biased target does not exist are skipped; if it exists nowhere,
    TargetAbsent is raised.
    """
    if axis not in ("beta", "omega"):
        raise ValueError(f"axis must be beta or omega, got {axis!r}")
    if not hi > lo:
        raise ValueError(f"empty axis range [{lo}, {hi}]")
    xs = np.linspace(lo, hi, n_scan)
    verdicts = [_stable_at(params, axis, x, target) for x in xs]
    existing = [(x, v) for x, v in zip(xs, verdicts) if v is not None]
    if not existing:
        raise TargetAbsent(f"{target.value} state exists nowhere on {axis} in [{lo}, {hi}]")

    thresholds = []
    profile = [existing[0][1]]
    for (x0, v0), (x1, v1) in zip(existing, existing[1:]):
        if v0 == v1:
            continue
        a, b = x0, x1
        while b - a > AXIS_BISECT_TOL:
            mid = 0.5 * (a + b)
            v_mid = _stable_at(params, axis, mid, target)
            if v_mid is None or v_mid == v0:
                a = mid
            else:
                b = mid
        thresholds.append(float(0.5 * (a + b)))
        profile.append(v1)

    if len(profile) == 1:
        kind = (
            ScenarioKind.UNCONDITIONALLY_STABLE
            if profile[0]
            else ScenarioKind.UNCONDITIONALLY_UNSTABLE
        )
    elif len(profile) == 2:
        kind = ScenarioKind.DESTABILIZING if profile[0] else ScenarioKind.STABILIZING
    elif len(profile) == 3 and profile == [False, True, False]:
        kind = ScenarioKind.MIXED
    else:
        raise ValueError(
            f"stability profile {profile} along {axis} is not a single interval; "
            "refine n_scan or narrow the range"
        )
    return ScenarioResult(kind, tuple(thresholds), axis, target, float(lo), float(hi))


@dataclass(frozen=True)
class RegionCell:
    beta: float
    omega: float
    star_stable: bool
    biased_exists: bool
    high_stable: Optional[bool]
    margin_min: float
    flags: tuple[str, ...] = ()


def stability_region_grid(
    params: ModelParams,
    beta_range: tuple[float, float],
    omega_range: tuple[float, float],
    resolution: tuple[int, int],
) -> list[RegionCell]:
    """Per-cell stability verdicts on a (beta, omega) grid, beta-major order.

    Each cell reports the unbiased state's verdict and smallest signed
    Farebrother margin, plus the high state's verdict where the pitchfork is
    active.  Threshold curves are recoverable as verdict boundaries.
    """
    nb, nw = resolution
    if nb < 2 or nw < 2:
        raise ValueError(f"resolution must be >= 2 per axis, got {resolution}")
    betas = np.linspace(beta_range[0], beta_range[1], nb)
    omegas = np.linspace(omega_range[0], omega_range[1], nw)
    cells = []
    for beta in betas:
        for omega in omegas:
            p = replace(params, beta=float(beta), omega=float(omega))
            flags: tuple[str, ...] = ()
            try:
                star_report = farebrother_report(p, unbiased_steady_state(p))
                high_stable = None
                sset = biased_steady_states(p)
                if sset.pitchfork_active:
                    high_stable = farebrother_report(p, sset.high).stable
                cells.append(
                    RegionCell(
                        float(beta),
                        float(omega),
                        star_report.stable,
                        sset.pitchfork_active,
                        high_stable,
                        min(star_report.margins),
                        sset.flags,
                    )
                )
            except Exception as exc:  # per-cell failures annotate, never abort
                cells.append(
                    RegionCell(float(beta), float(omega), False, False, None, float("nan"),
                               (f"error:{type(exc).__name__}",))
                )
    return cells


def _mirror_h(z: float) -> float:
    # h(z) = ln((1+z)/(1-z)) * (1-z^2) / (4z), strictly decreasing from 1/2 to 0 on (0,1).
    log_ratio = math.log1p(z) - math.log1p(-z)
    return log_ratio * (1.0 - z * z) / (4.0 * z)


def beta_mirror(params: ModelParams, beta: float) -> float:
    """The intensity of choice beta^H > 1/(2b^2) whose high steady state shares
    the eigenvalues of the unbiased state at the given beta < 1/(2b^2).

    Solves h(z) = beta*b^2 on z in (0, 1), recovers the deviation W^H = b*z
    and returns beta^H = ln((b+W^H)/(b-W^H)) / (4*b*W^H).  Strictly decreasing
    in beta, with beta^H -> 1/(2b^2) as beta -> 1/(2b^2) from below.
    """
    b = params.b
    cap = 1.0 / (2.0 * b * b)
    if not (0.0 < beta < cap):
        raise OutOfDomain(f"beta must lie in (0, {cap}), got {beta}")
    target = beta * b * b
    z = brentq(lambda v: _mirror_h(v) - target, 1e-15, 1.0 - 1e-15, xtol=1e-15, rtol=8.9e-16)
    w_high = b * z
    return (math.log1p(z) - math.log1p(-z)) / (4.0 * b * w_high)
