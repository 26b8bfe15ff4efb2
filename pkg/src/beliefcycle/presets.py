"""Named run configurations for the reference experiments.

set1/set2/set3 bundle the three simulation parameter families (they differ
only in the price reactivity and the accelerator); fig1..fig9 reproduce the
corresponding reference figures and are bound to one subcommand each.
Values the sources leave unstated (grid resolutions, axis ranges, panel
variants) are chosen to make the qualitative structure visible and can be
overridden per run.
"""

from __future__ import annotations

from typing import Optional

__all__ = ["PRESETS", "preset_names", "get_preset"]

# Shared parameter family of the simulation sections: F* = A = 15,
# c = d = h = 0.38, b = 0.5, mu = 1; sigma and gamma vary by set.
_SIM_BASE = {
    "params.A": 15.0,
    "params.F_star": 15.0,
    "params.c": 0.38,
    "params.d": 0.38,
    "params.h": 0.38,
    "params.b": 0.5,
    "params.mu": 1.0,
}

_SET1 = dict(_SIM_BASE, **{"params.sigma": 3.0, "params.gamma": 0.8})
_SET2 = dict(_SIM_BASE, **{"params.sigma": 1.3, "params.gamma": 1.05})
_SET3 = dict(_SIM_BASE, **{"params.sigma": 4.0, "params.gamma": 1.05})

# Comparative-statics family: c = d = h = 0.5, A = F* = 10.
_CS_BASE = {
    "params.A": 10.0,
    "params.F_star": 10.0,
    "params.c": 0.5,
    "params.d": 0.5,
    "params.h": 0.5,
    "params.sigma": 1.0,
    "params.gamma": 0.5,
    "params.mu": 1.0,
}


def _p(command: Optional[str], *parts: dict) -> dict:
    values: dict = {}
    for part in parts:
        values.update(part)
    return {"command": command, "values": values}


PRESETS: dict[str, dict] = {
    # Parameter-only bundles, usable with any subcommand.
    "set1": _p(None, _SET1),
    "set2": _p(None, _SET2),
    "set3": _p(None, _SET3),

    # Steady-state comparative statics: income levels against beta and b.
    "fig1": _p("steady", _CS_BASE, {
        "params.omega": 1.0, "params.b": 0.5, "params.beta": 2.0,
        "sweep.axis": "beta", "sweep.lo": 0.0, "sweep.hi": 10.0, "sweep.n": 401,
    }),
    "fig1b": _p("steady", _CS_BASE, {
        "params.omega": 1.0, "params.beta": 1.0, "params.b": 1.0,
        "sweep.axis": "b", "sweep.lo": 0.05, "sweep.hi": 4.0, "sweep.n": 400,
    }),

    # Steady-state prices against the interaction degree, three fundamental
    # levels covering the increasing / unimodal / decreasing shapes.
    "fig2": _p("steady", _CS_BASE, {
        "params.F_star": 8.0, "params.omega": 0.5, "params.b": 1.0, "params.beta": 1.0,
        "sweep.axis": "omega", "sweep.lo": 0.0, "sweep.hi": 1.0, "sweep.n": 201,
    }),
    "fig2b": _p("steady", _CS_BASE, {
        "params.F_star": 12.0, "params.omega": 0.5, "params.b": 1.0, "params.beta": 1.0,
        "sweep.axis": "omega", "sweep.lo": 0.0, "sweep.hi": 1.0, "sweep.n": 201,
    }),
    "fig2c": _p("steady", _CS_BASE, {
        "params.F_star": 20.0, "params.omega": 0.5, "params.b": 1.0, "params.beta": 1.0,
        "sweep.axis": "omega", "sweep.lo": 0.0, "sweep.hi": 1.0, "sweep.n": 201,
    }),

    # Stability regions in the (beta, omega) plane for the three families.
    "fig3": _p("region", _SET1, {
        "params.omega": 0.5, "params.beta": 1.0,
        "region.beta_lo": 0.01, "region.beta_hi": 5.0, "region.beta_n": 251,
        "region.omega_lo": 0.0, "region.omega_hi": 1.0, "region.omega_n": 101,
    }),
    "fig3b": _p("region", _SET2, {
        "params.omega": 0.5, "params.beta": 1.0,
        "region.beta_lo": 0.01, "region.beta_hi": 5.0, "region.beta_n": 251,
        "region.omega_lo": 0.0, "region.omega_hi": 1.0, "region.omega_n": 101,
    }),
    "fig3c": _p("region", _SET3, {
        "params.omega": 0.5, "params.beta": 1.0,
        "region.beta_lo": 0.01, "region.beta_hi": 5.0, "region.beta_n": 251,
        "region.omega_lo": 0.0, "region.omega_hi": 1.0, "region.omega_n": 101,
    }),

    # Two-parameter bifurcation diagram and the three follow-the-attractor
    # one-dimensional diagrams at full market integration.
    "fig4": _p("bifurcate", _SET1, {
        "params.omega": 0.5, "params.beta": 1.0,
        "bif.mode": "2d", "bif.initial": "plus",
        "bif.beta_lo": 0.01, "bif.beta_hi": 5.0, "bif.beta_n": 201,
        "bif.omega_lo": 0.0, "bif.omega_hi": 1.0, "bif.omega_n": 101,
    }),
    "fig4b-blue": _p("bifurcate", _SET1, {
        "params.omega": 1.0, "params.beta": 0.0,
        "bif.mode": "1d", "bif.axis": "beta", "bif.seeding": "follow",
        "bif.initial": "plus", "bif.lo": 0.0, "bif.hi": 1.17, "bif.n": 400,
    }),
    "fig4b-red": _p("bifurcate", _SET1, {
        "params.omega": 1.0, "params.beta": 5.0,
        "bif.mode": "1d", "bif.axis": "beta", "bif.seeding": "follow",
        "bif.initial": "plus", "bif.lo": 5.0, "bif.hi": 0.73, "bif.n": 600,
    }),
    "fig4b-black": _p("bifurcate", _SET1, {
        "params.omega": 1.0, "params.beta": 5.0,
        "bif.mode": "1d", "bif.axis": "beta", "bif.seeding": "follow",
        "bif.initial": "minus", "bif.lo": 5.0, "bif.hi": 0.73, "bif.n": 600,
    }),

    # Basin slices on the Y = Z plane for growing intensity of choice.
    # Panel betas: coexistence of the unbiased state with a 2-cycle (a, b),
    # the biased pair (c), the twin 2-cycles after their flip (d), and the
    # chaotic stage (e, f).
    "fig5a": _p("basin", _SET1, {
        "params.omega": 1.0, "params.beta": 0.75, "basin.n": 512,
    }),
    "fig5b": _p("basin", _SET1, {
        "params.omega": 1.0, "params.beta": 1.0, "basin.n": 512,
    }),
    "fig5": _p("basin", _SET1, {
        "params.omega": 1.0, "params.beta": 2.5, "basin.n": 512,
    }),
    "fig5d": _p("basin", _SET1, {
        "params.omega": 1.0, "params.beta": 3.3, "basin.n": 512,
    }),
    "fig5e": _p("basin", _SET1, {
        "params.omega": 1.0, "params.beta": 4.2, "basin.n": 512,
    }),
    "fig5f": _p("basin", _SET1, {
        "params.omega": 1.0, "params.beta": 4.5, "basin.n": 512,
    }),

    "fig6": _p("bifurcate", _SET2, {
        "params.omega": 0.5, "params.beta": 1.0,
        "bif.mode": "2d", "bif.initial": "plus",
        "bif.beta_lo": 0.01, "bif.beta_hi": 6.0, "bif.beta_n": 201,
        "bif.omega_lo": 0.0, "bif.omega_hi": 1.0, "bif.omega_n": 101,
    }),
    "fig6b-blue": _p("bifurcate", _SET2, {
        "params.omega": 0.575, "params.beta": 0.0,
        "bif.mode": "1d", "bif.axis": "beta", "bif.seeding": "follow",
        "bif.initial": "plus", "bif.lo": 0.0, "bif.hi": 6.0, "bif.n": 600,
    }),
    "fig6b-red": _p("bifurcate", _SET2, {
        "params.omega": 0.575, "params.beta": 6.0,
        "bif.mode": "1d", "bif.axis": "beta", "bif.seeding": "follow",
        "bif.initial": "plus", "bif.lo": 6.0, "bif.hi": 0.0, "bif.n": 600,
    }),
    "fig6b-black": _p("bifurcate", _SET2, {
        "params.omega": 0.575, "params.beta": 6.0,
        "bif.mode": "1d", "bif.axis": "beta", "bif.seeding": "follow",
        "bif.initial": "minus", "bif.lo": 6.0, "bif.hi": 0.0, "bif.n": 600,
    }),

    "fig7": _p("bifurcate", _SET3, {
        "params.omega": 0.5, "params.beta": 1.0,
        "bif.mode": "2d", "bif.initial": "plus",
        "bif.beta_lo": 0.01, "bif.beta_hi": 3.3, "bif.beta_n": 201,
        "bif.omega_lo": 0.0, "bif.omega_hi": 1.0, "bif.omega_n": 101,
    }),
    "fig7b-blue": _p("bifurcate", _SET3, {
        "params.omega": 0.8, "params.beta": 1.5,
        "bif.mode": "1d", "bif.axis": "beta", "bif.seeding": "follow",
        "bif.initial": "plus", "bif.lo": 1.5, "bif.hi": 2.65, "bif.n": 400,
    }),
    "fig7b-red": _p("bifurcate", _SET3, {
        "params.omega": 0.8, "params.beta": 3.3,
        "bif.mode": "1d", "bif.axis": "beta", "bif.seeding": "follow",
        "bif.initial": "plus", "bif.lo": 3.3, "bif.hi": 0.855, "bif.n": 600,
    }),
    "fig7b-black": _p("bifurcate", _SET3, {
        "params.omega": 0.8, "params.beta": 3.3,
        "bif.mode": "1d", "bif.axis": "beta", "bif.seeding": "follow",
        "bif.initial": "minus", "bif.lo": 3.3, "bif.hi": 0.855, "bif.n": 600,
    }),
    "fig7b-magenta": _p("bifurcate", _SET3, {
        "params.omega": 0.8, "params.beta": 0.0,
        "bif.mode": "1d", "bif.axis": "beta", "bif.seeding": "follow",
        "bif.initial": "plus", "bif.lo": 0.0, "bif.hi": 3.3, "bif.n": 600,
    }),

    # Kurtosis of log-returns over the (beta, omega) plane.
    "fig8": _p("stochastic", _SET1, {
        "params.omega": 0.5, "params.beta": 1.0,
        "stoch.mode": "kurtosis-grid",
        "stoch.beta_lo": 0.0, "stoch.beta_hi": 6.0, "stoch.beta_n": 31,
        "stoch.omega_lo": 0.0, "stoch.omega_hi": 1.0, "stoch.omega_n": 11,
        "stoch.length": 200_000, "stoch.burn_in": 10_000,
    }),

    # Autocorrelation of absolute returns at beta = 6 (volatility clustering).
    "fig9": _p("stochastic", _SET1, {
        "params.omega": 1.0, "params.beta": 6.0,
        "stoch.mode": "acf", "stoch.absolute": True, "stoch.max_lag": 50,
        "stoch.initial": "plus",
        "stoch.length": 200_000, "stoch.burn_in": 10_000,
    }),
    "fig9-w0": _p("stochastic", _SET1, {
        "params.omega": 0.0, "params.beta": 6.0,
        "stoch.mode": "acf", "stoch.absolute": True, "stoch.max_lag": 50,
        "stoch.initial": "plus",
        "stoch.length": 200_000, "stoch.burn_in": 10_000,
    }),
}


def preset_names() -> list[str]:
    return sorted(PRESETS)


def get_preset(name: str) -> dict:
    try:
        return PRESETS[name]
    except KeyError:
        raise KeyError(
            f"unknown preset {name!r}; available: {', '.join(preset_names())}"
        ) from None
