"""Batch command-line front end.

Seven subcommands cover the full analysis surface: steady, stability,
region, bifurcate, basin, orbit, stochastic.  Options resolve in the order
defaults < preset < config file < command-line overrides; the fully
resolved configuration is embedded as a JSON comment in every output file,
and feeding that line back through --config reproduces the file byte for
byte.

Exit codes: 0 success, 2 configuration error, 3 model ill-posed,
4 numerical failure, 5 I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Optional

import numpy as np

from . import __version__, csvio
from .dynamics import (
    OrbitConfig,
    basin_slice,
    bifurcation_1d,
    bifurcation_2d,
    classify_attractor,
    lyapunov_largest,
    simulate,
)
from .equilibria import (
    StateLabel,
    biased_steady_states,
    sweep_steady_states,
    unbiased_steady_state,
    with_reference_bounds,
)
from .errors import BeliefCycleError, IllPosed
from .model import ModelParams, SigmoidSpec
from .presets import get_preset
from .stability import classify_scenario, farebrother_report, stability_region_grid
from .stochastic import NoiseConfig, autocorrelation, kurtosis_grid, log_returns, simulate_stochastic

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ILL_POSED = 3
EXIT_NUMERICAL = 4
EXIT_IO = 5


class ConfigError(Exception):
    pass


_PARAM_KEYS = {
    "params.A": float, "params.c": float, "params.gamma": float,
    "params.omega": float, "params.h": float, "params.sigma": float,
    "params.mu": float, "params.F_star": float, "params.d": float,
    "params.b": float, "params.beta": float,
    "params.a1_I": float, "params.a2_I": float,
    "params.a1_P": float, "params.a2_P": float,
}

_ORBIT_KEYS = {
    "orbit.transient": int, "orbit.sample": int,
    "orbit.cutoff": float, "orbit.match_tol": float,
}

_COMMAND_KEYS: dict[str, dict[str, type]] = {
    "steady": {
        "sweep.axis": str, "sweep.lo": float, "sweep.hi": float, "sweep.n": int,
    },
    "stability": {
        "target": str,
        "scenario.axis": str, "scenario.lo": float, "scenario.hi": float,
        "scenario.n": int,
    },
    "region": {
        "region.beta_lo": float, "region.beta_hi": float, "region.beta_n": int,
        "region.omega_lo": float, "region.omega_hi": float, "region.omega_n": int,
    },
    "bifurcate": {
        "bif.mode": str, "bif.axis": str, "bif.lo": float, "bif.hi": float,
        "bif.n": int, "bif.seeding": str, "bif.initial": str,
        "bif.beta_lo": float, "bif.beta_hi": float, "bif.beta_n": int,
        "bif.omega_lo": float, "bif.omega_hi": float, "bif.omega_n": int,
        **_ORBIT_KEYS,
    },
    "basin": {
        "basin.y_lo": float, "basin.y_hi": float,
        "basin.p_lo": float, "basin.p_hi": float,
        "basin.n": int, "basin.ny": int, "basin.np": int,
        **_ORBIT_KEYS,
    },
    "orbit": {
        "orbit.initial": str, "orbit.lyapunov_steps": int,
        **_ORBIT_KEYS,
    },
    "stochastic": {
        "stoch.mode": str, "stoch.initial": str, "stoch.s": float,
        "stoch.length": int, "stoch.burn_in": int,
        "stoch.max_lag": int, "stoch.absolute": bool,
        "stoch.beta_lo": float, "stoch.beta_hi": float, "stoch.beta_n": int,
        "stoch.omega_lo": float, "stoch.omega_hi": float, "stoch.omega_n": int,
    },
}

# Reference family defaults keep quick invocations meaningful.
_DEFAULTS = {
    "params.A": 15.0, "params.c": 0.38, "params.gamma": 0.8,
    "params.omega": 1.0, "params.h": 0.38, "params.sigma": 3.0,
    "params.mu": 1.0, "params.F_star": 15.0, "params.d": 0.38,
    "params.b": 0.5, "params.beta": 1.0,
    "seed": 0,
}

_BOUND_KEYS = ("params.a1_I", "params.a2_I", "params.a1_P", "params.a2_P")


def _known_keys(command: str) -> dict[str, type]:
    keys = dict(_PARAM_KEYS)
    keys["seed"] = int
    keys.update(_COMMAND_KEYS[command])
    return keys


def _coerce(key: str, value, target: type):
    if target is bool:
        if isinstance(value, bool):
            return value
        if isinstance(value, str):
            if value.lower() in ("1", "true", "yes"):
                return True
            if value.lower() in ("0", "false", "no"):
                return False
        raise ConfigError(f"{key}: expected a boolean, got {value!r}")
    if target is int:
        try:
            as_float = float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key}: expected an integer, got {value!r}") from None
        if as_float != int(as_float):
            raise ConfigError(f"{key}: expected an integer, got {value!r}")
        return int(as_float)
    if target is float:
        try:
            return float(value)
        except (TypeError, ValueError):
            raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    return str(value)


def _merge(command: str, layers: list[dict]) -> dict:
    known = _known_keys(command)
    resolved: dict = {}
    for layer in layers:
        for key, value in layer.items():
            if key == "command":
                continue
            if key not in known:
                raise ConfigError(f"unknown key {key!r} for command {command!r}")
            resolved[key] = _coerce(key, value, known[key])
    return resolved


def _resolve_params(cfg: dict) -> tuple[ModelParams, bool]:
    """(params, bounds_are_explicit); implicit bounds follow the steady-state scaling."""
    given = [k for k in _BOUND_KEYS if k in cfg]
    if given and len(given) != len(_BOUND_KEYS):
        raise ConfigError("give all four sigmoid bounds (a1_I, a2_I, a1_P, a2_P) or none")
    kwargs = {k.split(".", 1)[1]: cfg[k] for k in _PARAM_KEYS if k in cfg and k not in _BOUND_KEYS}
    try:
        if given:
            params = ModelParams(
                sig_I=SigmoidSpec(cfg["params.a1_I"], cfg["params.a2_I"]),
                sig_P=SigmoidSpec(cfg["params.a1_P"], cfg["params.a2_P"]),
                **kwargs,
            )
        else:
            placeholder = SigmoidSpec(1.0, 1.0)
            params = with_reference_bounds(
                ModelParams(sig_I=placeholder, sig_P=placeholder, **kwargs)
            )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return params, bool(given)


def _orbit_config(cfg: dict) -> OrbitConfig:
    try:
        return OrbitConfig(
            transient=cfg.get("orbit.transient", 10_000),
            sample=cfg.get("orbit.sample", 512),
            divergence_cutoff=cfg.get("orbit.cutoff", 1e9),
            match_tol=cfg.get("orbit.match_tol"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _require(cfg: dict, *keys: str) -> None:
    missing = [k for k in keys if k not in cfg]
    if missing:
        raise ConfigError(f"missing required key(s): {', '.join(missing)}")


def _header(command: str, cfg: dict) -> list[str]:
    embedded = dict(sorted(cfg.items()))
    embedded["command"] = command
    return csvio.format_header(__version__, embedded)


def _sidecar_path(out: str) -> str:
    root, ext = os.path.splitext(out)
    return root + ".catalog" + (ext or ".csv")


def _linspace(lo: float, hi: float, n: int) -> np.ndarray:
    if n < 1:
        raise ConfigError(f"grid size must be >= 1, got {n}")
    return np.linspace(lo, hi, n)


def _run_steady(cfg: dict, out: str, workers: int) -> None:
    params, _ = _resolve_params(cfg)
    header = _header("steady", cfg)
    if "sweep.axis" in cfg:
        _require(cfg, "sweep.lo", "sweep.hi", "sweep.n")
        axis = cfg["sweep.axis"]
        if axis not in ("beta", "b", "omega"):
            raise ConfigError(f"sweep.axis must be beta, b or omega, got {axis!r}")
        grid = _linspace(cfg["sweep.lo"], cfg["sweep.hi"], cfg["sweep.n"])
        rows = sweep_steady_states(params, axis, grid)
        csvio.write_sweep(out, rows, header)
    else:
        sset = biased_steady_states(params)
        csvio.write_steady_set(out, sset, header)


def _run_stability(cfg: dict, out: str, workers: int) -> None:
    params, _ = _resolve_params(cfg)
    header = _header("stability", cfg)
    target = StateLabel(cfg.get("target", "UNBIASED"))
    if "scenario.axis" in cfg:
        _require(cfg, "scenario.lo", "scenario.hi")
        axis = cfg["scenario.axis"]
        if axis not in ("beta", "omega"):
            raise ConfigError(f"scenario.axis must be beta or omega, got {axis!r}")
        result = classify_scenario(
            params, axis, cfg["scenario.lo"], cfg["scenario.hi"],
            target=target, n_scan=cfg.get("scenario.n", 801),
        )
        csvio.write_scenario(out, result, header)
    else:
        sset = biased_steady_states(params)
        reports = [farebrother_report(params, st) for st in sset]
        csvio.write_reports(out, reports, header)


def _run_region(cfg: dict, out: str, workers: int) -> None:
    params, _ = _resolve_params(cfg)
    _require(cfg, "region.beta_lo", "region.beta_hi", "region.beta_n",
             "region.omega_lo", "region.omega_hi", "region.omega_n")
    cells = stability_region_grid(
        params,
        (cfg["region.beta_lo"], cfg["region.beta_hi"]),
        (cfg["region.omega_lo"], cfg["region.omega_hi"]),
        (cfg["region.beta_n"], cfg["region.omega_n"]),
    )
    csvio.write_region(out, cells, _header("region", cfg))


def _run_bifurcate(cfg: dict, out: str, workers: int) -> None:
    params, explicit_bounds = _resolve_params(cfg)
    config = _orbit_config(cfg)
    header = _header("bifurcate", cfg)
    mode = cfg.get("bif.mode", "1d")
    initial = cfg.get("bif.initial", "plus")
    if mode == "1d":
        _require(cfg, "bif.axis", "bif.lo", "bif.hi", "bif.n")
        axis = cfg["bif.axis"]
        if axis not in ("beta", "omega", "b"):
            raise ConfigError(f"bif.axis must be beta, omega or b, got {axis!r}")
        grid = _linspace(cfg["bif.lo"], cfg["bif.hi"], cfg["bif.n"])
        points = bifurcation_1d(
            params, axis, grid,
            seeding=cfg.get("bif.seeding", "follow"),
            initial=initial, config=config,
            rescale_bounds=not explicit_bounds,
        )
        csvio.write_bifurcation_1d(out, points, header)
    elif mode == "2d":
        _require(cfg, "bif.beta_lo", "bif.beta_hi", "bif.beta_n",
                 "bif.omega_lo", "bif.omega_hi", "bif.omega_n")
        diagram = bifurcation_2d(
            params,
            (cfg["bif.beta_lo"], cfg["bif.beta_hi"]),
            (cfg["bif.omega_lo"], cfg["bif.omega_hi"]),
            (cfg["bif.beta_n"], cfg["bif.omega_n"]),
            initial=initial, config=config,
            rescale_bounds=not explicit_bounds,
            workers=workers,
        )
        csvio.write_bifurcation_2d(out, diagram, header)
    else:
        raise ConfigError(f"bif.mode must be 1d or 2d, got {mode!r}")


def _run_basin(cfg: dict, out: str, workers: int) -> None:
    params, _ = _resolve_params(cfg)
    config = _orbit_config(cfg)
    star = unbiased_steady_state(params)
    y_lo = cfg.get("basin.y_lo", star.Y - 10.0)
    y_hi = cfg.get("basin.y_hi", star.Y + 10.0)
    p_lo = cfg.get("basin.p_lo", star.P - 10.0)
    p_hi = cfg.get("basin.p_hi", star.P + 10.0)
    n = cfg.get("basin.n", 512)
    resolution = (cfg.get("basin.ny", n), cfg.get("basin.np", n))
    basin = basin_slice(params, (y_lo, y_hi), (p_lo, p_hi), resolution,
                        config=config, workers=workers)
    header = _header("basin", cfg)
    csvio.write_basin(out, basin, header)
    csvio.write_basin_catalog(_sidecar_path(out), basin, header)


def _run_orbit(cfg: dict, out: str, workers: int) -> None:
    params, _ = _resolve_params(cfg)
    config = _orbit_config(cfg)
    initial = cfg.get("orbit.initial", "plus")
    orbit = simulate(params, initial, config)
    attractor = classify_attractor(params, initial, config)
    header = _header("orbit", cfg)
    header.append(f"# class {attractor.class_code} period {attractor.period}"
                  + (" divergent" if orbit.divergent else ""))
    if "orbit.lyapunov_steps" in cfg:
        exponent = lyapunov_largest(params, initial,
                                    steps=cfg["orbit.lyapunov_steps"],
                                    divergence_cutoff=config.divergence_cutoff)
        header.append(f"# lyapunov {exponent!r}")
    csvio.write_orbit(out, orbit, header)


def _run_stochastic(cfg: dict, out: str, workers: int) -> None:
    params, explicit_bounds = _resolve_params(cfg)
    mode = cfg.get("stoch.mode", "path")
    try:
        noise = NoiseConfig(
            s=cfg.get("stoch.s"),
            seed=cfg.get("seed", 0),
            length=cfg.get("stoch.length", 200_000),
            burn_in=cfg.get("stoch.burn_in", 10_000),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    header = _header("stochastic", cfg)
    initial = cfg.get("stoch.initial", "plus")
    if mode == "path":
        run = simulate_stochastic(params, initial, noise)
        csvio.write_stochastic_path(out, run, header)
    elif mode == "acf":
        _require(cfg, "stoch.max_lag")
        run = simulate_stochastic(params, initial, noise)
        series = log_returns(run)
        values = np.abs(series.returns) if cfg.get("stoch.absolute", True) else series.returns
        acf = autocorrelation(values, cfg["stoch.max_lag"])
        csvio.write_acf(out, acf, header)
    elif mode == "kurtosis-grid":
        _require(cfg, "stoch.beta_lo", "stoch.beta_hi", "stoch.beta_n",
                 "stoch.omega_lo", "stoch.omega_hi", "stoch.omega_n")
        cells = kurtosis_grid(
            params,
            (cfg["stoch.beta_lo"], cfg["stoch.beta_hi"]),
            (cfg["stoch.omega_lo"], cfg["stoch.omega_hi"]),
            (cfg["stoch.beta_n"], cfg["stoch.omega_n"]),
            noise, initial=initial,
            rescale_bounds=not explicit_bounds,
            workers=workers,
        )
        csvio.write_kurtosis_grid(out, cells, header)
    else:
        raise ConfigError(f"stoch.mode must be path, acf or kurtosis-grid, got {mode!r}")


_RUNNERS = {
    "steady": _run_steady,
    "stability": _run_stability,
    "region": _run_region,
    "bifurcate": _run_bifurcate,
    "basin": _run_basin,
    "orbit": _run_orbit,
    "stochastic": _run_stochastic,
}


def _parse_set(values: list[str]) -> dict:
    overrides = {}
    for item in values:
        if "=" not in item:
            raise ConfigError(f"--set expects key=value, got {item!r}")
        key, _, raw = item.partition("=")
        overrides[key.strip()] = raw.strip()
    return overrides


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="beliefcycle",
        description="Batch analysis of the coupled real-economy / stock-market map.",
    )
    parser.add_argument("--version", action="version", version=f"beliefcycle {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _RUNNERS:
        p = sub.add_parser(name, help=f"run the {name} analysis")
        p.add_argument("--config", help="flat JSON config file (dotted keys)")
        p.add_argument("--preset", help="named preset to start from")
        p.add_argument("--out", required=True, help="output CSV path")
        p.add_argument("--threads", type=int, default=0,
                       help="worker count for grid commands (0 = all cores)")
        p.add_argument("--seed", type=int, help="base seed for stochastic runs")
        p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       help="override any config key (repeatable)")
    return parser


def _resolve_config(args) -> dict:
    layers: list[dict] = [dict(_DEFAULTS)]
    if args.preset:
        try:
            preset = get_preset(args.preset)
        except KeyError as exc:
            raise ConfigError(str(exc)) from None
        if preset["command"] is not None and preset["command"] != args.command:
            raise ConfigError(
                f"preset {args.preset!r} is for command {preset['command']!r}"
            )
        layers.append(preset["values"])
    if args.config:
        try:
            with open(args.config, "r", encoding="utf-8") as fh:
                file_cfg = json.load(fh)
        except OSError:
            raise
        except json.JSONDecodeError as exc:
            raise ConfigError(f"invalid JSON in {args.config}: {exc}") from None
        if not isinstance(file_cfg, dict):
            raise ConfigError("config file must contain a JSON object")
        layers.append(file_cfg)
    overrides = _parse_set(args.set)
    if args.seed is not None:
        overrides["seed"] = args.seed
    layers.append(overrides)
    # Drop defaults the command does not know (e.g. seed-free commands keep it
    # anyway for reproducibility of the embedded config).
    return _merge(args.command, layers)


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    workers = args.threads if args.threads and args.threads > 0 else (os.cpu_count() or 1)
    try:
        cfg = _resolve_config(args)
        _RUNNERS[args.command](cfg, args.out, workers)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IllPosed as exc:
        print(f"model ill-posed: {exc}", file=sys.stderr)
        return EXIT_ILL_POSED
    except BeliefCycleError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
