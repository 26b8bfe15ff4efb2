"""CSV writers for every analysis product.

All files share one dialect: comma separators, '.' decimals, '#'-prefixed
comment headers.  The first two comment lines record the tool version and
the resolved run configuration as one JSON object, so any output can be
reproduced byte-for-byte by feeding that line back as a config file.
Floats are written with repr (shortest round-trip form).
"""

from __future__ import annotations

import json
import math
from typing import Iterable, Sequence

from .dynamics import BasinSlice, Bifurcation2D, BifurcationPoint, OrbitSample
from .equilibria import SteadyStateSet, SweepRow
from .stability import RegionCell, ScenarioResult, StabilityReport
from .stochastic import KurtosisCell, StochasticPath

__all__ = [
    "format_header",
    "write_steady_set",
    "write_sweep",
    "write_reports",
    "write_scenario",
    "write_region",
    "write_bifurcation_1d",
    "write_bifurcation_2d",
    "write_basin",
    "write_basin_catalog",
    "write_orbit",
    "write_stochastic_path",
    "write_kurtosis_grid",
    "write_acf",
]


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _flags(flags: Sequence[str]) -> str:
    return ";".join(flags)


def format_header(version: str, config: dict) -> list[str]:
    return [
        f"# beliefcycle {version}",
        "# config " + json.dumps(config, sort_keys=True, separators=(",", ":")),
    ]


def _write(path, header_lines: list[str], column_line: str, rows: Iterable[str]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for line in header_lines:
            fh.write(line + "\n")
        fh.write(column_line + "\n")
        for row in rows:
            fh.write(row + "\n")


def write_steady_set(path, sset: SteadyStateSet, header: list[str]) -> None:
    b = sset.bounds
    rows = []
    for st in sset:  # LOW, UNBIASED, HIGH as available
        rows.append(",".join([
            st.label.value, _fmt(st.Y), _fmt(st.P), _fmt(st.Z),
            _fmt(b.P_lo), _fmt(b.P_hi), _fmt(b.Y_lo), _fmt(b.Y_hi),
            _flags(sset.flags),
        ]))
    _write(path, header, "label,Y,P,Z,P_lo,P_hi,Y_lo,Y_hi,flags", rows)


def write_sweep(path, rows: Sequence[SweepRow], header: list[str]) -> None:
    lines = [
        ",".join([
            _fmt(r.axis_value), _fmt(r.Y_L), _fmt(r.Y_star), _fmt(r.Y_H),
            _fmt(r.P_L), _fmt(r.P_star), _fmt(r.P_H), _flags(r.flags),
        ])
        for r in rows
    ]
    _write(path, header, "axis,Y_L,Y_star,Y_H,P_L,P_star,P_H,flags", lines)


def write_reports(path, reports: Sequence[StabilityReport], header: list[str]) -> None:
    cols = ("at,E_eff,W,C1,C2,C3,cond1,cond2,cond3,cond4,"
            "margin1,margin2,margin3,margin4,stable,"
            "lambda1_re,lambda1_im,lambda2_re,lambda2_im,lambda3_re,lambda3_im,"
            "spectral_radius")
    lines = []
    for r in reports:
        cells = [r.at.value, _fmt(r.E_eff), _fmt(r.W)]
        cells += [_fmt(c) for c in r.coeffs]
        cells += [_fmt(c) for c in r.farebrother]
        cells += [_fmt(m) for m in r.margins]
        cells.append(_fmt(r.stable))
        for lam in r.eigenvalues:
            cells += [_fmt(lam.real), _fmt(lam.imag)]
        cells.append(_fmt(r.spectral_radius))
        lines.append(",".join(cells))
    _write(path, header, cols, lines)


def write_scenario(path, result: ScenarioResult, header: list[str]) -> None:
    row = ",".join([
        result.axis, result.target.value, result.kind.value,
        _fmt(result.lo), _fmt(result.hi),
        ";".join(_fmt(t) for t in result.thresholds),
    ])
    _write(path, header, "axis,target,kind,lo,hi,thresholds", [row])


def write_region(path, cells: Sequence[RegionCell], header: list[str]) -> None:
    lines = [
        ",".join([
            _fmt(c.beta), _fmt(c.omega), _fmt(c.star_stable),
            _fmt(c.biased_exists),
            _fmt(c.high_stable) if c.high_stable is not None else "",
            _fmt(c.margin_min),
        ])
        for c in cells
    ]
    _write(path, header, "beta,omega,star_stable,biased_exists,high_stable,margin_min", lines)


def write_bifurcation_1d(path, points: Sequence[BifurcationPoint], header: list[str]) -> None:
    lines = []
    for pt in points:
        code = pt.attractor.class_code
        for p_val in pt.P_samples:
            lines.append(f"{_fmt(pt.axis_value)},{_fmt(float(p_val))},{code}")
    _write(path, header, "axis,P,class", lines)


def write_bifurcation_2d(path, diagram: Bifurcation2D, header: list[str]) -> None:
    lines = []
    for i, beta in enumerate(diagram.betas):
        for j, omega in enumerate(diagram.omegas):
            lines.append(",".join([
                _fmt(float(beta)), _fmt(float(omega)),
                diagram.class_code(i, j), str(int(diagram.periods[i, j])),
            ]))
    _write(path, header, "beta,omega,class,period", lines)


def write_basin(path, basin: BasinSlice, header: list[str]) -> None:
    lines = []
    for i, y in enumerate(basin.Y_values):
        for j, p in enumerate(basin.P_values):
            lines.append(f"{_fmt(float(y))},{_fmt(float(p))},{int(basin.labels[i, j])}")
    _write(path, header, "Y,P,label", lines)


def write_basin_catalog(path, basin: BasinSlice, header: list[str]) -> None:
    lines = []
    for label, entry in enumerate(basin.catalog):
        lines.append(",".join([
            str(label), entry.class_code, str(entry.period),
            _fmt(entry.mean.Y if entry.mean else None),
            _fmt(entry.mean.P if entry.mean else None),
        ]))
    _write(path, header, "label,kind,period,mean_Y,mean_P", lines)


def write_orbit(path, orbit: OrbitSample, header: list[str]) -> None:
    lines = [
        f"{t},{_fmt(float(row[0]))},{_fmt(float(row[1]))},{_fmt(float(row[2]))}"
        for t, row in enumerate(orbit.states)
    ]
    _write(path, header, "t,Y,P,Z", lines)


def write_stochastic_path(path, run: StochasticPath, header: list[str]) -> None:
    prices = run.P
    lines = []
    for t in range(len(run)):
        if t == 0 or prices[t] <= 0.0 or prices[t - 1] <= 0.0:
            r_str = ""
        else:
            r_str = _fmt(math.log(prices[t]) - math.log(prices[t - 1]))
        lines.append(f"{t},{_fmt(float(run.Y[t]))},{_fmt(float(prices[t]))},{r_str}")
    _write(path, header, "t,Y,P,R", lines)


def write_kurtosis_grid(path, cells: Sequence[KurtosisCell], header: list[str]) -> None:
    lines = [
        ",".join([_fmt(c.beta), _fmt(c.omega), _fmt(c.kurtosis), str(c.n_valid)])
        for c in cells
    ]
    _write(path, header, "beta,omega,kurtosis,n_valid", lines)


def write_acf(path, acf, header: list[str], first_lag: int = 1) -> None:
    lines = [f"{first_lag + i},{_fmt(float(v))}" for i, v in enumerate(acf)]
    _write(path, header, "lag,acf", lines)
