"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Every tolerance and runtime bound is asserted as stated; nothing is
deferred.  The summary lines are emitted through the terminal-summary hook
in conftest so they appear regardless of capture settings.
"""

import dataclasses
import time

import numpy as np
import pytest

from beliefcycle import (
    NoiseConfig,
    OrbitConfig,
    ScenarioKind,
    State,
    autocorrelation,
    basin_slice,
    beta_mirror,
    biased_steady_states,
    classify_attractor,
    classify_scenario,
    farebrother_report,
    jacobian_at,
    kurtosis,
    log_returns,
    simulate,
    simulate_stochastic,
    step,
    unbiased_steady_state,
    with_reference_bounds,
)
from beliefcycle.dynamics import AttractorKind
from beliefcycle.equilibria import StateLabel
from beliefcycle.stochastic import kurtosis_grid

from conftest import ACCEPTANCE_LINES, draw_admissible, make_params, make_scaled


class Criterion:
    """Collects named sub-checks and reports one summary line."""

    def __init__(self, number: int, name: str):
        self.number = number
        self.name = name
        self.failures: list[str] = []
        self.t0 = time.perf_counter()

    def check(self, ok: bool, what: str) -> None:
        if not ok:
            self.failures.append(what)

    def finish(self, runtime_limit: float | None = None) -> None:
        elapsed = time.perf_counter() - self.t0
        if runtime_limit is not None:
            self.check(elapsed < runtime_limit,
                       f"runtime {elapsed:.1f}s exceeds {runtime_limit:.0f}s")
        verdict = "PASS" if not self.failures else "FAIL"
        line = f"ACCEPTANCE {self.number:>2} {self.name}: {verdict} ({elapsed:.2f} s)"
        if self.failures:
            line += "  [" + "; ".join(self.failures) + "]"
        ACCEPTANCE_LINES.append(line)
        assert not self.failures, line


@pytest.fixture(scope="module")
def warm_kernels():
    # Compile the orbit kernels outside the timed sections.
    p = make_scaled(beta=1.5)
    classify_attractor(p, "plus", OrbitConfig(transient=64, sample=64))
    simulate_stochastic(p, "plus", NoiseConfig(seed=0, length=128, burn_in=8))
    simulate(p, "plus", OrbitConfig(transient=8, sample=8))


def test_criterion_01_pitchfork_threshold():
    c = Criterion(1, "pitchfork threshold at beta=2 (set-1)")
    for beta in (0.5, 1.0, 1.5, 2.0):
        sset = biased_steady_states(make_params(beta=beta))
        c.check(sset.low is None and sset.high is None,
                f"unexpected biased pair at beta={beta}")
    for beta in (2.05, 2.5, 3.0, 4.0, 5.0):
        sset = biased_steady_states(make_params(beta=beta))
        c.check(sset.low is not None and sset.high is not None,
                f"missing biased pair at beta={beta}")
        if sset.low is not None:
            sym = abs(sset.low.P + sset.high.P - 2 * sset.star.P)
            c.check(sym < 1e-8, f"asymmetry {sym:.2e} at beta={beta}")
    c.finish(runtime_limit=1.0)


def test_criterion_02_stability_region_cross_sections():
    c = Criterion(2, "stability-region cross-sections (regions A and B)")
    expectations = [
        (0.1, ScenarioKind.UNCONDITIONALLY_UNSTABLE),
        (0.69, ScenarioKind.DESTABILIZING),
        (1.5, ScenarioKind.UNCONDITIONALLY_STABLE),
    ]
    for beta, expected in expectations:
        r = classify_scenario(make_params(beta=beta), "omega", 0.0, 1.0)
        c.check(r.kind is expected, f"beta={beta}: {r.kind.value}, expected {expected.value}")
    r = classify_scenario(make_params(omega=0.95), "beta", 0.01, 5.0)
    c.check(r.kind is ScenarioKind.MIXED, f"omega=0.95 along beta: {r.kind.value}")
    r = classify_scenario(make_params(sigma=1.3, gamma=1.05, beta=0.4), "omega", 0.0, 1.0)
    c.check(r.kind is ScenarioKind.STABILIZING, f"region-B beta=0.4: {r.kind.value}")
    c.finish(runtime_limit=10.0)


def test_criterion_03_appendix_mixed_scenario_numbers():
    c = Criterion(3, "appendix mixed-scenario window 0.936/0.986")
    # c=0.5, gamma=1.1, d*h=0.2, effective slope 1.9 via mu*sigma=1.9, beta=0
    p = make_params(c=0.5, gamma=1.1, d=0.4, h=0.5, mu=1.0, sigma=1.9, beta=0.0)
    r = classify_scenario(p, "omega", 0.0, 1.0)
    c.check(r.kind is ScenarioKind.MIXED, f"kind {r.kind.value}")
    if len(r.thresholds) == 2:
        lo, hi = r.thresholds
        c.check(abs(lo - 0.936) < 5e-4, f"lower endpoint {lo:.6f} vs 0.936 (|diff|={abs(lo-0.936):.1e})")
        c.check(abs(hi - 0.986) < 5e-4, f"upper endpoint {hi:.6f} vs 0.986 (|diff|={abs(hi-0.986):.1e})")
    else:
        c.check(False, f"expected two thresholds, got {r.thresholds}")
    c.finish()


def test_criterion_04_flip_location(warm_kernels):
    c = Criterion(4, "flip threshold 0.728 and period-2 below it")
    r = classify_scenario(make_params(omega=1.0), "beta", 0.3, 1.5)
    c.check(len(r.thresholds) == 1, f"thresholds {r.thresholds}")
    flip = r.thresholds[0]
    c.check(abs(flip - 0.728) < 5e-3, f"flip at {flip:.6f}")
    att = classify_attractor(make_scaled(beta=flip - 0.01, omega=1.0), "plus")
    c.check(att.kind is AttractorKind.PERIOD and att.period == 2,
            f"attractor just below flip: {att.class_code}")
    c.finish()


def test_criterion_05_farebrother_eigenvalue_equivalence(rng):
    c = Criterion(5, "Farebrother verdict == spectral radius, 1e4 draws")
    checked = 0
    mismatches = 0
    while checked < 10_000:
        p = draw_admissible(rng)
        rep = farebrother_report(p, unbiased_steady_state(p))
        if min(abs(m) for m in rep.margins) <= 1e-6:
            continue
        radius = np.abs(np.linalg.eigvals(jacobian_at(p, unbiased_steady_state(p)).matrix)).max()
        if rep.stable != bool(radius < 1.0):
            mismatches += 1
        checked += 1
    c.check(mismatches == 0, f"{mismatches} mismatches out of {checked}")
    c.finish(runtime_limit=30.0)


def test_criterion_06_mirror_property(rng):
    c = Criterion(6, "eigenvalue mirror J*(beta) vs J^H(beta^H), 100 draws")
    for _ in range(100):
        p = draw_admissible(rng, beta_cap=True)
        mirrored = beta_mirror(p, p.beta)
        pm = dataclasses.replace(p, beta=mirrored)
        star_eigs = np.linalg.eigvals(jacobian_at(p, unbiased_steady_state(p)).matrix)
        high = biased_steady_states(pm).high
        high_eigs = np.linalg.eigvals(jacobian_at(pm, high).matrix)
        a = sorted(star_eigs, key=lambda z: (z.real, z.imag))
        b = sorted(high_eigs, key=lambda z: (z.real, z.imag))
        worst = max(abs(x - y) for x, y in zip(a, b))
        c.check(worst < 1e-6, f"eigenvalue gap {worst:.2e} at beta={p.beta:.4f}, b={p.b:.4f}")
        if c.failures:
            break
    c.finish()


def test_criterion_07_beta_infinity_limits():
    c = Criterion(7, "beta -> infinity limits reach the enclosure bounds")
    sset = biased_steady_states(make_params(beta=1e6, omega=1.0))
    c.check(abs(sset.high.P - sset.bounds.P_hi) < 1e-3,
            f"|P_H - P_hi| = {abs(sset.high.P - sset.bounds.P_hi):.2e}")
    c.check(abs(sset.low.P - sset.bounds.P_lo) < 1e-3,
            f"|P_L - P_lo| = {abs(sset.low.P - sset.bounds.P_lo):.2e}")
    c.finish()


def test_criterion_08_jacobian_finite_difference_check(rng):
    c = Criterion(8, "analytic vs finite-difference Jacobian, 100 draws")
    from test_stability import fd_jacobian

    for _ in range(100):
        p = draw_admissible(rng, require_pitchfork=True)
        sset = biased_steady_states(p)
        for st in sset:
            analytic = jacobian_at(p, st).matrix
            numeric = fd_jacobian(p, st)
            err = np.abs(analytic - numeric).max() / (1.0 + np.abs(analytic).max())
            c.check(err < 1e-6, f"rel err {err:.2e} at {st.label.value}")
        if c.failures:
            break
    c.finish()


def test_criterion_09_basin_structure(warm_kernels):
    c = Criterion(9, "256^2 basin slice at beta=2.5: the two biased basins")
    import os

    p = make_scaled(beta=2.5, omega=1.0)
    star = unbiased_steady_state(p)
    sset = biased_steady_states(p)
    basin = basin_slice(
        p, (star.Y - 10, star.Y + 10), (star.P - 10, star.P + 10), 256,
        workers=os.cpu_count() or 1,
    )
    c.check(len(basin.catalog) == 2, f"catalog has {len(basin.catalog)} entries")
    for entry in basin.catalog:
        c.check(entry.kind is AttractorKind.FIXED_POINT, f"entry kind {entry.class_code}")
        s = State(*entry.representatives[0])
        nxt = step(p, s)
        residual = max(abs(a - b) for a, b in zip(nxt, s))
        c.check(residual < 1e-6, f"residual {residual:.2e}")
    if len(basin.catalog) == 2:
        c.check(abs(basin.catalog[0].mean.P - sset.low.P) < 1e-6, "low entry mismatch")
        c.check(abs(basin.catalog[1].mean.P - sset.high.P) < 1e-6, "high entry mismatch")
    c.finish(runtime_limit=60.0)


def test_criterion_10_stylized_facts(warm_kernels):
    c = Criterion(10, "kurtosis band in (2,4) and |R| autocorrelation at beta=6")
    seeds = (11, 22, 33)
    betas = np.linspace(0.0, 6.0, 20)
    omegas = np.linspace(0.0, 1.0, 5)
    p = make_params()
    grids = []
    for seed in seeds:
        cells = kurtosis_grid(
            p, (0.0, 6.0), (0.0, 1.0), (20, 5),
            NoiseConfig(seed=seed, length=200_000, burn_in=10_000),
        )
        grids.append(np.array([cell.kurtosis for cell in cells]).reshape(20, 5))
    mean_grid = np.mean(grids, axis=0)
    for j, omega in enumerate(omegas):
        row = mean_grid[:, j]
        i_max = int(np.nanargmax(row))
        beta_at_max = betas[i_max]
        c.check(2.0 < beta_at_max < 4.0,
                f"omega={omega:.2f}: max kurtosis {row[i_max]:.2f} at beta={beta_at_max:.3f}")
        c.check(row[i_max] > 4.0,
                f"omega={omega:.2f}: max kurtosis {row[i_max]:.2f} <= 4")
    for omega in (0.0, 1.0):
        for seed in seeds:
            pw = make_scaled(beta=6.0, omega=omega)
            run = simulate_stochastic(pw, "plus",
                                      NoiseConfig(seed=seed, length=210_000, burn_in=10_000))
            acf = autocorrelation(np.abs(log_returns(run).returns), 20)
            c.check(bool((acf > 0).all()),
                    f"omega={omega}: nonpositive |R| autocorrelation (seed {seed})")
    c.finish(runtime_limit=300.0)


def test_criterion_11_zero_noise_reduction(warm_kernels):
    c = Criterion(11, "zero-noise stochastic path equals deterministic orbit")
    p = make_scaled(beta=2.1, omega=1.0)
    run = simulate_stochastic(p, "plus", NoiseConfig(s=0.0, seed=1, length=10_100, burn_in=100))
    det = simulate(p, "plus", OrbitConfig(transient=100, sample=10_000))
    c.check(np.array_equal(run.states, det.states), "paths differ")
    c.check(len(run) == 10_000, f"path length {len(run)}")
    c.finish()
