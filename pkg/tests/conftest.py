import numpy as np
import pytest

from beliefcycle import ModelParams, SigmoidSpec, with_reference_bounds

# One line per acceptance criterion, echoed after the run regardless of
# pytest's capture settings.
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def make_params(**overrides) -> ModelParams:
    """Simulation family set-1 (sigma=3, gamma=0.8) with explicit omega=0 bounds."""
    base = dict(
        A=15.0, c=0.38, gamma=0.8, omega=1.0, h=0.38, sigma=3.0, mu=1.0,
        F_star=15.0, d=0.38, b=0.5, beta=1.0,
        sig_I=SigmoidSpec(3.0, 6.0), sig_P=SigmoidSpec(2.0, 4.0),
    )
    base.update(overrides)
    return ModelParams(**base)


def make_scaled(**overrides) -> ModelParams:
    """Same family with the steady-state-scaled adjustment bounds."""
    return with_reference_bounds(make_params(**overrides))


@pytest.fixture
def rng() -> np.random.Generator:
    # function-scoped so every test sees the same draw sequence regardless
    # of which other tests ran before it
    return np.random.default_rng(20240817)


def draw_admissible(rng: np.random.Generator, require_pitchfork: bool = False,
                    beta_cap: float = None) -> ModelParams:
    """Random parameter set satisfying the structural constraints.

    Drawn so that 1 - c - h*d > 0 holds; with require_pitchfork the intensity
    of choice lands above 1/(2 b^2), with beta_cap strictly below it.
    """
    while True:
        c = rng.uniform(0.1, 0.9)
        h = rng.uniform(0.05, 1.5)
        d = rng.uniform(0.05, 1.5)
        if 1.0 - c - h * d <= 0.02:
            continue
        b = rng.uniform(0.1, 1.5)
        threshold = 1.0 / (2.0 * b * b)
        if require_pitchfork:
            beta = threshold * rng.uniform(1.05, 8.0)
        elif beta_cap is not None:
            beta = threshold * rng.uniform(0.05, 0.95)
        else:
            beta = rng.uniform(0.0, 2.0 * threshold)
        return make_params(
            A=rng.uniform(2.0, 30.0), c=c, gamma=rng.uniform(0.1, 2.5),
            omega=rng.uniform(0.0, 1.0), h=h,
            sigma=rng.uniform(0.2, 4.0), mu=rng.uniform(0.2, 3.0),
            F_star=rng.uniform(2.0, 30.0), d=d, b=b, beta=beta,
        )
