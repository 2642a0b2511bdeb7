"""Shared corpus generators for the property tests.

Concordance triples are always drawn through a random correlation matrix
pushed through the arcsin rule, so they are realizable by an actual
trivariate distribution; this is what makes the nonnegativity and
efficiency-ordering properties theorems rather than accidents.
"""

import numpy as np
import pytest

from dsmedian.population import Population, PopulationSummary


def realizable_concordances(rng: np.random.Generator) -> tuple[float, float, float]:
    """(rho_xy, rho_yz, rho_xz) from a random PD correlation matrix via the
    median-split arcsin rule; the resulting triple is itself PSD."""
    a = rng.normal(size=(3, 3)) + 0.5 * np.eye(3)
    c = a @ a.T
    d = np.sqrt(np.diag(c))
    corr = c / np.outer(d, d)
    return tuple(float(2.0 / np.pi * np.arcsin(corr[i, j])) for i, j in ((0, 1), (1, 2), (0, 2)))


def random_summary(rng: np.random.Generator, N: int = 10_000) -> PopulationSummary:
    """A synthetic population summary with realizable associations."""
    medians = tuple(rng.uniform(1.0, 20.0) for _ in range(3))
    densities = tuple(10.0 ** rng.uniform(-1.5, 0.5) for _ in range(3))
    return PopulationSummary.from_parameters(
        medians=medians, densities=densities, rhos=realizable_concordances(rng), N=N
    )


def write_population_csv(path, pop: Population) -> str:
    with open(path, "w") as fh:
        fh.write("x,y,z\n")
        for x, y, z in zip(pop.x, pop.y, pop.z):
            fh.write(f"{float(x)!r},{float(y)!r},{float(z)!r}\n")
    return str(path)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20250810)


#: pass/fail lines collected by the acceptance suite, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
