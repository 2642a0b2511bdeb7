"""Finite-population data model and the population-level summary quantities.

A :class:`Population` is three equal-length value vectors (x, y, z): the
study variate is y, x is the auxiliary whose median is estimated in the
first phase, and z is the second auxiliary whose population median is
treated as known.  :func:`population_summary` computes every quantity the
variance theory consumes: the three medians, the marginal densities at
those medians, and the three quadrant-proportion matrices.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass

import numpy as np

from .core_stats import (
    ProportionMatrix,
    kde_at,
    median,
    proportion_matrix,
    silverman_bandwidth,
)

__all__ = ["Population", "PopulationSummary", "population_summary", "load_population_csv"]

CSV_COLUMNS = ("x", "y", "z")


def _frozen_array(values, name: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).ravel().copy()
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"population variable {name} contains non-finite values")
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class Population:
    """A finite population of N units carrying (x, y, z) values."""

    x: np.ndarray
    y: np.ndarray
    z: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "x", _frozen_array(self.x, "x"))
        object.__setattr__(self, "y", _frozen_array(self.y, "y"))
        object.__setattr__(self, "z", _frozen_array(self.z, "z"))
        if not (self.x.size == self.y.size == self.z.size):
            raise ValueError("x, y, z must have equal length")
        if self.x.size < 4:
            raise ValueError("population needs at least 4 units for two-phase sampling")

    @property
    def N(self) -> int:
        return self.x.size


@dataclass(frozen=True)
class PopulationSummary:
    """True medians, densities at the medians, and quadrant proportions.

    These are the inputs of every closed-form variance in this package.
    ``pm_xy``, ``pm_xz``, ``pm_yz`` are the proportion matrices of the
    pairs (x, y), (x, z), (y, z) split at the respective medians.
    """

    median_x: float
    median_y: float
    median_z: float
    density_x: float
    density_y: float
    density_z: float
    pm_xy: ProportionMatrix
    pm_xz: ProportionMatrix
    pm_yz: ProportionMatrix
    N: int

    def __post_init__(self) -> None:
        for name in ("median_x", "median_y", "median_z"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        for name in ("density_x", "density_y", "density_z"):
            d = getattr(self, name)
            if not (math.isfinite(d) and d > 0.0):
                raise ValueError(f"zero density at median: {name}={d!r}")
        if self.N < 4:
            raise ValueError("summary requires N >= 4")

    @classmethod
    def from_parameters(
        cls,
        medians: tuple[float, float, float],
        densities: tuple[float, float, float],
        rhos: tuple[float, float, float],
        N: int,
    ) -> "PopulationSummary":
        """Build a summary from (M_x, M_y, M_z), (f_x, f_y, f_z) and the
        median-concordance triple (rho_xy, rho_yz, rho_xz), rho = 4*P11 - 1.

        The proportion matrices are the symmetric ones with exact 0.5
        marginals: p11 = p22 = (1 + rho)/4, p12 = p21 = (1 - rho)/4.
        """

        def pm(rho: float) -> ProportionMatrix:
            if not -1.0 <= rho <= 1.0:
                raise ValueError(f"concordance coefficient {rho!r} outside [-1, 1]")
            lo, hi = (1.0 - rho) / 4.0, (1.0 + rho) / 4.0
            return ProportionMatrix(p11=hi, p12=lo, p21=lo, p22=hi)

        rho_xy, rho_yz, rho_xz = rhos
        return cls(
            median_x=medians[0],
            median_y=medians[1],
            median_z=medians[2],
            density_x=densities[0],
            density_y=densities[1],
            density_z=densities[2],
            pm_xy=pm(rho_xy),
            pm_xz=pm(rho_xz),
            pm_yz=pm(rho_yz),
            N=N,
        )


def population_summary(pop: Population) -> PopulationSummary:
    """Census summary of a population: medians, KDE densities, proportions.

    Medians use the package quantile convention; densities are Gaussian
    KDEs with Silverman bandwidths evaluated at the medians; the proportion
    matrices split each pair at the medians.  Deterministic: identical
    input bits give identical output bits.
    """
    meds = {}
    dens = {}
    for name, values in (("x", pop.x), ("y", pop.y), ("z", pop.z)):
        m = median(values)
        try:
            h = silverman_bandwidth(values)
        except ValueError as exc:
            raise ValueError(f"zero density at median: variable {name} is degenerate") from exc
        meds[name] = m
        dens[name] = kde_at(values, m, h).value
    return PopulationSummary(
        median_x=meds["x"],
        median_y=meds["y"],
        median_z=meds["z"],
        density_x=dens["x"],
        density_y=dens["y"],
        density_z=dens["z"],
        pm_xy=proportion_matrix(np.column_stack((pop.x, pop.y)), meds["x"], meds["y"]),
        pm_xz=proportion_matrix(np.column_stack((pop.x, pop.z)), meds["x"], meds["z"]),
        pm_yz=proportion_matrix(np.column_stack((pop.y, pop.z)), meds["y"], meds["z"]),
        N=pop.N,
    )


def load_population_csv(path) -> Population:
    """Read a population from CSV with the exact header ``x,y,z``.

    One unit per line, decimal-point reals.  Parsing is strict: a wrong
    column count or a non-numeric field raises ValueError naming the line.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError("empty CSV: missing header row") from None
        names = tuple(h.strip() for h in header)
        if names != CSV_COLUMNS:
            raise ValueError(
                f"bad header: expected columns {','.join(CSV_COLUMNS)}, got {','.join(names)}"
            )
        cols: list[list[float]] = [[], [], []]
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 3:
                raise ValueError(f"line {lineno}: expected 3 columns, got {len(row)}")
            for j, cell in enumerate(row):
                try:
                    cols[j].append(float(cell))
                except ValueError:
                    raise ValueError(
                        f"line {lineno}: column {CSV_COLUMNS[j]} is not a number: {cell!r}"
                    ) from None
    if len(cols[0]) < 4:
        raise ValueError("population needs at least 4 data rows")
    return Population(x=cols[0], y=cols[1], z=cols[2])
