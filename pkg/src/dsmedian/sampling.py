"""SRSWOR and the nested two-phase selection scheme, fully replayable.

Randomness is owned by a counter-based Philox generator keyed by
``(master_seed, stream_id)``: the same :class:`SeedSpec` reproduces the
same draw on any platform, and distinct stream ids can be consumed
concurrently with no coordination.  Subsets are selected by a partial
Fisher-Yates shuffle whose bounded integers come from the generator's
rejection-based ``integers`` method, so every k-subset is equally likely.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["SeedSpec", "TwoPhaseSample", "srswor", "draw_two_phase"]

_U64 = 2**64


@dataclass(frozen=True)
class SeedSpec:
    """(master_seed, stream_id) pair that fully determines every draw."""

    master_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        for name in ("master_seed", "stream_id"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or not 0 <= int(v) < _U64:
                raise ValueError(f"{name} must be an unsigned 64-bit integer, got {v!r}")

    def generator(self) -> np.random.Generator:
        """Fresh counter-based generator for this (master_seed, stream_id)."""
        key = np.array([self.master_seed, self.stream_id], dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True, eq=False)
class TwoPhaseSample:
    """Nested index sets: second_phase (size m) inside first_phase (size n)."""

    first_phase: np.ndarray
    second_phase: np.ndarray

    def __post_init__(self) -> None:
        first = np.sort(np.asarray(self.first_phase, dtype=np.int64))
        second = np.sort(np.asarray(self.second_phase, dtype=np.int64))
        if np.unique(first).size != first.size or np.unique(second).size != second.size:
            raise ValueError("phase index sets must not contain duplicates")
        if not (0 < second.size < first.size):
            raise ValueError("require m < n with both phases nonempty")
        if first.size and first[0] < 0:
            raise ValueError("indices must be nonnegative")
        if not np.all(np.isin(second, first, assume_unique=True)):
            raise ValueError("second phase must be a subset of the first phase")
        first.flags.writeable = False
        second.flags.writeable = False
        object.__setattr__(self, "first_phase", first)
        object.__setattr__(self, "second_phase", second)

    @property
    def n(self) -> int:
        return self.first_phase.size

    @property
    def m(self) -> int:
        return self.second_phase.size


def _sample_indices(rng: np.random.Generator, N: int, k: int) -> np.ndarray:
    """First k entries of a partial Fisher-Yates shuffle of range(N)."""
    pool = np.arange(N, dtype=np.int64)
    picks = rng.integers(low=np.arange(k), high=N)
    for i, j in enumerate(picks):
        pool[i], pool[j] = pool[j], pool[i]
    return pool[:k]


def srswor(N: int, k: int, seed: SeedSpec) -> np.ndarray:
    """Simple random sample without replacement: k distinct indices in [0, N).

    Returned sorted ascending.  Deterministic in ``seed``; every k-subset
    is equally probable.
    """
    if not 1 <= k <= N:
        raise ValueError(f"require 1 <= k <= N, got k={k}, N={N}")
    return np.sort(_sample_indices(seed.generator(), N, k))


def draw_two_phase(N: int, n: int, m: int, seed: SeedSpec) -> TwoPhaseSample:
    """Draw S_n by SRSWOR from the population, then S_m by SRSWOR within S_n.

    The marginal law of the second phase is SRSWOR of size m from the
    population; the two phases share one random stream so a single
    :class:`SeedSpec` replays the whole draw.
    """
    if not 1 <= m < n <= N:
        raise ValueError(f"require m < n <= N with m >= 1, got m={m}, n={n}, N={N}")
    rng = seed.generator()
    first = _sample_indices(rng, N, n)
    positions = _sample_indices(rng, n, m)
    return TwoPhaseSample(first_phase=first, second_phase=first[positions])
