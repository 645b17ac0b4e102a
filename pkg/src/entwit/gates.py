"""Symbolic index-level engine for the counter gate, ENG, bilateral CNOT and
coarse graining.

Everything here manipulates error labels, modular amplitude indices and
GF(2) Bell indices; no state vectors.  This is the fast exact path the
protocols run on, validated against the dense oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .states import BellIndex, ErrorLabel, LABEL_SHIFT

ErrorConfig = Sequence[ErrorLabel]


@dataclass(frozen=True)
class AmplitudeRegister:
    """Amplitude index j of a d-level maximally entangled auxiliary."""

    j: int
    d: int

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"auxiliary dimension must be >= 2, got {self.d}")
        if not 0 <= self.j < self.d:
            raise ValueError(f"index {self.j} outside Z_{self.d}")

    def shifted(self, delta: int) -> "AmplitudeRegister":
        return AmplitudeRegister((self.j + delta) % self.d, self.d)


def counter_shift(label: ErrorLabel, reg: AmplitudeRegister) -> AmplitudeRegister:
    """One bilateral controlled-X from a copy in component ``label``.

    TYPE1 raises the index mod d, TYPE2 lowers it, every other component
    leaves the auxiliary untouched.
    """
    return reg.shifted(LABEL_SHIFT[label])


def apply_eng(config: ErrorConfig, d: int) -> AmplitudeRegister:
    """Fold the counter gate over an error configuration.

    The result holds (#TYPE1 - #TYPE2) mod d; for amplitude-damping
    configurations this is exactly the error count.
    """
    reg = AmplitudeRegister(0, d)
    for label in config:
        reg = counter_shift(label, reg)
    return reg


def bcnot(control: BellIndex, target: BellIndex) -> tuple[BellIndex, BellIndex]:
    """Bilateral CNOT on Bell indices.

    The control amplitude propagates into the target amplitude; the target
    phase kicks back into the control phase.
    """
    i, j = control
    k, l = target
    return BellIndex(i ^ k, j), BellIndex(k, l ^ j)


def block_parity(block: Sequence[BellIndex]) -> int:
    """Amplitude parity of a block, read off the last member after folding
    every other member into it with bilateral CNOTs."""
    if not block:
        raise ValueError("block must be non-empty")
    target = block[-1]
    for control in block[:-1]:
        _, target = bcnot(control, target)
    return target.amplitude & 1


def block_backaction(block: Sequence[BellIndex]) -> list[BellIndex]:
    """Post-gate indices of the r-1 control copies of a block."""
    if not block:
        raise ValueError("block must be non-empty")
    target = block[-1]
    out = []
    for control in block[:-1]:
        control, target = bcnot(control, target)
        out.append(control)
    return out


GroupingFn = Callable[[int, int, int], int]


def _group_ceil(k: int, d: int, m: int) -> int:
    return -((-k) // (d // m)) % m


def _group_floor(k: int, d: int, m: int) -> int:
    return (k // (d // m)) % m


#: Grouping conventions for the coarse-graining transfer.  The printed
#: transfer gate uses the ceiling exponent; the floor variant relabels
#: k -> k-1 and produces identical measurement statistics for every
#: (d, m, delta0, j).  Ceiling is the default.
GROUPINGS: dict[str, GroupingFn] = {
    "ceil": _group_ceil,
    "floor": _group_floor,
}


@dataclass(frozen=True)
class CoarseParams:
    """Parameters of the coarse-graining readout.

    d: auxiliary dimension, m: extra-register dimension (must divide d),
    delta0: number of group offsets mapped to the "above" outcome.
    """

    d: int
    m: int
    delta0: int
    grouping: str = "ceil"

    def __post_init__(self):
        if self.d < 2:
            raise ValueError(f"auxiliary dimension must be >= 2, got {self.d}")
        if self.m < 1 or self.m > self.d:
            raise ValueError(f"register dimension {self.m} outside [1, {self.d}]")
        if self.d % self.m != 0:
            raise ValueError(f"m={self.m} must divide d={self.d}")
        if not 1 <= self.delta0 <= self.m:
            raise ValueError(f"delta0={self.delta0} outside [1, {self.m}]")
        if self.grouping not in GROUPINGS:
            raise ValueError(f"unknown grouping {self.grouping!r}")

    @property
    def group_size(self) -> int:
        return self.d // self.m

    def group_fn(self) -> GroupingFn:
        return GROUPINGS[self.grouping]


def coarse_group(k: int, params: CoarseParams) -> int:
    """Group value written into the extra register for auxiliary value k,
    reduced mod m (the register is m-dimensional)."""
    if not 0 <= k < params.d:
        raise ValueError(f"k={k} outside Z_{params.d}")
    return params.group_fn()(k, params.d, params.m)


def group_values(params: CoarseParams) -> np.ndarray:
    """coarse_group over all of Z_d as an integer array."""
    fn = params.group_fn()
    return np.array([fn(k, params.d, params.m) for k in range(params.d)])


def coarse_measure_prob(j: int, params: CoarseParams) -> float:
    """Probability of the "above" POVM outcome given auxiliary index j.

    Of the d equally weighted branches, outcome M fires on those k whose
    group offset (group(k + j) - group(k)) mod m lies below delta0.
    """
    if not 0 <= j < params.d:
        raise ValueError(f"j={j} outside Z_{params.d}")
    g = group_values(params)
    delta = (np.roll(g, -j) - g) % params.m
    return float(np.count_nonzero(delta < params.delta0)) / params.d


def coarse_measure_probs(params: CoarseParams) -> np.ndarray:
    """Vector of coarse_measure_prob over all j in Z_d."""
    g = group_values(params)
    j = np.arange(params.d)
    # delta[k, j] = (g[(k + j) % d] - g[k]) mod m
    delta = (g[(np.arange(params.d)[:, None] + j[None, :]) % params.d]
             - g[:, None]) % params.m
    return np.count_nonzero(delta < params.delta0, axis=0) / params.d


@dataclass(frozen=True)
class LambdaSets:
    """Partition of Z_d by determinism of the coarse measurement."""

    lam1: tuple[int, ...]
    lam2: tuple[int, ...]
    lam3: tuple[int, ...]
    lam4: tuple[int, ...]


def lambda_sets(params: CoarseParams) -> LambdaSets:
    """The four j-classes: deterministic M (lam1), deterministic not-M (lam3)
    and the two ramp regions in between/around."""
    dt = params.group_size
    m, d, d0 = params.m, params.d, params.delta0
    lam1 = range(0, dt * (d0 - 1) + 1)
    lam2 = range(dt * (d0 - 1) + 1, d0 * dt)
    lam3 = range(min(d0 * dt, d), dt * (m - 1) + 1)
    lam4 = range(dt * (m - 1) + 1, d)
    return LambdaSets(tuple(lam1), tuple(lam2), tuple(lam3), tuple(lam4))


def default_delta0(j0: int, d: int, m: int, grouping: str = "ceil") -> int:
    """Pick delta0 as the group interval containing the threshold index j0,
    clamped to [1, m]."""
    base = CoarseParams(d, m, 1, grouping)
    g = coarse_group(max(0, min(j0, d - 1)), base)
    if g == 0 and j0 > 0:
        g = m  # wrapped top group
    return min(max(g, 1), m)
