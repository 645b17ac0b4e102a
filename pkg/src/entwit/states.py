"""Noisy two-qubit entangled-state families and their classical decompositions.

A state is described by its weights over labelled pure components rather than
by a density matrix.  Three one-parameter families (amplitude damping,
dephasing, Werner) are parameterised by the fidelity F with the reference
Bell state, and a free Bell-diagonal family carries four explicit weights.
The labelled decomposition is what the symbolic counter-gate engine consumes.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

WEIGHT_ATOL = 1e-12


class Family(enum.Enum):
    AMPLITUDE_DAMPING = "amplitude_damping"
    DEPHASING = "dephasing"
    WERNER = "werner"
    BELL_DIAGONAL = "bell_diagonal"


# Accepted spellings on the CLI and in JSON input.
FAMILY_ALIASES = {
    "amp": Family.AMPLITUDE_DAMPING,
    "a": Family.AMPLITUDE_DAMPING,
    "amplitude_damping": Family.AMPLITUDE_DAMPING,
    "damping": Family.AMPLITUDE_DAMPING,
    "deph": Family.DEPHASING,
    "dephasing": Family.DEPHASING,
    "werner": Family.WERNER,
    "w": Family.WERNER,
    "bd": Family.BELL_DIAGONAL,
    "bell_diagonal": Family.BELL_DIAGONAL,
}


def parse_family(name: str | Family) -> Family:
    if isinstance(name, Family):
        return name
    try:
        return FAMILY_ALIASES[name.strip().lower()]
    except KeyError:
        raise ValueError(f"unknown state family {name!r}") from None


class BellIndex(NamedTuple):
    """Phase/amplitude index pair (i, j) of a two-qubit Bell state."""

    phase: int
    amplitude: int


class ErrorLabel(enum.Enum):
    """Pure components a noisy copy can collapse to, by counter-gate action.

    GOOD is the reference Bell state, TYPE1/TYPE2 the computational product
    states that shift the counter up/down, TYPE3 the phase-flipped Bell state,
    and Z00/Z11 the diagonal product components of white noise.  Only TYPE1
    and TYPE2 move the counter.
    """

    GOOD = "good"      # |Psi_00>
    TYPE1 = "type1"    # |01>
    TYPE2 = "type2"    # |10>
    TYPE3 = "type3"    # |Psi_10>
    Z00 = "z00"        # |00>
    Z11 = "z11"        # |11>


#: Counter shift per label: TYPE1 raises, TYPE2 lowers, everything else fixes.
LABEL_SHIFT = {
    ErrorLabel.GOOD: 0,
    ErrorLabel.TYPE1: +1,
    ErrorLabel.TYPE2: -1,
    ErrorLabel.TYPE3: 0,
    ErrorLabel.Z00: 0,
    ErrorLabel.Z11: 0,
}


def _check_fidelity(value: float) -> float:
    value = float(value)
    if not 0.0 <= value <= 1.0:
        raise ValueError(f"fidelity must lie in [0, 1], got {value}")
    return value


@dataclass(frozen=True)
class StateSpec:
    """A noisy two-party state: family tag plus fidelity or explicit weights.

    ``weights`` orders the Bell-diagonal coefficients as
    (p(Psi_00), p(Psi_01), p(Psi_10), p(Psi_11)).
    """

    family: Family
    F: float | None = None
    weights: tuple[float, float, float, float] | None = None

    def __post_init__(self):
        if self.family is Family.BELL_DIAGONAL:
            if self.weights is None:
                raise ValueError("bell_diagonal spec needs explicit weights")
            w = tuple(float(x) for x in self.weights)
            if len(w) != 4:
                raise ValueError("bell_diagonal weights must have 4 entries")
            if min(w) < -WEIGHT_ATOL:
                raise ValueError(f"negative weight in {w}")
            total = sum(w)
            if abs(total - 1.0) > WEIGHT_ATOL:
                raise ValueError(f"weights must sum to 1, got {total}")
            # clamp round-off negatives without renormalizing, so weights
            # (and hence the fidelity) pass through exactly
            w = tuple(max(x, 0.0) for x in w)
            object.__setattr__(self, "weights", w)
            object.__setattr__(self, "F", w[0])
        else:
            if self.F is None:
                raise ValueError(f"{self.family.value} spec needs a fidelity")
            object.__setattr__(self, "F", _check_fidelity(self.F))
            object.__setattr__(self, "weights", None)

    @property
    def fidelity(self) -> float:
        """Overlap with the reference Bell state."""
        return self.F

    def bell_diagonal_weights(self) -> tuple[float, float, float, float]:
        """Weights of the Bell-diagonal form obtained by dephasing in the
        Bell basis (fidelity preserving).

        The amplitude-damping error component |01> splits evenly over the two
        amplitude-flipped Bell states.
        """
        f = self.F
        if self.family is Family.BELL_DIAGONAL:
            return self.weights
        if self.family is Family.AMPLITUDE_DAMPING:
            return (f, (1 - f) / 2, 0.0, (1 - f) / 2)
        if self.family is Family.DEPHASING:
            return (f, 0.0, 1 - f, 0.0)
        # Werner: white noise spreads evenly over the three error states
        return (f, (1 - f) / 3, (1 - f) / 3, (1 - f) / 3)

    def to_json(self) -> dict:
        if self.family is Family.BELL_DIAGONAL:
            return {"family": self.family.value, "weights": list(self.weights)}
        return {"family": self.family.value, "F": self.F}

    @classmethod
    def from_json(cls, obj: dict) -> "StateSpec":
        family = parse_family(obj["family"])
        if family is Family.BELL_DIAGONAL:
            return cls(family, weights=tuple(obj["weights"]))
        return cls(family, F=obj["F"])


def make_state(family: str | Family, F: float) -> StateSpec:
    """Construct a one-parameter family member at fidelity ``F``."""
    family = parse_family(family)
    if family is Family.BELL_DIAGONAL:
        raise ValueError("bell_diagonal states carry 4 weights, use StateSpec")
    return StateSpec(family, F=_check_fidelity(F))


def fidelity_of(spec: StateSpec) -> float:
    return spec.fidelity


def error_label_distribution(spec: StateSpec) -> dict[ErrorLabel, float]:
    """Classical mixture over labelled pure components, as seen by the
    counter gate.

    For Werner states the white-noise part is decomposed over the
    computational basis {|00>, |01>, |10>, |11>}; |00> and |11> join the
    invariant class, so the invariance probability is (1 + 2F)/3.  Below
    F = 1/4 that decomposition has a negative Bell-state coefficient, so the
    equivalent Bell-pair split {GOOD: F, TYPE3: (1-F)/3, TYPE1/2: (1-F)/3}
    is used instead; both describe the same density operator and the same
    per-copy shift classes.
    """
    f = spec.F
    if spec.family is Family.AMPLITUDE_DAMPING:
        return _drop_zeros({ErrorLabel.GOOD: f, ErrorLabel.TYPE1: 1 - f})
    if spec.family is Family.DEPHASING:
        return _drop_zeros({ErrorLabel.GOOD: f, ErrorLabel.TYPE3: 1 - f})
    if spec.family is Family.WERNER:
        q = (4 * f - 1) / 3
        if q >= 0.0:
            w = (1 - q) / 4
            return _drop_zeros({
                ErrorLabel.GOOD: q,
                ErrorLabel.Z00: w,
                ErrorLabel.TYPE1: w,
                ErrorLabel.TYPE2: w,
                ErrorLabel.Z11: w,
            })
        e = (1 - f) / 3
        return _drop_zeros({
            ErrorLabel.GOOD: f,
            ErrorLabel.TYPE3: e,
            ErrorLabel.TYPE1: e,
            ErrorLabel.TYPE2: e,
        })
    # Generic Bell-diagonal: the two amplitude-flipped weights act through
    # the counter as an even mixture of |01> and |10> (exact for the shift
    # statistics; cross terms are invisible to amplitude readout).
    p00, p01, p10, p11 = spec.weights
    flip = (p01 + p11) / 2
    return _drop_zeros({
        ErrorLabel.GOOD: p00,
        ErrorLabel.TYPE3: p10,
        ErrorLabel.TYPE1: flip,
        ErrorLabel.TYPE2: flip,
    })


def _drop_zeros(dist: dict[ErrorLabel, float]) -> dict[ErrorLabel, float]:
    return {k: v for k, v in dist.items() if v > 0.0}


def shift_class_probabilities(spec: StateSpec) -> tuple[float, float, float]:
    """(invariant, shift-up, shift-down) probabilities of one copy."""
    dist = error_label_distribution(spec)
    up = dist.get(ErrorLabel.TYPE1, 0.0)
    down = dist.get(ErrorLabel.TYPE2, 0.0)
    return 1.0 - up - down, up, down


def depolarize(spec: StateSpec, target: str | Family = Family.WERNER) -> StateSpec:
    """Twirl ``spec`` into Bell-diagonal or Werner form, preserving fidelity."""
    target = parse_family(target)
    if target is Family.BELL_DIAGONAL:
        return StateSpec(Family.BELL_DIAGONAL, weights=spec.bell_diagonal_weights())
    if target is Family.WERNER:
        return StateSpec(Family.WERNER, F=spec.F)
    raise ValueError(f"cannot depolarize towards {target.value}")


def bell_diagonal_entropy(spec: StateSpec) -> float:
    """Shannon entropy (bits) of the Bell-diagonal weights of ``spec``."""
    w = np.asarray(spec.bell_diagonal_weights())
    w = w[w > 0]
    return float(-np.sum(w * np.log2(w)))


def binary_entropy(p: float) -> float:
    """h(p) in bits."""
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1 - p) * math.log2(1 - p)
