"""End-to-end protocol runs: analytic reports and Monte Carlo trajectories.

Four strategies solve the witnessing/discrimination problems:

  p0  measure every copy with the family's local test
  p1  fold the whole ensemble into one d-level auxiliary and read its index
  p2  coarse-grain that index into a small register, recover the auxiliary
  p3  split the ensemble into blocks and read one amplitude parity per block

Analytic paths are exact; simulation paths draw per-copy error labels and
push them through the symbolic gate engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import UnsupportedCombinationError
from .gates import CoarseParams, default_delta0, group_values
from .resources import ResourceLedger
from .states import Family, StateSpec, depolarize, parse_family
from .stats import (BinomialFailModel, BlockParityModel, CounterDifferenceModel,
                    DecisionRule, DiscriminationRule, OutcomeDistribution,
                    build_sigma, discrimination_rule, strategy_for,
                    success_probability_discriminate,
                    success_probability_witness)

PROTOCOLS = ("p0", "p1", "p2", "p3")


@dataclass(frozen=True)
class ResidualEnsemble:
    """What is left of the ensemble after a run."""

    description: str
    reduced_fidelity: float | None

    def to_json(self) -> dict:
        return {"description": self.description,
                "reduced_fidelity": self.reduced_fidelity}


@dataclass(frozen=True)
class ProtocolReport:
    protocol: str
    family: str
    n: int
    success_probability: float | None
    decision: str | None = None
    statistic: int | None = None
    distribution: OutcomeDistribution | None = None
    residual: ResidualEnsemble | None = None
    ledger: ResourceLedger | None = None
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "protocol": self.protocol,
            "family": self.family,
            "n": self.n,
            "success_probability": self.success_probability,
            "decision": self.decision,
            "statistic": self.statistic,
            "distribution": None if self.distribution is None
            else self.distribution.to_json(),
            "residual": None if self.residual is None else self.residual.to_json(),
            "ledger": None if self.ledger is None else self.ledger.to_json(),
            "meta": self.meta,
        }


@dataclass(frozen=True)
class SimulationResult:
    """Per-trial outcomes of a seeded protocol simulation."""

    protocol: str
    statistics: np.ndarray
    above: np.ndarray
    residual_fidelity: np.ndarray | None = None
    copies_measured: np.ndarray | None = None

    @property
    def above_frequency(self) -> float:
        return float(np.mean(self.above))


def witness_model(protocol: str, family: Family | str, *, n: int | None = None,
                  d: int | None = None, N: int | None = None,
                  r: int | None = None, rounds: int = 1):
    """Statistic model used by each protocol on each family."""
    family = parse_family(family)
    if protocol == "p0":
        return BinomialFailModel(n, strategy_for(family).nu, label="p0")
    if protocol in ("p1", "p2"):
        if d is None:
            d = n + 1 if family is Family.AMPLITUDE_DAMPING else 2 * n + 1
        return CounterDifferenceModel(n, d, family, label=protocol)
    if protocol == "p3":
        if r is None or N is None:
            raise ValueError("p3 needs a block size r and ensemble size N")
        if N // r < 1:
            raise ValueError(f"N={N} leaves no complete block of size {r}")
        frame = family if family is Family.DEPHASING else Family.WERNER
        return BlockParityModel(N // r, r, frame, rounds=rounds, label="p3")
    raise ValueError(f"unknown protocol {protocol!r}")


def witness_rule(protocol: str, family: Family | str, F0: float, delta: float,
                 **model_kwargs) -> DecisionRule:
    return build_sigma(witness_model(protocol, family, **model_kwargs), F0, delta)


def _non_efficient(protocol: str, family: Family) -> bool:
    return protocol in ("p1", "p2") and family is not Family.AMPLITUDE_DAMPING


def backaction_fidelity(spec: StateSpec) -> float:
    """Expected copy fidelity after one parity round.

    Dephasing states see no back-action; everything else runs in Werner form
    where the target's phase index kicks into each control."""
    if spec.family is Family.DEPHASING:
        return spec.F
    f = spec.F
    e = (1.0 - f) / 3.0
    return f * f + f * e + 2.0 * e * e


# ---------------------------------------------------------------------------
# P0: copy-by-copy measurements


def run_p0(spec: StateSpec, n: int, rule: DecisionRule) -> ProtocolReport:
    """Analytic copy-by-copy report: every copy is measured and destroyed."""
    ps = success_probability_witness(spec.F, rule)
    return ProtocolReport(
        protocol="p0", family=spec.family.value, n=n,
        success_probability=ps,
        distribution=rule.model.distribution(spec.F),
        residual=ResidualEnsemble("none (all copies measured)", None),
        ledger=ResourceLedger(copies_measured=n, ebits_consumed=0.0),
        meta=_meta(spec, rule),
    )


def simulate_p0(spec: StateSpec, n: int, rule: DecisionRule,
                rng: np.random.Generator, trials: int = 1) -> SimulationResult:
    js = rule.model.sample(spec.F, trials, rng)
    return SimulationResult("p0", js, rule.decide(js))


# ---------------------------------------------------------------------------
# P1: error counting into one auxiliary


def run_p1(spec: StateSpec, n: int, d: int, rule: DecisionRule) -> ProtocolReport:
    """Analytic error-counting report.

    The ensemble survives; only a d-level auxiliary (log2 d ebits) is read
    out.  On amplitude damping the index distribution coincides with the
    copy-by-copy fail count."""
    model = rule.model
    if not isinstance(model, CounterDifferenceModel):
        raise UnsupportedCombinationError("p1 rule must use a counter model")
    ps = success_probability_witness(spec.F, rule)
    residual = _p1_residual(spec, n, expected_j=n * (1 - spec.F))
    return ProtocolReport(
        protocol="p1", family=spec.family.value, n=n,
        success_probability=ps,
        distribution=model.distribution(spec.F),
        residual=residual,
        ledger=ResourceLedger(copies_measured=0, ebits_consumed=math.log2(d),
                              copies_retained=n),
        meta=_meta(spec, rule, non_efficient=_non_efficient("p1", spec.family)),
    )


def _p1_residual(spec: StateSpec, n: int, expected_j: float,
                 realized_j: int | None = None) -> ResidualEnsemble:
    if spec.family is Family.AMPLITUDE_DAMPING:
        j = expected_j if realized_j is None else realized_j
        return ResidualEnsemble("correlated error-count ensemble",
                                (n - j) / n)
    # difference statistics do not pin the error count; no single-copy
    # fidelity claim is made
    return ResidualEnsemble("correlated difference-count ensemble", None)


def simulate_p1(spec: StateSpec, n: int, d: int, rule: DecisionRule,
                rng: np.random.Generator, trials: int = 1) -> SimulationResult:
    js = rule.model.sample(spec.F, trials, rng)
    residual = None
    if spec.family is Family.AMPLITUDE_DAMPING:
        residual = (n - js) / n
    return SimulationResult("p1", js, rule.decide(js), residual_fidelity=residual)


# ---------------------------------------------------------------------------
# P2: coarse graining


def p2_params(n: int, d: int, m: int, delta0: int | None, rule: DecisionRule,
              grouping: str = "ceil") -> CoarseParams:
    """Assemble coarse parameters, defaulting delta0 to the group interval
    holding the most likely index at the threshold fidelity."""
    if delta0 is None:
        pmf = rule.model.pmf(rule.F0)
        j0 = int(np.asarray(rule.model.support)[int(np.argmax(pmf))]) % d
        delta0 = default_delta0(j0, d, m, grouping)
    return CoarseParams(d, m, delta0, grouping)


def p2_outcome_probability(model: CounterDifferenceModel,
                           coarse: CoarseParams, F: float) -> float:
    """Probability of the "above" readout at true fidelity F."""
    reg = model.register_pmf(F)
    pm = _measure_prob_vector(coarse)
    return float(min(max(reg @ pm, 0.0), 1.0))


def _measure_prob_vector(coarse: CoarseParams) -> np.ndarray:
    g = group_values(coarse)
    d = coarse.d
    delta = (g[(np.arange(d)[:, None] + np.arange(d)[None, :]) % d]
             - g[:, None]) % coarse.m
    return np.count_nonzero(delta < coarse.delta0, axis=0) / d


def run_p2(spec: StateSpec, n: int, coarse: CoarseParams,
           rule: DecisionRule) -> ProtocolReport:
    """Analytic coarse-graining report.

    Outcome M decides "above".  The d-level auxiliary is recovered whenever
    the index lies in a deterministic readout class, so only the register
    teleport (log2 m ebits) is billed."""
    model = rule.model
    if not isinstance(model, CounterDifferenceModel):
        raise UnsupportedCombinationError("p2 rule must use a counter model")
    if coarse.d != model.d:
        raise ValueError(f"coarse d={coarse.d} != model d={model.d}")
    p_above = p2_outcome_probability(model, coarse, spec.F)
    ps = p_above if spec.F >= rule.F0 else 1.0 - p_above
    return ProtocolReport(
        protocol="p2", family=spec.family.value, n=n,
        success_probability=ps,
        distribution=model.distribution(spec.F),
        residual=ResidualEnsemble("correlated ensemble, auxiliary recovered",
                                  None),
        ledger=ResourceLedger(copies_measured=0,
                              ebits_consumed=math.log2(coarse.m),
                              copies_retained=n),
        meta=_meta(spec, rule, non_efficient=_non_efficient("p2", spec.family),
                   coarse={"d": coarse.d, "m": coarse.m,
                           "delta0": coarse.delta0,
                           "grouping": coarse.grouping}),
    )


def simulate_p2(spec: StateSpec, n: int, coarse: CoarseParams,
                rule: DecisionRule, rng: np.random.Generator,
                trials: int = 1) -> SimulationResult:
    """Draw the counter index, then one uniform readout branch per trial."""
    model = rule.model
    js = model.sample(spec.F, trials, rng)
    g = group_values(coarse)
    k = rng.integers(0, coarse.d, size=trials)
    delta = (g[(k + js) % coarse.d] - g[k]) % coarse.m
    above = delta < coarse.delta0
    return SimulationResult("p2", js, above)


# ---------------------------------------------------------------------------
# P3: ensemble blocking


def p3_frame_weights(spec: StateSpec) -> np.ndarray:
    """Bell-index weights in the frame where parity counts the errors.

    Dephasing states are rotated so their noise flips amplitudes; all other
    families are depolarized to Werner form first."""
    if spec.family is Family.DEPHASING:
        return np.array([spec.F, 1.0 - spec.F, 0.0, 0.0])
    return np.array(depolarize(spec, Family.WERNER).bell_diagonal_weights())


def run_p3(spec: StateSpec, N: int, r: int, rule: DecisionRule,
           rounds: int = 1) -> ProtocolReport:
    """Analytic blocking report: one sacrificial copy per block per round."""
    model = rule.model
    if not isinstance(model, BlockParityModel):
        raise UnsupportedCombinationError("p3 rule must use a parity model")
    n_blocks = model.n
    if n_blocks != N // r:
        raise ValueError(f"rule built for {model.n} blocks, N//r={N // r}")
    if rounds != model.rounds:
        raise ValueError(f"rule built for {model.rounds} rounds, got {rounds}")
    ps = success_probability_witness(spec.F, rule)
    measured = n_blocks * rounds
    return ProtocolReport(
        protocol="p3", family=spec.family.value, n=N,
        success_probability=ps,
        distribution=model.distribution(spec.F),
        residual=ResidualEnsemble("post-parity blocks",
                                  backaction_fidelity(spec)),
        ledger=ResourceLedger(copies_measured=measured, ebits_consumed=0.0,
                              copies_retained=N - measured),
        meta=_meta(spec, rule, blocks=n_blocks, r=r, rounds=rounds),
    )


def simulate_p3(spec: StateSpec, N: int, r: int, rule: DecisionRule,
                rng: np.random.Generator, trials: int = 1,
                rounds: int = 1) -> SimulationResult:
    """Track every copy's Bell index through the parity rounds.

    Controls pick up the target's phase (back-action); each round measures
    one copy per still-certified block and discards odd-parity blocks from
    certification."""
    n_blocks = N // r
    weights = p3_frame_weights(spec)
    idx = rng.choice(4, size=(trials, n_blocks, r), p=weights).astype(np.uint8)
    phase, amp = idx >> 1, idx & 1
    alive = np.ones((trials, n_blocks), dtype=bool)
    measured = np.full(trials, n_blocks)
    all_even = np.ones((trials, n_blocks), dtype=bool)
    survivors = r
    for t in range(rounds):
        if t > 0:
            measured += alive.sum(axis=1)
        target = survivors - 1
        parity = np.bitwise_xor.reduce(amp[:, :, :survivors], axis=2)
        # back-action on the surviving controls of blocks still in play
        kick = np.where(alive, phase[:, :, target], 0).astype(np.uint8)
        phase[:, :, :target] ^= kick[:, :, None]
        even = parity == 0
        all_even &= np.where(alive, even, False)
        alive &= even
        survivors -= 1
    kappa = all_even.sum(axis=1)
    # mean fidelity over every unmeasured copy, all outcome branches included
    good = (phase[:, :, :survivors] == 0) & (amp[:, :, :survivors] == 0)
    residual = good.reshape(trials, -1).mean(axis=1)
    return SimulationResult("p3", kappa, rule.decide(kappa),
                            residual_fidelity=residual,
                            copies_measured=measured)


def optimize_block_size(mode: str, family: Family | str,
                        r_range: Iterable[int], *, F0: float | None = None,
                        F1: float | None = None, F2: float | None = None,
                        N: int | None = None, delta: float = 0.5) -> int:
    """Best block size for witnessing (integrated success) or discrimination
    (largest even-parity probability gap).  Ties break to the smaller r."""
    family = parse_family(family)
    r_list = sorted(set(int(r) for r in r_range))
    if not r_list or r_list[0] < 2:
        raise ValueError("r_range must contain integers >= 2")
    if mode == "discriminate":
        if F1 is None or F2 is None:
            raise ValueError("discriminate mode needs F1 and F2")
        frame = family if family is Family.DEPHASING else Family.WERNER
        probe = BlockParityModel(1, 2, frame)
        gaps = [probe.pi0(F1, r) - probe.pi0(F2, r) for r in r_list]
        return r_list[int(np.argmax(gaps))]
    if mode == "witness":
        if F0 is None or N is None:
            raise ValueError("witness mode needs F0 and N")
        scores = []
        for r in r_list:
            if N // r < 1:
                scores.append(-np.inf)
                continue
            rule = witness_rule("p3", family, F0, delta, N=N, r=r)
            scores.append(_integrated_success(rule))
        return r_list[int(np.argmax(scores))]
    raise ValueError(f"unknown mode {mode!r}")


def _integrated_success(rule: DecisionRule) -> float:
    """integral of P_s(F) dF over [0, 1], exact for polynomial models."""
    model = rule.model
    degree = getattr(model, "r", 1) * model.n

    def part(lo, hi, mask):
        if hi <= lo:
            return 0.0
        npts = max(degree // 2 + 2, 4)
        x, w = np.polynomial.legendre.leggauss(npts)
        half = (hi - lo) / 2.0
        xs = lo + half * (x + 1.0)
        vals = np.array([model.pmf(F)[mask].sum() for F in xs])
        return float(w @ vals * half)

    return (part(0.0, rule.F0, ~rule.mask) + part(rule.F0, 1.0, rule.mask))


# ---------------------------------------------------------------------------
# discrimination wrappers


def discriminate(protocol: str, family: Family | str, F1: float, F2: float,
                 eta1: float = 0.5, **model_kwargs) -> dict:
    """Likelihood-rule discrimination summary for any protocol statistic."""
    model = witness_model(protocol, family, **model_kwargs)
    rule = discrimination_rule(model, F1, F2)
    ps = success_probability_discriminate(rule, eta1)
    return {"protocol": protocol, "F1": F1, "F2": F2, "eta1": eta1,
            "success_probability": ps, "rule": rule}


def simulate_discriminate(rule: DiscriminationRule, true_F: float,
                          rng: np.random.Generator, trials: int = 1):
    outcomes = rule.model.sample(true_F, trials, rng)
    return outcomes, rule.decide_f1(outcomes)


def _meta(spec: StateSpec, rule, **extra) -> dict:
    meta = {"F": spec.F, "F0": getattr(rule, "F0", None),
            "delta": getattr(rule, "delta", None)}
    if getattr(rule, "F0", None) is not None and spec.F == rule.F0:
        meta["boundary"] = True
    meta.update({k: v for k, v in extra.items() if v is not None and v is not False})
    return meta
