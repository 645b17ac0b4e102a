"""Outcome statistics and decision machinery for witnessing/discrimination.

Every protocol reduces to a discrete statistic whose law is a polynomial in
the copy fidelity F.  The models here expose that law (in log space), the
Bayesian acceptance sets under a flat prior, exact success probabilities and
the Chernoff/trace-distance style bounds.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import betaincc, gammaln, logsumexp, rel_entr

from .errors import UnsupportedCombinationError
from .states import Family, make_state, shift_class_probabilities

NORM_ATOL = 1e-10


@dataclass(frozen=True)
class OutcomeDistribution:
    """Exact probability vector over a contiguous integer statistic,
    stored in log space."""

    lo: int
    log_probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "log_probs", np.asarray(self.log_probs, float))
        total = np.exp(logsumexp(self.log_probs))
        if abs(total - 1.0) > NORM_ATOL:
            raise ValueError(f"distribution sums to {total}, expected 1")

    @classmethod
    def from_probs(cls, lo: int, probs: np.ndarray) -> "OutcomeDistribution":
        probs = np.asarray(probs, float)
        with np.errstate(divide="ignore"):
            return cls(lo, np.log(probs))

    @property
    def hi(self) -> int:
        return self.lo + len(self.log_probs) - 1

    @property
    def support(self) -> np.ndarray:
        return np.arange(self.lo, self.hi + 1)

    @property
    def probs(self) -> np.ndarray:
        return np.exp(self.log_probs)

    def to_json(self) -> dict:
        return {"support": [int(self.lo), int(self.hi)],
                "probs": [float(p) for p in self.probs]}


@dataclass(frozen=True)
class MeasurementStrategy:
    """Single-copy two-outcome test: spectral gap nu and pass probability."""

    nu: float
    label: str

    def pass_prob(self, F: float) -> float:
        return 1.0 - (1.0 - F) * self.nu


def strategy_for(family: Family) -> MeasurementStrategy:
    """Optimal local pass/fail test per family.

    Amplitude damping and dephasing admit a gap-1 test (computational and
    conjugate basis coincidence respectively); Werner and unknown states are
    limited to the optimal Bell-verification gap 2/3.
    """
    if family in (Family.AMPLITUDE_DAMPING, Family.DEPHASING):
        return MeasurementStrategy(1.0, family.value)
    return MeasurementStrategy(2.0 / 3.0, family.value)


def _log_binom_pmf(j: np.ndarray, n: int, p: float) -> np.ndarray:
    """Binomial log-pmf via log-gamma, stable for large n."""
    j = np.asarray(j)
    with np.errstate(divide="ignore", invalid="ignore"):
        logp = np.where(p > 0, np.log(p), -np.inf)
        log1p_ = np.where(p < 1, np.log1p(-p), -np.inf)
        out = (gammaln(n + 1) - gammaln(j + 1) - gammaln(n - j + 1)
               + np.where(j > 0, j * logp, 0.0)
               + np.where(n - j > 0, (n - j) * log1p_, 0.0))
    return out


def _gauss_legendre(lo: float, hi: float, degree: int):
    """Nodes/weights integrating polynomials of the given degree exactly."""
    npts = max(degree // 2 + 2, 4)
    x, w = np.polynomial.legendre.leggauss(npts)
    half = (hi - lo) / 2.0
    return lo + half * (x + 1.0), w * half


class BinomialFailModel:
    """Fail-count statistic j ~ Binomial(n, (1-F) nu).

    Covers the copy-by-copy protocol for every family and the error-counting
    protocol on amplitude-damping states (where the counter index follows the
    same law with nu = 1).
    """

    def __init__(self, n: int, nu: float = 1.0, label: str = "binomial"):
        if n < 1:
            raise ValueError(f"ensemble size must be >= 1, got {n}")
        if not 0.0 < nu <= 1.0:
            raise ValueError(f"spectral gap must lie in (0, 1], got {nu}")
        self.n = int(n)
        self.nu = float(nu)
        self.label = label
        self.support = np.arange(self.n + 1)

    def fail_prob(self, F: float) -> float:
        return (1.0 - F) * self.nu

    def logpmf(self, F: float) -> np.ndarray:
        return _log_binom_pmf(self.support, self.n, self.fail_prob(F))

    def pmf(self, F: float) -> np.ndarray:
        return np.exp(self.logpmf(F))

    def distribution(self, F: float) -> OutcomeDistribution:
        return OutcomeDistribution(0, self.logpmf(F))

    def posterior_above(self, F0: float) -> np.ndarray:
        """Pr(F > F0 | j) under a flat prior on F, for every j at once.

        With u = 1 - (1-F) nu the likelihood is u^(n-j) (1-u)^j on
        u in [1-nu, 1], so the posterior is a ratio of regularized
        incomplete beta functions.
        """
        j = self.support
        a = self.n - j + 1.0
        b = j + 1.0
        top = betaincc(a, b, 1.0 - (1.0 - F0) * self.nu)
        bottom = betaincc(a, b, 1.0 - self.nu)
        return top / bottom

    def sample(self, F: float, trials: int, rng: np.random.Generator) -> np.ndarray:
        return rng.binomial(self.n, self.fail_prob(F), size=trials)


class CounterDifferenceModel:
    """Counter index after folding n copies into a d-level auxiliary.

    The per-copy law over shifts {0, +1, -1} comes from the state family at
    fidelity F; the index distribution is the n-fold convolution over Z_d.
    When d >= 2n+1 no wraparound can occur and the support is reported as
    the signed difference j in [-n, n].
    """

    def __init__(self, n: int, d: int, family: Family, label: str = "counter"):
        if n < 1:
            raise ValueError(f"ensemble size must be >= 1, got {n}")
        if family is Family.DEPHASING:
            raise UnsupportedCombinationError(
                "counter statistics carry no information for dephasing states")
        if family is Family.AMPLITUDE_DAMPING:
            if d < n + 1:
                raise ValueError(f"need d >= n+1 for exact counting, got d={d}")
        elif d < 2 * n + 1:
            raise ValueError(f"need d >= 2n+1 for difference counting, got d={d}")
        self.n = int(n)
        self.d = int(d)
        self.family = family
        self.label = label
        self.signed = family is not Family.AMPLITUDE_DAMPING
        if self.signed:
            self.support = np.arange(-self.n, self.n + 1)
        else:
            self.support = np.arange(self.n + 1)

    def per_copy(self, F: float) -> tuple[float, float, float]:
        """(stay, up, down) shift probabilities of one copy."""
        return shift_class_probabilities(make_state(self.family, F))

    def register_pmf(self, F: float) -> np.ndarray:
        """Distribution over the raw register value in Z_d."""
        stay, up, down = self.per_copy(F)
        step = np.zeros(self.d)
        step[0] = stay
        step[1 % self.d] += up
        step[-1 % self.d] += down
        out = np.zeros(self.d)
        out[0] = 1.0
        for _ in range(self.n):
            out = _cyclic_convolve(out, step)
        return out

    def pmf(self, F: float) -> np.ndarray:
        reg = self.register_pmf(F)
        return reg[self.support % self.d]

    def logpmf(self, F: float) -> np.ndarray:
        with np.errstate(divide="ignore"):
            return np.log(self.pmf(F))

    def distribution(self, F: float) -> OutcomeDistribution:
        return OutcomeDistribution(int(self.support[0]), self.logpmf(F))

    def posterior_above(self, F0: float) -> np.ndarray:
        return _quadrature_posterior(self, F0, degree=self.n)

    def sample(self, F: float, trials: int, rng: np.random.Generator) -> np.ndarray:
        stay, up, down = self.per_copy(F)
        counts = rng.multinomial(self.n, [stay, up, down], size=trials)
        diff = counts[:, 1] - counts[:, 2]
        if self.signed:
            return diff
        return diff % self.d


def _cyclic_convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    d = len(a)
    out = np.zeros(d)
    for shift, weight in enumerate(b):
        if weight != 0.0:
            out += weight * np.roll(a, shift)
    return out


class BlockParityModel:
    """Number of blocks returning even amplitude parity in every round.

    Werner-form states flip their amplitude index with probability 1 - A,
    A = (1+2F)/3; dephasing states, handled in the conjugate frame, flip
    with probability 1 - F.  kappa ~ Binomial(n_blocks, q) where q is the
    all-rounds-even probability of one block.
    """

    def __init__(self, n_blocks: int, r: int, family: Family,
                 rounds: int = 1, label: str = "parity"):
        if r < 2:
            raise ValueError(f"block size must be >= 2, got {r}")
        if n_blocks < 1:
            raise ValueError(f"need at least one block, got {n_blocks}")
        if not 1 <= rounds <= r - 1:
            raise ValueError(f"rounds={rounds} outside [1, r-1]")
        self.n = int(n_blocks)
        self.r = int(r)
        self.family = family
        self.rounds = int(rounds)
        self.label = label
        self.support = np.arange(self.n + 1)

    def amp0_prob(self, F: float) -> float:
        """Probability that one copy carries amplitude index 0."""
        if self.family is Family.DEPHASING:
            return F
        return (1.0 + 2.0 * F) / 3.0

    def pi0(self, F: float, r: int | None = None) -> float:
        """Even-parity probability of a block of size r."""
        r = self.r if r is None else r
        a = self.amp0_prob(F)
        return 0.5 * (1.0 + (2.0 * a - 1.0) ** r)

    def block_pass_prob(self, F: float) -> float:
        """Probability one block reads even parity in all rounds.

        Round t+1 re-measures the parity of the r-t survivors of an
        all-even block; conditioning peels off one definite-unflipped copy
        per round."""
        a = self.amp0_prob(F)
        t = self.rounds
        return a ** (t - 1) * 0.5 * (1.0 + (2.0 * a - 1.0) ** (self.r - t + 1))

    def logpmf(self, F: float) -> np.ndarray:
        # kappa counts passing blocks, so the binomial is over q directly
        return _log_binom_pmf(self.support, self.n, self.block_pass_prob(F))

    def pmf(self, F: float) -> np.ndarray:
        return np.exp(self.logpmf(F))

    def distribution(self, F: float) -> OutcomeDistribution:
        return OutcomeDistribution(0, self.logpmf(F))

    def posterior_above(self, F0: float) -> np.ndarray:
        return _quadrature_posterior(self, F0, degree=self.r * self.n)

    def sample(self, F: float, trials: int, rng: np.random.Generator) -> np.ndarray:
        return rng.binomial(self.n, self.block_pass_prob(F), size=trials)


def _quadrature_posterior(model, F0: float, degree: int) -> np.ndarray:
    """Flat-prior Pr(F > F0 | j) for models with polynomial likelihoods.

    Gauss-Legendre quadrature sized to the polynomial degree makes both
    integrals exact to rounding.
    """

    def integral(lo, hi):
        if hi <= lo:
            return np.zeros(len(model.support))
        x, w = _gauss_legendre(lo, hi, degree)
        vals = np.stack([model.pmf(F) for F in x])
        return w @ vals

    top = integral(F0, 1.0)
    bottom = integral(0.0, F0) + top
    with np.errstate(invalid="ignore", divide="ignore"):
        post = np.where(bottom > 0, top / np.maximum(bottom, 1e-300), 0.0)
    return post


@dataclass(frozen=True)
class DecisionRule:
    """Acceptance set for the witnessing problem: outcomes in sigma decide
    "fidelity above the threshold"."""

    model: object
    F0: float
    delta: float
    mask: np.ndarray = field(repr=False)

    @property
    def sigma(self) -> np.ndarray:
        return np.asarray(self.model.support)[self.mask]

    def decide(self, outcome) -> np.ndarray:
        """True where the outcome maps to "above"."""
        support = np.asarray(self.model.support)
        idx = np.searchsorted(support, np.asarray(outcome))
        idx = np.clip(idx, 0, len(support) - 1)
        valid = support[idx] == np.asarray(outcome)
        return np.where(valid, self.mask[idx], False)

    def to_json(self) -> dict:
        return {
            "F0": self.F0,
            "delta": self.delta,
            "sigma": [int(j) for j in self.sigma],
        }


def build_sigma(model, F0: float, delta: float) -> DecisionRule:
    """Bayesian acceptance set: outcomes whose flat-prior posterior mass
    above F0 exceeds delta."""
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if not 0.0 <= F0 <= 1.0:
        raise ValueError(f"threshold must lie in [0, 1], got {F0}")
    post = model.posterior_above(F0)
    return DecisionRule(model=model, F0=F0, delta=delta, mask=post > delta)


def success_probability_witness(F: float, rule: DecisionRule) -> float:
    """Probability that the rule's verdict matches the true side of F0.

    F exactly at the threshold is evaluated on the "above" branch; the
    boundary has zero prior measure and callers flag it separately.
    """
    probs = rule.model.pmf(F)
    if F >= rule.F0:
        return _clip01(probs[rule.mask].sum())
    return _clip01(probs[~rule.mask].sum())


def _clip01(x: float) -> float:
    return float(min(max(x, 0.0), 1.0))


@dataclass(frozen=True)
class DiscriminationRule:
    """Likelihood partition for the two-point fidelity promise."""

    model: object
    F1: float
    F2: float
    mask1: np.ndarray = field(repr=False)

    @property
    def sigma1(self) -> np.ndarray:
        return np.asarray(self.model.support)[self.mask1]

    @property
    def sigma2(self) -> np.ndarray:
        return np.asarray(self.model.support)[~self.mask1]

    def decide_f1(self, outcome) -> np.ndarray:
        support = np.asarray(self.model.support)
        idx = np.clip(np.searchsorted(support, np.asarray(outcome)),
                      0, len(support) - 1)
        return self.mask1[idx]

    def to_json(self) -> dict:
        return {
            "F1": self.F1,
            "F2": self.F2,
            "sigma1": [int(j) for j in self.sigma1],
        }


def discrimination_rule(model, F1: float, F2: float) -> DiscriminationRule:
    """Partition outcomes by likelihood ratio; ties report F1."""
    if F1 <= F2:
        raise ValueError(f"need F1 > F2, got F1={F1}, F2={F2}")
    lp1 = model.logpmf(F1)
    lp2 = model.logpmf(F2)
    return DiscriminationRule(model=model, F1=F1, F2=F2, mask1=lp1 >= lp2)


def success_probability_discriminate(rule: DiscriminationRule,
                                     eta1: float = 0.5) -> float:
    """Average success of the likelihood rule under priors (eta1, 1-eta1)."""
    if not 0.0 <= eta1 <= 1.0:
        raise ValueError(f"prior must lie in [0, 1], got {eta1}")
    p1 = rule.model.pmf(rule.F1)
    p2 = rule.model.pmf(rule.F2)
    return _clip01(eta1 * p1[rule.mask1].sum() + (1 - eta1) * p2[~rule.mask1].sum())


def kl_divergence(s: np.ndarray, q: np.ndarray) -> float:
    """D(S || Q) in nats over a shared support."""
    s = np.asarray(s, float)
    q = np.asarray(q, float)
    if s.shape != q.shape:
        raise ValueError("distributions must share a support")
    return float(rel_entr(s, q).sum())


def bernoulli_kl(p: float, q: float) -> float:
    return kl_divergence(np.array([p, 1 - p]), np.array([q, 1 - q]))


def chernoff_bound(n: int, F: float, F0: float, nu: float = 1.0) -> float:
    """Chernoff-Hoeffding lower bound on the witnessing success probability
    for the hard-cut rule "above iff fail rate < (1-F0) nu"."""
    q0 = (1.0 - F0) * nu
    q = (1.0 - F) * nu
    return 1.0 - math.exp(-n * bernoulli_kl(q0, q))
