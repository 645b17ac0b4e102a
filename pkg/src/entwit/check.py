"""Symbolic-versus-dense consistency suite.

Each check recomputes a quantity along the fast symbolic path and along the
brute-force matrix path and reports the largest deviation.  The CLI exposes
the suite behind ``oracle-check`` and the ``--oracle`` flag; tests run it
directly.  A deliberately corrupted grouping is available as a negative
control for the harness itself.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import oracle
from .gates import CoarseParams, coarse_measure_probs, lambda_sets
from .protocols import backaction_fidelity, p2_outcome_probability
from .resources import recurrence_step
from .states import Family, make_state
from .stats import BlockParityModel, CounterDifferenceModel, strategy_for

TOL = 1e-9


@dataclass(frozen=True)
class CheckResult:
    name: str
    max_err: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.max_err < self.tol


def _corrupt_probs(params: CoarseParams) -> np.ndarray:
    """Deliberately wrong readout response: group offsets clipped instead of
    wrapped.  Used only as a negative control."""
    dt = params.group_size
    g = np.minimum(-(-np.arange(params.d) // dt), params.m - 1)
    delta = (g[(np.arange(params.d)[:, None] + np.arange(params.d)[None, :])
               % params.d] - g[:, None]) % params.m
    return np.count_nonzero(delta < params.delta0, axis=0) / params.d


def check_pass_probabilities(f_grid=None) -> CheckResult:
    """Single-copy pass probability: strategy formula vs Born rule."""
    if f_grid is None:
        f_grid = np.linspace(0.0, 1.0, 11)
    err = 0.0
    for family in (Family.AMPLITUDE_DAMPING, Family.DEPHASING, Family.WERNER):
        strat = strategy_for(family)
        for f in f_grid:
            spec = make_state(family, float(f))
            err = max(err, abs(strat.pass_prob(f) - oracle.pass_fail_prob(spec)))
    return CheckResult("p0 pass probability", err, TOL)


def check_eng_distributions(max_n: int = 3, f_values=(0.3, 0.7, 0.95)) -> CheckResult:
    """Counter cascade index law: convolution vs gate matrices."""
    err = 0.0
    cases = []
    for n in range(1, max_n + 1):
        cases.append((Family.AMPLITUDE_DAMPING, n, n + 1))
        cases.append((Family.AMPLITUDE_DAMPING, n, n + 2))
        if 4 ** n * (2 * n + 1) ** 2 <= oracle.VEC_DIM_CAP:
            cases.append((Family.WERNER, n, 2 * n + 1))
    for family, n, d in cases:
        model = CounterDifferenceModel(n, d, family)
        for f in f_values:
            spec = make_state(family, f)
            got = model.register_pmf(f)
            want = oracle.eng_distribution(spec, n, d)
            err = max(err, float(np.abs(got - want).max()))
    return CheckResult("p1 counter distribution", err, TOL)


def check_coarse_probs(dims=((4, 2), (6, 3), (8, 4), (8, 2)),
                       corrupt: bool = False) -> CheckResult:
    """Readout response Pr(M|j): symbolic count vs dense POVM."""
    err = 0.0
    for d, m in dims:
        for delta0 in sorted({1, m // 2 or 1, m}):
            params = CoarseParams(d, m, delta0)
            got = (_corrupt_probs(params) if corrupt
                   else coarse_measure_probs(params))
            want = np.array([oracle.p2_measure_prob(j, params)
                             for j in range(d)])
            err = max(err, float(np.abs(got - want).max()))
    return CheckResult("p2 readout response", err, TOL)


def check_p2_recovery(dims=((8, 4), (12, 4), (16, 4)),
                      delta0s=(1, 2)) -> CheckResult:
    """Auxiliary recovery is exact on the deterministic readout classes."""
    err = 0.0
    for d, m in dims:
        for delta0 in delta0s:
            params = CoarseParams(d, m, delta0)
            sets = lambda_sets(params)
            for j in (*sets.lam1, *sets.lam3):
                _, fid = oracle.p2_recovery(j, params)
                err = max(err, 1.0 - fid)
    return CheckResult("p2 auxiliary recovery", err, TOL)


def check_p2_success(f_values=(0.5, 0.9)) -> CheckResult:
    """Full coarse-grained decision probability, symbolic vs dense."""
    err = 0.0
    for d, m in ((4, 2), (8, 4)):
        n = 3
        params = CoarseParams(d, m, max(1, m // 2))
        model = CounterDifferenceModel(n, d, Family.AMPLITUDE_DAMPING)
        for f in f_values:
            spec = make_state(Family.AMPLITUDE_DAMPING, f)
            got = p2_outcome_probability(model, params, f)
            want = oracle.p2_success_probability(spec, n, params, True)
            err = max(err, abs(got - want))
    return CheckResult("p2 outcome probability", err, TOL)


def check_parity_distributions(f_values=(0.4, 0.8)) -> CheckResult:
    """Blocking statistic law: binomial model vs dense CNOT pipeline."""
    err = 0.0
    cases = [(Family.WERNER, 1, 2), (Family.WERNER, 1, 3), (Family.WERNER, 2, 2),
             (Family.DEPHASING, 1, 3), (Family.DEPHASING, 2, 2),
             (Family.AMPLITUDE_DAMPING, 2, 2)]
    for family, n_blocks, r in cases:
        frame = family if family is Family.DEPHASING else Family.WERNER
        model = BlockParityModel(n_blocks, r, frame)
        for f in f_values:
            got = model.pmf(f)
            want = oracle.kappa_distribution(make_state(family, f), n_blocks, r)
            err = max(err, float(np.abs(got - want).max()))
    return CheckResult("p3 parity distribution", err, TOL)


def check_backaction(f_values=(0.25, 0.7, 0.9, 1.0)) -> CheckResult:
    """Post-parity copy fidelity: closed form vs dense post-selection."""
    err = 0.0
    for f in f_values:
        for family in (Family.WERNER, Family.DEPHASING):
            spec = make_state(family, f)
            got = backaction_fidelity(spec)
            want = oracle.backaction_fidelity(spec)
            err = max(err, abs(got - want))
    return CheckResult("p3 back-action fidelity", err, TOL)


def check_recurrence(samples=((1.0, 0.0, 0.0, 0.0),
                              (0.25, 0.25, 0.25, 0.25),
                              (0.7, 0.1, 0.1, 0.1),
                              (0.5, 0.3, 0.15, 0.05))) -> CheckResult:
    """Recurrence coefficient map vs the dense two-pair circuit."""
    err = 0.0
    for w in samples:
        got_w, got_p = recurrence_step(w)
        want_w, want_p = oracle.recurrence_circuit(w)
        err = max(err, abs(got_p - want_p),
                  float(np.abs(np.array(got_w) - np.array(want_w)).max()))
    return CheckResult("recurrence map", err, TOL)


def run_suite(scale: str = "small", corrupt_grouping: bool = False) -> list[CheckResult]:
    """Run the whole suite; "full" widens the instance sizes."""
    if scale not in ("small", "full"):
        raise ValueError(f"unknown scale {scale!r}")
    full = scale == "full"
    results = [
        check_pass_probabilities(),
        check_eng_distributions(max_n=4 if full else 3),
        check_coarse_probs(
            dims=((4, 2), (6, 3), (8, 4), (8, 2), (12, 6), (24, 12)) if full
            else ((4, 2), (6, 3), (8, 4), (8, 2)),
            corrupt=corrupt_grouping),
        check_p2_recovery(
            dims=((8, 4), (12, 4), (16, 4), (16, 8)) if full
            else ((8, 4), (12, 4))),
        check_p2_success(),
        check_parity_distributions(),
        check_backaction(),
        check_recurrence(),
    ]
    return results
