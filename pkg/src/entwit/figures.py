"""Deterministic CSV data behind the standard figures.

Every emitted file has a header row and one curve per file, except the
four-protocol comparison which is a single tall table.  Schemas:

  fig3a_delta*.csv / fig3b_n*.csv   F,Ps
  fig4_d*.csv                       j,PrM
  fig5a_d*/fig5b_delta0*/fig5c_m*   F,Ps
  fig5d_delta0*.csv                 j,fidelity
  fig7b_*.csv                       F,Ps
  fig7c.csv                         r,gap
  fig7d.csv                         F,Fprime
  fig8.csv                          F,protocol,P_s,copies_measured,ebits,copies_equiv,R

All data paths are analytic, so identical invocations produce identical
bytes.  ENTWIT_THREADS caps the sweep worker pool.
"""

from __future__ import annotations

import csv
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from . import oracle
from .gates import CoarseParams, coarse_measure_probs
from .protocols import (backaction_fidelity, p2_outcome_probability, p2_params,
                        witness_model, witness_rule)
from .resources import compare_protocols
from .states import Family, make_state
from .stats import BlockParityModel, success_probability_witness

F_GRID = np.round(np.linspace(0.0, 1.0, 201), 10)


def worker_count() -> int:
    env = os.environ.get("ENTWIT_THREADS", "").strip()
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def _pmap(fn: Callable, items: Sequence):
    if len(items) <= 1 or worker_count() == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        return list(pool.map(fn, items))


def write_csv(path: Path, header: Sequence[str],
              rows: Iterable[Sequence]) -> Path:
    """Write atomically: rows land in a temp file that is schema-checked
    before it replaces the target."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = [[_fmt(v) for v in row] for row in rows]
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"row width {len(row)} != header width {len(header)}")
    fd, tmp = tempfile.mkstemp(dir=path.parent, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(header)
            writer.writerows(rows)
        with open(tmp, newline="") as fh:
            got = next(csv.reader(fh))
            if got != list(header):
                raise ValueError(f"schema self-check failed for {path}")
        os.replace(tmp, path)
    finally:
        if os.path.exists(tmp):
            os.unlink(tmp)
    return path


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def _witness_curve(rule, f_grid=F_GRID) -> list[tuple[float, float]]:
    ps = _pmap(lambda f: success_probability_witness(float(f), rule), list(f_grid))
    return list(zip((float(f) for f in f_grid), ps))


def fig3a(outdir: Path, n: int = 20, F0: float = 0.9,
          deltas=(0.3, 0.5, 0.7)) -> list[Path]:
    """Success probability of the (identical) p0/p1 statistics at several
    acceptance thresholds."""
    paths = []
    for delta in deltas:
        rule = witness_rule("p1", Family.AMPLITUDE_DAMPING, F0, delta, n=n)
        tag = f"{delta:.1f}".replace(".", "")
        paths.append(write_csv(outdir / f"fig3a_delta{tag}.csv",
                               ["F", "Ps"], _witness_curve(rule)))
    return paths


def fig3b(outdir: Path, F0: float = 0.9, delta: float = 0.5,
          sizes=(10, 20, 40)) -> list[Path]:
    paths = []
    for n in sizes:
        rule = witness_rule("p1", Family.AMPLITUDE_DAMPING, F0, delta, n=n)
        paths.append(write_csv(outdir / f"fig3b_n{n}.csv",
                               ["F", "Ps"], _witness_curve(rule)))
    return paths


def fig4(outdir: Path, m: int = 12, delta0: int = 6,
         dims=(24, 48)) -> list[Path]:
    """Readout response versus the auxiliary index, plateau structure."""
    paths = []
    for d in dims:
        params = CoarseParams(d, m, delta0)
        probs = coarse_measure_probs(params)
        rows = [(j, float(p)) for j, p in enumerate(probs)]
        paths.append(write_csv(outdir / f"fig4_d{d}.csv", ["j", "PrM"], rows))
    return paths


def _p2_curve(n: int, coarse: CoarseParams, F0: float) -> list[tuple[float, float]]:
    model = witness_model("p2", Family.AMPLITUDE_DAMPING, n=n, d=coarse.d)

    def ps(f):
        p_above = p2_outcome_probability(model, coarse, float(f))
        return p_above if f >= F0 else 1.0 - p_above

    return list(zip((float(f) for f in F_GRID), _pmap(ps, list(F_GRID))))


def fig5(outdir: Path, F0: float = 0.9) -> list[Path]:
    """Coarse-graining performance panels: dimension, threshold and register
    sweeps, plus the dense recovered-fidelity curve."""
    paths = []
    # (a) fixed register, growing auxiliary
    for d in (24, 48, 96):
        n = d - 1
        rule = witness_rule("p2", Family.AMPLITUDE_DAMPING, F0, 0.5, n=n, d=d)
        coarse = p2_params(n, d, 12, None, rule)
        paths.append(write_csv(outdir / f"fig5a_d{d}.csv", ["F", "Ps"],
                               _p2_curve(n, coarse, F0)))
    # (b) fixed auxiliary, sweep delta0
    for delta0 in (2, 4, 6):
        coarse = CoarseParams(48, 12, delta0)
        paths.append(write_csv(outdir / f"fig5b_delta0{delta0}.csv", ["F", "Ps"],
                               _p2_curve(47, coarse, F0)))
    # (c) fixed auxiliary, sweep register size
    for m in (6, 12, 24):
        rule = witness_rule("p2", Family.AMPLITUDE_DAMPING, F0, 0.5, n=47, d=48)
        coarse = p2_params(47, 48, m, None, rule)
        paths.append(write_csv(outdir / f"fig5c_m{m}.csv", ["F", "Ps"],
                               _p2_curve(47, coarse, F0)))
    # (d) recovered auxiliary fidelity from the dense pipeline
    for delta0 in (1, 2, 3):
        params = CoarseParams(16, 4, delta0)
        rows = []
        for j in range(params.d):
            _, fid = oracle.p2_recovery(j, params)
            rows.append((j, fid))
        paths.append(write_csv(outdir / f"fig5d_delta0{delta0}.csv",
                               ["j", "fidelity"], rows))
    return paths


def fig7(outdir: Path, F0: float = 0.97, N: int = 120) -> list[Path]:
    """Blocking performance: witness curves, block-size gap and back-action."""
    paths = []
    for protocol, kwargs, tag in (
            ("p0", {"n": N}, "p0"),
            ("p3", {"N": N, "r": 3}, "p3_r3"),
            ("p3", {"N": N, "r": 6}, "p3_r6")):
        rule = witness_rule(protocol, Family.WERNER, F0, 0.5, **kwargs)
        paths.append(write_csv(outdir / f"fig7b_{tag}.csv", ["F", "Ps"],
                               _witness_curve(rule)))
    probe = BlockParityModel(1, 2, Family.WERNER)
    rows = [(r, probe.pi0(0.99, r) - probe.pi0(0.95, r)) for r in range(2, 101)]
    paths.append(write_csv(outdir / "fig7c.csv", ["r", "gap"], rows))
    rows = [(float(f), backaction_fidelity(make_state(Family.WERNER, float(f))))
            for f in F_GRID]
    paths.append(write_csv(outdir / "fig7d.csv", ["F", "Fprime"], rows))
    return paths


def fig8(outdir: Path, config: dict | None = None) -> list[Path]:
    """Four-protocol resource comparison at the published parameter set."""
    rows = compare_protocols(Family.AMPLITUDE_DAMPING, config=config)
    table = [(r.F, r.protocol, r.P_s, r.copies_measured, r.ebits,
              r.copies_equiv, r.R) for r in rows]
    path = write_csv(outdir / "fig8.csv",
                     ["F", "protocol", "P_s", "copies_measured", "ebits",
                      "copies_equiv", "R"], table)
    return [path]


FIGURES: dict[str, Callable[[Path], list[Path]]] = {
    "fig3a": fig3a,
    "fig3b": fig3b,
    "fig4": fig4,
    "fig5": fig5,
    "fig7": fig7,
    "fig8": fig8,
}


def generate(which: str, outdir: Path) -> list[Path]:
    if which not in FIGURES:
        raise ValueError(f"unknown figure id {which!r}; "
                         f"choose from {sorted(FIGURES)}")
    return FIGURES[which](Path(outdir))
