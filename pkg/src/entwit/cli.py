"""Command-line front end.

Subcommands: ``witness``, ``discriminate``, ``figure``, ``oracle-check``.
Flags may also be supplied through a JSON config file (``--config``); explicit
flags win.  Exit codes: 0 ok, 2 usage/invalid config, 3 unsupported
protocol/family combination, 4 oracle mismatch.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import check, figures
from .errors import (DimensionCapError, EntwitError, OracleMismatchError,
                     UnsupportedCombinationError)
from .protocols import (discriminate, optimize_block_size, p2_params, run_p0,
                        run_p1, run_p2, run_p3, simulate_p0, simulate_p1,
                        simulate_p2, simulate_p3, simulate_discriminate,
                        witness_rule)
from .states import Family, StateSpec, parse_family
from .stats import success_probability_witness

USAGE_EXIT = 2
UNSUPPORTED_EXIT = 3
ORACLE_EXIT = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="entwit",
        description="fidelity witnessing and discrimination on noisy "
                    "entangled-state ensembles")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--config", type=Path,
                       help="JSON file with default flag values")
        p.add_argument("--protocol", choices=("p0", "p1", "p2", "p3"))
        p.add_argument("--family",
                       help="amp | dephasing | werner | bell_diagonal")
        p.add_argument("--n", type=int, help="ensemble size (N for p3)")
        p.add_argument("--d", type=int, help="auxiliary dimension (p1/p2)")
        p.add_argument("--m", type=int, help="extra register dimension (p2)")
        p.add_argument("--delta0", type=int,
                       help="coarse threshold group (p2, default: auto)")
        p.add_argument("--r", type=int, help="block size (p3)")
        p.add_argument("--auto-r", action="store_true",
                       help="optimize the block size (p3)")
        p.add_argument("--rounds", type=int, default=1,
                       help="parity rounds (p3)")
        p.add_argument("--trials", type=int,
                       help="Monte Carlo trials (requires --seed)")
        p.add_argument("--seed", type=int, help="RNG seed")
        p.add_argument("--oracle", action="store_true",
                       help="cross-check against the dense oracle suite")
        p.add_argument("--out", type=Path, help="report/CSV output path")
        p.add_argument("--format", choices=("csv", "json"),
                       help="output format (default: json report, csv sweep)")
        p.add_argument("--grouping", choices=("ceil", "floor"), default="ceil")

    w = sub.add_parser("witness", help="decide F > F0 vs F < F0")
    common(w)
    w.add_argument("--F", type=float, help="true fidelity of the ensemble")
    w.add_argument("--F-grid", dest="f_grid",
                   help="lo:hi:steps sweep over the true fidelity")
    w.add_argument("--F0", type=float, help="threshold fidelity")
    w.add_argument("--delta", type=float, default=0.5,
                   help="posterior acceptance threshold")

    d = sub.add_parser("discriminate", help="decide F1 vs F2")
    common(d)
    d.add_argument("--F", type=float,
                   help="true fidelity used for simulation (default F1)")
    d.add_argument("--F1", type=float, help="first promised fidelity")
    d.add_argument("--F2", type=float, help="second promised fidelity")
    d.add_argument("--eta1", type=float, default=0.5,
                   help="prior probability of F1")

    f = sub.add_parser("figure", help="emit CSV data for a standard figure")
    f.add_argument("which", choices=sorted(figures.FIGURES))
    f.add_argument("--out", type=Path, default=Path("figdata"),
                   help="output directory")

    o = sub.add_parser("oracle-check", help="symbolic vs dense verification")
    o.add_argument("--scale", choices=("small", "full"), default="small")
    o.add_argument("--corrupt-grouping", action="store_true",
                   help=argparse.SUPPRESS)  # negative control for tests
    return parser


def _merge_config(args: argparse.Namespace, parser: argparse.ArgumentParser):
    """Fill unset flags from the JSON config file, if one was given."""
    cfg_path = getattr(args, "config", None)
    if not cfg_path:
        return
    try:
        cfg = json.loads(Path(cfg_path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        parser.error(f"cannot read config {cfg_path}: {exc}")
    for key, value in cfg.items():
        attr = key.replace("-", "_")
        if not hasattr(args, attr):
            parser.error(f"unknown config key {key!r}")
        if getattr(args, attr) in (None, False):
            if attr in ("out", "config"):
                value = Path(value)
            setattr(args, attr, value)


def _parse_grid(text: str) -> np.ndarray:
    try:
        lo, hi, steps = text.split(":")
        lo, hi, steps = float(lo), float(hi), int(steps)
    except ValueError:
        raise ValueError(f"grid must be lo:hi:steps, got {text!r}") from None
    if steps < 1 or not (0.0 <= lo <= hi <= 1.0):
        raise ValueError(f"empty or out-of-range grid {text!r}")
    return np.linspace(lo, hi, steps)


def _spec(args) -> tuple[Family, float]:
    if args.family is None:
        raise ValueError("--family is required")
    family = parse_family(args.family)
    if family is Family.BELL_DIAGONAL:
        raise ValueError("CLI runs take one-parameter families; "
                         "use the library API for explicit weights")
    return family, args.F


def _model_kwargs(args, family: Family, protocol: str) -> dict:
    if args.n is None:
        raise ValueError("--n is required")
    if protocol in ("p0",):
        return {"n": args.n}
    if protocol in ("p1", "p2"):
        d = args.d
        if d is None:
            d = args.n + 1 if family is Family.AMPLITUDE_DAMPING else 2 * args.n + 1
        return {"n": args.n, "d": d}
    if protocol == "p3":
        r = args.r
        if r is None and not args.auto_r:
            raise ValueError("p3 needs --r or --auto-r")
        return {"N": args.n, "r": r, "rounds": args.rounds}
    raise ValueError(f"--protocol is required")


def _rng(args) -> np.random.Generator | None:
    if args.trials is None:
        return None
    if args.seed is None:
        raise ValueError("Monte Carlo runs require --seed")
    if args.trials < 1:
        raise ValueError(f"--trials must be positive, got {args.trials}")
    return np.random.default_rng(args.seed)


def _maybe_oracle(args) -> None:
    if not getattr(args, "oracle", False):
        return
    results = check.run_suite("small")
    bad = [r for r in results if not r.passed]
    if bad:
        raise OracleMismatchError(
            "; ".join(f"{r.name}: err={r.max_err:.3e}" for r in bad))
    print(f"oracle cross-check: {len(results)} checks passed", file=sys.stderr)


def cmd_witness(args) -> int:
    family, _ = _spec(args)
    if args.F0 is None:
        raise ValueError("--F0 is required")
    protocol = args.protocol
    if protocol is None:
        raise ValueError("--protocol is required")
    if protocol == "p3" and args.auto_r:
        args.r = optimize_block_size("witness", family,
                                     range(2, min(100, args.n) + 1),
                                     F0=args.F0, N=args.n, delta=args.delta)
        print(f"auto block size: r={args.r}")
    kwargs = _model_kwargs(args, family, protocol)
    rule = witness_rule(protocol, family, args.F0, args.delta, **kwargs)

    if args.f_grid:
        grid = _parse_grid(args.f_grid)
        rows = [(float(f), success_probability_witness(float(f), rule))
                for f in grid]
        out = args.out or Path("witness_sweep.csv")
        figures.write_csv(out, ["F", "Ps"], rows)
        print(f"wrote {out}")
        _maybe_oracle(args)
        return 0

    if args.F is None:
        raise ValueError("provide --F or --F-grid")
    spec = StateSpec(family, F=args.F)
    report = _run_witness(protocol, spec, rule, args, kwargs)
    rng = _rng(args)
    if rng is not None:
        sim = _simulate_witness(protocol, spec, rule, args, kwargs, rng)
        first = "above" if bool(sim.above[0]) else "below"
        print(f"decision: F {'>' if first == 'above' else '<'} {args.F0} ({first})")
        report.meta["trials"] = args.trials
        report.meta["above_frequency"] = sim.above_frequency
        report.meta["seed"] = args.seed
        if args.out:
            trials_csv = args.out.with_name(args.out.stem + "_trials.csv")
            figures.write_csv(trials_csv, ["trial", "statistic", "decision"],
                              [(t, int(s), "above" if a else "below")
                               for t, (s, a) in enumerate(zip(sim.statistics,
                                                              sim.above))])
            print(f"wrote {trials_csv}")
    else:
        side = "above" if spec.F >= args.F0 else "below"
        print(f"analytic: true F is {side} F0; "
              f"P_s = {report.success_probability:.6f}")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(report.to_json(), indent=2) + "\n")
        print(f"wrote {args.out}")
    elif args.format == "json" or rng is None:
        print(json.dumps(report.to_json(), indent=2))
    _maybe_oracle(args)
    return 0


def _run_witness(protocol, spec, rule, args, kwargs):
    if protocol == "p0":
        return run_p0(spec, kwargs["n"], rule)
    if protocol == "p1":
        return run_p1(spec, kwargs["n"], kwargs["d"], rule)
    if protocol == "p2":
        if args.m is None:
            raise ValueError("p2 requires --m")
        coarse = p2_params(kwargs["n"], kwargs["d"], args.m, args.delta0,
                           rule, args.grouping)
        return run_p2(spec, kwargs["n"], coarse, rule)
    return run_p3(spec, kwargs["N"], kwargs["r"], rule, rounds=kwargs["rounds"])


def _simulate_witness(protocol, spec, rule, args, kwargs, rng):
    trials = args.trials
    if protocol == "p0":
        return simulate_p0(spec, kwargs["n"], rule, rng, trials)
    if protocol == "p1":
        return simulate_p1(spec, kwargs["n"], kwargs["d"], rule, rng, trials)
    if protocol == "p2":
        coarse = p2_params(kwargs["n"], kwargs["d"], args.m, args.delta0,
                           rule, args.grouping)
        return simulate_p2(spec, kwargs["n"], coarse, rule, rng, trials)
    return simulate_p3(spec, kwargs["N"], kwargs["r"], rule, rng, trials,
                       rounds=kwargs["rounds"])


def cmd_discriminate(args) -> int:
    family, _ = _spec(args)
    if args.F1 is None or args.F2 is None:
        raise ValueError("--F1 and --F2 are required")
    protocol = args.protocol
    if protocol is None:
        raise ValueError("--protocol is required")
    if protocol == "p3" and args.auto_r:
        args.r = optimize_block_size("discriminate", family, range(2, 101),
                                     F1=args.F1, F2=args.F2)
        print(f"auto block size: r*={args.r}")
        if args.n is None:
            args.n = args.r  # one block suffices for a single parity readout
    kwargs = _model_kwargs(args, family, protocol)
    kwargs.pop("rounds", None)
    result = discriminate(protocol, family, args.F1, args.F2, args.eta1,
                          **kwargs)
    rule = result.pop("rule")
    result["sigma1"] = rule.to_json()["sigma1"]
    rng = _rng(args)
    if rng is not None:
        true_f = args.F if args.F is not None else args.F1
        outcomes, says_f1 = simulate_discriminate(rule, true_f, rng, args.trials)
        pick = "F1" if bool(says_f1[0]) else "F2"
        print(f"decision: fidelity is {pick} "
              f"({args.F1 if pick == 'F1' else args.F2})")
        result["trials"] = args.trials
        result["seed"] = args.seed
        result["true_F"] = true_f
        result["f1_frequency"] = float(np.mean(says_f1))
    else:
        print(f"analytic: P_s = {result['success_probability']:.6f}")
    if args.out:
        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(json.dumps(result, indent=2) + "\n")
        print(f"wrote {args.out}")
    else:
        print(json.dumps(result, indent=2))
    _maybe_oracle(args)
    return 0


def cmd_figure(args) -> int:
    paths = figures.generate(args.which, args.out)
    for p in paths:
        print(f"wrote {p}")
    return 0


def cmd_oracle_check(args) -> int:
    results = check.run_suite(args.scale,
                              corrupt_grouping=args.corrupt_grouping)
    failed = False
    for r in results:
        status = "pass" if r.passed else "FAIL"
        print(f"[{status}] {r.name}: max err {r.max_err:.3e} (tol {r.tol:g})")
        failed = failed or not r.passed
    if failed:
        raise OracleMismatchError("symbolic and dense paths disagree")
    print(f"{len(results)} checks passed")
    return 0


COMMANDS = {
    "witness": cmd_witness,
    "discriminate": cmd_discriminate,
    "figure": cmd_figure,
    "oracle-check": cmd_oracle_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _merge_config(args, parser)
    try:
        return COMMANDS[args.command](args)
    except UnsupportedCombinationError as exc:
        print(f"unsupported combination: {exc}", file=sys.stderr)
        return UNSUPPORTED_EXIT
    except OracleMismatchError as exc:
        print(f"oracle mismatch: {exc}", file=sys.stderr)
        return ORACLE_EXIT
    except (ValueError, DimensionCapError, EntwitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_EXIT


if __name__ == "__main__":
    sys.exit(main())
