"""Command-line front end: ``matperturb {approx, order, wihler}``.

Exit codes: 0 success, 1 precondition or usage error, 2 numerical failure,
3 an order or inequality check failed.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .core import (
    HERMITIAN_TOL,
    PSD_TOL,
    RANK_TOL,
    RECON_TOL,
    UNITARY_TOL,
    NumericalError,
    PreconditionError,
    eigh,
    frobenius_norm,
    matrix_modulus,
    matrix_power,
    spectral_norm,
)
from .first_order import (
    dk_approx,
    modulus_approx,
    modulus_approx_invertible,
    modulus_approx_psd,
    power_approx,
    power_approx_s,
    power_function,
)
from .io import matrix_payload, read_matrix
from .loewner import PAIR_TOL
from .verification import DEFAULT_SCALES, PROBLEMS, run_campaign, wihler_sweep

EXIT_OK, EXIT_PRECONDITION, EXIT_NUMERICAL, EXIT_CHECK_FAILED = 0, 1, 2, 3
SEED_ENV = "MATPERTURB_SEED"

ORDER_PROBLEMS = {
    "dk": ["dk"],
    "power": ["power_p"],
    "power-s": ["power_s"],
    "modulus": ["modulus"],
    "modulus-psd": ["modulus_psd"],
    "modulus-inv": ["modulus_inv"],
    "lemma-gt": ["projector_lemma_gt"],
    "lemma-gt1": ["projector_lemma_gt1"],
    "lemma-gt2": ["projector_lemma_gt2_P1ZP0", "projector_lemma_gt2_P1ZP1"],
}
FULL_RANK_PROBLEMS = ("dk", "modulus-inv")


class UsageError(PreconditionError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _tolerances() -> dict:
    return {
        "hermitian_tol": HERMITIAN_TOL,
        "unitary_tol": UNITARY_TOL,
        "recon_tol": RECON_TOL,
        "psd_tol": PSD_TOL,
        "rank_tol": RANK_TOL,
        "pair_tol": PAIR_TOL,
    }


def _emit(report: dict, out: str | None) -> None:
    text = json.dumps(report, indent=2) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _scales(text: str | None) -> np.ndarray:
    if text is None:
        return DEFAULT_SCALES
    try:
        return np.array([float(x) for x in text.split(",") if x.strip()])
    except ValueError as exc:
        raise UsageError(f"--scales must be a comma-separated list of numbers: {exc}") from exc


def _seed(args) -> int:
    env = os.environ.get(SEED_ENV)
    if env is not None:
        try:
            return int(env)
        except ValueError as exc:
            raise UsageError(f"{SEED_ENV} must be an integer, got {env!r}") from exc
    return args.seed


def cmd_approx(args) -> tuple[dict, int]:
    base = read_matrix(args.input)
    pert = read_matrix(args.perturb)
    if base.shape != pert.shape:
        raise PreconditionError(f"input and perturbation differ in shape: {base.shape} vs {pert.shape}")
    mode = args.mode
    config = {"mode": mode, "p": args.p, "s": args.s, "tolerances": _tolerances()}
    if mode == "dk":
        s = 1 / args.p if args.p is not None else (args.s if args.s is not None else 0.5)
        f, df = power_function(s)
        dec = eigh(base)
        approx = dk_approx(dec, pert, f, df)
        term = approx - matrix_power(base, s)
        exact = matrix_power(base + pert, s)
        expected = 2.0
    elif mode in ("power", "power-s"):
        dec = eigh(base)
        if mode == "power":
            if args.p is None:
                raise UsageError("--mode power needs --p")
            res = power_approx(dec, pert, args.p)
            exact = matrix_power(base + pert, 1 / args.p)
        else:
            if args.s is None:
                raise UsageError("--mode power-s needs --s")
            res = power_approx_s(dec, pert, args.s)
            exact = matrix_power(base + pert, args.s)
        approx, term, expected = res.approximation, res.first_order_term, res.expected_order
    else:
        fn = {
            "modulus": modulus_approx,
            "modulus-psd": modulus_approx_psd,
            "modulus-inv": modulus_approx_invertible,
        }[mode]
        res = fn(base, pert)
        approx, term, expected = res.approximation, res.first_order_term, res.expected_order
        exact = matrix_modulus(base + pert)
    err = exact - approx
    results = {
        "approximation": matrix_payload(approx, "hermitian"),
        "first_order_term": matrix_payload(term, "hermitian"),
        "exact": matrix_payload(exact, "hermitian"),
        "error": {"spectral": spectral_norm(err), "frobenius": frobenius_norm(err)},
        "expected_order": expected if expected is not None else "unguaranteed",
    }
    return {"config": config, "results": results, "reports": [], "summary": {"passed": True}}, EXIT_OK


def cmd_order(args) -> tuple[dict, int]:
    problem = args.problem
    n = args.n
    rank = args.rank
    if rank is None:
        rank = n if problem in FULL_RANK_PROBLEMS else n // 2
    scales = _scales(args.scales)
    if scales.size < 6:
        raise UsageError(f"--scales needs at least 6 points, got {scales.size}")
    if args.trials < 1:
        raise UsageError("--trials must be positive")
    params: dict = {}
    if problem == "dk":
        params["s"] = 1 / args.p if args.p is not None else (args.s if args.s is not None else 0.5)
    elif problem in ("power", "lemma-gt1"):
        p = 2.0 if args.p is None else args.p
        if not p > 1:
            raise UsageError(f"--p must exceed 1, got {p}")
        if p >= 3 and not (args.force and problem == "power"):
            raise UsageError(f"--p must lie in (1, 3), got {p}; pass --force to run unguaranteed orders")
        params["p"] = p
    elif problem == "power-s":
        s = 2.0 if args.s is None else args.s
        if not s > 1:
            raise UsageError(f"--s must exceed 1, got {s}")
        params["s"] = s
    seed = _seed(args)
    reports = []
    for name in ORDER_PROBLEMS[problem]:
        reports.extend(
            run_campaign(name, n, rank, params, trials=args.trials, seed=seed, scales=scales)
        )
    if args.csv:
        with open(args.csv, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["scale", "error", "trial"])
            for k, rep in enumerate(reports):
                trial = k % args.trials
                for t, e in zip(rep.scales, rep.errors):
                    w.writerow([repr(t), repr(e), trial])
    passed = all(r.passed for r in reports)
    config = {
        "problem": problem,
        "n": n,
        "rank": rank,
        "params": params,
        "trials": args.trials,
        "seed": seed,
        "scales": [float(t) for t in scales],
        "slope_margins": {name: PROBLEMS[name].margin for name in ORDER_PROBLEMS[problem]},
        "noise_floor": "1e3 * eps * (1 + |exact|)",
        "norm": "spectral",
        "tolerances": _tolerances(),
    }
    summary = {
        "passed": passed,
        "failed_trials": [k for k, r in enumerate(reports) if not r.passed],
        "min_slope": min(r.fitted_slope for r in reports),
    }
    report = {"config": config, "results": {}, "reports": [r.to_dict() for r in reports], "summary": summary}
    return report, EXIT_OK if passed else EXIT_CHECK_FAILED


def cmd_wihler(args) -> tuple[dict, int]:
    if not args.p >= 1:
        raise UsageError(f"--p must be at least 1, got {args.p}")
    if args.n < 1 or args.trials < 1:
        raise UsageError("--n and --trials must be positive")
    seed = _seed(args)
    sweep = wihler_sweep(args.n, args.p, args.trials, seed)
    config = {
        "n": args.n,
        "p": args.p,
        "trials": args.trials,
        "seed": seed,
        "norm": "frobenius (the Hoelder bound is checked in the Frobenius norm)",
        "slack": 1e-10,
        "tolerances": _tolerances(),
    }
    results = {
        "violations": sweep.violations,
        "max_ratio": sweep.max_ratio,
        "sharpness_ratio": sweep.sharpness_ratio,
    }
    passed = sweep.violations == 0
    report = {"config": config, "results": results, "reports": [], "summary": {"passed": passed}}
    return report, EXIT_OK if passed else EXIT_CHECK_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="matperturb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    common = _Parser(add_help=False)
    common.add_argument("--out", help="write the JSON report here instead of stdout")
    common.add_argument("--no-timestamp", action="store_true", help="omit the timestamp field")

    ap = sub.add_parser("approx", parents=[common], help="first-order approximation of one perturbation")
    ap.add_argument("--mode", required=True, choices=["dk", "power", "power-s", "modulus", "modulus-psd", "modulus-inv"])
    ap.add_argument("--input", required=True, help="matrix file for A (or X)")
    ap.add_argument("--perturb", required=True, help="matrix file for E (or Z)")
    ap.add_argument("--p", type=float)
    ap.add_argument("--s", type=float)
    ap.set_defaults(func=cmd_approx)

    op = sub.add_parser("order", parents=[common], help="empirical error-order campaign")
    op.add_argument("--problem", required=True, choices=list(ORDER_PROBLEMS))
    op.add_argument("--n", type=int, default=6)
    op.add_argument("--rank", type=int)
    op.add_argument("--p", type=float)
    op.add_argument("--s", type=float)
    op.add_argument("--trials", type=int, default=10)
    op.add_argument("--seed", type=int, default=0)
    op.add_argument("--scales", help="comma-separated, strictly decreasing, at least 6 values")
    op.add_argument("--csv", help="write scale,error,trial rows here")
    op.add_argument("--force", action="store_true", help="allow p >= 3 (order unguaranteed)")
    op.set_defaults(func=cmd_order)

    wp = sub.add_parser("wihler", parents=[common], help="random sweep of the Hoelder bound for p-th roots")
    wp.add_argument("--n", type=int, default=4)
    wp.add_argument("--p", type=float, default=2.0)
    wp.add_argument("--trials", type=int, default=1000)
    wp.add_argument("--seed", type=int, default=0)
    wp.set_defaults(func=cmd_wihler)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    # located up front so that usage errors still reach the requested file
    out = next((argv[i + 1] for i, a in enumerate(argv[:-1]) if a == "--out"), None)
    timestamp = "--no-timestamp" not in argv
    try:
        args = build_parser().parse_args(argv)
        out, timestamp = args.out, not args.no_timestamp
        report, code = args.func(args)
    except (PreconditionError, OSError) as exc:
        report, code = {"error": {"type": type(exc).__name__, "message": str(exc)}}, EXIT_PRECONDITION
    except (NumericalError, np.linalg.LinAlgError) as exc:
        report, code = {"error": {"type": type(exc).__name__, "message": str(exc)}}, EXIT_NUMERICAL
    if "error" in report:
        print(f"error: {report['error']['type']}: {report['error']['message']}", file=sys.stderr)
    report = {"command": argv, "version": __version__, **report, "exit_code": code}
    if timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
    _emit(report, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
