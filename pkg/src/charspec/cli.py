"""Command-line front end.

Three subcommands: ``spectrum`` locates zeros of the characteristic
function in a window and cross-checks them against a large finite
truncation, ``curve`` emits the eigenvalue-curve table of the
linear-diagonal family as CSV, and ``verify`` runs the named identity,
bound, and oracle suites with machine-readable PASS/FAIL lines.

Exit codes: 0 success, 1 verify-suite failure, 2 descriptor or argument
errors (including malformed JSON), 3 convergence-certificate failure.
Reports are JSON, curves CSV; both UTF-8 with LF newlines and full
round-trip (17 significant digit) precision. When CSV goes to a file
the run metadata is echoed as one JSON line on stdout; when CSV goes to
stdout the metadata line moves to stderr so the table stays clean.
"""

import argparse
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import examples, jacobi, spectral, truncation
from .errors import (
    BadParams,
    CharspecError,
    ConvergenceError,
    TolUnreachable,
)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_DESCRIPTOR = 2
EXIT_CONVERGENCE = 3

VERIFY_SEED = 20260815   # all random draws in the suites use this seed

_DEFAULTS = {
    "eval_tol": 1e-10,
    "zero_tol": 1e-8,
    "oracle_n": 400,
    "n_list": [25, 50, 100, 200, 400],
    "w_max": examples.CURVE_TABLE_W_MAX,
    "step": examples.CURVE_TABLE_STEP,
}


@dataclass
class RunConfig:
    """Resolved invocation: command plus everything needed to rerun it."""

    command: str
    descriptor: Optional[str] = None   # inline JSON or file path
    window: Optional[Tuple[float, float]] = None
    eval_tol: float = _DEFAULTS["eval_tol"]
    zero_tol: float = _DEFAULTS["zero_tol"]
    out: Optional[str] = None
    fmt: str = "json"

    def __post_init__(self):
        if self.eval_tol <= 0 or self.zero_tol <= 0:
            raise BadParams("tolerances must be positive")
        if self.window is not None and \
                not all(math.isfinite(v) for v in self.window):
            raise BadParams("window endpoints must be finite")


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse that reports usage problems as exit code 2, not SystemExit."""

    def error(self, message):
        raise _UsageError(message)


def _threads(args) -> int:
    if getattr(args, "threads", None):
        return max(1, args.threads)
    env = os.environ.get("CHARSPEC_THREADS", "")
    try:
        return max(1, int(env)) if env else 1
    except ValueError:
        raise BadParams(
            f"CHARSPEC_THREADS={env!r} is not an integer") from None


def _resolve_descriptor(args) -> jacobi.JacobiDescriptor:
    if args.descriptor:
        text = args.descriptor
        if not text.lstrip().startswith("{"):
            try:
                with open(text, encoding="utf-8") as fh:
                    text = fh.read()
            except OSError as exc:
                raise BadParams(f"cannot read descriptor file: {exc}") \
                    from None
        return jacobi.descriptor_from_json(text)
    if not args.family:
        raise BadParams("provide --descriptor or --family")
    params = {}
    if args.params:
        try:
            params = json.loads(args.params)
        except json.JSONDecodeError as exc:
            raise BadParams(f"malformed --params JSON: {exc}") from None
        if not isinstance(params, dict):
            raise BadParams("--params must be a JSON object")
    for name in ("alpha", "w", "beta", "q"):
        val = getattr(args, name)
        if val is not None:
            params[name] = val
    return jacobi.descriptor_from_json(
        json.dumps({"family": args.family, "params": params}))


def _emit(text: str, out: Optional[str], metadata=None):
    """Write UTF-8/LF output; echo CSV metadata on the free stream."""
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        if metadata is not None:
            print(json.dumps({"metadata": metadata}))
    else:
        sys.stdout.write(text)
        if metadata is not None:
            print(json.dumps({"metadata": metadata}), file=sys.stderr)


# ---------------------------------------------------------------------------
# spectrum


def cmd_spectrum(args) -> int:
    cfg = RunConfig(command="spectrum", descriptor=args.descriptor,
                    window=(args.window[0], args.window[1]),
                    eval_tol=args.tol or _DEFAULTS["eval_tol"],
                    zero_tol=args.zero_tol or _DEFAULTS["zero_tol"],
                    out=args.out, fmt=args.format)
    desc = _resolve_descriptor(args)
    lo, hi = cfg.window
    if not lo < hi:
        raise BadParams(f"window must satisfy a < b, got ({lo}, {hi})")

    found = spectral.find_real_zeros(desc, (lo, hi), tol=cfg.zero_tol)
    zeros = [z for z, _ in found]
    brackets = [list(br) for _, br in found]
    # a residual cannot honestly be certified tighter than the zero was
    # localized; start there and relax (recorded) if rounding demands it
    residuals = []
    res_tol = max(cfg.eval_tol, cfg.zero_tol)
    for z in zeros:
        t = max(cfg.eval_tol, cfg.zero_tol)
        while True:
            try:
                residuals.append(abs(jacobi.charfn_regularized(desc, z,
                                                               tol=t)))
                break
            except TolUnreachable:
                if t >= 1e-6:
                    raise
                t = min(t * 8.0, 1e-6)
        res_tol = max(res_tol, t)

    n_orc = args.oracle_n or _DEFAULTS["oracle_n"]
    ev = truncation.truncated_spectrum(desc, n_orc, cfg.zero_tol).eigenvalues
    oracle = [float(v) for v in ev if lo <= v <= hi]

    if zeros and oracle:
        za = np.array(zeros)
        oa = np.array(oracle)
        d1 = np.abs(za[:, None] - oa[None, :]).min(axis=1).max()
        d2 = np.abs(oa[:, None] - za[None, :]).min(axis=1).max()
        max_disc = float(max(d1, d2))
    elif zeros or oracle:
        max_disc = math.inf
    else:
        max_disc = 0.0

    metadata = {
        "command": "spectrum",
        "family": desc.family,
        "params": desc.params,
        "window": [lo, hi],
        "eval_tol": cfg.eval_tol,
        "zero_tol": cfg.zero_tol,
        "residual_tol": res_tol,
        "oracle_n": n_orc,
        "seed": VERIFY_SEED,
        "defaults": _DEFAULTS,
    }
    if cfg.fmt == "json":
        report = {
            "metadata": metadata,
            "zeros": zeros,
            "brackets": brackets,
            "residuals": residuals,
            "oracle_eigenvalues": oracle,
            "max_discrepancy": max_disc,
        }
        _emit(json.dumps(report, indent=2) + "\n", cfg.out)
    else:
        lines = ["zero,bracket_lo,bracket_hi,residual"]
        for z, br, res in zip(zeros, brackets, residuals):
            lines.append(",".join(format(v, ".17g")
                                  for v in (z, br[0], br[1], res)))
        _emit("\n".join(lines) + "\n", cfg.out, metadata=metadata)
    return EXIT_OK


# ---------------------------------------------------------------------------
# curve


def cmd_curve(args) -> int:
    if args.s_max < 1:
        raise BadParams("--s-max must be >= 1")
    if args.w_max < 0:
        raise BadParams("--w-max must be >= 0")
    step = args.step or _DEFAULTS["step"]
    if step <= 0:
        raise BadParams("--step must be positive")
    if args.tol is not None and args.tol <= 0:
        raise BadParams("tolerances must be positive")
    tol = args.tol or 1e-9
    rows = examples.curve_table_rows(args.s_max, args.w_max, step, tol)
    header = ["w"] + [f"lambda_{s}" for s in range(1, args.s_max + 1)]
    metadata = {
        "command": "curve",
        "s_max": args.s_max,
        "w_max": args.w_max,
        "step": step,
        "zero_tol": tol,
        "seed": VERIFY_SEED,
        "w_max_is_default": args.w_max == _DEFAULTS["w_max"],
        "defaults": _DEFAULTS,
    }
    if args.format == "json":
        report = {"metadata": metadata, "header": header,
                  "rows": [list(r) for r in rows]}
        _emit(json.dumps(report, indent=2) + "\n", args.out)
    else:
        lines = [",".join(header)]
        for row in rows:
            lines.append(",".join(format(v, ".17g") for v in row))
        _emit("\n".join(lines) + "\n", args.out, metadata=metadata)
    return EXIT_OK


# ---------------------------------------------------------------------------
# verify suites


def _check_identities() -> List[Tuple[str, bool, str]]:
    checks = []

    def run(name, fn):
        try:
            ok, detail = fn()
        except CharspecError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        checks.append((name, bool(ok), detail))

    rng = np.random.default_rng(VERIFY_SEED)
    for trial in range(3):
        nu = float(rng.uniform(0.1, 0.85))
        mu = float(-rng.uniform(0.1, 0.85))
        w = float(rng.uniform(0.4, 1.4))

        def sum_check(nu=nu, mu=mu, w=w):
            b1 = spectral.bessel_bilateral(nu, w)
            b2 = spectral.bessel_bilateral(mu, w)
            lhs, rhs = spectral.green_summation_check(b1, b2, tol=1e-9)
            err = abs(lhs - rhs)
            return err <= 1e-9 * (1 + abs(rhs)), \
                f"nu={nu:.4f} mu={mu:.4f} w={w:.4f} |lhs-rhs|={err:.3e}"

        run(f"bilateral_sum_identity_{trial + 1}", sum_check)

    points = {
        1: dict(nu=0.3, x=1.4),
        2: dict(alpha=0.7, z=1.9),
        3: dict(alpha=0.5, z=2.0),
        4: dict(q=0.5, beta=0.8, z=0.6),
        5: dict(q=0.5, z=1.3),
    }
    for which, params in points.items():
        def ident(which=which, params=params):
            lhs, rhs = examples.identities_42(which, **params)
            err = abs(lhs - rhs)
            return err <= 1e-6 * (1 + abs(lhs)), \
                f"params={params} |lhs-rhs|={err:.3e}"

        run(f"norm_identity_item{which}", ident)

    def wronskian():
        bd = spectral.bessel_bilateral(0.3, 0.7)
        sol = spectral.bilateral_solutions(bd, (-20, 20), tol=1e-10)
        dev = max(abs(s - sol.wronskian) for s in sol.wronskian_samples)
        off1 = abs(sol.wronskian - 1.0)
        return dev <= 1e-9 and off1 <= 1e-9, \
            f"max|W_n-W|={dev:.3e} |W-1|={off1:.3e}"

    run("bilateral_wronskian_constancy", wronskian)

    def xi_sum_check():
        desc = jacobi.linear_diag(1.0, 1.0)
        z = spectral.find_real_zeros(desc, (-0.5, 1.0), tol=1e-12)[0][0]
        partial, wform = spectral.xi_sum(desc, z, tol=1e-10)
        err = abs(partial - wform) / abs(wform)
        return err <= 1e-6, f"z={z:.12g} rel={err:.3e}"

    run("eigenvector_sum_vs_derivative", xi_sum_check)

    def const_dist():
        cd = examples.CDeformed(1.7)
        worst = max(abs(cd.const_dist_residual(n, m))
                    for n in (1, 2, 5, 9) for m in (1, 3, 4))
        return worst <= 1e-12, f"max residual {worst:.3e}"

    run("cdeformed_const_dist", const_dist)

    def nested():
        worst = 0.0
        for r in (1, 2, 3):
            for s in (1, 2, 3):
                lhs = examples.cdeformed_nested_sum(2.0, 1.0, 0.9, -1.1,
                                                    r, s, cutoff=60)
                rhs = examples.cdeformed_product(2.0, 1.0, 0.9, -1.1, r, s)
                worst = max(worst, abs(lhs - rhs) / abs(rhs))
        return worst <= 1e-9, f"worst rel {worst:.3e} (c=2)"

    run("cdeformed_nested_sum_product", nested)
    return checks


def _check_bounds() -> List[Tuple[str, bool, str]]:
    checks = []
    for s in range(1, 7):
        bs = examples.beta_s(s)
        grid = list(np.linspace(0.0, bs, 8))
        try:
            rows = examples.prop45_bound_check(s, grid, tol=1e-9)
            top = rows[-1]
            checks.append((f"small_w_bound_s{s}", True,
                           f"beta_s={bs:.6f} defect={top[1]:.3e} "
                           f"bound={top[2]:.3e}"))
        except CharspecError as exc:
            checks.append((f"small_w_bound_s{s}", False,
                           f"{type(exc).__name__}: {exc}"))

    from . import specfun
    ok = True
    worst = ""
    for s in range(1, 11):
        y1 = specfun.first_bessel_y_zero(s - 0.5)
        if not examples.beta_s(s) < y1 / 2.0:
            ok = False
            worst = f"fails at s={s}"
            break
    checks.append(("beta_s_below_bessel_y_zero", ok,
                   worst or "beta_s < y_1(s-1/2)/2 for s=1..10"))
    return checks


_ORACLE_CASES = (
    ("tracking_linear_diag", lambda: jacobi.linear_diag(1.0, 1.0),
     (-2.0, 5.5)),
    ("tracking_harmonic", lambda: jacobi.harmonic(1.0), (0.35, 3.0)),
    ("tracking_qgeom", lambda: jacobi.qgeom(0.5, 1.0), (0.06, 3.0)),
)


def _check_oracle() -> List[Tuple[str, bool, str]]:
    checks = []
    for name, build, window in _ORACLE_CASES:
        try:
            rows = truncation.lambda_tracking(build(), window,
                                              tol=1e-10)
            final = rows[-1].max_distance
            # tables that start at the localization noise floor cannot
            # shrink further, so only forbid genuine growth
            shrank = final <= rows[0].max_distance + 1e-9
            table = " ".join(f"n={r.n}:{r.max_distance:.2e}" for r in rows)
            checks.append((name, bool(final <= 1e-7 and shrank), table))
        except CharspecError as exc:
            checks.append((name, False, f"{type(exc).__name__}: {exc}"))
    return checks


_SUITES = {
    "identities": _check_identities,
    "bounds": _check_bounds,
    "oracle": _check_oracle,
}


def cmd_verify(args) -> int:
    suites = [args.suite] if args.suite != "all" else list(_SUITES)
    workers = _threads(args)
    results: List[Tuple[str, bool, str]] = []
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futs = [pool.submit(_SUITES[s]) for s in suites]
            for fut in futs:
                results.extend(fut.result())
    else:
        for s in suites:
            results.extend(_SUITES[s]())

    lines = []
    for name, ok, detail in results:
        lines.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    all_ok = all(ok for _, ok, _ in results)
    metadata = {"command": "verify", "suites": suites,
                "seed": VERIFY_SEED, "threads": workers,
                "defaults": _DEFAULTS}
    if args.format == "json":
        report = {
            "metadata": metadata,
            "checks": [{"name": n, "pass": ok, "detail": d}
                       for n, ok, d in results],
            "all_pass": all_ok,
        }
        _emit(json.dumps(report, indent=2) + "\n", args.out)
    else:
        _emit("\n".join(lines) + "\n", args.out,
              metadata=None if args.out is None else metadata)
    return EXIT_OK if all_ok else EXIT_FAIL


# ---------------------------------------------------------------------------
# wiring


def build_parser() -> _Parser:
    p = _Parser(prog="charspec",
                description="Point spectra of Jacobi matrices via their "
                            "characteristic function.")
    sub = p.add_subparsers(dest="command", required=True)

    def add_common(sp):
        sp.add_argument("--out", help="output path (default: stdout)")
        sp.add_argument("--tol", type=float, default=None,
                        help="evaluation tolerance (default 1e-10)")
        sp.add_argument("--threads", type=int, default=None,
                        help="worker threads (or CHARSPEC_THREADS)")

    sp = sub.add_parser("spectrum",
                        help="locate zeros of the characteristic function "
                             "in a window")
    sp.add_argument("--family", help="built-in family name")
    sp.add_argument("--params", help="family parameters as a JSON object")
    sp.add_argument("--descriptor",
                    help="descriptor JSON (inline or a file path)")
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--w", type=float, default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--q", type=float, default=None)
    sp.add_argument("--window", type=float, nargs=2, required=True,
                    metavar=("A", "B"))
    sp.add_argument("--zero-tol", type=float, default=None,
                    dest="zero_tol",
                    help="zero-localization tolerance (default 1e-8)")
    sp.add_argument("--oracle-n", type=int, default=None, dest="oracle_n",
                    help="truncation order of the cross-check (default 400)")
    sp.add_argument("--format", choices=("json", "csv"), default="json",
                    help="report format; CSV columns: "
                         "zero,bracket_lo,bracket_hi,residual")
    add_common(sp)
    sp.set_defaults(func=cmd_spectrum)

    cp = sub.add_parser("curve",
                        help="CSV table of eigenvalue curves lambda_s(w) "
                             "of the linear-diagonal family")
    cp.add_argument("--s-max", type=int, default=5, dest="s_max")
    cp.add_argument("--w-max", type=float, default=_DEFAULTS["w_max"],
                    dest="w_max")
    cp.add_argument("--step", type=float, default=None,
                    help="grid step (default 0.02)")
    cp.add_argument("--format", choices=("csv", "json"), default="csv",
                    help="CSV columns: w,lambda_1..lambda_{s_max}")
    add_common(cp)
    cp.set_defaults(func=cmd_curve)

    vp = sub.add_parser("verify",
                        help="run a named check suite, PASS/FAIL per line")
    vp.add_argument("suite", choices=("identities", "bounds", "oracle",
                                      "all"))
    vp.add_argument("--format", choices=("text", "json"), default="text")
    add_common(vp)
    vp.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"argument error: {exc}", file=sys.stderr)
        return EXIT_DESCRIPTOR
    try:
        return args.func(args)
    except BadParams as exc:
        print(f"descriptor error: {exc}", file=sys.stderr)
        return EXIT_DESCRIPTOR
    except ConvergenceError as exc:
        print(f"convergence failure ({type(exc).__name__}): {exc}",
              file=sys.stderr)
        return EXIT_CONVERGENCE
    except CharspecError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE


if __name__ == "__main__":
    sys.exit(main())
