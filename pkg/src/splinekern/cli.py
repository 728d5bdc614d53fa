"""Command-line interface: ``splinekern <command> [options]``.

Exit codes: 0 success, 1 failed checks, 2 usage or input error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np

from .asymptotics import interior_interval
from .audit import format_report, run_audit
from .bandwidth import bandwidth_h, lambda_for
from .errors import SplineKernError
from .estimator import Dataset, effective_kernel_row, fit, select_model
from .kernel import eval_K_scaled, kernel_model_for_kq, smoothing_limit_model
from .splines import SplineConfig
from .study import ExperimentSpec, DEFAULT_KQ, run_study
from .svgplot import line_plot


class UsageError(Exception):
    pass


def _fmt(v: float) -> str:
    return format(float(v), ".10g")


def _parse_kq(text: str) -> float:
    if text.lower() in ("inf", "infinity", "ss"):
        return math.inf
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid k_q value {text!r}")
    if v < 0 or math.isnan(v):
        raise argparse.ArgumentTypeError("k_q must be >= 0")
    return v


def _write(text: str, path: Optional[str]) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


# ---------------------------------------------------------------------------
# kernel-curves


def cmd_kernel_curves(args) -> int:
    if not args.kq:
        raise UsageError("at least one --kq value is required")
    if args.npts < 2 or not args.xmax > args.xmin:
        raise UsageError("need --npts >= 2 and --xmax > --xmin")
    x = np.linspace(args.xmin, args.xmax, args.npts)
    columns = {}
    for t in args.t:
        for kq in args.kq:
            if math.isinf(kq):
                model = smoothing_limit_model(args.q)
            else:
                model = kernel_model_for_kq(args.p, args.q, kq)
            columns[f"K(x,{_fmt(t)})|k_q={_fmt(kq)}"] = eval_K_scaled(model, x, t)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x"] + list(columns))
    for i, xv in enumerate(x):
        w.writerow([_fmt(xv)] + [_fmt(col[i]) for col in columns.values()])
    _write(buf.getvalue(), args.out)
    if args.svg:
        title = f"equivalent kernels, p={args.p}, q={args.q}"
        Path(args.svg).write_text(line_plot(x, columns, title))
    return 0


# ---------------------------------------------------------------------------
# mc-study


_SPEC_FLAGS = {
    "functions": "functions", "N": "N_list", "sigma": "sigma", "p": "p", "q": "q",
    "kq": "kq_list", "replications": "replications", "seed": "seed", "loss": "loss",
}


def _build_spec(args) -> ExperimentSpec:
    data = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
        if not isinstance(data, dict):
            raise UsageError("config must be a JSON object")
    if args.full:
        data["replications"] = 500
    for flag, name in _SPEC_FLAGS.items():
        value = getattr(args, flag)
        if value is not None:
            data[name] = value
    if args.kmin is not None or args.kmax is not None:
        lo, hi = data.get("K_range", (2, 50))
        data["K_range"] = (args.kmin if args.kmin is not None else lo,
                           args.kmax if args.kmax is not None else hi)
    if args.periodic:
        data["periodic"] = True
    return ExperimentSpec.from_dict(data)


def cmd_mc_study(args) -> int:
    spec = _build_spec(args)
    result = run_study(spec, workers=args.workers)
    _write(result.table_csv(), args.out)
    if args.hist_out:
        Path(args.hist_out).write_text(result.histogram_csv())
    if args.out not in (None, "-"):
        space = "periodic" if spec.periodic else "open (non-periodic)"
        print(f"spline space: {space}; loss: {spec.loss}; replications: {spec.replications}")
        print(result.summary())
    return 0


# ---------------------------------------------------------------------------
# audit


def cmd_audit(args) -> int:
    results = run_audit(perturb_nu=args.perturb_nu, quick=args.quick, seed=args.seed)
    print(format_report(results))
    return 0 if all(r.passed for r in results) else 1


# ---------------------------------------------------------------------------
# fit


def _read_xy(path: str):
    try:
        with open(path, newline="") as fh:
            rows = list(csv.DictReader(fh))
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}")
    if not rows or "x" not in rows[0] or "y" not in rows[0]:
        raise UsageError("input must be a CSV with columns x,y")
    try:
        x = np.array([float(r["x"]) for r in rows])
        y = np.array([float(r["y"]) for r in rows])
    except ValueError as exc:
        raise UsageError(f"non-numeric value in input: {exc}")
    return x, y


def cmd_fit(args) -> int:
    x, y = _read_xy(args.input)
    data = Dataset.from_xy(x, y)
    if args.fix_kq is not None:
        K, lam, res = select_model(data, args.p, args.q, args.fix_kq,
                                   range(args.kmin, args.kmax + 1), periodic=args.periodic)
    else:
        K, lam = args.fix_K, args.lam
        res = fit(data, SplineConfig(args.p, args.q, K, lam), periodic=args.periodic)
    N = data.N
    dof = N - res.hat_trace
    sigma2 = res.rss / dof if dof > 0 else math.nan
    W = effective_kernel_row(res, data.x)
    se = np.sqrt(sigma2 * np.sum(W ** 2, axis=1)) / N
    info = bandwidth_h(args.q, K, lam, k_q=args.fix_kq)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["x", "y", "fitted", "se"])
    for row in zip(data.x, data.y, res.fitted, se):
        w.writerow([_fmt(v) for v in row])
    _write(buf.getvalue(), args.output)
    msg = (f"K={K} lambda={_fmt(lam)} k_q={_fmt(info.k_q)} h={_fmt(info.h)} "
           f"trace={_fmt(res.hat_trace)} periodic={args.periodic}")
    print(msg, file=sys.stderr if args.output in (None, "-") else sys.stdout)
    return 0


# ---------------------------------------------------------------------------
# bandwidth-table


def cmd_bandwidth_table(args) -> int:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["q", "K", "k_q", "lambda", "regime", "c1", "c2", "c2_tilde", "h", "hK",
                "interior_lo", "interior_hi"])
    for q in args.q:
        for kq in args.kq:
            if math.isinf(kq):
                continue
            lam = lambda_for(kq, q, args.K)
            info = bandwidth_h(q, args.K, lam, k_q=kq)
            try:
                lo, hi = interior_interval(kernel_model_for_kq(2 * q - 1, q, kq, K=args.K))
            except SplineKernError:
                lo = hi = math.nan
            w.writerow([q, args.K, _fmt(kq), _fmt(lam), info.regime,
                        "" if info.c1 is None else _fmt(info.c1),
                        "" if info.c2 is None else _fmt(info.c2),
                        _fmt(info.c2_tilde), _fmt(info.h), _fmt(info.h * args.K),
                        _fmt(lo), _fmt(hi)])
    _write(buf.getvalue(), args.out)
    return 0


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="splinekern",
                                     description="Equivalent kernels of penalized spline smoothers.")
    sub = parser.add_subparsers(dest="command", required=True)

    kc = sub.add_parser("kernel-curves", help="tabulate K(x, t) for several k_q")
    kc.add_argument("--p", type=int, default=3)
    kc.add_argument("--q", type=int, default=2)
    kc.add_argument("--kq", type=_parse_kq, nargs="*", default=[0.0, 0.5, 1.0, 5.0, math.inf],
                    help="k_q values; 'inf' gives the smoothing-spline kernel")
    kc.add_argument("--t", type=float, nargs="+", default=[0.0, 0.3])
    kc.add_argument("--xmin", type=float, default=-4.0)
    kc.add_argument("--xmax", type=float, default=4.0)
    kc.add_argument("--npts", type=int, default=401)
    kc.add_argument("--out", help="CSV output path (default stdout)")
    kc.add_argument("--svg", help="also write an SVG line plot")
    kc.set_defaults(func=cmd_kernel_curves)

    mc = sub.add_parser("mc-study", help="Monte Carlo study of GCV-selected estimators")
    mc.add_argument("--config", help="JSON file with experiment fields; flags override it")
    mc.add_argument("--functions", nargs="+", help="f1, f2, zero or expr:<expression>")
    mc.add_argument("--N", type=int, nargs="+")
    mc.add_argument("--sigma", type=float)
    mc.add_argument("--p", type=int)
    mc.add_argument("--q", type=int)
    mc.add_argument("--kq", type=float, nargs="+")
    mc.add_argument("--kmin", type=int)
    mc.add_argument("--kmax", type=int)
    mc.add_argument("--replications", type=int)
    mc.add_argument("--full", action="store_true", help="500 replications")
    mc.add_argument("--seed", type=int)
    mc.add_argument("--loss", choices=["mean", "sum"],
                    help="'sum' uses the unnormalised residual sum in the criterion")
    mc.add_argument("--periodic", action="store_true", help="fit periodic splines")
    mc.add_argument("--workers", type=int, default=1)
    mc.add_argument("--out", help="CSV output path (default stdout)")
    mc.add_argument("--hist-out", help="CSV of selected-K counts")
    mc.set_defaults(func=cmd_mc_study)

    au = sub.add_parser("audit", help="run the invariant suite")
    au.add_argument("--quick", action="store_true")
    au.add_argument("--seed", type=int, default=0)
    au.add_argument("--perturb-nu", action="store_true",
                    help="debug: scale one eigenvalue by 1.01 to exercise failure reporting")
    au.set_defaults(func=cmd_audit)

    ft = sub.add_parser("fit", help="fit a penalized spline to x,y data on the grid i/N")
    ft.add_argument("--input", required=True)
    ft.add_argument("--output", help="CSV output path (default stdout)")
    ft.add_argument("--p", type=int, default=3)
    ft.add_argument("--q", type=int, default=2)
    mode = ft.add_mutually_exclusive_group(required=True)
    mode.add_argument("--fix-kq", type=float, help="select K by GCV at this k_q")
    mode.add_argument("--fix-K", type=int, help="use this K together with --lam")
    ft.add_argument("--lam", type=float, default=0.0)
    ft.add_argument("--kmin", type=int, default=2)
    ft.add_argument("--kmax", type=int, default=50)
    ft.add_argument("--periodic", action="store_true")
    ft.set_defaults(func=cmd_fit)

    bt = sub.add_parser("bandwidth-table", help="bandwidth constants over a k_q grid")
    bt.add_argument("--q", type=int, nargs="+", default=[1, 2, 3])
    bt.add_argument("--K", type=int, default=20)
    bt.add_argument("--kq", type=_parse_kq, nargs="+", default=list(DEFAULT_KQ) + [0.0, 10.0, 50.0])
    bt.add_argument("--out")
    bt.set_defaults(func=cmd_bandwidth_table)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"splinekern: error: {exc}", file=sys.stderr)
        return 2
    except SplineKernError as exc:
        print(f"splinekern: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
