"""Batch command line: evaluate, tabulate, verify, check, report.

Exit codes: 0 all requested checks passed, 1 at least one check failed,
2 usage error, 3 numerical non-convergence or output failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import analysis, densities, opmon, representations
from .core import (
    BoundaryComponent,
    FunctionId,
    boundary_limit,
    eval_G,
    eval_H,
    eval_h,
    eval_inv_z2H,
    gated_upper_halfplane_grid,
)
from .densities import (
    density_table,
    rho,
    select_sigma_candidate,
    sigma_discrepancy_report,
)
from .quadrature import NonConvergenceError
from .representations import (
    RepresentationId,
    report_to_json,
    verify_representation,
)

__all__ = ["run", "main"]

_EVALUATORS = {
    FunctionId.H: eval_H,
    FunctionId.h: eval_h,
    FunctionId.G: eval_G,
    FunctionId.XH: eval_G,
    FunctionId.X2H: lambda z: np.asarray(z) * eval_G(z),
    FunctionId.INV_H: lambda z: 1.0 / eval_H(z),
    FunctionId.INV_XH: lambda z: 1.0 / eval_G(z),
    FunctionId.INV_Z2H: eval_inv_z2H,
    FunctionId.INV_X2H: eval_inv_z2H,
}


def _fmt(x: float) -> str:
    r = repr(float(x))
    return r[:-2] if r.endswith(".0") else r


def _parse_grid(spec: str) -> np.ndarray:
    try:
        kind, lo, hi, count = spec.split(":")
        lo, hi, count = float(lo), float(hi), int(count)
    except ValueError as exc:
        raise ValueError(f"bad grid spec {spec!r}; use log:<lo>:<hi>:<n>") from exc
    if not (0 < lo < hi) or count < 2:
        raise ValueError("grid bounds must be positive with count >= 2")
    if kind == "log":
        return np.geomspace(lo, hi, count)
    if kind == "lin":
        return np.linspace(lo, hi, count)
    raise ValueError(f"unknown grid kind {kind!r}")


def _write(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    Path(path).write_text(text, newline="\n")


def _cmd_eval(args) -> int:
    fn = FunctionId(args.fn)
    z = complex(args.x, args.im)
    v = complex(_EVALUATORS[fn](z))
    print(f"{_fmt(v.real)} {_fmt(v.imag)}")
    return 0


def _cmd_density(args) -> int:
    grid = _parse_grid(args.grid)
    _write(args.out, density_table(grid))
    return 0


def _cmd_verify(args) -> int:
    reps = list(RepresentationId) if args.rep == "all" else [RepresentationId(args.rep)]
    points = None
    if args.points:
        raw = json.loads(Path(args.points).read_text())
        points = [complex(p[0], p[1]) for p in raw]
    payloads, ok = [], True
    for rep in reps:
        report = verify_representation(rep, points=points, tol=args.tol)
        payloads.append(report)
        ok = ok and report.passed
    text = "[\n" + ",\n".join(report_to_json(r) for r in payloads) + "\n]\n" \
        if len(payloads) > 1 else report_to_json(payloads[0]) + "\n"
    _write(args.out, text)
    return 0 if ok else 1


def _property_payload(report) -> str:
    return report.to_json() + "\n"


def _cmd_check(args) -> int:
    kind = args.kind
    if kind == "opmon":
        rep = opmon.check_operator_monotone(FunctionId(args.fn), n=args.dim,
                                            trials=args.trials, seed=args.seed)
        if args.out:
            base = Path(args.out)
            base.write_text(json.dumps({
                "property": "OPERATOR_MONOTONE",
                "fn": rep.fn, "dim": rep.dim, "trials": rep.trials,
                "seed": rep.seed, "pass": rep.passed, "worst": rep.worst,
                "failures": rep.failures,
            }, indent=2) + "\n", newline="\n")
            base.with_suffix(".trials.csv").write_text(opmon.trial_log_csv(rep),
                                                       newline="\n")
        else:
            sys.stdout.write(opmon.trial_log_csv(rep))
        return 0 if rep.passed else 1

    grid = _parse_grid(args.grid) if args.grid else None
    fn = FunctionId(args.fn) if kind != "stieltjes" else args.fn
    if kind == "cm":
        report = analysis.check_cm(fn, grid=grid, max_order=args.order)
    elif kind == "lcm":
        report = analysis.check_lcm(fn, grid=grid, max_order=args.order)
    elif kind == "bernstein":
        report = analysis.check_bernstein(fn, grid=grid, max_order=args.order)
    elif kind == "stieltjes":
        report = analysis.check_stieltjes_geometric(args.fn)
    else:
        raise ValueError(kind)
    _write(args.out, _property_payload(report))
    return 0 if report.passed else 1


def _cmd_degree(args) -> int:
    candidates = [float(c) for c in args.candidates.split(",")]
    fn = FunctionId(args.fn)
    f_inf = 1.0 if fn is FunctionId.h else 0.0
    est = analysis.estimate_cm_degree(fn, candidates, f_inf=f_inf)
    payload = {
        "fn": est.fn,
        "upper_bound": est.upper_bound,
        "upper_bound_location": est.upper_bound_location,
        "largest_passing": est.largest_passing,
        "smallest_failing": est.smallest_failing,
        "bracket": list(est.bracket),
        "consistent": est.consistent,
    }
    _write(args.out, json.dumps(payload, indent=2) + "\n")
    return 0 if est.consistent else 1


def _cmd_report(args) -> int:
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    t0 = time.time()
    items = run_full_report(outdir)
    elapsed = time.time() - t0
    summary = {
        "elapsed_seconds": elapsed,
        "items": items,
        "pass": all(i["pass"] for i in items),
    }
    (outdir / "summary.json").write_text(json.dumps(summary, indent=2) + "\n",
                                         newline="\n")
    for item in items:
        print(f"[{'PASS' if item['pass'] else 'FAIL'}] {item['name']}")
    print(f"total {elapsed:.1f}s")
    return 0 if summary["pass"] else 1


def run_full_report(outdir: Path) -> list:
    """The acceptance suite as a batch run, one pass/fail entry per item."""
    items = []

    def record(name, passed, **extra):
        items.append({"name": name, "pass": bool(passed), **extra})

    # special values
    sv = {
        "H(1)": complex(eval_H(1.0)).real, "h(1)": complex(eval_h(1.0)).real,
        "rho(1)": rho(1.0), "varrho(1)": densities.varrho_paper(1.0),
        "g2(1)": densities.g2(1.0),
    }
    record("special_values", all(abs(v - e) <= 1e-15 for v, e in
                                 zip(sv.values(), (1.0, 2.0, 0.0, 1.0, 1.0))),
           values=sv)

    # density oracle agreement
    grid = densities._calibration_grid()
    worst_rho = max(abs(rho(t) + boundary_limit(t, BoundaryComponent.IM_G).value / math.pi)
                    for t in grid)
    worst_g2 = 0.0
    for t in grid:
        re = boundary_limit(t, BoundaryComponent.RE_G).value
        im = boundary_limit(t, BoundaryComponent.IM_G).value
        g2v = densities.g2(t)
        worst_g2 = max(worst_g2, abs(g2v - re * re - im * im) / (1.0 + g2v))
    record("density_oracle_rho", worst_rho <= 1e-7, worst=worst_rho)
    record("density_oracle_g2", worst_g2 <= 1e-6, worst=worst_g2)

    # sigma selection
    sel = select_sigma_candidate()
    (outdir / "sigma_discrepancy.json").write_text(
        json.dumps(sigma_discrepancy_report(sel), indent=2) + "\n", newline="\n")
    record("sigma_selection_decisive", sel.decisive and sel.selected == "B",
           dev_A=sel.dev_A, dev_B=sel.dev_B)

    # representations
    for rep in RepresentationId:
        report = verify_representation(rep)
        (outdir / f"rep_{rep.value}.json").write_text(report_to_json(report) + "\n",
                                                      newline="\n")
        record(f"rep_{rep.value}", report.passed, max_rel_res=report.max_rel_res)

    # monotonicity checks
    for fn, check, name in [
        (FunctionId.H, analysis.check_cm, "cm_H"),
        (FunctionId.h, analysis.check_cm, "cm_h"),
        (FunctionId.H, analysis.check_lcm, "lcm_H"),
        (FunctionId.XH, analysis.check_lcm, "lcm_xH"),
        (FunctionId.INV_X2H, analysis.check_lcm, "lcm_inv_x2H"),
        (FunctionId.INV_H, analysis.check_bernstein, "bernstein_inv_H"),
    ]:
        rep = check(fn)
        (outdir / f"{name}.json").write_text(rep.to_json() + "\n", newline="\n")
        record(name, rep.passed, worst=rep.worst_violation)

    # degrees
    ratio = analysis.degree_ratio(FunctionId.H, 1e-6)
    record("degree_ratio_H_at_1e-6_near_1", abs(ratio - 1.0) <= 1e-3, ratio=ratio)
    xh = analysis.check_cm(analysis.power_scaled(FunctionId.H, 1.0), max_order=8)
    record("cm_x_H", xh.passed, worst=xh.worst_violation)
    x15 = analysis.check_cm(analysis.power_scaled(FunctionId.H, 1.5), max_order=2)
    record("cm_x1.5_H_fails", not x15.passed, witness=x15.witness)
    for name, dens in [("levy_z2H", densities.levy_density_z2H_obj),
                       ("levy_invzH", densities.levy_density_invzH_obj)]:
        jet = dens.jet(1e-3, 1, tol=1e-10)
        r = -1e-3 * jet[1] / jet[0]
        record(f"degree_ratio_{name}_near_0", abs(r) <= 0.05, ratio=r)

    # geometric criterion
    zgrid = gated_upper_halfplane_grid()
    geo_ok = True
    for fname in ("G", "INV_Z2H"):
        rep = analysis.check_stieltjes_geometric(fname, zgrid)
        geo_ok = geo_ok and rep.passed
    for eps in (0.1, 1.0, 10.0):
        rep = analysis.check_stieltjes_geometric("RESOLVENT", zgrid, eps=eps)
        geo_ok = geo_ok and rep.passed
    record("stieltjes_geometric", geo_ok)

    # decay limits
    theta = np.linspace(-np.pi, np.pi, 39)[1:-1]
    gvals = np.abs(eval_G(1e8 * np.exp(1j * theta)))
    theta2 = np.linspace(-np.pi / 2, np.pi / 2, 37)
    z2h = np.abs(1e-6 * np.exp(1j * theta2) * eval_G(1e-6 * np.exp(1j * theta2)))
    record("decay_G_at_1e8", float(np.max(gvals)) <= 0.06, max=float(np.max(gvals)))
    record("decay_z2H_at_1e-6", float(np.max(z2h)) <= 1e-4, max=float(np.max(z2h)))

    # tail law
    tail = rho(1e8) * math.log(1e8) ** 2
    record("rho_tail_law", 0.9 <= tail <= 1.05, value=tail)

    # operator monotonicity
    om_ok = True
    for fn in (FunctionId.INV_XH, FunctionId.X2H):
        for n in range(2, 7):
            rep = opmon.check_operator_monotone(fn, n=n, trials=200, seed=20240809)
            om_ok = om_ok and rep.passed
    control = opmon.check_operator_monotone(lambda x: x * x, n=2, trials=200,
                                            seed=20240809)
    if control.passed:
        control = opmon.check_operator_monotone(lambda x: x * x, n=2, trials=2000,
                                                seed=20240809)
    record("operator_monotone_trials", om_ok and not control.passed)

    # closure identities
    rep = analysis.check_closure_identities()
    record("closure_identities", rep.passed, worst=rep.worst_violation)
    return items


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="logratio",
                                description="log-ratio function toolkit")
    sub = p.add_subparsers(dest="command", required=True)

    fn_choices = [f.value for f in FunctionId]

    q = sub.add_parser("eval", help="evaluate a family member at a point")
    q.add_argument("--fn", required=True, choices=fn_choices)
    q.add_argument("--x", required=True, type=float)
    q.add_argument("--im", type=float, default=0.0)
    q.set_defaults(func=_cmd_eval)

    q = sub.add_parser("density", help="tabulate the densities as CSV")
    q.add_argument("--grid", required=True)
    q.add_argument("--out", default=None)
    q.set_defaults(func=_cmd_density)

    q = sub.add_parser("verify", help="verify an integral representation")
    q.add_argument("--rep", required=True,
                   choices=[r.value for r in RepresentationId] + ["all"])
    q.add_argument("--points", default=None)
    q.add_argument("--tol", type=float, default=None)
    q.add_argument("--out", default=None)
    q.set_defaults(func=_cmd_verify)

    q = sub.add_parser("check", help="run a property checker")
    q.add_argument("kind", choices=["cm", "lcm", "bernstein", "stieltjes", "opmon"])
    q.add_argument("--fn", required=True)
    q.add_argument("--order", type=int, default=10)
    q.add_argument("--grid", default=None)
    q.add_argument("--dim", type=int, default=4)
    q.add_argument("--trials", type=int, default=200)
    q.add_argument("--seed", type=int, default=0)
    q.add_argument("--out", default=None)
    q.set_defaults(func=_cmd_check)

    q = sub.add_parser("degree", help="bracket a completely monotonic degree")
    q.add_argument("--fn", required=True, choices=fn_choices)
    q.add_argument("--candidates", required=True)
    q.add_argument("--out", default=None)
    q.set_defaults(func=_cmd_degree)

    q = sub.add_parser("report", help="run the full acceptance suite")
    q.add_argument("what", choices=["all"])
    q.add_argument("--out", required=True)
    q.set_defaults(func=_cmd_report)
    return p


def run(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (NonConvergenceError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
