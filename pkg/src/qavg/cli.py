"""Command-line entry point.

Exit codes: 0 all checks pass, 1 a mathematical check failed, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import experiments as ex
from .bounds import (
    BoundReport,
    NotHyperbolicError,
    ProbeMeaninglessError,
    fit_log_slope,
    reports_to_csv,
    sharpness_probe,
)
from .config import ConfigError, ExperimentConfig, config_from_dict, load_config, parse_point
from .ffield import FieldError, field_from_order
from .grid import dump_grid, write_atomic
from .quadric import classify_point, hyperbolicity_test, make_surface, region_for
from .spectral import surface_data

log = logging.getLogger("qavg")

OK, FAILED, USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# config assembly
# ---------------------------------------------------------------------------


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise ConfigError(f"expected comma-separated integers, got {text!r}") from exc


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.q is not None:
        cfg.q_list = _int_list(args.q)
    if args.dim is not None:
        if args.coeffs is None and cfg.coeffs is not None and len(cfg.coeffs) != args.dim:
            cfg.coeffs = None
        cfg.d = args.dim
    if args.coeffs is not None:
        cfg.coeffs = _int_list(args.coeffs)
        if args.dim is None:
            cfg.d = len(cfg.coeffs)
    if args.seed is not None:
        cfg.seeds = [args.seed]
    if args.out is not None:
        cfg.output_dir = args.out
    if getattr(args, "trials", None) is not None:
        cfg.trials = args.trials
    if getattr(args, "point", None) is not None:
        cfg.point = [s.strip() for s in args.point.split(",")]
    return cfg.validate()


def _out(cfg: ExperimentConfig, name: str) -> Path:
    return Path(cfg.output_dir) / name


def _need_even(cfg: ExperimentConfig, minimum: int = 2) -> None:
    if cfg.d % 2 or cfg.d < minimum:
        raise UsageError(f"this command needs even d >= {minimum}, got d = {cfg.d}")


def _summary(rows, label: str) -> int:
    failed = [r for r in rows if not r.passed]
    for r in rows:
        print(f"{'PASS' if r.passed else 'FAIL'}  q={r.q} d={r.d} {r.check} value={r.value:.3e}")
    print(f"{label}: {len(rows) - len(failed)}/{len(rows)} checks passed")
    return OK if not failed else FAILED


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_verify_fourier(cfg: ExperimentConfig) -> int:
    rows = []
    for q in cfg.q_list:
        rows += ex.fourier_checks(
            field_from_order(q), cfg.d, trials=cfg.trials or 100, seed=cfg.seeds[0], tol=cfg.tolerances.identity
        )
    write_atomic(_out(cfg, "fourier.csv"), ex.rows_to_csv(rows))
    return _summary(rows, "verify-fourier")


def cmd_verify_sigma(cfg: ExperimentConfig) -> int:
    _need_even(cfg)
    t = cfg.tolerances
    rows = []
    for q in cfg.q_list:
        S = make_surface(field_from_order(q), cfg.pattern, cfg.grid_budget)
        rows += ex.sigma_checks(S, tol=t.identity, band=(t.band_lo, t.band_hi))
    write_atomic(_out(cfg, "sigma.csv"), ex.rows_to_csv(rows))
    for r in rows:
        if r.check == "point-count":
            print(f"q={r.q} count {r.lhs},{r.rhs},{r.status}")
    return _summary(rows, "verify-sigma")


def kernel_verdict(sweeps: dict[int, ex.KernelSweep], cfg: ExperimentConfig) -> list[tuple[str, bool, str]]:
    """Certification invariants over a per-q family of kernel sweeps."""
    t = cfg.tolerances
    qs = sorted(sweeps)
    out = []
    linf = max(sweeps[q].max_constant(q, "linf") for q in qs)
    out.append(("linf-ceiling", linf <= t.linf_ceiling, f"max C = {linf:.4f} <= {t.linf_ceiling}"))
    c_ii = max(c for q in qs for _, c, _ in sweeps[q].splits)
    c_i1 = max(c for q in qs for _, _, c in sweeps[q].splits)
    out.append(("EII", c_ii <= 1 + t.split_slack, f"max C = {c_ii:.6f}"))
    out.append(("EI1", c_i1 <= 1 + t.split_slack, f"max C = {c_i1:.6f}"))
    if len(qs) > 1:
        lo, hi = qs[0], qs[-1]
        for kind in ("l2", "lcrit"):
            a, b = sweeps[lo].max_constant(lo, kind), sweeps[hi].max_constant(hi, kind)
            ok = b <= t.trend_factor * a
            out.append((f"{kind}-trend", ok, f"max C(q={hi}) = {b:.4f} vs {t.trend_factor} x max C(q={lo}) = {t.trend_factor * a:.4f}"))
    return out


def cmd_verify_kernel_bounds(cfg: ExperimentConfig) -> int:
    _need_even(cfg, 4)
    if not cfg.families:
        raise UsageError("no families")
    sweeps = {}
    for q in cfg.q_list:
        S = make_surface(field_from_order(q), cfg.pattern, cfg.grid_budget)
        sweeps[q] = ex.kernel_sweep(
            S, trials=cfg.trials or 200, seed=cfg.seeds[0], linf_ceiling=cfg.tolerances.linf_ceiling, families=cfg.families
        )
        for regime in ("J1", "J2", "J3"):
            cells = [f"{k}={sweeps[q].max_constant(q, k, regime):.4f}" for k in ("linf", "l2", "lcrit")]
            print(f"q={q} {regime}: max C " + " ".join(cells))
    reports = [r for q in cfg.q_list for r in sweeps[q].reports]
    write_atomic(_out(cfg, "kernel_bounds.csv"), reports_to_csv(reports))
    verdict = kernel_verdict(sweeps, cfg)
    for name, ok, detail in verdict:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return OK if all(ok for _, ok, _ in verdict) else FAILED


def averaging_verdict(sweep: ex.AveragingSweep, cfg: ExperimentConfig) -> list[tuple[str, bool, str]]:
    t = cfg.tolerances
    maxima = sweep.maxima()
    qs = sorted(maxima)
    out = [(f"max-ratio q={q}", maxima[q] <= t.battery_ceiling, f"{maxima[q]:.4f} <= {t.battery_ceiling}") for q in qs]
    for a, b in zip(qs, qs[1:]):
        rho = maxima[b] / maxima[a]
        out.append((f"consecutive q={a}->{b}", t.band_lo <= rho <= t.band_hi, f"ratio {rho:.4f}"))
    return out


def cmd_verify_averaging(cfg: ExperimentConfig) -> int:
    _need_even(cfg, 4)
    for q in cfg.q_list:
        S = make_surface(field_from_order(q), cfg.pattern, cfg.grid_budget)
        if not hyperbolicity_test(S):
            raise UsageError(f"theorem hypothesis fails: no d/2-dimensional subspace (q = {q})")
    sweep = ex.averaging_sweep(
        cfg.pattern,
        cfg.q_list,
        seeds=cfg.seeds,
        point=cfg.exponent_point(),
        ceiling=cfg.tolerances.battery_ceiling,
        families=cfg.families,
    )
    write_atomic(_out(cfg, "averaging.csv"), reports_to_csv(sweep.reports))
    x, y = sweep.point
    print(f"exponent point (1/p, 1/r) = ({x}, {y})")
    verdict = averaging_verdict(sweep, cfg)
    for name, ok, detail in verdict:
        print(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
    return OK if all(ok for _, ok, _ in verdict) else FAILED


def cmd_sharpness(cfg: ExperimentConfig) -> int:
    point = cfg.exponent_point()
    if point is None:
        raise UsageError("sharpness needs --point 1/p,1/r")
    try:
        result = sharpness_probe(cfg.pattern, point, cfg.q_list)
    except ProbeMeaninglessError as exc:
        raise UsageError(str(exc)) from exc
    rows = list(result.reports)
    for name, slope in result.slopes.items():
        rows.append(
            BoundReport(
                q=0, d=cfg.d, coeffs=tuple(cfg.pattern), experiment="sharpness-fit", family=name,
                size=None, regime="", lhs=slope, rhs=1.0, constant=slope, passed=True,
            )
        )
    write_atomic(_out(cfg, "sharpness.csv"), reports_to_csv(rows))
    t = cfg.tolerances
    status = OK
    for name, slope in result.slopes.items():
        if name == "subspace":
            ok = t.slope_lo <= slope <= t.slope_hi
            status = status if ok else FAILED
            print(f"{'PASS' if ok else 'FAIL'}  slope[{name}] = {slope:.4f} in [{t.slope_lo}, {t.slope_hi}]")
        else:
            print(f"INFO  slope[{name}] = {slope:.4f}")
    return status


def cmd_region(args: argparse.Namespace) -> int:
    R = region_for(args.dim, args.hyperbolic)
    doc = {
        "d": args.dim,
        "hyperbolic": args.hyperbolic,
        "vertices": [[str(x), str(y)] for x, y in R.vertices],
    }
    if args.point is not None:
        pt = parse_point(args.point)
        doc["point"] = [str(pt[0]), str(pt[1])]
        doc["classification"] = classify_point(R, pt)
    print(json.dumps(doc))
    return OK


def cmd_dump_grid(cfg: ExperimentConfig, what: str) -> int:
    S = make_surface(field_from_order(cfg.q_list[0]), cfg.pattern, cfg.grid_budget)
    data = surface_data(S)
    grid = {
        "indicator": data.indicator,
        "sigma": data.sigma_check,
        "kernel": data.kernel,
        "kernel-hat": data.kernel_hat,
    }[what]
    path = _out(cfg, f"{what}_q{S.field.q}_d{S.d}.csv")
    dump_grid(grid, path)
    print(path)
    return OK


GNUPLOT = """set datafile separator ','
set logscale x
set xlabel '{x}'
set ylabel '{y}'
set key autotitle columnhead
plot '{csv}' using '{x}':'{y}' with points
"""


def cmd_plot_script(args: argparse.Namespace) -> int:
    text = GNUPLOT.format(csv=args.csv, x=args.x, y=args.y)
    if args.out:
        write_atomic(args.out, text)
    else:
        sys.stdout.write(text)
    return OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file")
    p.add_argument("--q", help="comma-separated field sizes, e.g. 3,5,7")
    p.add_argument("--dim", type=int, help="dimension d")
    p.add_argument("--coeffs", help="comma-separated signed coefficients, e.g. --coeffs=1,-1,1,-1")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qavg", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    for name in ("verify-fourier", "verify-sigma", "verify-kernel-bounds", "verify-averaging", "sharpness"):
        p = sub.add_parser(name)
        _common(p)
        p.add_argument("--trials", type=int)
        p.add_argument("--point", help="exponent pair 1/p,1/r as fractions, e.g. 4/5,1/5")

    p = sub.add_parser("region")
    p.add_argument("--dim", type=int, required=True)
    group = p.add_mutually_exclusive_group()
    group.add_argument("--hyperbolic", dest="hyperbolic", action="store_true", default=True)
    group.add_argument("--general", dest="hyperbolic", action="store_false")
    p.add_argument("--point")

    p = sub.add_parser("dump-grid")
    _common(p)
    p.add_argument("--what", choices=("indicator", "sigma", "kernel", "kernel-hat"), default="sigma")

    p = sub.add_parser("plot-script")
    p.add_argument("--csv", required=True)
    p.add_argument("--x", default="q")
    p.add_argument("--y", default="constant")
    p.add_argument("--out")
    return parser


COMMANDS = {
    "verify-fourier": cmd_verify_fourier,
    "verify-sigma": cmd_verify_sigma,
    "verify-kernel-bounds": cmd_verify_kernel_bounds,
    "verify-averaging": cmd_verify_averaging,
    "sharpness": cmd_sharpness,
}


def main(argv: list[str] | None = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(message)s")
    try:
        if args.command == "region":
            return cmd_region(args)
        if args.command == "plot-script":
            return cmd_plot_script(args)
        cfg = build_config(args)
        if args.command == "dump-grid":
            return cmd_dump_grid(cfg, args.what)
        return COMMANDS[args.command](cfg)
    except (ConfigError, UsageError, FieldError, NotHyperbolicError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


if __name__ == "__main__":
    sys.exit(main())
