"""Command-line entry point: ``symmwave <group> <action> [options]``.

Exit codes: 0 on success or a passing check, 1 when a check fails or a
computation exceeds its budget, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import tempfile

import numpy as np

from . import chamber, kernels, parametrix, plancherel, strichartz, verify
from .rootsys import (RootSystem, RootSystemError, dims, half_sum_rho, parse_shorthand,
                      parse_system_text, weyl_group)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --------------------------------------------------------------------- input parsing


def load_system(spec: str | None) -> RootSystem:
    if spec is None:
        raise UsageError("--system is required for this command")
    if os.path.isfile(spec):
        with open(spec, encoding="utf-8") as fh:
            return parse_system_text(fh.read())
    return parse_shorthand(spec)


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(";", ",").split(",") if v.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _exponent(text: str) -> float:
    if text.strip().lower() in ("inf", "infinity", "oo"):
        return math.inf
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"bad exponent {text!r}") from None


def _complex(text: str) -> complex:
    try:
        return complex(text.replace(" ", "").replace("i", "j"))
    except ValueError:
        raise UsageError(f"bad complex number {text!r}") from None


def _times(args) -> list[float]:
    if args.t is not None and args.t_range is not None:
        raise UsageError("give either --t or --t-range, not both")
    if args.t is not None:
        return _floats(args.t)
    if args.t_range is not None:
        parts = args.t_range.split(":")
        if len(parts) != 3:
            raise UsageError("--t-range expects 'start:stop:count'")
        try:
            t0, t1, n = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError:
            raise UsageError("--t-range expects 'start:stop:count'") from None
        if not (0 < t0 < t1 and n >= 2):
            raise UsageError("--t-range needs 0 < start < stop and count >= 2")
        return kernels.log_times(t0, t1, n).tolist()
    raise UsageError("give times with --t or --t-range")


def _spectral_points(text: str, rank: int) -> np.ndarray:
    """A CSV file of points (header optional) or inline points separated by ';'."""
    if os.path.isfile(text):
        with open(text, encoding="utf-8", newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and not r[0].lstrip().startswith("#")]
        try:
            float(rows[0][0])
        except (ValueError, IndexError):
            rows = rows[1:]
        chunks = [",".join(r) for r in rows]
    else:
        chunks = text.split(";")
    pts = [_floats(c) for c in chunks if c.strip()]
    if not pts or any(len(p) != rank for p in pts):
        raise UsageError(f"each spectral point needs {rank} coordinate(s)")
    return np.array(pts)


# --------------------------------------------------------------------- output


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool):
        return str(int(v))
    return format(float(v), ".17g")


def csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def json_line(obj) -> str:
    return json.dumps(verify._clean(obj), sort_keys=True) + "\n"


def emit(text: str, out: str | None) -> None:
    """Write to stdout, or replace ``out`` atomically."""
    if out in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    folder = os.path.dirname(os.path.abspath(out))
    fd, tmp = tempfile.mkstemp(dir=folder, prefix=".symmwave-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, out)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _progress(msg: str) -> None:
    print(f"symmwave: {msg}", file=sys.stderr, flush=True)


# --------------------------------------------------------------------- commands


def cmd_rootsys_info(args) -> int:
    rs = load_system(args.system)
    d, big_d = dims(rs)
    rho = half_sum_rho(rs)
    info = {
        "label": rs.label,
        "catalog": rs.catalog,
        "rank": rs.rank,
        "positive_roots": [{"vector": r.vector.tolist(), "mult": r.mult, "reduced": r.is_reduced}
                           for r in rs.positive_roots],
        "simple_indices": list(rs.simple_indices),
        "dimension": d,
        "dimension_at_infinity": big_d,
        "rho": rho.tolist(),
        "rho_norm": float(np.linalg.norm(rho)),
        "weyl_order": len(weyl_group(rs)),
    }
    emit(json_line(info), args.out)
    return 0


def cmd_chamber_verify(args) -> int:
    rs = load_system(args.system)
    samples = args.samples or 10_000
    tol = 1e-10 if args.tol is None else args.tol
    rng = np.random.default_rng(args.seed)
    lam = rng.standard_normal((samples, rs.rank)) * np.exp(rng.uniform(-3, 3, (samples, 1)))
    residual = float(np.max(np.abs(chamber.chi_all(rs, lam).sum(axis=(-2, -1)) - 1.0)))
    consts = chamber.extract_constants(rs)
    support = chamber.support_properties_check(rs, samples, seed=args.seed)
    dual = chamber.dual_basis_residuals(rs)
    ok = residual <= tol and support["violations"] == 0 and max(dual.values()) <= 1e-12
    report = {
        "system": rs.label,
        "samples": samples,
        "seed": args.seed,
        "constants": consts.as_dict(),
        "dual_basis_residuals": dual,
        "partition_residual_max": residual,
        "partition_tolerance": tol,
        "support_checked": support["checked"],
        "support_violations": support["violations"],
        "violation_witnesses": support["witnesses"],
        "pass": ok,
    }
    emit(verify._dump(report) + "\n", args.out)
    return 0 if ok else 1


def cmd_plancherel_eval(args) -> int:
    rs = load_system(args.system)
    if args.lam is None:
        raise UsageError("--lambda is required")
    pts = _spectral_points(args.lam, rs.rank)
    pd = plancherel.plancherel_density(rs)
    dens = np.atleast_1d(plancherel.density(pd, pts))
    factors = plancherel.per_root_factors(pd, pts)
    header = [f"lambda_{i + 1}" for i in range(rs.rank)] + ["density"]
    header += [f"factor_root{f.index}" for f in pd.factors]
    rows = [list(p) + [v] + list(fs) for p, v, fs in zip(pts, dens, factors)]
    emit(csv_text(header, rows), args.out)
    return 0


def _kernel_results(args, rs, ts) -> list[kernels.QuadratureResult]:
    pd = plancherel.plancherel_density(rs)
    x = _floats(args.x) if args.x else [0.0] * rs.rank
    budget = args.budget or kernels.DEFAULT_BUDGET
    kappa = args.kappa
    _progress(f"{args.kind} kernel on {rs.label}: {len(ts)} time(s)")
    if args.kind == "I":
        if args.s is None:
            raise UsageError("--s is required for the oscillatory integral")
        return kernels.oscillatory_I_series(rs, pd, args.s, ts, x, args.regime, kappa=kappa, budget=budget)
    if args.kind == "poisson":
        if args.s is None:
            raise UsageError("--s is required for the Poisson kernel")
        return [kernels.poisson_kernel(rs, pd, complex(args.s, -t), x, c0=args.c0, kappa=kappa, budget=budget)
                for t in ts]
    if args.sigma is None:
        raise UsageError("--sigma is required for wave kernels")
    sigma = _complex(args.sigma)
    series = kernels.wave_kernel_tilde0_series if args.kind == "tilde0" else kernels.wave_kernel_infty_series
    return series(rs, pd, sigma, ts, x, c0=args.c0, kappa=kappa, budget=budget)


_KERNEL_HEADER = ["t", "re", "im", "abs", "abs_error"]


def _kernel_rows(ts, results):
    return [[t, r.value.real, r.value.imag, abs(r.value), r.abs_error_estimate] for t, r in zip(ts, results)]


def cmd_kernel_eval(args) -> int:
    rs = load_system(args.system)
    ts = _times(args)
    results = _kernel_results(args, rs, ts)
    emit(csv_text(_KERNEL_HEADER, _kernel_rows(ts, results)), args.out)
    return 0


def _default_target(kind: str, rs: RootSystem) -> float:
    d, big_d = dims(rs)
    if kind == "tilde0":
        return -(d - 1) / 2
    if kind in ("I", "infty"):
        return -big_d / 2
    raise UsageError("--target is required for Poisson decay fits")


def cmd_kernel_decay(args) -> int:
    rs = load_system(args.system)
    ts = _times(args)
    if len(ts) < 8:
        raise UsageError("decay fits need at least 8 times")
    target = args.target if args.target is not None else _default_target(args.kind, rs)
    tol = 0.15 if args.tol is None else args.tol
    results = _kernel_results(args, rs, ts)
    fit = kernels.decay_fit([(t, abs(r.value)) for t, r in zip(ts, results)])
    ok = abs(fit.exponent - target) <= tol
    footer = {"exponent": fit.exponent, "r2": fit.r_squared, "target": target, "tolerance": tol, "pass": ok}
    emit(csv_text(_KERNEL_HEADER, _kernel_rows(ts, results)) + json_line(footer), args.out)
    return 0 if ok else 1


def _grid_spec(text: str) -> tuple[float, float]:
    try:
        h, radius = (float(v) for v in text.split(":"))
    except ValueError:
        raise UsageError("--grid expects 'h:radius'") from None
    return h, radius


def cmd_parametrix_table(args) -> int:
    rs = load_system(args.system)
    h, radius = _grid_spec(args.grid)
    table = parametrix.uk_recursion(rs, parametrix.radial_grid(rs, h, radius), args.K)
    header = [f"H_{i + 1}" for i in range(rs.rank)] + ["r", "omega"] + [f"U{k}" for k in range(table.K + 1)]
    rows = [list(v) + [r, w] + list(u) for v, r, w, u in
            zip(table.grid.vectors(), table.grid.points, table.omega, table.u.T)]
    emit(csv_text(header, rows), args.out)
    return 0


def cmd_parametrix_checks(args) -> int:
    rs = load_system(args.system)
    samples = args.samples or 100
    tol = 1e-9 if args.tol is None else args.tol
    rng = np.random.default_rng(args.seed)
    lam = chamber.dual_basis(rs).lambdas
    pts = rng.uniform(0.05, 2.0, (samples, rs.rank)) @ lam
    cancel = max(max(abs(v) for v in parametrix.cancellation_check(rs, p)) for p in pts)
    omega_gap = max(abs(parametrix.omega_fn(rs, p) - parametrix.omega_closed_form(rs, p)) for p in pts)
    residual = {}
    for h in (2e-3, 1e-3):
        table = parametrix.uk_recursion(rs, parametrix.radial_grid(rs, h, 2.0), 1)
        residual[h] = parametrix.transport_residual(table, 0)
    # at roundoff level (constant U_0, as on H3) the observed order is noise
    order = math.log2(residual[2e-3] / residual[1e-3])
    b2 = 0.0
    for _ in range(20):
        z = complex(rng.uniform(0.05, 3.0), rng.uniform(-3.0, 3.0))
        lhs, rhs = parametrix.riesz_poisson_check(z, float(rng.uniform(-3.0, 3.0)), 0.5)
        b2 = max(b2, abs(lhs - rhs) / abs(rhs))
    ok = cancel <= tol and omega_gap <= 1e-9 and residual[1e-3] <= 1e-4 and (order >= 1.9 or residual[1e-3] <= 1e-10) and b2 <= 1e-6
    report = {
        "system": rs.label,
        "seed": args.seed,
        "samples": samples,
        "cancellation_max_abs": cancel,
        "cancellation_tolerance": tol,
        "omega_direct_vs_closed_form": omega_gap,
        "omega_at_origin": parametrix.omega_at_origin(rs),
        "transport_residual_h1e-3": residual[1e-3],
        "transport_residual_h2e-3": residual[2e-3],
        "transport_observed_order": order,
        "riesz_poisson_max_relative_error": b2,
        "pass": ok,
    }
    emit(verify._dump(report) + "\n", args.out)
    return 0 if ok else 1


def _exp_out(p: float):
    return "inf" if math.isinf(p) else p


def cmd_strichartz_admissible(args) -> int:
    p, q = _exponent(args.p), _exponent(args.q)
    ok = strichartz.is_admissible(args.d, p, q)
    emit(json_line({"d": args.d, "p": _exp_out(p), "q": _exp_out(q), "admissible": ok}), args.out)
    return 0


def cmd_strichartz_sigma(args) -> int:
    p, q = _exponent(args.p), _exponent(args.q)
    value = strichartz.sigma_pq(args.d, p, q)
    emit(json_line({"d": args.d, "p": _exp_out(p), "q": _exp_out(q), "sigma": value}), args.out)
    return 0


def cmd_gwp_exponents(args) -> int:
    emit(json_line(strichartz.exponent_family(args.d).as_dict()), args.out)
    return 0


def cmd_gwp_sigma(args) -> int:
    emit(json_line(strichartz.sigma_required(args.d, args.gamma).as_dict()), args.out)
    return 0


def cmd_verify_all(args) -> int:
    only = None
    if args.only:
        try:
            only = sorted({int(v) for v in args.only.split(",") if v.strip()})
        except ValueError:
            raise UsageError("--only expects a comma-separated list of criterion numbers") from None
        unknown = [n for n in only if n not in verify.CRITERIA]
        if unknown:
            raise UsageError(f"unknown criterion {unknown[0]}")
    report = verify.verify_all(args.seed, only=only, include_slow=args.slow)
    for line in verify.summary_lines(report):
        print(line, file=sys.stderr)
    emit(verify.report_text(report), args.out)
    return 0 if report["all_pass"] else 1


# --------------------------------------------------------------------- parser


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--system", help="system file, or shorthand like H3, A2, B2:complex")
    p.add_argument("--out", help="output path (default: standard output)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget", type=int, help="integrand evaluation cap per query")
    p.add_argument("--samples", type=int)
    p.add_argument("--tol", type=float)
    return p


def _kernel_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--kind", choices=("I", "poisson", "tilde0", "infty"), required=True)
    p.add_argument("--t", help="comma-separated times")
    p.add_argument("--t-range", help="log-spaced times 'start:stop:count'")
    p.add_argument("--x", help="comma-separated chamber point (default: origin)")
    p.add_argument("--s", type=float, help="damping for I and the Poisson kernel")
    p.add_argument("--sigma", help="complex order for wave kernels, e.g. 2+1j")
    p.add_argument("--kappa", type=float, help="Klein-Gordon mass replacing |rho|")
    p.add_argument("--regime", choices=("full", "minus", "plus"), default="full")
    p.add_argument("--c0", type=float, default=1.0, help="inverse-transform constant")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = _Parser(prog="symmwave", description="Wave kernels and exponents on symmetric spaces.")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    def action(group, name, func, help_text):
        p = group.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(func=func)
        return p

    g = groups.add_parser("rootsys").add_subparsers(dest="action", required=True, parser_class=_Parser)
    action(g, "info", cmd_rootsys_info, "root data, dimensions and rho")

    g = groups.add_parser("chamber").add_subparsers(dest="action", required=True, parser_class=_Parser)
    action(g, "verify", cmd_chamber_verify, "partition constants and sampled support checks")

    g = groups.add_parser("plancherel").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = action(g, "eval", cmd_plancherel_eval, "density and per-root factors")
    p.add_argument("--lambda", dest="lam", help="CSV file of points, or inline '1,2;3,4'")

    g = groups.add_parser("kernel").add_subparsers(dest="action", required=True, parser_class=_Parser)
    _kernel_options(action(g, "eval", cmd_kernel_eval, "kernel values as CSV"))
    p = action(g, "decay", cmd_kernel_decay, "kernel values plus a log-log decay fit")
    _kernel_options(p)
    p.add_argument("--target", type=float, help="expected exponent")

    g = groups.add_parser("parametrix").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = action(g, "table", cmd_parametrix_table, "omega and U_k along a ray")
    p.add_argument("--K", type=int, required=True)
    p.add_argument("--grid", required=True, help="'h:radius'")
    action(g, "checks", cmd_parametrix_checks, "cancellations, transport and Riesz identities")

    g = groups.add_parser("strichartz").add_subparsers(dest="action", required=True, parser_class=_Parser)
    for name, func in (("admissible", cmd_strichartz_admissible), ("sigma", cmd_strichartz_sigma)):
        p = action(g, name, func, f"{name} for an exponent pair")
        p.add_argument("--d", type=int, required=True)
        p.add_argument("--p", required=True)
        p.add_argument("--q", required=True)

    g = groups.add_parser("gwp").add_subparsers(dest="action", required=True, parser_class=_Parser)
    action(g, "exponents", cmd_gwp_exponents, "critical exponent family").add_argument(
        "--d", type=int, required=True)
    p = action(g, "sigma", cmd_gwp_sigma, "regularity required for a power gamma")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--gamma", type=float, required=True)

    g = groups.add_parser("verify").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = action(g, "all", cmd_verify_all, "run the acceptance suite")
    p.add_argument("--slow", action="store_true", help="include the slow higher-rank criterion")
    p.add_argument("--only", help="comma-separated criterion numbers")
    return parser


def _check_threads() -> None:
    raw = os.environ.get("SYMMWAVE_THREADS")
    if raw is None:
        return
    if not raw.strip().isdigit() or int(raw) < 1:
        raise UsageError("SYMMWAVE_THREADS must be a positive integer")


_USAGE_ERRORS = (UsageError, RootSystemError, chamber.ChamberError, kernels.KernelError,
                 parametrix.ParametrixError, strichartz.StrichartzError, plancherel.GammaPoleError,
                 plancherel.UnsupportedSphericalFunction, FileNotFoundError)


def main(argv: list[str] | None = None) -> int:
    try:
        _check_threads()
        args = build_parser().parse_args(argv)
        return args.func(args)
    except _USAGE_ERRORS as exc:
        print(f"symmwave: error: {exc}", file=sys.stderr)
        return 2
    except (kernels.BudgetExceeded, chamber.ConstantExtractionError) as exc:
        print(f"symmwave: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
