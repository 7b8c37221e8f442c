"""Acceptance suite: one function per criterion, each returning a plain dict
whose content depends only on the seed (timings are reported separately)."""

from __future__ import annotations

import json
import math
import sys
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import chamber, kernels, parametrix, plancherel, strichartz
from .rootsys import CATALOGS, build_root_system, dims, real_hyperbolic


@dataclass(frozen=True)
class Criterion:
    number: int
    name: str
    limit_seconds: float
    run: Callable[[int], dict]
    slow_only: bool = False


def _partition_systems():
    return [build_root_system(c, preset=p) for c in ("A2", "A3", "B2") for p in ("normal", "complex")]


def _random_chamber_points(rs, n, rng):
    lam = chamber.dual_basis(rs).lambdas
    coeffs = rng.uniform(0.05, 2.0, (n, rs.rank))
    return coeffs @ lam


def partition_of_unity(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    worst = {}
    for rs in _partition_systems():
        lam = rng.standard_normal((10_000, rs.rank)) * np.exp(rng.uniform(-3, 3, (10_000, 1)))
        total = chamber.chi_all(rs, lam).sum(axis=(-2, -1))
        worst[rs.label] = float(np.max(np.abs(total - 1.0)))
    return {"max_residual": worst, "tolerance": 1e-10, "pass": max(worst.values()) <= 1e-10}


def dual_basis_identities(seed: int) -> dict:
    res = {c: chamber.dual_basis_residuals(build_root_system(c)) for c in CATALOGS}
    worst = max(max(v.values()) for v in res.values())
    return {"residuals": res, "tolerance": 1e-12, "pass": worst <= 1e-12}


def constants_ledger(seed: int) -> dict:
    out = {}
    ok = True
    for i, name in enumerate(("A2", "A3", "B2", "G2")):
        rs = build_root_system(name)
        k = chamber.extract_constants(rs)
        support = chamber.support_properties_check(rs, 100_000, seed=seed + i)
        exact = k.C_Sigma == min(k.c5 / (2 * k.M2), 0.5)
        good = k.c4 > 0 and k.c5 > 0 and k.c1 < k.c2 and exact and support["violations"] == 0
        ok &= good
        out[name] = {"constants": k.as_dict(), "C_Sigma_exact": exact,
                     "support_checked": support["checked"], "violations": support["violations"], "pass": good}
    return {"systems": out, "pass": ok}


def phase_derivative(seed: int) -> dict:
    rs = build_root_system("A2")
    k = chamber.extract_constants(rs)
    rng = np.random.default_rng(seed)
    tiles = chamber.all_tiles(rs)
    configs = 4
    per = math.ceil(10_000 / (len(tiles) * configs))
    lowest = math.inf
    total = 0
    for tile in tiles:
        for _ in range(configs):
            t = float(rng.choice([-1.0, 1.0]) * rng.uniform(0.5, 5.0))
            tau = complex(rng.uniform(0.05, 1.0), -t)
            x = _random_chamber_points(rs, 1, rng)[0]
            x *= rng.uniform(0.0, 1.0) * k.C_Sigma * abs(t) / np.linalg.norm(x)
            res = chamber.phase_derivative_lower_bound(rs, tile, tau, x, per, seed=int(rng.integers(2**31)))
            lowest = min(lowest, res["min"])
            total += res["samples"]
    bound = (math.sqrt(2) - 1) / 2 * k.c5
    return {"min_derivative": lowest, "bound": bound, "samples": total, "pass": lowest >= bound}


def _loglog_slope(radii, values) -> float:
    return float(np.polyfit(np.log(radii), np.log(values), 1)[0])


def plancherel_asymptotics(seed: int) -> dict:
    rs = build_root_system("A2")
    pd = plancherel.plancherel_density(rs)
    rng = np.random.default_rng(seed)
    small, large = np.geomspace(1e-3, 1e-1, 20), np.geomspace(1e2, 1e4, 20)
    slopes_small, slopes_large = [], []
    while len(slopes_small) < 8:
        u = rng.standard_normal(2)
        u /= np.linalg.norm(u)
        if np.min(np.abs(rs.roots @ u)) < 0.1:
            continue  # keep generic rays away from the walls
        slopes_small.append(_loglog_slope(small, plancherel.density(pd, np.outer(small, u))))
        slopes_large.append(_loglog_slope(large, plancherel.density(pd, np.outer(large, u))))
    h3 = real_hyperbolic(3)
    lam = np.geomspace(1e-3, 1e4, 60)
    ratio = plancherel.density(plancherel.plancherel_density(h3), lam) / lam**2
    spread = float(np.max(np.abs(ratio / ratio.mean() - 1)))
    ok = (max(abs(s - 6) for s in slopes_small) <= 0.1 and max(abs(s - 3) for s in slopes_large) <= 0.1
          and spread <= 1e-9)
    return {"slopes_small": slopes_small, "slopes_large": slopes_large, "h3_relative_spread": spread, "pass": ok}


def _fit_report(ts, results, target, tol, r2_min=None) -> dict:
    fit = kernels.decay_fit([(t, abs(r.value)) for t, r in zip(ts, results)])
    ok = abs(fit.exponent - target) <= tol and (r2_min is None or fit.r_squared >= r2_min)
    out = {"exponent": fit.exponent, "r2": fit.r_squared, "target": target, "tolerance": tol,
           "t_range": list(fit.t_range), "points": len(ts), "pass": ok}
    if r2_min is not None:
        out["r2_min"] = r2_min
    return out


SMALL_TIME_SIGMA = 2 + 1j


def small_time_rate(seed: int) -> dict:
    rs = real_hyperbolic(3)
    pd = plancherel.plancherel_density(rs)
    ts = np.geomspace(0.05, 0.8, 12)
    res = kernels.wave_kernel_tilde0_series(rs, pd, SMALL_TIME_SIGMA, ts, [0.01])
    rep = _fit_report(ts, res, -1.0, 0.15, r2_min=0.98)
    rep["sigma"] = [SMALL_TIME_SIGMA.real, SMALL_TIME_SIGMA.imag]
    rep["max_relative_error"] = max(r.abs_error_estimate / abs(r.value) for r in res)
    return rep


def large_time_rate(seed: int) -> dict:
    rs = real_hyperbolic(3)
    pd = plancherel.plancherel_density(rs)
    _, big_d = dims(rs)
    ts = np.geomspace(4, 100, 12)
    osc = _fit_report(ts, kernels.oscillatory_I_series(rs, pd, 0.1, ts, [0.0]), -big_d / 2, 0.15)
    ts2 = np.geomspace(4, 60, 10)
    inf = _fit_report(ts2, kernels.wave_kernel_infty_series(rs, pd, 1.0, ts2, [0.0]), -big_d / 2, 0.2)
    return {"oscillatory_I": osc, "omega_infty": inf, "pass": osc["pass"] and inf["pass"]}


def large_time_rate_higher_rank(seed: int) -> dict:
    rs = build_root_system("A2")
    pd = plancherel.plancherel_density(rs)
    _, big_d = dims(rs)
    ts = np.geomspace(3, 30, 10)
    res = kernels.oscillatory_I_series(rs, pd, 1.0, ts, [0.0, 0.0], budget=10**9)
    rep = _fit_report(ts, res, -big_d / 2, 0.3)
    rep["s"] = 1.0
    return rep


def cancellations(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    worst = {}
    for name in ("A2", "B2", "G2"):
        rs = build_root_system(name)
        pts = _random_chamber_points(rs, 100, rng)
        worst[name] = max(max(abs(v) for v in parametrix.cancellation_check(rs, h)) for h in pts)
    return {"max_abs": worst, "tolerance": 1e-9, "pass": max(worst.values()) <= 1e-9}


TRANSPORT_SYSTEM_DIM = 5


def transport_identity(seed: int) -> dict:
    rs = real_hyperbolic(TRANSPORT_SYSTEM_DIM)
    residual = {}
    for h in (2e-3, 1e-3):
        table = parametrix.uk_recursion(rs, parametrix.radial_grid(rs, h, 4.0), 1)
        residual[h] = parametrix.transport_residual(table, 0)
    ratio = residual[2e-3] / residual[1e-3]
    order = math.log2(ratio)
    ok = residual[1e-3] <= 1e-4 and ratio >= 4.0
    return {"system": rs.label, "residual_h1e-3": residual[1e-3], "residual_h2e-3": residual[2e-3],
            "refinement_ratio": ratio, "observed_order": order, "pass": ok}


def riesz_poisson_identity(seed: int) -> dict:
    rng = np.random.default_rng(seed)
    worst = 0.0
    exact = True
    for _ in range(20):
        z = complex(rng.uniform(0.05, 3.0), rng.uniform(-3.0, 3.0))
        u = float(rng.uniform(-3.0, 3.0))
        lhs, rhs = parametrix.riesz_poisson_check(z, u, 0.5)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
        l1, r1 = parametrix.riesz_poisson_check(z, u, 1)
        exact &= l1 == r1
    return {"max_relative_error": worst, "tolerance": 1e-6, "eps1_exact": exact,
            "pass": worst <= 1e-6 and exact}


def poisson_vs_parametrix(seed: int) -> dict:
    rs = real_hyperbolic(3)
    pd = plancherel.plancherel_density(rs)
    d, _ = dims(rs)
    tau = 0.5 - 0.5j
    c0 = parametrix.poisson_c0_rank_one(rs)
    table = parametrix.uk_recursion(rs, parametrix.radial_grid(rs, 1e-3, 2.0), d // 2)
    lead = parametrix.a_tau_leading(rs, table, tau, [1.0])
    exact = kernels.poisson_kernel(rs, pd, tau, [1.0], c0=c0).value
    gap = abs(exact - lead) / abs(exact)
    return {"poisson": [exact.real, exact.imag], "leading": [lead.real, lead.imag], "c0": c0,
            "relative_gap": gap, "tolerance": 0.2, "pass": gap <= 0.2}


def exponent_calculators(seed: int) -> dict:
    gamma0 = strichartz.exponent_family(3).gamma_0
    worst = 0.0
    for d in range(3, 11):
        f = strichartz.exponent_family(d)
        worst = max(worst,
                    abs(strichartz.sigma_1(d, f.gamma_1)),
                    abs(strichartz.sigma_1(d, f.gamma_2) - strichartz.sigma_2(d, f.gamma_2)),
                    abs(strichartz.sigma_2(d, f.gamma_c) - 0.5),
                    abs(strichartz.sigma_3(d, f.gamma_c) - 0.5))
    cases = [strichartz.is_admissible(4, math.inf, 2) is True,
             strichartz.is_admissible(4, 2, 4) is True,
             strichartz.is_admissible(4, 3, 2) is False]
    g0_err = abs(gamma0 - (1 + math.sqrt(2)))
    return {"gamma0_error": g0_err, "junction_max_error": worst, "admissibility_cases": cases,
            "pass": g0_err <= 1e-12 and worst <= 1e-12 and all(cases)}


_SEEDED = (1, 3, 4, 8, 10)


def determinism(seed: int) -> dict:
    first = {n: _dump(CRITERIA[n].run(seed)) for n in _SEEDED}
    second = {n: _dump(CRITERIA[n].run(seed)) for n in _SEEDED}
    same = all(first[n] == second[n] for n in _SEEDED)
    return {"rerun_criteria": list(_SEEDED), "identical": same, "pass": same}


CRITERIA: dict[int, Criterion] = {c.number: c for c in (
    Criterion(1, "partition of unity", 30, partition_of_unity),
    Criterion(2, "dual basis identities", 1, dual_basis_identities),
    Criterion(3, "constants ledger and support properties", 60, constants_ledger),
    Criterion(4, "phase derivative lower bound", 30, phase_derivative),
    Criterion(5, "Plancherel density asymptotics", 30, plancherel_asymptotics),
    Criterion(6, "wave kernel small-time rate", 600, small_time_rate),
    Criterion(7, "large-time rate", 600, large_time_rate),
    Criterion(8, "cancellation sums", 5, cancellations),
    Criterion(9, "transport identity", 60, transport_identity),
    Criterion(10, "Riesz-Poisson identity", 30, riesz_poisson_identity),
    Criterion(11, "Poisson kernel vs leading parametrix term", 60, poisson_vs_parametrix),
    Criterion(12, "exponent calculators", 1, exponent_calculators),
    Criterion(13, "determinism of seeded sections", 600, determinism),
    Criterion(14, "large-time rate, A2 (slow)", 7200, large_time_rate_higher_rank, slow_only=True),
)}


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    return obj


def _dump(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2)


def run_criterion(number: int, seed: int, log=sys.stderr) -> tuple[dict, float]:
    crit = CRITERIA[number]
    start = time.perf_counter()
    result = _clean(crit.run(seed))
    elapsed = time.perf_counter() - start
    result = {"criterion": number, "name": crit.name, **result}
    if log is not None:
        status = "PASS" if result["pass"] else "FAIL"
        print(json.dumps({"criterion": number, "status": status, "seconds": round(elapsed, 3),
                          "limit_seconds": crit.limit_seconds}), file=log, flush=True)
    return result, elapsed


def verify_all(seed: int, only=None, include_slow: bool = False, log=sys.stderr) -> dict:
    numbers = sorted(only) if only else [n for n, c in CRITERIA.items() if include_slow or not c.slow_only]
    results = [run_criterion(n, seed, log)[0] for n in numbers]
    primary = [r["pass"] for r in results if not CRITERIA[r["criterion"]].slow_only]
    return {"seed": seed, "criteria": results, "all_pass": all(primary)}


def report_text(report: dict) -> str:
    return _dump(report) + "\n"


def summary_lines(report: dict) -> list[str]:
    return [f"criterion {r['criterion']:>2} {'PASS' if r['pass'] else 'FAIL'}  {r['name']}"
            for r in report["criteria"]]

