"""Oscillatory spectral integrals, Poisson and wave kernels, and decay fits.

Every kernel here is an integral over the spectral space of the form

    int |c(lambda)|^-2 F(lambda) e^{-tau E(lambda)} dlambda,   E = sqrt(|lambda|^2 + |rho|^2),

with F either a plane wave e^{i<x, lambda>} or the spherical function
phi_lambda(x).  In polar coordinates the angular part does not depend on
tau, so a :class:`SpectralGrid` stores the sphere-summed values once and
then integrates against e^{-tau E} for as many tau as needed.

The radial integral uses equal-width panels with 10-point Gauss-Legendre
nodes.  Each grid holds two levels (panel width W and W/2, angular
resolution N and 2N), and the error estimate is their difference plus a
truncation tail and a rounding floor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import gammaincc, roots_legendre

from .chamber import chi_all, cutoff
from .plancherel import (
    PlancherelDensity,
    UnsupportedSphericalFunction,
    density,
    phi_zero,
    rgamma,
    spherical_rank_one,
)
from .rootsys import RootSystem, cartan_density, dims, half_sum_rho, in_closed_chamber

DEFAULT_BUDGET = 10_000_000
_PANEL_NODES = 10
_TAIL_LOG = 37.0
_HYPERGEOMETRIC_CAP = 20_000
_GL_X, _GL_W = roots_legendre(_PANEL_NODES)
_EPS = np.finfo(float).eps


class KernelError(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    """The requested evaluation needs more integrand evaluations than allowed."""


@dataclass(frozen=True)
class KernelQuery:
    sigma: complex
    t: float
    x: np.ndarray
    s: float | None = None
    kg_kappa: float | None = None

    def __post_init__(self):
        if self.t == 0:
            raise KernelError("t must be nonzero")
        if self.kg_kappa is not None and not self.kg_kappa > 0:
            raise KernelError("Klein-Gordon kappa must be positive")
        object.__setattr__(self, "x", np.atleast_1d(np.asarray(self.x, dtype=float)))
        object.__setattr__(self, "sigma", complex(self.sigma))


@dataclass(frozen=True)
class QuadratureResult:
    value: complex
    abs_error_estimate: float
    evaluations: int


@dataclass(frozen=True)
class DecayFit:
    exponent: float
    intercept: float
    r_squared: float
    t_range: tuple[float, float]


# --------------------------------------------------------------------- phase geometry


def _rho_norm(rs: RootSystem) -> float:
    return float(np.linalg.norm(half_sum_rho(rs)))


def phase(rs: RootSystem, t: float, A, lam) -> float:
    """sqrt(|lambda|^2 + |rho|^2) + <A/t, lambda>."""
    if t == 0:
        raise KernelError("t must be nonzero")
    A = np.asarray(A, dtype=float)
    lam = np.asarray(lam, dtype=float)
    return float(np.sqrt(lam @ lam + _rho_norm(rs) ** 2) + (A @ lam) / t)


def phase_gradient(rs: RootSystem, t: float, A, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    return lam / np.sqrt(lam @ lam + _rho_norm(rs) ** 2) + np.asarray(A, dtype=float) / t


def critical_point(rs: RootSystem, t: float, A) -> np.ndarray:
    a = np.asarray(A, dtype=float) / t
    ratio = float(np.linalg.norm(a))
    if ratio >= 1:
        raise KernelError("critical point needs |A| < |t|")
    return -_rho_norm(rs) * a / math.sqrt(1 - ratio * ratio)


def hessian_phase(rs: RootSystem, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    e2 = lam @ lam + _rho_norm(rs) ** 2
    return np.eye(lam.size) / math.sqrt(e2) - np.outer(lam, lam) / e2**1.5


# --------------------------------------------------------------------- C_{sigma,d}


def c_sigma_d(sigma: complex, d: int) -> complex:
    """e^{sigma^2} / (Gamma((d+1)/2 - sigma) Gamma(sigma)); zero at the Gamma poles."""
    sigma = complex(sigma)
    return complex(np.exp(sigma * sigma) * rgamma((d + 1) / 2 - sigma) * rgamma(sigma))


def c_sigma_bound(sigma: complex, d: int) -> float:
    sigma = complex(sigma)
    b = abs(sigma.imag)
    return abs(sigma) * abs(sigma - (d + 1) / 2) * math.exp(math.pi * b - b * b)


def c_sigma_bound_check(d: int, re_steps: int = 41, im_max: float = 8.0, im_steps: int = 161) -> dict:
    """Sweep the closed strip and report the smallest K with |C| <= K * bound."""
    res = np.linspace(0.0, (d + 1) / 2, re_steps)
    ims = np.linspace(-im_max, im_max, im_steps)
    worst = 0.0
    count = 0
    for a in res:
        for b in ims:
            sig = complex(a, b)
            bound = c_sigma_bound(sig, d)
            if bound == 0:
                continue
            worst = max(worst, abs(c_sigma_d(sig, d)) / bound)
            count += 1
    return {"K": worst, "points": count, "finite": bool(np.isfinite(worst))}


def _check_strip(sigma: complex, d: int) -> None:
    if not (-1e-15 <= sigma.real <= (d + 1) / 2 + 1e-15):
        raise KernelError(f"Re sigma must lie in [0, {(d + 1) / 2}]")


# --------------------------------------------------------------------- spectral grids


def _sphere_rule(rank: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    if rank == 1:
        return np.array([[1.0], [-1.0]]), np.ones(2)
    if rank == 2:
        th = 2 * np.pi * np.arange(n) / n
        return np.stack([np.cos(th), np.sin(th)], axis=1), np.full(n, 2 * np.pi / n)
    if rank == 3:
        nz = max(4, n // 2)
        z, wz = roots_legendre(nz)
        th = 2 * np.pi * np.arange(n) / n
        zz, tt = np.meshgrid(z, th, indexing="ij")
        rr = np.sqrt(1 - zz**2)
        u = np.stack([rr * np.cos(tt), rr * np.sin(tt), zz], axis=-1).reshape(-1, 3)
        return u, (wz[:, None] * np.full(n, 2 * np.pi / n)).ravel()
    raise KernelError("spectral grids support rank 1 to 3")


def _angular_count(rs: RootSystem, r: float, xnorm: float) -> int:
    if rs.rank == 1:
        return 2
    amax = float(np.max(np.linalg.norm(rs.roots, axis=1)))
    need = 64 * r * amax + 32 + 4 * r * xnorm
    return int(32 * math.ceil(need / 32))


def _radial_cut(rho_norm: float, r: np.ndarray, regime: str) -> np.ndarray:
    if regime == "full":
        return np.ones_like(r)
    low = cutoff(rho_norm - r, rho_norm)
    if regime == "minus":
        return low
    if regime == "plus":
        return 1.0 - low
    raise KernelError(f"unknown regime {regime!r}")


def _truncation_radius(k: float, s_min: float, floor: float) -> float:
    """Radius where (1+r)^k e^{-s r} has dropped by e^-37 below its peak."""
    f = lambda r: k * math.log1p(r) - s_min * r
    peak = max(0.0, k / s_min - 1)
    target = f(peak) - _TAIL_LOG
    hi = max(peak, 1.0) * 2
    while f(hi) > target:
        hi *= 2
    lo = peak
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if f(mid) > target:
            lo = mid
        else:
            hi = mid
    return max(hi, floor)


@dataclass(eq=False)
class _Level:
    r: np.ndarray
    w: np.ndarray  # radial weights times r^(rank-1)
    G: np.ndarray  # sphere-summed spectral values
    evaluations: int


@dataclass(eq=False)
class SpectralGrid:
    rs: RootSystem
    energy_floor: float  # kappa, equal to |rho| for the wave case
    growth: float  # polynomial degree of the sphere-summed integrand
    coarse: _Level
    fine: _Level
    truncated: bool
    evaluations: int = field(default=0)

    def _energy(self, r: np.ndarray) -> np.ndarray:
        return np.sqrt(r * r + self.energy_floor**2)

    def _stop(self, lvl: _Level, s: float, power: int) -> int:
        if not self.truncated:
            return lvl.r.size
        radius = _truncation_radius(self.growth + power, s, 0.0)
        return min(lvl.r.size, int(np.searchsorted(lvl.r, radius)) + 1)

    def _sum(self, lvl: _Level, tau: complex, power: int) -> tuple[complex, float, int]:
        stop = self._stop(lvl, tau.real, power)
        e = self._energy(lvl.r[:stop])
        terms = lvl.w[:stop] * lvl.G[:stop] * np.exp(-tau * e)
        if power:
            terms = terms * (-e) ** power
        return complex(terms.sum()), float(np.abs(terms).sum()), stop

    def integrate(self, tau: complex, power: int = 0) -> QuadratureResult:
        """int |c|^-2 F (-E)^power e^{-tau E} dlambda over the stored grid."""
        tau = complex(tau)
        if tau.real <= 0:
            raise KernelError("Re tau must be positive")
        fine, mass, stop = self._sum(self.fine, tau, power)
        coarse, _, _ = self._sum(self.coarse, tau, power)
        err = abs(fine - coarse) + 64 * _EPS * mass
        if self.truncated:
            idx = stop - 1
            r_end = self.fine.r[idx]
            e_end = float(self._energy(np.array([r_end]))[0])
            edge = abs(self.fine.G[idx]) * r_end ** (self.rs.rank - 1) * e_end**power
            err += edge * math.exp(-tau.real * e_end) * (2.0 / tau.real)
        return QuadratureResult(fine, float(err), self.evaluations)


def _evaluate_level(rs, pd, x, kind, regime, tile, rho_norm, panel, r_start, R, ang_scale) -> _Level:
    n_panels = max(1, int(math.ceil((R - r_start) / panel)))
    edges = r_start + panel * np.arange(n_panels + 1)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    r = (mid[:, None] + half[:, None] * _GL_X).ravel()
    wr = (half[:, None] * _GL_W).ravel() * r ** (rs.rank - 1)
    xnorm = float(np.linalg.norm(x))
    counts = np.array([ang_scale * _angular_count(rs, e, xnorm) for e in edges[1:]])
    counts = np.repeat(counts, _PANEL_NODES) if rs.rank > 1 else np.full(r.size, 2)
    G = np.zeros(r.size, dtype=complex)
    evaluations = 0
    for n in np.unique(counts):
        idx = np.flatnonzero(counts == n)
        u, wu = _sphere_rule(rs.rank, int(n))
        chunk = max(1, 2_000_000 // u.shape[0])
        for start in range(0, idx.size, chunk):
            sel = idx[start:start + chunk]
            G[sel] = _sphere_sum(rs, pd, x, kind, tile, r[sel], u, wu)
            evaluations += sel.size * u.shape[0]
    G *= _radial_cut(rho_norm, r, regime)
    return _Level(r, wr, G, evaluations)


def _sphere_sum(rs, pd, x, kind, tile, r, u, wu) -> np.ndarray:
    lam = r[:, None, None] * u[None, :, :]
    vals = density(pd, lam).astype(complex)
    if tile is not None:
        vals = vals * chi_all(rs, lam)[..., tile[0], tile[1]]
    if np.any(x):
        if kind == "plane":
            vals = vals * np.exp(1j * (lam @ x))
        else:
            vals = vals * _rank_one_phi(rs, lam, x)
    return vals @ wu


def _rank_one_phi(rs: RootSystem, lam: np.ndarray, x: np.ndarray) -> np.ndarray:
    alpha = rs.simple_roots[0]
    mu = np.abs(lam @ alpha) / (alpha @ alpha)
    t_geo = float(alpha @ x)
    flat = mu.ravel()
    if rs.double_mult(rs.simple_indices[0]) and flat.size > _HYPERGEOMETRIC_CAP:
        raise BudgetExceeded("double-root spherical functions are limited to "
                             f"{_HYPERGEOMETRIC_CAP} hypergeometric evaluations")
    out = np.empty(flat.size, dtype=complex)
    for start in range(0, flat.size, 4096):
        out[start:start + 4096] = spherical_rank_one(rs, flat[start:start + 4096], t_geo)
    return out.reshape(mu.shape)


def _check_point(rs: RootSystem, x: np.ndarray, kind: str) -> np.ndarray:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if x.shape != (rs.rank,):
        raise KernelError(f"x must have {rs.rank} coordinates")
    if not in_closed_chamber(rs, x):
        raise KernelError("x must lie in the closed positive chamber")
    if kind == "spherical" and rs.rank > 1 and np.any(x):
        raise UnsupportedSphericalFunction("spherical kernels need rank one or x = 0")
    return x


def build_grid(
    rs: RootSystem,
    pd: PlancherelDensity,
    x,
    *,
    kind: str = "plane",
    t_max: float,
    s_min: float,
    regime: str = "full",
    tile: tuple[int, int] | None = None,
    kappa: float | None = None,
    max_power: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> SpectralGrid:
    """Sample the sphere-summed spectral integrand once for a family of tau.

    ``t_max`` bounds |Im tau| and ``s_min`` bounds Re tau from below over the
    family; ``max_power`` is the largest power of E that will be requested.
    """
    if kind not in ("plane", "spherical"):
        raise KernelError(f"unknown integrand kind {kind!r}")
    if not s_min > 0:
        raise KernelError("Re tau must be positive")
    x = _check_point(rs, x, kind)
    rho_norm = _rho_norm(rs)
    floor = rho_norm if kappa is None else float(kappa)
    d, _ = dims(rs)
    xnorm = float(np.linalg.norm(x))
    panel = min(0.25, rho_norm / 4, (math.pi / 2) / (abs(t_max) + xnorm), 2 / s_min)
    r_start = rho_norm if regime == "plus" else 0.0
    if regime == "minus":
        R, truncated = 2 * rho_norm, False
    else:
        R, truncated = _truncation_radius(d - 1 + max_power, s_min, r_start + panel), True
    cost = _estimate_cost(rs, panel, r_start, R, xnorm)
    if cost > budget:
        raise BudgetExceeded(f"grid needs about {cost:.3g} integrand evaluations, budget is {budget}")
    coarse = _evaluate_level(rs, pd, x, kind, regime, tile, rho_norm, panel, r_start, R, 1)
    fine = _evaluate_level(rs, pd, x, kind, regime, tile, rho_norm, panel / 2, r_start, R, 2)
    total = coarse.evaluations + fine.evaluations
    return SpectralGrid(rs, floor, d - 1, coarse, fine, truncated, total)


def _estimate_cost(rs, panel, r_start, R, xnorm) -> float:
    n_panels = math.ceil((R - r_start) / panel)
    if rs.rank == 1:
        return 3 * n_panels * _PANEL_NODES * 2
    edges = r_start + panel * np.arange(1, n_panels + 1)
    ang = np.array([_angular_count(rs, e, xnorm) for e in edges], dtype=float)
    if rs.rank == 3:
        ang = ang * np.maximum(4, ang // 2)
        return float(_PANEL_NODES * (ang.sum() + 2 * 4 * ang.sum()))
    return float(_PANEL_NODES * (ang.sum() + 2 * 2 * ang.sum()))


# --------------------------------------------------------------------- I(s, t, x) and p_tau


def oscillatory_I(
    rs: RootSystem,
    pd: PlancherelDensity,
    s: float,
    t: float,
    x,
    regime: str = "full",
    *,
    tile: tuple[int, int] | None = None,
    kappa: float | None = None,
    budget: int = DEFAULT_BUDGET,
) -> QuadratureResult:
    """int |c|^-2 e^{-s E} e^{i t E + i <x, lambda>} dlambda, optionally cut to
    |lambda| <~ |rho| (minus), |lambda| >~ |rho| (plus) or to one tile."""
    return oscillatory_I_series(rs, pd, s, [t], x, regime, tile=tile, kappa=kappa, budget=budget)[0]


def oscillatory_I_series(rs, pd, s, ts, x, regime="full", *, tile=None, kappa=None,
                         budget=DEFAULT_BUDGET) -> list[QuadratureResult]:
    if not s > 0:
        raise KernelError("s must be positive")
    ts = [float(t) for t in ts]
    if any(t == 0 for t in ts):
        raise KernelError("t must be nonzero")
    grid = build_grid(rs, pd, x, kind="plane", t_max=max(map(abs, ts)), s_min=s,
                      regime=regime, tile=tile, kappa=kappa, budget=budget)
    return [grid.integrate(complex(s, -t)) for t in ts]


def poisson_kernel(
    rs: RootSystem,
    pd: PlancherelDensity,
    tau: complex,
    x,
    *,
    c0: float = 1.0,
    kappa: float | None = None,
    budget: int = DEFAULT_BUDGET,
) -> QuadratureResult:
    """C0 int |c|^-2 phi_lambda(x) e^{-tau E} dlambda."""
    tau = complex(tau)
    if tau.real <= 0:
        raise KernelError("Re tau must be positive")
    grid = build_grid(rs, pd, x, kind="spherical", t_max=abs(tau.imag), s_min=tau.real,
                      kappa=kappa, budget=budget)
    res = grid.integrate(tau)
    return QuadratureResult(c0 * res.value, abs(c0) * res.abs_error_estimate, res.evaluations)


# --------------------------------------------------------------------- wave kernels


def _dyadic_panels(eps: float) -> np.ndarray:
    edges = [eps]
    while edges[-1] * 2 < 1:
        edges.append(edges[-1] * 2)
    edges.append(1.0)
    return np.array(edges)


def _gl_nodes(edges: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    return (mid[:, None] + half[:, None] * _GL_X).ravel(), (half[:, None] * _GL_W).ravel()


def _head_epsilon(t: float, xnorm: float) -> float:
    # p_{s - it}(x) is analytic in s on a disc reaching to the light cone | |t| - |x| |
    return 0.1 * min(max(abs(abs(t) - xnorm), 0.01), 1.0)


def _tilde0_with_grid(grid: SpectralGrid, sigma: complex, t: float, eps: float, scale: complex,
                      ) -> QuadratureResult:
    edges = _dyadic_panels(eps)
    fine_edges = np.sort(np.concatenate([edges, 0.5 * (edges[1:] + edges[:-1])]))
    total = {}
    inner_err = 0.0
    for name, e in (("coarse", edges), ("fine", fine_edges)):
        s, w = _gl_nodes(e)
        acc = 0j
        for si, wi in zip(s, w):
            res = grid.integrate(complex(si, -t))
            weight = wi * si ** (sigma - 1)
            acc += weight * res.value
            if name == "fine":
                inner_err += abs(weight) * res.abs_error_estimate
        total[name] = acc
    # integrate s^{sigma-1} p(s) over (0, eps) by parts, three terms
    head = 0j
    head_err = 0.0
    denom = 1.0 + 0j
    for k in range(3):
        denom *= sigma + k
        dk = grid.integrate(complex(eps, -t), power=k)
        term = (-1) ** k * dk.value * eps ** (sigma + k) / denom
        head += term
        head_err += abs(dk.abs_error_estimate * eps ** (sigma + k) / denom)
    head_err += abs(term)  # first neglected term is of the size of the last kept one
    value = scale * (head + total["fine"])
    err = abs(scale) * (abs(total["fine"] - total["coarse"]) + inner_err + head_err)
    return QuadratureResult(complex(value), float(err), grid.evaluations)


def wave_kernel_tilde0_series(rs, pd, sigma, ts, x, *, c0=1.0, kappa=None,
                              budget=DEFAULT_BUDGET) -> list[QuadratureResult]:
    """C_{sigma,d} C0 int_0^1 s^{sigma-1} p_{s-it}(x) ds for each t, on one shared grid."""
    sigma = complex(sigma)
    d, _ = dims(rs)
    _check_strip(sigma, d)
    x = _check_point(rs, x, "spherical")
    ts = [float(t) for t in ts]
    if any(t == 0 for t in ts):
        raise KernelError("t must be nonzero")
    scale = c_sigma_d(sigma, d) * c0
    if scale == 0:
        return [QuadratureResult(0j, 0.0, 0) for _ in ts]
    xnorm = float(np.linalg.norm(x))
    eps = [_head_epsilon(t, xnorm) for t in ts]
    grid = build_grid(rs, pd, x, kind="spherical", t_max=max(map(abs, ts)), s_min=min(eps),
                      kappa=kappa, max_power=2, budget=budget)
    return [_tilde0_with_grid(grid, sigma, t, e, scale) for t, e in zip(ts, eps)]


def wave_kernel_tilde0(rs: RootSystem, pd: PlancherelDensity, q: KernelQuery, *, c0: float = 1.0,
                       budget: int = DEFAULT_BUDGET) -> QuadratureResult:
    return wave_kernel_tilde0_series(rs, pd, q.sigma, [q.t], q.x, c0=c0, kappa=q.kg_kappa, budget=budget)[0]


def _s_tail_bound(sigma_re: float, start: float, rate: float) -> float:
    """int_start^inf s^(a-1) e^(-rate s) ds."""
    a = max(sigma_re, 1e-12)
    return math.exp(math.lgamma(a)) * float(gammaincc(a, rate * start)) / rate**a


def wave_kernel_infty_series(rs, pd, sigma, ts, x, *, c0=1.0, kappa=None, tol=1e-13,
                             budget=DEFAULT_BUDGET) -> list[QuadratureResult]:
    """1/Gamma(sigma) C0 int_1^S s^{sigma-1} p_{s-it}(x) ds with a certified tail."""
    sigma = complex(sigma)
    if sigma.real < 0:
        raise KernelError("Re sigma must be nonnegative")
    x = _check_point(rs, x, "spherical")
    ts = [float(t) for t in ts]
    scale = rgamma(sigma) * c0
    if scale == 0:
        return [QuadratureResult(0j, 0.0, 0) for _ in ts]
    grid = build_grid(rs, pd, x, kind="spherical", t_max=max(map(abs, ts)), s_min=1.0,
                      kappa=kappa, budget=budget)
    rate = grid.energy_floor
    out = []
    for t in ts:
        # |p_{s-it}| <= e^{-(s-1) rate} * sup over the first unit, sampled at s = 1
        p1 = abs(grid.integrate(complex(1.0, -t)).value)
        bound_scale = p1 * math.exp(rate)
        S = 2.0
        while _s_tail_bound(sigma.real, S, rate) * bound_scale > tol * max(p1, 1e-300):
            S *= 1.5
        edges = np.linspace(1.0, S, int(math.ceil(S - 1)) + 1)
        fine_edges = np.linspace(1.0, S, 2 * (len(edges) - 1) + 1)
        totals = []
        inner_err = 0.0
        for e in (edges, fine_edges):
            s, w = _gl_nodes(e)
            acc = 0j
            for si, wi in zip(s, w):
                res = grid.integrate(complex(si, -t))
                weight = wi * si ** (sigma - 1)
                acc += weight * res.value
                inner_err += abs(weight) * res.abs_error_estimate
            totals.append(acc)
        tail = _s_tail_bound(sigma.real, S, rate) * bound_scale
        err = abs(scale) * (abs(totals[1] - totals[0]) + 0.5 * inner_err + tail)
        out.append(QuadratureResult(complex(scale * totals[1]), float(err), grid.evaluations))
    return out


def wave_kernel_infty(rs: RootSystem, pd: PlancherelDensity, q: KernelQuery, *, c0: float = 1.0,
                      budget: int = DEFAULT_BUDGET) -> QuadratureResult:
    return wave_kernel_infty_series(rs, pd, q.sigma, [q.t], q.x, c0=c0, kappa=q.kg_kappa, budget=budget)[0]


# --------------------------------------------------------------------- Kunze-Stein and decay


def kunze_stein_bound(rs: RootSystem, points, values, q: float, weights=None) -> float:
    """(int delta(x) phi_0(x) |kappa(x)|^(q/2) dx)^(2/q) over chamber samples.

    In rank one ``points`` is a sorted radial grid and the trapezoid rule is
    used; in higher rank ``points`` has shape (n, rank) and ``weights`` holds
    the chamber quadrature weights.
    """
    if q < 2:
        raise KernelError("q must be at least 2")
    values = np.abs(np.asarray(values, dtype=float))
    if math.isinf(q):
        return float(values.max(initial=0.0))
    if not np.any(values):
        return 0.0
    pts = np.asarray(points, dtype=float)
    if rs.rank == 1:
        pts = pts.reshape(-1)
        alpha = rs.simple_roots[0]
        unit = alpha / np.linalg.norm(alpha)
        vecs = pts[:, None] * unit
    else:
        vecs = pts.reshape(-1, rs.rank)
        if weights is None:
            raise KernelError("higher-rank samples need quadrature weights")
    dens = np.array([cartan_density(rs, v) * phi_zero(rs, v)[0] for v in vecs])
    f = dens * values ** (q / 2)
    if rs.rank == 1:
        integral = float(np.trapezoid(f, pts))
    else:
        integral = float(np.asarray(weights, dtype=float) @ f)
    return integral ** (2 / q)


def decay_fit(series) -> DecayFit:
    """Least-squares line through (log t, log |value|)."""
    data = np.asarray([(abs(float(t)), float(v)) for t, v in series])
    if len(data) < 8:
        raise KernelError("decay fits need at least 8 points")
    if np.any(data[:, 1] <= 0) or np.any(data[:, 0] <= 0):
        raise KernelError("decay fits need positive times and magnitudes")
    lx, ly = np.log(data[:, 0]), np.log(data[:, 1])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = ly - (slope * lx + intercept)
    spread = np.sum((ly - ly.mean()) ** 2)
    r2 = 1.0 if spread == 0 else max(0.0, 1.0 - float(np.sum(resid**2) / spread))
    return DecayFit(float(slope), float(intercept), float(r2), (float(data[:, 0].min()), float(data[:, 0].max())))


def log_times(t0: float, t1: float, n: int) -> np.ndarray:
    return np.geomspace(t0, t1, n)
