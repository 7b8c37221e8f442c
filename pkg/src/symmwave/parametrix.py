"""Hadamard parametrix on the flat part: Jacobian, the potential omega,
transport coefficients U_k and the Poisson-side integral identities.

Radial functions in rank one are tabulated on the offset grid
``r_i = (i + 1/2) h``, so no grid point sits on the wall r = 0 and an even
ghost point closes the stencil there.  In higher rank the tables live on a
single ray through the open chamber.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate
from scipy.interpolate import CubicSpline
from scipy.special import bernoulli, roots_legendre

from .plancherel import log_gamma, rgamma
from .rootsys import RootSystem, dims, half_sum_rho

_SERIES_CUT = 0.5
_GL_NODES = 64


class ParametrixError(ValueError):
    pass


# --------------------------------------------------------------------- elementary pieces


def _as_flat(rs: RootSystem, h) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if rs.rank == 1 and (h.ndim == 0 or h.shape[-1] != 1):
        h = h[..., None]
    if h.shape[-1] != rs.rank:
        raise ParametrixError(f"points need trailing dimension {rs.rank}")
    return h


def _series_coefficients(terms: int = 16) -> tuple[np.ndarray, np.ndarray]:
    # 1/x - coth x = -sum_n 4^n B_2n x^(2n-1) / (2n)!, and minus its derivative
    b = bernoulli(2 * terms)
    n = np.arange(1, terms + 1)
    base = -(4.0**n) * b[2 * n] / np.array([math.factorial(2 * k) for k in n], dtype=float)
    return base, -(2 * n - 1) * base


_F_COEF, _G_COEF = _series_coefficients()


def _inv_minus_coth(x: np.ndarray) -> np.ndarray:
    """1/x - coth x, with its Taylor series near 0."""
    small = np.abs(x) < _SERIES_CUT
    safe = np.where(small, 1.0, x)
    series = x * np.polynomial.polynomial.polyval(x * x, _F_COEF)
    return np.where(small, series, 1.0 / safe - 1.0 / np.tanh(safe))


def _inv_sq_gap(x: np.ndarray) -> np.ndarray:
    """1/x^2 - 1/sinh^2 x, with its Taylor series near 0."""
    small = np.abs(x) < _SERIES_CUT
    safe = np.where(small, 1.0, x)
    series = np.polynomial.polynomial.polyval(x * x, _G_COEF)
    with np.errstate(over="ignore"):
        tail = 1.0 / safe**2 - 1.0 / np.sinh(safe) ** 2
    return np.where(small, series, tail)


def _log_sinhc(x: np.ndarray) -> np.ndarray:
    """log(sinh x / x) for x >= 0."""
    x = np.abs(x)
    small = x < 1e-2
    big = x > 20
    mid = np.where(small | big, 1.0, x)
    x2 = x * x
    out = np.log(np.sinh(mid) / mid)
    out = np.where(small, x2 / 6 - x2 * x2 / 180, out)
    safe_big = np.where(big, x, 1.0)
    return np.where(big, safe_big - math.log(2.0) - np.log(safe_big) + np.log1p(-np.exp(-2 * safe_big)), out)


def log_jacobian(rs: RootSystem, h) -> np.ndarray:
    x = _as_flat(rs, h) @ rs.roots.T
    return _log_sinhc(x) @ rs.mults


def jacobian_J(rs: RootSystem, h):
    """Product over positive roots of (sinh<alpha,H>/<alpha,H>)^m_alpha."""
    out = np.exp(log_jacobian(rs, h))
    return float(out) if np.ndim(out) == 0 else out


def J_inv_sqrt(rs: RootSystem, h):
    out = np.exp(-0.5 * log_jacobian(rs, h))
    return float(out) if np.ndim(out) == 0 else out


def _check_open(rs: RootSystem, h: np.ndarray) -> np.ndarray:
    x = h @ rs.roots.T
    if np.any(x <= 0):
        raise ParametrixError("H must lie in the open positive chamber")
    return x


def omega_fn(rs: RootSystem, h):
    """Potential J^(1/2) (Delta_rad J^(-1/2)) at chamber points.

    With L = -log(J)/2 this is Lap L + |grad L|^2 + sum m_a coth<a,H> <a, grad L>,
    each piece written with the analytic derivatives of log(x/sinh x).
    """
    h = _as_flat(rs, h)
    x = _check_open(rs, h)
    roots, m = rs.roots, rs.mults
    norms = np.sum(roots * roots, axis=1)
    grad = (0.5 * m * _inv_minus_coth(x)) @ roots
    lap = -(0.5 * m * norms * _inv_sq_gap(x)).sum(axis=-1)
    drift = np.sum(m / np.tanh(x) * (grad @ roots.T), axis=-1)
    out = lap + np.sum(grad * grad, axis=-1) + drift
    return float(out) if np.ndim(out) == 0 else out


def omega_closed_form(rs: RootSystem, h):
    """Closed form of omega after the cancellation identities, with the bracket
    1/x^2 - 1/sinh^2 x and a single |alpha|^2 in the double-root sum."""
    h = _as_flat(rs, h)
    x = h @ rs.roots.T
    g = _inv_sq_gap(x)
    out = -float(half_sum_rho(rs) @ half_sum_rho(rs)) * np.ones(h.shape[:-1])
    for i, root in enumerate(rs.positive_roots):
        nsq = float(root.vector @ root.vector)
        m = float(root.mult)
        out = out + 0.5 * m * (0.5 * m - 1) * nsq * g[..., i]
        m2 = rs.double_mult(i)
        if m2:
            out = out + 0.5 * m * m2 * nsq * g[..., i]
    return float(out) if np.ndim(out) == 0 else out


def omega_at_origin(rs: RootSystem) -> float:
    return float(omega_closed_form(rs, np.zeros(rs.rank)))


def cancellation_check(rs: RootSystem, h) -> tuple[float, float]:
    """Both cancellation sums over pairs of non-proportional positive roots."""
    h = _as_flat(rs, np.asarray(h, dtype=float))
    x = _check_open(rs, h)
    roots, m = rs.roots, rs.mults
    gram = roots @ roots.T
    cross = np.abs(np.abs(gram) - np.sqrt(np.outer(np.diag(gram), np.diag(gram)))) > 1e-9
    weight = np.outer(m, m) * gram * cross
    inv = 1.0 / x
    ct = 1.0 / np.tanh(x)
    r1 = float(inv @ weight @ inv)
    r2 = float(ct @ weight @ ct - weight.sum())
    return r1, r2


def euclidean_u0(d: int) -> float:
    """Leading Hadamard coefficient fixed by the Euclidean delta limit."""
    return math.pi ** (-(d - 1) / 2)


def calibrate_u0(d: int, tau: float = 0.7) -> float:
    """U_0 from matching the k = 0 Poisson term to a brute-force Fourier
    evaluation of the Euclidean Poisson kernel at the origin."""
    sphere = 2 * math.pi ** (d / 2) / math.gamma(d / 2)
    radial, _ = integrate.quad(lambda r: r ** (d - 1) * math.exp(-tau * r), 0, np.inf, epsabs=0, epsrel=1e-13)
    kernel0 = sphere * radial / (2 * math.pi) ** d
    k0_shape = tau / math.pi * math.gamma((d + 1) / 2) * tau ** (-(d + 1))
    return kernel0 / k0_shape


# --------------------------------------------------------------------- transport tables


@dataclass(frozen=True)
class RadialGrid:
    points: np.ndarray  # radial coordinates r_i = (i + 1/2) h
    h: float
    direction: np.ndarray  # unit vector of the ray

    def vectors(self) -> np.ndarray:
        return np.outer(self.points, self.direction)


def radial_grid(rs: RootSystem, h: float, radius: float, direction=None) -> RadialGrid:
    if not (h > 0 and radius > h):
        raise ParametrixError("grid needs 0 < h < radius")
    if direction is None:
        direction = half_sum_rho(rs)
    e = np.asarray(direction, dtype=float).reshape(rs.rank)
    e = e / np.linalg.norm(e)
    if np.any(rs.roots @ e <= 0):
        raise ParametrixError("ray direction must point into the open chamber")
    n = int(math.floor(radius / h))
    return RadialGrid((np.arange(n) + 0.5) * h, float(h), e)


@dataclass(frozen=True, eq=False)
class ParametrixTable:
    rs: RootSystem
    grid: RadialGrid
    u: np.ndarray  # shape (K + 1, n)
    omega: np.ndarray
    K: int
    sources: np.ndarray  # (Delta^p + omega) U_k on the grid, k = 0..K

    def value(self, k: int, r) -> np.ndarray:
        r = np.abs(np.asarray(r, dtype=float))
        if np.any(r > self.grid.points[-1]):
            raise ParametrixError("radius lies beyond the tabulated grid")
        return _even_spline(self.grid.points, self.u[k])(r)


def _even_spline(r: np.ndarray, f: np.ndarray) -> CubicSpline:
    return CubicSpline(np.concatenate([-r[::-1], r]), np.concatenate([f[::-1], f]))


def _radial_derivatives(f: np.ndarray, h: float) -> tuple[np.ndarray, np.ndarray]:
    """Second-order first and second derivatives with an even ghost at r = 0."""
    ext = np.concatenate([[f[0]], f])
    d1 = np.gradient(ext, h, edge_order=2)[1:]
    d1[0] = (f[1] - f[0]) / (2 * h)
    d2 = np.empty_like(f)
    d2[1:-1] = (f[2:] - 2 * f[1:-1] + f[:-2]) / h**2
    d2[0] = (f[1] - f[0]) / h**2
    d2[-1] = (2 * f[-1] - 5 * f[-2] + 4 * f[-3] - f[-4]) / h**2
    return d1, d2


def radial_laplacian_p(rs: RootSystem, f: np.ndarray, grid: RadialGrid) -> np.ndarray:
    """Flat Laplacian plus sum m_a <a,H>^-1 d_a acting on a rank-one radial profile."""
    if rs.rank != 1:
        raise ParametrixError("tabulated Laplacian is only available in rank one")
    d, _ = dims(rs)
    d1, d2 = _radial_derivatives(f, grid.h)
    return d2 + (d - 1) / grid.points * d1


def uk_recursion(rs: RootSystem, grid: RadialGrid, K: int) -> ParametrixTable:
    d, _ = dims(rs)
    if K < 0 or K > d // 2:
        raise ParametrixError(f"K must lie in 0..{d // 2}")
    if rs.rank > 1 and K > 1:
        raise ParametrixError("higher-rank tables stop at K = 1 (ray data cannot feed the Laplacian)")
    nodes, weights = roots_legendre(_GL_NODES)
    s = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    r = grid.points
    omega = np.asarray(omega_fn(rs, grid.vectors()))
    u0 = euclidean_u0(d)
    rows = [np.full(r.shape, u0)]
    sources = [omega * u0]
    for k in range(K):
        if k == 0:
            scaled = np.multiply.outer(r, s)[..., None] * grid.direction
            src = u0 * np.asarray(omega_fn(rs, scaled))
        else:
            src = _even_spline(r, sources[k])(np.multiply.outer(r, s))
        nxt = (src * s**k) @ w
        rows.append(nxt)
        if k + 1 <= K and rs.rank == 1:
            sources.append(radial_laplacian_p(rs, nxt, grid) + omega * nxt)
        else:
            sources.append(np.full(r.shape, np.nan))
    return ParametrixTable(rs, grid, np.array(rows), omega, K, np.array(sources))


def transport_residual(table: ParametrixTable, k: int = 0, margin: int = 3) -> float:
    """max |[(k+1) + r d/dr] U_{k+1} - (Delta^p + omega) U_k| / max |rhs| on interior points."""
    if not 0 <= k < table.K:
        raise ParametrixError("residual needs 0 <= k < K")
    r = table.grid.points
    d1, _ = _radial_derivatives(table.u[k + 1], table.grid.h)
    lhs = (k + 1) * table.u[k + 1] + r * d1
    rhs = table.sources[k]
    inner = slice(margin, len(r) - margin)
    return float(np.max(np.abs(lhs - rhs)[inner]) / np.max(np.abs(rhs[inner])))


# --------------------------------------------------------------------- Riesz and Poisson side


def riesz_R(z, r):
    """Riesz distribution R_+^z(r) = r^(z-1)/Gamma(z) for r > 0, zero otherwise."""
    z = complex(z)
    if z.real <= 0:
        raise ParametrixError("Riesz distributions are only evaluated for Re z > 0")
    r = np.asarray(r, dtype=float)
    pos = r > 0
    safe = np.where(pos, r, 1.0)
    out = np.where(pos, rgamma(z) * safe ** (z - 1), 0.0)
    if z.imag == 0:
        out = out.real
    return out if out.ndim else out.item()


def a_tau_leading(rs: RootSystem, table: ParametrixTable, tau: complex, h) -> complex:
    """Finite Hadamard sum of the truncated Poisson kernel at H."""
    tau = complex(tau)
    if tau.real <= 0:
        raise ParametrixError("Re tau must be positive")
    h = np.asarray(h, dtype=float).reshape(rs.rank)
    radius = float(np.linalg.norm(h))
    if rs.rank > 1 and radius > 0 and abs(h @ table.grid.direction - radius) > 1e-9 * radius:
        raise ParametrixError("H is off the tabulated ray")
    d, _ = dims(rs)
    w2 = radius**2 + tau**2
    total = 0j
    for k in range(min(table.K, d // 2) + 1):
        uk = float(table.value(k, radius))
        power = np.exp((k - (d + 1) / 2) * np.log(w2))
        total += 4.0**-k * uk * math.gamma((d + 1) / 2 - k) * power
    return complex(tau / math.pi * J_inv_sqrt(rs, h) * total)


def _complex_quad(f, a, b, points=None) -> complex:
    kw = dict(limit=400, epsrel=1e-12)
    if points is not None and np.isfinite(b):
        kw["points"] = points
    # an absolute floor tied to the modulus keeps a near-zero component from chasing roundoff
    size, _ = integrate.quad(lambda p: abs(f(p)), a, b, limit=400, epsrel=1e-6)
    kw["epsabs"] = 1e-15 * size
    re, _ = integrate.quad(lambda p: f(p).real, a, b, **kw)
    im, _ = integrate.quad(lambda p: f(p).imag, a, b, **kw)
    return complex(re, im)


def riesz_poisson_check(z: complex, u: float, eps: float) -> tuple[complex, complex]:
    """Left side (quadrature) and right side (closed form) of the Riesz-Poisson identity."""
    z = complex(z)
    if z.real <= 0:
        raise ParametrixError("Re z must be positive")
    shift = u * u + z * z
    if eps == 1:
        # R_+^0 is the Dirac mass at w^2 = u^2
        return z / (math.pi * shift), z / (math.pi * shift)
    if eps != 0.5:
        raise ParametrixError("eps must be 1 or 1/2")
    scale = abs(np.sqrt(shift))
    # w^2 = u^2 + p^2 removes the inverse square root at the edge of the support
    integrand = lambda p: 2.0 * z / (math.pi**1.5 * (p * p + shift))
    lhs = _complex_quad(integrand, 0.0, scale, points=[0.5 * scale]) + _complex_quad(integrand, scale, np.inf)
    return lhs, z / (math.sqrt(math.pi) * np.sqrt(shift))


def power_integral_envelope(z: complex, n: int, gamma: float, T: float) -> float:
    z = complex(z)
    ratio = abs(z) / z.real
    if gamma > 1 and n < 2 * gamma:
        return ratio ** (gamma - 1)
    if gamma == 1 and n > 2:
        return (T / abs(z)) ** (n - 2) + math.log(ratio)
    if gamma == 1 and n == 2:
        return 1 + math.log(T / z.real)
    if gamma == 1 and n < 2:
        return 1 + math.log(ratio)
    raise ParametrixError("(n, gamma) matches none of the four cases")


def power_integral_check(z: complex, n: int, gamma: float, T: float) -> tuple[float, float]:
    """Scaled integral |z|^(2g-n) int_0^3T r^(n-1)|r^2+z^2|^-g dr and its envelope."""
    z = complex(z)
    if z.real <= 0 or abs(z) > T:
        raise ParametrixError("need Re z > 0 and |z| <= T")
    envelope = power_integral_envelope(z, n, gamma, T)
    f = lambda r: r ** (n - 1) * abs(r * r + z * z) ** (-gamma)
    near = abs(z)
    value, _ = integrate.quad(f, 0.0, 3 * T, points=[near], limit=400, epsabs=0.0, epsrel=1e-10)
    return abs(z) ** (2 * gamma - n) * value, envelope


def poisson_c0_rank_one(rs: RootSystem) -> float:
    """Inverse-transform constant for which the Poisson kernel carries the
    Euclidean small-distance singularity, from the large-lambda density slope."""
    from .plancherel import density, plancherel_density

    if rs.rank != 1:
        raise ParametrixError("C0 calibration is implemented in rank one")
    d, _ = dims(rs)
    alpha = rs.simple_roots[0]
    big = 1e6 * alpha / np.linalg.norm(alpha)
    kappa = density(plancherel_density(rs), big) / np.linalg.norm(big) ** (d - 1)
    sphere = 2.0  # the unit sphere of a line has two points
    return math.exp(log_gamma((d + 1) / 2).real) * math.pi ** (-(d + 1) / 2) / (kappa * sphere * math.gamma(d))
