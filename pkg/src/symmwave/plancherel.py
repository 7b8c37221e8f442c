"""Harish-Chandra c-function factors, the Plancherel density and spherical functions.

The per-root factor is evaluated at the coroot coordinate
``v = <alpha, lambda> / <alpha, alpha>``, which makes the density independent
of how the roots are scaled and reproduces the classical rank-one densities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import mpmath
import numpy as np
from scipy.special import roots_jacobi

from .rootsys import (
    RootSystem,
    RootSystemError,
    half_sum_rho,
    in_closed_chamber,
    weyl_group,
)

# Lanczos coefficients for g = 607/128 (15 terms)
_LANCZOS_G = 607.0 / 128.0
_LANCZOS = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)
_LOG_PI = math.log(math.pi)


class GammaPoleError(ValueError):
    pass


class UnsupportedSphericalFunction(NotImplementedError):
    pass


def _lanczos(z: np.ndarray) -> np.ndarray:
    zm = z - 1.0
    series = np.full(zm.shape, _LANCZOS[0], dtype=complex)
    for k in range(1, _LANCZOS.size):
        series = series + _LANCZOS[k] / (zm + k)
    t = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(t) - t + np.log(series)


def _log_sinpi(z: np.ndarray) -> np.ndarray:
    """Principal log of sin(pi z), stable for large |Im z|."""
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(z.imag) < 15.0
    out[small] = np.log(np.sin(np.pi * z[small]))
    big = ~small
    if np.any(big):
        flip = z.imag < 0
        w = np.where(flip, np.conj(z), z)[big]
        val = -1j * np.pi * w + np.log(0.5j) + np.log1p(-np.exp(2j * np.pi * w))
        val = val.real + 1j * (np.mod(val.imag + np.pi, 2.0 * np.pi) - np.pi)
        out[big] = np.where(flip[big], np.conj(val), val)
    return out


def log_gamma(z):
    """Principal branch of log Gamma for complex arguments (vectorized)."""
    arr = np.asarray(z, dtype=complex)
    scalar = arr.ndim == 0
    arr = np.atleast_1d(arr)
    pole = (arr.imag == 0) & (arr.real <= 0) & (arr.real == np.floor(arr.real))
    if np.any(pole):
        raise GammaPoleError(f"Gamma has a pole at {arr[pole][0]}")
    out = np.empty(arr.shape, dtype=complex)
    right = arr.real >= 0.5
    out[right] = _lanczos(arr[right])
    left = ~right
    if np.any(left):
        zl = arr[left]
        shift = np.copysign(2.0 * np.pi, zl.imag) * np.floor(0.5 * zl.real + 0.25)
        out[left] = _LOG_PI + 1j * shift - _log_sinpi(zl) - _lanczos(1.0 - zl)
    return complex(out[0]) if scalar else out


def rgamma(z):
    """1/Gamma(z), entire; exactly 0 at the poles."""
    arr = np.atleast_1d(np.asarray(z, dtype=complex))
    pole = (arr.imag == 0) & (arr.real <= 0) & (arr.real == np.floor(arr.real))
    out = np.zeros(arr.shape, dtype=complex)
    if np.any(~pole):
        out[~pole] = np.exp(-log_gamma(arr[~pole]))
    return complex(out[0]) if np.ndim(z) == 0 else out


@dataclass(frozen=True)
class RootFactor:
    """Precomputed data for one reduced positive root."""

    index: int
    vector: np.ndarray
    norm_sq: float
    a: float  # <alpha, rho> / <alpha, alpha>
    m: float
    m2: float
    const: float  # real part of log of the v-independent quotients


@dataclass(frozen=True, eq=False)
class PlancherelDensity:
    rs: RootSystem
    rho: np.ndarray
    factors: tuple[RootFactor, ...]


@lru_cache(maxsize=128)
def plancherel_density(rs: RootSystem) -> PlancherelDensity:
    rho = half_sum_rho(rs)
    factors = []
    for i, root in enumerate(rs.positive_roots):
        if not root.is_reduced:
            continue
        alpha = root.vector
        nsq = float(alpha @ alpha)
        a = float(alpha @ rho) / nsq
        m, m2 = float(root.mult), float(rs.double_mult(i))
        lg = log_gamma(np.array([a + m / 2, a, a / 2 + m / 4 + m2 / 2, a / 2 + m / 4]))
        const = float((lg[0] - lg[1] + lg[2] - lg[3]).real)
        factors.append(RootFactor(i, alpha, nsq, a, m, m2, const))
    return PlancherelDensity(rs, rho, tuple(factors))


def _log_c_alpha_abs(f: RootFactor, v: np.ndarray) -> np.ndarray:
    iv = 1j * v
    lg = (log_gamma(iv) - log_gamma(iv + f.m / 2)
          + log_gamma(iv / 2 + f.m / 4) - log_gamma(iv / 2 + f.m / 4 + f.m2 / 2))
    return f.const + lg.real


def factor_inv_sq(f: RootFactor, v) -> np.ndarray:
    """|c_alpha(v)|^-2 for one root factor, vectorized over v."""
    v = np.abs(np.asarray(v, dtype=float))
    out = np.zeros(v.shape)
    nz = v > 0
    if np.any(nz):
        out[nz] = np.exp(-2.0 * _log_c_alpha_abs(f, v[nz]))
    return out


def c_alpha_inv_sq(pd: PlancherelDensity, root_index: int, v) -> np.ndarray:
    """|c_alpha(v)|^-2 for the reduced positive root with the given index."""
    for f in pd.factors:
        if f.index == root_index:
            res = factor_inv_sq(f, v)
            return float(res) if np.ndim(v) == 0 else res
    raise RootSystemError(f"root {root_index} is not a reduced positive root")


def per_root_factors(pd: PlancherelDensity, lam) -> np.ndarray:
    """Array (..., n_reduced) of per-root factors at spectral points ``lam``."""
    lam = _as_points(pd.rs, lam)
    cols = [factor_inv_sq(f, (lam @ f.vector) / f.norm_sq) for f in pd.factors]
    return np.stack(cols, axis=-1)


def _as_points(rs: RootSystem, lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if rs.rank == 1 and (lam.ndim == 0 or lam.shape[-1] != 1):
        lam = lam[..., None]
    if lam.shape[-1] != rs.rank:
        raise RootSystemError(f"spectral points need trailing dimension {rs.rank}")
    return lam


def density(pd: PlancherelDensity, lam) -> np.ndarray:
    """Plancherel density |c(lambda)|^-2; ``lam`` has trailing dimension rank."""
    lam = _as_points(pd.rs, lam)
    out = np.prod(per_root_factors(pd, lam), axis=-1)
    return float(out) if out.ndim == 0 else out


def density_envelope(pd: PlancherelDensity, lam) -> np.ndarray:
    """Two-regime symbol envelope prod <alpha,lam>^2 (1+|<alpha,lam>|)^(m+m2-2)."""
    lam = _as_points(pd.rs, lam)
    out = 1.0
    for f in pd.factors:
        x = lam @ f.vector
        out = out * x**2 * (1.0 + np.abs(x)) ** (f.m + f.m2 - 2)
    return out


# --------------------------------------------------------------------- spherical functions


def _rank_one_data(rs: RootSystem) -> tuple[np.ndarray, float, float]:
    if rs.rank != 1:
        raise UnsupportedSphericalFunction("rank-one formula used on a higher-rank system")
    i = rs.simple_indices[0]
    return rs.positive_roots[i].vector, float(rs.positive_roots[i].mult), float(rs.double_mult(i))


def _abel_constant(m: float) -> float:
    return 2.0 ** (m / 2) * math.gamma((m + 1) / 2) / (math.sqrt(math.pi) * math.gamma(m / 2))


def spherical_rank_one(rs: RootSystem, mu, t: float) -> np.ndarray:
    """phi at geodesic coordinate t = <alpha, x> for coroot spectral values ``mu``.

    Without a double root the one-dimensional Abel-type integral
    c (sinh t)^(1-m) int_0^t cos(mu s) (cosh t - cosh s)^((m-2)/2) ds
    is evaluated by Gauss-Jacobi quadrature; with a double root the Jacobi
    function is evaluated as a hypergeometric series.
    """
    _, m, m2 = _rank_one_data(rs)
    mu = np.asarray(mu, dtype=complex)
    t = float(t)
    if t < 0:
        raise RootSystemError("x lies outside the closed positive chamber")
    if t == 0.0:
        return np.ones(mu.shape, dtype=complex)
    if m2 > 0:
        rho = m / 2 + m2
        z = -mpmath.sinh(t) ** 2
        flat = [complex(mpmath.hyp2f1((rho + 1j * u) / 2, (rho - 1j * u) / 2, (m + m2 + 1) / 2, z))
                for u in mu.ravel()]
        return np.array(flat, dtype=complex).reshape(mu.shape)
    gam = (m - 2) / 2
    reach = float(np.max(np.abs(mu.real), initial=0.0)) * t
    grow = float(np.max(np.abs(mu.imag), initial=0.0)) * t
    n = int(min(4000, 40 + 0.8 * reach + 2.0 * grow + 2.0 * t * abs(gam)))
    x, w = roots_jacobi(n, gam, 0.0)
    s = 0.5 * t * (1.0 + x)
    gap = np.maximum(t - s, 1e-300)
    smooth = (2.0 * np.sinh(0.5 * (t + s)) * np.sinh(0.5 * gap) / gap) ** gam
    weights = w * smooth * (0.5 * t) ** (gam + 1)
    vals = np.cos(np.multiply.outer(mu, s)) @ weights
    return _abel_constant(m) * np.sinh(t) ** (1 - m) * vals


def _complex_preset(rs: RootSystem) -> bool:
    return all(r.mult == 2 and r.is_reduced for r in rs.positive_roots)


def _mp_positive_roots(rs: RootSystem) -> list[list]:
    """Catalog positive roots rebuilt at the current mpmath precision."""
    s3 = mpmath.sqrt(3)
    half = mpmath.mpf(1) / 2
    cat = rs.catalog
    if cat == "A2":
        a1, a2 = [mpmath.mpf(1), mpmath.mpf(0)], [-half, s3 / 2]
        return [a1, a2, [a1[0] + a2[0], a1[1] + a2[1]]]
    if cat == "B2":
        return [[mpmath.mpf(v) for v in r.vector] for r in rs.positive_roots]
    if cat == "G2":
        a1, a2 = [mpmath.mpf(1), mpmath.mpf(0)], [-3 * half, s3 / 2]
        coeffs = [(1, 0), (0, 1), (1, 1), (2, 1), (3, 1), (3, 2)]
        return [[p * a1[i] + q * a2[i] for i in range(2)] for p, q in coeffs]
    if cat == "A3":
        rows = [[1, -1, 0, 0], [1, 1, -2, 0], [1, 1, 1, -3]]
        basis = [[mpmath.mpf(v) / mpmath.sqrt(sum(u * u for u in row)) for v in row] for row in rows]
        pairs = [(0, 1), (1, 2), (2, 3), (0, 2), (1, 3), (0, 3)]
        out = []
        for i, j in pairs:
            out.append([(b[i] - b[j]) / mpmath.sqrt(2) for b in basis])
        return out
    return [[mpmath.mpf(v) for v in r.vector] for r in rs.positive_roots]


def _mp_orbit(roots: list[list], simple: tuple[int, ...], lam: list) -> list[tuple[int, list]]:
    """Signed Weyl orbit of lam, generated by exact-precision simple reflections."""
    dot = lambda a, b: mpmath.fsum(ai * bi for ai, bi in zip(a, b))
    gens = [roots[i] for i in simple]
    scale = float(mpmath.sqrt(dot(lam, lam))) or 1.0
    key = lambda v: tuple(round(float(c) / scale, 9) + 0.0 for c in v)
    orbit = {key(lam): (1, lam)}
    frontier = [(1, lam)]
    while frontier:
        nxt = []
        for sign, v in frontier:
            for a in gens:
                c = 2 * dot(a, v) / dot(a, a)
                u = [vi - c * ai for vi, ai in zip(v, a)]
                k = key(u)
                if k not in orbit:
                    orbit[k] = (-sign, u)
                    nxt.append((-sign, u))
        frontier = nxt
    return list(orbit.values())


def _complex_closed_form(rs: RootSystem, lam: np.ndarray, x: np.ndarray) -> complex:
    """Closed form for complex groups, evaluated in extended precision.

    The Weyl alternating sum cancels to order prod <alpha,lam><alpha,x>, so the
    working precision grows with the number of digits lost.  ``lam`` must be
    regular so that its orbit has |W| distinct points.
    """
    froots = rs.roots
    lost = -np.sum(np.log10(np.abs(froots @ lam) * np.abs(froots @ x) + 1e-300))
    with mpmath.workdps(int(25 + max(0.0, lost))):
        roots = _mp_positive_roots(rs)
        dot = lambda a, b: mpmath.fsum(ai * bi for ai, bi in zip(a, b))
        mlam = [mpmath.mpf(float(c)) for c in lam]
        mx = [mpmath.mpf(float(c)) for c in x]
        num = mpmath.fsum(sign * mpmath.expj(dot(v, mx)) for sign, v in _mp_orbit(roots, rs.simple_indices, mlam))
        rho = [mpmath.fsum(r[i] for r in roots) for i in range(rs.rank)]
        ratio = mpmath.mpf(1)
        for a in roots:
            ratio *= dot(a, rho) / (1j * dot(a, mlam) * 2 * mpmath.sinh(dot(a, mx)))
        return complex(ratio * num)


def _wall_shift(rs: RootSystem, v: np.ndarray) -> np.ndarray | None:
    """Small shift off the root hyperplanes, or None when v is already generic."""
    scale = max(1.0, float(np.linalg.norm(v)))
    if np.min(np.abs(rs.roots @ v)) > 1e-12 * scale:
        return None
    rho = half_sum_rho(rs)
    return 1e-12 * scale * rho / np.linalg.norm(rho)


def spherical_function(rs: RootSystem, lam, x) -> complex:
    """Elementary spherical function phi_lambda(x) for x in the closed chamber.

    Supported: x = 0 (any rank), rank one, and the complex preset in any rank.
    """
    x = np.atleast_1d(np.asarray(x, dtype=float))
    lam = np.atleast_1d(np.asarray(lam, dtype=complex))
    if x.shape != (rs.rank,) or lam.shape != (rs.rank,):
        raise RootSystemError("lambda and x must be vectors of length rank")
    if not in_closed_chamber(rs, x):
        raise RootSystemError("x lies outside the closed positive chamber")
    if not np.any(x):
        return 1.0 + 0.0j
    if rs.rank == 1:
        alpha, _, _ = _rank_one_data(rs)
        nsq = float(alpha @ alpha)
        mu = complex(lam @ alpha) / nsq
        return complex(spherical_rank_one(rs, np.array([mu]), float(alpha @ x))[0])
    if _complex_preset(rs):
        if np.any(lam.imag):
            raise UnsupportedSphericalFunction("complex preset closed form takes real lambda")
        # the closed form is analytic in both arguments; on a wall use the
        # symmetric average of two shifted evaluations (second-order accurate)
        lams = [lam.real]
        dl = _wall_shift(rs, lam.real)
        if dl is not None:
            lams = [lam.real + dl, lam.real - dl]
        xs = [x]
        dx = _wall_shift(rs, x)
        if dx is not None:
            xs = [x + dx, x - dx]
        vals = [_complex_closed_form(rs, a, b) for a in lams for b in xs]
        return complex(sum(vals) / len(vals))
    raise UnsupportedSphericalFunction("spherical function needs rank one, x = 0 or the complex preset")


def phi_zero(rs: RootSystem, x) -> tuple[float, bool]:
    """Ground spherical function phi_0(x) and a flag marking envelope estimates."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not in_closed_chamber(rs, x):
        raise RootSystemError("x lies outside the closed positive chamber")
    if not np.any(x):
        return 1.0, False
    if rs.rank == 1:
        alpha, _, _ = _rank_one_data(rs)
        return float(spherical_rank_one(rs, np.array([0.0]), float(alpha @ x))[0].real), False
    if _complex_preset(rs):
        u = np.maximum(rs.roots @ x, 0.0)
        ratio = np.where(u > 0, u / np.sinh(np.where(u > 0, u, 1.0)), 1.0)
        return float(np.prod(ratio)), False
    return phi_zero_envelope(rs, x), True


def phi_zero_envelope(rs: RootSystem, x) -> float:
    x = np.atleast_1d(np.asarray(x, dtype=float))
    reduced = rs.roots[rs.reduced_mask]
    return float(np.prod(1.0 + reduced @ x) * np.exp(-half_sum_rho(rs) @ x))


def phi_zero_envelope_check(rs: RootSystem, radii) -> tuple[float, float]:
    """Min and max of phi_0 / envelope along the chamber ray through rho (rank one)."""
    if rs.rank != 1:
        raise UnsupportedSphericalFunction("envelope check is only meaningful in rank one")
    alpha, _, _ = _rank_one_data(rs)
    unit = alpha / np.linalg.norm(alpha)
    ratios = [phi_zero(rs, r * unit)[0] / phi_zero_envelope(rs, r * unit) for r in radii]
    return float(min(ratios)), float(max(ratios))
