"""Barycentric tiling of the unit sphere, the smooth partition of unity it
carries, and the geometric constants that control its supports.

Tiles are indexed by ``(w, j)`` with ``w`` an index into the Weyl group
element list (identity first) and ``j`` a zero-based simple-root index.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize, minimize_scalar

from .rootsys import RootSystem, half_sum_rho, weyl_group

_TOL = 1e-12


class ChamberError(ValueError):
    pass


class ConstantExtractionError(RuntimeError):
    pass


@dataclass(frozen=True, eq=False)
class DualBasis:
    lambdas: np.ndarray  # rows are Lambda_1 ... Lambda_l


@dataclass(frozen=True)
class PartitionConstants:
    c1: float
    c2: float
    c3: float
    c4: float
    c5: float
    L1: int
    L2: float
    M1: float
    M2: float
    C_Sigma: float
    c3_min: float  # sphere minimum before the safety margin

    def as_dict(self) -> dict[str, float]:
        return {k: float(v) for k, v in self.__dict__.items()}


@lru_cache(maxsize=128)
def dual_basis(rs: RootSystem) -> DualBasis:
    simple = rs.simple_roots
    gram = simple @ simple.T
    if abs(np.linalg.det(gram)) < 1e-12:
        raise ChamberError("simple roots have a singular Gram matrix")
    lambdas = np.linalg.solve(simple, np.eye(rs.rank)).T
    if np.max(np.abs(simple @ lambdas.T - np.eye(rs.rank))) > 1e-12:
        raise ChamberError("dual basis residual too large")
    return DualBasis(lambdas)


def _l1_on_sphere(simple: np.ndarray, u: np.ndarray) -> np.ndarray:
    return np.sum(np.abs(u @ simple.T), axis=-1)


def _sphere_point(angles: np.ndarray) -> np.ndarray:
    if angles.size == 1:
        return np.array([np.cos(angles[0]), np.sin(angles[0])])
    th, ph = angles
    return np.array([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)])


def sphere_minimum(simple: np.ndarray) -> tuple[float, np.ndarray]:
    """Minimum of sum_k |<alpha_k, u>| over unit vectors u, with its argmin.

    Angular grid at resolution 2^-10 (2^-7 on the 2-sphere) followed by local
    refinement from the best grid points.
    """
    rank = simple.shape[1]
    if rank == 1:
        return float(np.abs(simple[0, 0])), np.array([1.0])
    f = lambda a: float(_l1_on_sphere(simple, _sphere_point(np.atleast_1d(a))))
    if rank == 2:
        step = 2.0**-10
        th = np.arange(0.0, 2 * np.pi, step)
        vals = _l1_on_sphere(simple, np.stack([np.cos(th), np.sin(th)], axis=1))
        best = np.argsort(vals)[:8]
        cands = []
        for i in best:
            res = minimize_scalar(f, bounds=(th[i] - step, th[i] + step), method="bounded",
                                  options={"xatol": 1e-13})
            cands.append((min(res.fun, vals[i]), res.x if res.fun <= vals[i] else th[i]))
        val, ang = min(cands)
        return float(val), _sphere_point(np.array([ang]))
    if rank == 3:
        step = 2.0**-7
        th = np.arange(step / 2, np.pi, step)
        ph = np.arange(0.0, 2 * np.pi, step)
        tt, pp = np.meshgrid(th, ph, indexing="ij")
        pts = np.stack([np.sin(tt) * np.cos(pp), np.sin(tt) * np.sin(pp), np.cos(tt)], axis=-1)
        vals = _l1_on_sphere(simple, pts.reshape(-1, 3))
        best = np.argsort(vals)[:8]
        cands = []
        for i in best:
            a0 = np.array([tt.ravel()[i], pp.ravel()[i]])
            res = minimize(f, a0, method="Nelder-Mead", options={"xatol": 1e-12, "fatol": 1e-14})
            cands.append((min(res.fun, vals[i]), tuple(res.x if res.fun <= vals[i] else a0)))
        val, ang = min(cands)
        return float(val), _sphere_point(np.array(ang))
    raise ChamberError("sphere minimization supports rank <= 3")


@lru_cache(maxsize=128)
def extract_constants(rs: RootSystem, verify_samples: int = 20_000) -> PartitionConstants:
    db = dual_basis(rs)
    simple = rs.simple_roots
    lam = db.lambdas
    c3_min, _ = sphere_minimum(simple)
    c3 = 0.99 * c3_min
    rng = np.random.default_rng(0)
    u = rng.standard_normal((verify_samples, rs.rank))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    vals = _l1_on_sphere(simple, u)
    worst = int(np.argmin(vals))
    if vals[worst] < c3:
        raise ConstantExtractionError(
            f"sampled value {vals[worst]:.6g} at {u[worst].tolist()} lies below c3 = {c3:.6g}")
    heights = rs.roots @ lam.T
    l1_real = float(np.max(np.sum(heights, axis=1)))
    L1 = int(round(l1_real))
    if abs(L1 - l1_real) > 1e-9 or L1 < 1:
        raise ConstantExtractionError(f"highest root height {l1_real} is not a positive integer")
    norms = np.linalg.norm(lam, axis=1)
    L2, M1, M2 = float(norms.sum()), float(norms.min()), float(norms.max())
    c2 = c3 / (2 * rs.rank)
    c1 = 0.5 * c2 * min(1.0 / L1, M1**2 / (M2 * L2))
    c4 = c2 - L1 * c1
    c5 = M1**2 * c2 - M2 * L2 * c1
    C_Sigma = min(c5 / (2 * M2), 0.5)
    return PartitionConstants(c1, c2, c3, c4, c5, L1, L2, M1, M2, C_Sigma, c3_min)


def cutoff(r, c1: float) -> np.ndarray:
    """Smooth step: 0 for r <= -c1, 1 for r >= 0."""
    r = np.asarray(r, dtype=float)
    y = np.clip((r + c1) / c1, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        g1 = np.where(y > 0, np.exp(-1.0 / np.where(y > 0, y, 1.0)), 0.0)
        g0 = np.where(y < 1, np.exp(-1.0 / np.where(y < 1, 1.0 - y, 1.0)), 0.0)
    return g1 / (g1 + g0)


@lru_cache(maxsize=128)
def _tile_frames(rs: RootSystem) -> tuple[np.ndarray, np.ndarray]:
    """(|W|, l, rank) arrays of w.alpha_k and w.Lambda_k."""
    ws = weyl_group(rs).stacked()
    return (np.einsum("wab,kb->wka", ws, rs.simple_roots),
            np.einsum("wab,kb->wka", ws, dual_basis(rs).lambdas))


def all_tiles(rs: RootSystem) -> list[tuple[int, int]]:
    return [(w, j) for w in range(len(weyl_group(rs))) for j in range(rs.rank)]


def _unit(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    norm = np.linalg.norm(lam, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ChamberError("lambda must be nonzero")
    return lam / norm


def chi_tilde_all(rs: RootSystem, lam) -> np.ndarray:
    """Unnormalized cutoffs for every tile: array (..., |W|, l)."""
    c1 = extract_constants(rs).c1
    walpha, _ = _tile_frames(rs)
    q = np.einsum("wka,...a->...wk", walpha, _unit(lam))
    own = cutoff(q, c1)
    out = own.copy()
    for j in range(rs.rank):
        for k in range(rs.rank):
            if k != j:
                out[..., j] *= own[..., k] * cutoff(q[..., j] - q[..., k], c1)
    return out


def chi_all(rs: RootSystem, lam) -> np.ndarray:
    tilde = chi_tilde_all(rs, lam)
    total = tilde.sum(axis=(-2, -1), keepdims=True)
    return tilde / total


def chi_tilde(rs: RootSystem, tile: tuple[int, int], lam) -> float:
    w, j = tile
    return chi_tilde_all(rs, lam)[..., w, j]


def chi(rs: RootSystem, tile: tuple[int, int], lam) -> float:
    w, j = tile
    return chi_all(rs, lam)[..., w, j]


def tile_of(rs: RootSystem, lam) -> tuple[int, int]:
    lam = np.asarray(lam, dtype=float)
    norm = float(np.linalg.norm(lam))
    if norm == 0:
        raise ChamberError("lambda must be nonzero")
    simple = rs.simple_roots
    best = None
    for w_idx, w in enumerate(weyl_group(rs).elements):
        coords = simple @ (w.T @ lam)
        if np.all(coords >= -_TOL * norm):
            top = coords.max()
            j = int(np.flatnonzero(coords >= top - _TOL * norm)[0])
            if best is None or j < best[1]:
                best = (w_idx, j)
    if best is None:
        raise ChamberError("no Weyl chamber contains lambda")
    return best


def support_properties_check(rs: RootSystem, samples: int, tile: tuple[int, int] | None = None,
                             seed: int = 0, max_report: int = 10) -> dict:
    """Sample the supports of the cutoffs and test both support inequalities."""
    if samples <= 0:
        raise ChamberError("samples must be positive")
    k = extract_constants(rs)
    rng = np.random.default_rng(seed)
    lam = rng.standard_normal((samples, rs.rank))
    lam *= np.exp(rng.uniform(-3, 3, (samples, 1)))
    tilde = chi_tilde_all(rs, lam)
    _, wlam = _tile_frames(rs)
    roots = rs.roots
    norms = np.linalg.norm(lam, axis=1)
    tiles = [tile] if tile is not None else all_tiles(rs)
    witnesses = []
    checked = 0
    n_bad = 0
    for w, j in tiles:
        inside = tilde[:, w, j] > 0
        pts, nrm = lam[inside], norms[inside]
        checked += pts.shape[0]
        vertex = wlam[w, j]
        relevant = np.abs(roots @ vertex) > _TOL
        gaps = np.abs(pts @ roots[relevant].T) - k.c4 * nrm[:, None]
        bad_root = np.any(gaps < -_TOL * nrm[:, None], axis=1)
        bad_vertex = pts @ vertex - k.c5 * nrm < -_TOL * nrm
        for kind, mask in (("root", bad_root), ("vertex", bad_vertex)):
            n_bad += int(mask.sum())
            for p in pts[mask][: max(0, max_report - len(witnesses))]:
                witnesses.append({"tile": [w, j], "kind": kind, "lambda": p.tolist()})
    return {"checked": checked, "violations": n_bad, "witnesses": witnesses}


def phase_derivative_lower_bound(rs: RootSystem, tile: tuple[int, int], tau: complex, x,
                                 samples: int, seed: int = 0) -> dict:
    """Minimum sampled |d/d(w.Lambda_j) psi| on the tile support with |lambda| >= |rho|."""
    k = extract_constants(rs)
    tau = complex(tau)
    t = -tau.imag
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if not 0 < tau.real <= 1:
        raise ChamberError("Re tau must lie in (0, 1]")
    if t == 0 or np.linalg.norm(x) / abs(t) > k.C_Sigma:
        raise ChamberError("|x|/|t| exceeds C_Sigma")
    w, j = tile
    rho_norm = float(np.linalg.norm(half_sum_rho(rs)))
    _, wlam = _tile_frames(rs)
    vertex = wlam[w, j]
    rng = np.random.default_rng(seed)
    kept = []
    need = samples
    while need > 0:
        u = rng.standard_normal((max(4 * need, 256), rs.rank))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        u = u[chi_tilde_all(rs, u)[:, w, j] > 0][:need]
        kept.append(u)
        need -= u.shape[0]
    u = np.concatenate(kept)
    r = rho_norm * np.exp(rng.uniform(0.0, np.log(100.0), (u.shape[0], 1)))
    lam = u * r
    grad = lam / np.sqrt(np.sum(lam**2, axis=1, keepdims=True) + rho_norm**2)
    deriv = grad @ vertex - 1j * (x @ vertex) / tau
    floor = (np.sqrt(2.0) - 1.0) / 2.0 * k.c5
    value = float(np.min(np.abs(deriv)))
    return {"min": value, "bound": floor, "flag": value < floor, "samples": int(u.shape[0])}


def dual_basis_residuals(rs: RootSystem) -> dict[str, float]:
    """Defect of <alpha_j, Lambda_k> = delta_jk and of the two sign properties."""
    simple = rs.simple_roots
    lam = dual_basis(rs).lambdas
    gram_a = simple @ simple.T
    off = gram_a[~np.eye(rs.rank, dtype=bool)]
    return {
        "duality": float(np.max(np.abs(simple @ lam.T - np.eye(rs.rank)))),
        "simple_obtuse": float(max(0.0, off.max(initial=-np.inf))),
        "dual_acute": float(max(0.0, -(lam @ lam.T).min())),
    }
