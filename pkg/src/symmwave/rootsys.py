"""Root-system catalog, Weyl groups and elementary chamber geometry.

Roots live in an orthonormal basis of the flat subspace, so every inner
product is the plain dot product.  A-series roots have unit length; B2 has
short roots of length 1 and long roots of length sqrt(2); G2 has short roots
of length 1 and long roots of length sqrt(3).
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

WEYL_CAP = 10_000
_WALL_TOL = 1e-12

PRESETS = ("normal", "complex", "hyperbolic")


class RootSystemError(ValueError):
    """Raised for unknown catalog labels or malformed multiplicity data."""


@dataclass(frozen=True, eq=False)
class Root:
    vector: np.ndarray
    mult: int
    is_reduced: bool


@dataclass(frozen=True, eq=False)
class RootSystem:
    rank: int
    positive_roots: tuple[Root, ...]
    simple_indices: tuple[int, ...]
    label: str
    catalog: str = ""

    @property
    def roots(self) -> np.ndarray:
        """Positive roots as rows of an (n, rank) array."""
        return np.array([r.vector for r in self.positive_roots])

    @property
    def mults(self) -> np.ndarray:
        return np.array([r.mult for r in self.positive_roots], dtype=float)

    @property
    def simple_roots(self) -> np.ndarray:
        return self.roots[list(self.simple_indices)]

    @property
    def reduced_mask(self) -> np.ndarray:
        return np.array([r.is_reduced for r in self.positive_roots])

    def double_mult(self, index: int) -> int:
        """Multiplicity of 2*alpha for the positive root at ``index`` (0 if absent)."""
        target = 2.0 * self.positive_roots[index].vector
        for r in self.positive_roots:
            if np.allclose(r.vector, target, atol=1e-12):
                return r.mult
        return 0


@dataclass(frozen=True)
class WeylGroup:
    elements: tuple[np.ndarray, ...]
    generators: tuple[np.ndarray, ...] = field(default=())

    def __len__(self) -> int:
        return len(self.elements)

    def stacked(self) -> np.ndarray:
        return np.stack(self.elements)


def _a3_basis() -> np.ndarray:
    # orthonormal basis of the sum-zero hyperplane in R^4
    m = np.array([[1.0, -1.0, 0.0, 0.0], [1.0, 1.0, -2.0, 0.0], [1.0, 1.0, 1.0, -3.0]])
    return m / np.linalg.norm(m, axis=1, keepdims=True)


def _catalog_geometry(catalog: str) -> tuple[list[np.ndarray], list[int], list[bool]]:
    """Positive roots, simple indices and reducedness for a catalog label."""
    s3 = np.sqrt(3.0)
    if catalog == "A1":
        return [np.array([1.0])], [0], [True]
    if catalog == "BC1":
        return [np.array([1.0]), np.array([2.0])], [0], [True, False]
    if catalog == "A2":
        a1 = np.array([1.0, 0.0])
        a2 = np.array([-0.5, s3 / 2])
        return [a1, a2, a1 + a2], [0, 1], [True] * 3
    if catalog == "A3":
        basis = _a3_basis()
        e = np.eye(4)
        pairs = [(0, 1), (1, 2), (2, 3), (0, 2), (1, 3), (0, 3)]
        roots = [basis @ (e[i] - e[j]) / np.sqrt(2.0) for i, j in pairs]
        return roots, [0, 1, 2], [True] * 6
    if catalog == "B2":
        a1 = np.array([1.0, -1.0])
        a2 = np.array([0.0, 1.0])
        return [a1, a2, a1 + a2, a1 + 2 * a2], [0, 1], [True] * 4
    if catalog == "G2":
        a1 = np.array([1.0, 0.0])
        a2 = np.array([-1.5, s3 / 2])
        roots = [a1, a2, a1 + a2, 2 * a1 + a2, 3 * a1 + a2, 3 * a1 + 2 * a2]
        return roots, [0, 1], [True] * 6
    raise RootSystemError(f"unknown catalog label {catalog!r}")


CATALOGS = ("A1", "BC1", "A2", "A3", "B2", "G2")


def _preset_mults(catalog: str, preset: str, n: int, reduced: list[bool]) -> list[int]:
    if preset == "normal":
        return [1] * n
    if preset == "complex":
        if catalog == "BC1":
            raise RootSystemError("complex preset needs a reduced root system")
        return [2] * n
    if preset == "hyperbolic":
        raise RootSystemError("hyperbolic preset needs the dimension, use A1 with m = d - 1")
    raise RootSystemError(f"unknown preset {preset!r}")


def build_root_system(
    catalog_id: str,
    multiplicities: Sequence[int] | int | None = None,
    *,
    preset: str | None = None,
    label: str | None = None,
) -> RootSystem:
    """Instantiate a catalog root system.

    ``multiplicities`` may be a single integer (applied to every positive root
    of a rank-one system, or to all roots otherwise) or one integer per
    positive root in catalog order.  ``BC1`` takes ``(m_alpha, m_2alpha)``.
    Without overrides the normal real form (all multiplicities 1) is used.
    """
    catalog = catalog_id.strip().upper()
    vectors, simple, reduced = _catalog_geometry(catalog)
    n = len(vectors)
    if multiplicities is None:
        mults = _preset_mults(catalog, preset or "normal", n, reduced)
    else:
        if preset is not None:
            raise RootSystemError("give either a preset or explicit multiplicities")
        if isinstance(multiplicities, (int, np.integer)):
            mults = [int(multiplicities)] * n
        else:
            mults = [int(m) for m in multiplicities]
        if len(mults) != n:
            raise RootSystemError(f"{catalog} needs {n} multiplicities, got {len(mults)}")
    for m in mults:
        if m <= 0:
            raise RootSystemError(f"multiplicities must be positive, got {m}")
    roots = tuple(Root(np.asarray(v, dtype=float), m, r) for v, m, r in zip(vectors, mults, reduced))
    tag = label or _default_label(catalog, preset, mults)
    rs = RootSystem(len(vectors[0]), roots, tuple(simple), tag, catalog)
    _check_invariant_mults(rs)
    return rs


def real_hyperbolic(d: int) -> RootSystem:
    """Rank-one model of real hyperbolic space of dimension ``d``."""
    if d < 2:
        raise RootSystemError("real hyperbolic space needs d >= 2")
    return build_root_system("A1", [d - 1], label=f"H{d}")


def _default_label(catalog: str, preset: str | None, mults: list[int]) -> str:
    if preset:
        return f"{catalog}-{preset}"
    return f"{catalog}(" + ",".join(str(m) for m in mults) + ")"


def root_index(rs: RootSystem, v: np.ndarray, tol: float = 1e-9) -> tuple[int, int]:
    """Index and sign of the positive root equal to +v or -v."""
    roots = rs.roots
    for sign in (1, -1):
        hit = np.flatnonzero(np.all(np.abs(roots - sign * v) < tol, axis=1))
        if hit.size:
            return int(hit[0]), sign
    raise RootSystemError("vector is not a root")


def _check_invariant_mults(rs: RootSystem) -> None:
    for w in weyl_group(rs).elements:
        for i, v in enumerate(rs.roots @ w.T):
            try:
                k, _ = root_index(rs, v)
            except RootSystemError:
                raise RootSystemError("positive roots are not Weyl invariant up to sign") from None
            if rs.positive_roots[k].mult != rs.positive_roots[i].mult:
                raise RootSystemError("multiplicities must be constant on Weyl orbits")


def reflection(alpha: np.ndarray) -> np.ndarray:
    a = np.asarray(alpha, dtype=float)
    return np.eye(a.size) - 2.0 * np.outer(a, a) / (a @ a)


@lru_cache(maxsize=128)
def weyl_group(rs: RootSystem, cap: int = WEYL_CAP) -> WeylGroup:
    """Breadth-first closure of the simple reflections; identity comes first."""
    gens = tuple(reflection(a) for a in rs.simple_roots)
    ident = np.eye(rs.rank)
    key = lambda m: tuple(np.round(m, 12).ravel() + 0.0)
    seen = {key(ident): ident}
    order = [ident]
    queue = deque([ident])
    while queue:
        g = queue.popleft()
        for s in gens:
            h = s @ g
            k = key(h)
            if k not in seen:
                seen[k] = h
                order.append(h)
                if len(order) > cap:
                    raise RootSystemError(f"Weyl closure exceeded {cap} elements")
                queue.append(h)
    return WeylGroup(tuple(order), gens)


def dims(rs: RootSystem) -> tuple[int, int]:
    """Manifold dimension d and dimension at infinity D."""
    d = rs.rank + sum(r.mult for r in rs.positive_roots)
    big_d = rs.rank + 2 * sum(1 for r in rs.positive_roots if r.is_reduced)
    return d, big_d


def half_sum_rho(rs: RootSystem) -> np.ndarray:
    return 0.5 * (rs.mults @ rs.roots)


def in_closed_chamber(rs: RootSystem, h: np.ndarray, tol: float = _WALL_TOL) -> bool:
    h = np.asarray(h, dtype=float)
    scale = max(1.0, float(np.linalg.norm(h)))
    return bool(np.all(rs.simple_roots @ h >= -tol * scale))


def cartan_density(rs: RootSystem, h: np.ndarray) -> float:
    """Product of sinh(<alpha, H>)^m_alpha over positive roots."""
    h = np.asarray(h, dtype=float)
    if not in_closed_chamber(rs, h):
        raise RootSystemError("H lies outside the closed positive chamber")
    x = np.maximum(rs.roots @ h, 0.0)
    return float(np.prod(np.sinh(x) ** rs.mults))


def cartan_envelope(rs: RootSystem, h: np.ndarray) -> float:
    """Two-sided envelope of the Cartan density (same order of magnitude)."""
    x = np.maximum(rs.roots @ np.asarray(h, dtype=float), 0.0)
    return float(np.prod((x / (1.0 + x)) ** rs.mults) * np.exp(2.0 * half_sum_rho(rs) @ h))


def parse_system_text(text: str) -> RootSystem:
    """Build a root system from ``key = value`` lines.

    Recognised keys: ``catalog`` (required), ``multiplicities`` (comma list,
    optionally bracketed), ``preset`` and ``label``.  ``#`` starts a comment.
    """
    fields: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        sep = "=" if "=" in line else ":"
        key, found, value = line.partition(sep)
        if not found:
            raise RootSystemError(f"line {lineno}: expected 'key = value'")
        key = key.strip().lower()
        if key not in ("catalog", "multiplicities", "preset", "label"):
            raise RootSystemError(f"line {lineno}: unknown key {key!r}")
        fields[key] = value.strip()
    if "catalog" not in fields:
        raise RootSystemError("system file needs a 'catalog' entry")
    mults = None
    if "multiplicities" in fields:
        body = fields["multiplicities"].strip("[]() ")
        try:
            mults = [int(v) for v in body.replace(",", " ").split()]
        except ValueError:
            raise RootSystemError("multiplicities must be integers") from None
        if len(mults) == 1 and fields["catalog"].upper() not in ("A1",):
            mults = mults[0]
    return build_root_system(fields["catalog"], mults, preset=fields.get("preset"), label=fields.get("label"))


def parse_shorthand(spec: str) -> RootSystem:
    """``H<d>``, ``<catalog>`` or ``<catalog>:<preset>``."""
    spec = spec.strip()
    if len(spec) > 1 and spec[0] in "Hh" and spec[1:].isdigit():
        return real_hyperbolic(int(spec[1:]))
    catalog, _, preset = spec.partition(":")
    return build_root_system(catalog, preset=preset or None)
