"""Admissibility, Sobolev thresholds and the exponent family for the
semilinear wave equation, plus the Klein-Gordon spectral shift descriptor.

Exponent pairs are handled through their reciprocals ``(1/p, 1/q)``;
``p = inf`` maps to 0.  Admissibility is decided in exact rational arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .rootsys import RootSystem, half_sum_rho


class StrichartzError(ValueError):
    pass


def _recip(p: float) -> Fraction:
    if p is None or math.isinf(p):
        return Fraction(0)
    if p <= 0:
        raise StrichartzError("exponents must be positive")
    return 1 / Fraction(p)


def _check_d(d: int) -> None:
    if int(d) != d or d < 3:
        raise StrichartzError("dimension d must be an integer >= 3")


def is_admissible(d: int, p: float, q: float) -> bool:
    _check_d(d)
    x, y = _recip(p), _recip(q)
    half = Fraction(1, 2)
    if x == 0 and y == half:
        return True
    if not (0 < x <= half and 0 < y < half):
        return False
    return x >= Fraction(d - 1, 2) * (half - y)


def sigma_pq(d: int, p: float, q: float) -> float:
    """Regularity threshold sigma(p, q) on the square [0,1/2] x (0,1/2) plus the apex."""
    _check_d(d)
    x, y = _recip(p), _recip(q)
    half = Fraction(1, 2)
    apex = x == 0 and y == half
    if not apex and not (0 <= x <= half and 0 < y < half):
        raise StrichartzError("(1/p, 1/q) must lie in [0, 1/2] x (0, 1/2) or at (0, 1/2)")
    gap = half - y
    value = Fraction(d + 1, 2) * gap + max(Fraction(0), Fraction(d - 1, 2) * gap - x)
    return float(value)


@dataclass(frozen=True)
class ExponentFamily:
    d: int
    gamma_c: float
    gamma_0: float
    gamma_1: float
    gamma_2: float
    gamma_3: float
    ordered: bool
    warning: str | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def exponent_family(d: int) -> ExponentFamily:
    _check_d(d)
    gc = 1 + 4 / (d - 1)
    b = 0.5 + 1 / (d - 1)
    g0 = b + math.sqrt(b * b + 2 / (d - 1))
    g1 = 1 + 3 / d
    g2 = 1 + 2 / ((d - 1) / 2 + 2 / (d - 1))
    if d <= 5:
        g3 = 1 + 4 / (d - 2)
    else:
        e = 3 / (d + 1)
        g3 = (d - 1) / 2 + e - math.sqrt(((d - 3) / 2 + e) ** 2 - 4 * (d - 1) / (d + 1))
    ordered = 1 < g1 < g2 <= gc <= g3
    warning = "d = 3 is below the d >= 4 range where the well-posedness exponents apply" if d == 3 else None
    return ExponentFamily(d, gc, g0, g1, g2, g3, ordered, warning)


def sigma_1(d: int, gamma: float) -> float:
    return (d + 1) / 4 - (d + 1) * (d + 5) / (8 * d) / (gamma - (d + 1) / (2 * d))


def sigma_2(d: int, gamma: float) -> float:
    return (d + 1) / 4 - 1 / (gamma - 1)


def sigma_3(d: int, gamma: float) -> float:
    return d / 2 - 2 / (gamma - 1)


@dataclass(frozen=True)
class SigmaRequirement:
    d: int
    gamma: float
    sigma: float
    case: str
    infimum: bool  # True when sigma is a non-attained lower bound (sigma > value)
    warning: str | None = None

    def as_dict(self) -> dict:
        return asdict(self)


def sigma_required(d: int, gamma: float) -> SigmaRequirement:
    fam = exponent_family(d)
    if not 1 < gamma <= fam.gamma_3:
        raise StrichartzError(f"gamma must lie in (1, {fam.gamma_3!r}]")
    if gamma <= fam.gamma_1:
        return SigmaRequirement(d, gamma, 0.0, "subcritical", True, fam.warning)
    candidates = []
    if gamma <= fam.gamma_2:
        candidates.append((sigma_1(d, gamma), "sigma_1"))
    if fam.gamma_2 <= gamma <= fam.gamma_c:
        candidates.append((sigma_2(d, gamma), "sigma_2"))
    if fam.gamma_c <= gamma:
        candidates.append((sigma_3(d, gamma), "sigma_3"))
    value, case = min(candidates)
    return SigmaRequirement(d, gamma, float(value), case, False, fam.warning)


@dataclass(frozen=True)
class KGSymbol:
    """Replace sqrt(|lambda|^2 + |rho|^2) by sqrt(|lambda|^2 + kappa^2) in kernel symbols."""

    kappa: float
    rho_norm: float
    d_tilde_regime: bool  # kappa >= |rho|
    sub_rho: bool  # kappa < |rho|
    matches_wave: bool  # kappa == |rho|

    def energy(self, lam_sq):
        return np.sqrt(np.asarray(lam_sq, dtype=float) + self.kappa**2)

    def as_dict(self) -> dict:
        return asdict(self)


def kg_spectral_shift(rs: RootSystem, kappa: float) -> KGSymbol:
    if not kappa > 0:
        raise StrichartzError("kappa must be positive")
    rho_norm = float(np.linalg.norm(half_sum_rho(rs)))
    same = math.isclose(kappa, rho_norm, rel_tol=1e-14, abs_tol=0.0)
    return KGSymbol(float(kappa), rho_norm, kappa >= rho_norm or same, kappa < rho_norm and not same, same)
