import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from symmwave import strichartz
from symmwave.rootsys import build_root_system, real_hyperbolic

dims_ = st.integers(3, 12)
recip = st.fractions(Fraction(0), Fraction(1, 2))


def test_gamma0_in_three_dimensions():
    assert abs(strichartz.exponent_family(3).gamma_0 - (1 + math.sqrt(2))) <= 1e-12


def test_gamma2_in_four_dimensions():
    assert strichartz.exponent_family(4).gamma_2 == pytest.approx(25 / 13, abs=1e-15)


def test_three_dimensions_carry_warning():
    fam = strichartz.exponent_family(3)
    assert fam.warning and not fam.ordered
    assert strichartz.exponent_family(4).warning is None


@pytest.mark.parametrize("d", range(3, 11))
def test_junctions(d):
    f = strichartz.exponent_family(d)
    assert abs(strichartz.sigma_1(d, f.gamma_1)) <= 1e-12
    assert abs(strichartz.sigma_1(d, f.gamma_2) - strichartz.sigma_2(d, f.gamma_2)) <= 1e-12
    assert abs(strichartz.sigma_2(d, f.gamma_c) - 0.5) <= 1e-12
    assert abs(strichartz.sigma_3(d, f.gamma_c) - 0.5) <= 1e-12


@pytest.mark.parametrize("d", range(4, 11))
def test_family_ordered_from_four(d):
    assert strichartz.exponent_family(d).ordered


def test_admissibility_boundary_cases():
    assert strichartz.is_admissible(4, math.inf, 2)
    assert strichartz.is_admissible(4, 2, 4)
    assert not strichartz.is_admissible(4, 3, 2)
    # lower edge 1/p = (d-1)/2 (1/2 - 1/q) is included
    assert strichartz.is_admissible(5, 4, Fraction(8, 3))


def test_sigma_pq_values():
    assert strichartz.sigma_pq(4, math.inf, 4) == 1.0
    assert strichartz.sigma_pq(4, math.inf, 2) == 0.0
    with pytest.raises(strichartz.StrichartzError):
        strichartz.sigma_pq(4, 1.5, 4)


@given(dims_, recip, recip, st.fractions(Fraction(0), Fraction(1, 2)))
def test_admissibility_monotone_in_time_exponent(d, x, y, bump):
    if y == Fraction(1, 2) or y == 0 or x == 0:
        return
    p, q = 1 / x, 1 / y
    larger = min(x + bump, Fraction(1, 2))
    if strichartz.is_admissible(d, p, q):
        assert strichartz.is_admissible(d, 1 / larger, q)


@given(dims_, recip, st.fractions(Fraction(1, 1000), Fraction(499, 1000)))
def test_sigma_pq_nonnegative(d, x, y):
    p = math.inf if x == 0 else 1 / x
    assert strichartz.sigma_pq(d, p, 1 / y) >= 0


@given(dims_, st.floats(0.01, 1.0))
def test_sigma_required_monotone(d, frac):
    fam = strichartz.exponent_family(d)
    lo = 1 + 1e-9
    g1 = lo + frac * (fam.gamma_3 - lo) * 0.5
    g2 = lo + frac * (fam.gamma_3 - lo)
    assert strichartz.sigma_required(d, g1).sigma <= strichartz.sigma_required(d, g2).sigma + 1e-12


def test_sigma_required_cases():
    fam = strichartz.exponent_family(5)
    assert strichartz.sigma_required(5, 1.2).case == "subcritical"
    assert strichartz.sigma_required(5, 1.2).infimum
    assert strichartz.sigma_required(5, fam.gamma_c).sigma == pytest.approx(0.5, abs=1e-12)
    with pytest.raises(strichartz.StrichartzError):
        strichartz.sigma_required(5, fam.gamma_3 + 0.1)


def test_klein_gordon_regimes():
    rs = real_hyperbolic(3)
    assert strichartz.kg_spectral_shift(rs, 1.0).matches_wave
    assert strichartz.kg_spectral_shift(rs, 0.5).sub_rho
    sym = strichartz.kg_spectral_shift(build_root_system("A2"), 3.0)
    assert sym.d_tilde_regime and sym.energy(0.0) == 3.0
    with pytest.raises(strichartz.StrichartzError):
        strichartz.kg_spectral_shift(rs, 0.0)
