import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symmwave import chamber
from symmwave.rootsys import CATALOGS, build_root_system

finite = st.floats(-50, 50, allow_nan=False)


@pytest.mark.parametrize("catalog", CATALOGS)
def test_dual_basis_residuals(catalog):
    res = chamber.dual_basis_residuals(build_root_system(catalog))
    assert max(res.values()) <= 1e-12


def test_zero_spectral_point_rejected():
    with pytest.raises(chamber.ChamberError):
        chamber.chi_all(build_root_system("A2"), np.zeros(2))


def test_cutoff_endpoints_and_monotone():
    r = np.linspace(-2, 1, 301)
    v = chamber.cutoff(r, 1.0)
    assert np.all(v[r <= -1] == 0) and np.all(v[r >= 0] == 1)
    assert np.all(np.diff(v) >= 0)


@pytest.mark.parametrize("name", ["A2", "B2", "G2"])
@given(coords=st.lists(finite, min_size=2, max_size=2).filter(lambda v: np.hypot(*v) > 1e-6))
def test_partition_of_unity_property(name, coords):
    rs = build_root_system(name)
    lam = np.array(coords)
    assert abs(chamber.chi_all(rs, lam).sum() - 1.0) <= 1e-10


@pytest.mark.parametrize("name", ["A2", "A3", "B2", "G2"])
def test_constants_relations(name):
    k = chamber.extract_constants(build_root_system(name))
    assert k.c4 > 0 and k.c5 > 0 and k.c1 < k.c2
    assert k.c3 < k.c3_min
    assert k.C_Sigma == min(k.c5 / (2 * k.M2), 0.5)


@pytest.mark.parametrize("name", ["A2", "B2", "G2", "A3"])
def test_support_properties(name):
    res = chamber.support_properties_check(build_root_system(name), 20_000, seed=7)
    assert res["violations"] == 0 and res["checked"] > 0


@given(st.lists(finite, min_size=2, max_size=2).filter(lambda v: np.hypot(*v) > 1e-3))
def test_tile_of_has_positive_cutoff(coords):
    rs = build_root_system("A2")
    lam = np.array(coords)
    w, j = chamber.tile_of(rs, lam)
    assert chamber.chi_tilde(rs, (w, j), lam) > 0


def test_phase_derivative_bound_a2():
    rs = build_root_system("A2")
    k = chamber.extract_constants(rs)
    x = 0.5 * k.C_Sigma * 2.0 * np.array([1.0, 0.3]) / np.linalg.norm([1.0, 0.3])
    for tile in chamber.all_tiles(rs)[:4]:
        res = chamber.phase_derivative_lower_bound(rs, tile, complex(0.5, -2.0), x, 500, seed=1)
        assert res["min"] >= (np.sqrt(2) - 1) / 2 * k.c5
