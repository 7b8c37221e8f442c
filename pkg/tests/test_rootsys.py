import itertools

import numpy as np
import pytest

from symmwave.rootsys import (CATALOGS, RootSystemError, build_root_system, cartan_density, dims,
                              half_sum_rho, parse_shorthand, parse_system_text, real_hyperbolic,
                              root_index, weyl_group)


ALL = [build_root_system(c) for c in CATALOGS] + [build_root_system(c, preset="complex")
                                                  for c in ("A2", "A3", "B2", "G2")]


@pytest.mark.parametrize("rs", ALL, ids=lambda r: r.label)
def test_simple_roots_pairwise_obtuse(rs):
    simple = rs.simple_roots
    for i, j in itertools.combinations(range(len(simple)), 2):
        assert simple[i] @ simple[j] <= 0


@pytest.mark.parametrize("rs", ALL, ids=lambda r: r.label)
def test_weyl_elements_orthogonal_and_permute_roots(rs):
    for w in weyl_group(rs).elements:
        assert np.max(np.abs(w.T @ w - np.eye(rs.rank))) <= 1e-12
        for v in rs.roots @ w.T:
            root_index(rs, v)


@pytest.mark.parametrize("catalog, order", [("A1", 2), ("BC1", 2), ("A2", 6), ("A3", 24), ("B2", 8), ("G2", 12)])
def test_weyl_order(catalog, order):
    assert len(weyl_group(build_root_system(catalog))) == order


def test_identity_comes_first():
    assert np.array_equal(weyl_group(build_root_system("G2")).elements[0], np.eye(2))


@pytest.mark.parametrize("catalog, d, big_d", [
    ("A2", 5, 8), ("A3", 9, 15), ("B2", 6, 10), ("G2", 8, 14), ("BC1", 3, 3)])
def test_dims_normal_form(catalog, d, big_d):
    assert dims(build_root_system(catalog)) == (d, big_d)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_hyperbolic_dims_and_rho(n):
    rs = real_hyperbolic(n)
    assert dims(rs) == (n, 3)
    assert half_sum_rho(rs)[0] == pytest.approx((n - 1) / 2)


def test_dims_ignore_root_order():
    rs = build_root_system("B2", [2, 1, 1, 2])
    flipped = type(rs)(rs.rank, rs.positive_roots[::-1], rs.simple_indices, rs.label, rs.catalog)
    assert dims(flipped) == dims(rs)


def test_multiplicities_must_be_weyl_invariant():
    with pytest.raises(RootSystemError):
        build_root_system("B2", [1, 2, 1, 2])
    build_root_system("B2", [2, 1, 1, 2])


def test_unknown_catalog():
    with pytest.raises(RootSystemError):
        build_root_system("E8")


def test_cartan_density_rejects_outside_chamber():
    rs = build_root_system("A2")
    with pytest.raises(RootSystemError):
        cartan_density(rs, -half_sum_rho(rs))


def test_cartan_density_h3():
    rs = real_hyperbolic(3)
    assert cartan_density(rs, [0.7]) == pytest.approx(np.sinh(0.7) ** 2, rel=1e-14)


def test_system_file_parsing():
    rs = parse_system_text("# B2 with long roots doubled\ncatalog = B2\nmultiplicities = [2, 1, 1, 2]\n"
                           "label: mine\n")
    assert rs.label == "mine"
    assert rs.mults.tolist() == [2, 1, 1, 2]
    assert parse_system_text("catalog = A2\nmultiplicities = 2").mults.tolist() == [2, 2, 2]
    with pytest.raises(RootSystemError):
        parse_system_text("multiplicities = 1")
    with pytest.raises(RootSystemError):
        parse_system_text("catalog = A2\ncolour = red")


def test_shorthand():
    assert parse_shorthand("H5").label == "H5"
    assert parse_shorthand("B2:complex").mults.tolist() == [2, 2, 2, 2]
    assert parse_shorthand("g2").catalog == "G2"
