import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from symmwave import chamber, parametrix
from symmwave.plancherel import plancherel_density
from symmwave.kernels import poisson_kernel
from symmwave.rootsys import build_root_system, parse_shorthand, real_hyperbolic

coeff = st.floats(0.01, 4.0)
SYSTEMS = ["A2", "B2", "G2", "B2:complex", "H5", "BC1"]


def _chamber_point(rs, coeffs):
    return np.array(coeffs[: rs.rank]) @ chamber.dual_basis(rs).lambdas


@pytest.mark.parametrize("name", SYSTEMS)
@given(st.lists(coeff, min_size=2, max_size=2))
def test_omega_direct_matches_closed_form(name, coeffs):
    rs = parse_shorthand(name)
    h = _chamber_point(rs, coeffs)
    assert parametrix.omega_fn(rs, h) == pytest.approx(parametrix.omega_closed_form(rs, h), rel=1e-9, abs=1e-9)


@pytest.mark.parametrize("name", ["A2", "B2", "G2"])
@given(st.lists(coeff, min_size=2, max_size=2))
def test_cancellation_sums(name, coeffs):
    rs = build_root_system(name)
    r1, r2 = parametrix.cancellation_check(rs, _chamber_point(rs, coeffs))
    assert abs(r1) <= 1e-9 and abs(r2) <= 1e-9


@pytest.mark.parametrize("name", SYSTEMS)
@given(st.lists(st.floats(0.0, 4.0), min_size=2, max_size=2))
def test_jacobian_at_least_one(name, coeffs):
    rs = parse_shorthand(name)
    assert parametrix.jacobian_J(rs, _chamber_point(rs, coeffs)) >= 1 - 1e-15


@given(st.floats(0.01, 6.0))
def test_omega_constant_on_h3(r):
    assert parametrix.omega_fn(real_hyperbolic(3), [r]) == pytest.approx(-1.0, abs=1e-12)


def test_omega_raises_on_walls():
    with pytest.raises(parametrix.ParametrixError):
        parametrix.omega_fn(build_root_system("A2"), [0.0, 1.0])


@pytest.mark.parametrize("d", [3, 4, 5, 7])
def test_u0_calibration(d):
    assert parametrix.calibrate_u0(d) == pytest.approx(parametrix.euclidean_u0(d), rel=1e-10)


def test_u0_three_dimensions():
    assert parametrix.euclidean_u0(3) == pytest.approx(1 / math.pi, rel=1e-15)


def test_h3_recursion_closes():
    rs = real_hyperbolic(3)
    table = parametrix.uk_recursion(rs, parametrix.radial_grid(rs, 0.01, 2.0), 1)
    assert np.allclose(table.u[0], 1 / math.pi, rtol=1e-14)
    assert np.allclose(table.u[1], -table.u[0], rtol=1e-10)


def test_first_coefficient_at_origin():
    rs = real_hyperbolic(5)
    table = parametrix.uk_recursion(rs, parametrix.radial_grid(rs, 1e-3, 1.0), 1)
    u0 = parametrix.euclidean_u0(5)
    assert table.value(1, 0.0) == pytest.approx(parametrix.omega_at_origin(rs) * u0, rel=1e-6)


def test_transport_residual_second_order():
    rs = real_hyperbolic(5)
    res = [parametrix.transport_residual(parametrix.uk_recursion(rs, parametrix.radial_grid(rs, h, 4.0), 1))
           for h in (2e-3, 1e-3)]
    assert res[1] <= 1e-4
    assert math.log2(res[0] / res[1]) == pytest.approx(2.0, abs=0.05)


def test_higher_rank_recursion_stops_at_one():
    rs = build_root_system("A2")
    with pytest.raises(parametrix.ParametrixError):
        parametrix.uk_recursion(rs, parametrix.radial_grid(rs, 0.01, 1.0), 2)


def test_table_lookup_beyond_grid():
    rs = real_hyperbolic(3)
    table = parametrix.uk_recursion(rs, parametrix.radial_grid(rs, 0.01, 1.0), 1)
    with pytest.raises(parametrix.ParametrixError):
        table.value(0, 5.0)


def test_riesz_requires_positive_real_part():
    with pytest.raises(parametrix.ParametrixError):
        parametrix.riesz_R(-0.5 + 1j, 1.0)


@given(st.floats(0.05, 3.0), st.floats(-3.0, 3.0), st.floats(-3.0, 3.0))
def test_riesz_poisson_identity(re, im, u):
    z = complex(re, im)
    lhs, rhs = parametrix.riesz_poisson_check(z, u, 0.5)
    assert abs(lhs - rhs) <= 1e-6 * abs(rhs)
    lhs, rhs = parametrix.riesz_poisson_check(z, u, 1)
    assert lhs == rhs


@pytest.mark.parametrize("z", [0.3 + 0.2j, 1.0 - 0.9j, 0.05 + 0.5j])
@pytest.mark.parametrize("n, gamma", [(3, 1.0), (3, 2.0), (4, 2.5)])
def test_power_integral_envelope(z, n, gamma):
    scaled, envelope = parametrix.power_integral_check(z, n, gamma, 2.0)
    assert 0 < scaled <= 10 * envelope


@given(st.floats(0.2, 2.0), st.floats(-2.0, 2.0))
def test_leading_term_is_holomorphic_in_tau(re, im):
    rs = real_hyperbolic(3)
    table = parametrix.uk_recursion(rs, parametrix.radial_grid(rs, 0.01, 2.0), 1)
    tau, h = complex(re, im), 1e-5
    f = lambda z: parametrix.a_tau_leading(rs, table, z, [0.8])
    d_re = (f(tau + h) - f(tau - h)) / (2 * h)
    d_im = (f(tau + 1j * h) - f(tau - 1j * h)) / (2j * h)
    assert abs(d_re - d_im) <= 1e-6 * max(1.0, abs(d_re))


def test_c0_rank_one():
    assert parametrix.poisson_c0_rank_one(real_hyperbolic(3)) == pytest.approx(1 / (4 * math.pi**2), rel=1e-9)


def test_poisson_close_to_leading_term():
    rs = real_hyperbolic(3)
    table = parametrix.uk_recursion(rs, parametrix.radial_grid(rs, 1e-3, 2.0), 1)
    tau = 0.5 - 0.5j
    lead = parametrix.a_tau_leading(rs, table, tau, [1.0])
    exact = poisson_kernel(rs, plancherel_density(rs), tau, [1.0], c0=parametrix.poisson_c0_rank_one(rs)).value
    assert abs(exact - lead) <= 0.2 * abs(exact)
