import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shires.exactalg import GaussianRational as GR, InvalidInput
from shires.flatgeo import chart_for, critical_radius, developed_voronoi
from shires.ppl import principal_polar_locus
from shires.scenarios import preset
from shires.spectral import (
    InvalidBasepoint,
    SingularTerm,
    delta_phi,
    detect_edges,
    estimate_radius,
    exact_coefficients,
    hausdorff,
    orlov_validate,
    scan_points,
    series_coeffs,
    taylor_coeffs,
    track_singularity,
)

off_axis = st.builds(complex, st.floats(-2, 2), st.floats(0.15, 0.85)).map(lambda z: z if z.imag else z + 0.2j)


def first_example_coeffs(z, N):
    """c_n = (-1)^n [(z - i)^(-n-1) - (z + i)^(-n-1)] from the partial fractions of 2i/(z^2+1)."""
    z = mpmath.mpc(z)
    return [(-1) ** n * ((z - 1j) ** (-n - 1) - (z + 1j) ** (-n - 1)) for n in range(N + 1)]


@settings(max_examples=10)
@given(off_axis)
def test_exact_coefficients_first_example(z):
    tr = taylor_coeffs(preset("first-example"), z, 40)
    with mpmath.workprec(tr.precision):
        ref = first_example_coeffs(z, 40)
        for c, r in zip(tr.coeffs, ref):
            assert abs(c - r) <= 2.0 ** -30 * abs(r)


@settings(max_examples=10)
@given(off_axis)
def test_radius_and_singularity_first_example(z):
    tr = taylor_coeffs(preset("first-example"), z, 60)
    rho = min(abs(z - 1j), abs(z + 1j))
    r = estimate_radius(tr)
    assert abs(r.rho - rho) <= max(1e-3 * rho, r.error)
    est = track_singularity(tr)
    near = 1j if abs(z - 1j) < abs(z + 1j) else -1j
    if abs(abs(z - 1j) - abs(z + 1j)) > 0.1 * rho:
        assert est.flag == "" and abs(est.d - (near - z)) < 1e-4 * rho
        assert abs(est.m0 + 1) < 3e-2


def test_edge_flag_on_the_real_axis():
    est = track_singularity(taylor_coeffs(preset("first-example"), 0.5, 60))
    assert est.flag == "edge" and est.d is None


def test_entire_sequence():
    assert track_singularity([1, 1, 0.5] + [0] * 10).flag == "entire"
    assert estimate_radius([1, 2, 0, 0]).infinite


def test_invalid_basepoints():
    s = preset("first-example")
    with pytest.raises(InvalidBasepoint):
        taylor_coeffs(s, 1j, 10)
    with pytest.raises(InvalidInput):
        taylor_coeffs(s, 0.5, -1)
    with pytest.raises(InvalidBasepoint):
        taylor_coeffs(preset("monomial"), 0, 10)


@pytest.mark.parametrize("name, z", [("first-example", 0.3 + 0.4j), ("monomial", 0.6 + 0.5j),
                                     ("torus-dz", 0.31 + 0.12j), ("torus-wp", 0.2 + 0.15j)])
def test_float_engine_matches_exact_engine(name, z):
    s = preset(name)
    N = 30
    exact = np.array([complex(c) for c in taylor_coeffs(s, z, N).coeffs])
    fast = series_coeffs(s, np.array([z]), N)[:, 0]
    scale = np.abs(exact) + np.abs(exact).max() * 1e-12
    assert np.max(np.abs(fast - exact) / scale) < 1e-8


@pytest.mark.parametrize("name", ["first-example", "monomial", "torus-dz"])
def test_scan_radius_matches_geometry(name):
    s = preset(name)
    ch, ppl = chart_for(s), principal_polar_locus(s)
    rng = np.random.default_rng(7)
    z = rng.uniform(0.1, 0.9, 12) + 1j * rng.uniform(0.1, 0.9, 12)
    res = scan_points(s, z, 256)
    for zi, r, fl in zip(z, res.rho, res.flag):
        geo = critical_radius(ch, ppl, zi, s)
        assert abs(r - geo) < 0.03 * geo, (zi, r, geo, fl)


def test_delta_phi_monomial():
    s = preset("monomial")
    a, b = 0.5 + 0.5j, 0.9 - 0.1j
    ref = -(b ** -3) / 3 + a ** -3 / 3
    assert abs(delta_phi(s, a, b) - ref) < 1e-12 * abs(ref)


def test_hausdorff():
    a = np.array([0, 1, 2], dtype=complex)
    b = np.array([0, 1, 2.5j], dtype=complex)
    assert math.isclose(hausdorff(a, b), min(abs(2.5j - x) for x in a))
    assert hausdorff(a, np.zeros(0, complex)) == math.inf
    assert hausdorff(np.zeros(0, complex), np.zeros(0, complex)) == 0.0


def test_detect_edges_first_example_small_grid():
    s = preset("first-example")
    region = (-2, 2, -2, 2)
    ec = detect_edges(s, region, N=128, grid=64, coarse=16)
    D = developed_voronoi(chart_for(s), principal_polar_locus(s), s, region=region, grid=64)
    assert len(ec.points) > 20
    assert np.abs(ec.points.imag).max() < 2 * ec.cell
    assert hausdorff(ec.points, D.curve_points()) < 3 * ec.cell


def test_detect_edges_grid_must_refine_coarse():
    with pytest.raises(InvalidInput):
        detect_edges(preset("first-example"), (-1, 1, -1, 1), grid=100, coarse=64)


@pytest.mark.parametrize("m", [Fraction(1, 2), Fraction(-1, 2), Fraction(3, 2), -1, -2])
def test_exact_coefficients_are_binomials(m):
    c = exact_coefficients([SingularTerm(1, m)], 40, prec=128)
    with mpmath.workprec(128):
        for k in range(41):
            ref = (-1) ** k * mpmath.binomial(mpmath.mpf(m.numerator if isinstance(m, Fraction) else m)
                                              / (m.denominator if isinstance(m, Fraction) else 1), k)
            assert abs(c[k] - ref) < 1e-30 * (1 + abs(ref))


def test_orlov_square_root_leading_constant():
    rep = orlov_validate([SingularTerm(1, Fraction(1, 2))], 20000)
    assert abs(rep.leading.real + 1 / (2 * math.sqrt(math.pi))) < 1e-2 / (2 * math.sqrt(math.pi))
    assert abs(rep.extrapolated_ratio - 1) < 1e-3
    assert rep.decay < -0.5


def test_orlov_pole_is_exact():
    rep = orlov_validate([SingularTerm(1, -1)], 500)
    assert rep.exact and max(rep.relative_errors) < 1e-40


def test_orlov_dominant_singularity_off_the_unit_circle():
    rep = orlov_validate([SingularTerm(2j, Fraction(1, 2), 3), SingularTerm(-5, Fraction(1, 3))], 4000)
    assert abs(rep.extrapolated_ratio - 1) < 1e-2


def test_gaussian_basepoint_accepted():
    tr = taylor_coeffs(preset("first-example"), GR(Fraction(1, 2), Fraction(1, 3)), 5)
    with mpmath.workprec(tr.precision):
        ref = first_example_coeffs(mpmath.mpc(0.5, mpmath.mpf(1) / 3), 5)
        assert max(abs(c - r) / abs(r) for c, r in zip(tr.coeffs, ref)) < 1e-30
