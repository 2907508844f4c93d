import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import quad

from shires.elliptic import Lattice
from shires.flatgeo import (
    CauchyEdgeMeasure,
    Edge,
    InvalidEdge,
    UnsupportedChart,
    chart_for,
    critical_radius,
    developed_voronoi,
    edge_to_surface,
    periodic_voronoi,
    planar_voronoi,
    voronoi_index,
)
from shires.exactalg import Poly, RationalMap
from shires.ppl import principal_polar_locus
from shires.scenarios import Scenario, preset

coord = st.floats(-5, 5, allow_nan=False)
sites_st = st.lists(st.builds(complex, coord, coord), min_size=2, max_size=7).filter(
    lambda s: min(abs(a - b) for i, a in enumerate(s) for b in s[i + 1:]) > 0.1)


@given(sites_st)
def test_planar_edges_are_equidistant_and_nearest(sites):
    D = planar_voronoi(sites)
    arr = np.array(sites)
    for e in D.edges:
        for P in e.sample(25, far=3.0):
            d = np.abs(arr - P)
            assert abs(d[e.i] - d[e.j]) < 1e-8 * (1 + d[e.i])
            assert d[e.i] <= d.min() + 1e-8 * (1 + d[e.i])


@given(sites_st, st.integers(0, 2 ** 32 - 1))
def test_planar_diagram_covers_brute_force_ties(sites, seed):
    """Points whose two nearest sites nearly tie lie near a reported edge.

    The distance from P to the bisector of sites a, b is |d_a^2 - d_b^2| / (2 |a - b|).
    """
    D = planar_voronoi(sites)
    arr = np.array(sites)
    P = np.random.default_rng(seed).uniform(-6, 6, (4000, 2)) @ np.array([1, 1j])
    d = np.abs(P[:, None] - arr[None, :])
    order = np.argsort(d, axis=1)
    for z, dz, o in zip(P, d, order):
        a, b = o[0], o[1]
        bound = abs(dz[a] ** 2 - dz[b] ** 2) / (2 * abs(arr[a] - arr[b]))
        if bound > 0.05:
            continue
        best = min(abs(z - e.point(np.clip(e.param(z), e.t0, e.t1))) for e in D.edges)
        assert best <= bound + 1e-9


def test_two_sites_give_their_bisector():
    D = planar_voronoi([1j, -1j])
    (e,) = D.edges
    assert math.isinf(e.t0) and math.isinf(e.t1)
    assert abs(e.M) < 1e-15 and abs(abs(e.u.real) - 1) < 1e-15
    assert abs(D.total_mass - 1) < 1e-15


def test_duplicate_sites_warn_and_merge():
    with pytest.warns(UserWarning):
        D = planar_voronoi([0, 0, 1])
    assert len(D.sites) == 2


@pytest.mark.parametrize("name, classes, half", [("hex", 3, 1 / (2 * math.sqrt(3))), ("square", 2, 0.5)])
def test_periodic_single_site(name, classes, half):
    D = periodic_voronoi([0j], Lattice(name))
    assert len(D.edges) == classes
    for e in D.edges:
        assert abs(e.t0 + half) < 1e-12 and abs(e.t1 - half) < 1e-12


def test_periodic_cell_area_matches_lattice():
    lat = Lattice("hex")
    sites = [0j, 0.3 + 0.2j]
    D = periodic_voronoi(sites, lat)
    # Each edge bounds two cells; the pyramid area sum over edges gives the total area.
    area = sum(2 * 0.5 * e.h * (e.t1 - e.t0) for e in D.edges)
    assert abs(area - lat.tau_complex.imag) < 1e-9


unit = st.floats(-0.5, 0.5, allow_nan=False)


@given(st.lists(st.tuples(unit, unit), min_size=1, max_size=4), st.sampled_from(["hex", "square"]))
def test_periodic_area_property(uv, name):
    lat = Lattice(name)
    t = lat.tau_complex
    sites = [u + v * t for u, v in uv]
    if len(sites) > 1 and min(abs(complex(lat.reduce_float(a - b))) for i, a in enumerate(sites) for b in sites[i + 1:]) < 0.05:
        return
    D = periodic_voronoi(sites, lat)
    area = sum(e.h * (e.t1 - e.t0) for e in D.edges)
    assert abs(area - t.imag) < 1e-8


def _brute_monomial_radius(z):
    """Flat distance on the cone of phi = -z^-3/3 to the apex and to the site over -1."""
    phi = -(z ** -3) / 3
    to_apex = abs(phi)
    # unfolded angle between z and -1 on the cone of angle 6 pi
    delta = (-3 * (np.angle(z) - np.pi) + 3 * np.pi) % (6 * np.pi) - 3 * np.pi
    if abs(delta) >= np.pi:
        return to_apex
    return min(to_apex, abs(abs(phi) * np.exp(1j * delta) - 1 / 3))


@given(st.floats(0.3, 1.5), st.floats(-math.pi, math.pi))
def test_critical_radius_monomial(r, t):
    s = preset("monomial")
    z = r * complex(math.cos(t), math.sin(t))
    got = critical_radius(chart_for(s), principal_polar_locus(s), z, s)
    assert abs(got - _brute_monomial_radius(z)) < 1e-9 * (1 + got)


@given(st.floats(-3, 3), st.floats(-3, 3))
def test_critical_radius_first_example(x, y):
    s = preset("first-example")
    z = complex(x, y)
    assert abs(critical_radius(chart_for(s), principal_polar_locus(s), z, s) - min(abs(z - 1j), abs(z + 1j))) < 1e-12


def test_voronoi_index():
    s = preset("first-example")
    ch, ppl = chart_for(s), principal_polar_locus(s)
    assert voronoi_index(ch, ppl, 0.7, s) == 2
    assert voronoi_index(ch, ppl, 0.7 + 0.1j, s) == 1
    assert voronoi_index(ch, ppl, 1j, s) == 1


def test_first_example_pullback_is_real_axis():
    s = preset("first-example")
    D = developed_voronoi(chart_for(s), principal_polar_locus(s), s, region=(-2, 2, -2, 2), grid=128)
    pts = D.curve_points()
    assert len(pts) > 50 and np.abs(pts.imag).max() < 1e-12


def test_monomial_pullback_solves_the_curve_equation():
    s = preset("monomial")
    D = developed_voronoi(chart_for(s), principal_polar_locus(s), s, grid=256)
    pts = D.curve_points()
    assert len(pts) > 50
    assert np.abs((pts ** -3).real + 0.5).max() < 1e-8 * np.abs(pts ** -3).max()
    # the branch through the cone containing -1
    assert np.all(np.abs(np.angle(-pts)) < np.pi / 3 + 1e-9)


def test_counterexample_has_an_empty_diagram():
    s = preset("counterexample")
    D = developed_voronoi(chart_for(s), principal_polar_locus(s), s, grid=64)
    assert D.is_empty() and len(D.sites) == 1


def test_edge_to_surface_on_cone():
    s = preset("monomial")
    ch = chart_for(s)
    D = developed_voronoi(ch, principal_polar_locus(s), s, trace=False)
    z = edge_to_surface(ch, D.edges[0], np.linspace(-1, 1, 9))
    assert np.abs((z ** -3).real + 0.5).max() < 1e-12


def test_log_primitive_chart_is_unsupported():
    s = Scenario.rational(RationalMap(Poly([1]), Poly([0, 1])), RationalMap(Poly([1]), Poly([1, 1])))
    with pytest.raises(UnsupportedChart):
        chart_for(s)


@given(st.builds(complex, coord, coord), st.builds(complex, coord, coord))
def test_cauchy_density_integrates_to_theta(A, B):
    if abs(A - B) < 0.1:
        return
    e = Edge(0, 1, A, B, -math.inf, math.inf)
    cem = CauchyEdgeMeasure(e)
    lo, hi = -2 * e.h, 3 * e.h
    num = quad(lambda t: float(cem.density(e.point(t))), lo, hi, epsabs=1e-13)[0]
    assert abs(num - cem.mass_between(lo, hi)) < 1e-8
    assert abs(cem.total - 1) < 1e-12


def test_degenerate_edge_rejected():
    with pytest.raises(InvalidEdge):
        CauchyEdgeMeasure(Edge(0, 1, 1j, 1j, -1, 1))
