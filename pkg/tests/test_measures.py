import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from shires.elliptic import wp_eval
from shires.exactalg import INF, context
from shires.flatgeo import CauchyEdgeMeasure, chart_for, developed_voronoi
from shires.measures import (
    asymptotic_measure,
    compare_on_edge,
    empirical_measure,
    iterate_zeros,
    mass_at_symbol,
    points_on_edge,
    project_to_diagram,
)
from shires.ppl import principal_polar_locus
from shires.scenarios import iterate, preset


def diagram(name, region=None, grid=128):
    s = preset(name)
    return s, developed_voronoi(chart_for(s), principal_polar_locus(s), s, region=region, grid=grid)


@settings(max_examples=10)
@given(st.integers(1, 16))
def test_first_example_zeros_and_mass(n):
    s = preset("first-example")
    st_ = iterate(s, n)
    zs = iterate_zeros(s, st_)
    assert zs.Z == 2 * n + 2 and len(zs.numeric) == n
    assert all(abs(complex(v).imag) < 1e-40 for v in zs.numeric.values)
    em = empirical_measure(s, st_, zs)
    assert em.total == 1
    assert em.mass_at("inf") == Fraction(n + 2, 2 * n + 2)
    assert mass_at_symbol(em, INF) == em.mass_at("inf")


def test_first_example_theta_gaps():
    n = 9
    s, D = diagram("first-example", (-4, 4, -2, 2))
    em = empirical_measure(s, iterate(s, n))
    ctx = context(256)
    cmp = compare_on_edge([a.point for a in em.finite_atoms()], CauchyEdgeMeasure(D.edges[0]), ctx)
    assert max(abs(g - ctx.mpf(1) / (n + 1)) for g in cmp.gaps) < 1e-40
    assert cmp.sup_distance <= 1 / n


def test_wp_second_derivative_zeros_are_double_zeros_of_wp():
    s = preset("torus-dz")
    zs = iterate_zeros(s, iterate(s, 2), 128)
    assert zs.Z == 4
    roots = zs.numeric.roots
    assert sorted(r.multiplicity for r in roots) == [2, 2]
    for r in roots:
        assert abs(wp_eval(s.lattice, r.value, 128)[0]) < 1e-25


def test_wp_prime_zeros_are_the_half_periods_symbolically():
    s = preset("torus-dz")
    zs = iterate_zeros(s, iterate(s, 1), 128)
    assert len(zs.numeric) == 0 and zs.Z == 3
    ((key, order, count, _),) = zs.symbolic
    assert key.label == "half-periods" and (order, count) == (1, 3)


@pytest.mark.parametrize("name, n", [("first-example", 6), ("monomial", 6), ("torus-dz", 8), ("torus-wp", 5), ("circle", 6)])
def test_empirical_measure_is_a_probability(name, n):
    s = preset(name)
    st_ = iterate(s, n)
    zs = iterate_zeros(s, st_)
    em = empirical_measure(s, st_, zs)
    assert em.total == 1
    assert sum(a.weight for a in em.atoms) * zs.Z == zs.Z
    counts = empirical_measure(s, st_, zs, normalization="counts")
    assert counts.total == zs.Z


@pytest.mark.parametrize("name", ["first-example", "monomial", "torus-dz", "torus-wp"])
def test_asymptotic_measure_total_is_one(name):
    s, D = diagram(name, grid=64)
    am = asymptotic_measure(s, D)
    assert abs(am.total - 1) < 1e-12


def test_monomial_atom_at_pole_of_omega():
    s, D = diagram("monomial", grid=64)
    am = asymptotic_measure(s, D)
    assert dict(am.atoms) == {"0": Fraction(3, 4)}
    em = empirical_measure(s, iterate(s, 30))
    assert abs(float(em.mass_at("0")) - 0.75) < 0.05


def test_projection_is_periodic_on_the_torus():
    s, D = diagram("torus-dz", grid=128)
    pts = np.array([0.3 + 0.1j, 0.1 + 0.4j])
    t = s.lattice.tau_complex
    a = project_to_diagram(pts, D).distances
    b = project_to_diagram(pts + 2 - t, D).distances
    assert np.allclose(a, b, atol=1e-12)


def test_projection_to_straight_edges_is_exact():
    s, D = diagram("first-example", (-2, 2, -2, 2), grid=64)
    pts = np.array([0.3 + 0.25j, -1.0 - 0.5j, 2.0])
    pr = project_to_diagram(pts, D, eps_out=0.3)
    assert np.allclose(pr.distances, np.abs(pts.imag), atol=1e-15)
    assert math.isclose(pr.outlier_fraction, 1 / 3)


def test_points_on_edge_selects_the_cone_branch():
    s, D = diagram("monomial", grid=64)
    on = complex(-(2 ** (1 / 3)))  # z^-3 = -1/2 on the negative real axis
    off = on * 1.3
    sel = points_on_edge([on, off], D.edges[0], D.chart, tol=0.01)
    assert sel == [on]


def test_theta_of_high_precision_agrees_with_float():
    s, D = diagram("first-example", (-2, 2, -2, 2), grid=64)
    cem = CauchyEdgeMeasure(D.edges[0])
    for x in (-3.0, -0.2, 0.0, 0.7, 11.0):
        th = cem.theta_of(x, context(128))
        assert abs(float(th) - cem.theta_of(x)) < 1e-15
        assert abs(abs(float(th)) - abs(math.atan(x) / math.pi)) < 1e-15
    with mpmath.workprec(64):
        assert cem.mass_between(-mpmath.inf, mpmath.inf) == 1
