import math

import pytest

from shires.elliptic import wp_eval
from shires.flatgeo import Edge, UnsupportedChart, VoronoiDiagram, chart_for, developed_voronoi, planar_voronoi
from shires.ppl import principal_polar_locus
from shires.reconstruct import DegenerateEdge, delaunay_dual, gluing_report, periods
from shires.scenarios import preset


def model(name):
    s = preset(name)
    D = developed_voronoi(chart_for(s), principal_polar_locus(s), s, trace=False)
    conns = delaunay_dual(D)
    pers = periods(s, D, conns)
    return s, D, conns, pers, gluing_report(s, D, conns, pers)


def test_wp_prime_faces_and_angles():
    s, D, conns, pers, rep = model("torus-wp")
    assert rep.face_sizes() == [3, 3, 6]
    assert rep.closed
    for f in rep.faces:
        want = 5 * math.pi / 3 if f.sides == 6 else math.pi / 3
        assert all(abs(a - want) < 1e-9 for a in f.angles)
    assert all(abs(v - 4 * math.pi) < 1e-9 for v in rep.cone_angles.values())
    assert abs(rep.gauss_bonnet - rep.expected_gauss_bonnet) < 1e-9 and rep.expected_gauss_bonnet == 0


def test_wp_prime_periods_are_differences_of_half_period_values():
    """The period of wp' dz between half periods is e_j - e_i."""
    s, D, conns, pers, rep = model("torus-wp")
    e = {st.label: complex(wp_eval(s.lattice, st.z, 128)[0]) for st in D.sites}
    for c, p in zip(conns, pers):
        diff = e[D.sites[c.j].label] - e[D.sites[c.i].label]
        assert min(abs(p.value - diff), abs(p.value + diff)) < 1e-9 * abs(diff)
        assert p.error < 1e-9 * abs(diff)


def test_first_example_is_a_digon_on_the_sphere():
    s, D, conns, pers, rep = model("first-example")
    assert rep.face_sizes() == [2]
    assert abs(pers[0].value) == 2
    assert abs(rep.gauss_bonnet - rep.expected_gauss_bonnet) < 1e-12
    assert abs(rep.expected_gauss_bonnet + 4 * math.pi) < 1e-12


def test_square_and_hex_torus_triangulations():
    for name, sizes in (("torus-dz", [3, 3]), ("square-torus", [4])):
        s, D, conns, pers, rep = model(name)
        assert rep.face_sizes() == sizes, name
        assert rep.closed
        assert abs(rep.gauss_bonnet) < 1e-9


def test_degenerate_edge_rejected():
    D = planar_voronoi([0, 1])
    bad = VoronoiDiagram(D.sites, (Edge(0, 1, 1j, 1j, -1, 1),))
    with pytest.raises(DegenerateEdge):
        delaunay_dual(bad)


def test_cone_charts_are_not_reconstructed():
    s = preset("monomial")
    D = developed_voronoi(chart_for(s), principal_polar_locus(s), s, trace=False)
    with pytest.raises(UnsupportedChart):
        delaunay_dual(D)
