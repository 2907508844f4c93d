"""Flat polygon model of the surface from the Delaunay dual of a Voronoi diagram."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .elliptic import invariants, wp_eval, wp_numpy
from .exactalg import INF, GaussianRational
from .flatgeo import UnsupportedChart, VoronoiDiagram
from .ppl import _HP_LABELS, _omega_order, omega_poles
from .scenarios import Scenario, _point_of

TWO_PI = 2 * math.pi


class DegenerateEdge(ValueError):
    """A Voronoi edge whose two site lifts coincide."""


class PathThroughPole(ValueError):
    """A period path that passes too close to a pole of omega."""


@dataclass(frozen=True)
class SaddleConnection:
    """Developed straight segment from site ``i`` to site ``j`` on sheet ``sheet``."""

    i: int
    j: int
    start: complex  # developed coordinates
    end: complex
    sheet: int = 0
    labels: tuple = ("", "")

    @property
    def vector(self) -> complex:
        return self.end - self.start


@dataclass(frozen=True)
class HalfEdge:
    conn: int
    vertex: int
    angle: float  # direction on the cone at the vertex, in [0, cone angle)
    reverse: bool


@dataclass(frozen=True)
class Face:
    half_edges: tuple
    vertices: tuple  # developed polygon vertices
    angles: tuple  # interior angles
    residual: float  # |sum of edge periods|
    perimeter: float

    @property
    def sides(self) -> int:
        return len(self.half_edges)


@dataclass(frozen=True)
class GluingReport:
    faces: tuple
    pairings: tuple  # (face a, side a, face b, side b) for each connection
    cone_angles: dict  # vertex label -> total angle
    gauss_bonnet: float  # sum of (cone - 2 pi) + 2 pi * (other zero and pole orders of omega)
    expected_gauss_bonnet: float
    closed: bool

    def face_sizes(self) -> list[int]:
        return sorted(f.sides for f in self.faces)


# ---------------------------------------------------------------------------
# dual graph
# ---------------------------------------------------------------------------

def _cone_multiplicity(diagram: VoronoiDiagram) -> int:
    family = diagram.chart.family if diagram.chart is not None else "PlaneDz"
    if family in ("PlaneDz", "TorusDz"):
        return 1
    if family == "WpCover":
        return 2
    raise UnsupportedChart(f"reconstruction is not available for {family} charts")


def delaunay_dual(diagram: VoronoiDiagram) -> list[SaddleConnection]:
    """One developed segment between the two site lifts of each Voronoi edge, on every sheet."""
    m = _cone_multiplicity(diagram)
    sites = diagram.sites
    out = []
    seen = set()
    for e in diagram.edges:
        if abs(e.B - e.A) == 0:
            raise DegenerateEdge(f"edge {e.i}-{e.j} has coincident site lifts")
        key = (e.i, e.j, round(e.B.real - e.A.real, 9), round(e.B.imag - e.A.imag, 9))
        if key in seen:
            continue
        seen.add(key)
        for sheet in range(m):
            out.append(SaddleConnection(e.i, e.j, complex(e.A), complex(e.B), sheet,
                                        (sites[e.i].label, sites[e.j].label)))
    return out


# ---------------------------------------------------------------------------
# periods
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Period:
    value: complex
    error: float


def periods(s: Scenario, diagram: VoronoiDiagram, connections: list[SaddleConnection]) -> list[Period]:
    """Integral of omega along each connection.

    Developed segments of planar and torus charts give the period exactly; on
    the double cover of the wp chart the segment is lifted to the torus and
    omega = wp' dz is integrated there by Gauss-Legendre quadrature.
    """
    chart = diagram.chart
    scale = complex(chart.scale) if chart is not None else 1.0
    if chart is None or chart.family in ("PlaneDz", "TorusDz"):
        return [Period(c.vector / scale, 0.0) for c in connections]
    if chart.family != "WpCover":
        raise UnsupportedChart(chart.family)
    out = []
    for c in connections:
        za = diagram.sites[c.i].z
        zb = diagram.sites[c.j].z
        path = _lift_segment(s, c.start / scale, c.end / scale, complex(za), complex(zb), c.sheet)
        out.append(_integrate_wp_prime(s, path))
    return out


def _lift_segment(s: Scenario, xa: complex, xb: complex, za: complex, zb: complex, sheet: int, n: int = 400):
    """Torus polyline over the segment [xa, xb] of the wp-plane, from the half-period za."""
    lat = s.lattice
    # near a half-period wp - e ~ c2 (z - za)^2, so z is smooth in u with s ~ u^2 at both ends
    u = np.linspace(0.0, 1.0, n)
    svals = np.where(u <= 0.5, 2 * u ** 2, 1 - 2 * (1 - u) ** 2)
    x = xa + svals * (xb - xa)
    # c2 = wp''(za) / 2 from the differential equation wp'' = 6 wp^2 - g2 / 2
    g2 = complex(invariants(lat, 64)[0])
    e = complex(wp_eval(lat, za, 64)[0])
    c2 = (6 * e * e - g2 / 2) / 2
    sign = 1 if sheet == 0 else -1
    z = np.empty(n, dtype=complex)
    z[0] = za
    z[1] = za + sign * cmath.sqrt((x[1] - xa) / c2)
    for k in range(2, n):
        guess = z[k - 1] + (z[k - 1] - z[k - 2])
        for _ in range(30):
            wp, wpd = wp_numpy(lat, np.array([guess]))
            step = (wp[0] - x[k]) / wpd[0]
            guess -= step
            if abs(step) < 1e-15 * (1 + abs(guess)):
                break
        z[k] = guess
    # the last point is a half period; snap to the lift of zb nearest the path
    w1, w2 = lat.periods()
    cands = [zb + a * w1 + b * w2 for a in (-1, 0, 1) for b in (-1, 0, 1)]
    z[-1] = min(cands, key=lambda c: abs(c - z[-2]))
    return z


def _integrate_wp_prime(s: Scenario, path: np.ndarray) -> Period:
    lat = s.lattice

    def rule(k):
        x, w = np.polynomial.legendre.leggauss(k)
        tot = 0j
        for a, b in zip(path[:-1], path[1:]):
            mid, half = (a + b) / 2, (b - a) / 2
            pts = mid + x * half
            tot += np.sum(w * wp_numpy(lat, pts)[1]) * half
        return tot

    coarse, fine = rule(8), rule(16)
    return Period(complex(fine), float(abs(fine - coarse)))


# ---------------------------------------------------------------------------
# faces
# ---------------------------------------------------------------------------

def _half_edges(diagram: VoronoiDiagram, connections: list[SaddleConnection]):
    """Half-edges with their directions on the cone at each vertex."""
    m = _cone_multiplicity(diagram)
    sites = diagram.sites
    if m == 2:
        centroid = sum(complex(st.pos) for st in sites) / len(sites)
        cut = [cmath.phase(complex(st.pos) - centroid) for st in sites]
    else:
        cut = [0.0] * len(sites)
    out = []
    for n, c in enumerate(connections):
        for rev, v, vec in ((False, c.i, c.vector), (True, c.j, -c.vector)):
            ang = (cmath.phase(vec) - cut[v]) % TWO_PI + TWO_PI * c.sheet
            out.append(HalfEdge(n, v, ang, rev))
    return out, m


def gluing_report(s: Scenario, diagram: VoronoiDiagram, connections: list[SaddleConnection],
                  pers: list[Period] | None = None, tol: float = 1e-6) -> GluingReport:
    """Faces of the dual decomposition, their edge pairings and the cone angle at each vertex."""
    pers = pers if pers is not None else periods(s, diagram, connections)
    hes, m = _half_edges(diagram, connections)
    cone = TWO_PI * m
    by_vertex: dict = {}
    for h in hes:
        by_vertex.setdefault(h.vertex, []).append(h)
    for v in by_vertex:
        by_vertex[v].sort(key=lambda h: h.angle)
    twin = {}
    for h in hes:
        for g in hes:
            if g.conn == h.conn and g.reverse != h.reverse:
                twin[h] = g

    def period_of(h):
        p = pers[h.conn].value
        return -p if h.reverse else p

    def next_of(h):
        # arrive at the far vertex along h, turn clockwise to the previous outgoing edge
        t = twin[h]
        ring = by_vertex[t.vertex]
        k = ring.index(t)
        return ring[k - 1]

    used = set()
    faces = []
    for h0 in hes:
        if h0 in used:
            continue
        cycle = []
        h = h0
        while h not in used:
            used.add(h)
            cycle.append(h)
            h = next_of(h)
        verts = [0j]
        for h in cycle:
            verts.append(verts[-1] + period_of(h))
        residual = abs(verts[-1])
        perim = sum(abs(pers[h.conn].value) for h in cycle)
        angles = []
        for k, h in enumerate(cycle):
            prev = cycle[k - 1]
            t = twin[prev]
            angles.append((t.angle - h.angle) % cone if t is not h else cone)
        faces.append(Face(tuple(cycle), tuple(verts[:-1]), tuple(angles), residual, perim))

    cone_angles = {}
    for f in faces:
        for h, a in zip(f.half_edges, f.angles):
            lab = diagram.sites[h.vertex].label
            cone_angles[lab] = cone_angles.get(lab, 0.0) + a
    pairings = []
    for n in range(len(connections)):
        locs = [(fi, k) for fi, f in enumerate(faces) for k, h in enumerate(f.half_edges) if h.conn == n]
        if len(locs) == 2:
            pairings.append((locs[0][0], locs[0][1], locs[1][0], locs[1][1]))
    gb, expected = _gauss_bonnet(s, diagram, cone_angles)
    closed = all(f.residual <= tol * max(f.perimeter, 1e-300) for f in faces)
    return GluingReport(tuple(faces), tuple(pairings), cone_angles, gb, expected, closed)


def _omega_zeros(s: Scenario) -> list[tuple[str, int, object]]:
    """(label, order, location) of the zeros of omega."""
    if s.kind == "EllipticWpPrime":
        return [(lab, 1, None) for lab in _HP_LABELS]
    if s.is_elliptic:
        return []
    if s.is_rational:
        out = []
        for b in s.bases:
            o = s.omega.num.factor_valuation(b)[0] - s.omega.den.factor_valuation(b)[0]
            if o > 0:
                out.append((str(_point_of(b)), o * b.degree, _point_of(b)))
        m = _omega_order(s.omega, INF)
        if m > 0:
            out.append(("inf", m, INF))
        return out
    raise UnsupportedChart(s.kind)


def _gauss_bonnet(s: Scenario, diagram: VoronoiDiagram, cone_angles: dict):
    """Measured sum of (cone angle - 2 pi) and 2 pi times the remaining orders of omega, and 2 pi (2g - 2)."""
    genus = 1 if s.is_elliptic else 0
    total = sum(a - TWO_PI for a in cone_angles.values())
    site_pos = [st.z for st in diagram.sites]
    for lab, order, loc in _omega_zeros(s):
        if lab in cone_angles:
            continue
        if isinstance(loc, GaussianRational) and any(
            z is not None and abs(complex(z) - complex(loc)) < 1e-12 for z in site_pos
        ):
            continue
        total += TWO_PI * order
    for p in omega_poles(s):
        total -= TWO_PI * p.d * p.count
    return total, TWO_PI * (2 * genus - 2)


__all__ = [
    "DegenerateEdge",
    "PathThroughPole",
    "SaddleConnection",
    "HalfEdge",
    "Face",
    "GluingReport",
    "Period",
    "delaunay_dual",
    "periods",
    "gluing_report",
]
