"""Developing maps, Voronoi diagrams in the flat metric |omega|, and the Cauchy edge measure.

Every supported scenario comes with an explicit chart: a map from the surface
to a developed plane in which the flat metric is Euclidean (up to a single
cone point for the monomial family).  Voronoi edges are straight there and are
computed exactly by clipping bisector lines; the pullback to the surface is
traced by marching squares on the bisector functions and polished by Newton
steps.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import mpmath
import numpy as np
from skimage.measure import find_contours

from .elliptic import Lattice, wp_numpy
from .exactalg import INF, GaussianRational, InvalidInput
from .ppl import PplReport, principal_polar_locus
from .scenarios import RootsOf, Scenario


class UnsupportedChart(ValueError):
    pass


class InvalidEdge(ValueError):
    pass


# ---------------------------------------------------------------------------
# edges and diagrams
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class Edge:
    """Segment {M + t u : t0 <= t <= t1} of the bisector of developed sites A, B.

    ``u = i (B - A) / |B - A|``; ``frame`` is the unfolding angle for cone
    charts and ``offset`` the lattice translate of B for periodic diagrams.
    """

    i: int
    j: int
    A: complex
    B: complex
    t0: float
    t1: float
    frame: float = 0.0
    offset: complex = 0j

    @property
    def M(self) -> complex:
        return (self.A + self.B) / 2

    @property
    def u(self) -> complex:
        d = self.B - self.A
        return 1j * d / abs(d)

    @property
    def h(self) -> float:
        return abs(self.B - self.A) / 2

    def point(self, t):
        return self.M + np.asarray(t) * self.u

    @property
    def endpoints(self):
        return (self.point(self.t0) if math.isfinite(self.t0) else None,
                self.point(self.t1) if math.isfinite(self.t1) else None)

    def theta(self, t):
        """Angle variable of the Cauchy measure, in (-1/2, 1/2) along the full line."""
        return np.arctan(np.asarray(t, dtype=float) / self.h) / np.pi

    @property
    def mass(self) -> float:
        return float(self.theta(self.t1) - self.theta(self.t0))

    def param(self, P) -> float:
        """Line parameter of the projection of P."""
        d = np.asarray(P) - self.M
        u = self.u
        return (d * np.conj(u)).real

    def sample(self, count: int = 200, far: float = 50.0) -> np.ndarray:
        reach = far * max(self.h, 1.0)
        t0 = self.t0 if math.isfinite(self.t0) else min(self.t1, 0.0) - reach
        t1 = self.t1 if math.isfinite(self.t1) else max(t0, 0.0) + reach
        return self.point(np.linspace(t0, t1, count))


@dataclass(frozen=True)
class Site:
    label: str
    pos: complex  # developed position (in the cone chart: r e^{i alpha})
    r: float = 0.0
    alpha: float = 0.0
    apex: bool = False
    z: complex | None = None


@dataclass(eq=False)
class VoronoiDiagram:
    sites: tuple
    edges: tuple
    chart: "CoverChart | None" = None
    curves: dict = field(default_factory=dict)  # (i, j) -> list of complex polylines on the surface

    @property
    def vertices(self) -> list:
        pts = []
        for e in self.edges:
            for p in e.endpoints:
                if p is not None and not any(abs(p - q) < 1e-9 for q in pts):
                    pts.append(p)
        return pts

    def is_empty(self) -> bool:
        return not self.edges

    @property
    def total_mass(self) -> float:
        return sum(e.mass for e in self.edges)

    def curve_points(self) -> np.ndarray:
        arrs = [c for cs in self.curves.values() for c in cs]
        return np.concatenate(arrs) if arrs else np.zeros(0, dtype=complex)


# ---------------------------------------------------------------------------
# planar and periodic diagrams
# ---------------------------------------------------------------------------

def _dedupe(points, tol):
    out = []
    for p in points:
        if any(abs(p - q) <= tol * max(1.0, abs(q)) for q in out):
            warnings.warn("duplicate Voronoi sites merged", stacklevel=3)
            continue
        out.append(p)
    return out


def _clip_bisector(A, B, others, tol):
    """Parameter interval of the bisector of A, B where A is at least as close as every C."""
    M = (A + B) / 2
    u = 1j * (B - A) / abs(B - A)
    t0, t1 = -math.inf, math.inf
    if len(others):
        C = np.asarray(others, dtype=complex)
        D = C - A
        alpha = (D * np.conj(u)).real
        beta = (np.abs(C) ** 2 - abs(A) ** 2) / 2 - (D * np.conj(M)).real
        scale = np.abs(D) * max(1.0, abs(M))
        flat = np.abs(alpha) <= tol * np.abs(D)
        if np.any(flat & (beta < -tol * scale)):
            return None
        pos = ~flat & (alpha > 0)
        neg = ~flat & (alpha < 0)
        if pos.any():
            t1 = min(t1, float(np.min(beta[pos] / alpha[pos])))
        if neg.any():
            t0 = max(t0, float(np.max(beta[neg] / alpha[neg])))
    if t1 - t0 <= tol * max(1.0, abs(B - A)):
        return None
    return t0, t1


def planar_voronoi(sites, tol: float = 1e-10, labels=None) -> VoronoiDiagram:
    """Exact planar Voronoi diagram: each bisector line clipped by all other sites."""
    pts = _dedupe([complex(s) for s in sites], tol)
    if not pts:
        raise InvalidInput("planar_voronoi needs at least one site")
    labels = labels or [str(p) for p in pts]
    arr = np.array(pts)
    edges = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            others = np.delete(arr, [i, j])
            iv = _clip_bisector(pts[i], pts[j], others, tol)
            if iv is not None:
                edges.append(Edge(i, j, pts[i], pts[j], iv[0], iv[1]))
    st = tuple(Site(labels[k] if k < len(labels) else str(p), p, abs(p), 0.0, False, p) for k, p in enumerate(pts))
    return VoronoiDiagram(st, tuple(edges))


def _lattice_vectors(lattice: Lattice):
    t = lattice.tau_complex
    if t.imag <= 0:
        raise InvalidInput("invalid lattice: Im(tau) <= 0")
    return 1.0 + 0j, t


def _periodic_edges(sites, lattice: Lattice, K: int, tol: float):
    w1, w2 = _lattice_vectors(lattice)
    lifts, owner, offs = [], [], []
    for a in range(-K, K + 1):
        for b in range(-K, K + 1):
            o = a * w1 + b * w2
            for k, s in enumerate(sites):
                lifts.append(s + o)
                owner.append(k)
                offs.append(o)
    arr = np.array(lifts)
    central = [idx for idx, o in enumerate(offs) if o == 0]
    classes = {}
    for ci in central:
        A = arr[ci]
        cand = np.argsort(np.abs(arr - A))[1 : 12 * len(sites) + 24]
        for cj in cand:
            others = np.delete(arr, [ci, cj])
            iv = _clip_bisector(A, arr[cj], others, tol)
            if iv is None:
                continue
            oj = offs[cj]
            key1 = (owner[ci], owner[cj], round(oj.real, 9), round(oj.imag, 9))
            key2 = (owner[cj], owner[ci], round(-oj.real, 9), round(-oj.imag, 9))
            key = min(key1, key2)
            if key in classes:
                continue
            if key == key1:
                classes[key] = Edge(owner[ci], owner[cj], A, arr[cj], iv[0], iv[1], offset=oj)
            else:
                # same edge seen from the other site: swapping A and B reverses the parameter
                classes[key] = Edge(owner[cj], owner[ci], arr[cj] - oj, A - oj, -iv[1], -iv[0], offset=-oj)
    return classes


def periodic_voronoi(sites, lattice: Lattice, tol: float = 1e-10) -> VoronoiDiagram:
    """Voronoi diagram of the orbit of ``sites`` under Z + tau Z, one edge per translation class.

    Computed on a 5x5 tiling and checked against a 7x7 tiling.
    """
    pts = [complex(s) for s in sites]
    small = _periodic_edges(pts, lattice, 2, tol)
    big = _periodic_edges(pts, lattice, 3, tol)
    if set(small) != set(big) or any(
        abs(small[k].t0 - big[k].t0) > 1e-8 or abs(small[k].t1 - big[k].t1) > 1e-8 for k in small
    ):
        raise AssertionError("periodic Voronoi changed when the tiling was enlarged")
    st = tuple(Site(str(p), p, abs(p), 0.0, False, p) for p in pts)
    return VoronoiDiagram(st, tuple(small[k] for k in sorted(small)))


# ---------------------------------------------------------------------------
# charts
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class CoverChart:
    """Developing map of a scenario's flat structure.

    ``family`` is one of PlaneDz, MonomialCone, TorusDz, WpCover,
    CyclicBranched.  ``scale`` multiplies omega (the primitive scales with it).
    """

    family: str
    scale: complex = 1.0
    k: int = 1  # cone exponent: phi = scale * z^k / k
    lattice: Lattice | None = None
    branch_points: tuple = ()
    degree: int = 1
    apex_in_ppl: bool = False

    @property
    def sheets(self) -> int:
        """Number of surface preimages of each developed edge point."""
        if self.family == "WpCover":
            return 2
        if self.family == "CyclicBranched":
            return self.degree
        if self.family == "MonomialCone" and not self.apex_in_ppl:
            return abs(self.k)
        return 1

    # developed coordinates -------------------------------------------------
    def forward(self, z):
        z = np.asarray(z, dtype=complex)
        if self.family in ("PlaneDz", "CyclicBranched", "TorusDz"):
            return self.scale * z
        if self.family == "MonomialCone":
            return self.scale * z ** self.k / self.k
        if self.family == "WpCover":
            return self.scale * wp_numpy(self.lattice, z)[0]
        raise UnsupportedChart(self.family)

    def polar(self, z):
        """(r, unwrapped angle) on the cone of total angle 2 pi |k|."""
        z = np.asarray(z, dtype=complex)
        k = self.k
        r = np.abs(self.scale) * np.abs(z) ** k / abs(k)
        alpha = k * np.angle(z) + np.angle(self.scale / k)
        return r, np.mod(alpha, 2 * np.pi * abs(k))

    @property
    def cone_angle(self) -> float:
        return 2 * np.pi * abs(self.k)

    # sites -----------------------------------------------------------------
    def sites_for(self, ppl: PplReport, s: Scenario | None = None) -> list[Site]:
        out = []
        for p in ppl.points:
            for z, lab in _locations(p, s):
                out.append(self._site(z, lab))
        if self.family == "MonomialCone" and not self.apex_in_ppl:
            # f factors through phi near the cone point: sites are phi-images
            merged = []
            for st in out:
                if not any(abs(st.pos - m.pos) <= 1e-10 * max(1, abs(m.pos)) for m in merged):
                    merged.append(st)
            out = merged
        return out

    def _site(self, z, label) -> Site:
        if self.family == "MonomialCone":
            apex_z = INF if self.k < 0 else 0
            if (z is None and apex_z is INF) or (z is not None and apex_z == 0 and abs(z) == 0):
                return Site(label, 0j, 0.0, 0.0, True, z)
            r, a = self.polar(z)
            r, a = float(r), float(a)
            pos = r * np.exp(1j * a) if self.apex_in_ppl else complex(self.forward(z))
            return Site(label, complex(pos), r, a, False, z)
        if z is None:
            raise UnsupportedChart("site at infinity in a planar chart")
        if self.family == "TorusDz":
            z = complex(self.lattice.reduce_float(z))
        pos = complex(self.forward(z))
        return Site(label, pos, abs(pos), 0.0, False, z)

    # distances ---------------------------------------------------------------
    def distances(self, Z, sites: list[Site]) -> np.ndarray:
        """Flat distance from each point of Z to each site: shape (len(sites),) + Z.shape."""
        Z = np.asarray(Z, dtype=complex)
        out = np.empty((len(sites),) + Z.shape)
        if self.family == "MonomialCone" and self.apex_in_ppl:
            r, a = self.polar(Z)
            period = self.cone_angle
            for n, st in enumerate(sites):
                if st.apex:
                    out[n] = r
                    continue
                d = np.mod(a - st.alpha + period / 2, period) - period / 2
                eu = np.sqrt(np.maximum(r ** 2 + st.r ** 2 - 2 * r * st.r * np.cos(d), 0))
                out[n] = np.where(np.abs(d) <= np.pi, eu, r + st.r)
            return out
        if self.family == "TorusDz":
            w1, w2 = _lattice_vectors(self.lattice)
            Zr = self.lattice.reduce_float(Z) * self.scale
            for n, st in enumerate(sites):
                best = np.full(Z.shape, np.inf)
                for a in range(-2, 3):
                    for b in range(-2, 3):
                        best = np.minimum(best, np.abs(Zr - st.pos - (a * w1 + b * w2) * self.scale))
                out[n] = best
            return out
        W = self.forward(Z)
        for n, st in enumerate(sites):
            out[n] = np.abs(W - st.pos)
        return out

    def default_region(self, sites: list[Site]):
        if self.family in ("TorusDz", "WpCover"):
            t = self.lattice.tau_complex
            xs = [0, 1, t.real, 1 + t.real]
            return (min(xs) - 0.02, max(xs) + 0.02, -0.02, t.imag + 0.02)
        if self.family == "MonomialCone":
            zs = [s.z for s in sites if s.z is not None]
            R = max([abs(z) for z in zs] + [1.0]) * 1.6
            return (-R, R, -R, R)
        zs = [s.z for s in sites if s.z is not None]
        xs = [z.real for z in zs]
        ys = [z.imag for z in zs]
        span = max(max(xs) - min(xs), max(ys) - min(ys), 1.0)
        pad = span
        return (min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad)


def _locations(p, s):
    """Complex locations (None for infinity) and labels of a PPL point."""
    loc = p.location
    if loc is INF:
        return [(None, "inf")]
    if isinstance(loc, GaussianRational):
        return [(complex(loc), p.label)]
    if isinstance(loc, RootsOf):
        rts = mpmath.polyroots([complex(c) for c in reversed(loc.poly.coeffs)], maxsteps=200, extraprec=200)
        return [(complex(r), f"{p.label}#{k}") for k, r in enumerate(rts)]
    return [(complex(loc), p.label)]


def chart_for(s: Scenario, scale: complex = 1.0) -> CoverChart:
    """The explicit cover chart of a supported scenario."""
    if s.is_rational:
        om = s.omega
        num, den = om.num, om.den
        if num.degree == 0 and den.degree == 0:
            return CoverChart("PlaneDz", scale * complex(num[0] / den[0]))
        # omega = c z^m dz
        mono = lambda p: all(p[k].is_zero() for k in range(p.degree))  # noqa: E731
        if mono(num) and mono(den):
            m = num.degree - den.degree
            c = complex(num.lead / den.lead) * scale
            k = m + 1
            if k == 0:
                raise UnsupportedChart("omega = c dz/z has a logarithmic primitive")
            if k == 1:
                return CoverChart("PlaneDz", c)
            ppl = principal_polar_locus(s)
            apex = INF if k < 0 else GaussianRational(0)
            apex_in = any(p.location == apex for p in ppl.points)
            return CoverChart("MonomialCone", c, k, apex_in_ppl=apex_in)
        raise UnsupportedChart("rational omega without an explicit primitive chart")
    if s.kind == "EllipticDz":
        return CoverChart("TorusDz", scale, lattice=s.lattice)
    if s.kind == "EllipticWpPrime":
        return CoverChart("WpCover", scale, lattice=s.lattice)
    if s.kind == "Superelliptic":
        pts = []
        for b in s.bases:
            pts.extend(complex(r) for r in mpmath.polyroots([complex(c) for c in reversed(b.coeffs)], extraprec=100))
        return CoverChart("CyclicBranched", scale, branch_points=tuple(pts), degree=s.ell)
    raise UnsupportedChart(s.kind)


# ---------------------------------------------------------------------------
# developed diagrams and pullbacks
# ---------------------------------------------------------------------------

def developed_edges(chart: CoverChart, sites: list[Site], tol: float = 1e-10) -> list[Edge]:
    fam = chart.family
    if fam == "TorusDz":
        return list(periodic_voronoi([s.pos for s in sites], chart.lattice, tol).edges) if sites else []
    if fam == "MonomialCone" and chart.apex_in_ppl:
        return _cone_edges(chart, sites, tol)
    if len(sites) < 2:
        return []
    return list(planar_voronoi([s.pos for s in sites], tol).edges)


def _cone_edges(chart: CoverChart, sites: list[Site], tol: float) -> list[Edge]:
    """Edges on a cone whose apex is a site, computed in local planar unfoldings."""
    period = chart.cone_angle
    edges = []
    n = len(sites)

    def wrap(a):
        return (a + period / 2) % period - period / 2

    for i in range(n):
        for j in range(i + 1, n):
            si, sj = sites[i], sites[j]
            if si.apex or sj.apex:
                frame = sj.alpha if si.apex else si.alpha
            else:
                d = wrap(sj.alpha - si.alpha)
                if abs(d) >= np.pi:
                    continue
                frame = si.alpha + d / 2

            def place(st):
                return 0j if st.apex else st.r * np.exp(1j * wrap(st.alpha - frame))

            A, B = place(si), place(sj)
            others = [place(sites[k]) for k in range(n) if k not in (i, j)
                      and (sites[k].apex or abs(wrap(sites[k].alpha - frame)) < np.pi)]
            iv = _clip_bisector(A, B, np.array(others, dtype=complex), tol)
            if iv is not None:
                edges.append(Edge(i, j, A, B, iv[0], iv[1], frame=frame))
    return edges


def developed_voronoi(chart: CoverChart, ppl: PplReport, s: Scenario | None = None, region=None,
                      grid: int = 512, trace: bool = True) -> VoronoiDiagram:
    """Voronoi diagram among developed PPL lifts plus its traced pullback on the surface."""
    sites = chart.sites_for(ppl, s)
    edges = developed_edges(chart, sites)
    diagram = VoronoiDiagram(tuple(sites), tuple(edges), chart)
    if trace and edges:
        region = region or chart.default_region(sites)
        diagram.curves = pullback_curves(chart, sites, region, grid)
    return diagram


def _grid(region, grid):
    x0, x1, y0, y1 = region
    xs = np.linspace(x0, x1, grid)
    ys = np.linspace(y0, y1, grid)
    X, Y = np.meshgrid(xs, ys)
    return X + 1j * Y, xs, ys


def pullback_curves(chart: CoverChart, sites: list[Site], region, grid: int = 512, polish: int = 3) -> dict:
    """Trace {d_i = d_j < all other d_k} on a grid over ``region`` for every adjacent pair."""
    if chart.family == "TorusDz":
        return _torus_pullback(chart, sites, region, grid, polish)
    Z, xs, ys = _grid(region, grid)
    with np.errstate(all="ignore"):
        D = chart.distances(Z, sites)
    good = np.all(np.isfinite(D), axis=0)
    if len(sites) < 2:
        return {}
    order = np.argsort(np.where(good, D, np.inf), axis=0)
    first, second = order[0], order[1]
    dx, dy = xs[1] - xs[0], ys[1] - ys[0]
    out = {}
    pairs = set()
    lab = np.where(good, first, -1)
    for a, b in ((lab[:, 1:], lab[:, :-1]), (lab[1:, :], lab[:-1, :])):
        m = (a != b) & (a >= 0) & (b >= 0)
        for p, q in zip(a[m], b[m]):
            pairs.add((min(p, q), max(p, q)))
    for i, j in sorted(pairs):
        h = D[i] - D[j]
        two = ((first == i) & (second == j)) | ((first == j) & (second == i))
        mask = _dilate(two & good)
        h = np.where(good, h, np.nan)
        polys = []
        for c in find_contours(h, 0.0, mask=mask):
            zc = xs[0] + c[:, 1] * dx + 1j * (ys[0] + c[:, 0] * dy)
            zc = _polish(chart, sites, i, j, zc, polish, min(dx, dy))
            with np.errstate(all="ignore"):
                Dc = chart.distances(zc, sites)
            dij = np.minimum(Dc[i], Dc[j])
            rest = np.delete(Dc, [i, j], axis=0)
            ok = np.isfinite(dij) & (np.abs(Dc[i] - Dc[j]) <= 1e-6 * (1 + dij))
            if rest.size:
                ok &= np.all(rest >= dij * (1 - 1e-9), axis=0)
            for run in _runs(zc, ok):
                polys.append(run)
        if polys:
            out[(int(i), int(j))] = polys
    return out


def _torus_pullback(chart, sites, region, grid, polish):
    """Lattice translates near the cell become separate planar sites; keys use the original indices."""
    w1, w2 = _lattice_vectors(chart.lattice)
    lifts, owner = [], []
    for a in range(-2, 3):
        for b in range(-2, 3):
            for n, st in enumerate(sites):
                p = st.pos + (a * w1 + b * w2) * chart.scale
                lifts.append(Site(st.label, p, abs(p), 0.0, False, p / chart.scale))
                owner.append(n)
    plane = CoverChart("PlaneDz", chart.scale)
    raw = pullback_curves(plane, lifts, region, grid, polish)
    out: dict = {}
    for (i, j), polys in raw.items():
        key = (min(owner[i], owner[j]), max(owner[i], owner[j]))
        out.setdefault(key, []).extend(polys)
    return out


def _dilate(m):
    o = m.copy()
    o[1:, :] |= m[:-1, :]
    o[:-1, :] |= m[1:, :]
    o[:, 1:] |= m[:, :-1]
    o[:, :-1] |= m[:, 1:]
    return o


def _runs(z, ok):
    out = []
    start = None
    for k, flag in enumerate(ok):
        if flag and start is None:
            start = k
        if not flag and start is not None:
            if k - start >= 2:
                out.append(z[start:k])
            start = None
    if start is not None and len(z) - start >= 2:
        out.append(z[start:])
    return out


def _polish(chart, sites, i, j, z, steps, cell):
    """Newton steps on h = d_i - d_j along its numerical gradient."""
    eps = cell * 1e-3
    pair = [sites[i], sites[j]]
    for _ in range(steps):
        with np.errstate(all="ignore"):
            d = chart.distances(z, pair)
            h = d[0] - d[1]
            dhx = (np.subtract(*chart.distances(z + eps, pair)) - np.subtract(*chart.distances(z - eps, pair))) / (2 * eps)
            dhy = (np.subtract(*chart.distances(z + 1j * eps, pair)) - np.subtract(*chart.distances(z - 1j * eps, pair))) / (2 * eps)
            g2 = dhx ** 2 + dhy ** 2
            step = np.where(g2 > 0, h / g2, 0) * (dhx + 1j * dhy)
        step = np.where(np.isfinite(step) & (np.abs(step) < cell), step, 0)
        z = z - step
    return z


# ---------------------------------------------------------------------------
# pointwise quantities
# ---------------------------------------------------------------------------

def _site_list(chart, ppl, s=None):
    return ppl if isinstance(ppl, list) else chart.sites_for(ppl, s)


def critical_radius(chart: CoverChart, ppl, z, s: Scenario | None = None) -> float:
    """Flat distance from z to the nearest developed PPL lift."""
    sites = _site_list(chart, ppl, s)
    if not sites:
        return math.inf
    return float(np.min(chart.distances(np.asarray([z]), sites)))


def voronoi_index(chart: CoverChart, ppl, z, s: Scenario | None = None, rel_tol: float = 2.0 ** -26) -> int:
    """Number of developed PPL lifts at the minimal distance (1 at a PPL point by convention)."""
    sites = _site_list(chart, ppl, s)
    if not sites:
        return 0
    if chart.family == "TorusDz":
        w1, w2 = _lattice_vectors(chart.lattice)
        zr = complex(chart.lattice.reduce_float(z)) * chart.scale
        ds = [abs(zr - st.pos - (a * w1 + b * w2) * chart.scale) for st in sites for a in range(-2, 3) for b in range(-2, 3)]
    else:
        ds = list(chart.distances(np.asarray([z]), sites)[:, 0])
    m = min(ds)
    if m <= rel_tol:
        return 1
    return sum(1 for d in ds if d <= m * (1 + rel_tol))


# ---------------------------------------------------------------------------
# Cauchy measure
# ---------------------------------------------------------------------------

@dataclass(eq=False)
class CauchyEdgeMeasure:
    """Density |A-B| / (2 pi |P-A| |P-B|) along an edge, parameterized by Theta."""

    edge: Edge

    def __post_init__(self):
        if abs(self.edge.A - self.edge.B) == 0:
            raise InvalidEdge("degenerate edge with A = B")

    def density(self, P):
        A, B = self.edge.A, self.edge.B
        P = np.asarray(P, dtype=complex)
        return abs(A - B) / (2 * np.pi * np.abs(P - A) * np.abs(P - B))

    def cdf(self, t):
        return self.edge.theta(t) - self.edge.theta(self.edge.t0)

    @property
    def total(self) -> float:
        return self.edge.mass

    def mass_between(self, t0, t1) -> float:
        return float(self.edge.theta(t1) - self.edge.theta(t0))

    def theta_of(self, P, ctx=None):
        """Theta of the projection of P; ``ctx`` (an mpmath context) gives high precision."""
        e = self.edge
        if ctx is None:
            return float(e.theta(e.param(P)))
        A, B = ctx.mpc(e.A), ctx.mpc(e.B)
        M = (A + B) / 2
        u = 1j * (B - A) / abs(B - A)
        t = ((ctx.mpc(P) - M) * ctx.conj(u)).real
        return ctx.atan(t / (abs(B - A) / 2)) / ctx.pi


def cauchy_edge_measure(edge: Edge) -> CauchyEdgeMeasure:
    return CauchyEdgeMeasure(edge)


def edge_to_surface(chart: CoverChart, edge: Edge, t):
    """Map parameters on a developed edge back to the surface (cone and plane charts)."""
    P = edge.point(t)
    if chart.family == "MonomialCone":
        if chart.apex_in_ppl:
            r = np.abs(P)
            alpha = edge.frame + np.angle(P)
            k = chart.k
            mod = (abs(k) * r / abs(chart.scale)) ** (1 / k)
            arg = (alpha - np.angle(chart.scale / k)) / k
            return mod * np.exp(1j * arg)
        k = chart.k
        base = (k * P / chart.scale).astype(complex) ** (1 / k)
        return np.concatenate([base * np.exp(2j * np.pi * m / k) for m in range(abs(k))])
    if chart.family in ("PlaneDz", "CyclicBranched", "TorusDz"):
        return P / chart.scale
    raise UnsupportedChart(f"no closed-form inverse for {chart.family}")
