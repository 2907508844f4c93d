"""Root-counting measures of iterates versus the predicted limit measure."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.spatial import cKDTree

from .elliptic import EllipticElement, wp_eval, wp_inverse
from .exactalg import INF, InvalidInput, context, poly_gcd
from .flatgeo import CauchyEdgeMeasure, CoverChart, Edge, UnsupportedChart, VoronoiDiagram, edge_to_surface
from .ppl import omega_poles, principal_polar_locus
from .roots import Root, RootSet, poly_roots
from .scenarios import IterateState, RootsOf, Scenario


@dataclass(frozen=True)
class Atom:
    point: object  # mpc / complex, INF, or a RootsOf label for symbolic points
    weight: Fraction
    label: str = ""
    symbolic: bool = False


@dataclass(frozen=True)
class EmpiricalMeasure:
    atoms: tuple
    total: Fraction
    scenario: str = ""
    n: int = 0
    degraded: bool = False

    def finite_atoms(self) -> list[Atom]:
        return [a for a in self.atoms if not a.symbolic]

    def mass_at(self, label: str) -> Fraction:
        return sum((a.weight for a in self.atoms if a.label == label), Fraction(0))

    def points(self) -> np.ndarray:
        return np.array([complex(a.point) for a in self.finite_atoms()], dtype=complex)


# ---------------------------------------------------------------------------
# zeros of an iterate
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IterateZeros:
    """Symbolic zero atoms (point key, order, count, label) plus numeric zeros."""

    symbolic: tuple
    numeric: RootSet
    Z: int


def iterate_zeros(s: Scenario, st: IterateState, precision: int | None = None) -> IterateZeros:
    """All zeros of T^n f: symbolic ones read from the divisor, the rest solved numerically."""
    prec = precision or s.precision
    symbolic = []
    residual = None
    for e in st.divisor.zeros():
        if isinstance(e.point, RootsOf) and e.point.label in ("residual numerator", "residual V_n", "resultant"):
            residual = e
        else:
            symbolic.append((e.point, e.order, e.count, _label(e.point)))
    if residual is None:
        return IterateZeros(tuple(symbolic), RootSet((), 0, True, prec), st.divisor.pole_total)
    poly = residual.point.poly
    rs = poly_roots(poly, prec)
    if s.kind == "Superelliptic":
        # each root in z carries ell points of the curve
        rs = RootSet(tuple(Root(r.value, r.multiplicity * s.ell, r.residual) for r in rs.roots),
                     rs.certified_count * s.ell, rs.certified, rs.precision)
    elif s.is_elliptic:
        rs = _elliptic_points(s, st.repr, rs, prec)
    return IterateZeros(tuple(symbolic), rs, st.divisor.pole_total)


def _label(p) -> str:
    if p is INF:
        return "inf"
    return str(p)


def _elliptic_points(s: Scenario, e: EllipticElement, rs: RootSet, prec: int) -> RootSet:
    """Lift resultant roots X to points z of the torus."""
    ctx = context(prec)
    a, b, _ = s.curve.scales(prec)
    both = _common_roots(e, prec)
    out = []
    for r in rs.roots:
        X = r.value
        z = wp_inverse(s.lattice, a * X, prec)
        n1x = e.n1.eval_big(X, ctx) if not e.n1.is_zero() else 0
        n0x = e.n0.eval_big(X, ctx)
        tol = ctx.mpf(2) ** (-prec // 4) * (1 + abs(X))
        if any(abs(X - g) <= tol for g in both) or abs(n1x) <= ctx.mpf(2) ** (-prec // 2) * (1 + abs(n0x)):
            # both points over X are zeros, each with half the resultant multiplicity
            k = max(1, r.multiplicity // 2)
            out.append(Root(z, k, r.residual))
            out.append(Root(_reduce(s, -z, ctx), k, r.residual))
            continue
        Y = -n0x / n1x
        _, wpp = wp_eval(s.lattice, z, prec)
        if abs(wpp - b * Y) > abs(wpp + b * Y):
            z = _reduce(s, -z, ctx)
        out.append(Root(z, r.multiplicity, r.residual))
    total = sum(r.multiplicity for r in out)
    return RootSet(tuple(out), total, rs.certified, rs.precision)


def _common_roots(e: EllipticElement, prec: int) -> list:
    """Roots X of gcd(n0, n1): both points over such X are zeros of n0 + n1 Y."""
    if e.n1.is_zero():
        return []
    try:
        g = e.n1.monic() if e.n0.is_zero() else poly_gcd(e.n0, e.n1)
    except InvalidInput:
        return []
    if g.degree < 1:
        return []
    return list(poly_roots(g, prec).values)


def _reduce(s, z, ctx):
    tau = s.lattice.tau(ctx)
    z = z - ctx.floor(z.imag / tau.imag + 0.5) * tau
    return z - ctx.floor(z.real + 0.5)


# ---------------------------------------------------------------------------
# empirical and predicted measures
# ---------------------------------------------------------------------------

def empirical_measure(s: Scenario, st: IterateState, zeros: IterateZeros | None = None,
                      normalization: str = "probability") -> EmpiricalMeasure:
    """Atoms at the zeros of T^n f, weighted by multiplicity (divided by Z_n for probability)."""
    zeros = zeros or iterate_zeros(s, st)
    Z = zeros.Z
    div = Fraction(1, Z) if normalization == "probability" and Z else Fraction(1)
    atoms = []
    for key, order, count, label in zeros.symbolic:
        atoms.append(Atom(key, order * count * div, label, True))
    for r in zeros.numeric.roots:
        atoms.append(Atom(r.value, r.multiplicity * div, "", False))
    total = sum((a.weight for a in atoms), Fraction(0))
    return EmpiricalMeasure(tuple(atoms), total, s.name, st.n, not zeros.numeric.certified)


@dataclass(frozen=True)
class AsymptoticMeasure:
    edges: tuple  # (edge, CauchyEdgeMeasure, weight)
    atoms: tuple  # (label, Fraction weight)
    A: int

    @property
    def edge_mass(self) -> float:
        return sum(w * cem.total for _, cem, w in self.edges)

    @property
    def total(self) -> float:
        return self.edge_mass + float(sum(w for _, w in self.atoms))


def asymptotic_measure(s: Scenario, diagram: VoronoiDiagram) -> AsymptoticMeasure:
    """mu / A on the diagram plus atoms (d_p - 1)/A at the poles of omega."""
    ppl = principal_polar_locus(s)
    if not ppl.points:
        raise UnsupportedChart("empty principal polar locus")
    A = ppl.A
    chart = diagram.chart
    sheets = chart.sheets if chart is not None else 1
    edges = tuple((e, CauchyEdgeMeasure(e), sheets / A) for e in diagram.edges)
    atoms = tuple((p.label, Fraction((p.d - 1) * p.count, A)) for p in omega_poles(s) if p.d > 1)
    return AsymptoticMeasure(edges, atoms, A)


# ---------------------------------------------------------------------------
# comparison with the diagram
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Projection:
    distances: np.ndarray
    pairs: tuple
    outlier_fraction: float
    eps: float


def _curve_cloud(diagram: VoronoiDiagram):
    pts, keys = [], []
    for key, polys in diagram.curves.items():
        for c in polys:
            c = _densify(c)
            pts.append(c)
            keys.extend([key] * len(c))
    if not pts:
        return np.zeros(0, dtype=complex), []
    return np.concatenate(pts), keys


def _densify(c: np.ndarray, step: float = 2e-3) -> np.ndarray:
    out = [c[:1]]
    for a, b in zip(c[:-1], c[1:]):
        k = max(1, int(math.ceil(abs(b - a) / step)))
        out.append(a + (b - a) * np.arange(1, k + 1) / k)
    return np.concatenate(out)


def project_to_diagram(em: EmpiricalMeasure | np.ndarray, diagram: VoronoiDiagram, eps_out: float = 0.05) -> Projection:
    """Distance from each finite atom to the traced diagram; outliers lie farther than eps_out."""
    pts = em.points() if isinstance(em, EmpiricalMeasure) else np.asarray(em, dtype=complex)
    if len(pts) == 0:
        return Projection(np.zeros(0), (), 0.0, eps_out)
    chart = diagram.chart
    if chart is not None and chart.family == "PlaneDz" and diagram.edges:
        return _project_planar(pts, diagram, eps_out)
    cloud, keys = _curve_cloud(diagram)
    if len(cloud) == 0:
        return Projection(np.full(len(pts), np.inf), tuple([None] * len(pts)), 1.0, eps_out)
    if chart is not None and chart.family in ("TorusDz", "WpCover"):
        lat = chart.lattice
        pts = lat.reduce_float(pts)
        cloud = lat.reduce_float(cloud)
        t = lat.tau_complex
        shifts = [a + b * t for a in (-1, 0, 1) for b in (-1, 0, 1)]
        cloud = np.concatenate([cloud + sh for sh in shifts])
        keys = keys * len(shifts)
    tree = cKDTree(np.column_stack([cloud.real, cloud.imag]))
    d, idx = tree.query(np.column_stack([pts.real, pts.imag]))
    pairs = tuple(keys[i] for i in idx)
    return Projection(d, pairs, float(np.mean(d > eps_out)), eps_out)


def _project_planar(pts: np.ndarray, diagram: VoronoiDiagram, eps_out: float) -> Projection:
    """Exact distance to the (possibly unbounded) straight edges of a planar diagram."""
    w = diagram.chart.forward(pts)
    scale = abs(diagram.chart.scale)
    best = np.full(len(pts), np.inf)
    pairs = [None] * len(pts)
    for e in diagram.edges:
        M, u = complex(e.M), complex(e.u)
        t = np.clip(((w - M) * np.conj(u)).real, e.t0, e.t1)
        d = np.abs(w - (M + t * u)) / scale
        for k in np.nonzero(d < best)[0]:
            pairs[k] = (e.i, e.j)
        best = np.minimum(best, d)
    return Projection(best, tuple(pairs), float(np.mean(best > eps_out)), eps_out)


@dataclass(frozen=True)
class EdgeComparison:
    thetas: tuple
    gaps: tuple
    sup_distance: float
    insufficient: bool = False


def compare_on_edge(points, cem: CauchyEdgeMeasure, ctx=None) -> EdgeComparison:
    """Empirical CDF of the Theta positions against the Cauchy CDF of the edge."""
    th = sorted((cem.theta_of(p, ctx) for p in points), key=float)
    if len(th) < 2:
        return EdgeComparison(tuple(th), (), math.nan, True)
    gaps = tuple(b - a for a, b in zip(th, th[1:]))
    e = cem.edge
    lo = float(e.theta(e.t0))
    total = cem.total
    n = len(th)
    sup = 0.0
    for k, t in enumerate(th):
        F = (float(t) - lo) / total
        sup = max(sup, abs(F - k / n), abs(F - (k + 1) / n))
    return EdgeComparison(tuple(th), gaps, sup, False)


def points_on_edge(points, edge: Edge, chart: CoverChart, tol: float = 0.05) -> list:
    """Atoms within ``tol`` of the surface image of a developed edge (plane and cone charts)."""
    t = np.linspace(*_finite_range(edge), 4001)
    curve = edge_to_surface(chart, edge, t)
    tree = cKDTree(np.column_stack([curve.real, curve.imag]))
    pc = np.array([complex(p) for p in points])
    d, _ = tree.query(np.column_stack([pc.real, pc.imag]))
    return [p for p, di in zip(points, d) if di <= tol]


def _finite_range(edge: Edge, far: float = 1e3):
    t0 = edge.t0 if math.isfinite(edge.t0) else -far * edge.h
    t1 = edge.t1 if math.isfinite(edge.t1) else far * edge.h
    return t0, t1


def mass_at_symbol(em: EmpiricalMeasure, key) -> Fraction:
    return sum((a.weight for a in em.atoms if a.symbolic and a.point == key), Fraction(0))


__all__ = [
    "Atom",
    "EmpiricalMeasure",
    "IterateZeros",
    "iterate_zeros",
    "empirical_measure",
    "AsymptoticMeasure",
    "asymptotic_measure",
    "Projection",
    "project_to_diagram",
    "EdgeComparison",
    "compare_on_edge",
    "points_on_edge",
    "mass_at_symbol",
]
