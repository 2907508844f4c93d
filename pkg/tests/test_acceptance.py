"""Acceptance suite: one PASS/FAIL line per criterion, printed as it runs and again in the summary.

Run alone with ``python tests/test_acceptance.py`` or ``pytest tests/test_acceptance.py -v``.
"""
import math
import time
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from scipy.spatial import cKDTree

from shires.exactalg import INF, GaussianRational as GR, Poly, context
from shires.flatgeo import CauchyEdgeMeasure, chart_for, developed_voronoi
from shires.measures import compare_on_edge, empirical_measure, iterate_zeros, project_to_diagram
from shires.ppl import growth_audit, omega_poles, principal_polar_locus
from shires.reconstruct import delaunay_dual, gluing_report, periods
from shires.roots import poly_roots
from shires.scenarios import circle_polys, iterate, preset, trajectory
from shires.spectral import SingularTerm, detect_edges, hausdorff, orlov_validate, taylor_coeffs


def record(request, k, ok, detail):
    line = f"{'PASS' if ok else 'FAIL'} criterion {k}: {detail}"
    cfg = request.config
    if not hasattr(cfg, "acceptance_lines"):
        cfg.acceptance_lines = {}
    cfg.acceptance_lines[str(k)] = line
    tr = cfg.pluginmanager.get_plugin("terminalreporter")
    if tr is not None:
        tr.write_line("\n" + line)
    else:
        print(line)
    assert ok, line


def diagram(s, **kw):
    return developed_voronoi(chart_for(s), principal_polar_locus(s), s, **kw)


# 1 -------------------------------------------------------------------------

def tan_law(n, ctx):
    """Real zeros of the n-th derivative of 2i/(z^2+1): tan of theta on the shifted pi/(n+1) lattice."""
    shift = ctx.mpf(0) if n % 2 else ctx.mpf(1) / 2
    ks = range(-(n - 1) // 2, (n - 1) // 2 + 1) if n % 2 else range(-n // 2, n // 2)
    return [ctx.tan((k + shift) * ctx.pi / (n + 1)) for k in ks]


def test_c01_exact_zero_law(request):
    s = preset("first-example", 256)
    ctx = context(256)
    t0 = time.time()
    worst, simple = ctx.mpf(0), True
    for n in range(5, 41):
        zs = iterate_zeros(s, iterate(s, n), 256)
        roots = zs.numeric.roots
        simple &= len(roots) == n and all(r.multiplicity == 1 for r in roots)
        got = sorted(roots, key=lambda r: float(ctx.re(r.value)))
        want = tan_law(n, ctx)
        worst = max([worst] + [abs(r.value - w) for r, w in zip(got, want)])
    dt = time.time() - t0
    ok = simple and worst < 1e-20 and dt < 60
    record(request, 1, ok, f"n=5..40 simple={simple} max|root - tan(theta)|={mpmath.nstr(worst, 3)} time={dt:.1f}s")


# 2 -------------------------------------------------------------------------

def test_c02_order_at_infinity(request):
    s = preset("first-example")
    bad = [st.n for st in trajectory(s, 40) if st.divisor.order_at(INF) != st.n + 2]
    record(request, 2, not bad, f"ord_inf = n+2 for n=0..40, mismatches={bad}")


# 3 -------------------------------------------------------------------------

def test_c03_growth_constant(request):
    parts, ok = [], True
    for name, A, n_max in (("first-example", 2, 30), ("monomial", 4, 30), ("torus-wp", 6, 12)):
        audit = growth_audit(preset(name), n_max)
        good = audit.A == A and audit.holds()
        ok &= good
        parts.append(f"{name}: A={audit.A} stable from n={audit.stabilization}")
    record(request, 3, ok, "; ".join(parts))


# 4 -------------------------------------------------------------------------

def test_c04_zero_order_at_pole_of_omega(request):
    s = preset("monomial")
    (op,) = omega_poles(s)
    bs = {st.divisor.order_at(op.key) - 3 * st.n for st in trajectory(s, 60) if st.n >= 5}
    record(request, 4, len(bs) == 1, f"ord_0 - 3n over n=5..60 takes values {sorted(bs)}")


# 5 -------------------------------------------------------------------------

def test_c05_cauchy_equal_spacing(request):
    s = preset("first-example", 256)
    D = diagram(s, region=(-4, 4, -2, 2), grid=64)
    ctx = context(256)
    worst = ctx.mpf(0)
    for n in (11, 21, 31):
        em = empirical_measure(s, iterate(s, n))
        cmp = compare_on_edge([a.point for a in em.finite_atoms()], CauchyEdgeMeasure(D.edges[0]), ctx)
        worst = max([worst] + [abs(g - ctx.mpf(1) / (n + 1)) for g in cmp.gaps])
    record(request, 5, worst < 1e-18, f"max |gap - 1/(n+1)| over n=11,21,31 is {mpmath.nstr(worst, 3)}")


# 6 -------------------------------------------------------------------------

def test_c06_mass_split(request):
    s = preset("first-example")
    exact = True
    for n in (1, 5, 10, 20, 40):
        em = empirical_measure(s, iterate(s, n))
        exact &= em.mass_at("inf") == Fraction(n + 2, 2 * n + 2) and em.total == 1
    m40 = empirical_measure(s, iterate(s, 40)).mass_at("inf")
    ok = exact and abs(float(m40) - 0.5) < 0.02
    record(request, 6, ok, f"mass at inf exact={exact}; n=40 mass={m40} |mass-1/2|={abs(float(m40) - 0.5):.4f}")


# 7 -------------------------------------------------------------------------

def monomial_curve():
    """Dense samples of Re(z^-3) = -1/2 on the branch through -1 (|arg z - pi| < pi/6)."""
    th = np.pi + np.linspace(-np.pi / 6, np.pi / 6, 200001)[1:-1]
    r = (-2 * np.cos(3 * th)) ** (1 / 3)
    keep = r < 50
    return r[keep] * np.exp(1j * th[keep])


def test_c07_lemniscate_limit_set(request):
    s = preset("monomial")
    t0 = time.time()
    st = iterate(s, 90)
    em = empirical_measure(s, st, iterate_zeros(s, st))
    D = diagram(s, grid=512)
    frac_zeros = 1 - project_to_diagram(em, D, 0.05).outlier_fraction
    curve = monomial_curve()
    tree = cKDTree(np.column_stack([curve.real, curve.imag]))
    pb = D.curve_points()
    d, _ = tree.query(np.column_stack([pb.real, pb.imag]))
    frac_pull = float(np.mean(d <= 0.05))
    dt = time.time() - t0
    ok = frac_zeros >= 0.99 and frac_pull >= 0.99 and dt < 300
    record(request, 7, ok, f"n=90 zeros within 0.05: {frac_zeros:.2%}; pullback within 0.05 of the curve: "
                           f"{frac_pull:.2%}; time={dt:.0f}s")


# 8 -------------------------------------------------------------------------

def test_c08_circle_roots_imaginary(request):
    U = circle_polys(60)
    worst = 0.0
    for p in U:
        if p.degree < 1:  # U_2 = 1
            continue
        out = poly_roots(p, 512)
        with mpmath.workprec(512):
            worst = max([worst] + [float(abs(mpmath.re(v))) for v in out.values])
    record(request, 8, worst < 1e-25, f"max |Re root| of U_1..U_60 at 512 bits is {worst:.2e}")


# 9 -------------------------------------------------------------------------

def test_c09_superelliptic_degree(request):
    s = preset("superelliptic")
    P = Poly([2, 1]) * Poly([GR(0, -2), 1])
    Q = Poly([-1, 0, 0, 1])
    assert s.P == P and s.Q == Q and s.ell == 3
    bad = [st.n for st in trajectory(s, 100) if st.n >= 1 and st.repr.degree != 4 * st.n]
    record(request, 9, not bad, f"deg V_n = 4n for n=1..100, mismatches={bad}")


# 10 ------------------------------------------------------------------------

def test_c10_radius_convergence(request):
    s = preset("first-example")
    rng = np.random.default_rng(2024)
    z = rng.uniform(-2, 2, 20) + 1j * rng.choice([-1, 1], 20) * rng.uniform(0.2, 1.5, 20)
    worst400, improved = 0.0, True
    for zi in z:
        tr = taylor_coeffs(s, complex(zi), 400)
        rho = min(abs(zi - 1j), abs(zi + 1j))
        with mpmath.workprec(tr.precision):
            err = {n: abs(float(abs(tr.coeffs[n]) ** (-mpmath.mpf(1) / n)) - rho) / rho for n in (100, 400)}
        improved &= err[400] < err[100]
        worst400 = max(worst400, err[400])
    ok = improved and worst400 < 0.05
    record(request, 10, ok, f"20 points: n=400 beats n=100 everywhere={improved}; max rel err at n=400 {worst400:.2e}")


# 11 ------------------------------------------------------------------------

@pytest.mark.parametrize("name", ["first-example", "torus-dz", "monomial"])
def test_c11_spectral_geometric_cross_validation(request, name):
    s = preset(name)
    D = diagram(s, grid=512)
    region = D.chart.default_region(list(D.sites))
    t0 = time.time()
    ec = detect_edges(s, region, N=256, grid=512, coarse=64)
    H = hausdorff(ec.points, D.curve_points()) / ec.cell
    record(request, f"11 ({name})", H <= 2, f"Hausdorff {H:.2f} cells on 512^2 (limit 2), {time.time() - t0:.0f}s")


# 12 ------------------------------------------------------------------------

def test_c12_empty_diagram(request):
    s = preset("counterexample")
    D = diagram(s, grid=128)
    ec = detect_edges(s, D.chart.default_region(list(D.sites)), N=256, grid=128, coarse=32)
    only_inf = True
    for n in (5, 10, 20, 30):
        zs = iterate_zeros(s, iterate(s, n))
        only_inf &= len(zs.numeric) == 0 and all(k is INF for k, *_ in zs.symbolic)
        em = empirical_measure(s, iterate(s, n), zs)
        only_inf &= em.mass_at("inf") == 1
    ok = D.is_empty() and len(ec.points) == 0 and only_inf
    record(request, 12, ok, f"geometric diagram empty={D.is_empty()}; spectral edge points={len(ec.points)}; "
                            f"zeros only at inf={only_inf}")


# 13 ------------------------------------------------------------------------

def test_c13_orlov(request):
    lead = -1 / (2 * math.sqrt(math.pi))
    rep = orlov_validate([SingularTerm(1, Fraction(1, 2))], 100000)
    rel = abs(rep.leading.real - lead) / abs(lead)
    pole = orlov_validate([SingularTerm(1, -1)], 2000)
    ok = rel < 0.01 and pole.exact
    record(request, 13, ok, f"sqrt: extrapolated c_k k^1.5 off by {rel:.2e} (limit 1e-2); pole exact={pole.exact}")


# 14 ------------------------------------------------------------------------

def test_c14_reconstruction(request):
    s = preset("torus-wp")
    D = diagram(s, trace=False)
    conns = delaunay_dual(D)
    pers = periods(s, D, conns)
    rep = gluing_report(s, D, conns, pers)
    tri = [f for f in rep.faces if f.sides == 3]
    hexa = [f for f in rep.faces if f.sides == 6]
    sides = [abs(pers[h.conn].value) for f in tri for h in f.half_edges]
    side_spread = (max(sides) - min(sides)) / max(sides)
    hex_err = max(abs(a - 5 * math.pi / 3) for f in hexa for a in f.angles)
    cone_err = max(abs(v - 4 * math.pi) for v in rep.cone_angles.values())
    gb = abs(rep.gauss_bonnet - rep.expected_gauss_bonnet)
    ok = (rep.face_sizes() == [3, 3, 6] and side_spread < 1e-6 and hex_err < 1e-6 and cone_err < 1e-6
          and gb < 1e-6 and rep.expected_gauss_bonnet == 0)
    record(request, 14, ok, f"faces={rep.face_sizes()} side spread={side_spread:.1e} hexagon angle err={hex_err:.1e} "
                            f"cone err={cone_err:.1e} Gauss-Bonnet err={gb:.1e}")


# 15 ------------------------------------------------------------------------

def test_c15_torus_figures(request):
    s = preset("torus-dz")
    D = diagram(s, grid=512)
    em = empirical_measure(s, iterate(s, 25))
    frac25 = 1 - project_to_diagram(em, D, 0.05).outlier_fraction
    t0 = time.time()
    st = iterate(s, 45)
    em45 = empirical_measure(s, st, iterate_zeros(s, st))
    frac45 = 1 - project_to_diagram(em45, diagram(s, grid=512), 0.05).outlier_fraction
    dt = time.time() - t0
    ok = frac25 >= 0.95 and dt < 600
    record(request, 15, ok, f"n=25 within 0.05: {frac25:.2%} (limit 95%); n=45 run {dt:.0f}s, "
                            f"within 0.05: {frac45:.2%}")


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-v"]))
