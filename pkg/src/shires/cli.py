"""Command line, reproducible pipelines and figure generation."""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import logging
import math
import sys
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction
from pathlib import Path

import mpmath
import numpy as np

from .elliptic import NearPole
from .exactalg import InvalidInput, context
from .flatgeo import UnsupportedChart, chart_for, critical_radius, developed_voronoi
from .measures import (
    CauchyEdgeMeasure,
    asymptotic_measure,
    compare_on_edge,
    empirical_measure,
    iterate_zeros,
    project_to_diagram,
)
from .ppl import principal_polar_locus
from .reconstruct import DegenerateEdge, PathThroughPole, delaunay_dual, gluing_report, periods
from .roots import BoundaryZero
from .scenarios import PRESETS, ResourceExhausted, UnsupportedScenario, iterate, preset, scenario_from_dict
from .spectral import SingularTerm, detect_edges, hausdorff, orlov_validate, scan_points

log = logging.getLogger("shires")

STEPS = ("iterate", "roots", "ppl", "voronoi", "measure", "spectral-scan", "reconstruct", "orlov-check")
REQUIRES = {
    "iterate": (),
    "roots": ("iterate",),
    "ppl": (),
    "voronoi": ("ppl",),
    "measure": ("roots", "voronoi"),
    "spectral-scan": ("voronoi",),
    "reconstruct": ("voronoi",),
    "orlov-check": (),
}
FIGURES = ("first-ex", "trefoil", "torus1", "torus2", "delaunay")

EXIT_OK, EXIT_CONFIG, EXIT_CERT = 0, 2, 3


class ConfigError(ValueError):
    """Invalid pipeline configuration."""


class CertificationError(RuntimeError):
    """A numerical result failed its certificate or acceptance check."""


CONFIG_ERRORS = (ConfigError, InvalidInput, UnsupportedScenario, UnsupportedChart, KeyError)
NUMERIC_ERRORS = (CertificationError, BoundaryZero, ResourceExhausted, NearPole, DegenerateEdge, PathThroughPole)


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridConfig:
    size: int = 512  # cells per side for tracing and edge detection
    coarse: int = 64
    N: int = 256  # Taylor coefficients per grid point


@dataclass(frozen=True)
class PipelineConfig:
    scenario: str  # preset name or path to a JSON scenario file
    steps: tuple = ("iterate", "roots", "ppl", "voronoi", "measure")
    n: int = 20
    out: str = "shires-out"
    precision: int | None = None
    grid: GridConfig = field(default_factory=GridConfig)
    seed: int = 0
    eps: float = 0.05  # tube radius of the projection test
    orlov_K: int = 100000

    def validate(self) -> None:
        seen = []
        for st in self.steps:
            if st not in STEPS:
                raise ConfigError(f"unknown step {st!r}; valid steps: {', '.join(STEPS)}")
            missing = [r for r in REQUIRES[st] if r not in seen]
            if missing:
                raise ConfigError(f"step {st!r} needs {', '.join(missing)} earlier in the list")
            seen.append(st)
        if self.n < 0:
            raise ConfigError("n must be nonnegative")
        if self.grid.size % self.grid.coarse:
            raise ConfigError("grid size must be a multiple of the coarse grid")
        if self.precision is not None and self.precision < 64:
            raise ConfigError("precision must be at least 64 bits")

    @classmethod
    def from_dict(cls, d: dict) -> "PipelineConfig":
        d = dict(d)
        if "scenario" not in d:
            raise ConfigError("config needs a 'scenario'")
        grid = GridConfig(**d.pop("grid", {}))
        steps = tuple(d.pop("steps", cls.steps))
        unknown = set(d) - {f for f in cls.__dataclass_fields__}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(steps=steps, grid=grid, **d)


def closure(step: str) -> tuple:
    """The step and everything it depends on, in dependency order."""
    need = set()

    def add(s):
        for r in REQUIRES[s]:
            add(r)
        need.add(s)

    add(step)
    return tuple(s for s in STEPS if s in need)


def load(cfg: PipelineConfig):
    name = cfg.scenario
    if name in PRESETS:
        return preset(name, cfg.precision)
    p = Path(name)
    if not p.exists():
        raise ConfigError(f"no scenario file or preset named {name!r}; presets: {', '.join(sorted(PRESETS))}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"scenario file is not valid JSON: {exc}") from exc
    if cfg.precision:
        data["precision"] = cfg.precision
    data.setdefault("name", p.stem)
    return scenario_from_dict(data)


# ---------------------------------------------------------------------------
# deterministic writers
# ---------------------------------------------------------------------------

def _dps(prec: int) -> int:
    return max(17, int(prec * math.log10(2)) + 2)


def _num(x, dps: int) -> str:
    if isinstance(x, (mpmath.mpf, mpmath.mpc)) or hasattr(x, "_mpf_") or hasattr(x, "_mpc_"):
        return mpmath.nstr(x, dps, strip_zeros=False)
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_csv(path: Path, header: list, rows, precision: int | None = None, comment: str = "") -> Path:
    """CSV with a leading comment recording the working precision."""
    buf = io.StringIO()
    if precision is not None:
        buf.write(f"# precision_bits={precision}\n")
    if comment:
        buf.write(f"# {comment}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow(r)
    path.write_text(buf.getvalue())
    return path


def _re_im(z, dps):
    if hasattr(z, "real") and hasattr(z, "imag") and not isinstance(z, complex):
        return _num(z.real, dps), _num(z.imag, dps)
    z = complex(z)
    return repr(z.real), repr(z.imag)


# canonical styling of all figures
STYLE = {
    "edge": 'fill="none" stroke="#d62728" stroke-width="1.2"',
    "cloud": 'fill="#2ca02c" fill-opacity="0.6"',
    "zero": 'fill="#1f3a93"',
    "site": 'fill="#ff7f0e" stroke="#000000" stroke-width="0.5"',
    "conn": 'fill="none" stroke="#555555" stroke-width="1" stroke-dasharray="4,3"',
    "text": 'font-family="monospace" font-size="9" fill="#333333"',
    "frame": 'fill="#ffffff" stroke="#999999" stroke-width="0.8"',
}


def write_svg(path: Path, region, layers, title: str, size: int = 640) -> Path:
    """Minimal SVG plot: ``layers`` holds (kind, data, style key) with kind in polyline, dots, text."""
    x0, x1, y0, y1 = region
    sx = size / (x1 - x0)
    h = int(round((y1 - y0) * sx))

    def px(z):
        return (z.real - x0) * sx, (y1 - z.imag) * sx

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{h + 20}" viewBox="0 0 {size} {h + 20}">',
           f'<rect x="0" y="0" width="{size}" height="{h}" {STYLE["frame"]}/>',
           f'<text x="4" y="{h + 14}" {STYLE["text"]}>{title}</text>']
    for kind, data, style in layers:
        if kind == "polyline":
            for line in data:
                pts = " ".join("%.3f,%.3f" % px(z) for z in line if np.isfinite(z))
                if pts:
                    out.append(f'<polyline points="{pts}" {STYLE[style]}/>')
        elif kind == "dots":
            r = 3.0 if style == "site" else 1.6
            for z in data:
                if np.isfinite(z) and x0 <= z.real <= x1 and y0 <= z.imag <= y1:
                    out.append('<circle cx="%.3f" cy="%.3f" r="%.1f" %s/>' % (*px(z), r, STYLE[style]))
        elif kind == "text":
            for z, s in data:
                out.append('<text x="%.3f" y="%.3f" %s>%s</text>' % (*px(z), STYLE[style], s))
    out.append("</svg>")
    path.write_text("\n".join(out) + "\n")
    return path


def sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# pipeline steps
# ---------------------------------------------------------------------------

class _Run:
    def __init__(self, cfg: PipelineConfig, out: Path):
        self.cfg = cfg
        self.out = out
        self.s = load(cfg)
        self.prec = self.s.precision
        self.dps = _dps(self.prec)
        self.summary: dict = {}
        self.checks: dict = {}
        self.files: list = []
        self.data: dict = {}

    def file(self, name: str) -> Path:
        p = self.out / name
        self.files.append(p)
        return p


def _step_iterate(r: _Run):
    st = iterate(r.s, r.cfg.n)
    r.data["state"] = st
    rows = [[r.cfg.n, str(e.point), e.chart, e.order, e.count] for e in st.divisor.entries]
    write_csv(r.file("divisor.csv"), ["n", "point", "chart", "order", "count"], rows)
    r.summary.update(n=st.n, Z=st.divisor.pole_total, divisor_degree=st.divisor.degree, zero_iterate=st.zero)


def _step_roots(r: _Run):
    z = iterate_zeros(r.s, r.data["state"], r.prec)
    r.data["zeros"] = z
    rows = []
    for root in z.numeric.roots:
        re, im = _re_im(root.value, r.dps)
        rows.append([re, im, root.multiplicity, "%.3e" % float(root.residual)])
    write_csv(r.file("roots.csv"), ["re", "im", "multiplicity", "residual"], rows, z.numeric.precision or r.prec)
    sym = [[str(k), o, c, lab] for k, o, c, lab in z.symbolic]
    write_csv(r.file("symbolic_zeros.csv"), ["point", "order", "count", "label"], sym)
    r.summary.update(numeric_zeros=len(z.numeric), certified=z.numeric.certified)
    r.checks["roots certified"] = bool(z.numeric.certified)
    if not z.numeric.certified:
        raise CertificationError("root finder could not certify every root")


def _step_ppl(r: _Run):
    rep = principal_polar_locus(r.s)
    r.data["ppl"] = rep
    rows = [[p.label, p.kind, p.chart, p.a, p.count] for p in rep.points]
    write_csv(r.file("ppl.csv"), ["label", "kind", "chart", "a", "count"], rows, comment=f"A={rep.A}")
    r.summary.update(A=rep.A, ppl=[p.label for p in rep.points])


def _step_voronoi(r: _Run):
    s, rep = r.s, r.data["ppl"]
    chart = chart_for(s)
    D = developed_voronoi(chart, rep, s, region=r.data.get("region"), grid=r.cfg.grid.size)
    r.data["diagram"] = D
    rows = [[e.i, e.j, repr(e.A.real), repr(e.A.imag), repr(e.B.real), repr(e.B.imag), repr(e.t0), repr(e.t1)]
            for e in D.edges]
    write_csv(r.file("voronoi_edges.csv"), ["i", "j", "A_re", "A_im", "B_re", "B_im", "t0", "t1"], rows,
              comment=f"chart={chart.family}")
    crows = []
    for (i, j), lines in sorted(D.curves.items()):
        for k, line in enumerate(lines):
            crows += [[i, j, k, "%.12g" % z.real, "%.12g" % z.imag] for z in line]
    write_csv(r.file("voronoi_curves.csv"), ["i", "j", "polyline", "re", "im"], crows)
    r.summary.update(chart=chart.family, edges=len(D.edges), empty=D.is_empty())
    if D.curves:
        lines = [c for cs in D.curves.values() for c in cs]
        region = _region_of(r)
        r.files.append(write_svg(r.out / "voronoi.svg", region,
                                 [("polyline", lines, "edge"), ("dots", _site_points(D), "site")],
                                 f"{s.name}: Voronoi pullback"))


def _step_measure(r: _Run):
    s, D = r.s, r.data["diagram"]
    em = empirical_measure(s, r.data["state"], r.data["zeros"])
    r.data["measure"] = em
    rows = []
    for a in em.atoms:
        if a.symbolic:
            rows.append(["", "", _num(a.weight, r.dps), a.label])
        else:
            re, im = _re_im(a.point, r.dps)
            rows.append([re, im, _num(a.weight, r.dps), a.label])
    write_csv(r.file("measure.csv"), ["re", "im", "weight", "label"], rows, r.prec)
    srows = [["total", _num(em.total, 0)]]
    for lab in sorted({a.label for a in em.atoms if a.symbolic}):
        srows.append([f"mass_at:{lab}", _num(em.mass_at(lab), 0)])
    if not D.is_empty():
        pr = project_to_diagram(em, D, r.cfg.eps)
        r.data["projection"] = pr
        am = asymptotic_measure(s, D)
        frac = 1 - pr.outlier_fraction
        srows += [["within_eps_fraction", "%.6f" % frac], ["eps", repr(r.cfg.eps)],
                  ["max_distance", "%.6e" % (pr.distances.max() if len(pr.distances) else 0.0)],
                  ["limit_edge_mass", "%.12f" % am.edge_mass], ["limit_total", "%.12f" % am.total]]
        r.summary.update(within_eps=round(frac, 6))
        if D.chart.family == "PlaneDz":
            _edge_tables(r, em, D, pr)
    write_csv(r.file("measure_summary.csv"), ["key", "value"], srows)
    r.summary.update(total_mass=str(em.total))


def _edge_tables(r: _Run, em, D, pr):
    """Theta positions, gaps and the sup-CDF distance for the atoms assigned to each edge."""
    atoms = em.finite_atoms()
    ctx = context(r.prec)
    for k, e in enumerate(D.edges):
        pts = [a.point for a, pair in zip(atoms, pr.pairs) if pair == (e.i, e.j)]
        cmp = compare_on_edge(pts, CauchyEdgeMeasure(e), ctx)
        gaps = list(cmp.gaps) + [""]
        rows = [[_num(t, r.dps), _num(g, r.dps) if g != "" else ""] for t, g in zip(cmp.thetas, gaps)]
        write_csv(r.file(f"edge{k}_theta.csv"), ["theta", "gap_to_next"], rows, r.prec,
                  comment=f"sites={e.i},{e.j} sup_cdf_distance={cmp.sup_distance!r}")


def _step_spectral(r: _Run):
    s, D, g = r.s, r.data["diagram"], r.cfg.grid
    region = r.data.get("region") or D.chart.default_region(list(D.sites))
    cloud = detect_edges(s, region, N=g.N, grid=g.size, coarse=g.coarse)
    rows = [["%.12g" % z.real, "%.12g" % z.imag] for z in np.sort_complex(cloud.points)]
    write_csv(r.file("edge_cloud.csv"), ["re", "im"], rows, comment=f"N={g.N} grid={g.size}")
    curve = D.curve_points()
    H = hausdorff(cloud.points, curve) / cloud.cell if len(cloud.points) and len(curve) else math.inf
    # seeded sample of basepoints for the radius estimate
    rng = np.random.default_rng(r.cfg.seed)
    x0, x1, y0, y1 = region
    zs = rng.uniform(x0, x1, 20) + 1j * rng.uniform(y0, y1, 20)
    res = scan_points(s, zs, g.N)
    rr = []
    for z, rho, fl in zip(zs, res.rho, res.flag):
        crit = critical_radius(D.chart, r.data["ppl"], z, s)
        rr.append(["%.12g" % z.real, "%.12g" % z.imag, "%.12g" % rho, "%.12g" % crit, int(fl)])
    write_csv(r.file("radius_sample.csv"), ["re", "im", "rho_hat", "rho_geometric", "edge_flag"], rr,
              comment=f"seed={r.cfg.seed} N={g.N}")
    r.summary.update(cloud_points=len(cloud.points), hausdorff_cells=round(H, 4))
    r.checks["edge cloud within 2 cells"] = bool(H <= 2)


def _step_reconstruct(r: _Run):
    s, D = r.s, r.data["diagram"]
    conns = delaunay_dual(D)
    pers = periods(s, D, conns)
    rep = gluing_report(s, D, conns, pers)
    r.data["gluing"] = (conns, pers, rep)
    rows = [[k, c.i, c.j, c.sheet, "%.15g" % p.value.real, "%.15g" % p.value.imag, "%.3e" % p.error]
            for k, (c, p) in enumerate(zip(conns, pers))]
    write_csv(r.file("saddle_connections.csv"), ["k", "i", "j", "sheet", "period_re", "period_im", "error"], rows)
    frows = [[f, len(face.half_edges), " ".join("%.12f" % (a / math.pi) for a in face.angles), "%.3e" % face.residual]
             for f, face in enumerate(rep.faces)]
    write_csv(r.file("faces.csv"), ["face", "sides", "angles_over_pi", "residual"], frows)
    crows = [[k, "%.12f" % (v / math.pi)] for k, v in sorted(rep.cone_angles.items())]
    crows.append(["gauss_bonnet_over_pi", "%.12f" % (rep.gauss_bonnet / math.pi)])
    crows.append(["expected_over_pi", "%.12f" % (rep.expected_gauss_bonnet / math.pi)])
    write_csv(r.file("cone_angles.csv"), ["vertex", "angle_over_pi"], crows)
    r.summary.update(faces=rep.face_sizes(), closed=rep.closed)
    r.files.append(_draw_delaunay(r, "reconstruct"))
    r.checks["faces close up"] = bool(rep.closed)
    r.checks["Gauss-Bonnet"] = bool(abs(rep.gauss_bonnet - rep.expected_gauss_bonnet) < 1e-6)


ORLOV_CASES = {
    "sqrt": ([SingularTerm(1, Fraction(1, 2))], -1 / (2 * math.sqrt(math.pi))),
    "pole": ([SingularTerm(1, -1)], 1.0),
    "invsqrt": ([SingularTerm(1, Fraction(-1, 2))], 1 / math.sqrt(math.pi)),
}


def _step_orlov(r: _Run):
    rows = []
    for name, (terms, lead) in ORLOV_CASES.items():
        K = r.cfg.orlov_K if name != "pole" else min(r.cfg.orlov_K, 2000)
        rep = orlov_validate(terms, K)
        for k, e in zip(rep.ks, rep.relative_errors):
            rows.append([name, k, "%.6e" % e])
        rel = abs(rep.leading.real - lead) / abs(lead)
        r.summary[f"orlov_{name}_leading"] = "%.12g" % rep.leading.real
        r.checks[f"orlov {name}"] = bool(rep.exact if name == "pole" else rel < 0.01)
    write_csv(r.file("orlov.csv"), ["case", "k", "relative_error"], rows, 160)


STEP_FUNCS = {
    "iterate": _step_iterate,
    "roots": _step_roots,
    "ppl": _step_ppl,
    "voronoi": _step_voronoi,
    "measure": _step_measure,
    "spectral-scan": _step_spectral,
    "reconstruct": _step_reconstruct,
    "orlov-check": _step_orlov,
}


def _manifest(out: Path, cfg: PipelineConfig, status: str, done, files, summary, checks, error=None) -> dict:
    m = {
        "config": _cfg_dict(cfg),
        "status": status,
        "completed_steps": list(done),
        "files": [{"path": p.name, "sha256": sha256(p)} for p in files if p.exists()],
        "summary": summary,
        "checks": checks,
    }
    if error is not None:
        m["error"] = error
    out.mkdir(parents=True, exist_ok=True)
    (out / "manifest.json").write_text(json.dumps(m, indent=2, sort_keys=True, default=str) + "\n")
    return m


def _cfg_dict(cfg: PipelineConfig) -> dict:
    d = asdict(cfg)
    d["steps"] = list(cfg.steps)
    return d


def run_pipeline(cfg: PipelineConfig, extra=None) -> dict:
    """Run the configured steps; the manifest records files, checks and any failure."""
    out = Path(cfg.out)
    try:
        cfg.validate()
        run = _Run(cfg, out)
    except CONFIG_ERRORS as exc:
        return _manifest(out, cfg, "config-error", [], [], {}, {},
                         {"step": None, "type": type(exc).__name__, "message": str(exc)})
    out.mkdir(parents=True, exist_ok=True)
    if extra:
        run.data.update(extra)
    done = []
    for st in cfg.steps:
        log.info("step %s", st)
        try:
            STEP_FUNCS[st](run)
        except CONFIG_ERRORS + NUMERIC_ERRORS as exc:
            kind = "config-error" if isinstance(exc, CONFIG_ERRORS) else "certification-failure"
            m = _manifest(out, cfg, kind, done, run.files, run.summary, run.checks,
                          {"step": st, "type": type(exc).__name__, "message": str(exc)})
            m["_run"] = run
            return m
        done.append(st)
    status = "ok" if all(run.checks.values()) else "check-failed"
    m = _manifest(out, cfg, status, done, run.files, run.summary, run.checks)
    m["_run"] = run
    return m


def exit_code(manifest: dict) -> int:
    st = manifest["status"]
    if st == "ok":
        return EXIT_OK
    if st == "config-error":
        return EXIT_CONFIG
    return EXIT_CERT


# ---------------------------------------------------------------------------
# figures
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FigureSpec:
    scenario: str
    n: int
    fast_n: int
    steps: tuple
    region: tuple | None = None


FIGURE_SPECS = {
    "first-ex": FigureSpec("first-example", 40, 20, ("iterate", "roots", "ppl", "voronoi", "measure"), (-4, 4, -2, 2)),
    "trefoil": FigureSpec("monomial", 90, 40, ("iterate", "roots", "ppl", "voronoi", "measure")),
    "torus1": FigureSpec("torus-dz", 45, 20, ("iterate", "roots", "ppl", "voronoi", "measure")),
    "torus2": FigureSpec("torus-wp", 25, 20, ("iterate", "roots", "ppl", "voronoi", "measure")),
    "delaunay": FigureSpec("torus-wp", 0, 0, ("ppl", "voronoi", "reconstruct")),
}


def figure(name: str, out: str = "figures", fast: bool = False, precision: int | None = None, seed: int = 0,
           grid: int = 512, n: int | None = None) -> dict:
    """Regenerate the data and SVG of a named figure; the manifest records its acceptance checks."""
    if name not in FIGURE_SPECS:
        raise ConfigError(f"unknown figure {name!r}; valid names: {', '.join(FIGURES)}")
    spec = FIGURE_SPECS[name]
    nn = n if n is not None else (spec.fast_n if fast else spec.n)
    cfg = PipelineConfig(spec.scenario, spec.steps, nn, str(Path(out) / name), precision,
                         GridConfig(grid, min(64, grid)), seed)
    extra = {"region": spec.region} if spec.region else None
    m = run_pipeline(cfg, extra)
    run = m.pop("_run", None)
    if run is None or m["status"] in ("config-error", "certification-failure"):
        return m
    checks = dict(m["checks"])
    checks.update(_FIGURE_CHECKS[name](run))
    svg = _FIGURE_DRAW[name](run, name)
    run.files.append(svg)
    status = "ok" if all(checks.values()) else "check-failed"
    m = _manifest(Path(cfg.out), cfg, status, cfg.steps, run.files, run.summary, checks)
    return m


def _check_first(run: _Run) -> dict:
    em, D, n = run.data["measure"], run.data["diagram"], run.cfg.n
    ctx = context(run.prec)
    cmp = compare_on_edge([a.point for a in em.finite_atoms()], CauchyEdgeMeasure(D.edges[0]), ctx)
    gap = max(abs(g - ctx.mpf(1) / (n + 1)) for g in cmp.gaps)
    pr = run.data["projection"]
    return {"roots on the real line": bool(pr.distances.max() < 1e-20),
            "Theta gaps equal 1/(n+1)": bool(gap < 1e-18),
            "mass at infinity (n+2)/(2n+2)": em.mass_at("inf") == Fraction(n + 2, 2 * n + 2)}


def _tube(threshold):
    def check(run: _Run) -> dict:
        frac = 1 - run.data["projection"].outlier_fraction
        return {f"{threshold:.0%} of zeros within {run.cfg.eps}": bool(frac >= threshold)}
    return check


def _check_delaunay(run: _Run) -> dict:
    conns, pers, rep = run.data["gluing"]
    sizes = rep.face_sizes()
    tri = [f for f in rep.faces if f.sides == 3]
    hexa = [f for f in rep.faces if f.sides == 6]
    sides = [abs(pers[h.conn].value) for f in tri for h in f.half_edges]
    ok_sides = bool(sides) and (max(sides) - min(sides)) / max(sides) < 1e-6
    ok_hex = bool(hexa) and all(abs(a - 5 * math.pi / 3) < 1e-6 for a in hexa[0].angles)
    ok_cone = all(abs(v - 4 * math.pi) < 1e-6 for v in rep.cone_angles.values())
    return {"two triangles and one hexagon": sizes == [3, 3, 6], "equal triangle sides": ok_sides,
            "hexagon angles 5pi/3": ok_hex, "cone angles 4pi": ok_cone}


_FIGURE_CHECKS = {
    "first-ex": _check_first,
    "trefoil": _tube(0.99),
    "torus1": _tube(0.95),
    "torus2": _tube(0.95),
    "delaunay": _check_delaunay,
}


def _region_of(run: _Run):
    D = run.data["diagram"]
    return run.data.get("region") or D.chart.default_region(list(D.sites))


def _site_points(D):
    return [st.z for st in D.sites if st.z is not None]


def _draw_overlay(run: _Run, name: str) -> Path:
    D, em = run.data["diagram"], run.data["measure"]
    region = _region_of(run)
    lines = [c for cs in D.curves.values() for c in cs]
    layers = [("polyline", lines, "edge"), ("dots", list(em.points()), "zero"),
              ("dots", _site_points(D), "site")]
    if name == "first-ex":
        n = run.cfg.n
        pts = sorted(em.points(), key=lambda z: z.real)
        ann = [(complex(z.real, 0.15), "%d/%d" % (round((math.atan(z.real) / math.pi) * 2 * (n + 1)), 2 * (n + 1)))
               for z in pts[::4] if region[0] <= z.real <= region[1]]
        layers.append(("text", ann, "text"))
    title = f"{run.s.name} n={run.cfg.n}: zeros (blue), Voronoi pullback (red), sites (orange)"
    return write_svg(run.out / f"{name}.svg", region, layers, title)


def _draw_delaunay(run: _Run, name: str) -> Path:
    conns, pers, rep = run.data["gluing"]
    D = run.data["diagram"]
    segs = [[c.start, c.end] for c in conns]
    pts = [c.start for c in conns] + [c.end for c in conns]
    vor = []
    for e in D.edges:
        t0 = e.t0 if math.isfinite(e.t0) else -10 * e.h
        t1 = e.t1 if math.isfinite(e.t1) else 10 * e.h
        vor.append([e.point(t0), e.point(t1)])
    xs = [p.real for p in pts]
    ys = [p.imag for p in pts]
    pad = 0.15 * max(max(xs) - min(xs), max(ys) - min(ys))
    region = (min(xs) - pad, max(xs) + pad, min(ys) - pad, max(ys) + pad)
    lab = [((c.start + c.end) / 2, "%.4f" % abs(p.value)) for c, p in zip(conns, pers) if c.sheet == 0]
    layers = [("polyline", vor, "edge"), ("polyline", segs, "conn"), ("dots", [st.pos for st in D.sites], "site"),
              ("text", lab, "text")]
    title = "developed wp-plane: Voronoi edges (red), saddle connections (dashed), faces " + str(rep.face_sizes())
    return write_svg(run.out / f"{name}.svg", region, layers, title)


_FIGURE_DRAW = {
    "first-ex": _draw_overlay,
    "trefoil": _draw_overlay,
    "torus1": _draw_overlay,
    "torus2": _draw_overlay,
    "delaunay": _draw_delaunay,
}


# ---------------------------------------------------------------------------
# command line
# ---------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser, scenario: bool = True):
    if scenario:
        p.add_argument("scenario", help="preset name or JSON scenario file")
    p.add_argument("--precision", type=int, default=None, help="working precision in bits")
    p.add_argument("--n", type=int, default=None, help="iteration count")
    p.add_argument("--grid", type=int, default=None, help="grid cells per side")
    p.add_argument("--fast", action="store_true", help="desk-scale parameters")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--seed", type=int, default=0, help="random seed")
    p.add_argument("-v", "--verbose", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="shires", description="Zeros of iterated derivatives T f = df/omega "
                                 "and the Voronoi diagrams of the flat metric |omega|.")
    sub = ap.add_subparsers(dest="cmd", required=True)
    for st in STEPS:
        p = sub.add_parser(st, help=f"run the {st} step (and the steps it needs)")
        _common(p, scenario=st != "orlov-check")
        if st == "orlov-check":
            p.add_argument("--K", type=int, default=None, help="largest coefficient index")
    p = sub.add_parser("figure", help="regenerate a named figure")
    p.add_argument("name", help=f"one of {', '.join(FIGURES)}")
    _common(p, scenario=False)
    p = sub.add_parser("run", help="run a pipeline from a JSON config")
    p.add_argument("config")
    _common(p, scenario=False)
    return ap


def _print(m: dict, stream=None) -> None:
    stream = stream or sys.stdout
    print(f"status: {m['status']}", file=stream)
    for k, v in m.get("summary", {}).items():
        print(f"  {k}: {v}", file=stream)
    for k, v in m.get("checks", {}).items():
        print(f"  [{'PASS' if v else 'FAIL'}] {k}", file=stream)
    if "error" in m:
        e = m["error"]
        print(f"  error in step {e['step']}: {e['type']}: {e['message']}", file=stream)
    for f in m.get("files", []):
        print(f"  wrote {f['path']} {f['sha256'][:16]}", file=stream)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.cmd == "figure":
            m = figure(args.name, args.out or "figures", args.fast, args.precision, args.seed,
                       args.grid or (128 if args.fast else 512), args.n)
        elif args.cmd == "run":
            try:
                data = json.loads(Path(args.config).read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise ConfigError(f"cannot read config: {exc}") from exc
            cfg = PipelineConfig.from_dict(data)
            cfg = _override(cfg, args)
            m = run_pipeline(cfg)
        else:
            scen = getattr(args, "scenario", "first-example")
            cfg = PipelineConfig(scen, closure(args.cmd), out=args.out or "shires-out")
            cfg = _override(cfg, args)
            if args.cmd == "orlov-check" and args.K:
                cfg = replace(cfg, orlov_K=args.K)
            m = run_pipeline(cfg)
    except CONFIG_ERRORS as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    m.pop("_run", None)
    _print(m)
    return exit_code(m)


def _override(cfg: PipelineConfig, args) -> PipelineConfig:
    kw = {}
    if args.precision is not None:
        kw["precision"] = args.precision
    if args.n is not None:
        kw["n"] = args.n
    if args.out is not None:
        kw["out"] = args.out
    if args.seed:
        kw["seed"] = args.seed
    g = cfg.grid
    if args.grid is not None:
        g = replace(g, size=args.grid, coarse=min(g.coarse, args.grid))
    if args.fast:
        g = replace(g, size=min(g.size, 128), coarse=min(g.coarse, 32))
        kw["orlov_K"] = min(cfg.orlov_K, 10000)
    kw["grid"] = g
    return replace(cfg, **kw)


if __name__ == "__main__":
    sys.exit(main())
