"""Chart-free recovery of radii, singularities and edges from Taylor coefficients.

The n-th coefficient at a basepoint z is c_n = T^n f(z) / n!.  These are the
Taylor coefficients of g_z(t) = f(psi(t)), where psi is the flow of the vector
field 1/omega started at z, so t is the flat (developed) coordinate.  Two
engines compute them: an exact one that evaluates the symbolic iterates at
multiprecision, and a vectorized double-precision one that integrates the
flow as a power series on whole grids of basepoints.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .elliptic import invariants, wp_numpy
from .exactalg import InvalidInput, context
from .scenarios import IterateState, Scenario, evaluate, trajectory


class InvalidBasepoint(ValueError):
    """Basepoint at a pole of f or a zero or pole of omega."""


# ---------------------------------------------------------------------------
# exact coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CoeffTrack:
    z: complex
    coeffs: tuple  # mpc c_0..c_N
    precision: int
    scenario: str = ""

    @property
    def N(self) -> int:
        return len(self.coeffs) - 1


@dataclass
class IterateTable:
    """Iterates T^0 f .. T^N f of one scenario, computed once and shared by all basepoints."""

    scenario: Scenario
    states: list = field(default_factory=list)

    def upto(self, N: int) -> list[IterateState]:
        if len(self.states) <= N:
            start = len(self.states)
            gen = trajectory(self.scenario, N)
            for st in gen:
                if st.n >= start:
                    self.states.append(st)
        return self.states[: N + 1]


def _check_basepoint(s: Scenario, z) -> None:
    zc = complex(z)
    tiny = 1e-12
    if s.is_rational:
        polys = [s.f0.den, s.omega.num, s.omega.den]
        for p in polys:
            if p.degree > 0 and abs(_polyval(p, zc)) <= tiny * (1 + _polyabs(p, zc)):
                raise InvalidBasepoint(f"basepoint {zc} is a pole of f or a zero or pole of omega")
        return
    if s.kind == "Superelliptic":
        for p in (s.P, s.Q):
            if p.degree > 0 and abs(_polyval(p, zc)) <= tiny * (1 + _polyabs(p, zc)):
                raise InvalidBasepoint(f"basepoint {zc} is a branch point of the curve")
        return
    lat = s.lattice
    r = complex(lat.reduce_float(zc))
    if abs(r) < 1e-9:
        raise InvalidBasepoint("basepoint is a lattice point")
    if s.kind == "EllipticWpPrime":
        for h in lat.half_periods():
            if abs(complex(lat.reduce_float(r - complex(h)))) < 1e-9:
                raise InvalidBasepoint("basepoint is a zero of omega")


def taylor_coeffs(s: Scenario, z, N: int, table: IterateTable | None = None,
                  precision: int | None = None, sheet=None, min_bits: int = 32) -> CoeffTrack:
    """c_n = T^n f(z) / n! for n <= N with at least ``min_bits`` correct bits at n = N."""
    if N < 0:
        raise InvalidInput("N must be nonnegative")
    _check_basepoint(s, z)
    table = table or IterateTable(s)
    states = table.upto(N)
    prec = precision or s.precision
    while True:
        vals = [evaluate(s, st, z, prec, sheet) for st in states]
        if any(v.near_pole for v in vals):
            raise InvalidBasepoint(f"basepoint {z} is too close to a pole")
        check = evaluate(s, states[-1], z, 2 * prec, sheet).value
        last = vals[-1].value
        ctx = context(2 * prec)
        err = abs(ctx.mpc(last) - check)
        if check == 0 or err == 0 or -float(ctx.log(err / abs(check), 2)) >= min_bits or prec >= 16384:
            break
        prec *= 2
    ctx = context(prec)
    coeffs = []
    fact = ctx.mpf(1)
    for n, v in enumerate(vals):
        if n:
            fact *= n
        coeffs.append(ctx.mpc(v.value) / fact)
    return CoeffTrack(complex(z), tuple(coeffs), prec, s.name)


# ---------------------------------------------------------------------------
# estimators on a single coefficient sequence
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadiusEstimate:
    rho: float
    error: float
    infinite: bool = False


def _logabs(coeffs) -> np.ndarray:
    out = np.full(len(coeffs), -np.inf)
    for i, c in enumerate(coeffs):
        if c != 0:
            out[i] = float(mpmath.log(abs(c)))
    return out


def estimate_radius(track: CoeffTrack | list) -> RadiusEstimate:
    """Cauchy-Hadamard radius with even/odd envelope and Richardson extrapolation."""
    coeffs = track.coeffs if isinstance(track, CoeffTrack) else list(track)
    L = _logabs(coeffs)
    nz = np.nonzero(np.isfinite(L[1:]))[0] + 1
    # no nonzero term, or a run of two trailing zeros: a polynomial
    if len(nz) == 0 or (len(L) >= 4 and not np.isfinite(L[-2:]).any()):
        return RadiusEstimate(math.inf, 0.0, True)
    N = len(L) - 1
    if N < 8:
        n = int(nz[-1])
        return RadiusEstimate(math.exp(-L[n] / n), math.inf)
    # envelope over two consecutive indices handles vanishing even or odd terms
    E = np.maximum(L[:-1], L[1:])
    vals = []
    for end in (N - 5, N - 3, N - 1):
        rows = np.arange(max(1, end // 2), end + 1)
        Y = E[rows]
        ok = np.isfinite(Y)
        if ok.sum() < 4:
            continue
        # log|c_n| = -n log rho + m log n + const, the log n term absorbs the exponent
        X = np.column_stack([rows, np.log(rows), np.ones(len(rows))])[ok]
        coef = np.linalg.lstsq(X, Y[ok], rcond=None)[0]
        vals.append(math.exp(-coef[0]))
    if not vals:
        n = int(nz[-1])
        return RadiusEstimate(math.exp(-L[n] / n), math.inf)
    return RadiusEstimate(vals[-1], float(max(vals) - min(vals)))


@dataclass(frozen=True)
class SingularityEstimate:
    d: complex | None
    m0: float | None
    flag: str = ""  # "", "edge" or "entire"
    error: float = 0.0


def _richardson_ratios(coeffs, ctx):
    """q_n = (n+1) r_n - n r_{n-1} for the ratios r_n = c_n / c_{n+1}."""
    r = {}
    for n in range(len(coeffs) - 1):
        if coeffs[n + 1] != 0:
            r[n] = ctx.mpc(coeffs[n]) / coeffs[n + 1]
    q = {}
    for n in r:
        if n - 1 in r and n >= 1:
            q[n] = (n + 1) * r[n] - n * r[n - 1]
    return q


def track_singularity(track: CoeffTrack | list, window: int = 8, osc_tol: float = 1e-3) -> SingularityEstimate:
    """Position d of the dominant singularity relative to the basepoint and its exponent m0.

    The ratio sequence converges algebraically, so it is first Richardson
    extrapolated in 1/n and then Aitken accelerated.  Ratios that keep
    oscillating across the last ``window`` indices mean two singularities at the
    same distance and raise the edge flag.
    """
    coeffs = track.coeffs if isinstance(track, CoeffTrack) else [mpmath.mpmathify(c) for c in track]
    # a sequence that ends in a run of zeros comes from a polynomial
    if all(c == 0 for c in coeffs[1:]) or all(c == 0 for c in coeffs[-(window + 2):]):
        return SingularityEstimate(None, None, "entire")
    ctx = mpmath.mp.clone() if not isinstance(track, CoeffTrack) else context(track.precision)
    N = len(coeffs) - 1
    tail = coeffs[N - window:]
    if any(c == 0 for c in tail):
        return SingularityEstimate(None, None, "edge")
    q = _richardson_ratios(coeffs, ctx)
    idx = [n for n in range(N - window, N) if n in q]
    if len(idx) < 3:
        return SingularityEstimate(None, None, "edge")
    seq = [q[n] for n in idx]
    tiny = ctx.mpf(2) ** (-ctx.prec // 2)
    acc = []
    for a, b, c in zip(seq, seq[1:], seq[2:]):
        den = a - 2 * b + c
        acc.append(c - (c - b) ** 2 / den if abs(den) > abs(c) * tiny else c)
    d = acc[-1]
    spread = max(abs(v - d) for v in acc) / abs(d)
    if spread > osc_tol:
        return SingularityEstimate(None, None, "edge", float(spread))
    # log|c_n d^n| = const - (m0 + 1) log n + O(1/n), fitted over the upper half
    rows = np.arange(N // 2, N + 1)
    Y = np.array([float(ctx.log(abs(coeffs[n] * d ** n))) if coeffs[n] != 0 else np.nan for n in rows])
    ok = np.isfinite(Y)
    X = np.column_stack([np.log(rows), 1.0 / rows, np.ones(len(rows))])[ok]
    m0 = float(-np.linalg.lstsq(X, Y[ok], rcond=None)[0][0] - 1)
    return SingularityEstimate(complex(d), m0, "", float(spread))


# ---------------------------------------------------------------------------
# vectorized double-precision engine
# ---------------------------------------------------------------------------

def _cc(c) -> complex:
    return complex(c)


def _polyval(p, z):
    acc = np.zeros_like(np.asarray(z, dtype=complex))
    for c in reversed(p.coeffs):
        acc = acc * z + _cc(c)
    return acc


def _polyabs(p, z):
    az = np.abs(np.asarray(z, dtype=complex))
    acc = np.zeros_like(az)
    for c in reversed(p.coeffs):
        acc = acc * az + abs(_cc(c))
    return acc


def _conv_at(a, b, k):
    return np.einsum("im,im->m", a[: k + 1], b[k::-1])


def _mul(a, b):
    out = np.empty_like(a)
    for k in range(a.shape[0]):
        out[k] = _conv_at(a, b, k)
    return out


def _div(a, b):
    out = np.empty_like(a)
    for k in range(a.shape[0]):
        acc = a[k] - (_conv_at(b[1:], out, k - 1) if k else 0)
        out[k] = acc / b[0]
    return out


def _pow(u, alpha, h0):
    """Series of u^alpha with constant term h0."""
    h = np.empty_like(u)
    h[0] = h0
    for k in range(1, u.shape[0]):
        j = np.arange(1, k + 1)[:, None]
        h[k] = np.sum((alpha * j - (k - j)) * u[1 : k + 1] * h[k - 1 :: -1][: k], axis=0) / (k * u[0])
    return h


def _poly_series(p, x):
    """p(x(t)) for a series x, by Horner."""
    out = np.zeros_like(x)
    for c in reversed(p.coeffs):
        out = _mul(out, x)
        out[0] += _cc(c)
    return out


def _flow(z, p, q, N, sigma):
    """Series of psi(sigma s) with psi' = p(psi)/q(psi), psi(0) = z."""
    M = len(z)
    pc = [_cc(c) for c in p.coeffs] or [0j]
    qc = [_cc(c) for c in q.coeffs] or [0j]
    D = max(len(pc), len(qc))
    psi = np.zeros((N + 1, M), dtype=complex)
    psi[0] = z
    pw = [np.zeros((N + 1, M), dtype=complex) for _ in range(D)]
    pw[0][0] = 1
    P = np.zeros((N + 1, M), dtype=complex)
    Q = np.zeros((N + 1, M), dtype=complex)
    R = np.zeros((N + 1, M), dtype=complex)
    for k in range(N):
        if D > 1:
            pw[1][k] = psi[k]
        for j in range(2, D):
            pw[j][k] = _conv_at(psi, pw[j - 1], k)
        P[k] = sum(c * pw[j][k] for j, c in enumerate(pc))
        Q[k] = sum(c * pw[j][k] for j, c in enumerate(qc))
        acc = P[k] - (_conv_at(Q[1:], R, k - 1) if k else 0)
        R[k] = acc / Q[0]
        psi[k + 1] = sigma * R[k] / (k + 1)
    return psi


def _scales_numeric(s: Scenario):
    a, b, sc = s.curve.scales(64)
    return complex(a), complex(b), complex(sc)


def _elliptic_f(s: Scenario, x, y):
    e = s.f0
    a, b, sc = _scales_numeric(s)
    X, Y = x / a, y / b
    num = _poly_series(e.n0, X) + _mul(_poly_series(e.n1, X), Y)
    g = _div(num, _poly_series(e.den, X))
    ka, kb, ks = s.initial().scale
    return g * (a ** ka * b ** kb * sc ** ks)


def series_coeffs(s: Scenario, z, N: int, sigma=None) -> np.ndarray:
    """Scaled coefficients c_n sigma^n, shape (N+1, len(z)), in double precision."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    M = len(z)
    sigma = np.ones(M) if sigma is None else np.broadcast_to(np.asarray(sigma, dtype=float), (M,)).copy()
    with np.errstate(all="ignore"):
        if s.is_rational:
            psi = _flow(z, s.omega.den, s.omega.num, N, sigma)
            return _div(_poly_series(s.f0.num, psi), _poly_series(s.f0.den, psi))
        if s.kind == "Superelliptic":
            psi = np.zeros((N + 1, M), dtype=complex)
            psi[0] = z
            if N:
                psi[1] = sigma
            u = _div(_poly_series(s.P, psi), _poly_series(s.Q, psi))
            return _pow(u, 1.0 / s.ell, u[0] ** (1.0 / s.ell))
        g2 = complex(invariants(s.lattice, 64)[0])
        wp, wpp = wp_numpy(s.lattice, z)
        if s.kind == "EllipticDz":
            x = np.zeros((N + 2, M), dtype=complex)
            x[0] = wp
            x[1] = sigma * wpp
            sq = np.zeros((N + 2, M), dtype=complex)
            for k in range(N):
                sq[k] = _conv_at(x, x, k)
                x[k + 2] = sigma ** 2 * (6 * sq[k] - (g2 / 2 if k == 0 else 0)) / ((k + 1) * (k + 2))
            y = (np.arange(1, N + 2)[:, None] * x[1:]) / sigma
            return _elliptic_f(s, x[: N + 1], y)
        g3 = complex(invariants(s.lattice, 64)[1])
        x = np.zeros((N + 1, M), dtype=complex)
        x[0] = wp
        if N:
            x[1] = sigma
        cubic = 4 * _mul(_mul(x, x), x) - g2 * x
        cubic[0] -= g3
        y = _pow(cubic, 0.5, wpp)
        return _elliptic_f(s, x, y)


def omega_value(s: Scenario, z):
    """Coefficient w of omega = w dz at the points z."""
    z = np.asarray(z, dtype=complex)
    if s.is_rational:
        with np.errstate(all="ignore"):
            return _polyval(s.omega.num, z) / _polyval(s.omega.den, z)
    if s.kind == "EllipticWpPrime":
        return wp_numpy(s.lattice, z)[1]
    return np.ones_like(z)


def delta_phi(s: Scenario, a, b):
    """Integral of omega along the segment [a, b] (vectorized)."""
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if s.kind in ("Superelliptic", "EllipticDz"):
        return b - a
    if s.kind == "EllipticWpPrime":
        return wp_numpy(s.lattice, b)[0] - wp_numpy(s.lattice, a)[0]
    if s.kind == "Monomial" and s.ell != 1:
        k = 1 - s.ell
        return (b ** k - a ** k) / k
    # composite Gauss-Legendre; the segment avoids the poles of omega
    x, w = np.polynomial.legendre.leggauss(8)
    total = 0
    panels = 4
    for p in range(panels):
        pa = a + (b - a) * p / panels
        pb = a + (b - a) * (p + 1) / panels
        mid, half = (pa + pb) / 2, (pb - pa) / 2
        total = total + sum(wi * omega_value(s, mid + xi * half) for xi, wi in zip(x, w)) * half
    return total


@dataclass
class ScanResult:
    z: np.ndarray
    rho: np.ndarray  # flat-distance radius estimate
    d: np.ndarray  # dominant singularity relative to z, in developed units
    flag: np.ndarray  # True where the ratios oscillate (edge) or the data is unusable
    masked: np.ndarray


def _estimates(C, sigma, window=8, osc_tol=1e-3):
    N = C.shape[0] - 1
    with np.errstate(all="ignore"):
        A = np.abs(C)
        logA = np.log(A)
        env = np.maximum(logA[1:-1], logA[2:])
        n = np.arange(1, N)[:, None]
        h = N // 2
        # slope of the log envelope over the upper half, with a log n term fitted out
        rows = np.arange(h, N - 1)
        X = np.column_stack([rows + 1, np.log(rows + 1), np.ones(len(rows))])
        Y = env[rows]
        good = np.all(np.isfinite(Y), axis=0)
        coef = np.linalg.lstsq(X, np.where(np.isfinite(Y), Y, 0), rcond=None)[0]
        rho = sigma * np.exp(-coef[0])
        rho = np.where(good, rho, np.nan)
        r = C[:-1] / C[1:] * sigma
        q = (n + 1) * r[1:] - n * r[:-1]
        tail = q[-window:]
        a, b, c = tail[:-2], tail[1:-1], tail[2:]
        den = a - 2 * b + c
        acc = np.where(np.abs(den) > 1e-12 * np.abs(c), c - (c - b) ** 2 / den, c)
        last = acc[-1]
        spread = np.max(np.abs(acc - last), axis=0) / np.abs(last)
        flag = ~np.isfinite(spread) | (spread > osc_tol)
    return rho, last, flag


def scan_points(s: Scenario, z, N: int = 256, pilot: int = 24, block: int = 4096,
                mask_radius: float = 0.0) -> ScanResult:
    """Radius, dominant singularity and edge flag at many basepoints."""
    z = np.atleast_1d(np.asarray(z, dtype=complex))
    rho = np.full(len(z), np.nan)
    d = np.full(len(z), np.nan + 0j)
    flag = np.ones(len(z), dtype=bool)
    for lo in range(0, len(z), block):
        zb = z[lo : lo + block]
        C0 = series_coeffs(s, zb, pilot)
        with np.errstate(all="ignore"):
            la = np.log(np.abs(C0[pilot // 2 :]))
            nn = np.arange(pilot // 2, pilot + 1)[:, None]
            est = np.exp(-np.nanmax(np.where(np.isfinite(la), la / nn, -np.inf), axis=0))
        sigma = np.where(np.isfinite(est) & (est > 0), est, 1.0)
        C = series_coeffs(s, zb, N, sigma)
        r, dd, fl = _estimates(C, sigma)
        rho[lo : lo + block] = r
        d[lo : lo + block] = dd
        flag[lo : lo + block] = fl
    with np.errstate(all="ignore"):
        zdist = rho / np.abs(omega_value(s, z))
    masked = ~np.isfinite(zdist) | (zdist < mask_radius)
    return ScanResult(z, rho, d, flag, masked)


# ---------------------------------------------------------------------------
# edge detection
# ---------------------------------------------------------------------------

@dataclass
class EdgeCloud:
    points: np.ndarray
    region: tuple
    cell: float
    masked: np.ndarray  # basepoints excluded near poles and PPL points
    evaluated: int


def _gap(u, v):
    """Relative distance |u - v| / |u| between two singularity positions."""
    with np.errstate(all="ignore"):
        return np.abs(u - v) / np.abs(u)


def detect_edges(s: Scenario, region, N: int = 256, grid: int = 512, coarse: int = 64,
                 jump: float = 0.02, mask_cells: float = 3.0, bisect: int = 6,
                 max_run: int = 32) -> EdgeCloud:
    """Points where the dominant singularity jumps between neighbors, refined by bisection.

    A coarse grid is refined by quadrisection in cells whose corners disagree,
    down to ``grid`` cells per side.  Two neighbors disagree when the
    singularity seen from one and the other's singularity carried along omega
    differ by more than ``jump`` relative to their distance.  Each crossing is
    bisected from both sides to the limit of the region where that side's
    singularity is still clearly dominant; the midpoint is reported.
    """
    x0, x1, y0, y1 = region
    if grid % coarse:
        raise InvalidInput("grid must be a multiple of coarse")
    hx, hy = (x1 - x0) / grid, (y1 - y0) / grid
    cell = max(hx, hy)
    mask_r = mask_cells * cell
    nodes: dict = {}

    def z_of(i, j):
        return complex(x0 + i * hx, y0 + j * hy)

    def ensure(keys):
        new = [k for k in keys if k not in nodes]
        if not new:
            return
        zs = np.array([z_of(*k) for k in new])
        res = scan_points(s, zs, N, mask_radius=mask_r)
        for t, k in enumerate(new):
            nodes[k] = (res.d[t], bool(res.flag[t]), bool(res.masked[t]))

    def disagree(ka, kb):
        da, fa, ma = nodes[ka]
        db, fb, mb = nodes[kb]
        if ma or mb:
            return False
        if fa or fb:
            return True
        sa = da - complex(delta_phi(s, z_of(*ka), z_of(*kb)))
        return _gap(db, sa) > jump

    step = grid // coarse
    cells = [(i, j) for i in range(0, grid, step) for j in range(0, grid, step)]
    ensure([(i, j) for i in range(0, grid + 1, step) for j in range(0, grid + 1, step)])
    while True:
        hot = []
        for (i, j) in cells:
            c = [(i, j), (i + step, j), (i + step, j + step), (i, j + step)]
            if any(nodes[c[t]][1] and not nodes[c[t]][2] for t in range(4)) or any(
                disagree(c[t], c[(t + 1) % 4]) for t in range(4)
            ):
                hot.append((i, j))
        if step == 1:
            cells = hot
            break
        half = step // 2
        sub = []
        for (i, j) in hot:
            sub += [(i, j), (i + half, j), (i, j + half), (i + half, j + half)]
        ensure([(a + da, b + db) for (a, b) in sub for da in (0, half) for db in (0, half)])
        cells, step = sub, half

    edges = set()
    for (i, j) in cells:
        edges |= {((i, j), (i + 1, j)), ((i, j + 1), (i + 1, j + 1)), ((i, j), (i, j + 1)), ((i + 1, j), (i + 1, j + 1))}
    crossings = []
    for axis in (0, 1):
        lines: dict = {}
        for u, v in edges:
            if u[1 - axis] == v[1 - axis]:
                lines.setdefault(u[1 - axis], set()).update((u[axis], v[axis]))
        for fixed, pos in lines.items():
            key = (lambda t: (t, fixed)) if axis == 0 else (lambda t: (fixed, t))
            crossings += _line_crossings(sorted(pos), key, nodes, disagree, max_run)
    pts = []
    if crossings:
        pts = np.array(_locate(s, crossings, nodes, z_of, N, bisect, jump, max_run * cell, cell))
        near = _neighbors(crossings, nodes, z_of, 8)
        verts = _vertices(s, pts, near, jump, 8 * cell)
        pts = np.concatenate([pts[~_third_cell(s, pts, crossings, nodes, z_of, near, jump)], verts])
    pts = np.unique(np.round(np.array(pts, dtype=complex), 12))
    masked = np.array([z_of(*k) for k, v in nodes.items() if v[2]], dtype=complex)
    return EdgeCloud(pts, tuple(region), cell, masked, len(nodes))


def _line_crossings(pos, key, nodes, disagree, max_run):
    """(good a, first unknown, last unknown, good b) along one grid line, for each change of singularity."""
    out = []
    last_good = None
    run = []
    prev = None
    for t in pos:
        if prev is not None and t != prev + 1:
            last_good, run = None, []
        prev = t
        k = key(t)
        _, fl, m = nodes[k]
        if m:
            last_good, run = None, []
        elif fl:
            run.append(k)
        else:
            if last_good is not None and len(run) <= max_run and disagree(last_good, k):
                out.append((last_good, run[0] if run else k, run[-1] if run else last_good, k))
            last_good, run = k, []
    return out


def _classify(s, z, za, da, zb, db, N, jump):
    """+1 where the singularity seen from z continues a's, -1 for b's, 0 if undecided."""
    res = scan_points(s, z, N)
    sa = da - delta_phi(s, za, z)
    sb = db - delta_phi(s, zb, z)
    aa, ab = _gap(res.d, sa), _gap(res.d, sb)
    ok = ~res.flag & np.isfinite(res.d)
    return np.where(ok & (aa < ab) & (aa < jump), 1, np.where(ok & (ab <= aa) & (ab < jump), -1, 0))


def _locate(s, crossings, nodes, z_of, N, steps, jump, reach, cell):
    """Position of each crossing on its grid line.

    The singularities estimated at the two good endpoints are carried along
    omega; the crossing is where both are equally far.  A weak singularity
    only takes over some way past the true balance point, so the root is
    searched up to ``reach`` beyond the segment, nearest the run.  Without a
    root, fall back to bisecting from each side to the limit of the region
    its singularity dominates and take the midpoint.
    """
    za = np.array([z_of(*c[0]) for c in crossings])
    zb = np.array([z_of(*c[3]) for c in crossings])
    da = np.array([nodes[c[0]][0] for c in crossings])
    db = np.array([nodes[c[3]][0] for c in crossings])
    L = np.abs(zb - za)
    u = (zb - za) / L

    def balance(t, idx=slice(None)):
        m = za[idx, None] + t * u[idx, None] if np.ndim(t) == 2 else za[idx] + t * u[idx]
        A, B = (da[idx, None], db[idx, None]) if np.ndim(t) == 2 else (da[idx], db[idx])
        ZA, ZB = (za[idx, None], zb[idx, None]) if np.ndim(t) == 2 else (za[idx], zb[idx])
        return np.abs(A - delta_phi(s, ZA, m)) - np.abs(B - delta_phi(s, ZB, m))

    S = int(np.ceil(2 * reach / cell + 2 * L.max() / cell)) + 3
    frac = np.linspace(0.0, 1.0, S)
    T = -reach + frac[None, :] * (L[:, None] + 2 * reach)
    F = balance(T)
    up = (F[:, :-1] < 0) & (F[:, 1:] >= 0)
    centre = (T[:, :-1] + T[:, 1:]) / 2 - L[:, None] / 2
    score = np.where(up, np.abs(centre), np.inf)
    k = np.argmin(score, axis=1)
    rows = np.arange(len(crossings))
    found = np.isfinite(score[rows, k])
    lo, hi = T[rows, k], T[rows, k + 1]
    for _ in range(steps + 20):
        mid = (lo + hi) / 2
        neg = balance(mid) < 0
        lo = np.where(neg, mid, lo)
        hi = np.where(neg, hi, mid)
    out = za + (lo + hi) / 2 * u
    if np.any(~found):
        out[~found] = _classify_bisect(s, [c for c, f in zip(crossings, found) if not f], nodes, z_of, N, steps, jump)
    return list(out)


def _neighbors(crossings, nodes, z_of, reach):
    """Clean nodes in a box around each crossing: (crossing index, node position, singularity)."""
    kk, zz, dd = [], [], []
    for t, c in enumerate(crossings):
        (ia, ja), (ib, jb) = c[0], c[3]
        for i in range(min(ia, ib) - reach, max(ia, ib) + reach + 1):
            for j in range(min(ja, jb) - reach, max(ja, jb) + reach + 1):
                v = nodes.get((i, j))
                if v is not None and not v[1] and not v[2]:
                    kk.append(t)
                    zz.append(z_of(i, j))
                    dd.append(v[0])
    return np.array(kk, dtype=int), np.array(zz, dtype=complex), np.array(dd, dtype=complex)


def _third_cell(s, pts, crossings, nodes, z_of, near, jump):
    """True where a clean node near the crossing sees a singularity clearly closer than the balanced pair."""
    k, zc, dc = near
    out = np.zeros(len(pts), dtype=bool)
    if not len(k):
        return out
    dist = np.abs(dc - delta_phi(s, zc, pts[k]))
    za = np.array([z_of(*c[0]) for c in crossings])
    da = np.array([nodes[c[0]][0] for c in crossings])
    balanced = np.abs(da - delta_phi(s, za, pts))
    nearest = np.full(len(pts), np.inf)
    np.minimum.at(nearest, k, dist)
    return nearest < balanced * (1 - jump)


def _vertices(s, pts, near, jump, radius):
    """Points equidistant from three distinct nearby singularities, close to a crossing."""
    k, zc, dc = near
    if not len(k):
        return np.zeros(0, dtype=complex)
    off = dc - delta_phi(s, zc, pts[k])  # singularities seen from the crossing
    order = np.argsort(k, kind="stable")
    k, off = k[order], off[order]
    starts = np.searchsorted(k, np.arange(len(pts) + 1))
    found = []
    for t in range(len(pts)):
        o = off[starts[t]:starts[t + 1]]
        reps: list = []
        for u in o[np.argsort(np.abs(o))]:
            if all(abs(u - r) > jump * abs(r) for r in reps):
                reps.append(u)
        if len(reps) < 3:
            continue
        p1, p2, p3 = reps[:3]
        # circumcenter of the three singularities in developed coordinates around pts[t]
        b, c = p2 - p1, p3 - p1
        den = 2 * (b.real * c.imag - b.imag * c.real)
        if den == 0:
            continue
        ux = (c.imag * abs(b) ** 2 - b.imag * abs(c) ** 2) / den
        uy = (b.real * abs(c) ** 2 - c.real * abs(b) ** 2) / den
        cc = p1 + complex(ux, uy)
        r = abs(cc - p1)
        if any(abs(q - cc) < r * (1 - jump) for q in reps[3:]):
            continue
        m = pts[t]
        v = _develop_back(s, m, cc)
        if not (np.isfinite(v) and abs(v - m) <= radius):
            continue
        found.append(v)
        # the three edges leave the vertex along the bisectors, away from the third singularity
        step = radius * abs(complex(omega_value(s, v))) / 16
        for pa, pb, pc in ((p1, p2, p3), (p2, p3, p1), (p3, p1, p2)):
            e = 1j * (pb - pa) / abs(pb - pa)
            if (np.conj(e) * (cc - pc)).real < 0:
                e = -e
            for n in range(1, 17):
                q = _develop_back(s, m, cc + n * step * e)
                if np.isfinite(q) and abs(q - m) <= radius:
                    found.append(q)
    return np.array(found, dtype=complex)


def _develop_back(s, m, target):
    """Point v near m with delta_phi(m, v) = target, by Newton from the linearization."""
    v = m + target / complex(omega_value(s, m))
    for _ in range(8):
        w = complex(omega_value(s, v))
        if not np.isfinite(w) or w == 0:
            return complex(np.nan)
        v -= (complex(delta_phi(s, m, v)) - target) / w
    return v


def _classify_bisect(s, crossings, nodes, z_of, N, steps, jump):
    za = np.array([z_of(*c[0]) for c in crossings])
    zb = np.array([z_of(*c[3]) for c in crossings])
    da = np.array([nodes[c[0]][0] for c in crossings])
    db = np.array([nodes[c[3]][0] for c in crossings])
    bounds = []
    for sign, good, bad in ((1, za, np.array([z_of(*c[1]) for c in crossings])),
                            (-1, zb, np.array([z_of(*c[2]) for c in crossings]))):
        lo, hi = good.copy(), bad.copy()
        for _ in range(steps):
            m = (lo + hi) / 2
            cls = _classify(s, m, za, da, zb, db, N, jump)
            inside = cls == sign
            lo = np.where(inside, m, lo)
            hi = np.where(inside, hi, m)
        bounds.append((lo + hi) / 2)
    return (bounds[0] + bounds[1]) / 2


def hausdorff(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two planar point clouds."""
    from scipy.spatial import cKDTree

    if len(a) == 0 or len(b) == 0:
        return 0.0 if len(a) == len(b) else math.inf
    A = np.column_stack([a.real, a.imag])
    B = np.column_stack([b.real, b.imag])
    return float(max(cKDTree(B).query(A)[0].max(), cKDTree(A).query(B)[0].max()))


# ---------------------------------------------------------------------------
# singularity asymptotics of Taylor coefficients
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SingularTerm:
    """The term B (a - x)^m of a function's expansion at the singularity a."""

    a: complex
    m: Fraction | float
    B: complex = 1


@dataclass(frozen=True)
class OrlovReport:
    ks: tuple
    relative_errors: tuple
    extrapolated_ratio: float  # limit of c_k / prediction, should be 1
    decay: float  # fitted exponent of |c_k - prediction| / |prediction| against k
    leading: complex  # extrapolated c_k k^(m+1) a^k for the dominant term
    exact: bool


def exact_coefficients(terms, K: int, entire=(), prec: int = 160) -> list:
    """Taylor coefficients c_0..c_K of sum B (a - x)^m + entire polynomial, at ``prec`` bits."""
    ctx = context(prec)
    out = [ctx.mpc(0)] * (K + 1)
    for t in terms:
        a, m, B = ctx.mpc(t.a), ctx.mpf(Fraction(t.m).numerator) / Fraction(t.m).denominator, ctx.mpc(t.B)
        c = B * a ** m
        inv = 1 / a
        for k in range(K + 1):
            out[k] += c
            # (1 - x/a)^m: next coefficient multiplies by (k - m)/(k + 1) / a
            c = c * (k - m) / (k + 1) * inv
    for k, e in enumerate(entire):
        if k <= K:
            out[k] += ctx.mpc(e)
    return out


def _predict(terms, k, ctx):
    tot = ctx.mpc(0)
    for t in terms:
        m = ctx.mpf(Fraction(t.m).numerator) / Fraction(t.m).denominator
        if m == int(m) and m >= 0:
            continue
        a = ctx.mpc(t.a)
        tot += ctx.mpc(t.B) / ctx.gamma(-m) * a ** m * ctx.mpf(k) ** (-(m + 1)) * a ** (-k)
    return tot


def orlov_validate(terms, K: int, entire=(), samples: int = 12, prec: int = 160) -> OrlovReport:
    """Compare exact Taylor coefficients with the singular-term prediction up to k = K."""
    ctx = context(prec)
    coeffs = exact_coefficients(terms, K, entire, prec)
    ks = sorted({int(round(v)) for v in np.geomspace(8, K, samples)})
    errs = []
    exact = True
    for k in ks:
        p = _predict(terms, k, ctx)
        e = abs(coeffs[k] - p) / abs(p) if p != 0 else ctx.mpf(math.inf)
        errs.append(float(e))
        if e > ctx.mpf(2) ** (-prec + 16):
            exact = False
    # ratio c_k / prediction, Richardson extrapolated from k and k/2 (O(1/k) correction)
    k2, k1 = K, K // 2
    r2 = coeffs[k2] / _predict(terms, k2, ctx)
    r1 = coeffs[k1] / _predict(terms, k1, ctx)
    ratio = 2 * r2 - r1
    dom = min(terms, key=lambda t: abs(complex(t.a)))
    m = ctx.mpf(Fraction(dom.m).numerator) / Fraction(dom.m).denominator
    a = ctx.mpc(dom.a)

    def lead(k):
        return coeffs[k] * ctx.mpf(k) ** (m + 1) * a ** k

    leading = 2 * lead(k2) - lead(k1)
    pos = [(math.log(k), math.log(e)) for k, e in zip(ks, errs) if e > 0 and math.isfinite(e)]
    decay = float(np.polyfit(*zip(*pos), 1)[0]) if len(pos) >= 2 else -math.inf
    return OrlovReport(tuple(ks), tuple(errs), float(abs(ratio)), decay, complex(leading), exact)


__all__ = [
    "InvalidBasepoint",
    "CoeffTrack",
    "IterateTable",
    "taylor_coeffs",
    "RadiusEstimate",
    "estimate_radius",
    "SingularityEstimate",
    "track_singularity",
    "series_coeffs",
    "omega_value",
    "delta_phi",
    "ScanResult",
    "scan_points",
    "EdgeCloud",
    "detect_edges",
    "hausdorff",
    "SingularTerm",
    "OrlovReport",
    "exact_coefficients",
    "orlov_validate",
]
