"""Multiprecision zero extraction.

``poly_roots`` runs Aberth-Ehrlich simultaneous iteration: a float64 pass for
starting values, then a precision ladder in gmpy2 until every root has a small
backward error.  ``region_roots`` counts zeros of an analytic evaluator in a
rectangle by the argument principle and isolates them by quadrisection.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import gmpy2
import mpmath
import numpy as np

from .exactalg import GaussianRational, InvalidInput, Poly, context

GOLDEN = math.pi * (3 - math.sqrt(5))
LADDER = (128, 256, 512, 1024, 2048, 4096, 8192)


@dataclass(frozen=True)
class Root:
    value: object  # mpmath mpc
    multiplicity: int
    residual: float


@dataclass(frozen=True)
class RootSet:
    roots: tuple
    certified_count: int
    certified: bool = True
    precision: int = 0

    @property
    def values(self) -> list:
        out = []
        for r in self.roots:
            out.extend([r.value] * r.multiplicity)
        return out

    def as_complex(self) -> np.ndarray:
        return np.array([complex(v) for v in self.values], dtype=complex)

    def __len__(self):
        return sum(r.multiplicity for r in self.roots)


# ---------------------------------------------------------------------------
# coefficient conversion
# ---------------------------------------------------------------------------

def _to_gmpy(c):
    if isinstance(c, GaussianRational):
        return gmpy2.mpc(gmpy2.mpq(c.a, c.d), gmpy2.mpq(c.b, c.d))
    if hasattr(c, "real") and hasattr(c, "imag") and not isinstance(c, complex):
        re, im = c.real, c.imag
        return gmpy2.mpc(_mpf_to_gmpy(re), _mpf_to_gmpy(im))
    return gmpy2.mpc(c)


def _mpf_to_gmpy(x):
    man, exp = x.man_exp if hasattr(x, "man_exp") else (None, None)
    if man is None:
        return gmpy2.mpfr(float(x))
    return gmpy2.mpfr(man) * gmpy2.exp2(exp)


def _to_mpmath(z, prec: int):
    ctx = context(prec)
    re = z.real.as_mantissa_exp()
    im = z.imag.as_mantissa_exp()
    return ctx.mpc(ctx.mpf((int(re[0]), int(re[1]))), ctx.mpf((int(im[0]), int(im[1]))))


# ---------------------------------------------------------------------------
# starting values
# ---------------------------------------------------------------------------

def _log_moduli(coeffs) -> np.ndarray:
    out = np.empty(len(coeffs))
    for k, c in enumerate(coeffs):
        a = abs(c)
        out[k] = float(gmpy2.log2(a)) if a != 0 else -np.inf
    return out


def initial_guesses(logmod: np.ndarray) -> np.ndarray:
    """Radii from the upper convex hull of (k, log|a_k|), angles spaced by the golden angle."""
    d = len(logmod) - 1
    pts = [k for k in range(d + 1) if np.isfinite(logmod[k])]
    hull: list[int] = []
    for k in pts:
        while len(hull) >= 2:
            i, j = hull[-2], hull[-1]
            if (logmod[j] - logmod[i]) * (k - i) <= (logmod[k] - logmod[i]) * (j - i):
                hull.pop()
            else:
                break
        hull.append(k)
    z = np.empty(d, dtype=complex)
    idx = 0
    for i, j in zip(hull, hull[1:]):
        r = 2.0 ** ((logmod[i] - logmod[j]) / (j - i))
        for m in range(j - i):
            ang = 2 * np.pi * m / (j - i) + GOLDEN * (idx + 1) + 0.4
            z[idx] = r * np.exp(1j * ang)
            idx += 1
    return z


# ---------------------------------------------------------------------------
# float stage
# ---------------------------------------------------------------------------

def _float_ratio(c: np.ndarray, z: np.ndarray) -> np.ndarray:
    """p(z)/p'(z) for coefficients c (ascending), stable for |z| > 1 by reversal."""
    d = len(c) - 1
    out = np.empty_like(z)
    inner = np.abs(z) <= 1
    if inner.any():
        zz = z[inner]
        p = np.full_like(zz, c[-1])
        dp = np.zeros_like(zz)
        for a in c[-2::-1]:
            dp = dp * zz + p
            p = p * zz + a
        out[inner] = p / dp
    outer = ~inner
    if outer.any():
        w = 1 / z[outer]
        r = np.full_like(w, c[0])
        dr = np.zeros_like(w)
        for a in c[1:]:
            dr = dr * w + r
            r = r * w + a
        out[outer] = z[outer] / (d - w * dr / r)
    return out


def _aberth_float(c: np.ndarray, z: np.ndarray, iters: int = 400) -> np.ndarray:
    z = z.copy()
    active = np.ones(len(z), dtype=bool)
    with np.errstate(all="ignore"):
        for _ in range(iters):
            if not active.any():
                break
            za = z[active]
            ratio = _float_ratio(c, za)
            diff = za[:, None] - z[None, :]
            diff[diff == 0] = np.inf
            s = (1 / diff).sum(axis=1)
            corr = ratio / (1 - ratio * s)
            bad = ~np.isfinite(corr)
            corr[bad] = 0
            z[active] = za - corr
            done = np.abs(corr) <= 1e-14 * np.maximum(np.abs(za), 1e-300)
            idx = np.flatnonzero(active)
            active[idx[done | bad]] = False
    return z


# ---------------------------------------------------------------------------
# multiprecision stage
# ---------------------------------------------------------------------------

def _horner2(cs, z):
    p = cs[-1]
    dp = gmpy2.mpc(0)
    for a in cs[-2::-1]:
        dp = dp * z + p
        p = p * z + a
    return p, dp


def _backward_error(cs, abs_cs, z) -> float:
    p = cs[-1]
    s = abs_cs[-1]
    az = abs(z)
    for a, b in zip(cs[-2::-1], abs_cs[-2::-1]):
        p = p * z + a
        s = s * az + b
    if s == 0:
        return 0.0
    return float(abs(p) / s)


def _aberth_mp(cs, z: list, prec: int, max_iter: int):
    """Aberth sweeps at ``prec`` bits; returns (roots, converged).

    A root stops moving once its correction is at rounding level or its
    backward error is; for ill-conditioned roots only the latter happens.
    """
    d = len(z)
    eps = gmpy2.exp2(-prec + 12)
    floor = gmpy2.exp2(-prec + 16) * (d + 1)
    abs_cs = [abs(c) for c in cs]
    active = [True] * d
    for _ in range(max_iter):
        if not any(active):
            return z, True
        noise = True
        for i in range(d):
            if not active[i]:
                continue
            zi = z[i]
            p, dp = _horner2(cs, zi)
            if p == 0:
                active[i] = False
                continue
            ratio = p / dp if dp != 0 else gmpy2.mpc(0)
            s = gmpy2.mpc(0)
            for j in range(d):
                if j != i:
                    dz = zi - z[j]
                    if dz != 0:
                        s += 1 / dz
            den = 1 - ratio * s
            corr = ratio / den if den != 0 else ratio
            z[i] = zi - corr
            if abs(corr) <= eps * max(abs(zi), gmpy2.exp2(-prec)):
                active[i] = False
            else:
                small = _backward_error(cs, abs_cs, z[i]) <= floor
                if small and abs(corr) <= gmpy2.exp2(-prec // 4) * max(abs(zi), 1):
                    active[i] = False
                noise = noise and small
        if noise and any(active):
            # the remaining roots are at rounding level but still moving:
            # more bits are needed, not more sweeps
            return z, False
    return z, not any(active)


# ---------------------------------------------------------------------------
# public API
# ---------------------------------------------------------------------------

def poly_roots(p: Poly, precision: int = 256, tol: float | None = None, max_iter: int = 200) -> RootSet:
    """All roots of ``p`` with backward error below ``tol``.

    Zero roots are split off exactly.  The ladder starts at 128 bits and
    climbs past ``precision`` only when convergence or the residual test fails.
    """
    if p.degree < 1:
        raise InvalidInput("poly_roots needs degree >= 1")
    k0 = 0
    while k0 < len(p) and _is_zero(p[k0]):
        k0 += 1
    coeffs = list(p.coeffs[k0:])
    d = len(coeffs) - 1
    if tol is None:
        tol = 2.0 ** (-0.75 * precision)
    entries: list[Root] = []
    if k0:
        entries.append(Root(context(precision).mpc(0), k0, 0.0))
    if d == 0:
        return RootSet(tuple(entries), k0, True, precision)

    ladder = [b for b in LADDER if b < precision] + [precision] + [b for b in LADDER if b > precision]
    z_float = None
    z_mp = None
    certified = False
    used = precision
    for prec in ladder:
        with gmpy2.context(precision=prec + 16):
            cs = [_to_gmpy(c) for c in coeffs]
            lead = cs[-1]
            cs = [c / lead for c in cs]
            if z_float is None:
                logmod = _log_moduli(cs)
                shift = float(np.max(logmod[np.isfinite(logmod)]))
                scaled = np.array([complex(c * gmpy2.exp2(-shift)) if np.isfinite(lm) and lm - shift > -1000 else 0j for c, lm in zip(cs, logmod)])
                z0 = initial_guesses(logmod)
                z_float = _aberth_float(scaled, z0) if np.all(np.isfinite(scaled)) and scaled[-1] != 0 else z0
                bad = ~np.isfinite(z_float)
                z_float[bad] = z0[bad]
                z_mp = [gmpy2.mpc(complex(v)) for v in z_float]
            else:
                z_mp = [gmpy2.mpc(v) for v in z_mp]
            z_mp, conv = _aberth_mp(cs, z_mp, prec, max_iter)
            abs_cs = [abs(c) for c in cs]
            res = [_backward_error(cs, abs_cs, v) for v in z_mp]
        ok = conv and max(res) < tol and all(math.isfinite(r) for r in res)
        if ok and prec >= precision:
            certified = True
            used = prec
            break
        used = prec
    clusters = _cluster(z_mp, res, tol)
    for members in clusters:
        with gmpy2.context(precision=used + 16):
            v = sum((z_mp[i] for i in members), gmpy2.mpc(0)) / len(members)
            if len(members) > 1:
                v = _polish_cluster(cs, v, len(members), max(abs(z_mp[i] - v) for i in members), used)
        entries.append(Root(_to_mpmath(v, used), len(members), max(res[i] for i in members)))
    return RootSet(tuple(entries), k0 + d, certified, used)


def _polish_cluster(cs, v, k: int, radius, prec: int):
    """Newton on p^(k-1), which has a simple root inside a k-fold cluster."""
    d = list(cs)
    for _ in range(k - 1):
        d = [c * j for j, c in enumerate(d)][1:]
    w = v
    for _ in range(prec):
        p, dp = _horner2(d, w)
        if dp == 0:
            return v
        step = p / dp
        w -= step
        if abs(step) <= gmpy2.exp2(-prec) * max(1, abs(w)):
            break
    return w if abs(w - v) <= 2 * radius + gmpy2.exp2(-prec) else v


def _is_zero(c) -> bool:
    if isinstance(c, GaussianRational):
        return c.is_zero()
    return c == 0


def _cluster(z, res, tol) -> list[list[int]]:
    """Single-linkage clusters accepted when their diameter is below tol^(1/k)."""
    n = len(z)
    zc = np.array([complex(v) for v in z])
    scale = np.maximum(1.0, np.abs(zc))
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    rad = tol ** (1 / 6)
    if n > 1:
        dist = np.abs(zc[:, None] - zc[None, :]) / scale[:, None]
        ii, jj = np.nonzero(np.triu(dist < rad, 1))
        for i, j in zip(ii, jj):
            parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = []
    for g in groups.values():
        k = len(g)
        if k == 1:
            out.append(g)
            continue
        diam = max(abs(zc[i] - zc[j]) for i in g for j in g) / scale[g].max()
        if k <= 6 and diam <= tol ** (1 / k):
            out.append(g)
        else:
            out.extend([[i] for i in g])
    out.sort(key=lambda g: (zc[g[0]].real, zc[g[0]].imag))
    return out


# ---------------------------------------------------------------------------
# argument principle
# ---------------------------------------------------------------------------

class BoundaryZero(RuntimeError):
    pass


def _winding(f, corners, ctx, min_step: float, samples: int = 16) -> float:
    """Total change of arg f along the closed polygon, divided by 2 pi."""
    total = 0.0
    for a, b in zip(corners, corners[1:] + corners[:1]):
        pts = [ctx.mpc(a + (b - a) * k / samples) for k in range(samples + 1)]
        vals = [f(z) for z in pts]
        for k in range(samples):
            total += _arg_change(f, pts[k], pts[k + 1], vals[k], vals[k + 1], ctx, min_step)
    return total / (2 * math.pi)


def _arg_change(f, a, b, fa, fb, ctx, min_step: float) -> float:
    """Arg increment along [a, b], bisecting until halves agree with the whole."""
    stack = [(a, b, fa, fb)]
    total = 0.0
    while stack:
        a, b, fa, fb = stack.pop()
        if fa == 0 or fb == 0:
            raise BoundaryZero("zero on the contour")
        whole = float(ctx.arg(fb / fa))
        m = (a + b) / 2
        fm = f(m)
        if fm == 0:
            raise BoundaryZero("zero on the contour")
        left = float(ctx.arg(fm / fa))
        right = float(ctx.arg(fb / fm))
        if abs(whole) < math.pi / 4 and abs(left + right - whole) < 1e-6:
            total += whole
            continue
        if abs(complex(b - a)) < min_step:
            raise BoundaryZero("argument jump unresolved near the contour")
        stack.append((m, b, fm, fb))
        stack.append((a, m, fa, fm))
    return total


def region_roots(
    evaluator: Callable,
    rect: tuple,
    precision: int = 128,
    tol: float | None = None,
    derivative: Callable | None = None,
) -> RootSet:
    """Zeros of an analytic ``evaluator`` inside ``rect = (x0, x1, y0, y1)``.

    The winding number of each box is found by tracking arg f along its
    boundary with adaptive bisection; boxes are quadrisected until each holds
    one zero (or a tight cluster), which is then polished by Newton's method.
    """
    ctx = context(precision)
    tol = tol if tol is not None else 2.0 ** (-0.75 * precision)

    def f(z):
        # evaluators written against the global mpmath context see the working precision
        with mpmath.workprec(precision):
            return evaluator(z)

    def df(z):
        with mpmath.workprec(precision):
            return derivative(z)

    x0, x1, y0, y1 = (float(v) for v in rect)
    width = max(x1 - x0, y1 - y0)

    def count(box):
        bx0, bx1, by0, by1 = box
        corners = [complex(bx0, by0), complex(bx1, by0), complex(bx1, by1), complex(bx0, by1)]
        w = _winding(f, corners, ctx, max(bx1 - bx0, by1 - by0) * 1e-7)
        k = round(w)
        if abs(w - k) > 0.1:
            raise BoundaryZero("winding number not near an integer")
        return k

    box = (x0, x1, y0, y1)
    for attempt in range(6):
        try:
            total = count(box)
            break
        except BoundaryZero:
            if attempt == 5:
                raise
            e = width * 1e-3 * (attempt + 1) * (1 + 0.37 * attempt)
            box = (x0 - e, x1 + e * 0.7, y0 - e * 0.9, y1 + e * 1.1)
    else:  # pragma: no cover
        total = 0
    found: list[tuple] = []
    if total:
        _isolate(f, box, total, count, found, width, ctx)
    polished = []
    for box_k, k in found:
        z = _polish(f, df if derivative is not None else None, box_k, k, count, ctx, tol)
        for i, (w, kw) in enumerate(polished):
            if abs(z - w) <= math.sqrt(tol) * max(1, abs(w)):
                polished[i] = (w, kw + k)
                break
        else:
            polished.append((z, k))
    roots = [Root(z, k, float(abs(f(z)))) for z, k in polished]
    roots.sort(key=lambda r: (float(r.value.real), float(r.value.imag)))
    return RootSet(tuple(roots), total, sum(r.multiplicity for r in roots) == total, precision)


def _isolate(f, box, k, count, found, width, ctx, depth=0):
    bx0, bx1, by0, by1 = box
    size = max(bx1 - bx0, by1 - by0)
    if k == 1 or size < width * 1e-6 or depth > 60:
        found.append((box, k))
        return
    # split lines slightly off-center; move them if a zero sits on one
    for attempt in range(5):
        mx = (bx0 + bx1) / 2 + (bx1 - bx0) * (0.0137 + 0.031 * attempt)
        my = (by0 + by1) / 2 + (by1 - by0) * (0.0119 + 0.027 * attempt)
        subs = [(bx0, mx, by0, my), (mx, bx1, by0, my), (bx0, mx, my, by1), (mx, bx1, my, by1)]
        try:
            counts = [count(sb) for sb in subs]
            break
        except BoundaryZero:
            if attempt == 4:
                raise
    for sb, c in zip(subs, counts):
        if c:
            _isolate(f, sb, c, count, found, width, ctx, depth + 1)


def _inside(z, box, margin: float = 0.1) -> bool:
    bx0, bx1, by0, by1 = box
    mx, my = (bx1 - bx0) * margin, (by1 - by0) * margin
    return bx0 - mx <= float(z.real) <= bx1 + mx and by0 - my <= float(z.imag) <= by1 + my


def _polish(f, df, box, k, count, ctx, tol, levels: int = 40):
    """Newton from the box center, shrinking the box until the iterate stays inside it."""
    for _ in range(levels):
        bx0, bx1, by0, by1 = box
        z = _newton(f, df, ctx.mpc(complex((bx0 + bx1) / 2, (by0 + by1) / 2)), ctx, tol)
        if _inside(z, box) or k > 1:
            return z
        mx, my = (bx0 + bx1) / 2, (by0 + by1) / 2
        subs = [(bx0, mx, by0, my), (mx, bx1, by0, my), (bx0, mx, my, by1), (mx, bx1, my, by1)]
        try:
            box = next(sb for sb in subs if count(sb))
        except (BoundaryZero, StopIteration):
            return z
    return z


def _newton(f, df, z, ctx, tol, iters: int = 100):
    h = ctx.mpf(2) ** (-ctx.prec // 3)
    for _ in range(iters):
        fz = f(z)
        if fz == 0:
            return z
        d = df(z) if df is not None else (f(z + h) - f(z - h)) / (2 * h)
        if d == 0:
            return z
        step = fz / d
        z = z - step
        if abs(step) <= ctx.mpf(2) ** (-ctx.prec + 8) * max(1, abs(z)):
            return z
    return z
