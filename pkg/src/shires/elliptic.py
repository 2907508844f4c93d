"""Weierstrass functions for the lattice Z + tau Z and symbolic elements of
the function field of y^2 = 4x^3 - g2 x - g3.

The hexagonal (tau = e^{i pi/3}, g2 = 0) and square (tau = i, g3 = 0)
lattices admit an exact normal form: after the substitution
x = a X, y = b Y, d/dz = s d/du the curve becomes Y^2 = 4X^3 - G2 X - G3
with (G2, G3) = (0, 1) or (4, 0), so iteration runs over Gaussian
rationals and only the final evaluation touches floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .exactalg import GaussianRational, InvalidInput, Poly, context

GR = GaussianRational


class NearPole(ValueError):
    pass


# ---------------------------------------------------------------------------
# lattices and invariants
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Lattice:
    """The lattice Z + tau Z.  ``name`` is ``"hex"``, ``"square"`` or a literal."""

    name: str = "hex"

    def tau(self, ctx):
        if self.name == "hex":
            return ctx.expjpi(ctx.mpf(1) / 3)
        if self.name == "square":
            return ctx.mpc(0, 1)
        t = complex(self.name.replace(" ", "").replace("i", "j"))
        return ctx.mpc(t.real, t.imag)

    @property
    def tau_complex(self) -> complex:
        return complex(self.tau(context(64)))

    def __post_init__(self):
        if self.tau_complex.imag <= 0:
            raise InvalidInput("lattice requires Im(tau) > 0")

    @property
    def exact_form(self) -> bool:
        return self.name in ("hex", "square")

    def periods(self):
        return (1.0 + 0j, self.tau_complex)

    def half_periods(self, ctx=None):
        ctx = ctx or context(64)
        t = self.tau(ctx)
        return (ctx.mpc(0.5), t / 2, (1 + t) / 2)

    def reduce_float(self, z):
        """Map complex array ``z`` to the representative u + v tau, u, v in [-1/2, 1/2)."""
        t = self.tau_complex
        z = np.asarray(z, dtype=complex)
        v = z.imag / t.imag
        u = z.real - v * t.real
        u = u - np.floor(u + 0.5)
        v = v - np.floor(v + 0.5)
        return u + v * t

    def coords(self, z):
        """Real lattice coordinates (u, v) of z = u + v tau."""
        t = self.tau_complex
        z = np.asarray(z, dtype=complex)
        v = z.imag / t.imag
        return z.real - v * t.real, v


@lru_cache(maxsize=64)
def invariants(lattice: Lattice, prec: int = 256):
    """(g2, g3) from the Eisenstein q-series, truncated when the tail bound
    drops below 2^-prec."""
    ctx = context(prec + 32)
    q = ctx.exp(2j * ctx.pi * lattice.tau(ctx))
    aq = abs(q)
    if aq >= 1:
        raise InvalidInput("lattice requires Im(tau) > 0")
    e4 = ctx.mpc(1)
    e6 = ctx.mpc(1)
    qn = ctx.mpc(1)
    eps = ctx.mpf(2) ** (-prec - 8)
    n = 0
    while True:
        n += 1
        qn *= q
        s3 = sum(d ** 3 for d in range(1, n + 1) if n % d == 0)
        s5 = sum(d ** 5 for d in range(1, n + 1) if n % d == 0)
        e4 += 240 * s3 * qn
        e6 -= 504 * s5 * qn
        # sigma_5(k) <= 1.04 k^5 and the terms decrease geometrically past here
        ratio = aq * ((n + 2) / (n + 1)) ** 5
        if ratio < 1:
            tail = 504 * 1.04 * (n + 1) ** 5 * aq ** (n + 1) / (1 - ratio)
            if tail < eps:
                break
        if n > 100000:
            raise InvalidInput("Eisenstein series failed to converge")
    pi = ctx.pi
    g2 = 4 * pi ** 4 / 3 * e4
    g3 = 8 * pi ** 6 / 27 * e6
    out = context(prec)
    if lattice.name == "hex":
        g2 = out.mpc(0)
    if lattice.name == "square":
        g3 = out.mpc(0)
    return out.mpc(g2), out.mpc(g3)


def wp_eval(lattice: Lattice, z, prec: int = 256):
    """Return (wp(z), wp'(z)) for the lattice Z + tau Z via Jacobi thetas."""
    ctx = context(prec + 24)
    tau = lattice.tau(ctx)
    z = ctx.mpc(z)
    # reduce to the fundamental cell centered at 0
    v = ctx.floor(z.imag / tau.imag + 0.5)
    z = z - v * tau
    u = ctx.floor(z.real + 0.5)
    z = z - u
    if abs(z) < ctx.mpf(2) ** (-prec // 4):
        raise NearPole(f"point within tolerance of a lattice point: {complex(z)}")
    q = ctx.expjpi(tau)
    pz = ctx.pi * z
    t2 = ctx.jtheta(2, 0, q)
    t3 = ctx.jtheta(3, 0, q)
    t1z = ctx.jtheta(1, pz, q)
    t4z = ctx.jtheta(4, pz, q)
    d1z = ctx.jtheta(1, pz, q, 1)
    d4z = ctx.jtheta(4, pz, q, 1)
    K = (ctx.pi * t2 * t3) ** 2
    ratio = t4z / t1z
    wp = K * ratio ** 2 - ctx.pi ** 2 / 3 * (t2 ** 4 + t3 ** 4)
    dratio = ctx.pi * (d4z * t1z - t4z * d1z) / t1z ** 2
    wpp = 2 * K * ratio * dratio
    out = context(prec)
    return out.mpc(wp), out.mpc(wpp)


def wp_row_sum(lattice: Lattice, z, prec: int = 256):
    """Independent evaluation of wp by lattice summation with exact row sums.

    Each horizontal row {m + k tau} is summed in closed form with
    sum_m 1/(w - m)^2 = pi^2 / sin^2(pi w); rows decay like |q|^k, and the
    loop stops when the row term falls below 2^-(prec+8).
    """
    ctx = context(prec + 32)
    tau = lattice.tau(ctx)
    z = ctx.mpc(z)
    pi2 = ctx.pi ** 2
    total = pi2 / ctx.sin(ctx.pi * z) ** 2 - pi2 / 3
    eps = ctx.mpf(2) ** (-prec - 8)
    k = 0
    while True:
        k += 1
        row = ctx.mpc(0)
        for sgn in (1, -1):
            w = k * sgn * tau
            row += pi2 / ctx.sin(ctx.pi * (z - w)) ** 2 - pi2 / ctx.sin(ctx.pi * w) ** 2
        total += row
        if abs(row) < eps and k > 2:
            break
    return context(prec).mpc(total)


def wp_numpy(lattice: Lattice, z, terms: int = 12):
    """Vectorized double-precision (wp, wp') on an array of points."""
    tau = lattice.tau_complex
    z = lattice.reduce_float(z)
    q = np.exp(1j * np.pi * tau)
    x = np.pi * z
    t1 = np.zeros_like(x)
    t4 = np.ones_like(x)
    d1 = np.zeros_like(x)
    d4 = np.zeros_like(x)
    t2 = 0j
    t3 = 1 + 0j
    for n in range(terms):
        qa = q ** ((n + 0.5) ** 2)
        t1 = t1 + 2 * (-1) ** n * qa * np.sin((2 * n + 1) * x)
        d1 = d1 + 2 * (-1) ** n * qa * (2 * n + 1) * np.cos((2 * n + 1) * x)
        t2 += 2 * qa
        if n >= 1:
            qb = q ** (n * n)
            t4 = t4 + 2 * (-1) ** n * qb * np.cos(2 * n * x)
            d4 = d4 - 2 * (-1) ** n * qb * 2 * n * np.sin(2 * n * x)
            t3 += 2 * qb
    K = (np.pi * t2 * t3) ** 2
    ratio = t4 / t1
    wp = K * ratio ** 2 - np.pi ** 2 / 3 * (t2 ** 4 + t3 ** 4)
    wpp = 2 * K * ratio * np.pi * (d4 * t1 - t4 * d1) / t1 ** 2
    return wp, wpp


def wp_inverse(lattice: Lattice, x0, prec: int = 256, seeds: int = 48):
    """Solve wp(z) = x0 for z; returns the representative in the reduced cell.

    Seeds come from a double-precision grid search over the cell, then Newton
    polishes at ``prec`` bits.  The second solution is the negative.
    """
    ctx = context(prec)
    x0 = ctx.mpc(x0)
    t = lattice.tau_complex
    g = np.linspace(-0.5, 0.5, seeds, endpoint=False) + 0.5 / seeds
    U, V = np.meshgrid(g, g)
    zz = (U + V * t).ravel()
    wz, _ = wp_numpy(lattice, zz)
    x0c = complex(x0)
    if not np.isfinite(x0c):
        raise InvalidInput("wp_inverse of infinity is the lattice point 0")
    err = np.abs(wz - x0c) / (1 + abs(x0c))
    order = np.argsort(err)
    tol = ctx.mpf(2) ** (-prec + 16) * (1 + abs(x0))
    best = None
    for idx in order[:6]:
        z = ctx.mpc(zz[idx])
        if abs(x0c) > 1e4:
            z = ctx.mpc(1 / np.sqrt(x0c))
        for _ in range(200):
            w, wp1 = wp_eval(lattice, z, prec)
            r = w - x0
            if abs(r) <= tol:
                break
            if abs(wp1) == 0:
                break
            step = r / wp1
            # damp steps that leave the cell
            if abs(step) > 0.25:
                step = step * (0.25 / abs(step))
            z = z - step
        w, _ = wp_eval(lattice, z, prec)
        if abs(w - x0) <= tol * 1024:
            best = z
            break
    if best is None:
        raise InvalidInput(f"wp_inverse failed for x0={x0c}")
    tau = lattice.tau(ctx)
    best = best - ctx.floor(best.imag / tau.imag + 0.5) * tau
    return best - ctx.floor(best.real + 0.5)


# ---------------------------------------------------------------------------
# normalized curve and elements of the function field
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Curve:
    """Normalized curve Y^2 = 4X^3 - G2 X - G3 with derivation X' = Y, Y' = 6X^2 - G2/2.

    ``a, b, s`` relate it to the Weierstrass pair: wp = a X, wp' = b Y and
    d/dz = s d/du.  They are mpmath numbers at ``prec`` bits.
    """

    lattice: Lattice
    G2: object
    G3: object
    prec: int = 256
    exact: bool = True

    @classmethod
    def of(cls, lattice: Lattice, prec: int = 256) -> "Curve":
        if lattice.name == "hex":
            return cls(lattice, GR(0), GR(1), prec, True)
        if lattice.name == "square":
            return cls(lattice, GR(4), GR(0), prec, True)
        g2, g3 = invariants(lattice, prec)
        return cls(lattice, g2, g3, prec, False)

    def coef(self, v):
        """Scalar ``v`` in the curve's coefficient field."""
        return GR(v) if self.exact else context(self.prec).mpc(v)

    def poly(self, coeffs) -> Poly:
        return Poly([self.coef(c) if isinstance(c, (int, str)) else c for c in coeffs])

    @property
    def cubic(self) -> Poly:
        return Poly([-self.G3, -self.G2, self.coef(0), self.coef(4)])

    @property
    def sder(self) -> Poly:
        """Y' as a polynomial in X."""
        return Poly([-self.G2 / 2, self.coef(0), self.coef(6)])

    def scales(self, prec: int | None = None):
        """(a, b, s) at ``prec`` bits."""
        ctx = context(prec or self.prec)
        g2, g3 = invariants(self.lattice, prec or self.prec)
        if self.lattice.name == "hex":
            a = ctx.cbrt(g3)
            b = ctx.sqrt(a ** 3)
        elif self.lattice.name == "square":
            a = ctx.sqrt(g2 / 4)
            b = ctx.sqrt(a ** 3)
        else:
            return ctx.mpc(1), ctx.mpc(1), ctx.mpc(1)
        return ctx.mpc(a), ctx.mpc(b), ctx.mpc(b / a)

    @property
    def bases(self) -> tuple:
        """Factors of the cubic used for denominators (exact: coprime basis over Q(i))."""
        return _curve_bases(self)


@lru_cache(maxsize=16)
def _curve_bases(curve: Curve) -> tuple:
    c = curve.cubic
    if not curve.exact:
        return (c.monic(),)
    from .exactalg import gaussian_roots

    roots = gaussian_roots(c)
    out = []
    rest = c.monic()
    for r in roots:
        lin = Poly([-r, GR(1)])
        out.append(lin)
        rest = rest.exact_div(lin)
    if rest.degree > 0:
        out.append(rest.monic())
    return tuple(out)


def _divides(p: Poly, b: Poly, exact: bool) -> Poly | None:
    if p.is_zero():
        return p
    q, r = p.divmod(b)
    if exact:
        return q if r.is_zero() else None
    scale = max(abs(c) for c in p.coeffs)
    if all(abs(c) <= scale * _num_tol(b) for c in r.coeffs):
        return q
    return None


def _num_tol(b: Poly):
    c = b.coeffs[0]
    prec = getattr(getattr(c, "context", None), "prec", 256)
    return 2.0 ** (-(prec // 2))


@dataclass(frozen=True)
class EllipticElement:
    """(n0(X) + n1(X) Y) / prod(bases[j]^exps[j]) on a normalized curve."""

    curve: Curve
    n0: Poly
    n1: Poly
    exps: tuple = ()

    def __post_init__(self):
        if not self.exps:
            object.__setattr__(self, "exps", tuple(0 for _ in self.curve.bases))

    @classmethod
    def x(cls, curve: Curve) -> "EllipticElement":
        return cls(curve, curve.poly([0, 1]), Poly([]))

    @classmethod
    def y(cls, curve: Curve) -> "EllipticElement":
        return cls(curve, Poly([]), curve.poly([1]))

    def is_zero(self) -> bool:
        return self.n0.is_zero() and self.n1.is_zero()

    @property
    def den(self) -> Poly:
        d = self.curve.poly([1])
        for b, e in zip(self.curve.bases, self.exps):
            d = d * b ** e
        return d

    def reduced(self) -> "EllipticElement":
        n0, n1 = self.n0, self.n1
        exps = list(self.exps)
        for j, b in enumerate(self.curve.bases):
            while exps[j] > 0:
                q0 = _divides(n0, b, self.curve.exact)
                q1 = _divides(n1, b, self.curve.exact)
                if q0 is None or q1 is None:
                    break
                n0, n1 = q0, q1
                exps[j] -= 1
        return EllipticElement(self.curve, n0, n1, tuple(exps))

    def derive(self) -> "EllipticElement":
        """d/du with X' = Y, Y' = 6X^2 - G2/2, reduced modulo the curve."""
        return elliptic_derive(self)

    def divide_by_y(self) -> "EllipticElement":
        """Multiply by 1/Y = Y / C(X)."""
        # (n0 + n1 Y)/Y = (n1 C + n0 Y)/C
        C = self.curve.cubic
        n0 = self.n1 * C
        n1 = self.n0
        exps = list(self.exps)
        lc = C.lead
        n0 = n0 * (1 / lc)
        n1 = n1 * (1 / lc)
        for j in range(len(exps)):
            exps[j] += 1
        return EllipticElement(self.curve, n0, n1, tuple(exps)).reduced()

    def evaluate(self, X, Y):
        """Value at a curve point given numeric normalized coordinates."""
        ctx = context(self.curve.prec)
        num = self.n0.eval_big(X, ctx) + self.n1.eval_big(X, ctx) * Y
        return num / self.den.eval_big(X, ctx)

    @property
    def total_degree(self) -> int:
        return max(self.n0.degree, self.n1.degree + 1, self.den.degree)


def elliptic_derive(e: EllipticElement) -> EllipticElement:
    cur = e.curve
    C = cur.cubic
    S = cur.sder
    B = cur.poly([1])
    L = Poly([])
    active = [(b, k) for b, k in zip(cur.bases, e.exps) if k > 0]
    for b, _ in active:
        B = B * b
    for b, k in active:
        L = L + (B.exact_div(b) if cur.exact else B.divmod(b)[0]) * b.derivative() * k
    n0, n1 = e.n0, e.n1
    # numerator over D*B:  a + b Y
    a = B * (n1.derivative() * C + n1 * S) - L * n1 * C
    bpart = B * n0.derivative() - L * n0
    exps = tuple(k + 1 if k > 0 else 0 for k in e.exps)
    return EllipticElement(cur, a, bpart, exps).reduced()
