"""Exact and multiprecision arithmetic: Gaussian rationals, polynomials,
rational maps and truncated Taylor windows.

Every value here is immutable.  Multiprecision numbers are ``mpmath`` values
created from a per-precision context (see :func:`context`), so precision is a
property of the value's context rather than of global state.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import gcd
from typing import Iterable, Sequence

import mpmath
from mpmath.ctx_mp import MPContext

__all__ = [
    "INF",
    "GaussianRational",
    "Poly",
    "RationalMap",
    "SeriesWindow",
    "PoleAtCenter",
    "InvalidInput",
    "UndefinedOrder",
    "context",
    "to_big",
    "reduce",
    "series_expand",
    "laurent_expand",
    "laurent_order",
    "coprime_basis",
    "squarefree_part",
    "gaussian_roots",
]


class InvalidInput(ValueError):
    pass


class UndefinedOrder(ValueError):
    pass


class PoleAtCenter(ValueError):
    def __init__(self, order: int):
        super().__init__(f"expansion center is a pole of order {order}")
        self.order = order


class _Infinity:
    """The point at infinity of the Riemann sphere (singleton)."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self):
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()


# ---------------------------------------------------------------------------
# multiprecision contexts
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def context(prec: int) -> MPContext:
    """Return a private mpmath context fixed at ``prec`` bits (prec >= 64)."""
    if prec < 64:
        raise InvalidInput("precision must be at least 64 bits")
    ctx = MPContext()
    ctx.prec = int(prec)
    return ctx


def to_big(x, ctx: MPContext):
    """Convert an exact or floating scalar into an ``mpc`` of ``ctx``."""
    if isinstance(x, GaussianRational):
        d = ctx.mpf(x.d)
        return ctx.mpc(ctx.mpf(x.a) / d, ctx.mpf(x.b) / d)
    if isinstance(x, Fraction):
        return ctx.mpc(ctx.mpf(x.numerator) / x.denominator)
    if isinstance(x, (mpmath.mpc, mpmath.mpf)) or hasattr(x, "_mpc_") or hasattr(x, "_mpf_"):
        return ctx.mpc(x)
    return ctx.mpc(x)


# ---------------------------------------------------------------------------
# Gaussian rationals
# ---------------------------------------------------------------------------

class GaussianRational:
    """Exact complex rational ``(a + b i)/d`` with ``d > 0`` in lowest terms."""

    __slots__ = ("a", "b", "d", "_hash")

    def __init__(self, re=0, im=0):
        if isinstance(re, GaussianRational) and im == 0:
            self.a, self.b, self.d = re.a, re.b, re.d
            self._hash = None
            return
        if isinstance(re, str):
            g = GaussianRational.parse(re)
            if im != 0:
                g = g + GaussianRational(0, 1) * GaussianRational(im)
            self.a, self.b, self.d = g.a, g.b, g.d
            self._hash = None
            return
        r = Fraction(re)
        s = Fraction(im)
        d = r.denominator * s.denominator // gcd(r.denominator, s.denominator)
        a = r.numerator * (d // r.denominator)
        b = s.numerator * (d // s.denominator)
        self.a, self.b, self.d = a, b, d
        self._hash = None

    @classmethod
    def _make(cls, a: int, b: int, d: int) -> "GaussianRational":
        if d < 0:
            a, b, d = -a, -b, -d
        g = gcd(gcd(a, b), d)
        if g != 1:
            a //= g
            b //= g
            d //= g
        obj = object.__new__(cls)
        obj.a, obj.b, obj.d = a, b, d
        obj._hash = None
        return obj

    @classmethod
    def parse(cls, text: str) -> "GaussianRational":
        """Parse literals such as ``"3/4+1/2 i"``, ``"-2i"``, ``"5"``, ``"i"``."""
        t = text.replace(" ", "")
        try:
            if not t.endswith("i"):
                return cls(Fraction(t))
            body = t[:-1].rstrip("*")
            k = max(body.rfind("+"), body.rfind("-"))
            real, imag = (body[:k], body[k:]) if k > 0 else ("0", body)
            if imag in ("", "+", "-"):
                imag += "1"
            return cls(Fraction(real), Fraction(imag))
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"bad rational literal {text!r}") from exc

    # accessors -----------------------------------------------------------
    @property
    def re(self) -> Fraction:
        return Fraction(self.a, self.d)

    @property
    def im(self) -> Fraction:
        return Fraction(self.b, self.d)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def conjugate(self) -> "GaussianRational":
        return GaussianRational._make(self.a, -self.b, self.d)

    def abs2(self) -> Fraction:
        return Fraction(self.a * self.a + self.b * self.b, self.d * self.d)

    def __complex__(self):
        return complex(Fraction(self.a, self.d), Fraction(self.b, self.d))

    def is_real(self) -> bool:
        return self.b == 0

    def is_integral(self) -> bool:
        return self.d == 1

    # arithmetic ----------------------------------------------------------
    @staticmethod
    def _coerce(o):
        if isinstance(o, GaussianRational):
            return o
        if isinstance(o, int):
            return GaussianRational._make(o, 0, 1)
        if isinstance(o, Fraction):
            return GaussianRational._make(o.numerator, 0, o.denominator)
        return NotImplemented

    def __add__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        if self.d == o.d:
            return GaussianRational._make(self.a + o.a, self.b + o.b, self.d)
        return GaussianRational._make(
            self.a * o.d + o.a * self.d, self.b * o.d + o.b * self.d, self.d * o.d
        )

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational._make(-self.a, -self.b, self.d)

    def __sub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return o + (-self)

    def __mul__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return GaussianRational._make(
            self.a * o.a - self.b * o.b, self.a * o.b + self.b * o.a, self.d * o.d
        )

    __rmul__ = __mul__

    def __truediv__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        n2 = o.a * o.a + o.b * o.b
        if n2 == 0:
            raise ZeroDivisionError("division by zero Gaussian rational")
        # (a+bi)/d / ((c+ei)/f) = (a+bi)(c-ei) f / (d (c^2+e^2))
        a = (self.a * o.a + self.b * o.b) * o.d
        b = (self.b * o.a - self.a * o.b) * o.d
        return GaussianRational._make(a, b, self.d * n2)

    def __rtruediv__(self, o):
        o = self._coerce(o)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, k: int):
        if k < 0:
            return GaussianRational(1) / (self ** (-k))
        out = GaussianRational._make(1, 0, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __eq__(self, o):
        if isinstance(o, GaussianRational):
            return self.a == o.a and self.b == o.b and self.d == o.d
        if isinstance(o, (int, Fraction)):
            return self.b == 0 and Fraction(self.a, self.d) == o
        if isinstance(o, complex):
            return complex(self) == o
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.a, self.b, self.d))
        return self._hash

    def __bool__(self):
        return not self.is_zero()

    def __repr__(self):
        return f"GaussianRational({self})"

    def __str__(self):
        r, i = self.re, self.im
        if i == 0:
            return str(r)
        if r == 0:
            return f"{i} i"
        sign = "+" if i > 0 else "-"
        return f"{r}{sign}{abs(i)} i"


GR = GaussianRational
_ZERO = GaussianRational._make(0, 0, 1)
_ONE = GaussianRational._make(1, 0, 1)


def _is_zero(c) -> bool:
    if isinstance(c, GaussianRational):
        return c.a == 0 and c.b == 0
    return c == 0


def _is_exact(c) -> bool:
    return isinstance(c, (GaussianRational, int, Fraction))


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------

_KARATSUBA_CUTOFF = 512


def _mul_school(a: Sequence, b: Sequence) -> list:
    if not a or not b:
        return []
    out = [a[-1] * b[-1] * 0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if _is_zero(x):
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return out


def _add_lists(a: Sequence, b: Sequence) -> list:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, y in enumerate(b):
        out[i] = out[i] + y
    return out


def _mul_kara(a: Sequence, b: Sequence) -> list:
    n = max(len(a), len(b))
    if min(len(a), len(b)) <= _KARATSUBA_CUTOFF:
        return _mul_school(a, b)
    h = n // 2
    a0, a1 = a[:h], a[h:]
    b0, b1 = b[:h], b[h:]
    z0 = _mul_kara(a0, b0)
    z2 = _mul_kara(a1, b1)
    z1 = _mul_kara(_add_lists(a0, a1), _add_lists(b0, b1))
    mid = _add_lists(z1, [-c for c in _add_lists(z0, z2)])
    out = [a[-1] * b[-1] * 0] * (len(a) + len(b) - 1)
    for i, c in enumerate(z0):
        out[i] = out[i] + c
    for i, c in enumerate(mid):
        out[i + h] = out[i + h] + c
    for i, c in enumerate(z2):
        out[i + 2 * h] = out[i + 2 * h] + c
    return out


class Poly:
    """Univariate polynomial with ascending coefficients.

    Coefficients are Gaussian rationals (exact) or mpmath complex numbers.
    Trailing zero coefficients are dropped, so ``degree`` is exact for exact
    coefficient fields.  The zero polynomial has degree ``-1``.
    """

    __slots__ = ("coeffs", "_cache")

    def __init__(self, coeffs: Iterable = ()):
        cs = [GaussianRational(c) if isinstance(c, (int, Fraction, str)) else c for c in coeffs]
        while cs and _is_zero(cs[-1]):
            cs.pop()
        self.coeffs = tuple(cs)
        self._cache = {}

    @classmethod
    def _raw(cls, cs: list) -> "Poly":
        while cs and _is_zero(cs[-1]):
            cs.pop()
        obj = object.__new__(cls)
        obj.coeffs = tuple(cs)
        obj._cache = {}
        return obj

    @classmethod
    def monomial(cls, k: int, c=_ONE) -> "Poly":
        return cls._raw([_ZERO] * k + [c])

    @classmethod
    def const(cls, c) -> "Poly":
        return cls([c])

    @classmethod
    def from_roots(cls, roots: Iterable) -> "Poly":
        p = cls([_ONE])
        for r in roots:
            p = p * cls([-GaussianRational(r) if _is_exact(r) else -r, _ONE])
        return p

    X = None  # set below

    # structure -----------------------------------------------------------
    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    @property
    def lead(self):
        return self.coeffs[-1] if self.coeffs else _ZERO

    def is_exact(self) -> bool:
        return all(_is_exact(c) for c in self.coeffs)

    def __len__(self):
        return len(self.coeffs)

    def __getitem__(self, k):
        if isinstance(k, slice):
            return self.coeffs[k]
        return self.coeffs[k] if 0 <= k < len(self.coeffs) else _ZERO

    def __eq__(self, o):
        if isinstance(o, Poly):
            return self.coeffs == o.coeffs
        if isinstance(o, (int, Fraction, GaussianRational)):
            return self == Poly([o])
        return NotImplemented

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Poly({[str(c) for c in self.coeffs]})"

    # arithmetic ----------------------------------------------------------
    def _coerce(self, o) -> "Poly":
        if isinstance(o, Poly):
            return o
        return Poly([o])

    def __add__(self, o):
        o = self._coerce(o)
        return Poly._raw(_add_lists(self.coeffs, o.coeffs))

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw([-c for c in self.coeffs])

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        if not isinstance(o, Poly):
            if _is_zero(o):
                return Poly._raw([])
            return Poly._raw([c * o for c in self.coeffs])
        return Poly._raw(_mul_kara(self.coeffs, o.coeffs))

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = Poly([_ONE])
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def scale(self, c) -> "Poly":
        return self * c

    def shift_up(self, k: int) -> "Poly":
        """Multiply by ``z**k``."""
        if not self.coeffs:
            return self
        return Poly._raw([_ZERO] * k + list(self.coeffs))

    def divmod(self, o: "Poly"):
        if o.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.coeffs)
        dv = o.degree
        if len(r) - 1 < dv:
            return Poly._raw([]), self
        inv = 1 / o.lead if _is_exact(o.lead) else 1 / o.lead
        q = [_ZERO] * (len(r) - dv)
        oc = o.coeffs
        for k in range(len(r) - 1, dv - 1, -1):
            c = r[k]
            if _is_zero(c):
                continue
            c = c * inv
            q[k - dv] = c
            for j in range(dv + 1):
                r[k - dv + j] = r[k - dv + j] - c * oc[j]
        return Poly._raw(q), Poly._raw(r[:dv])

    def __floordiv__(self, o):
        return self.divmod(self._coerce(o))[0]

    def __mod__(self, o):
        return self.divmod(self._coerce(o))[1]

    def exact_div(self, o: "Poly") -> "Poly":
        q, r = self.divmod(o)
        if not r.is_zero():
            raise InvalidInput("polynomial division is not exact")
        return q

    def try_exact_div(self, o: "Poly"):
        """Return the quotient when ``o`` divides exactly, else ``None``."""
        q, r = self.divmod(o)
        return q if r.is_zero() else None

    def derivative(self) -> "Poly":
        return Poly._raw([c * k for k, c in enumerate(self.coeffs)][1:])

    def monic(self) -> "Poly":
        if self.is_zero():
            return self
        inv = 1 / self.lead
        return Poly._raw([c * inv for c in self.coeffs])

    def conjugate(self) -> "Poly":
        return Poly._raw([c.conjugate() for c in self.coeffs])

    def taylor_shift(self, c) -> "Poly":
        """Coefficients of ``p(c + h)`` as a polynomial in ``h``."""
        cs = list(self.coeffs)
        n = len(cs)
        # repeated synthetic division (Horner shift)
        for i in range(n - 1):
            for k in range(n - 2, i - 1, -1):
                cs[k] = cs[k] + c * cs[k + 1]
        return Poly._raw(cs)

    def compose_affine(self, a, b) -> "Poly":
        """``p(a z + b)``."""
        shifted = self.taylor_shift(b)
        pw = _ONE if _is_exact(a) else 1
        out = []
        for c in shifted.coeffs:
            out.append(c * pw)
            pw = pw * a
        return Poly._raw(out)

    def reverse(self, deg: int | None = None) -> "Poly":
        """``z**deg p(1/z)``; ``deg`` defaults to the degree."""
        d = self.degree if deg is None else deg
        cs = list(self.coeffs) + [_ZERO] * (d + 1 - len(self.coeffs))
        return Poly._raw(cs[::-1])

    def __call__(self, z):
        """Horner evaluation; exact for exact inputs."""
        acc = _ZERO if _is_exact(z) else 0
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def big_coeffs(self, ctx: MPContext) -> tuple:
        key = ("big", ctx.prec)
        got = self._cache.get(key)
        if got is None:
            got = tuple(to_big(c, ctx) for c in self.coeffs)
            self._cache[key] = got
        return got

    def eval_big(self, z, ctx: MPContext):
        """Evaluate at an mpc point using coefficients rounded to ``ctx``."""
        acc = ctx.mpc(0)
        for c in reversed(self.big_coeffs(ctx)):
            acc = acc * z + c
        return acc

    def abs_eval_big(self, z, ctx: MPContext):
        """``sum |a_k| |z|^k``: the scale used for backward-error residuals."""
        r = abs(z)
        acc = ctx.mpf(0)
        for c in reversed(self.big_coeffs(ctx)):
            acc = acc * r + abs(c)
        return acc

    def valuation(self, c=None) -> int:
        """Multiplicity of the root ``c`` (default 0)."""
        if self.is_zero():
            raise UndefinedOrder("zero polynomial has no order")
        if c is None or _is_zero(c):
            k = 0
            while _is_zero(self.coeffs[k]):
                k += 1
            return k
        return self.factor_valuation(Poly([-c, _ONE]))[0]

    def factor_valuation(self, base: "Poly"):
        """Return ``(k, q)`` with ``self = base**k * q`` and ``base`` not dividing ``q``."""
        if self.is_zero():
            raise UndefinedOrder("zero polynomial has no order")
        k = 0
        q = self
        while True:
            nq = q.try_exact_div(base)
            if nq is None:
                return k, q
            q = nq
            k += 1

    def strip_zero_root(self):
        """Return ``(k, q)`` with ``self = z**k q`` and ``q(0) != 0``."""
        k = self.valuation()
        return k, Poly._raw(list(self.coeffs[k:]))

    def content_integral(self):
        """Return ``(s, P)`` with ``self = s * P`` and ``P`` having Gaussian-integer coefficients."""
        den = 1
        for c in self.coeffs:
            den = den * c.d // gcd(den, c.d)
        return GaussianRational._make(1, 0, den), Poly._raw(
            [GaussianRational._make(c.a * (den // c.d), c.b * (den // c.d), 1) for c in self.coeffs]
        )

    def to_complex(self) -> list:
        return [complex(c) for c in self.coeffs]


Poly.X = Poly([_ZERO, _ONE])


def poly_gcd(a: Poly, b: Poly) -> Poly:
    """Monic gcd over the Gaussian rationals (Euclid with monic remainders)."""
    if not (a.is_exact() and b.is_exact()):
        raise InvalidInput("exact gcd requires exact coefficients")
    a, b = a.monic(), b.monic()
    while not b.is_zero():
        a, b = b, (a % b).monic()
    return a if a.is_zero() else a.monic()


def squarefree_part(p: Poly) -> Poly:
    """Monic squarefree part ``p / gcd(p, p')``."""
    if p.degree <= 0:
        return Poly([_ONE])
    g = poly_gcd(p, p.derivative())
    return p.exact_div(g).monic()


def coprime_basis(polys: Iterable[Poly]) -> list[Poly]:
    """Pairwise coprime, squarefree, monic, non-constant polynomials whose
    products generate every input up to units."""
    basis: list[Poly] = []
    for p in polys:
        if p.degree <= 0:
            continue
        pending = [squarefree_part(p)]
        while pending:
            q = pending.pop()
            if q.degree <= 0:
                continue
            for i, b in enumerate(basis):
                g = poly_gcd(q, b)
                if g.degree > 0:
                    basis.pop(i)
                    for part in (g, b.exact_div(g), q.exact_div(g)):
                        if part.degree > 0:
                            pending.append(part.monic())
                    break
            else:
                basis.append(q.monic())
    basis.sort(key=lambda b: (b.degree, [(c.a, c.b, c.d) for c in b.coeffs]))
    return basis


def gaussian_roots(p: Poly, max_den: int = 10**6) -> list[GaussianRational]:
    """Exact Gaussian-rational roots of ``p`` (found numerically, verified exactly)."""
    if p.degree <= 0:
        return []
    q = squarefree_part(p)
    if q.degree == 1:
        return [-q[0] / q[1]]
    ctx = context(128)
    approx = mpmath.polyroots([to_big(c, ctx) for c in reversed(q.coeffs)], maxsteps=200, extraprec=256)
    found = []
    for r in approx:
        cand = GaussianRational(
            Fraction(float(r.real)).limit_denominator(max_den) if abs(r.real) > 1e-30 else 0,
            Fraction(float(r.imag)).limit_denominator(max_den) if abs(r.imag) > 1e-30 else 0,
        )
        if _is_zero(q(cand)) and cand not in found:
            found.append(cand)
    return found


# ---------------------------------------------------------------------------
# rational maps and series
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RationalMap:
    """``num/den`` in lowest terms with monic denominator (use :func:`reduce`)."""

    num: Poly
    den: Poly

    @classmethod
    def from_polys(cls, num: Poly, den: Poly | None = None) -> "RationalMap":
        return reduce(cls(num, den if den is not None else Poly([_ONE])))

    @classmethod
    def const(cls, c) -> "RationalMap":
        return cls(Poly([c]), Poly([_ONE]))

    def is_zero(self) -> bool:
        return self.num.is_zero()

    def __call__(self, z):
        return self.num(z) / self.den(z)

    def __add__(self, o: "RationalMap") -> "RationalMap":
        return reduce(RationalMap(self.num * o.den + o.num * self.den, self.den * o.den))

    def __sub__(self, o: "RationalMap") -> "RationalMap":
        return reduce(RationalMap(self.num * o.den - o.num * self.den, self.den * o.den))

    def __mul__(self, o):
        if isinstance(o, RationalMap):
            return reduce(RationalMap(self.num * o.num, self.den * o.den))
        return reduce(RationalMap(self.num * o, self.den))

    def __truediv__(self, o: "RationalMap") -> "RationalMap":
        if o.is_zero():
            raise ZeroDivisionError("division by the zero rational map")
        return reduce(RationalMap(self.num * o.den, self.den * o.num))

    def derivative(self) -> "RationalMap":
        return reduce(
            RationalMap(
                self.num.derivative() * self.den - self.num * self.den.derivative(),
                self.den * self.den,
            )
        )

    @property
    def degree(self) -> int:
        return max(self.num.degree, self.den.degree)

    def __str__(self):
        return f"({self.num.coeffs}) / ({self.den.coeffs})"


def reduce(r: RationalMap) -> RationalMap:
    """Cancel the gcd of numerator and denominator and make the denominator monic."""
    if r.den.is_zero():
        raise InvalidInput("zero denominator")
    if r.num.is_zero():
        return RationalMap(Poly([]), Poly([_ONE]))
    g = poly_gcd(r.num, r.den)
    num, den = r.num, r.den
    if g.degree > 0:
        num, den = num.exact_div(g), den.exact_div(g)
    lc = den.lead
    inv = 1 / lc
    return RationalMap(num * inv, den * inv)


@dataclass(frozen=True)
class SeriesWindow:
    """Exact Taylor coefficients ``c_0..c_N`` of a function at ``center``."""

    center: object
    coefficients: tuple
    order: int = 0  # leading power for Laurent windows (negative at a pole)

    @property
    def N(self) -> int:
        return len(self.coefficients) - 1


def _series_div(num: Sequence, den: Sequence, count: int) -> list:
    """First ``count`` coefficients of num/den, assuming den[0] != 0."""
    inv = 1 / den[0]
    out = []
    for k in range(count):
        acc = num[k] if k < len(num) else _ZERO
        for j in range(1, min(k, len(den) - 1) + 1):
            acc = acc - den[j] * out[k - j]
        out.append(acc * inv)
    return out


def laurent_expand(r: RationalMap, center, count: int) -> SeriesWindow:
    """Laurent window: ``coefficients[k]`` multiplies ``h**(order + k)``."""
    if r.is_zero():
        raise UndefinedOrder("zero map has no expansion")
    if center is INF:
        # w = 1/z: r = num(1/w)/den(1/w) = w^{dd-dn} rev(num)/rev(den)
        rn, rd = r.num.reverse(), r.den.reverse()
        shift = r.den.degree - r.num.degree
    else:
        c = GaussianRational(center) if _is_exact(center) else center
        rn, rd = r.num.taylor_shift(c), r.den.taylor_shift(c)
        shift = 0
    kn, rn = rn.strip_zero_root()
    kd, rd = rd.strip_zero_root()
    return SeriesWindow(center, tuple(_series_div(rn.coeffs, rd.coeffs, count)), shift + kn - kd)


def series_expand(r: RationalMap, center, N: int) -> SeriesWindow:
    """Exact Taylor coefficients ``c_0..c_N`` of ``r`` at a regular point."""
    if r.is_zero():
        return SeriesWindow(center, tuple([_ZERO] * (N + 1)))
    lw = laurent_expand(r, center, N + 1)
    if lw.order < 0:
        raise PoleAtCenter(-lw.order)
    cs = [_ZERO] * lw.order + list(lw.coefficients)
    return SeriesWindow(center, tuple(cs[: N + 1]))


def laurent_order(r: RationalMap, point) -> int:
    """Signed order of ``r`` at ``point`` (``INF`` uses the chart ``w = 1/z``)."""
    if r.is_zero():
        raise UndefinedOrder("the zero map has no order")
    if point is INF:
        return r.den.degree - r.num.degree
    c = GaussianRational(point) if _is_exact(point) else point
    return r.num.valuation(c) - r.den.valuation(c)
