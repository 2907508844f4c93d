"""Concrete (X, omega, f) families and the engine applying T f = df/omega.

Five kinds are supported:

``RationalP1``
    X is the Riemann sphere, omega = w(z) dz with w rational, f rational.
``Monomial``
    The special case omega = z^(-ell) dz (stored with its exponent so the
    geometry layer can use the primitive z^(1-ell)/(1-ell)).
``Superelliptic``
    X is the curve w^ell = P/Q, omega = dz, f = w.  Iterates are tracked by
    the polynomials V_n with w^(n) = V_n w^(1-n ell) / (ell^n Q^(2n)).
``EllipticDz`` / ``EllipticWpPrime``
    X = C / (Z + tau Z) with omega = dz or omega = wp'(z) dz.

Rational iterates keep their denominator as a product of powers of a fixed
coprime basis, so the gcd normalization after each step is a sequence of
exact trial divisions.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import gcd
from pathlib import Path
from typing import Iterator, Sequence

from .elliptic import Curve, EllipticElement, Lattice, wp_eval
from .exactalg import (
    INF,
    GaussianRational,
    InvalidInput,
    Poly,
    RationalMap,
    context,
    coprime_basis,
    gaussian_roots,
    reduce,
    to_big,
)

GR = GaussianRational
KINDS = ("RationalP1", "Monomial", "Superelliptic", "EllipticDz", "EllipticWpPrime")


class UnsupportedScenario(ValueError):
    pass


class ResourceExhausted(RuntimeError):
    def __init__(self, step: int, cause: BaseException):
        super().__init__(f"iteration stopped at step {step}: {cause!r}")
        self.step = step


# ---------------------------------------------------------------------------
# divisors
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RootsOf:
    """Each root of ``poly`` (a point set known only through its polynomial)."""

    poly: Poly
    label: str = ""

    def __repr__(self):
        return f"RootsOf({self.label or self.poly})"


@dataclass(frozen=True)
class DivisorEntry:
    point: object
    chart: str
    order: int
    count: int = 1


@dataclass(frozen=True)
class Divisor:
    entries: tuple = ()

    @property
    def degree(self) -> int:
        return sum(e.order * e.count for e in self.entries)

    @property
    def pole_total(self) -> int:
        """Z_n: total order of the poles."""
        return sum(-e.order * e.count for e in self.entries if e.order < 0)

    @property
    def zero_total(self) -> int:
        return sum(e.order * e.count for e in self.entries if e.order > 0)

    def order_at(self, point) -> int:
        """Order at a point; a RootsOf query matches the entry over the same polynomial."""
        for e in self.entries:
            if isinstance(point, RootsOf):
                if isinstance(e.point, RootsOf) and e.point.poly == point.poly:
                    return e.order
            elif e.point == point or (isinstance(e.point, RootsOf) and _on(point, e.point.poly)):
                return e.order
        return 0

    def poles(self):
        return [e for e in self.entries if e.order < 0]

    def zeros(self):
        return [e for e in self.entries if e.order > 0]


def _on(point, poly: Poly) -> bool:
    if isinstance(point, GaussianRational):
        return poly(point).is_zero()
    return False


# ---------------------------------------------------------------------------
# factored rational functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FactoredRational:
    """num / prod(bases[j] ** exps[j]); bases monic, squarefree, pairwise coprime."""

    num: Poly
    bases: tuple
    exps: tuple

    def is_zero(self) -> bool:
        return self.num.is_zero()

    @property
    def den(self) -> Poly:
        d = Poly([1])
        for b, e in zip(self.bases, self.exps):
            if e:
                d = d * b ** e
        return d

    def to_rational_map(self) -> RationalMap:
        return RationalMap(self.num, self.den)

    def reduced(self) -> "FactoredRational":
        num = self.num
        exps = list(self.exps)
        if num.is_zero():
            return FactoredRational(num, self.bases, tuple(0 for _ in exps))
        for j, b in enumerate(self.bases):
            while exps[j] > 0:
                q = num.try_exact_div(b)
                if q is None:
                    break
                num = q
                exps[j] -= 1
        return FactoredRational(num, self.bases, tuple(exps))

    def derivative(self) -> "FactoredRational":
        active = [j for j, e in enumerate(self.exps) if e > 0]
        B = Poly([1])
        for j in active:
            B = B * self.bases[j]
        L = Poly([])
        for j in active:
            b = self.bases[j]
            L = L + B.exact_div(b) * b.derivative() * self.exps[j]
        num = self.num.derivative() * B - self.num * L
        exps = tuple(e + 1 if e > 0 else 0 for e in self.exps)
        return FactoredRational(num, self.bases, exps).reduced()

    def times_factored(self, scalar, deltas: Sequence[int]) -> "FactoredRational":
        """Multiply by scalar * prod(bases[j] ** -deltas[j])."""
        num = self.num * scalar
        exps = list(self.exps)
        for j, dlt in enumerate(deltas):
            exps[j] += dlt
            if exps[j] < 0:
                num = num * self.bases[j] ** (-exps[j])
                exps[j] = 0
        return FactoredRational(num, self.bases, tuple(exps)).reduced()

    def __call__(self, z):
        return self.num(z) / self.den(z)


def _split_linear(basis: list[Poly]) -> list[Poly]:
    out = []
    for b in basis:
        rest = b
        for r in gaussian_roots(b):
            lin = Poly([-r, GR(1)])
            out.append(lin)
            rest = rest.exact_div(lin)
        if rest.degree > 0:
            out.append(rest.monic())
    return out


def factor_over(p: Poly, bases: Sequence[Poly]):
    """Write ``p = c * prod(bases[j] ** k_j)``; raise if a cofactor remains."""
    ks = []
    rest = p
    for b in bases:
        k, rest = rest.factor_valuation(b)
        ks.append(k)
    if rest.degree > 0:
        raise InvalidInput("polynomial does not factor over the basis")
    return rest[0], ks


# ---------------------------------------------------------------------------
# scenarios
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Scenario:
    """A surface family, a 1-form omega and an initial function f0.

    Kind-specific data lives in the optional fields: ``omega``/``f0`` are
    RationalMaps for the rational kinds; ``P``, ``Q``, ``ell`` define the
    superelliptic curve; ``lattice`` and ``f0`` (an EllipticElement) the
    elliptic kinds.
    """

    kind: str
    omega: RationalMap | None = None
    f0: object = None
    ell: int | None = None
    P: Poly | None = None
    Q: Poly | None = None
    lattice: Lattice | None = None
    precision: int = 256
    name: str = ""

    def __post_init__(self):
        if self.kind not in KINDS:
            raise UnsupportedScenario(f"unknown scenario kind {self.kind!r}")
        if self.precision < 64:
            raise InvalidInput("precision must be at least 64 bits")
        if self.kind in ("RationalP1", "Monomial"):
            if self.omega is None or self.omega.is_zero():
                raise InvalidInput("omega must be a nonzero rational map")
        if self.kind == "Superelliptic":
            if self.P is None or self.Q is None or self.P.is_zero() or self.Q.is_zero():
                raise InvalidInput("superelliptic data needs nonzero P and Q")
            if self.ell is None or self.ell < 2:
                raise InvalidInput("superelliptic exponent must be >= 2")
        if self.kind in ("EllipticDz", "EllipticWpPrime") and self.lattice is None:
            raise InvalidInput("elliptic kinds need a lattice")

    # -- constructors ----------------------------------------------------
    @classmethod
    def rational(cls, omega: RationalMap, f: RationalMap, precision=256, name="") -> "Scenario":
        return cls("RationalP1", omega=reduce(omega), f0=reduce(f), precision=precision, name=name)

    @classmethod
    def monomial(cls, ell: int, f: RationalMap, precision=256, name="") -> "Scenario":
        if ell >= 0:
            om = RationalMap(Poly([1]), Poly.monomial(ell))
        else:
            om = RationalMap(Poly.monomial(-ell), Poly([1]))
        return cls("Monomial", omega=om, f0=reduce(f), ell=ell, precision=precision, name=name)

    @classmethod
    def superelliptic(cls, P: Poly, Q: Poly, ell: int, precision=256, name="") -> "Scenario":
        return cls("Superelliptic", P=P, Q=Q, ell=ell, precision=precision, name=name)

    @classmethod
    def elliptic(cls, kind: str, lattice: Lattice, f0: EllipticElement | None = None, precision=256, name="") -> "Scenario":
        curve = Curve.of(lattice, precision)
        if f0 is None:
            f0 = EllipticElement.x(curve) if kind == "EllipticDz" else EllipticElement.y(curve)
        return cls(kind, f0=f0, lattice=lattice, precision=precision, name=name)

    # -- derived data ----------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.kind in ("RationalP1", "Monomial")

    @property
    def is_elliptic(self) -> bool:
        return self.kind in ("EllipticDz", "EllipticWpPrime")

    @property
    def curve(self) -> Curve:
        return Curve.of(self.lattice, self.precision)

    @property
    def bases(self) -> tuple:
        if self.is_rational:
            return _rational_bases(self.omega, self.f0)
        if self.kind == "Superelliptic":
            return _rational_bases(RationalMap(self.P, Poly([1])), RationalMap(Poly([1]), self.Q))
        return self.curve.bases

    def omega_factors(self):
        """(c_num, k_num, k_den): omega coefficient = c * prod b^k_num / prod b^k_den."""
        return _omega_factors(self.omega, self.f0)

    def initial(self) -> "IterateState":
        if self.is_rational:
            bases = self.bases
            c, ks = factor_over(self.f0.den, bases)
            fr = FactoredRational(self.f0.num * (1 / c), bases, tuple(ks)).reduced()
            return _make_state(self, 0, fr, (0, 0, 0))
        if self.kind == "Superelliptic":
            return _make_state(self, 0, Poly([1]), (0, 0, 0))
        f0 = self.f0
        scale = (1, 0, 0) if self.kind == "EllipticDz" and f0 == EllipticElement.x(self.curve) else (0, 0, 0)
        if self.kind == "EllipticWpPrime" and f0 == EllipticElement.y(self.curve):
            scale = (0, 1, 0)
        return _make_state(self, 0, f0, scale)


def _rational_bases(omega: RationalMap, f: RationalMap) -> tuple:
    return _bases_cached(omega.num, omega.den, f.den)


_BASES_MEMO: dict = {}


def _bases_cached(a: Poly, b: Poly, c: Poly) -> tuple:
    key = (a, b, c)
    got = _BASES_MEMO.get(key)
    if got is None:
        got = tuple(_split_linear(coprime_basis([a, b, c])))
        _BASES_MEMO[key] = got
    return got


def _omega_factors(omega: RationalMap, f: RationalMap):
    bases = _rational_bases(omega, f)
    cn, kn = factor_over(omega.num, bases)
    cd, kd = factor_over(omega.den, bases)
    return cn / cd, kn, kd


# ---------------------------------------------------------------------------
# iterate states
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IterateState:
    """The n-th iterate in the kind's representation plus its divisor.

    ``scale`` holds exponents (ka, kb, ks) of the normal-form constants for
    elliptic kinds: true iterate = a^ka b^kb s^ks * repr.
    """

    n: int
    repr: object
    divisor: Divisor
    scale: tuple = (0, 0, 0)
    zero: bool = False


def _make_state(s: Scenario, n: int, rep, scale) -> IterateState:
    if rep.is_zero():
        return IterateState(n, rep, Divisor(()), scale, True)
    return IterateState(n, rep, compute_divisor(s, n, rep), scale, False)


def apply_T(s: Scenario, st: IterateState) -> IterateState:
    """One application of T f = df / omega."""
    n = st.n
    if st.zero:
        return IterateState(n + 1, st.repr, Divisor(()), st.scale, True)
    if s.is_rational:
        fr = st.repr.derivative()
        if fr.is_zero():
            return IterateState(n + 1, fr, Divisor(()), st.scale, True)
        c, kn, kd = s.omega_factors()
        # divide by c * prod b^kn / prod b^kd
        deltas = [kn[j] - kd[j] for j in range(len(kn))]
        fr = fr.times_factored(1 / c, deltas)
        return _make_state(s, n + 1, fr, st.scale)
    if s.kind == "Superelliptic":
        V = superelliptic_step(st.repr, s.P, s.Q, s.ell, n)
        return _make_state(s, n + 1, V, st.scale)
    e = st.repr.derive()
    ka, kb, ks = st.scale
    if s.kind == "EllipticDz":
        return _make_state(s, n + 1, e, (ka, kb, ks + 1))
    return _make_state(s, n + 1, e.divide_by_y(), (ka, kb - 1, ks + 1))


def trajectory(s: Scenario, n: int) -> Iterator[IterateState]:
    """Yield the states for 0..n."""
    if n < 0:
        raise InvalidInput("iteration count must be nonnegative")
    st = s.initial()
    yield st
    for k in range(n):
        try:
            st = apply_T(s, st)
        except (MemoryError, OverflowError) as exc:
            raise ResourceExhausted(k + 1, exc) from exc
        yield st


def iterate(s: Scenario, n: int) -> IterateState:
    st = None
    for st in trajectory(s, n):
        pass
    return st


# ---------------------------------------------------------------------------
# recurrences of the algebraic examples
# ---------------------------------------------------------------------------

def superelliptic_step(Vn: Poly, P: Poly, Q: Poly, ell: int, n: int) -> Poly:
    """V_{n+1} = ell P Q V_n' - ((n ell - 1) P' Q + (n ell + 1) P Q') V_n."""
    PQ = P * Q
    return (PQ * Vn.derivative()) * ell - (P.derivative() * Q * (n * ell - 1) + P * Q.derivative() * (n * ell + 1)) * Vn


def circle_step(Un: Poly, n: int) -> Poly:
    """U_n = (2n - 3) z U_{n-1} + (1 - z^2) U'_{n-1}; pass U_{n-1} and n."""
    z = Poly.X
    return z * Un * (2 * n - 3) + Poly([1, 0, -1]) * Un.derivative()


def circle_polys(n: int) -> list[Poly]:
    """[U_1, ..., U_n]."""
    out = [Poly.X]
    for k in range(2, n + 1):
        out.append(circle_step(out[-1], k))
    return out


# ---------------------------------------------------------------------------
# divisors of each representation
# ---------------------------------------------------------------------------

def _point_of(b: Poly):
    if b.degree == 1:
        return -b[0] / b[1]
    return RootsOf(b)


def compute_divisor(s: Scenario, n: int, rep) -> Divisor:
    if s.is_rational:
        return _rational_divisor(rep)
    if s.kind == "Superelliptic":
        return _superelliptic_divisor(s, n, rep)
    return _elliptic_divisor(s, rep)


def _rational_divisor(fr: FactoredRational) -> Divisor:
    entries = []
    rest = fr.num
    for b, e in zip(fr.bases, fr.exps):
        if e > 0:
            entries.append(DivisorEntry(_point_of(b), "z", -e, b.degree))
        else:
            k, rest = rest.factor_valuation(b)
            if k:
                entries.append(DivisorEntry(_point_of(b), "z", k, b.degree))
    if rest.degree > 0:
        entries.append(DivisorEntry(RootsOf(rest, "residual numerator"), "z", 1, rest.degree))
    at_inf = sum(e * b.degree for b, e in zip(fr.bases, fr.exps)) - fr.num.degree
    if at_inf:
        entries.append(DivisorEntry(INF, "w=1/z", at_inf, 1))
    return Divisor(tuple(entries))


def _superelliptic_divisor(s: Scenario, n: int, V: Poly) -> Divisor:
    ell, P, Q = s.ell, s.P, s.Q
    bases = s.bases
    entries = []
    rest = V
    for b in bases:
        k, rest = rest.factor_valuation(b)
        if P.try_exact_div(b) is not None:
            order = ell * k - (n * ell - 1)
        else:
            order = ell * k - (n * ell + 1)
        if order:
            entries.append(DivisorEntry(_point_of(b), "curve", order, b.degree))
    if rest.degree > 0:
        entries.append(DivisorEntry(RootsOf(rest, "residual V_n"), "curve", 1, ell * rest.degree))
    d1, d2 = P.degree, Q.degree
    g = gcd(ell, abs(d1 - d2)) if d1 != d2 else ell
    num = ell * V.degree - (n * ell - 1) * d1 - (n * ell + 1) * d2
    if num % g:
        raise InvalidInput("inconsistent superelliptic data at infinity")
    o_inf = -num // g
    if o_inf:
        entries.append(DivisorEntry(INF, "curve", o_inf, g))
    return Divisor(tuple(entries))


def _elliptic_divisor(s: Scenario, e: EllipticElement) -> Divisor:
    cur = e.curve
    entries = []
    # origin: ord X = -2, ord Y = -3
    cands = []
    if not e.n0.is_zero():
        cands.append(-2 * e.n0.degree)
    if not e.n1.is_zero():
        cands.append(-2 * e.n1.degree - 3)
    o0 = min(cands) + 2 * e.den.degree
    if o0:
        entries.append(DivisorEntry(GR(0), "torus", o0, 1))
    C = cur.cubic
    R = e.n0 * e.n0 - e.n1 * e.n1 * C
    rest = R
    for b, k in zip(cur.bases, e.exps):
        v0 = _val(e.n0, b, cur.exact)
        v1 = _val(e.n1, b, cur.exact)
        order = min(2 * v0, 2 * v1 + 1) - 2 * k
        vr, rest = _strip(rest, b, cur.exact)
        if order:
            entries.append(DivisorEntry(RootsOf(b, "half-periods"), "torus", order, b.degree))
    if rest.degree > 0:
        entries.append(DivisorEntry(RootsOf(rest, "resultant"), "torus", 1, rest.degree))
    return Divisor(tuple(entries))


_BIG = 10 ** 9


def _val(p: Poly, b: Poly, exact: bool) -> int:
    if p.is_zero():
        return _BIG
    return _strip(p, b, exact)[0]


def _strip(p: Poly, b: Poly, exact: bool):
    from .elliptic import _divides

    k = 0
    while True:
        q = _divides(p, b, exact)
        if q is None or q.is_zero():
            return k, p
        p = q
        k += 1


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Evaluation:
    value: object
    near_pole: bool = False


def evaluate(s: Scenario, st: IterateState, z, prec: int | None = None, sheet=None) -> Evaluation:
    """Value of the iterate at ``z`` with relative error <= 2^(-prec+8).

    For rational kinds the evaluation precision is raised by the measured
    cancellation in the numerator; ``sheet`` selects the branch value w(z)
    for the superelliptic kind.
    """
    prec = prec or s.precision
    out = context(prec)
    if st.zero:
        return Evaluation(out.mpc(0))
    if s.is_rational:
        return _eval_rational(st.repr, z, prec)
    if s.kind == "Superelliptic":
        ctx = context(prec + 64)
        z = ctx.mpc(z)
        P, Q, ell, n = s.P, s.Q, s.ell, st.n
        w = ctx.mpc(sheet) if sheet is not None else ctx.root(P.eval_big(z, ctx) / Q.eval_big(z, ctx), ell)
        val = st.repr.eval_big(z, ctx) * w ** (1 - n * ell) / (ctx.mpf(ell) ** n * Q.eval_big(z, ctx) ** (2 * n))
        return Evaluation(out.mpc(val))
    wp, wpp = wp_eval(s.lattice, z, prec + 32)
    ctx = context(prec + 32)
    a, b, sc = s.curve.scales(prec + 32)
    e = st.repr
    X, Y = wp / a, wpp / b
    num = e.n0.eval_big(X, ctx) + e.n1.eval_big(X, ctx) * Y
    den = e.den.eval_big(X, ctx)
    ka, kb, ks = st.scale
    val = num / den * a ** ka * b ** kb * sc ** ks
    return Evaluation(out.mpc(val), near_pole=abs(den) < ctx.mpf(2) ** (-prec // 2))


def _eval_rational(fr: FactoredRational, z, prec: int) -> Evaluation:
    guard = 32
    while True:
        ctx = context(prec + guard)
        zz = ctx.mpc(z) if not isinstance(z, GaussianRational) else to_big(z, ctx)
        num = fr.num.eval_big(zz, ctx)
        scale = fr.num.abs_eval_big(zz, ctx)
        if num != 0 and scale != 0:
            lost = float(ctx.log(scale / abs(num), 2))
        else:
            lost = float("inf") if scale != 0 else 0.0
        if lost + 16 <= guard or guard > 8 * prec + 4096:
            break
        guard = int(min(lost, 8 * prec + 4096)) + 48
    den = ctx.mpc(1)
    near = False
    for b, e in zip(fr.bases, fr.exps):
        if e:
            bv = b.eval_big(zz, ctx)
            if abs(bv) < ctx.mpf(2) ** (-prec // 2):
                near = True
            den *= bv ** e
    if den == 0:
        return Evaluation(context(prec).mpc(ctx.inf), True)
    return Evaluation(context(prec).mpc(num / den), near)


# ---------------------------------------------------------------------------
# scenario files and presets
# ---------------------------------------------------------------------------

def _poly(data) -> Poly:
    if isinstance(data, str):
        data = [data]
    return Poly([GR.parse(str(c)) for c in data])


def _rmap(data) -> RationalMap:
    if isinstance(data, dict):
        return reduce(RationalMap(_poly(data.get("num", ["1"])), _poly(data.get("den", ["1"]))))
    return reduce(RationalMap(_poly(data), Poly([1])))


def scenario_from_dict(d: dict) -> Scenario:
    """Build a scenario from the documented JSON schema (see README)."""
    try:
        kind = d["kind"]
    except KeyError as exc:
        raise InvalidInput("scenario needs a 'kind'") from exc
    prec = int(d.get("precision", 256))
    name = d.get("name", "")
    if kind == "RationalP1":
        return Scenario.rational(_rmap(d["omega"]), _rmap(d["f"]), prec, name)
    if kind == "Monomial":
        return Scenario.monomial(int(d["ell"]), _rmap(d["f"]), prec, name)
    if kind == "Superelliptic":
        return Scenario.superelliptic(_poly(d["P"]), _poly(d["Q"]), int(d["ell"]), prec, name)
    if kind in ("EllipticDz", "EllipticWpPrime"):
        lat = Lattice(str(d.get("tau", "hex")))
        f0 = None
        if "f" in d:
            curve = Curve.of(lat, prec)
            fd = d["f"]
            if fd in ("x", "wp"):
                f0 = EllipticElement.x(curve)
            elif fd in ("y", "wp'"):
                f0 = EllipticElement.y(curve)
            else:
                f0 = EllipticElement(curve, _poly(fd.get("n0", [])), _poly(fd.get("n1", [])))
        return Scenario.elliptic(kind, lat, f0, prec, name)
    raise UnsupportedScenario(f"unknown scenario kind {kind!r}")


def load_scenario(path_or_name: str) -> Scenario:
    if path_or_name in PRESETS:
        return preset(path_or_name)
    p = Path(path_or_name)
    if not p.exists():
        raise InvalidInput(f"no scenario file or preset named {path_or_name!r}")
    try:
        data = json.loads(p.read_text())
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"scenario file is not valid JSON: {exc}") from exc
    return scenario_from_dict(data)


PRESETS = {
    "first-example": {"kind": "RationalP1", "omega": ["1"], "f": {"num": ["2i"], "den": ["1", "0", "1"]}},
    "trefoil": {"kind": "Monomial", "ell": 4, "f": {"num": ["-1"], "den": ["1", "1"]}},
    "monomial": {"kind": "Monomial", "ell": 4, "f": {"num": ["-1"], "den": ["1", "1"]}},
    "torus-dz": {"kind": "EllipticDz", "tau": "hex", "f": "x"},
    "torus-wp": {"kind": "EllipticWpPrime", "tau": "hex", "f": "y"},
    "square-torus": {"kind": "EllipticDz", "tau": "square", "f": "x"},
    "counterexample": {"kind": "RationalP1", "omega": ["0", "1"], "f": {"num": ["1"], "den": ["-1", "0", "1"]}},
    "circle": {"kind": "Superelliptic", "P": ["1", "0", "-1"], "Q": ["1"], "ell": 2},
    "superelliptic": {"kind": "Superelliptic", "P": ["-4i", "2-2i", "1"], "Q": ["-1", "0", "0", "1"], "ell": 3},
}


def preset(name: str, precision: int | None = None) -> Scenario:
    if name not in PRESETS:
        raise InvalidInput(f"unknown preset {name!r}; known: {sorted(PRESETS)}")
    d = dict(PRESETS[name], name=name)
    if precision:
        d["precision"] = precision
    return scenario_from_dict(d)
