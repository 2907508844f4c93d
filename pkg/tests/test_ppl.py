from fractions import Fraction

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st
from strategies import gaussian, nonzero_gaussian

from shires.exactalg import INF, GaussianRational as GR, Poly, RationalMap
from shires.ppl import (
    InvalidPoint,
    factorised_from_series,
    growth_audit,
    is_locally_factorised,
    omega_poles,
    pole_zero_law_check,
    principal_polar_locus,
)
from shires.scenarios import Scenario, preset

EXPECTED = {
    "first-example": ({("-1 i", 0), ("1 i", 0)}, 2, {("inf", 2)}),
    "monomial": ({("-1", 0), ("inf", 2)}, 4, {("0", 4)}),
    "torus-dz": ({("0", 0)}, 1, set()),
    "torus-wp": ({("1/2", 1), ("tau/2", 1), ("(1+tau)/2", 1)}, 6, {("0", 3)}),
    "counterexample": ({("-1", 0), ("1", 0)}, 2, {("inf", 3)}),
    "circle": ({("-1", 1), ("1", 1)}, 4, {("inf", 2)}),
}


@pytest.mark.parametrize("name", sorted(EXPECTED))
def test_ppl_of_presets(name):
    s = preset(name)
    rep = principal_polar_locus(s)
    pts, A, poles = EXPECTED[name]
    assert {(p.label, p.a) for p in rep.points} == pts
    assert rep.A == A
    assert {(p.label, p.d) for p in omega_poles(s)} == poles


def _compose_series(g, m, N):
    """Coefficients of G(t^(m+1) / (m+1)) up to t^(N-1)."""
    out = [GR(0)] * N
    for j, c in enumerate(g):
        k = j * (m + 1)
        if k < N:
            out[k] = out[k] + c * GR(Fraction(1, (m + 1) ** j))
    return out


@given(st.integers(1, 3), st.lists(gaussian, min_size=1, max_size=4))
def test_compositions_are_factorised(m, g):
    N = 4 * (m + 1) + 1
    assert factorised_from_series(_compose_series(g, m, N), [GR(1)], m, N)


@given(st.integers(1, 3), st.lists(gaussian, min_size=1, max_size=4), nonzero_gaussian, st.integers(1, 12))
def test_off_lattice_term_obstructs(m, g, c, k):
    N = 4 * (m + 1) + 1
    assume(k % (m + 1) and k < N)
    f = _compose_series(g, m, N)
    f[k] = f[k] + c
    assert not factorised_from_series(f, [GR(1)], m, N)


def test_rational_factorisation_at_zero_of_omega():
    om = RationalMap(Poly([0, 1]), Poly([1]))
    even = Scenario.rational(om, RationalMap(Poly([1]), Poly([-1, 0, 1])))
    odd = Scenario.rational(om, RationalMap(Poly([0, 1]), Poly([-1, 0, 1])))
    assert is_locally_factorised(even, GR(0))
    assert not is_locally_factorised(odd, GR(0))
    with pytest.raises(InvalidPoint):
        is_locally_factorised(preset("monomial"), GR(0))


def test_monomial_infinity_is_unfactorised():
    assert not is_locally_factorised(preset("monomial"), INF)


def test_growth_audit_first_example():
    audit = growth_audit(preset("first-example"), 15)
    assert audit.holds() and audit.A == 2
    assert all(r.Z == 2 * r.n + 2 for r in audit.rows)
    assert audit.alphas == {"-1 i": 1, "1 i": 1}


def test_pole_zero_law_monomial():
    chk = pole_zero_law_check(preset("monomial"), 20)
    assert chk.passed
    (w,) = chk.witnesses
    assert w.d == 4 and all(o == 3 * n + w.b for o, n in zip(w.orders, range(15, 21)))


def test_simple_pole_shared_with_f_does_not_accumulate():
    # omega = dz / z has a simple pole at 0, and so does f
    s = Scenario.rational(RationalMap(Poly([1]), Poly([0, 1])), RationalMap(Poly([1]), Poly([0, 1])))
    chk = pole_zero_law_check(s, 6)
    assert chk.passed
