import json
import math

import mpmath
import pytest
from hypothesis import given
from hypothesis import strategies as st

from shires.elliptic import wp_eval
from shires.exactalg import INF, GaussianRational as GR, InvalidInput, Poly
from shires.scenarios import (
    PRESETS,
    ResourceExhausted,
    UnsupportedScenario,
    circle_polys,
    evaluate,
    iterate,
    load_scenario,
    preset,
    scenario_from_dict,
    superelliptic_step,
    trajectory,
)

# explicit mpmath versions of (f, omega) for the rational presets
ORACLE = {
    "first-example": (lambda z: 2j / (z * z + 1), lambda z: 1),
    "monomial": (lambda z: -1 / (z + 1), lambda z: z ** -4),
    "counterexample": (lambda z: 1 / (z * z - 1), lambda z: z),
}


def series_oracle(f, omega, z0, n, dps=60):
    """T^n f(z0) by iterating g -> g' / omega on truncated Taylor series at z0."""
    with mpmath.workdps(dps):
        N = n + 2
        g = mpmath.taylor(f, z0, N + n)
        w = mpmath.taylor(omega, z0, N + n)
        for _ in range(n):
            d = [(k + 1) * g[k + 1] for k in range(len(g) - 1)]
            q = []
            for k in range(len(d)):
                q.append((d[k] - sum(q[j] * w[k - j] for j in range(k))) / w[0])
            g = q
        return mpmath.mpc(g[0])


@pytest.mark.parametrize("name", sorted(ORACLE))
@pytest.mark.parametrize("n", [0, 1, 3, 5])
def test_iterates_match_series_oracle(name, n):
    s = preset(name)
    z0 = mpmath.mpc("0.37", "0.61")
    got = evaluate(s, iterate(s, n), z0, 200).value
    ref = series_oracle(*ORACLE[name], z0, n)
    assert abs(got - ref) < mpmath.mpf(10) ** -30 * (1 + abs(ref))


@given(st.integers(0, 25))
def test_first_example_closed_form(n):
    s = preset("first-example")
    z = mpmath.mpc("0.3", "-0.8")
    with mpmath.workdps(80):
        ref = (-1) ** n * math.factorial(n) * ((z - 1j) ** (-n - 1) - (z + 1j) ** (-n - 1))
        assert abs(evaluate(s, iterate(s, n), z, 256).value - ref) < mpmath.mpf(10) ** -50 * abs(ref)


def test_first_example_divisor():
    s = preset("first-example")
    for st_ in trajectory(s, 12):
        n = st_.n
        d = st_.divisor
        assert d.order_at(GR(0, 1)) == d.order_at(GR(0, -1)) == -(n + 1)
        assert d.order_at(INF) == n + 2
        assert d.pole_total == 2 * n + 2


@pytest.mark.parametrize("name", sorted(PRESETS))
def test_divisors_have_degree_zero(name):
    s = preset(name)
    for st_ in trajectory(s, 6):
        if not st_.zero:
            assert st_.divisor.degree == 0, (name, st_.n)


def test_torus_iterates_follow_wp_identities():
    s = preset("torus-dz")
    z = 0.3 + 0.1j
    wp, wpd = wp_eval(s.lattice, z, 160)
    assert abs(evaluate(s, iterate(s, 1), z, 128).value - wpd) < 1e-30 * abs(wpd)
    assert abs(evaluate(s, iterate(s, 2), z, 128).value - 6 * wp ** 2) < 1e-30 * abs(wp) ** 2
    assert abs(evaluate(s, iterate(s, 3), z, 128).value - 12 * wp * wpd) < 1e-30 * abs(wp * wpd)
    # wp^(n) has a single pole of order n + 2 at the lattice point
    for st_ in trajectory(s, 8):
        assert st_.divisor.pole_total == st_.n + 2


def test_wp_prime_scenario_divides_by_wp_prime():
    s = preset("torus-wp")
    z = 0.21 + 0.13j
    wp, wpd = wp_eval(s.lattice, z, 160)
    # T wp' = wp'' / wp' = (6 wp^2 - g2/2) / wp' with g2 = 0 on the hexagonal lattice
    assert abs(evaluate(s, iterate(s, 1), z, 128).value - 6 * wp ** 2 / wpd) < 1e-30 * abs(wp ** 2 / wpd)


def test_circle_recurrence():
    U = circle_polys(4)
    assert U[0] == Poly.X
    z = Poly.X
    for n in range(2, 5):
        assert U[n - 1] == z * U[n - 2] * (2 * n - 3) + Poly([1, 0, -1]) * U[n - 2].derivative()


def test_superelliptic_step_degree():
    P = Poly([GR(0, -4), GR(2, -2), 1])
    Q = Poly([-1, 0, 0, 1])
    V = Poly([1])
    for n in range(1, 6):
        V = superelliptic_step(V, P, Q, 3, n - 1) if n > 1 else iterate(preset("superelliptic"), 1).repr
        assert V.degree == 4 * n


def test_scenario_files(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps({"kind": "RationalP1", "omega": ["1"], "f": {"num": ["1"], "den": ["0", "1"]}}))
    s = load_scenario(str(path))
    assert s.kind == "RationalP1" and s.f0.den == Poly([0, 1])
    with pytest.raises(UnsupportedScenario):
        scenario_from_dict({"kind": "Hyperbolic"})
    with pytest.raises(InvalidInput):
        load_scenario(str(tmp_path / "missing.json"))
    with pytest.raises(InvalidInput):
        scenario_from_dict({"kind": "RationalP1", "omega": ["0"], "f": ["1"]})
    with pytest.raises(InvalidInput):
        preset("first-example", precision=32)


def test_trefoil_is_an_alias_of_monomial():
    a, b = preset("trefoil"), preset("monomial")
    assert (a.kind, a.ell, a.omega, a.f0) == (b.kind, b.ell, b.omega, b.f0)


def test_resource_exhaustion_is_reported():
    assert issubclass(ResourceExhausted, RuntimeError)
    with pytest.raises(InvalidInput):
        list(trajectory(preset("first-example"), -1))
