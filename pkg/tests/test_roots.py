import mpmath
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from strategies import gaussian

from shires.exactalg import InvalidInput, Poly
from shires.roots import BoundaryZero, initial_guesses, poly_roots, region_roots


def as_mp(g):
    return mpmath.mpc(mpmath.mpf(g.a) / g.d, mpmath.mpf(g.b) / g.d)


def match(found, expected):
    """Max distance under the best greedy pairing of two equal-size multisets."""
    left = list(expected)
    worst = 0
    for z in found:
        k = min(range(len(left)), key=lambda i: abs(left[i] - z))
        worst = max(worst, abs(left.pop(k) - z))
    return worst


@given(st.lists(gaussian, min_size=1, max_size=8, unique=True))
def test_distinct_roots_recovered(rs):
    p = Poly.from_roots(rs)
    out = poly_roots(p, 192)
    assert out.certified and len(out) == len(rs)
    with mpmath.workprec(192):
        assert match(out.values, [as_mp(r) for r in rs]) < mpmath.mpf(2) ** -100


@given(st.lists(st.tuples(gaussian, st.integers(1, 3)), min_size=1, max_size=3, unique_by=lambda t: t[0]))
def test_multiple_roots_clustered(spec):
    rs = [r for r, k in spec for _ in range(k)]
    out = poly_roots(Poly.from_roots(rs), 192)
    assert len(out.roots) == len(spec)
    with mpmath.workprec(192):
        for r, k in spec:
            hit = min(out.roots, key=lambda x: abs(x.value - as_mp(r)))
            assert abs(hit.value - as_mp(r)) < 1e-30 and hit.multiplicity == k


def test_zero_roots_split_exactly():
    out = poly_roots(Poly([0, 0, 1, 1]), 128)
    assert [(complex(r.value), r.multiplicity) for r in out.roots] == [(0j, 2), (-1 + 0j, 1)]


def test_agrees_with_numpy_on_random_real_polynomial():
    rng = np.random.default_rng(3)
    c = rng.integers(-9, 10, 30).tolist()
    c[-1] = 7
    out = poly_roots(Poly(c), 128).as_complex()
    ref = np.roots(c[::-1])
    assert match(out, ref) < 1e-8


def test_invalid_degree():
    with pytest.raises(InvalidInput):
        poly_roots(Poly([3]), 128)


def test_initial_guesses_on_circles():
    z = initial_guesses(np.array([0.0, -np.inf, -np.inf, -np.inf, 0.0]))
    assert len(z) == 4 and np.allclose(np.abs(z), 1.0, atol=0.5)


def test_region_roots_of_sine():
    out = region_roots(lambda z: mpmath.sin(mpmath.pi * z), (-2.5, 2.5, -1, 1), 128)
    assert sorted(round(v.real) for v in out.as_complex()) == [-2, -1, 0, 1, 2]
    assert match(out.as_complex(), [-2, -1, 0, 1, 2]) < 1e-25


def test_region_roots_of_entire_function_with_complex_zeros():
    # exp(z) - 2 has zeros log 2 + 2 pi i k
    out = region_roots(lambda z: mpmath.exp(z) - 2, (-1, 1, -7, 7), 128)
    with mpmath.workprec(128):
        want = [mpmath.log(2) + 2j * mpmath.pi * k for k in (-1, 0, 1)]
        assert len(out) == 3 and match(out.values, want) < 1e-25


def test_boundary_zero_raises_when_unavoidable():
    with pytest.raises(BoundaryZero):
        region_roots(lambda z: mpmath.mpc(0), (-1, 1, -1, 1), 64)
