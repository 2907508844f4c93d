from fractions import Fraction

from hypothesis import strategies as st

from shires.exactalg import GaussianRational, Poly

small = st.integers(-6, 6)
fractions = st.builds(Fraction, small, st.integers(1, 5))
gaussian = st.builds(GaussianRational, fractions, fractions)
nonzero_gaussian = gaussian.filter(lambda g: not g.is_zero())
polys = st.lists(gaussian, min_size=0, max_size=5).map(Poly)
nonzero_polys = st.lists(gaussian, min_size=1, max_size=5).map(Poly).filter(lambda p: not p.is_zero())
