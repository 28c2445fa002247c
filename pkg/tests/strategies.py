"""Hypothesis strategies for algebra elements."""
from fractions import Fraction

from hypothesis import strategies as st

from ncwave.ncalg import AlgebraElement, Coefficient, canonicalize, r

small_fraction = st.builds(Fraction, st.integers(-5, 5), st.integers(1, 4))


@st.composite
def monomials(draw, max_degree=4, max_t=2, scalar=True):
    a1 = draw(st.integers(0, 2))
    a2 = draw(st.integers(0, 2))
    a3 = draw(st.integers(0, 2))
    k = draw(st.integers(-2, 2))
    n = draw(st.integers(0, max_t))
    if a1 + a2 + a3 + abs(k) + n > max_degree:
        k = 0
        a3 = 0
    c = draw(small_fraction.filter(bool)) if scalar else Fraction(1)
    p = draw(st.integers(0, 1))
    q = draw(st.integers(0, 1))
    return canonicalize([((a1, a2, a3, k, n), Coefficient({(p, q): c}))])


@st.composite
def polynomials(draw, max_terms=3, max_degree=4, max_t=2):
    terms = draw(st.lists(monomials(max_degree, max_t), min_size=1, max_size=max_terms))
    out = AlgebraElement()
    for term in terms:
        out = out + term
    return out


@st.composite
def radial(draw, max_terms=2):
    out = AlgebraElement()
    for _ in range(draw(st.integers(1, max_terms))):
        out = out + draw(small_fraction) * r(draw(st.integers(-3, 3)))
    return out


betas = st.sampled_from(["1", "r^-1", "r^-2", "r^-3", "1+gam*r^-1"])
