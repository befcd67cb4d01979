"""Randomized property suites (hypothesis, derandomized so runs are reproducible)."""

import random

from hypothesis import given, settings
from hypothesis import strategies as st
from samples import A1, COUNTEREXAMPLE, random_unimodular

from artifact.arrangement import gale_dual, lattice_isomorphic
from artifact.exact import ConeFraction, LaurentQ, Poly, expand_fraction, laurent_to_series, one_minus_q, shift_poly
from artifact.hea import HEAElement, multiply


def seeded(examples):
    return settings(max_examples=examples, derandomize=True, deadline=None, database=None)


small = st.integers(-3, 3)


@st.composite
def polys(draw, n, max_terms=3, max_exp=2):
    terms = {}
    for _ in range(draw(st.integers(0, max_terms))):
        exp = tuple(draw(st.integers(0, max_exp)) for _ in range(n + 1))
        terms[exp] = draw(st.integers(-4, 4))
    return Poly(n, terms)


@st.composite
def hea_elements(draw, arr):
    comps = {}
    for _ in range(draw(st.integers(1, 2))):
        lam = arr.embed(tuple(draw(st.integers(-2, 2)) for _ in range(arr.d)))
        comps[lam] = draw(polys(arr.n, max_terms=2, max_exp=1))
    return HEAElement(arr, comps)


arrangements = st.sampled_from([A1, COUNTEREXAMPLE])


@st.composite
def hea_triples(draw):
    arr = draw(arrangements)
    return tuple(draw(hea_elements(arr)) for _ in range(3))


@seeded(200)
@given(hea_triples())
def test_hea_product_is_associative(triple):
    x, y, z = triple
    assert multiply(multiply(x, y), z) == multiply(x, multiply(y, z))


@st.composite
def shift_pairs(draw):
    n = draw(st.integers(1, 4))
    f, g = draw(polys(n)), draw(polys(n))
    mu = tuple(draw(small) for _ in range(n))
    nu = tuple(draw(small) for _ in range(n))
    return f, g, mu, nu


@seeded(200)
@given(shift_pairs())
def test_shift_is_a_ring_homomorphism(pair):
    f, g, mu, nu = pair
    assert shift_poly(f * g, mu) == shift_poly(f, mu) * shift_poly(g, mu)
    assert shift_poly(f + g, mu) == shift_poly(f, mu) + shift_poly(g, mu)
    both = tuple(a + b for a, b in zip(mu, nu))
    assert shift_poly(shift_poly(f, mu), nu) == shift_poly(f, both)


@seeded(20)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_gale_double_dual_is_the_identity(seed, d):
    arr = random_unimodular(random.Random(seed), d=d, n_max=7)
    double = gale_dual(gale_dual(arr))
    assert double == arr
    assert lattice_isomorphic(double, arr)


@st.composite
def cone_fractions(draw):
    xi = (draw(st.integers(1, 3)), draw(st.integers(1, 3)))
    den = {}
    for _ in range(draw(st.integers(0, 3))):
        lam = (draw(small), draw(small))
        if lam[0] * xi[0] + lam[1] * xi[1] > 0:
            den[lam] = draw(st.integers(1, 2))
    num = {}
    for _ in range(draw(st.integers(1, 3))):
        mu = (draw(small), draw(small))
        num[mu] = draw(polys(1, max_terms=2))
    return ConeFraction(LaurentQ(2, 1, num), den), xi, draw(st.integers(0, 8))


@seeded(100)
@given(cone_fractions())
def test_expand_fraction_round_trip(case):
    frac, xi, bound = case
    series = expand_fraction(frac, bound, xi)
    for lam, k in frac.denominator:
        series = series * laurent_to_series(one_minus_q(lam, 1, k), xi, bound)
    assert series == laurent_to_series(frac.numerator, xi, bound)
