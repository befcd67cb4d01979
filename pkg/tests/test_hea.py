import random
from fractions import Fraction

import pytest
import sympy as sp
import weyl_oracle
from samples import A1, COUNTEREXAMPLE, sample_arrangements

from artifact.exact import Poly, bracket_monomial
from artifact.hea import (
    ArrangementMismatch,
    HEAElement,
    NonGenericParameter,
    a_var,
    b_algebra_points,
    b_algebra_presentation,
    commutator,
    fibre_dimension,
    generic_points,
    multiply,
)


def random_weight(arr, rng, bound=2):
    return arr.embed(tuple(rng.randint(-bound, bound) for _ in range(arr.d)))


def random_element(arr, rng, weights=2):
    n = arr.n
    comps = {}
    for _ in range(weights):
        lam = random_weight(arr, rng)
        exp = [0] * (n + 1)
        for _ in range(rng.randint(0, 2)):
            exp[rng.randrange(n + 1)] += 1
        comps[lam] = Poly(n, {tuple(exp): rng.randint(-3, 3) or 1})
    return HEAElement(arr, comps)


# products -------------------------------------------------------------------------


def test_a1_raising_times_lowering():
    r_plus = HEAElement.monomial(A1, (1, 1))
    r_minus = HEAElement.monomial(A1, (-1, -1))
    a1, a2, h = Poly.var(2, 0), Poly.var(2, 1), Poly.hbar(2)
    assert multiply(r_plus, r_minus) == HEAElement.scalar(A1, a1 * a2)
    assert multiply(r_minus, r_plus) == HEAElement.scalar(A1, (a1 + h) * (a2 + h))


def test_monomial_times_its_inverse_is_the_bracket():
    rng = random.Random(41)
    for arr in (A1, COUNTEREXAMPLE):
        for _ in range(15):
            lam = random_weight(arr, rng, 3)
            prod = multiply(HEAElement.monomial(arr, lam), HEAElement.monomial(arr, tuple(-x for x in lam)))
            assert prod == HEAElement.scalar(arr, bracket_monomial(lam))


def test_commutator_with_a_variable():
    rng = random.Random(42)
    arr = COUNTEREXAMPLE
    for _ in range(10):
        lam = random_weight(arr, rng)
        m = HEAElement.monomial(arr, lam)
        for i in range(arr.n):
            assert commutator(a_var(arr, i), m) == m * (lam[i] * Poly.hbar(arr.n))


def test_product_matches_weyl_algebra():
    rng = random.Random(43)
    for arr in (A1, COUNTEREXAMPLE):
        n = arr.n
        for _ in range(25):
            x, y = random_element(arr, rng), random_element(arr, rng)
            expected = weyl_oracle.multiply(weyl_oracle.from_hea(x), weyl_oracle.from_hea(y), n)
            assert weyl_oracle.from_hea(multiply(x, y)) == expected


def test_right_form_round_trip():
    rng = random.Random(44)
    arr = COUNTEREXAMPLE
    for _ in range(10):
        x = random_element(arr, rng)
        total = HEAElement(arr)
        for lam, g in x.right_form().items():
            total = total + multiply(HEAElement.scalar(arr, g), HEAElement.monomial(arr, lam))
        assert total == x


def test_mixed_arrangements_are_rejected():
    with pytest.raises(ArrangementMismatch):
        multiply(HEAElement.scalar(A1, 1), HEAElement.scalar(COUNTEREXAMPLE, 1))


def test_degree_and_commutator_divisible_by_hbar():
    rng = random.Random(45)
    arr = COUNTEREXAMPLE
    for _ in range(20):
        lam, mu = random_weight(arr, rng), random_weight(arr, rng)
        x = HEAElement.monomial(arr, lam, Poly.var(arr.n, rng.randrange(arr.n)))
        y = HEAElement.monomial(arr, mu)
        xy = multiply(x, y)
        assert xy.is_homogeneous() and xy.degree() == x.degree() + y.degree()
        assert all(f.divisible_by_hbar() for f in commutator(x, y).components.values())
        total = tuple(a + b for a, b in zip(lam, mu))
        assert set(xy.components) <= {total}


# B-algebra ------------------------------------------------------------------------


def test_a1_presentation():
    assert b_algebra_presentation(A1) == [Poly.var(2, 0) * Poly.var(2, 1)]


def test_counterexample_presentation_has_one_generator_per_positive_cocircuit():
    gens = b_algebra_presentation(COUNTEREXAMPLE)
    assert len(gens) == 6
    assert set(gens) == {bracket_monomial(c.embedded) for c in COUNTEREXAMPLE.positive_cocircuits}
    for c, g in zip(COUNTEREXAMPLE.positive_cocircuits, gens):
        assert g.degree() <= 2 * sum(abs(x) for x in c.embedded)


def test_a1_points_match_hand_solution():
    # kernel (1, -1): a_1 - a_2 = c, so c = -z means a_2 - a_1 = z
    z = 3
    a1, a2 = sp.symbols("a1 a2")
    solutions = sp.solve([a1 * a2, a2 - a1 - z], [a1, a2], dict=True)
    expected = sorted((Fraction(str(s[a1])), Fraction(str(s[a2]))) for s in solutions)
    assert b_algebra_points(A1, (-z,)) == expected == [(-3, 0), (0, 3)]


def test_a1_double_point_is_non_generic():
    with pytest.raises(NonGenericParameter):
        b_algebra_points(A1, (0,))


def test_point_count_equals_number_of_bases():
    rng = random.Random(46)
    for arr in [A1, COUNTEREXAMPLE] + sample_arrangements(47, 4):
        c, points = generic_points(arr, rng)
        assert len(points) == len(arr.bases) == fibre_dimension(arr, c)
        for p in points:
            for g in b_algebra_presentation(arr):
                assert g.evaluate(p, 1) == 0
            for k, value in zip(arr.kernel, c):
                assert sum(x * y for x, y in zip(k, p)) == value


def test_weight_zero_part_is_commutative():
    rng = random.Random(48)

    def random_scalar(n):
        terms = {tuple(rng.randint(0, 2) for _ in range(n + 1)): rng.randint(1, 4) for _ in range(3)}
        return Poly(n, terms)

    for arr in (A1, COUNTEREXAMPLE):
        for _ in range(10):
            x0 = HEAElement.scalar(arr, random_scalar(arr.n))
            y0 = HEAElement.scalar(arr, random_scalar(arr.n))
            assert not x0.is_zero() and commutator(x0, y0).is_zero()
            # products of opposite weights also land in the commutative part
            lam = random_weight(arr, rng)
            m = multiply(HEAElement.monomial(arr, lam), HEAElement.monomial(arr, tuple(-v for v in lam)))
            assert commutator(m, x0).is_zero()
