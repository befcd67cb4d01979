import random
from fractions import Fraction

import sympy as sp

from artifact import groebner

X = sp.symbols("x0:4")


def to_sympy(f: groebner.PolyDict, n: int):
    out = sp.Integer(0)
    for exp, c in f.items():
        term = sp.Rational(Fraction(c).numerator, Fraction(c).denominator)
        for i in range(n):
            term *= X[i] ** exp[i]
        out += term
    return out


def random_ideal(rng: random.Random, n: int, count: int) -> list[groebner.PolyDict]:
    gens = []
    for _ in range(count):
        f = {}
        for _ in range(rng.randint(1, 3)):
            exp = tuple(rng.randint(0, 2) for _ in range(n))
            f[exp] = Fraction(rng.randint(-4, 4) or 1)
        gens.append(f)
    return gens


def reduced_sympy_basis(gens, n):
    G = sp.groebner([to_sympy(g, n) for g in gens], *X[:n], order="grevlex")
    out = set()
    for g in G.exprs:
        poly = sp.Poly(g, *X[:n])
        out.add(sp.expand(g / poly.LC(order="grevlex")))
    return out


def test_reduced_basis_matches_sympy():
    rng = random.Random(11)
    for _ in range(25):
        n = rng.randint(2, 3)
        gens = random_ideal(rng, n, rng.randint(2, 3))
        ours = groebner.groebner_basis(gens)
        mine = {sp.expand(to_sympy(groebner.monic(g), n)) for g in ours}
        assert mine == reduced_sympy_basis(gens, n)


def test_normal_form_agrees_with_sympy_reduction():
    rng = random.Random(12)
    for _ in range(15):
        gens = random_ideal(rng, 2, 2)
        G = groebner.groebner_basis(gens)
        f = random_ideal(rng, 2, 1)[0]
        ours = to_sympy(groebner.normal_form(f, G), 2)
        Gs = sp.groebner([to_sympy(g, 2) for g in gens], *X[:2], order="grevlex")
        _, theirs = Gs.reduce(to_sympy(f, 2))
        assert sp.expand(ours - theirs) == 0


def test_quotient_dimension_of_a_point_pair():
    # x0 x1 = 0, x1 - x0 = 3: two points
    gens = [{(1, 1): Fraction(1)}, {(0, 1): Fraction(1), (1, 0): Fraction(-1), (0, 0): Fraction(-3)}]
    assert groebner.quotient_dimension(gens, 2) == 2


def test_quotient_dimension_of_a_double_point():
    gens = [{(1, 1): Fraction(1)}, {(0, 1): Fraction(1), (1, 0): Fraction(-1)}]
    assert groebner.quotient_dimension(gens, 2) == 2
    assert len(groebner.standard_monomials(groebner.groebner_basis(gens), 2)) == 2


def test_infinite_quotient_is_reported():
    assert groebner.quotient_dimension([{(1, 1): Fraction(1)}], 2) is None


def test_ideal_equality_ignores_generating_set():
    f = {(1, 0): Fraction(1), (0, 1): Fraction(1)}
    g = {(1, 0): Fraction(1), (0, 1): Fraction(-1)}
    both = [f, g]
    doubled = [f, {k: v * 2 for k, v in g.items()}, {(1, 0): Fraction(1)}]
    assert groebner.ideals_equal(both, doubled)
    assert not groebner.ideals_equal([f], both)
