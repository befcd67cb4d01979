"""The hypertoric enveloping algebra.

Elements are stored in left normal form sum_lambda m^lambda f_lambda(a, hbar)
with m^lambda = z^{lambda_+} w^{lambda_-}; weights are embedded vectors in
Z^n.  The zero-weight part is the polynomial ring Q[a_1..a_n, hbar].
"""

from __future__ import annotations

import random
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from . import groebner, linalg
from .arrangement import Arrangement
from .exact import Poly, bracket_monomial, bracket_power, rat, shift_poly

Vector = tuple[int, ...]


class ArrangementMismatch(ValueError):
    """Raised when elements from different arrangements are combined."""


class NonGenericParameter(ValueError):
    """Raised when the central parameter c is not generic enough."""


class HEAElement:
    """sum_lambda m^lambda f_lambda in left normal form."""

    __slots__ = ("arr", "components")

    def __init__(self, arr: Arrangement, components: Mapping[Vector, Poly] | None = None):
        self.arr = arr
        clean: dict[Vector, Poly] = {}
        if components:
            for lam, f in components.items():
                lam = tuple(lam)
                if len(lam) != arr.n:
                    raise ValueError(f"weight {lam} is not an embedded vector of length {arr.n}")
                if not isinstance(f, Poly):
                    f = Poly.constant(arr.n, f)
                if f.terms:
                    clean[lam] = clean[lam] + f if lam in clean else f
        self.components = {k: v for k, v in clean.items() if v.terms}

    # constructors -------------------------------------------------------------
    @classmethod
    def monomial(cls, arr: Arrangement, lam: Sequence[int], f: Poly | int = 1) -> "HEAElement":
        """m^lambda f for an embedded weight lambda."""
        lam = tuple(lam)
        if not arr.in_weight_lattice(lam):
            raise ValueError(f"{lam} is not an embedded weight of the arrangement")
        return cls(arr, {lam: f})

    @classmethod
    def scalar(cls, arr: Arrangement, f: Poly | int) -> "HEAElement":
        return cls(arr, {(0,) * arr.n: f})

    # queries --------------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.components

    def weights(self) -> list[Vector]:
        return sorted(self.components)

    def is_homogeneous(self) -> bool:
        degs = set()
        for lam, f in self.components.items():
            for e in f.terms:
                degs.add(sum(abs(x) for x in lam) + 2 * sum(e))
        return len(degs) <= 1

    def degree(self) -> int:
        return max(
            (sum(abs(x) for x in lam) + f.degree() for lam, f in self.components.items()),
            default=-1,
        )

    def component(self, lam: Sequence[int]) -> Poly:
        return self.components.get(tuple(lam), Poly.zero(self.arr.n))

    # arithmetic -----------------------------------------------------------------
    def _check(self, other: "HEAElement") -> None:
        if not isinstance(other, HEAElement):
            raise TypeError("expected an HEAElement")
        if other.arr is not self.arr and other.arr != self.arr:
            raise ArrangementMismatch("elements belong to different arrangements")

    def __add__(self, other: "HEAElement") -> "HEAElement":
        self._check(other)
        out = dict(self.components)
        for lam, f in other.components.items():
            out[lam] = out[lam] + f if lam in out else f
        return HEAElement(self.arr, out)

    def __neg__(self) -> "HEAElement":
        return HEAElement(self.arr, {lam: -f for lam, f in self.components.items()})

    def __sub__(self, other: "HEAElement") -> "HEAElement":
        return self + (-other)

    def __mul__(self, other) -> "HEAElement":
        if isinstance(other, HEAElement):
            return multiply(self, other)
        if isinstance(other, Poly):
            return multiply(self, HEAElement.scalar(self.arr, other))
        return HEAElement(self.arr, {lam: f * other for lam, f in self.components.items()})

    def __rmul__(self, other) -> "HEAElement":
        if isinstance(other, Poly):
            return multiply(HEAElement.scalar(self.arr, other), self)
        return self * other

    def __eq__(self, other) -> bool:
        if not isinstance(other, HEAElement):
            return NotImplemented
        return self.arr == other.arr and self.components == other.components

    def __hash__(self) -> int:
        return hash(frozenset(self.components.items()))

    def right_form(self) -> dict[Vector, Poly]:
        """Coefficients g_lambda with self = sum_lambda g_lambda m^lambda."""
        return {lam: shift_poly(f, tuple(-x for x in lam)) for lam, f in self.components.items()}

    def __str__(self) -> str:
        if not self.components:
            return "0"
        parts = []
        for lam in sorted(self.components):
            f = self.components[lam]
            if any(lam):
                parts.append(f"m^({','.join(map(str, lam))})*({f})")
            else:
                parts.append(f"({f})")
        return " + ".join(parts)

    __repr__ = __str__


@lru_cache(maxsize=65536)
def _monomial_product(lam: Vector, mu: Vector) -> tuple[Vector, Poly]:
    """m^lam m^mu = m^{lam+mu} * coefficient, in left normal form."""
    n = len(lam)
    left = Poly.one(n)
    right = Poly.one(n)
    for i, (x, y) in enumerate(zip(lam, mu)):
        if x * y < 0:
            if abs(x) <= abs(y):
                left = left * bracket_power(i, x, n)
            else:
                right = right * bracket_power(i, -y, n)
    total = tuple(x + y for x, y in zip(lam, mu))
    return total, shift_poly(left, total) * right


def multiply(x: HEAElement, y: HEAElement) -> HEAElement:
    """Product in left normal form: (m^l f)(m^m g) = m^l m^m f_m g."""
    x._check(y)
    out: dict[Vector, Poly] = {}
    for lam, f in x.components.items():
        for mu, g in y.components.items():
            total, coeff = _monomial_product(lam, mu)
            term = coeff * shift_poly(f, mu) * g
            out[total] = out[total] + term if total in out else term
    return HEAElement(x.arr, out)


def commutator(x: HEAElement, y: HEAElement) -> HEAElement:
    return multiply(x, y) - multiply(y, x)


def a_var(arr: Arrangement, i: int) -> HEAElement:
    return HEAElement.scalar(arr, Poly.var(arr.n, i))


# ---------------------------------------------------------------------------
# B-algebra
# ---------------------------------------------------------------------------


def b_algebra_presentation(arr: Arrangement) -> list[Poly]:
    """Generators [a]^lambda, lambda in Sigma_+, of the q = 0 fibre ideal."""
    return [bracket_monomial(w.embedded) for w in arr.positive_cocircuits]


def central_forms(arr: Arrangement) -> list[Poly]:
    """theta(a) = sum_i theta_i a_i for theta in the kernel basis."""
    return [Poly.linear(arr.n, k) for k in arr.kernel]


def specialized_ideal(arr: Arrangement, c: Sequence) -> list[groebner.PolyDict]:
    """Generators at hbar = 1 with central forms set to the values c."""
    if len(c) != len(arr.kernel):
        raise ValueError(f"c must have {len(arr.kernel)} entries")
    gens = [groebner.from_poly(g.specialize_hbar(1), hbar=False) for g in b_algebra_presentation(arr)]
    for form, value in zip(central_forms(arr), c):
        gens.append(groebner.from_poly((form - Fraction(value)).specialize_hbar(1), hbar=False))
    return gens


def fibre_dimension(arr: Arrangement, c: Sequence) -> int | None:
    """dim_Q of Q[a] / ([a]^lambda|_{hbar=1}, theta(a) - <theta, c>)."""
    return groebner.quotient_dimension(specialized_ideal(arr, c), arr.n)


def _linear_factors(lam: Sequence[int]) -> list[tuple[int, int]]:
    """[a]^lambda at hbar = 1 as factors (i, s) meaning a_i + s."""
    out = []
    for i, k in enumerate(lam):
        if k > 0:
            out.extend((i, -j) for j in range(k))
        elif k < 0:
            out.extend((i, j) for j in range(1, -k + 1))
    return out


def _solve_product_system(n: int, linear: list[tuple[list, Fraction]], products: list[list[tuple[int, int]]]):
    """All solutions of linear equations plus products of linear factors.

    Branches over the factors of each product; a branch ending in a
    positive-dimensional affine space raises NonGenericParameter.
    """
    points: set[tuple] = set()

    def param(eqs):
        m = [list(v) for v, _ in eqs]
        b = [r for _, r in eqs]
        p = linalg.solve(m, b) if eqs else [Fraction(0)] * n
        if p is None:
            return None
        null = linalg.nullspace(m, n) if eqs else [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]
        return p, null

    def rec(eqs, k):
        sol = param(eqs)
        if sol is None:
            return
        p, null = sol
        while k < len(products):
            live = []
            satisfied = False
            for i, s in products[k]:
                value = p[i] + s
                slope = any(v[i] for v in null)
                if not slope and value == 0:
                    satisfied = True
                    break
                if slope:
                    live.append((i, s))
            if satisfied:
                k += 1
                continue
            for i, s in dict.fromkeys(live):
                vec = [0] * n
                vec[i] = 1
                rec(eqs + [(vec, Fraction(-s))], k + 1)
            return
        if null:
            raise NonGenericParameter("the fibre has a positive-dimensional component")
        points.add(tuple(rat(x) for x in p))

    rec(list(linear), 0)
    return sorted(points)


def b_algebra_points(arr: Arrangement, c: Sequence) -> list[tuple]:
    """Points w (a_i -> rational at hbar = 1) of the specialized fibre.

    Each point is one weight functional w^c_x.  Raises NonGenericParameter if
    the fibre is not reduced of dimension at most #bases.
    """
    c = [Fraction(x) for x in c]
    gens = specialized_ideal(arr, c)
    basis = groebner.groebner_basis(gens)
    std = groebner.standard_monomials(basis, arr.n)
    if std is None:
        raise NonGenericParameter("the specialized fibre is not zero-dimensional")
    dim = len(std)
    if dim > len(arr.bases):
        raise NonGenericParameter(f"fibre dimension {dim} exceeds the number of bases {len(arr.bases)}")
    linear = [(list(k), value) for k, value in zip(arr.kernel, c)]
    products = [_linear_factors(w.embedded) for w in arr.positive_cocircuits]
    points = _solve_product_system(arr.n, linear, products)
    if len(points) != dim:
        raise NonGenericParameter(f"{dim}-dimensional fibre has only {len(points)} distinct points")
    for pt in points:
        for g in basis:
            if groebner.to_poly(g, arr.n, hbar=False).evaluate(pt, 1) != 0:
                raise NonGenericParameter("a computed point does not lie on the fibre")
    return points


def random_parameter(arr: Arrangement, rng: random.Random, bound: int = 10**4) -> tuple[Fraction, ...]:
    """Rational c with numerators and denominators bounded by ``bound``."""
    return tuple(
        Fraction(rng.randint(-bound, bound), rng.randint(1, bound)) for _ in arr.kernel
    )


def generic_points(arr: Arrangement, rng: random.Random, tries: int = 5) -> tuple[tuple[Fraction, ...], list[tuple]]:
    """Sample c until the fibre is generic; returns (c, points)."""
    last: Exception | None = None
    for _ in range(tries):
        c = random_parameter(arr, rng)
        try:
            return c, b_algebra_points(arr, c)
        except NonGenericParameter as exc:
            last = exc
    raise NonGenericParameter(f"no generic parameter found in {tries} tries: {last}")
