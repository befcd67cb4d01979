"""The D-module of graded traces for a hypertoric arrangement.

Conventions (all weights are embedded vectors in Z^n):

* ``RTElement`` is an element sum_k q^k f_k(a, hbar) of the torus-localized
  ring, with q-monomials on the left.  Moving a polynomial past q^k uses
  f q^k = q^k f_k, so the product is (q^k f)(q^l g) = q^{k+l} f_l g.
* ``RModElement`` is an element of S_reg (x) A_0, stored as a single
  ``ConeFraction`` whose numerator has Poly coefficients: the denominator
  (a product of (1 - q^sigma), sigma in Sigma_+) sits on the far left.
* A series sum p_mu q^mu is acted on by a_i as multiplication by mu_i hbar
  and by q^k as a shift.
"""

from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb, gcd
from typing import Mapping, Sequence

from . import groebner, linalg
from .arrangement import (
    Arrangement,
    SignedWeight,
    cancellation_free,
    dual_basis_weights,
    semigroup_certificate,
)
from .exact import (
    ConeFraction,
    ConeSeries,
    LaurentQ,
    Poly,
    bracket_monomial,
    geometric_series,
    rat,
    shift_poly,
    vadd,
    vneg,
    vsub,
)
from .hea import (
    HEAElement,
    NonGenericParameter,
    b_algebra_points,
    b_algebra_presentation,
    central_forms,
    multiply,
    random_parameter,
)

Vector = tuple[int, ...]


class NotInSemigroup(ValueError):
    """Raised when a weight is not a non-negative combination of Sigma_+."""


class InsufficientPower(ValueError):
    """Raised when the denominator power is too small for the Ore step."""


class FitFailure(RuntimeError):
    """Raised when highest weights are not affine in the parameter."""


def _embedded(arr: Arrangement, lam) -> Vector:
    if isinstance(lam, SignedWeight):
        return lam.embedded
    lam = tuple(lam)
    if len(lam) == arr.n:
        return lam
    if len(lam) == arr.d:
        return arr.embed(lam)
    raise ValueError(f"cannot interpret {lam} as a weight")


# ---------------------------------------------------------------------------
# the torus-localized ring
# ---------------------------------------------------------------------------


class RTElement:
    """sum_k q^k f_k with q-monomials on the left."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Vector, Poly] | None = None):
        self.n = n
        clean: dict[Vector, Poly] = {}
        for k, f in (terms or {}).items():
            if not isinstance(f, Poly):
                f = Poly.constant(n, f)
            k = tuple(k)
            if f.terms:
                clean[k] = clean[k] + f if k in clean else f
        self.terms = {k: f for k, f in clean.items() if f.terms}

    @classmethod
    def q(cls, n: int, kappa: Sequence[int], f: Poly | int = 1) -> "RTElement":
        return cls(n, {tuple(kappa): f})

    @classmethod
    def poly(cls, f: Poly) -> "RTElement":
        return cls(f.nvars, {(0,) * f.nvars: f})

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "RTElement") -> "RTElement":
        out = dict(self.terms)
        for k, f in other.terms.items():
            out[k] = out[k] + f if k in out else f
        return RTElement(self.n, out)

    def __neg__(self) -> "RTElement":
        return RTElement(self.n, {k: -f for k, f in self.terms.items()})

    def __sub__(self, other: "RTElement") -> "RTElement":
        return self + (-other)

    def __mul__(self, other) -> "RTElement":
        if isinstance(other, Poly):
            other = RTElement.poly(other)
        if not isinstance(other, RTElement):
            return RTElement(self.n, {k: f * other for k, f in self.terms.items()})
        out: dict[Vector, Poly] = {}
        for k, f in self.terms.items():
            for l, g in other.terms.items():
                key = vadd(k, l)
                term = shift_poly(f, l) * g
                out[key] = out[key] + term if key in out else term
        return RTElement(self.n, out)

    def __rmul__(self, other) -> "RTElement":
        if isinstance(other, Poly):
            return RTElement.poly(other) * self
        return self * other

    def __eq__(self, other) -> bool:
        if not isinstance(other, RTElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def to_laurent(self) -> LaurentQ:
        return LaurentQ(self.n, self.n, self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms):
            f = self.terms[k]
            mono = f"q^({','.join(map(str, k))})" if any(k) else ""
            parts.append(f"{mono}*({f})" if mono else f"({f})")
        return " + ".join(parts)

    __repr__ = __str__


def one_minus_q_rt(n: int, lam: Sequence[int], power: int = 1) -> RTElement:
    base = RTElement.q(n, (0,) * n) - RTElement.q(n, lam)
    out = RTElement.q(n, (0,) * n)
    for _ in range(power):
        out = out * base
    return out


# ---------------------------------------------------------------------------
# module elements
# ---------------------------------------------------------------------------


class RModElement:
    """Element of S_reg (x) A_0: (1/D) * sum_k q^k (x) f_k."""

    __slots__ = ("n", "fraction")

    def __init__(self, fraction: ConeFraction):
        self.fraction = fraction
        self.n = fraction.numerator.rank

    @classmethod
    def from_rt(cls, x: RTElement, denominator: Mapping[Vector, int] | Sequence = ()) -> "RModElement":
        return cls(ConeFraction(x.to_laurent(), denominator))

    @classmethod
    def from_poly(cls, f: Poly) -> "RModElement":
        return cls.from_rt(RTElement.poly(f))

    @classmethod
    def zero(cls, n: int) -> "RModElement":
        return cls(ConeFraction(LaurentQ.zero(n, n)))

    @property
    def denominator(self) -> tuple:
        return self.fraction.denominator

    def numerator(self) -> RTElement:
        return RTElement(self.n, self.fraction.numerator.terms)

    def terms(self) -> list[tuple[ConeFraction, Poly]]:
        """(s, f) pairs with the element equal to sum s (x) f."""
        num = self.fraction.numerator
        one = Poly.one(self.n)
        return [
            (ConeFraction(LaurentQ(self.n, self.n, {k: one}), self.denominator), f)
            for k, f in sorted(num.terms.items())
        ]

    def is_zero(self) -> bool:
        return self.fraction.is_zero()

    def __add__(self, other: "RModElement") -> "RModElement":
        return RModElement(self.fraction + other.fraction)

    def __neg__(self) -> "RModElement":
        return RModElement(-self.fraction)

    def __sub__(self, other: "RModElement") -> "RModElement":
        return RModElement(self.fraction - other.fraction)

    def scale_s(self, s: ConeFraction) -> "RModElement":
        """Left multiplication by an element of S_reg (no Poly coefficients)."""
        return RModElement(s * self.fraction)

    def left_poly(self, x: Poly) -> "RModElement":
        """x . m for x in A_0, using x (F (x) g) = F (x) xg + hbar d_x(F) (x) g."""
        out = self
        # apply the monomials of x one linear factor at a time
        total = RModElement.zero(self.n)
        for exp, c in x.terms.items():
            piece = out
            for i, k in enumerate(exp[:-1]):
                for _ in range(k):
                    piece = piece._left_variable(i)
            piece = piece._scale_poly(Poly._raw(self.n, {(0,) * self.n + (exp[-1],): c}))
            total = total + piece
        return total

    def _scale_poly(self, c: Poly) -> "RModElement":
        num = self.fraction.numerator
        return RModElement(ConeFraction(LaurentQ(self.n, self.n, {k: c * f for k, f in num.terms.items()}), self.denominator))

    def _left_variable(self, i: int) -> "RModElement":
        n = self.n
        a = Poly.var(n, i)
        h = Poly.hbar(n)
        num = self.fraction.numerator
        # d_i(N / D) = (d_i N * D - N * d_i D) / D^2, with d_i q^k = k_i q^k
        den = self.fraction.denominator_poly()
        dn = LaurentQ(n, n, {k: f * k[i] for k, f in num.terms.items()})
        dd = LaurentQ(n, n, {k: f * k[i] for k, f in den.terms.items()})
        deriv_num = dn * den - num * dd
        deriv_den = {lam: 2 * k for lam, k in self.denominator}
        first = ConeFraction(LaurentQ(n, n, {k: a * f for k, f in num.terms.items()}), self.denominator)
        second = ConeFraction(deriv_num * h, deriv_den)
        return RModElement(first + second)

    def __eq__(self, other) -> bool:
        if not isinstance(other, RModElement):
            return NotImplemented
        return self.fraction == other.fraction

    def __hash__(self) -> int:
        return hash(self.denominator)

    def __str__(self) -> str:
        return str(self.fraction)

    __repr__ = __str__


def r_element(arr: Arrangement, lam) -> RTElement:
    """[a]^lambda (1 - q^lambda) = [a]^lambda - q^lambda [a]^{-lambda}, any lambda."""
    v = _embedded(arr, lam)
    n = arr.n
    return RTElement(n, {(0,) * n: bracket_monomial(v)}) - RTElement.q(n, v, bracket_monomial(vneg(v)))


def r_generator(arr: Arrangement, lam) -> RModElement:
    """r(lambda) for lambda in N Sigma_+."""
    v = _embedded(arr, lam)
    if semigroup_certificate(arr, v) is None:
        raise NotInSemigroup(f"{v} is not a non-negative combination of positive cocircuits")
    return RModElement.from_rt(r_element(arr, v))


# ---------------------------------------------------------------------------
# Ore condition
# ---------------------------------------------------------------------------


@dataclass
class OreStep:
    """s' x = r' s with s = (1 - q^lambda)^N and s' = (1 - q^lambda)^M."""

    lam: Vector
    N: int
    M: int
    r_prime: RTElement
    verified: bool


def ore_commute(x: Poly, lam: Sequence[int], N: int) -> OreStep:
    """Move (1 - q^lambda)^M past x, leaving (1 - q^lambda)^N on the right.

    With t = q^lambda we have t^k x = x_{-k lambda} t^k, so expanding x_{-k lambda}
    in finite differences gives
    (1 - t)^M x = sum_j C(M, j) (Delta^j x) (-t)^j (1 - t)^{M - j},
    where Delta^j x vanishes once j exceeds the a-degree of x.
    """
    lam = tuple(lam)
    n = x.nvars
    half = x.degree() // 2
    if N < half:
        raise InsufficientPower(f"N = {N} is smaller than deg(x)/2 = {half}")
    M = N + half
    back = vneg(lam)
    diffs = [x]
    while len(diffs) <= half:
        prev = diffs[-1]
        diffs.append(shift_poly(prev, back) - prev)
    t = RTElement.q(n, lam)
    r_prime = RTElement(n)
    for j, dj in enumerate(diffs):
        if dj.is_zero():
            continue
        term = RTElement.poly(dj) * comb(M, j) * (-1) ** j
        for _ in range(j):
            term = term * t
        term = term * one_minus_q_rt(n, lam, M - j - N)
        r_prime = r_prime + term
    left = one_minus_q_rt(n, lam, M) * RTElement.poly(x)
    right = r_prime * one_minus_q_rt(n, lam, N)
    return OreStep(lam, N, M, r_prime, left == right)


def rt_commutator(x: RTElement, y: RTElement) -> RTElement:
    return x * y - y * x


# ---------------------------------------------------------------------------
# generators of J
# ---------------------------------------------------------------------------


def reduce_r(arr: Arrangement, lam) -> list[tuple[RTElement, SignedWeight]]:
    """Write r(lambda), lambda in N Sigma_+, as sum c_mu r(mu) with mu in Sigma_+.

    Takes a cancellation-free decomposition lambda = sum of cocircuits.  If
    some summand mu is negative, r(lambda) = -q^lambda f_mu r(-mu) + g r(nu)
    with nu = lambda - mu; otherwise split off the last summand mu and use
    r(lambda) = q^nu f r(mu) + g r(nu).  Here f = [a]^lambda_nu / [a]^mu and
    g = [a]^lambda / [a]^nu.  The identity is re-verified by expansion.
    """
    v = _embedded(arr, lam)
    if semigroup_certificate(arr, v) is None:
        raise NotInSemigroup(f"{v} is not a non-negative combination of positive cocircuits")
    positive = {w.embedded: w for w in arr.positive_cocircuits}
    n = arr.n
    acc: dict[Vector, RTElement] = {}

    def add(mu: Vector, coeff: RTElement) -> None:
        acc[mu] = acc[mu] + coeff if mu in acc else coeff

    def rec(target: Vector, prefactor: RTElement) -> None:
        if not any(target):
            return
        parts = cancellation_free(arr, target)
        if len(parts) == 1:
            mu = parts[0].embedded
            if mu in positive:
                add(mu, prefactor)
            else:
                # r(mu) = -q^mu r(-mu)
                add(vneg(mu), prefactor * RTElement.q(n, mu, -1))
            return
        negative = [p for p in parts if p.embedded not in positive]
        mu = (negative[0] if negative else parts[-1]).embedded
        nu = vsub(target, mu)
        full = bracket_monomial(target)
        f = shift_poly(full, nu).exact_divide(bracket_monomial(mu))
        g = full.exact_divide(bracket_monomial(nu))
        if mu in positive:
            add(mu, prefactor * RTElement.q(n, nu, f))
        else:
            add(vneg(mu), prefactor * RTElement.q(n, target, -shift_poly(f, mu)))
        rec(nu, prefactor * RTElement.poly(g))

    rec(v, RTElement.q(n, (0,) * n))
    out = [(acc[mu], positive[mu]) for mu in sorted(acc) if not acc[mu].is_zero()]
    if expand_reduction(arr, out) != r_element(arr, v):
        raise ArithmeticError(f"reduction of r({v}) failed to re-expand")
    return out


def expand_reduction(arr: Arrangement, terms: Sequence[tuple[RTElement, SignedWeight]]) -> RTElement:
    total = RTElement(arr.n)
    for coeff, mu in terms:
        total = total + coeff * r_element(arr, mu)
    return total


def j_element(arr: Arrangement, a: HEAElement, b: HEAElement) -> RTElement:
    """1 (x) ab - q^lambda (x) ba for a of weight lambda and b of weight -lambda."""
    lam = _single_weight(a)
    if _single_weight(b) != vneg(lam):
        raise ValueError("a and b must have opposite weights")
    ab = multiply(a, b).component((0,) * arr.n)
    ba = multiply(b, a).component((0,) * arr.n)
    return RTElement.poly(ab) - RTElement.q(arr.n, lam, ba)


def _single_weight(x: HEAElement) -> Vector:
    ws = x.weights()
    if len(ws) != 1:
        raise ValueError("expected an element of a single weight")
    return ws[0]


# ---------------------------------------------------------------------------
# weight-zero reduction
# ---------------------------------------------------------------------------


def reduce_polynomial(arr: Arrangement, p: Poly, steps: list | None = None) -> RModElement:
    """Image of 1 (x) p in M_reg, reduced to S_reg (x) (division remainders).

    Divide p by the generators [a]^sigma.  A quotient term h [a]^sigma equals
    a'b' with a' = m^sigma and b' = m^{-sigma} h, and in M_reg
    a'b' = q^sigma/(1 - q^sigma) [b', a'], whose a-degree is lower by 2.
    steps, if given, collects the a-degree of every polynomial reduced.
    """
    n = arr.n
    if steps is not None:
        steps.append(p.a_degree())
    if p.is_zero():
        return RModElement.zero(n)
    sigmas = list(arr.positive_cocircuits)
    divisors = [groebner.from_poly(bracket_monomial(s.embedded)) for s in sigmas]
    quotients, remainder = groebner.divide(groebner.from_poly(p), divisors)
    result = RModElement.from_poly(groebner.to_poly(remainder, n))
    for sigma, quot in zip(sigmas, quotients):
        if not quot:
            continue
        h = groebner.to_poly(quot, n)
        a1 = HEAElement.monomial(arr, sigma.embedded)
        b1 = HEAElement(arr, {vneg(sigma.embedded): shift_poly(h, sigma.embedded)})
        comm = (multiply(b1, a1) - multiply(a1, b1)).component((0,) * n)
        inner = reduce_polynomial(arr, comm, steps)
        factor = ConeFraction(LaurentQ.monomial(sigma.embedded, n), {sigma.embedded: 1})
        result = result + inner.scale_s(factor)
    return result


def weight_zero_reduce(a: HEAElement, b: HEAElement, steps: list | None = None) -> RModElement:
    """Image of ab in M_reg for a of weight mu and b of weight -mu."""
    arr = a.arr
    mu = _single_weight(a) if not a.is_zero() else (0,) * arr.n
    nu = _single_weight(b) if not b.is_zero() else (0,) * arr.n
    if vadd(mu, nu) != (0,) * arr.n:
        raise ValueError("a and b must have opposite weights")
    p = multiply(a, b).component((0,) * arr.n)
    if not any(mu):
        if steps is not None:
            steps.append(p.a_degree())
        return RModElement.from_poly(p)
    return reduce_polynomial(arr, p, steps)


# ---------------------------------------------------------------------------
# specializations
# ---------------------------------------------------------------------------


@dataclass
class Presentation:
    target: str
    generators: list
    note: str

    def to_dict(self) -> dict:
        return {"target": self.target, "generators": [str(g) for g in self.generators], "note": self.note}


def specialize(arr: Arrangement, target: str, c: Sequence | None = None) -> Presentation:
    """Presentations of M at q -> 0, q -> 1, hbar -> 1, or a central value c."""
    n = arr.n
    if target == "q->0":
        return Presentation(target, b_algebra_presentation(arr), "ideal of A_0 generated by [a]^sigma")
    if target == "q->1":
        gens = [bracket_monomial(s.embedded) - bracket_monomial(vneg(s.embedded)) for s in arr.positive_cocircuits]
        return Presentation(target, gens, "commutator relations [m^sigma, m^-sigma] in A_0")
    if target == "hbar->1":
        gens = [r_element(arr, s).to_laurent().map_coefficients(lambda k, f: f.specialize_hbar(1))
                for s in arr.positive_cocircuits]
        return Presentation(target, gens, "r(sigma) with hbar = 1")
    if target == "central":
        if c is None or len(c) != len(arr.kernel):
            raise ValueError(f"central specialization needs {len(arr.kernel)} values")
        h = Poly.hbar(n)
        gens = list(b_algebra_presentation(arr))
        for form, value in zip(central_forms(arr), c):
            gens.append(form - h * Fraction(value))
        return Presentation(target, gens, "B-algebra with theta(a) = <theta, c> hbar")
    raise ValueError(f"unknown specialization target {target!r}")


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TraceFunctional:
    """Verma module at the fixed point of a basis, for central value c."""

    basis: tuple[int, ...]
    c: tuple
    offset: tuple
    tangent: tuple[Vector, ...]
    signs: tuple[int, ...]

    def to_dict(self) -> dict:
        return {
            "basis": [i + 1 for i in self.basis],
            "c": [str(x) for x in self.c],
            "offset": [str(x) for x in self.offset],
            "tangent_weights": [list(t) for t in self.tangent],
        }


def highest_weight(arr: Arrangement, basis: Sequence[int], c: Sequence) -> tuple:
    """w with w_j = 0 (sign +) or -1 (sign -) on the basis and theta(w) = c.

    At the fixed point of a basis the lowering coordinate of each pair kills
    the highest weight vector: w_j v = 0 gives a_j = 0 and z_j v = 0 gives
    a_j = w_j z_j - hbar = -hbar.
    """
    signs = {i: s for i, _, s in dual_basis_weights(arr, basis)}
    rows: list[list] = []
    rhs: list = []
    for i in basis:
        rows.append([int(j == i) for j in range(arr.n)])
        rhs.append(0 if signs[i] > 0 else -1)
    for k, value in zip(arr.kernel, c):
        rows.append(list(k))
        rhs.append(Fraction(value))
    sol = linalg.solve(rows, rhs)
    if sol is None:
        raise ArithmeticError("inconsistent highest-weight system")
    return tuple(rat(x) for x in sol)


def trace_functional(arr: Arrangement, basis: Sequence[int], c: Sequence,
                     points: Sequence[tuple] | None = None) -> TraceFunctional:
    """Build the Verma data and cross-check the offset against the fibre points."""
    basis = tuple(basis)
    dbw = dual_basis_weights(arr, basis)
    offset = highest_weight(arr, basis, c)
    if points is None:
        points = b_algebra_points(arr, c)
    if offset not in set(points):
        raise NonGenericParameter(f"highest weight of basis {[i + 1 for i in basis]} is not a fibre point")
    tangent = tuple(w.embedded if s > 0 else vneg(w.embedded) for _, w, s in dbw)
    return TraceFunctional(basis, tuple(rat(Fraction(x)) for x in c), offset, tangent, tuple(s for _, _, s in dbw))


def trace_functionals(arr: Arrangement, c: Sequence) -> list[TraceFunctional]:
    points = b_algebra_points(arr, c)
    tfs = [trace_functional(arr, b, c, points) for b in arr.bases]
    if len({tf.offset for tf in tfs}) != len(tfs):
        raise NonGenericParameter("two fixed points share a highest weight")
    return tfs


@dataclass(frozen=True)
class WeightFunctionalSpace:
    """The weight functionals w^c_x at a central value c, one per fixed point."""

    arr: Arrangement
    c: tuple
    functionals: tuple[TraceFunctional, ...]

    @classmethod
    def at(cls, arr: Arrangement, c: Sequence) -> "WeightFunctionalSpace":
        return cls(arr, tuple(Fraction(x) for x in c), tuple(trace_functionals(arr, c)))

    def offsets(self) -> list[tuple]:
        return [tf.offset for tf in self.functionals]

    def __len__(self) -> int:
        return len(self.functionals)


def verma_character(arr: Arrangement, tf: TraceFunctional, D: int) -> ConeSeries:
    """q^{w} prod_i 1/(1 - q^{alpha_i}) truncated at level D."""
    xi = arr.xi_lift
    n = arr.n
    series = ConeSeries(tf.offset, xi, D, n, {(0,) * n: 1})
    for alpha in tf.tangent:
        series = series * geometric_series(alpha, xi, D, n)
    return series


def weight_value(f: Poly, mu: Sequence) -> Poly:
    """f evaluated at a_i = mu_i hbar, as a polynomial in hbar."""
    n = f.nvars
    out: dict[tuple, Fraction] = {}
    for exp, c in f.terms.items():
        v = Fraction(c)
        deg = exp[-1]
        for x, k in zip(mu, exp[:-1]):
            if k:
                v *= Fraction(x) ** k
                deg += k
        if v:
            key = (0,) * n + (deg,)
            out[key] = out.get(key, 0) + v
    return Poly(n, out)


def _integer_parts(f: Poly, scale: int) -> list[tuple[int, int, list[tuple[int, tuple]]]]:
    """Split f into hbar-degree parts with integer coefficients.

    At a_i = (M_i / scale) hbar the part of degree k evaluates to
    hbar^k * sum(coeff * prod M_i^e_i) / (den * scale^k).
    """
    groups: dict[int, list[tuple[Fraction, tuple, int]]] = {}
    for exp, c in f.terms.items():
        groups.setdefault(sum(exp), []).append((Fraction(c), exp[:-1], exp[-1]))
    parts = []
    for k, terms in sorted(groups.items()):
        den = 1
        for c, _, _ in terms:
            den = den * c.denominator // gcd(den, c.denominator)
        ints = [(int(c * den) * scale ** eh, tuple((i, e) for i, e in enumerate(ea) if e)) for c, ea, eh in terms]
        parts.append((k, den * scale ** k, ints))
    return parts


def apply_poly(f: Poly, series: ConeSeries) -> ConeSeries:
    """Action of f in A_0 on a series: each q^mu is an eigenvector."""
    n = series.nvars
    scale = 1
    for o in series.offset:
        d = Fraction(o).denominator
        scale = scale * d // gcd(scale, d)
    base = [int(Fraction(o) * scale) for o in series.offset]
    parts = _integer_parts(f, scale)
    out: dict[Vector, Poly] = {}
    for v, p in series.terms.items():
        m = [b + scale * x for b, x in zip(base, v)]
        value: list[tuple[int, Fraction]] = []
        for k, den, ints in parts:
            total = 0
            for c, factors in ints:
                for i, e in factors:
                    c *= m[i] ** e
                total += c
            if total:
                value.append((k, Fraction(total, den)))
        if not value:
            continue
        if all(not any(e[:-1]) for e in p.terms):
            # coefficients in Q[hbar]: multiply directly
            prod: dict[int, Fraction] = {}
            for e, c in p.terms.items():
                for k, val in value:
                    prod[e[-1] + k] = prod.get(e[-1] + k, 0) + c * val
            terms = {(0,) * n + (k,): rat(c) for k, c in prod.items() if c}
            if terms:
                out[v] = Poly._raw(n, terms)
        else:
            out[v] = Poly(n, {(0,) * n + (k,): val for k, val in value}) * p
    return ConeSeries(series.offset, series.xi, series.bound, n, out)


def apply_rt(x: RTElement, series: ConeSeries) -> ConeSeries:
    total: ConeSeries | None = None
    for k, f in sorted(x.terms.items()):
        piece = apply_poly(f, series).shift(k)
        total = piece if total is None else total + piece
    if total is None:
        return ConeSeries(series.offset, series.xi, series.bound, series.nvars, {})
    return total


def apply_element(m: RModElement, series: ConeSeries) -> ConeSeries:
    """Action of an element of S_reg (x) A_0 on a positively reasonable series."""
    out = apply_rt(m.numerator(), series)
    for lam, k in m.denominator:
        g = geometric_series(lam, series.xi, out.bound - _lowest(out), series.nvars, k)
        out = out * g
    return out


def _lowest(series: ConeSeries) -> int:
    return min((series.level(v) for v in series.terms), default=0) if series.terms else 0


def graded_trace(arr: Arrangement, a: Poly, tf: TraceFunctional, D: int) -> ConeSeries:
    """sum_mu tr(a | V_mu) q^mu over the Verma module of tf."""
    return apply_poly(a, verma_character(arr, tf, D))


def monomials_up_to(n: int, degree: int) -> list[Poly]:
    """a-monomials of grading degree at most ``degree`` (deg a_i = 2)."""
    out = [Poly.one(n)]
    for k in range(1, degree // 2 + 1):
        for combo in combinations_with_replacement(range(n), k):
            exp = [0] * (n + 1)
            for i in combo:
                exp[i] += 1
            out.append(Poly._raw(n, {tuple(exp): 1}))
    return out


class _IntegerView:
    """Scaled integer data of a series with constant coefficients."""

    def __init__(self, series: ConeSeries):
        scale = 1
        for o in series.offset:
            d = Fraction(o).denominator
            scale = scale * d // gcd(scale, d)
        base = [int(Fraction(o) * scale) for o in series.offset]
        coeffs = {v: Fraction(p.constant_term()) for v, p in series.terms.items()}
        cden = 1
        for c in coeffs.values():
            cden = cden * c.denominator // gcd(cden, c.denominator)
        self.scale = scale
        self.rows = [
            (v, series.level(v), [b + scale * y for b, y in zip(base, v)], int(c * cden))
            for v, c in sorted(coeffs.items())
        ]


def trace_vanishes(x: RTElement, series: ConeSeries, view: _IntegerView | None = None) -> tuple[bool, tuple | None]:
    """Whether x . series is zero up to truncation, with a witness exponent.

    Same result as ``apply_rt(x, series).is_zero()``; when the series has
    constant coefficients each output coefficient is accumulated as an exact
    integer numerator over a common denominator per hbar degree.
    """
    if any(any(e) for p in series.terms.values() for e in p.terms):
        out = apply_rt(x, series)
        if out.is_zero():
            return True, None
        return False, out.items()[0][0]
    if not x.terms:
        return True, None
    view = view or _IntegerView(series)
    bound = series.bound + min(series.level(k) for k in x.terms)
    pieces = [(k, series.level(k), _integer_parts(f, view.scale)) for k, f in x.terms.items()]
    common: dict[int, int] = {}
    for _, _, parts in pieces:
        for deg, den, _ in parts:
            common[deg] = common.get(deg, 1) * den // gcd(common.get(deg, 1), den)
    acc: dict[tuple, int] = {}
    for k, klevel, parts in pieces:
        for v, level, m, cv in view.rows:
            if level + klevel > bound:
                continue
            key = tuple(a + b for a, b in zip(v, k))
            for deg, den, ints in parts:
                total = 0
                for c, factors in ints:
                    for i, e in factors:
                        c *= m[i] ** e
                    total += c
                if total:
                    slot = key + (deg,)
                    acc[slot] = acc.get(slot, 0) + total * (common[deg] // den) * cv
    for slot, value in sorted(acc.items()):
        if value:
            return False, series.exponent(slot[:-1])
    return True, None


def annihilation_sweep(arr: Arrangement, tfs: Sequence[TraceFunctional], D: int, max_degree: int = 6) -> dict:
    """Check tr(ab) = q^sigma tr(ba) for a = m^sigma, b = m^{-sigma} u.

    The element 1 (x) ab - q^sigma (x) ba is built from products in the
    algebra, compared with u r(sigma), and applied to every Verma character.
    """
    n = arr.n
    failures = []
    checked = 0
    monos = monomials_up_to(n, max_degree)
    characters = []
    for tf in tfs:
        chi = verma_character(arr, tf, D)
        characters.append((tf, chi, _IntegerView(chi)))
    for sigma in arr.positive_cocircuits:
        a = HEAElement.monomial(arr, sigma.embedded)
        r = r_element(arr, sigma)
        for u in monos:
            j = j_element(arr, a, HEAElement(arr, {vneg(sigma.embedded): u}))
            if j != RTElement.poly(u) * r:
                failures.append({"sigma": list(sigma.embedded), "monomial": str(u),
                                 "reason": "J element differs from u r(sigma)"})
                continue
            for tf, chi, view in characters:
                checked += 1
                ok, witness = trace_vanishes(j, chi, view)
                if not ok:
                    failures.append({"basis": [i + 1 for i in tf.basis], "sigma": list(sigma.embedded),
                                     "monomial": str(u), "reason": "nonzero trace",
                                     "witness": [str(x) for x in witness]})
    return {"checked": checked, "truncation": D, "max_degree": max_degree, "failures": failures,
            "passed": not failures}


# ---------------------------------------------------------------------------
# rank certificate
# ---------------------------------------------------------------------------


@dataclass
class RankReport:
    c: list
    upper: int | None
    fixed_points: int
    lower: int
    passed: bool
    witnesses: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "c": [str(x) for x in self.c],
            "upper": self.upper,
            "fixed_points": self.fixed_points,
            "lower": self.lower,
            "passed": self.passed,
            "witnesses": self.witnesses,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def same_coset(arr: Arrangement, w1: Sequence, w2: Sequence) -> bool:
    diff = [Fraction(x) - Fraction(y) for x, y in zip(w1, w2)]
    if any(x.denominator != 1 for x in diff):
        return False
    return arr.in_weight_lattice(tuple(int(x) for x in diff))


def rank_certificate(arr: Arrangement, c: Sequence) -> RankReport:
    """upper = dim of the q = 0 fibre, fixed_points = #bases, lower = #cosets."""
    from .hea import fibre_dimension

    c = tuple(Fraction(x) for x in c)
    upper = fibre_dimension(arr, c)
    fixed = len(arr.bases)
    weights = [highest_weight(arr, b, c) for b in arr.bases]
    classes: list[tuple] = []
    witnesses = []
    for b, w in zip(arr.bases, weights):
        for rep_b, rep in classes:
            if same_coset(arr, w, rep):
                witnesses.append({"bases": [[i + 1 for i in rep_b], [i + 1 for i in b]],
                                  "difference": [str(Fraction(x) - Fraction(y)) for x, y in zip(w, rep)]})
                break
        else:
            classes.append((b, w))
    lower = len(classes)
    passed = upper is not None and upper == fixed == lower
    return RankReport([rat(x) for x in c], upper, fixed, lower, passed, witnesses)


def random_rank_certificate(arr: Arrangement, rng: random.Random, tries: int = 5) -> RankReport:
    """Rank certificate at a random generic c, resampling degenerate draws."""
    last = None
    for _ in range(tries):
        c = random_parameter(arr, rng)
        try:
            trace_functionals(arr, c)
        except NonGenericParameter as exc:
            last = exc
            continue
        return rank_certificate(arr, c)
    raise NonGenericParameter(f"no generic parameter found in {tries} tries: {last}")


# ---------------------------------------------------------------------------
# highest-weight differences
# ---------------------------------------------------------------------------


@dataclass
class AppendixReport:
    samples: int
    affine: bool
    convention: str | None
    conventions_tested: dict
    rho_nonzero: bool
    passed: bool
    witnesses: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def _match_points(arr: Arrangement, c, points) -> dict[tuple[int, ...], tuple]:
    """Assign fibre points to bases through their integral coordinates."""
    out = {}
    for p in points:
        integral = tuple(i for i, x in enumerate(p) if Fraction(x).denominator == 1)
        if integral not in arr.bases:
            raise NonGenericParameter(f"point {p} does not single out a basis")
        out[integral] = p
    if len(out) != len(arr.bases):
        raise NonGenericParameter("fibre points do not match the bases")
    return out


def _half_sum(vectors: Sequence[Sequence[int]], n: int) -> tuple:
    return tuple(sum((Fraction(v[i]) for v in vectors), Fraction(0)) / 2 for i in range(n))


def appendix_check(arr: Arrangement, rng: random.Random | None = None, extra: int = 2) -> AppendixReport:
    """Fit c -> w^c_x from fibre points and compare with tangent data.

    The fit uses len(kernel) + 1 random parameters plus ``extra`` checks.
    Constant parts are compared with chi_x = 1/2 sum of xi-positive tangent
    weights under four conventions: the sign of the chi difference, and
    the origin of c (zero, or the symmetric point c_l = -1/2 sum_i K_li).
    """
    rng = rng or random.Random(0)
    k = len(arr.kernel)
    n = arr.n
    samples: list[tuple[tuple, dict]] = []
    attempts = 0
    while len(samples) < k + 1 + extra:
        attempts += 1
        if attempts > 10 * (k + 1 + extra):
            raise FitFailure("could not draw enough generic parameters")
        c = random_parameter(arr, rng, bound=50)
        try:
            samples.append((c, _match_points(arr, c, b_algebra_points(arr, c))))
        except NonGenericParameter:
            continue
    fit_set, check_set = samples[: k + 1], samples[k + 1:]
    design = [[*c, 1] for c, _ in fit_set]
    if linalg.rank(design) != k + 1:
        raise FitFailure("fit samples are affinely dependent")
    fits: dict[tuple[int, ...], list[list[Fraction]]] = {}
    for b in arr.bases:
        columns = []
        for i in range(n):
            sol = linalg.solve(design, [Fraction(pts[b][i]) for _, pts in fit_set])
            if sol is None:
                raise FitFailure(f"no affine fit for basis {[j + 1 for j in b]}")
            columns.append(sol)
        fits[b] = columns

    def evaluate(b, c):
        return tuple(sum((col[l] * Fraction(c[l]) for l in range(k)), col[k]) for col in fits[b])

    affine = all(evaluate(b, c) == tuple(Fraction(x) for x in pts[b]) for c, pts in check_set for b in arr.bases)
    witnesses = []
    if not affine:
        raise FitFailure("highest weights are not affine in c")
    chi = {b: _half_sum([t for t in tangent_vectors(arr, b)], n) for b in arr.bases}
    # the symmetric origin is tried first: it is the one that holds in general
    origins = {"symmetric": tuple(-Fraction(sum(row), 2) for row in arr.kernel),
               "zero": tuple(Fraction(0) for _ in range(k))}
    tested = {}
    for oname, origin in origins.items():
        for sname, sign in (("plus", 1), ("minus", -1)):
            ok = True
            for x in arr.bases:
                for y in arr.bases:
                    lhs = vsub(evaluate(x, origin), evaluate(y, origin))
                    rhs = tuple(sign * (p - q) for p, q in zip(chi[x], chi[y]))
                    if lhs != rhs:
                        ok = False
            tested[f"{oname}/{sname}"] = ok
    convention = next((name for name, ok in tested.items() if ok), None)
    rho_nonzero = True
    for x in arr.bases:
        for y in arr.bases:
            if x < y and all(fits[x][i][:k] == fits[y][i][:k] for i in range(n)):
                rho_nonzero = False
                witnesses.append({"bases": [[i + 1 for i in x], [i + 1 for i in y]], "reason": "equal linear parts"})
    passed = affine and convention is not None and rho_nonzero
    return AppendixReport(len(samples), affine, convention, tested, rho_nonzero, passed, witnesses)


def tangent_vectors(arr: Arrangement, basis: Sequence[int]) -> list[Vector]:
    return [w.embedded if s > 0 else vneg(w.embedded) for _, w, s in dual_basis_weights(arr, basis)]
