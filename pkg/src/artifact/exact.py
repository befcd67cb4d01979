"""Exact arithmetic kernel.

Rational polynomials in a_1..a_n and hbar, Laurent polynomials in lattice
monomials q^lambda with polynomial coefficients, cone fractions with
(1 - q^lambda) denominators, and truncated series over a lattice coset.

Coefficients are ``int`` or ``fractions.Fraction``; integral fractions are
normalised to ``int`` so the common case stays fast.  No floating point is
used anywhere.
"""

from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import Iterable, Mapping, Sequence

Rational = int | Fraction
Vector = tuple[int, ...]


class NotDivisible(ArithmeticError):
    """Raised when an exact division has a nonzero remainder."""


class NonPositiveDenominator(ValueError):
    """Raised when a denominator does not pair positively with xi."""


def rat(x) -> Rational:
    """Normalise a rational number: integral values become ``int``."""
    if type(x) is int:
        return x
    if isinstance(x, Fraction):
        return x.numerator if x.denominator == 1 else x
    if isinstance(x, bool):
        return int(x)
    if isinstance(x, int):
        return int(x)
    if isinstance(x, str):
        return rat(Fraction(x))
    raise TypeError(f"not an exact rational: {x!r}")


def dot(u: Sequence, v: Sequence):
    return sum(x * y for x, y in zip(u, v))


def vadd(u: Sequence, v: Sequence) -> tuple:
    return tuple(x + y for x, y in zip(u, v))


def vsub(u: Sequence, v: Sequence) -> tuple:
    return tuple(x - y for x, y in zip(u, v))


def vneg(u: Sequence) -> tuple:
    return tuple(-x for x in u)


def vscale(c, u: Sequence) -> tuple:
    return tuple(c * x for x in u)


# ---------------------------------------------------------------------------
# Poly
# ---------------------------------------------------------------------------


class Poly:
    """Polynomial over Q in variables a_1..a_n and hbar.

    ``terms`` maps exponent tuples of length ``nvars + 1`` (the last entry is
    the hbar exponent) to nonzero rationals.  Every variable has degree 2.
    Instances are treated as immutable.
    """

    __slots__ = ("nvars", "terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[tuple, Rational] | None = None):
        self.nvars = nvars
        clean: dict[tuple, Rational] = {}
        if terms:
            width = nvars + 1
            for exp, c in terms.items():
                c = rat(c)
                if c:
                    if len(exp) != width:
                        raise ValueError(f"exponent {exp} has wrong length for {nvars} variables")
                    clean[tuple(exp)] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, nvars: int, terms: dict) -> "Poly":
        p = object.__new__(cls)
        p.nvars = nvars
        p.terms = terms
        p._hash = None
        return p

    # constructors -----------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> "Poly":
        return cls._raw(nvars, {})

    @classmethod
    def constant(cls, nvars: int, c) -> "Poly":
        c = rat(c)
        return cls._raw(nvars, {(0,) * (nvars + 1): c} if c else {})

    @classmethod
    def one(cls, nvars: int) -> "Poly":
        return cls.constant(nvars, 1)

    @classmethod
    def var(cls, nvars: int, i: int) -> "Poly":
        """The variable a_{i+1} (indices are 0-based)."""
        if not 0 <= i < nvars:
            raise IndexError(f"variable index {i} out of range for {nvars} variables")
        exp = [0] * (nvars + 1)
        exp[i] = 1
        return cls._raw(nvars, {tuple(exp): 1})

    @classmethod
    def hbar(cls, nvars: int) -> "Poly":
        exp = [0] * (nvars + 1)
        exp[-1] = 1
        return cls._raw(nvars, {tuple(exp): 1})

    @classmethod
    def linear(cls, nvars: int, coeffs: Sequence, hbar_coeff=0, const=0) -> "Poly":
        """sum_i coeffs[i] a_i + hbar_coeff * hbar + const."""
        terms = {}
        for i, c in enumerate(coeffs):
            if c:
                exp = [0] * (nvars + 1)
                exp[i] = 1
                terms[tuple(exp)] = c
        if hbar_coeff:
            exp = [0] * (nvars + 1)
            exp[-1] = 1
            terms[tuple(exp)] = hbar_coeff
        if const:
            terms[(0,) * (nvars + 1)] = const
        return cls(nvars, terms)

    # basic queries ------------------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and not any(next(iter(self.terms))))

    def constant_term(self) -> Rational:
        return self.terms.get((0,) * (self.nvars + 1), 0)

    def degree(self) -> int:
        """Grading degree (every variable has degree 2); -1 for zero."""
        if not self.terms:
            return -1
        return max(2 * sum(e) for e in self.terms)

    def a_degree(self) -> int:
        """Total degree in the a variables alone (hbar ignored); -1 for zero."""
        if not self.terms:
            return -1
        return max(sum(e[:-1]) for e in self.terms)

    def is_homogeneous(self) -> bool:
        degs = {sum(e) for e in self.terms}
        return len(degs) <= 1

    def __len__(self) -> int:
        return len(self.terms)

    # arithmetic ------------------------------------------------------------------
    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.nvars != self.nvars:
                raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
            return other
        return Poly.constant(self.nvars, other)

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        if not other.terms:
            return self
        if not self.terms:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = rat(v)
            else:
                out.pop(e, None)
        return Poly._raw(self.nvars, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly._raw(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def scale(self, c) -> "Poly":
        c = rat(c)
        if not c:
            return Poly.zero(self.nvars)
        return Poly._raw(self.nvars, {e: rat(v * c) for e, v in self.terms.items()})

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            return self.scale(other)
        if other.nvars != self.nvars:
            raise ValueError(f"variable count mismatch: {self.nvars} vs {other.nvars}")
        if not self.terms or not other.terms:
            return Poly.zero(self.nvars)
        out: dict[tuple, Rational] = {}
        get = out.get
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(x + y for x, y in zip(e1, e2))
                out[e] = get(e, 0) + c1 * c2
        return Poly._raw(self.nvars, {e: rat(c) for e, c in out.items() if c})

    def __rmul__(self, other) -> "Poly":
        return self.scale(other)

    def __pow__(self, k: int) -> "Poly":
        if k < 0:
            raise ValueError("negative power of a polynomial")
        result = Poly.one(self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other) -> bool:
        if isinstance(other, Poly):
            return self.nvars == other.nvars and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            return self.terms == Poly.constant(self.nvars, other).terms
        return NotImplemented

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.terms.items())))
        return self._hash

    # substitution -----------------------------------------------------------------
    def evaluate(self, values: Sequence, hbar=1) -> Rational:
        """Evaluate at a_i = values[i] and the given hbar."""
        total = 0
        for e, c in self.terms.items():
            t = c
            for x, k in zip(values, e):
                if k:
                    t *= x ** k
            if e[-1]:
                t *= hbar ** e[-1]
            total += t
        return rat(total)

    def specialize_hbar(self, value) -> "Poly":
        """Substitute hbar = value (the result still has an hbar slot)."""
        out: dict[tuple, Rational] = {}
        for e, c in self.terms.items():
            k = e[-1]
            ne = e[:-1] + (0,)
            out[ne] = out.get(ne, 0) + c * (value ** k if k else 1)
        return Poly(self.nvars, out)

    def substitute(self, images: Sequence["Poly"], hbar_image: "Poly | None" = None) -> "Poly":
        """Ring map sending a_i to images[i] and hbar to hbar_image."""
        if not images and hbar_image is None:
            return self
        target = images[0].nvars if images else hbar_image.nvars
        hb = hbar_image if hbar_image is not None else Poly.hbar(target)
        powers: dict[tuple[int, int], Poly] = {}

        def power(j: int, k: int) -> Poly:
            key = (j, k)
            if key not in powers:
                base = images[j] if j < self.nvars else hb
                powers[key] = base ** k
            return powers[key]

        total = Poly.zero(target)
        for e, c in self.terms.items():
            t = Poly.constant(target, c)
            for j, k in enumerate(e):
                if k:
                    t = t * power(j, k)
            total = total + t
        return total

    def homogeneous_part(self, degree: int) -> "Poly":
        return Poly._raw(self.nvars, {e: c for e, c in self.terms.items() if 2 * sum(e) == degree})

    def divisible_by_hbar(self) -> bool:
        return all(e[-1] > 0 for e in self.terms)

    def exact_divide(self, other: "Poly") -> "Poly":
        """Return h with other * h == self, else raise NotDivisible."""
        other = self._coerce(other)
        if not other.terms:
            raise ZeroDivisionError("division by the zero polynomial")
        if other.is_constant():
            return self.scale(Fraction(1) / Fraction(other.constant_term()))
        key = _grevlex_key
        lead_g = max(other.terms, key=key)
        lead_c = other.terms[lead_g]
        rem = dict(self.terms)
        quot: dict[tuple, Rational] = {}
        while rem:
            lead_f = max(rem, key=key)
            diff = tuple(x - y for x, y in zip(lead_f, lead_g))
            if min(diff) < 0:
                raise NotDivisible(f"{self} is not divisible by {other}")
            c = rat(Fraction(rem[lead_f]) / lead_c)
            quot[diff] = c
            for e, v in other.terms.items():
                ne = tuple(x + y for x, y in zip(e, diff))
                nv = rem.get(ne, 0) - c * v
                if nv:
                    rem[ne] = rat(nv)
                else:
                    rem.pop(ne, None)
        return Poly(self.nvars, quot)

    # display ---------------------------------------------------------------------
    def to_str(self, names: Sequence[str] | None = None, hbar: str = "hbar") -> str:
        if not self.terms:
            return "0"
        names = list(names) if names is not None else [f"a{i + 1}" for i in range(self.nvars)]
        names = names + [hbar]
        parts = []
        for e in sorted(self.terms, key=_grevlex_key, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(names, e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                cs = str(c) if isinstance(c, int) else f"({c})"
                parts.append(f"{cs}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    def __str__(self) -> str:
        return self.to_str()

    def __repr__(self) -> str:
        return f"Poly({self.to_str()})"


def _grevlex_key(exp: tuple) -> tuple:
    """Sort key for the graded reverse lexicographic order."""
    return (sum(exp), tuple(-x for x in reversed(exp)))


def bracket_power(i: int, k: int, nvars: int) -> Poly:
    """[a_i]^k for the 0-based variable index i.

    k > 0 gives a_i (a_i - hbar) ... (a_i - (k-1) hbar), k < 0 gives
    (a_i + hbar)(a_i + 2 hbar) ... (a_i - k hbar), and k = 0 gives 1.
    """
    if not 0 <= i < nvars:
        raise IndexError(f"variable index {i} out of range for {nvars} variables")
    result = Poly.one(nvars)
    if k > 0:
        shifts = range(0, -k, -1)
    else:
        shifts = range(1, -k + 1)
    for s in shifts:
        result = result * Poly.linear(nvars, [1 if j == i else 0 for j in range(nvars)], hbar_coeff=s)
    return result


def bracket_monomial(weights: Sequence[int], nvars: int | None = None) -> Poly:
    """[a]^lambda = prod_i [a_i]^{lambda_i} for an embedded weight."""
    n = len(weights) if nvars is None else nvars
    result = Poly.one(n)
    for i, k in enumerate(weights):
        if k:
            result = result * bracket_power(i, k, n)
    return result


_SHIFT_CACHE: dict[tuple[int, int], list[tuple[int, int, int]]] = {}


def _binomial_shift(k: int, s: int) -> list[tuple[int, int, int]]:
    """Terms (c, j, l) of (a + s hbar)^k = sum c a^j hbar^l."""
    key = (k, s)
    if key not in _SHIFT_CACHE:
        _SHIFT_CACHE[key] = [(comb(k, j) * s ** (k - j), j, k - j) for j in range(k + 1)]
    return _SHIFT_CACHE[key]


def shift_poly(f: Poly, weights: Sequence[int]) -> Poly:
    """Substitute a_i -> a_i + weights[i] * hbar."""
    if not any(weights):
        return f
    n = f.nvars
    out: dict[tuple, Rational] = {}
    get = out.get
    for e, c in f.terms.items():
        partial: list[tuple[list[int], int, Rational]] = [([], e[-1], c)]
        for i in range(n):
            k = e[i]
            s = weights[i]
            if k == 0:
                partial = [(pre + [0], h, v) for pre, h, v in partial]
            elif s == 0:
                partial = [(pre + [k], h, v) for pre, h, v in partial]
            else:
                partial = [
                    (pre + [j], h + l, v * b)
                    for pre, h, v in partial
                    for b, j, l in _binomial_shift(k, s)
                ]
        for pre, h, v in partial:
            key = tuple(pre) + (h,)
            out[key] = get(key, 0) + v
    return Poly(n, out)


# ---------------------------------------------------------------------------
# LaurentQ
# ---------------------------------------------------------------------------


class LaurentQ:
    """Finitely supported sum of q^mu with Poly coefficients.

    Exponents are integer vectors of length ``rank``.  With ``refinement``
    r > 1 an exponent vector v stands for the rational exponent v / r, which
    gives the index-r refinement of the lattice (used for q^{alpha/2}).
    Multiplication is the commutative product of q-monomials.
    """

    __slots__ = ("rank", "nvars", "refinement", "terms")

    def __init__(self, rank: int, nvars: int, terms: Mapping[Vector, Poly] | None = None, refinement: int = 1):
        self.rank = rank
        self.nvars = nvars
        self.refinement = refinement
        clean: dict[Vector, Poly] = {}
        if terms:
            for mu, p in terms.items():
                if not isinstance(p, Poly):
                    p = Poly.constant(nvars, p)
                if p.terms:
                    if len(mu) != rank:
                        raise ValueError(f"exponent {mu} does not have rank {rank}")
                    clean[tuple(int(x) for x in mu)] = p
        self.terms = clean

    @classmethod
    def monomial(cls, mu: Sequence[int], nvars: int, coeff=1, refinement: int = 1) -> "LaurentQ":
        c = coeff if isinstance(coeff, Poly) else Poly.constant(nvars, coeff)
        return cls(len(mu), nvars, {tuple(mu): c}, refinement)

    @classmethod
    def zero(cls, rank: int, nvars: int, refinement: int = 1) -> "LaurentQ":
        return cls(rank, nvars, {}, refinement)

    @classmethod
    def one(cls, rank: int, nvars: int) -> "LaurentQ":
        return cls.monomial((0,) * rank, nvars)

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def refine(self, r: int) -> "LaurentQ":
        """Re-express over the index-r refinement (r a multiple of ours)."""
        if r == self.refinement:
            return self
        if r % self.refinement:
            raise ValueError("refinement must be a multiple of the current one")
        m = r // self.refinement
        return LaurentQ(self.rank, self.nvars, {tuple(m * x for x in mu): p for mu, p in self.terms.items()}, r)

    def coarsen(self) -> "LaurentQ":
        """Return the coarsest refinement that still represents all exponents."""
        r = self.refinement
        if r == 1:
            return self
        from math import gcd

        g = r
        for mu in self.terms:
            for x in mu:
                g = gcd(g, x)
        if g == 1:
            return self
        return LaurentQ(self.rank, self.nvars, {tuple(x // g for x in mu): p for mu, p in self.terms.items()}, r // g)

    def _align(self, other: "LaurentQ") -> tuple["LaurentQ", "LaurentQ"]:
        if self.rank != other.rank or self.nvars != other.nvars:
            raise ValueError("LaurentQ shape mismatch")
        if self.refinement == other.refinement:
            return self, other
        from math import lcm

        r = lcm(self.refinement, other.refinement)
        return self.refine(r), other.refine(r)

    def __add__(self, other) -> "LaurentQ":
        if not isinstance(other, LaurentQ):
            other = LaurentQ.monomial((0,) * self.rank, self.nvars, other)
        a, b = self._align(other)
        out = dict(a.terms)
        for mu, p in b.terms.items():
            if mu in out:
                s = out[mu] + p
                if s.terms:
                    out[mu] = s
                else:
                    del out[mu]
            else:
                out[mu] = p
        return LaurentQ(a.rank, a.nvars, out, a.refinement).coarsen()

    __radd__ = __add__

    def __neg__(self) -> "LaurentQ":
        return LaurentQ(self.rank, self.nvars, {mu: -p for mu, p in self.terms.items()}, self.refinement)

    def __sub__(self, other) -> "LaurentQ":
        if not isinstance(other, LaurentQ):
            other = LaurentQ.monomial((0,) * self.rank, self.nvars, other)
        return self + (-other)

    def __rsub__(self, other) -> "LaurentQ":
        return (-self) + other

    def __mul__(self, other) -> "LaurentQ":
        if not isinstance(other, LaurentQ):
            c = other if isinstance(other, Poly) else Poly.constant(self.nvars, other)
            return LaurentQ(self.rank, self.nvars, {mu: p * c for mu, p in self.terms.items()}, self.refinement)
        a, b = self._align(other)
        out: dict[Vector, Poly] = {}
        for m1, p1 in a.terms.items():
            for m2, p2 in b.terms.items():
                mu = tuple(x + y for x, y in zip(m1, m2))
                prod = p1 * p2
                if mu in out:
                    out[mu] = out[mu] + prod
                else:
                    out[mu] = prod
        return LaurentQ(a.rank, a.nvars, out, a.refinement).coarsen()

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "LaurentQ":
        if k < 0:
            raise ValueError("negative power")
        result = LaurentQ.one(self.rank, self.nvars)
        for _ in range(k):
            result = result * self
        return result

    def shift(self, mu: Sequence[int]) -> "LaurentQ":
        """Multiply by q^mu (mu in the current refinement's units)."""
        return LaurentQ(
            self.rank, self.nvars, {tuple(x + y for x, y in zip(k, mu)): p for k, p in self.terms.items()}, self.refinement
        )

    def map_coefficients(self, fn) -> "LaurentQ":
        return LaurentQ(self.rank, self.nvars, {mu: fn(mu, p) for mu, p in self.terms.items()}, self.refinement)

    def map_exponents(self, fn) -> "LaurentQ":
        """Apply a lattice map to every exponent, merging collisions."""
        out: dict[Vector, Poly] = {}
        for mu, p in self.terms.items():
            nu = tuple(fn(mu))
            out[nu] = out[nu] + p if nu in out else p
        rank = len(next(iter(out))) if out else self.rank
        return LaurentQ(rank, self.nvars, out, self.refinement)

    def __eq__(self, other) -> bool:
        if isinstance(other, LaurentQ):
            if self.rank != other.rank or self.nvars != other.nvars:
                return False
            a, b = self._align(other)
            return a.terms == b.terms
        if isinstance(other, (int, Fraction, Poly)):
            return self == LaurentQ.monomial((0,) * self.rank, self.nvars, other)
        return NotImplemented

    def __hash__(self) -> int:
        c = self.coarsen()
        return hash((c.rank, c.refinement, frozenset(c.terms.items())))

    def value_at_one(self) -> Poly:
        """Sum of all coefficients (the specialisation q = 1)."""
        total = Poly.zero(self.nvars)
        for p in self.terms.values():
            total = total + p
        return total

    def exponents(self) -> list[Vector]:
        return sorted(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for mu in sorted(self.terms, reverse=True):
            p = self.terms[mu]
            if self.refinement == 1:
                e = ",".join(str(x) for x in mu)
            else:
                e = ",".join(str(Fraction(x, self.refinement)) for x in mu)
            mono = f"q^({e})" if any(mu) else ""
            pc = str(p)
            if not mono:
                parts.append(pc)
            elif pc == "1":
                parts.append(mono)
            else:
                parts.append(f"({pc})*{mono}")
        return " + ".join(parts)

    __repr__ = __str__


def one_minus_q(mu: Sequence[int], nvars: int, power: int = 1) -> LaurentQ:
    """(1 - q^mu)^power as a LaurentQ."""
    base = LaurentQ.one(len(mu), nvars) - LaurentQ.monomial(mu, nvars)
    return base ** power


def _lex_lead(terms: Iterable[Vector]) -> Vector:
    return max(terms)


def exact_div(f: LaurentQ, g: LaurentQ) -> LaurentQ:
    """Return h with g*h == f exactly, or raise NotDivisible.

    Division runs in lexicographic order on exponents.  If g divides f then
    the exponents of the quotient lie in the box between the coordinatewise
    extremes of f and g, which bounds the search.
    """
    if g.is_zero():
        raise ZeroDivisionError("division by zero LaurentQ")
    f, g = f._align(g)
    if f.is_zero():
        return LaurentQ.zero(f.rank, f.nvars, f.refinement)
    rank = f.rank
    lo = [min(m[j] for m in f.terms) - min(m[j] for m in g.terms) for j in range(rank)]
    hi = [max(m[j] for m in f.terms) - max(m[j] for m in g.terms) for j in range(rank)]
    if any(l > h for l, h in zip(lo, hi)):
        raise NotDivisible("support of the quotient would be empty")
    lead_g = _lex_lead(g.terms)
    lead_c = g.terms[lead_g]
    rem = dict(f.terms)
    quot: dict[Vector, Poly] = {}
    while rem:
        lead_f = _lex_lead(rem)
        mu = tuple(x - y for x, y in zip(lead_f, lead_g))
        if any(x < l or x > h for x, l, h in zip(mu, lo, hi)):
            raise NotDivisible("remainder leaves the admissible quotient box")
        c = rem[lead_f].exact_divide(lead_c)
        quot[mu] = c
        for nu, p in g.terms.items():
            key = tuple(x + y for x, y in zip(nu, mu))
            v = rem[key] - p * c if key in rem else -(p * c)
            if v.terms:
                rem[key] = v
            else:
                rem.pop(key, None)
    return LaurentQ(rank, f.nvars, quot, f.refinement).coarsen()


# ---------------------------------------------------------------------------
# ConeFraction
# ---------------------------------------------------------------------------


class ConeFraction:
    """numerator / prod (1 - q^lambda)^k with common factors cancelled."""

    __slots__ = ("numerator", "denominator")

    def __init__(self, numerator: LaurentQ, denominator: Mapping[Vector, int] | Iterable[tuple[Vector, int]] = ()):
        den: dict[Vector, int] = {}
        items = denominator.items() if isinstance(denominator, Mapping) else denominator
        for lam, k in items:
            lam = tuple(lam)
            if k < 0:
                raise ValueError("denominator powers must be positive")
            if not any(lam):
                raise ZeroDivisionError("1 - q^0 is zero")
            if k:
                den[lam] = den.get(lam, 0) + k
        num = numerator
        for lam in sorted(den):
            factor = one_minus_q(lam, num.nvars)
            while den[lam] and not num.is_zero():
                try:
                    num = exact_div(num, factor)
                except NotDivisible:
                    break
                den[lam] -= 1
            if num.is_zero():
                den = {}
                break
        self.numerator = num
        self.denominator = tuple(sorted((lam, k) for lam, k in den.items() if k))

    @property
    def nvars(self) -> int:
        return self.numerator.nvars

    def denominator_poly(self) -> LaurentQ:
        result = LaurentQ.one(self.numerator.rank, self.numerator.nvars)
        for lam, k in self.denominator:
            result = result * one_minus_q(lam, self.numerator.nvars, k)
        return result

    def __add__(self, other: "ConeFraction") -> "ConeFraction":
        den = dict(self.denominator)
        for lam, k in other.denominator:
            den[lam] = max(den.get(lam, 0), k)
        num = self.numerator * _complement(den, self.denominator, self.nvars, self.numerator.rank)
        num = num + other.numerator * _complement(den, other.denominator, self.nvars, self.numerator.rank)
        return ConeFraction(num, den)

    def __neg__(self) -> "ConeFraction":
        return ConeFraction(-self.numerator, self.denominator)

    def __sub__(self, other: "ConeFraction") -> "ConeFraction":
        return self + (-other)

    def __mul__(self, other) -> "ConeFraction":
        if isinstance(other, ConeFraction):
            den = dict(self.denominator)
            for lam, k in other.denominator:
                den[lam] = den.get(lam, 0) + k
            return ConeFraction(self.numerator * other.numerator, den)
        return ConeFraction(self.numerator * other, self.denominator)

    __rmul__ = __mul__

    def is_zero(self) -> bool:
        return self.numerator.is_zero()

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConeFraction):
            return NotImplemented
        return (self.numerator * other.denominator_poly()) == (other.numerator * self.denominator_poly())

    def __hash__(self) -> int:
        return hash(self.denominator)

    def __str__(self) -> str:
        if not self.denominator:
            return str(self.numerator)
        den = "*".join(
            f"(1-q^({','.join(map(str, lam))}))" + (f"^{k}" if k > 1 else "") for lam, k in self.denominator
        )
        return f"[{self.numerator}] / {den}"

    __repr__ = __str__


def _complement(target: Mapping[Vector, int], have: Iterable[tuple[Vector, int]], nvars: int, rank: int) -> LaurentQ:
    have = dict(have)
    result = LaurentQ.one(rank, nvars)
    for lam, k in target.items():
        extra = k - have.get(lam, 0)
        if extra:
            result = result * one_minus_q(lam, nvars, extra)
    return result


# ---------------------------------------------------------------------------
# ConeSeries
# ---------------------------------------------------------------------------


class ConeSeries:
    """Truncated series sum p_v q^{offset + v} over a lattice coset.

    Keys v are integer lattice vectors and the stored exponent is
    ``offset + v``.  Only keys with <v, xi> <= bound are kept; a product
    keeps the smaller bound.  Truncation is exact for the kept terms when
    every factor is supported on keys pairing non-negatively with xi up to
    finitely many exceptions already present in its own support.
    """

    __slots__ = ("offset", "xi", "bound", "nvars", "terms")

    def __init__(self, offset: Sequence, xi: Sequence[int], bound: int, nvars: int, terms: Mapping[Vector, Poly] | None = None):
        self.offset = tuple(rat(x) for x in offset)
        self.xi = tuple(xi)
        self.bound = bound
        self.nvars = nvars
        clean: dict[Vector, Poly] = {}
        if terms:
            for v, p in terms.items():
                if not isinstance(p, Poly):
                    p = Poly.constant(nvars, p)
                if p.terms and dot(v, self.xi) <= bound:
                    clean[tuple(v)] = p
        self.terms = clean

    @property
    def rank(self) -> int:
        return len(self.offset)

    def level(self, v: Sequence[int]) -> int:
        return dot(v, self.xi)

    def exponent(self, v: Sequence[int]) -> tuple:
        return tuple(rat(o + x) for o, x in zip(self.offset, v))

    def _rekey(self, offset: Sequence) -> "ConeSeries":
        """Re-express with another offset differing by a lattice vector."""
        delta = [o - n for o, n in zip(self.offset, offset)]
        if any(Fraction(d).denominator != 1 for d in delta):
            raise ValueError("offsets lie in different lattice cosets")
        delta = tuple(int(d) for d in delta)
        shift = dot(delta, self.xi)
        return ConeSeries(
            offset, self.xi, self.bound + shift, self.nvars, {vadd(v, delta): p for v, p in self.terms.items()}
        )

    def _check(self, other: "ConeSeries") -> None:
        if self.xi != other.xi or self.nvars != other.nvars:
            raise ValueError("ConeSeries shape mismatch")

    def __add__(self, other: "ConeSeries") -> "ConeSeries":
        self._check(other)
        if other.offset != self.offset:
            other = other._rekey(self.offset)
        bound = min(self.bound, other.bound)
        out = {v: p for v, p in self.terms.items() if self.level(v) <= bound}
        for v, p in other.terms.items():
            if self.level(v) > bound:
                continue
            out[v] = out[v] + p if v in out else p
        return ConeSeries(self.offset, self.xi, bound, self.nvars, out)

    def __neg__(self) -> "ConeSeries":
        return ConeSeries(self.offset, self.xi, self.bound, self.nvars, {v: -p for v, p in self.terms.items()})

    def __sub__(self, other: "ConeSeries") -> "ConeSeries":
        return self + (-other)

    def __mul__(self, other) -> "ConeSeries":
        if not isinstance(other, ConeSeries):
            c = other if isinstance(other, Poly) else Poly.constant(self.nvars, other)
            return ConeSeries(self.offset, self.xi, self.bound, self.nvars, {v: p * c for v, p in self.terms.items()})
        self._check(other)
        min_self = min((self.level(v) for v in self.terms), default=0)
        min_other = min((other.level(v) for v in other.terms), default=0)
        # a factor is only known up to its own bound, so a product term is
        # reliable up to that bound plus the lowest level of the other factor
        bound = min(self.bound, other.bound, self.bound + min_other, other.bound + min_self)
        out: dict[Vector, Poly] = {}
        for v1, p1 in self.terms.items():
            l1 = self.level(v1)
            for v2, p2 in other.terms.items():
                if l1 + other.level(v2) > bound:
                    continue
                v = vadd(v1, v2)
                prod = p1 * p2
                out[v] = out[v] + prod if v in out else prod
        return ConeSeries(vadd(self.offset, other.offset), self.xi, bound, self.nvars, out)

    def shift(self, mu: Sequence[int]) -> "ConeSeries":
        """Multiply by q^mu for a lattice vector mu (bound moves with it)."""
        return ConeSeries(
            self.offset,
            self.xi,
            self.bound + dot(mu, self.xi),
            self.nvars,
            {vadd(v, mu): p for v, p in self.terms.items()},
        )

    def truncate(self, bound: int) -> "ConeSeries":
        return ConeSeries(self.offset, self.xi, min(bound, self.bound), self.nvars, self.terms)

    def map_coefficients(self, fn) -> "ConeSeries":
        return ConeSeries(self.offset, self.xi, self.bound, self.nvars, {v: fn(v, p) for v, p in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other) -> bool:
        if not isinstance(other, ConeSeries):
            return NotImplemented
        if self.xi != other.xi or self.nvars != other.nvars:
            return False
        try:
            diff = self - other
        except ValueError:
            return False
        return diff.is_zero()

    def __hash__(self) -> int:
        return hash((self.xi, self.bound))

    def items(self) -> list[tuple[tuple, Poly]]:
        """(exponent, coefficient) pairs sorted by level then exponent."""
        keys = sorted(self.terms, key=lambda v: (self.level(v), v))
        return [(self.exponent(v), self.terms[v]) for v in keys]

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, p in self.items():
            es = ",".join(str(x) for x in e)
            pc = str(p)
            parts.append(f"q^({es})" if pc == "1" else f"({pc})*q^({es})")
        return " + ".join(parts) + f" + O(level>{self.bound})"

    __repr__ = __str__


def laurent_to_series(f: LaurentQ, xi: Sequence[int], bound: int) -> ConeSeries:
    """View a Laurent polynomial as a series with zero offset."""
    if f.refinement != 1:
        raise ValueError("series need integral exponents")
    return ConeSeries((0,) * f.rank, xi, bound, f.nvars, f.terms)


def geometric_series(lam: Sequence[int], xi: Sequence[int], bound: int, nvars: int, power: int = 1) -> ConeSeries:
    """Truncated expansion of 1/(1 - q^lam)^power."""
    step = dot(lam, xi)
    if step <= 0:
        raise NonPositiveDenominator(f"<{tuple(lam)}, xi> = {step} is not positive")
    rank = len(lam)
    terms = {}
    j = 0
    while j * step <= bound:
        # coefficient of q^{j lam} in (1 - q^lam)^{-power}
        terms[tuple(j * x for x in lam)] = comb(j + power - 1, power - 1)
        j += 1
    return ConeSeries((0,) * rank, xi, bound, nvars, terms)


def expand_fraction(x: ConeFraction, bound: int, xi: Sequence[int]) -> ConeSeries:
    """Expand a cone fraction as a series truncated at <mu, xi> <= bound."""
    for lam, _ in x.denominator:
        if dot(lam, xi) <= 0:
            raise NonPositiveDenominator(f"denominator 1 - q^{lam} does not pair positively with xi={tuple(xi)}")
    num = x.numerator
    if num.refinement != 1:
        raise ValueError("cone fractions with refined exponents cannot be expanded")
    lowest = min((dot(mu, xi) for mu in num.terms), default=0)
    # the denominators only raise levels, so expanding them to bound - lowest suffices
    result = laurent_to_series(num, xi, bound)
    for lam, k in x.denominator:
        result = result * geometric_series(lam, xi, bound - min(lowest, 0), num.nvars, k)
    return result.truncate(bound)
