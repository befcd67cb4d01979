"""Buchberger's algorithm over Q with the degrevlex order.

Polynomials are plain dicts mapping exponent tuples to ``Fraction``.  The
variable order is by index (x_0 > x_1 > ...).  Desk-scale ideals only.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Iterable, Sequence

from .exact import Poly

PolyDict = dict[tuple[int, ...], Fraction]


def order_key(exp: tuple[int, ...]) -> tuple:
    return (sum(exp), tuple(-x for x in reversed(exp)))


def leading(f: PolyDict) -> tuple[int, ...]:
    return max(f, key=order_key)


def _divides(m: tuple, e: tuple) -> bool:
    return all(x <= y for x, y in zip(m, e))


def _lcm(m: tuple, e: tuple) -> tuple:
    return tuple(max(x, y) for x, y in zip(m, e))


def monic(f: PolyDict) -> PolyDict:
    c = f[leading(f)]
    return {e: v / c for e, v in f.items()}


def _sub_scaled(f: PolyDict, g: PolyDict, c: Fraction, shift: tuple) -> None:
    """f -= c * x^shift * g, in place."""
    for e, v in g.items():
        k = tuple(x + y for x, y in zip(e, shift))
        nv = f.get(k, 0) - c * v
        if nv:
            f[k] = nv
        else:
            f.pop(k, None)


def normal_form(f: PolyDict, basis: Sequence[PolyDict]) -> PolyDict:
    """Fully reduce f modulo the polynomials in basis."""
    f = dict(f)
    leads = [(leading(g), g) for g in basis if g]
    rem: PolyDict = {}
    while f:
        lm = leading(f)
        lc = f[lm]
        for m, g in leads:
            if _divides(m, lm):
                shift = tuple(y - x for x, y in zip(m, lm))
                _sub_scaled(f, g, Fraction(lc) / g[m], shift)
                break
        else:
            rem[lm] = lc
            del f[lm]
    return rem


def divide(f: PolyDict, divisors: Sequence[PolyDict]) -> tuple[list[PolyDict], PolyDict]:
    """Multivariate division: f = sum q_i * divisors[i] + remainder."""
    f = dict(f)
    quotients: list[PolyDict] = [{} for _ in divisors]
    leads = [leading(g) if g else None for g in divisors]
    rem: PolyDict = {}
    while f:
        lm = leading(f)
        lc = f[lm]
        for i, g in enumerate(divisors):
            m = leads[i]
            if m is not None and _divides(m, lm):
                shift = tuple(y - x for x, y in zip(m, lm))
                c = Fraction(lc) / g[m]
                quotients[i][shift] = quotients[i].get(shift, 0) + c
                _sub_scaled(f, g, c, shift)
                break
        else:
            rem[lm] = lc
            del f[lm]
    return quotients, rem


def _spoly(f: PolyDict, g: PolyDict) -> PolyDict:
    mf, mg = leading(f), leading(g)
    l = _lcm(mf, mg)
    out: PolyDict = {}
    sf = tuple(x - y for x, y in zip(l, mf))
    sg = tuple(x - y for x, y in zip(l, mg))
    _sub_scaled(out, f, Fraction(-1) / f[mf], sf)
    _sub_scaled(out, g, Fraction(1) / g[mg], sg)
    return out


def groebner_basis(polys: Iterable[PolyDict]) -> list[PolyDict]:
    """Reduced Groebner basis (monic, sorted by leading monomial)."""
    G: list[PolyDict] = []
    for f in polys:
        f = {e: Fraction(v) for e, v in f.items() if v}
        if f:
            r = normal_form(f, G)
            if r:
                G.append(monic(r))
    pairs = list(combinations(range(len(G)), 2))
    while pairs:
        pairs.sort(key=lambda p: order_key(_lcm(leading(G[p[0]]), leading(G[p[1]]))), reverse=True)
        i, j = pairs.pop()
        mi, mj = leading(G[i]), leading(G[j])
        if all(x == 0 or y == 0 for x, y in zip(mi, mj)):
            continue  # coprime leading monomials
        l = _lcm(mi, mj)
        # chain criterion
        if any(
            k != i and k != j and _divides(leading(G[k]), l)
            and (min(i, k), max(i, k)) not in pairs and (min(j, k), max(j, k)) not in pairs
            for k in range(len(G))
        ):
            continue
        r = normal_form(_spoly(G[i], G[j]), G)
        if r:
            G.append(monic(r))
            k = len(G) - 1
            pairs.extend((m, k) for m in range(k))
    return _reduce(G)


def _reduce(G: list[PolyDict]) -> list[PolyDict]:
    G = [g for g in G if g]
    minimal = []
    for i, g in enumerate(G):
        lg = leading(g)
        if any(_divides(leading(h), lg) and (leading(h) != lg or j < i) for j, h in enumerate(G) if j != i):
            continue
        minimal.append(g)
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        lg = leading(g)
        tail = {e: v for e, v in g.items() if e != lg}
        r = normal_form(tail, others)
        r[lg] = g[lg]
        reduced.append(monic(r))
    reduced.sort(key=lambda f: order_key(leading(f)))
    return reduced


def standard_monomials(G: Sequence[PolyDict], nvars: int, limit: int = 100000) -> list[tuple] | None:
    """Monomials outside the leading ideal, or None if there are infinitely many."""
    leads = [leading(g) for g in G]
    if any(not any(m) for m in leads):
        return []  # the unit ideal
    for i in range(nvars):
        if not any(m[i] > 0 and sum(m) == m[i] for m in leads):
            return None
    out = []
    frontier = [(0,) * nvars]
    seen = set(frontier)
    while frontier:
        m = frontier.pop()
        if any(_divides(l, m) for l in leads):
            continue
        out.append(m)
        if len(out) > limit:
            raise RuntimeError("quotient too large")
        for i in range(nvars):
            n = m[:i] + (m[i] + 1,) + m[i + 1:]
            if n not in seen:
                seen.add(n)
                frontier.append(n)
    return sorted(out, key=order_key)


def quotient_dimension(polys: Iterable[PolyDict], nvars: int) -> int | None:
    basis = standard_monomials(groebner_basis(polys), nvars)
    return None if basis is None else len(basis)


def ideals_equal(first: Iterable[PolyDict], second: Iterable[PolyDict]) -> bool:
    return _canonical(groebner_basis(first)) == _canonical(groebner_basis(second))


def _canonical(G: list[PolyDict]) -> list[tuple]:
    return [tuple(sorted(g.items())) for g in G]


def from_poly(p: Poly, hbar: bool = True) -> PolyDict:
    """Convert a Poly; with hbar=False the hbar slot is dropped (it must be unused)."""
    if hbar:
        return {e: Fraction(c) for e, c in p.terms.items()}
    out: PolyDict = {}
    for e, c in p.terms.items():
        if e[-1]:
            raise ValueError("polynomial still involves hbar")
        out[e[:-1]] = Fraction(c)
    return out


def to_poly(f: PolyDict, nvars: int, hbar: bool = True) -> Poly:
    if hbar:
        return Poly(nvars, f)
    return Poly(nvars, {e + (0,): c for e, c in f.items()})
