"""Hyperplane-arrangement combinatorics.

An arrangement is an n x d integer matrix ``gamma`` whose rows are the
vectors gamma_i in the cocharacter lattice, together with a GIT character
``theta`` (coordinates in the kernel basis) and a cocharacter ``xi``.

Weights lambda in the character lattice are handled through their embedded
vectors (<lambda, gamma_i>)_i in Z^n; circuits live in the kernel lattice,
also as vectors in Z^n.  Orderings are lexicographic on embedded vectors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from typing import Sequence

from . import linalg
from .exact import dot

Vector = tuple[int, ...]


class NotABasis(ValueError):
    """Raised when an index set is not a basis of the arrangement."""


class InvalidArrangement(ValueError):
    """Raised when an operation needs a valid arrangement and gets another."""


@dataclass(frozen=True)
class SignedWeight:
    """A weight with its intrinsic coordinates and its embedding in Z^n."""

    intrinsic: Vector
    embedded: Vector

    def __neg__(self) -> "SignedWeight":
        return SignedWeight(tuple(-x for x in self.intrinsic), tuple(-x for x in self.embedded))

    def support(self) -> frozenset[int]:
        return frozenset(i for i, x in enumerate(self.embedded) if x)

    def to_dict(self) -> dict:
        return {"intrinsic": list(self.intrinsic), "embedded": list(self.embedded)}


class Arrangement:
    """Integer matrix gamma (rows gamma_i) with characters theta and xi."""

    def __init__(self, gamma: Sequence[Sequence[int]], theta: Sequence[int], xi: Sequence[int],
                 kernel: Sequence[Sequence[int]] | None = None):
        self.gamma: tuple[Vector, ...] = tuple(tuple(int(x) for x in row) for row in gamma)
        if not self.gamma or not self.gamma[0]:
            raise InvalidArrangement("gamma must be a nonempty n x d matrix")
        d = len(self.gamma[0])
        if any(len(row) != d for row in self.gamma):
            raise InvalidArrangement("gamma rows have different lengths")
        self.theta: Vector = tuple(int(x) for x in theta)
        self.xi: Vector = tuple(int(x) for x in xi)
        if kernel is None:
            kernel = linalg.integer_kernel(linalg.transpose(self.gamma), self.n)
        self.kernel: tuple[Vector, ...] = tuple(tuple(int(x) for x in k) for k in kernel)

    @property
    def n(self) -> int:
        return len(self.gamma)

    @property
    def d(self) -> int:
        return len(self.gamma[0])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Arrangement)
            and self.gamma == other.gamma
            and self.theta == other.theta
            and self.xi == other.xi
            and self.kernel == other.kernel
        )

    def __hash__(self) -> int:
        return hash((self.gamma, self.theta, self.xi, self.kernel))

    def __repr__(self) -> str:
        return f"Arrangement(gamma={[list(r) for r in self.gamma]}, theta={list(self.theta)}, xi={list(self.xi)})"

    def to_dict(self) -> dict:
        return {
            "gamma": [list(r) for r in self.gamma],
            "theta": list(self.theta),
            "xi": list(self.xi),
        }

    # lattice maps -------------------------------------------------------------
    def embed(self, intrinsic: Sequence[int]) -> Vector:
        """lambda -> (<lambda, gamma_i>)_i."""
        return tuple(dot(intrinsic, row) for row in self.gamma)

    def weight(self, intrinsic: Sequence[int]) -> SignedWeight:
        return SignedWeight(tuple(intrinsic), self.embed(intrinsic))

    @cached_property
    def _reference_basis(self) -> tuple[int, ...]:
        for subset in combinations(range(self.n), self.d):
            if linalg.det([self.gamma[i] for i in subset]) != 0:
                return subset
        raise InvalidArrangement("gamma does not have full rank")

    def intrinsic(self, embedded: Sequence) -> Vector:
        """Recover lambda from its embedding; raises if not in the image."""
        rows = [self.gamma[i] for i in self._reference_basis]
        sol = linalg.solve(rows, [embedded[i] for i in self._reference_basis])
        if sol is None or any(x.denominator != 1 for x in sol):
            raise ValueError(f"{tuple(embedded)} is not an embedded weight")
        lam = tuple(int(x) for x in sol)
        if self.embed(lam) != tuple(embedded):
            raise ValueError(f"{tuple(embedded)} is not an embedded weight")
        return lam

    def in_weight_lattice(self, embedded: Sequence) -> bool:
        try:
            self.intrinsic(embedded)
        except ValueError:
            return False
        return True

    def pair_xi(self, embedded: Sequence) -> Fraction | int:
        """<lambda, xi> computed from the embedding (works for rational vectors too)."""
        return dot(embedded, self.xi_lift)

    @cached_property
    def xi_lift(self) -> tuple:
        """A vector x in Q^n with sum_i x_i gamma_i = xi, supported on a basis."""
        basis = self._reference_basis
        cols = linalg.transpose([self.gamma[i] for i in basis])
        sol = linalg.solve(cols, self.xi)
        lift = [Fraction(0)] * self.n
        for i, x in zip(basis, sol):
            lift[i] = x
        return tuple(int(x) if x.denominator == 1 else x for x in lift)

    def kernel_coordinates(self, alpha: Sequence[int]) -> tuple:
        """Coordinates of a kernel vector in the stored kernel basis."""
        if not self.kernel:
            if any(alpha):
                raise ValueError("nonzero vector in a zero kernel")
            return ()
        cols = linalg.transpose(self.kernel)
        sol = linalg.solve(cols, list(alpha))
        if sol is None:
            raise ValueError(f"{tuple(alpha)} is not in the kernel lattice")
        return tuple(int(x) if x.denominator == 1 else x for x in sol)

    def pair_theta(self, alpha: Sequence[int]):
        return dot(self.kernel_coordinates(alpha), self.theta)

    # matroid data ---------------------------------------------------------------
    @cached_property
    def bases(self) -> tuple[tuple[int, ...], ...]:
        return tuple(s for s in combinations(range(self.n), self.d)
                     if linalg.det([self.gamma[i] for i in s]) != 0)

    @cached_property
    def cocircuits(self) -> tuple[SignedWeight, ...]:
        return tuple(_cocircuits(self))

    @cached_property
    def circuits(self) -> tuple[SignedWeight, ...]:
        return tuple(_circuits(self))

    @cached_property
    def positive_cocircuits(self) -> tuple[SignedWeight, ...]:
        """Sigma_+: cocircuits pairing positively with xi."""
        return tuple(c for c in self.cocircuits if dot(c.intrinsic, self.xi) > 0)

    @cached_property
    def positive_circuits(self) -> tuple[SignedWeight, ...]:
        """Circuits pairing positively with theta."""
        return tuple(c for c in self.circuits if dot(c.intrinsic, self.theta) > 0)

    def is_cocircuit(self, embedded: Sequence[int]) -> bool:
        return tuple(embedded) in {c.embedded for c in self.cocircuits}


def _cocircuits(arr: Arrangement) -> list[SignedWeight]:
    """Primitive normals to hyperplanes spanned by d-1 rows, minimal support."""
    d = arr.d
    found: dict[Vector, SignedWeight] = {}
    if d == 1:
        candidates = [(1,), (-1,)]
    else:
        candidates = []
        seen_flats: set[frozenset[int]] = set()
        for subset in combinations(range(arr.n), d - 1):
            rows = [arr.gamma[i] for i in subset]
            if linalg.rank(rows) != d - 1:
                continue
            normal = linalg.nullspace(rows, d)
            if len(normal) != 1:
                continue
            lam = linalg.primitive(normal[0])
            flat = frozenset(i for i in range(arr.n) if dot(lam, arr.gamma[i]) == 0)
            if flat in seen_flats:
                continue
            seen_flats.add(flat)
            candidates.extend([lam, tuple(-x for x in lam)])
    for lam in candidates:
        emb = arr.embed(lam)
        if any(emb):
            found[emb] = SignedWeight(tuple(lam), emb)
    supports = {e: frozenset(i for i, x in enumerate(e) if x) for e in found}
    minimal = [
        w for e, w in found.items()
        if not any(supports[o] < supports[e] for o in found)
    ]
    return sorted(minimal, key=lambda w: w.embedded)


def _circuits(arr: Arrangement) -> list[SignedWeight]:
    """Minimal dependent row sets and their primitive kernel vectors."""
    out: dict[Vector, SignedWeight] = {}
    dependent_minimal: list[frozenset[int]] = []
    for size in range(1, arr.d + 2):
        for subset in combinations(range(arr.n), size):
            s = frozenset(subset)
            if any(m <= s for m in dependent_minimal):
                continue
            rows = [arr.gamma[i] for i in subset]
            if linalg.rank(rows) == size:
                continue
            dependent_minimal.append(s)
            kern = linalg.nullspace(linalg.transpose(rows), size)
            vec = linalg.primitive(kern[0])
            full = [0] * arr.n
            for i, x in zip(subset, vec):
                full[i] = x
            for sign in (1, -1):
                emb = tuple(sign * x for x in full)
                try:
                    coords = arr.kernel_coordinates(emb)
                except ValueError:
                    continue
                out[emb] = SignedWeight(tuple(coords), emb)
    return sorted(out.values(), key=lambda w: w.embedded)


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    passed: bool
    witness: str = ""

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "witness": self.witness}


@dataclass
class ValidationReport:
    checks: list[Check] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def get(self, name: str) -> Check:
        return next(c for c in self.checks if c.name == name)

    def to_dict(self) -> dict:
        return {"ok": self.ok, "checks": [c.to_dict() for c in self.checks]}


def validate(gamma: Sequence[Sequence[int]], theta: Sequence[int], xi: Sequence[int]) -> ValidationReport:
    """Check conditions (1)-(3) and genericity of theta and xi; never raises."""
    report = ValidationReport()
    try:
        rows = [tuple(int(x) for x in r) for r in gamma]
        if not rows or not rows[0] or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("gamma must be a nonempty rectangular integer matrix")
    except (TypeError, ValueError) as exc:
        report.checks.append(Check("shape", False, str(exc)))
        return report
    n, d = len(rows), len(rows[0])
    shape_msgs = []
    if n < d:
        shape_msgs.append(f"n={n} < d={d}")
    if linalg.rank(rows) != d:
        shape_msgs.append("rows do not span the cocharacter lattice over Q")
    if len(xi) != d:
        shape_msgs.append(f"xi has length {len(xi)}, expected {d}")
    if len(theta) != n - d:
        shape_msgs.append(f"theta has length {len(theta)}, expected {n - d}")
    report.checks.append(Check("shape", not shape_msgs, "; ".join(shape_msgs)))
    if shape_msgs:
        return report

    # condition (1)
    witness = ""
    for i, r in enumerate(rows):
        if not any(r):
            witness = f"gamma_{i + 1} is zero"
            break
        if linalg.content(r) != 1:
            witness = f"gamma_{i + 1} = {list(r)} is not primitive"
            break
        others = rows[:i] + rows[i + 1:]
        if linalg.rank(others) != linalg.rank(rows):
            witness = f"gamma_{i + 1} = {list(r)} is not in the span of the other rows"
            break
    report.checks.append(Check("condition_1", not witness, witness))

    arr = Arrangement(rows, theta, xi)
    # condition (2): the rows generate the cocharacter lattice
    witness = ""
    minors_gcd = 0
    for s in combinations(range(n), d):
        minors_gcd = linalg.content([minors_gcd, linalg.det([rows[i] for i in s])])
    if minors_gcd != 1:
        witness = f"rows generate a sublattice of index {minors_gcd}"
    report.checks.append(Check("condition_2", not witness, witness))

    # condition (3): unimodularity
    witness = ""
    for s in combinations(range(n), d):
        m = linalg.det([rows[i] for i in s])
        if m not in (0, 1, -1):
            witness = f"rows {[i + 1 for i in s]} form a Q-basis with determinant {m}"
            break
    report.checks.append(Check("condition_3", not witness, witness))

    witness = ""
    for c in arr.cocircuits:
        if dot(c.intrinsic, arr.xi) == 0:
            witness = f"cocircuit {list(c.intrinsic)} pairs to zero with xi"
            break
    report.checks.append(Check("xi_generic", not witness, witness))

    witness = ""
    for c in arr.circuits:
        if dot(c.intrinsic, arr.theta) == 0:
            witness = f"circuit {list(c.embedded)} pairs to zero with theta"
            break
    report.checks.append(Check("theta_generic", not witness, witness))
    return report


def validated(gamma, theta, xi) -> Arrangement:
    report = validate(gamma, theta, xi)
    if not report.ok:
        raise InvalidArrangement("; ".join(f"{c.name}: {c.witness}" for c in report.failures()))
    return Arrangement(gamma, theta, xi)


# ---------------------------------------------------------------------------
# duality and enumeration
# ---------------------------------------------------------------------------


def gale_dual(arr: Arrangement) -> Arrangement:
    """Gale dual: rows are the kernel-basis coordinates, theta and xi swap.

    The dual's kernel lattice is the embedded weight lattice of ``arr``; it
    is stored with gamma's columns as basis so that xi keeps its meaning as
    the dual GIT character.
    """
    dual_gamma = [tuple(k[i] for k in arr.kernel) for i in range(arr.n)]
    dual_kernel = [tuple(row[j] for row in arr.gamma) for j in range(arr.d)]
    return Arrangement(dual_gamma, theta=arr.xi, xi=arr.theta, kernel=dual_kernel)


def lattice_isomorphic(first: Arrangement, second: Arrangement) -> bool:
    """Same row matroid up to a unimodular change of basis, same characters.

    Two n-row matrices define the same arrangement up to a change of basis
    of the cocharacter lattice exactly when their column spans agree.
    """
    if first.n != second.n or first.d != second.d:
        return False
    cols1 = linalg.transpose(first.gamma)
    cols2 = linalg.transpose(second.gamma)
    if not linalg.same_lattice(cols1, cols2):
        return False
    # compare characters: xi through a lift to Z^n, theta on the shared kernel
    for c in first.cocircuits:
        if (dot(c.intrinsic, first.xi) > 0) != (second.pair_xi(c.embedded) > 0):
            return False
    for c in first.circuits:
        if (dot(c.intrinsic, first.theta) > 0) != (second.pair_theta(c.embedded) > 0):
            return False
    return True


@dataclass
class Enumeration:
    cocircuits: tuple[SignedWeight, ...]
    circuits: tuple[SignedWeight, ...]
    bases: tuple[tuple[int, ...], ...]
    positive_cocircuits: tuple[SignedWeight, ...]
    positive_circuits: tuple[SignedWeight, ...]

    def to_dict(self) -> dict:
        return {
            "cocircuits": [list(c.embedded) for c in self.cocircuits],
            "circuits": [list(c.embedded) for c in self.circuits],
            "bases": [[i + 1 for i in b] for b in self.bases],
            "positive_cocircuits": [list(c.intrinsic) for c in self.positive_cocircuits],
            "positive_circuits": [list(c.embedded) for c in self.positive_circuits],
        }


def enumerate_arrangement(arr: Arrangement) -> Enumeration:
    """Cocircuits, circuits, bases and the positive halves of each."""
    return Enumeration(arr.cocircuits, arr.circuits, arr.bases, arr.positive_cocircuits, arr.positive_circuits)


# ---------------------------------------------------------------------------
# decompositions
# ---------------------------------------------------------------------------


def _as_embedded(arr: Arrangement, lam) -> Vector:
    if isinstance(lam, SignedWeight):
        return lam.embedded
    lam = tuple(lam)
    if len(lam) == arr.n and len(lam) != arr.d:
        return lam
    if len(lam) == arr.d:
        return arr.embed(lam)
    raise ValueError(f"cannot interpret {lam} as a weight")


def _support(v: Sequence[int]) -> frozenset[int]:
    return frozenset(i for i, x in enumerate(v) if x)


def support_decomposition(arr: Arrangement, lam) -> list[SignedWeight]:
    """Cocircuits with support inside Supp(lam) summing to lam (no sign control)."""
    v = list(_as_embedded(arr, lam))
    by_emb = {c.embedded: c for c in arr.cocircuits}
    out: list[SignedWeight] = []
    while any(v):
        supp = _support(v)
        mu = next(c for c in arr.cocircuits if c.support() <= supp)
        i = min(mu.support())
        k = v[i] // mu.embedded[i]
        piece = mu if k > 0 else by_emb[tuple(-x for x in mu.embedded)]
        out.extend([piece] * abs(k))
        v = [x - k * y for x, y in zip(v, mu.embedded)]
    return out


def _multiple_of_cocircuit(arr: Arrangement, v: Vector) -> list[SignedWeight] | None:
    supp = _support(v)
    for c in arr.cocircuits:
        if c.support() == supp:
            i = min(supp)
            k = v[i] // c.embedded[i]
            if k > 0 and tuple(k * x for x in c.embedded) == v:
                return [c] * k
    return None


def cancellation_free(arr: Arrangement, lam) -> list[SignedWeight]:
    """Cancellation-free sum of cocircuits with supports inside Supp(lam).

    Follows the double induction: first on the support, then, coordinate by
    coordinate, on the degree of cancellation.
    """
    v = _as_embedded(arr, lam)
    if not any(v):
        return []
    single = _multiple_of_cocircuit(arr, v)
    if single is not None:
        return single
    terms = support_decomposition(arr, v)
    for i in range(arr.n):
        while True:
            pos = [k for k, t in enumerate(terms) if t.embedded[i] > 0]
            neg = [k for k, t in enumerate(terms) if t.embedded[i] < 0]
            if not pos or not neg:
                break
            k, l = pos[0], neg[0]
            merged = tuple(x + y for x, y in zip(terms[k].embedded, terms[l].embedded))
            replacement = cancellation_free(arr, merged)
            terms = [t for j, t in enumerate(terms) if j not in (k, l)] + replacement
    return sorted(terms, key=lambda t: t.embedded)


def is_cancellation_free(terms: Sequence[SignedWeight]) -> bool:
    if not terms:
        return True
    n = len(terms[0].embedded)
    for i in range(n):
        signs = {(t.embedded[i] > 0) - (t.embedded[i] < 0) for t in terms}
        if 1 in signs and -1 in signs:
            return False
    return True


def semigroup_certificate(arr: Arrangement, lam, positive: Sequence[SignedWeight] | None = None) -> list[SignedWeight] | None:
    """A decomposition of lam into positive cocircuits, or None.

    Search is graded by <., xi>, which strictly drops with each summand, so it
    terminates; results are memoised per remaining weight.
    """
    target = _as_embedded(arr, lam)
    sigma = sorted(positive if positive is not None else arr.positive_cocircuits, key=lambda w: w.embedded)
    levels = {w.embedded: arr.pair_xi(w.embedded) for w in sigma}
    if any(l <= 0 for l in levels.values()):
        raise ValueError("positive cocircuits must pair positively with xi")
    memo: dict[Vector, tuple | None] = {}

    def search(v: Vector):
        if not any(v):
            return ()
        if v in memo:
            return memo[v]
        level = arr.pair_xi(v)
        result = None
        if level > 0:
            for w in sigma:
                if levels[w.embedded] <= level:
                    rest = search(tuple(x - y for x, y in zip(v, w.embedded)))
                    if rest is not None:
                        result = (w,) + rest
                        break
        memo[v] = result
        return result

    found = search(target)
    return None if found is None else list(found)


def dual_basis_weights(arr: Arrangement, basis: Sequence[int]) -> list[tuple[int, SignedWeight, int]]:
    """Dual basis weights lambda^{B,i} with the sign making them xi-positive.

    Returns triples (i, lambda^{B,i}, sign); the tangent weight is
    sign * lambda^{B,i}.
    """
    b = tuple(basis)
    if len(b) != arr.d or len(set(b)) != arr.d or any(not 0 <= i < arr.n for i in b):
        raise NotABasis(f"{[i + 1 for i in b]} does not have {arr.d} distinct row indices")
    rows = [arr.gamma[i] for i in b]
    if linalg.det(rows) == 0:
        raise NotABasis(f"rows {[i + 1 for i in b]} are linearly dependent")
    inv_t = linalg.inverse(linalg.transpose(rows))
    out = []
    for pos, i in enumerate(b):
        lam = tuple(int(x) for x in inv_t[pos]) if all(Fraction(x).denominator == 1 for x in inv_t[pos]) else None
        if lam is None:
            raise NotABasis(f"rows {[j + 1 for j in b]} are not a Z-basis")
        pairing = dot(lam, arr.xi)
        sign = 1 if pairing > 0 else -1
        out.append((i, arr.weight(lam), sign))
    return out


def tangent_weights(arr: Arrangement, basis: Sequence[int]) -> list[SignedWeight]:
    """The xi-positive weights sign * lambda^{B,i}, i in B."""
    out = []
    for _, w, sign in dual_basis_weights(arr, basis):
        out.append(w if sign > 0 else -w)
    return out
