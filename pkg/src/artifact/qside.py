"""The quantum side of a hypertoric variety, built from its arrangement.

Kahler roots are the circuits of the arrangement (vectors in the kernel
lattice, embedded in Z^n); positive ones pair positively with theta.  The
ring E has variables u_1..u_n, hbar and q^alpha with
u_i q^alpha = q^alpha (u_i + hbar alpha_i).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from . import groebner
from .arrangement import Arrangement, SignedWeight, gale_dual
from .dmod import RTElement, r_element
from .exact import Poly, bracket_monomial, shift_poly
from .hea import b_algebra_presentation

Vector = tuple[int, ...]

U_CONVENTION = "u_i is the Kirwan image of chi_i - hbar/2"


class NotPositiveCircuit(ValueError):
    """Raised when a vector is not a positive circuit of the arrangement."""


class EElement:
    """sum_alpha q^alpha f_alpha(u, hbar), q-monomials on the left."""

    __slots__ = ("n", "terms")

    def __init__(self, n: int, terms: Mapping[Vector, Poly] | None = None):
        self.n = n
        clean: dict[Vector, Poly] = {}
        for alpha, f in (terms or {}).items():
            if not isinstance(f, Poly):
                f = Poly.constant(n, f)
            alpha = tuple(alpha)
            clean[alpha] = clean[alpha] + f if alpha in clean else f
        self.terms = {k: f for k, f in clean.items() if f.terms}

    @classmethod
    def q(cls, n: int, alpha: Sequence[int], f: Poly | int = 1) -> "EElement":
        return cls(n, {tuple(alpha): f})

    @classmethod
    def poly(cls, f: Poly) -> "EElement":
        return cls(f.nvars, {(0,) * f.nvars: f})

    def __add__(self, other: "EElement") -> "EElement":
        out = dict(self.terms)
        for k, f in other.terms.items():
            out[k] = out[k] + f if k in out else f
        return EElement(self.n, out)

    def __neg__(self) -> "EElement":
        return EElement(self.n, {k: -f for k, f in self.terms.items()})

    def __sub__(self, other: "EElement") -> "EElement":
        return self + (-other)

    def __mul__(self, other: "EElement") -> "EElement":
        # f q^beta = q^beta f(u + hbar beta)
        out: dict[Vector, Poly] = {}
        for alpha, f in self.terms.items():
            for beta, g in other.terms.items():
                key = tuple(x + y for x, y in zip(alpha, beta))
                term = shift_poly(f, beta) * g
                out[key] = out[key] + term if key in out else term
        return EElement(self.n, out)

    def __eq__(self, other) -> bool:
        if not isinstance(other, EElement):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self) -> int:
        return hash(frozenset(self.terms.items()))

    def at_q_zero(self) -> Poly:
        """The q^0 component (all q^alpha with alpha != 0 set to zero)."""
        return self.terms.get((0,) * self.n, Poly.zero(self.n))

    def at_hbar_zero(self) -> "EElement":
        return EElement(self.n, {k: f.specialize_hbar(0) for k, f in self.terms.items()})

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        names = [f"u{i + 1}" for i in range(self.n)]
        parts = []
        for alpha in sorted(self.terms):
            body = self.terms[alpha].to_str(names)
            parts.append(f"q^({','.join(map(str, alpha))})*({body})" if any(alpha) else f"({body})")
        return " + ".join(parts)

    __str__ = to_str
    __repr__ = to_str


def u_bracket(alpha: Sequence[int]) -> Poly:
    """[u]^alpha = prod_i [u_i]^{alpha_i} with falling/rising hbar steps."""
    n = len(alpha)
    result = Poly.one(n)
    for i, k in enumerate(alpha):
        unit = [int(j == i) for j in range(n)]
        steps = [-j for j in range(k)] if k > 0 else [j for j in range(1, -k + 1)]
        for s in steps:
            result = result * Poly.linear(n, unit, hbar_coeff=s)
    return result


def positive_circuit(arr: Arrangement, alpha) -> SignedWeight:
    """Look up alpha (embedded vector or SignedWeight) among the positive circuits."""
    vec = tuple(alpha.embedded if isinstance(alpha, SignedWeight) else alpha)
    for c in arr.positive_circuits:
        if c.embedded == vec:
            return c
    raise NotPositiveCircuit(f"{vec} is not a positive circuit")


def s_generator(arr: Arrangement, alpha) -> EElement:
    """s(alpha) = [u]^alpha (1 - q^alpha), for a positive circuit alpha."""
    vec = positive_circuit(arr, alpha).embedded
    n = arr.n
    one = EElement.poly(Poly.one(n))
    return EElement.poly(u_bracket(vec)) * (one - EElement.q(n, vec))


# ---------------------------------------------------------------------------
# classical presentations
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class KonnoPresentation:
    """Q[u] modulo linear forms and square-free circuit monomials (hbar = 0)."""

    n: int
    linear: tuple[Vector, ...]
    monomials: tuple[frozenset[int], ...]

    def generators(self) -> list[groebner.PolyDict]:
        gens: list[groebner.PolyDict] = []
        for row in self.linear:
            gens.append({tuple(int(i == j) for j in range(self.n)): x for i, x in enumerate(row) if x})
        for supp in self.monomials:
            gens.append({tuple(int(i in supp) for i in range(self.n)): 1})
        return gens

    def hilbert_function(self) -> list[int]:
        """Dimensions of the graded pieces of the quotient."""
        std = groebner.standard_monomials(groebner.groebner_basis(self.generators()), self.n)
        if std is None:
            raise ValueError("the quotient is infinite-dimensional")
        out: list[int] = []
        for m in std:
            deg = sum(m)
            out.extend([0] * (deg + 1 - len(out)))
            out[deg] += 1
        return out

    def dimension(self) -> int:
        return sum(self.hilbert_function())

    def to_dict(self) -> dict:
        return {
            "linear": [list(r) for r in self.linear],
            "monomials": [sorted(i + 1 for i in s) for s in self.monomials],
        }


def konno_presentation(arr: Arrangement) -> KonnoPresentation:
    """Ordinary cohomology ring of the resolved variety of ``arr``.

    The linear forms sum_i <mu, gamma_i> u_i for mu in a basis of the
    character lattice span the kernel of Z^n -> H^2; the monomials are
    prod_{i in Supp(alpha)} u_i over circuits alpha.
    """
    linear = tuple(tuple(row[j] for row in arr.gamma) for j in range(arr.d))
    supports = sorted({c.support() for c in arr.circuits}, key=sorted)
    return KonnoPresentation(arr.n, linear, tuple(supports))


def q0_fiber(arr: Arrangement) -> list[Poly]:
    """Generators [u]^alpha, alpha in Delta_+, of the q = 0 equivariant ring (hbar kept)."""
    return [s_generator(arr, c).at_q_zero() for c in arr.positive_circuits]


# ---------------------------------------------------------------------------
# duality certificate
# ---------------------------------------------------------------------------


def as_rt(e: EElement) -> RTElement:
    """Relabel u_i -> a_i and q^alpha -> q^lambda with alpha = lambda in Z^n."""
    return RTElement(e.n, e.terms)


@dataclass
class HikitaReport:
    bijection: list[tuple[SignedWeight, SignedWeight]]
    bijective: bool
    generator_match: bool
    q0_match: bool
    involution: bool
    witnesses: list[dict] = field(default_factory=list)
    metadata: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.bijective and self.generator_match and self.q0_match and self.involution

    def to_dict(self) -> dict:
        return {
            "bijection": [
                {"cocircuit": list(lam.embedded), "circuit": list(alpha.embedded),
                 "weight": list(lam.intrinsic), "kernel_coordinates": list(alpha.intrinsic),
                 "generator": generator_string(lam.embedded),
                 "generator_expanded": str(RTElement.poly(bracket_monomial(lam.embedded))
                                           * (RTElement.poly(Poly.one(len(lam.embedded)))
                                              - RTElement.q(len(lam.embedded), lam.embedded)))}
                for lam, alpha in self.bijection
            ],
            "bijective": self.bijective,
            "generator_match": self.generator_match,
            "q0_match": self.q0_match,
            "involution": self.involution,
            "ok": self.ok,
            "witnesses": self.witnesses,
            "metadata": self.metadata,
        }


def generator_string(lam: Sequence[int]) -> str:
    """[a]^lambda (1 - q^lambda), with q on the right."""
    names = [f"a{i + 1}" for i in range(len(lam))]
    return f"({bracket_monomial(lam).to_str(names)})*(1 - q^({','.join(map(str, lam))}))"


def _with_hbar(p: Poly) -> groebner.PolyDict:
    return groebner.from_poly(p, hbar=True)


def duality_certificate(arr: Arrangement) -> HikitaReport:
    """Match r(lambda), lambda in Sigma_+(arr), with s(alpha), alpha in Delta_+(dual)."""
    dual = gale_dual(arr)
    witnesses: list[dict] = []
    circuits = {c.embedded: c for c in dual.positive_circuits}
    pairs: list[tuple[SignedWeight, SignedWeight]] = []
    for lam in arr.positive_cocircuits:
        alpha = circuits.get(lam.embedded)
        if alpha is None:
            witnesses.append({"kind": "unmatched cocircuit", "cocircuit": list(lam.embedded)})
        else:
            pairs.append((lam, alpha))
    matched = {alpha.embedded for _, alpha in pairs}
    for vec in sorted(set(circuits) - matched):
        witnesses.append({"kind": "unmatched circuit", "circuit": list(vec)})
    all_match = {c.embedded for c in arr.cocircuits} == {c.embedded for c in dual.circuits}
    if not all_match:
        witnesses.append({"kind": "cocircuits and circuits differ"})
    bijective = all_match and len(pairs) == len(arr.positive_cocircuits) == len(circuits)

    generator_match = bijective
    for lam, alpha in pairs:
        r = r_element(arr, lam.embedded)
        s = as_rt(s_generator(dual, alpha))
        if r != s:
            generator_match = False
            witnesses.append({"kind": "generator mismatch", "cocircuit": list(lam.embedded),
                              "r": str(r), "s": str(s)})

    b_side = [_with_hbar(p) for p in b_algebra_presentation(arr)]
    q_side = [_with_hbar(p) for p in q0_fiber(dual)]
    q0_match = groebner.ideals_equal(b_side, q_side)
    if not q0_match:
        witnesses.append({"kind": "q=0 ideals differ"})

    involution = gale_dual(dual) == arr
    if not involution:
        witnesses.append({"kind": "double dual differs", "double_dual": gale_dual(dual).to_dict()})

    return HikitaReport(
        bijection=sorted(pairs, key=lambda p: p[0].embedded),
        bijective=bijective,
        generator_match=generator_match,
        q0_match=q0_match,
        involution=involution,
        witnesses=witnesses,
        metadata={"dual": dual.to_dict(), "u_convention": U_CONVENTION},
    )
