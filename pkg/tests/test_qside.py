import random
from itertools import combinations

import pytest
import sympy as sp
from samples import A1, COUNTEREXAMPLE, sample_arrangements

from artifact import groebner
from artifact.arrangement import gale_dual
from artifact.dmod import specialize
from artifact.exact import Poly
from artifact.hea import b_algebra_presentation
from artifact.qside import (
    EElement,
    NotPositiveCircuit,
    duality_certificate,
    konno_presentation,
    q0_fiber,
    s_generator,
    u_bracket,
)


def h_vector(gamma, d):
    """h-numbers of the independence complex of the rows, from its f-vector."""
    n = len(gamma)
    f = [0] * (d + 1)
    for k in range(d + 1):
        for subset in combinations(range(n), k):
            if k == 0 or sp.Matrix([gamma[i] for i in subset]).rank() == k:
                f[k] += 1
    t = sp.symbols("t")
    h = sp.expand(sum(f[i] * t**i * (1 - t) ** (d - i) for i in range(d + 1)))
    return [int(h.coeff(t, i)) for i in range(d + 1)]


def test_a1_dual_generator():
    dual = gale_dual(A1)
    [alpha] = dual.positive_circuits
    assert alpha.embedded == (1, 1)
    u1, u2 = Poly.var(2, 0), Poly.var(2, 1)
    one = EElement.poly(Poly.one(2))
    assert s_generator(dual, alpha) == EElement.poly(u1 * u2) * (one - EElement.q(2, (1, 1)))


def test_zero_is_not_a_circuit():
    with pytest.raises(NotPositiveCircuit):
        s_generator(gale_dual(A1), (0, 0))


def test_negative_circuit_is_rejected():
    with pytest.raises(NotPositiveCircuit):
        s_generator(gale_dual(A1), (-1, -1))


def test_u_bracket_small_cases():
    u1, u2, h = Poly.var(2, 0), Poly.var(2, 1), Poly.hbar(2)
    assert u_bracket((2, 0)) == u1 * (u1 - h)
    assert u_bracket((0, -2)) == (u2 + h) * (u2 + 2 * h)
    assert u_bracket((1, -1)) == u1 * (u2 + h)


def test_u_bracket_at_hbar_zero_is_a_monomial():
    rng = random.Random(61)
    for _ in range(20):
        alpha = tuple(rng.randint(-3, 3) for _ in range(3))
        expected = Poly(3, {tuple(abs(a) for a in alpha) + (0,): 1})
        assert u_bracket(alpha).specialize_hbar(0) == expected


def test_q_moves_past_u():
    n = 3
    alpha = (1, -2, 0)
    u = [Poly.var(n, i) for i in range(n)]
    lhs = EElement.poly(u[1]) * EElement.q(n, alpha)
    assert lhs == EElement.q(n, alpha, u[1] + alpha[1] * Poly.hbar(n))
    assert (EElement.q(n, alpha) * EElement.poly(u[0])).at_hbar_zero() == (EElement.poly(u[0]) * EElement.q(n, alpha)).at_hbar_zero()


# classical ring --------------------------------------------------------------------


def test_cotangent_line_ring():
    konno = konno_presentation(A1)
    assert konno.hilbert_function() == [1, 1]
    gens = konno.generators()
    assert groebner.ideals_equal(gens, [{(1, 0): 1, (0, 1): 1}, {(1, 1): 1}])


@pytest.mark.parametrize("seed", [62, 63])
def test_betti_numbers_are_h_numbers(seed):
    for arr in [A1, COUNTEREXAMPLE] + sample_arrangements(seed, 4):
        konno = konno_presentation(arr)
        hf = konno.hilbert_function()
        expected = h_vector(arr.gamma, arr.d)
        assert hf + [0] * (len(expected) - len(hf)) == expected
        assert konno.dimension() == len(arr.bases)


def test_konno_monomials_are_square_free():
    for arr in [COUNTEREXAMPLE] + sample_arrangements(64, 4):
        for g in konno_presentation(arr).generators():
            assert all(max(e) <= 1 for e in g)


# duality ---------------------------------------------------------------------------


def test_a1_duality():
    report = duality_certificate(A1)
    assert report.ok and len(report.bijection) == 1


def test_counterexample_duality():
    report = duality_certificate(COUNTEREXAMPLE)
    assert report.ok
    assert len(report.bijection) == 6
    assert not report.witnesses


def test_duality_on_samples():
    for arr in sample_arrangements(65, 6):
        report = duality_certificate(arr)
        assert report.ok, report.witnesses
        assert duality_certificate(gale_dual(arr)).ok


def test_q_zero_fibre_is_the_b_algebra():
    for arr in [A1, COUNTEREXAMPLE] + sample_arrangements(66, 3):
        b_side = [groebner.from_poly(p, hbar=True) for p in b_algebra_presentation(arr)]
        q_side = [groebner.from_poly(p, hbar=True) for p in q0_fiber(gale_dual(arr))]
        assert groebner.ideals_equal(b_side, q_side)
        assert specialize(arr, "q->0").generators == b_algebra_presentation(arr)


def test_q_zero_fibre_at_hbar_zero_adds_to_the_classical_ring():
    # at hbar = 0 the brackets become the square-free circuit monomials
    for arr in [A1, COUNTEREXAMPLE]:
        dual = gale_dual(arr)
        konno = konno_presentation(dual)
        classical = {frozenset(s) for s in konno.monomials}
        fibre = {frozenset(i for i, x in enumerate(next(iter(p.specialize_hbar(0).terms))[:-1]) if x)
                 for p in q0_fiber(dual)}
        assert fibre <= classical
        assert fibre == {c.support() for c in dual.positive_circuits}


def test_report_serializes():
    d = duality_certificate(COUNTEREXAMPLE).to_dict()
    assert d["ok"] is True and len(d["bijection"]) == 6
    assert "u_convention" in d["metadata"]
