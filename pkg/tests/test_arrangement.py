import random

import pytest
from samples import A1, COUNTEREXAMPLE, sample_arrangements

from artifact.arrangement import (
    Arrangement,
    NotABasis,
    cancellation_free,
    dual_basis_weights,
    enumerate_arrangement,
    gale_dual,
    is_cancellation_free,
    lattice_isomorphic,
    semigroup_certificate,
    validate,
)

SIGMA_PLUS_COUNTEREXAMPLE = {(1, 0, 0), (0, -1, 0), (0, 0, 1), (0, -1, -1), (1, 0, 1), (-1, -1, -1)}


# validation -----------------------------------------------------------------------


def test_a1_passes_every_check():
    report = validate([[1], [1]], [1], [1])
    assert report.ok
    assert {c.name for c in report.checks} >= {"condition_1", "condition_2", "condition_3",
                                              "xi_generic", "theta_generic"}


def test_non_primitive_row_fails_condition_1():
    report = validate([[2], [1]], [1], [1])
    assert not report.get("condition_1").passed
    assert "not primitive" in report.get("condition_1").witness


def test_coloop_fails_condition_1():
    report = validate([[1, 0], [0, 1], [0, 1]], [1], [1, 1])
    assert not report.get("condition_1").passed
    assert "span" in report.get("condition_1").witness


def test_non_unimodular_fails_condition_3():
    report = validate([[1, 0], [0, 1], [1, 2], [1, 1]], [1, 1], [1, 3])
    assert not report.get("condition_3").passed


def test_non_generic_xi_is_reported():
    # the cocircuit (1, -1) pairs to zero with xi = (1, 1)
    report = validate([[1, 0], [0, 1], [1, 1]], [1], [1, 1])
    assert not report.get("xi_generic").passed


def test_validation_never_raises_on_ragged_input():
    report = validate([[1, 0], [1]], [1], [1])
    assert not report.ok


# Gale duality ---------------------------------------------------------------------


def test_a1_dual_is_one_minus_one():
    dual = gale_dual(A1)
    assert dual.gamma in (((1,), (-1,)), ((-1,), (1,)))
    assert dual.theta == A1.xi and dual.xi == A1.theta


def test_counterexample_dual_shape():
    dual = gale_dual(COUNTEREXAMPLE)
    assert (dual.n, dual.d) == (5, 2)
    # the dual rows are the kernel coordinates, so gamma^T dual = 0
    for j in range(3):
        for m in range(2):
            assert sum(COUNTEREXAMPLE.gamma[i][j] * dual.gamma[i][m] for i in range(5)) == 0


def test_double_dual_is_the_original():
    for arr in [A1, COUNTEREXAMPLE] + sample_arrangements(21, 6):
        assert gale_dual(gale_dual(arr)) == arr
        assert lattice_isomorphic(gale_dual(gale_dual(arr)), arr)


def test_duality_swaps_circuits_and_cocircuits():
    for arr in [A1, COUNTEREXAMPLE] + sample_arrangements(22, 6):
        dual = gale_dual(arr)
        assert {c.embedded for c in arr.cocircuits} == {c.embedded for c in dual.circuits}
        assert {c.embedded for c in arr.circuits} == {c.embedded for c in dual.cocircuits}
        assert len(arr.bases) == len(dual.bases)
        complements = {tuple(sorted(set(range(arr.n)) - set(b))) for b in arr.bases}
        assert complements == set(dual.bases)


def test_positive_halves_correspond_under_duality():
    for arr in [A1, COUNTEREXAMPLE] + sample_arrangements(23, 6):
        dual = gale_dual(arr)
        assert {c.embedded for c in arr.positive_cocircuits} == {c.embedded for c in dual.positive_circuits}


# enumeration ----------------------------------------------------------------------


def test_a1_sigma_plus():
    assert [c.embedded for c in A1.positive_cocircuits] == [(1, 1)]


def test_counterexample_sigma_plus():
    assert {c.intrinsic for c in COUNTEREXAMPLE.positive_cocircuits} == SIGMA_PLUS_COUNTEREXAMPLE
    assert len(COUNTEREXAMPLE.positive_cocircuits) == 6


def test_cocircuits_have_unit_entries():
    for arr in [COUNTEREXAMPLE] + sample_arrangements(24, 6):
        for c in arr.cocircuits:
            assert set(c.embedded) <= {-1, 0, 1}
        for c in arr.circuits:
            assert set(c.embedded) <= {-1, 0, 1}


def test_sigma_splits_by_sign_of_xi():
    for arr in [COUNTEREXAMPLE] + sample_arrangements(25, 4):
        pos = {c.embedded for c in arr.positive_cocircuits}
        neg = {tuple(-x for x in v) for v in pos}
        assert pos | neg == {c.embedded for c in arr.cocircuits}
        assert not pos & neg


def test_enumeration_report_lists_bases_one_based():
    d = enumerate_arrangement(A1).to_dict()
    assert d["bases"] == [[1], [2]]


# decompositions -------------------------------------------------------------------


def test_cancellation_free_counterexample():
    parts = cancellation_free(COUNTEREXAMPLE, (-1, -1, 0))
    assert sorted(p.intrinsic for p in parts) == [(-1, 0, 0), (0, -1, 0)]


def test_cancellation_free_of_a_cocircuit_is_itself():
    for c in COUNTEREXAMPLE.cocircuits:
        assert [p.embedded for p in cancellation_free(COUNTEREXAMPLE, c)] == [c.embedded]


def test_cancellation_free_random_weights():
    rng = random.Random(31)
    for arr in [COUNTEREXAMPLE] + sample_arrangements(26, 5):
        for _ in range(15):
            lam = tuple(rng.randint(-2, 2) for _ in range(arr.d))
            v = arr.embed(lam)
            parts = cancellation_free(arr, lam)
            total = tuple(sum(p.embedded[i] for p in parts) for i in range(arr.n))
            assert total == v
            supp = {i for i, x in enumerate(v) if x}
            assert all(p.support() <= supp for p in parts)
            assert is_cancellation_free(parts)
            assert all(arr.is_cocircuit(p.embedded) for p in parts)
            assert len(parts) <= sum(abs(x) for x in v)


def test_semigroup_certificate_counterexample():
    parts = semigroup_certificate(COUNTEREXAMPLE, (-1, -1, 0))
    assert sorted(p.intrinsic for p in parts) == [(-1, -1, -1), (0, 0, 1)]


def test_semigroup_certificate_of_zero_is_empty():
    assert semigroup_certificate(A1, (0,)) == []


def test_negative_of_a_positive_cocircuit_is_not_in_the_semigroup():
    assert semigroup_certificate(A1, (-1,)) is None


def test_semigroup_certificates_sum_correctly():
    rng = random.Random(32)
    for arr in [COUNTEREXAMPLE] + sample_arrangements(27, 4):
        for _ in range(10):
            lam = tuple(rng.randint(-2, 2) for _ in range(arr.d))
            parts = semigroup_certificate(arr, lam)
            if any(lam) and arr.pair_xi(arr.embed(lam)) <= 0:
                assert parts is None
            if parts is None:
                continue
            pos = {c.embedded for c in arr.positive_cocircuits}
            assert all(p.embedded in pos for p in parts)
            assert tuple(sum(p.embedded[i] for p in parts) for i in range(arr.n)) == arr.embed(lam)


# fixed-point weights --------------------------------------------------------------


def test_a1_dual_basis_weight():
    [(i, w, sign)] = dual_basis_weights(A1, (0,))
    assert i == 0 and w.embedded == (1, 1) and sign == 1


def test_dual_basis_weights_are_dual_and_cocircuits():
    for arr in [COUNTEREXAMPLE] + sample_arrangements(28, 5):
        for basis in arr.bases:
            for i, w, sign in dual_basis_weights(arr, basis):
                assert all(w.embedded[j] == int(i == j) for j in basis)
                assert arr.is_cocircuit(w.embedded)
                assert sign * arr.pair_xi(w.embedded) > 0


def test_dependent_rows_are_not_a_basis():
    arr = Arrangement([[1, 0], [1, 0], [0, 1], [1, 1]], [1, 1], [1, 2])
    with pytest.raises(NotABasis):
        dual_basis_weights(arr, (0, 1))
