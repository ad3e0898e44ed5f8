import itertools

import pytest
from hypothesis import given, settings, strategies as st

from subrank_gap.corpus import diag, tensor_D, tensor_I, tensor_W
from subrank_gap.errors import BudgetExceeded, FieldError, ShapeMismatch
from subrank_gap.fields import ExtensionField, PrimeField
from subrank_gap.oracle import (SearchBudget, brute_bucket, brute_restricts_to, brute_subrank,
                                kronecker_power_subrank)
from subrank_gap.tensor import Tensor3, apply, flattening_ranks, kronecker

GF2 = PrimeField(2)
GF3 = PrimeField(3)


def small_tensors(field, dims=(2, 2, 2)):
    n = dims[0] * dims[1] * dims[2]
    return st.lists(st.sampled_from(list(field.elements())), min_size=n, max_size=n).map(
        lambda xs: Tensor3(dims, tuple(xs), field))


def test_subrank_examples():
    assert brute_subrank(diag(2, GF2)).value == 2
    assert brute_subrank(tensor_I(GF2)).value == 2
    assert brute_subrank(tensor_W(GF2)).value == 1
    assert brute_subrank(tensor_W(GF3)).value == 1
    assert brute_subrank(diag(3, GF2)).value == 3
    assert brute_subrank(Tensor3.zeros((2, 2, 2), GF2)).value == 0


def test_subrank_witness_verifies():
    for t in (diag(2, GF2), tensor_W(GF2), tensor_D(GF2), diag(2, ExtensionField(2, 2))):
        res = brute_subrank(t)
        assert apply(t, res.witness) == diag(res.value, t.field)


def test_restriction_examples():
    assert brute_restricts_to(tensor_W(GF2), diag(1, GF2))[0]
    assert not brute_restricts_to(diag(2, GF2), tensor_W(GF2))[0]
    assert brute_restricts_to(tensor_W(GF2), tensor_W(GF2))[0]
    ok, maps = brute_restricts_to(diag(2, GF2), tensor_I(GF2))
    assert ok and apply(diag(2, GF2), maps) == tensor_I(GF2)


def test_oracle_rejects_large_or_infinite_fields():
    with pytest.raises(FieldError):
        brute_subrank(diag(2, PrimeField(17)))
    with pytest.raises(FieldError):
        brute_restricts_to(diag(2, GF2), diag(2, GF3))
    with pytest.raises(ShapeMismatch):
        brute_bucket(tensor_D(GF2))
    with pytest.raises(ShapeMismatch):
        kronecker_power_subrank(diag(2, GF2), 3)


def test_budget_is_enforced():
    with pytest.raises(BudgetExceeded):
        brute_subrank(tensor_D(GF3), SearchBudget(max_maps=10))


def test_kronecker_square_of_diag():
    res = kronecker_power_subrank(diag(2, GF2), 2)
    assert res.subrank == 4 and res.lower_bound == 2.0


def test_kronecker_square_of_w_is_supermultiplicative():
    res = kronecker_power_subrank(tensor_W(GF2), 2)
    assert res.subrank >= brute_subrank(tensor_W(GF2)).value ** 2


# the W square above covers the 4x4x4 case; keep the random products small
@settings(max_examples=25)
@given(small_tensors(GF2), small_tensors(GF2, (2, 1, 2)))
def test_supermultiplicativity(a, b):
    sa, sb = brute_subrank(a).value, brute_subrank(b).value
    assert brute_subrank(kronecker(a, b)).value >= sa * sb


@given(small_tensors(GF3))
def test_subrank_bounded_by_flattening_ranks(t):
    assert brute_subrank(t).value <= min(flattening_ranks(t))


@settings(max_examples=25)
@given(small_tensors(GF2), small_tensors(GF2))
def test_restriction_witnesses_verify(a, b):
    ok, maps = brute_restricts_to(a, b)
    if ok:
        assert apply(a, maps) == b
    assert brute_restricts_to(a, a)[0]


def test_restriction_is_transitive_on_gf2_cubes():
    cubes = [Tensor3((2, 2, 2), tuple((bits >> i) & 1 for i in range(8)), GF2)
             for bits in (0b10000001, 0b00010111, 0b10010110, 0b00000001, 0b11111111, 0b01101001)]
    rel = {(i, j): brute_restricts_to(a, b)[0]
           for (i, a), (j, b) in itertools.product(enumerate(cubes), repeat=2)}
    for i, j, k in itertools.product(range(len(cubes)), repeat=3):
        if rel[i, j] and rel[j, k]:
            assert rel[i, k]


def test_brute_bucket_examples():
    assert brute_bucket(tensor_W(GF2)) == "C1"
    assert brute_bucket(tensor_I(GF2)) == "Two"
    assert brute_bucket(diag(1, GF2).__class__.from_dict((2, 2, 2), {(0, 0, 0): 1}, GF2)) == "One"
