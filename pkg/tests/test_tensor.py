import itertools

import pytest
from hypothesis import given, strategies as st

from subrank_gap.corpus import diag, named, null_tensor, rank_one, tensor_D, tensor_W, zero_pad
from subrank_gap.errors import ShapeMismatch, ZeroTensor
from subrank_gap.fields import ExtensionField, PrimeField, Rationals, make_rng
from subrank_gap.linalg import Matrix, max_rank, random_invertible, random_matrix
from subrank_gap.subspace import skew_space
from subrank_gap.tensor import (DIRECTIONS, RestrictionMaps, Tensor3, apply, concise_core,
                                flattening, flattening_ranks, generic_restrict, kronecker,
                                permute_factors, slice_ranks, slice_space, subrank_i)

F = PrimeField(101)
CORPUS = ["I", "W", "D", "N1", "N2", "N3", "Diag(3)", "N3(4)"]


def random_tensor(dims, field, rng):
    vals = {}
    for idx in itertools.product(*(range(n) for n in dims)):
        vals[idx] = field.random(rng)
    return Tensor3.from_dict(dims, vals, field)


def tensors(field=F, max_dim=3):
    dims = st.tuples(*(st.integers(1, max_dim) for _ in range(3)))
    return dims.flatmap(lambda d: st.lists(st.integers(0, 3), min_size=d[0] * d[1] * d[2],
                                           max_size=d[0] * d[1] * d[2]).map(
        lambda xs: Tensor3(d, tuple(field.coerce(x) for x in xs), field)))


def test_flattening_rank_examples():
    assert flattening_ranks(tensor_D()) == (3, 3, 3)
    assert flattening_ranks(tensor_W()) == (2, 2, 2)
    assert flattening_ranks(rank_one([1], [1], [1])) == (1, 1, 1)


def test_flattening_column_convention():
    t = Tensor3.from_dict((2, 3, 4), {(1, 2, 3): 5}, F)
    m = flattening(t, 1)
    assert m.shape == (2, 12) and m[1, 2 * 4 + 3] == 5


def test_slice_space_examples():
    for d in DIRECTIONS:
        assert slice_space(tensor_D(), d).same_subspace(skew_space(F))
    e = [Matrix.from_rows([[int(i == j == k) for k in range(3)] for j in range(3)], F)
         for i in range(3)]
    from subrank_gap.linalg import MatrixSpace
    assert slice_space(diag(3), 1).same_subspace(MatrixSpace.span(e))
    w5 = slice_space(tensor_W(PrimeField(5)), 3)
    assert max_rank(w5, exhaustive=True) == 2


def test_subrank_i_examples():
    gf25 = ExtensionField(5, 2)
    for d in DIRECTIONS:
        assert max_rank(slice_space(tensor_D(gf25), d), exhaustive=True) == 2
        assert subrank_i(tensor_D(), d) == 2
    for n in range(2, 6):
        t = null_tensor(n, 3)
        assert subrank_i(t, 1) == subrank_i(t, 2) == n
    for r in range(1, 5):
        assert slice_ranks(diag(r)) == (r, r, r)


def test_apply_examples():
    t = tensor_D()
    assert apply(t, RestrictionMaps.identity(t.dims, F)) == t
    proj = Matrix.from_rows([[1, 0, 0], [0, 1, 0]], F)
    assert apply(diag(3), RestrictionMaps(proj, proj, proj)) == diag(2)
    swap = Matrix.from_rows([[0, 1], [1, 0]], F)
    ident = Matrix.identity(2, F)
    expected = Tensor3.from_dict((2, 2, 2), {(1, 0, 1): 1, (1, 1, 0): 1, (0, 0, 0): 1}, F)
    assert apply(tensor_W(), RestrictionMaps(swap, ident, ident)) == expected


def test_kronecker_examples():
    d6 = kronecker(diag(2), diag(3))
    assert d6 == diag(6)
    assert flattening_ranks(kronecker(tensor_W(), tensor_W())) == (4, 4, 4)
    t = tensor_D()
    assert kronecker(t, diag(1)) == t


@pytest.mark.parametrize("a,b", list(itertools.combinations_with_replacement(["I", "W", "D", "N3"], 2)))
def test_kronecker_flattening_ranks_multiply(a, b):
    ta, tb = named(a), named(b)
    got = flattening_ranks(kronecker(ta, tb))
    assert got == tuple(x * y for x, y in zip(flattening_ranks(ta), flattening_ranks(tb)))


def test_permute_examples():
    n3 = null_tensor(3, 3)
    assert permute_factors(n3, (3, 1, 2)) == null_tensor(3, 1)
    assert permute_factors(n3, (2, 3, 1)) == null_tensor(3, 2)
    assert permute_factors(tensor_D(), (2, 1, 3)) == -tensor_D()
    assert permute_factors(tensor_D(), (1, 2, 3)) == tensor_D()


def test_concise_core_examples():
    unit = zero_pad(rank_one([1], [1], [1]), (5, 5, 5))
    core, to_core, from_core = concise_core(unit)
    assert core.dims == (1, 1, 1) and not core.is_zero()
    padded = zero_pad(tensor_W(), (4, 4, 4))
    core, to_core, from_core = concise_core(padded)
    assert core.dims == (2, 2, 2)
    assert apply(padded, to_core) == core and apply(core, from_core) == padded
    from subrank_gap.classifier import cayley_hyperdeterminant
    assert cayley_hyperdeterminant(core) == 0
    assert concise_core(tensor_D())[0] == tensor_D()
    with pytest.raises(ZeroTensor):
        concise_core(Tensor3.zeros((2, 2, 2), F))


@given(tensors())
def test_concise_core_round_trip_and_idempotence(t):
    if t.is_zero():
        return
    core, to_core, from_core = concise_core(t)
    assert core.dims == flattening_ranks(t)
    assert apply(t, to_core) == core
    assert apply(core, from_core) == t
    assert concise_core(core)[0].dims == core.dims


def test_generic_restrict_examples():
    s, _, _ = generic_restrict(null_tensor(4, 3), (3, 3, 3), rng_seed=1)
    assert slice_ranks(s)[:2] == (3, 3)
    s, _, _ = generic_restrict(tensor_D(), (3, 3, 3), rng_seed=2)
    assert slice_ranks(s) == (2, 2, 2)
    for name in CORPUS:
        s, maps, _ = generic_restrict(named(name), (1, 1, 1), rng_seed=3)
        assert s.dims == (1, 1, 1) and not s.is_zero()
        assert apply(named(name), maps) == s
    with pytest.raises(ShapeMismatch):
        generic_restrict(tensor_D(), (0, 1, 1))


@pytest.mark.parametrize("name", CORPUS)
def test_flattening_ranks_gl_invariant(name):
    t = named(name)
    rng = make_rng(21, name)
    for _ in range(100):
        maps = RestrictionMaps(*(random_invertible(n, F, rng.getrandbits(32)) for n in t.dims))
        assert flattening_ranks(apply(t, maps)) == flattening_ranks(t)


def test_slice_ranks_monotone_under_restriction():
    rng = make_rng(22, "mono")
    for _ in range(25):
        t = random_tensor((3, 3, 3), F, rng)
        if rng.random() < 0.5:
            t = named(rng.choice(CORPUS[:7]))
        maps = RestrictionMaps(*(random_matrix(rng.randint(1, 3), n, F, rng) for n in t.dims))
        s = apply(t, maps)
        if s.is_zero():
            continue
        assert all(a <= b for a, b in zip(slice_ranks(s), slice_ranks(t)))


def test_rational_tensors():
    q = Rationals()
    t = tensor_D(q)
    assert flattening_ranks(t) == (3, 3, 3)
    assert slice_ranks(t) == (2, 2, 2)
