import itertools

import pytest
from hypothesis import given, strategies as st

from subrank_gap.classifier import (Bucket, Subcase, cayley_hyperdeterminant, classify,
                                    pencil_form, projective_roots)
from subrank_gap.corpus import diag, named, null_tensor, rank_one, tensor_D, tensor_I, tensor_W
from subrank_gap.degeneration import verify_certificate
from subrank_gap.errors import ShapeMismatch, ZeroTensor
from subrank_gap.fields import ExtensionField, PrimeField, Rationals, make_rng
from subrank_gap.linalg import Matrix, invert, random_invertible
from subrank_gap.oracle import brute_bucket
from subrank_gap.subspace import SubspaceTag, classify_subspace
from subrank_gap.tensor import (DIRECTIONS, RestrictionMaps, Tensor3, apply, flattening_ranks,
                                permute_factors, slice_space)

F = PrimeField(101)
CORPUS = ["I", "W", "D", "N1", "N2", "N3", "Diag(2)", "Diag(3)", "N3(4)", "N1(4)"]


def cube(field, xs):
    return Tensor3((2, 2, 2), tuple(field.coerce(x) for x in xs), field)


def det(m):
    f = m.field
    return f.sub(f.mul(m[0, 0], m[1, 1]), f.mul(m[0, 1], m[1, 0]))


def certificate_sources(g, t):
    for rec in g.certificates:
        src = t if rec.source == "input" else named(rec.source, rec.certificate.target.field)
        yield src, rec


# ------------------------------------------------------------------ hyperdeterminant

def test_hyperdeterminant_examples():
    assert cayley_hyperdeterminant(tensor_I()) == 1
    assert cayley_hyperdeterminant(tensor_W()) == 0
    assert cayley_hyperdeterminant(Tensor3.zeros((2, 2, 2), F)) == 0
    with pytest.raises(ShapeMismatch):
        cayley_hyperdeterminant(tensor_D())


@given(st.lists(st.integers(-50, 50), min_size=8, max_size=8))
def test_hyperdeterminant_is_the_pencil_discriminant(xs):
    for field in (F, Rationals()):
        t = cube(field, xs)
        a, b, c = pencil_form(t)
        disc = field.sub(field.mul(b, b), field.mul(field.coerce(4), field.mul(a, c)))
        assert cayley_hyperdeterminant(t) == disc


@given(st.lists(st.integers(0, 100), min_size=8, max_size=8), st.integers(0, 2**32))
def test_hyperdeterminant_scales_by_squared_determinants(xs, seed):
    t = cube(F, xs)
    gs = [random_invertible(2, F, seed + i) for i in range(3)]
    scale = F.one
    for g in gs:
        scale = F.mul(scale, F.mul(det(g), det(g)))
    assert cayley_hyperdeterminant(apply(t, RestrictionMaps(*gs))) == \
        F.mul(scale, cayley_hyperdeterminant(t))


def test_projective_roots():
    gf7 = PrimeField(7)
    # x^2 - y^2 = (x - y)(x + y)
    roots = projective_roots(1, 0, gf7.neg(1), gf7)
    assert len(roots) == 2
    # x^2 + y^2 has no roots in GF(7) (-1 is a non-residue)
    assert projective_roots(1, 0, 1, gf7) == []
    # a = 0: the point at infinity is a root
    assert (1, 0) in projective_roots(0, 1, 1, gf7)
    gf4 = ExtensionField(2, 2)
    for a, b, c in itertools.product(gf4.elements(), repeat=3):
        if (a, b, c) == (0, 0, 0):
            continue
        for x, y in projective_roots(a, b, c, gf4):
            val = gf4.add(gf4.add(gf4.mul(a, gf4.mul(x, x)), gf4.mul(b, gf4.mul(x, y))),
                          gf4.mul(c, gf4.mul(y, y)))
            assert val == 0


# ------------------------------------------------------------------ classify

def test_classify_examples():
    g = classify(tensor_W())
    assert (g.bucket, g.subcase, str(g.value)) == (Bucket.C1, Subcase.WEquivalent, "Exact(c1)")
    g = classify(tensor_I())
    assert (g.bucket, g.subcase, str(g.value)) == (Bucket.Two, Subcase.RestrictsToI, "Exact(2)")
    g = classify(tensor_D())
    assert (g.bucket, g.subcase, str(g.value)) == (Bucket.AtLeastC2, Subcase.DEquivalent, "Exact(3)")
    g = classify(null_tensor(3, 1))
    assert (g.bucket, g.subcase_label, str(g.value)) == \
        (Bucket.AtLeastC2, "NullAlgebra(1)", "Exact(c2)")
    g = classify(rank_one([1, 0], [1, 1], [1, 0]))
    assert (g.bucket, g.subcase, str(g.value)) == (Bucket.One, Subcase.RankOneFlattening, "Exact(1)")


def test_random_4x4x4_is_null_algebra_with_certificate():
    rng = make_rng(1, "4x4x4")
    for trial in range(5):
        t = Tensor3((4, 4, 4), tuple(F.random(rng) for _ in range(64)), F)
        g = classify(t, trial)
        assert g.subcase is Subcase.NullAlgebra
        assert g.slice_ranks == (4, 4, 4) and g.null_directions == (1, 2, 3)
        assert str(g.value) == "LowerBound(c2)"
        assert verify_certificate(t, g.certificates[0].certificate)


def test_exact_c2_only_for_the_null_tensors_themselves():
    for name in ("N1", "N2", "N3"):
        assert classify(named(name)).value.kind == "Exact"
    for name in ("Diag(3)", "N3(4)"):
        assert classify(named(name)).value.kind == "LowerBound"
    g = RestrictionMaps(*(random_invertible(3, F, s) for s in (4, 5, 6)))
    assert classify(apply(named("N2"), g)).value.kind == "Exact"


def test_zero_tensor_rejected():
    with pytest.raises(ZeroTensor):
        classify(Tensor3.zeros((2, 3, 2), F))


@pytest.mark.parametrize("field", [F, PrimeField(2), PrimeField(3), Rationals(),
                                   ExtensionField(2, 2)], ids=lambda f: f.name)
@pytest.mark.parametrize("name", CORPUS)
def test_corpus_certificates_verify(field, name):
    t = named(name, field)
    g = classify(t, 3)
    assert g.certificates
    for src, rec in certificate_sources(g, t):
        assert verify_certificate(src, rec.certificate), rec.label


@pytest.mark.parametrize("name", CORPUS)
def test_gl_invariance(name):
    t = named(name)
    base = classify(t)
    for trial in range(10):
        maps = RestrictionMaps(*(random_invertible(n, F, 3 * trial + i) for i, n in enumerate(t.dims)))
        g = classify(apply(t, maps), trial)
        assert (g.bucket, g.subcase_label) == (base.bucket, base.subcase_label)


@pytest.mark.parametrize("perm", list(itertools.permutations((1, 2, 3))))
@pytest.mark.parametrize("name", CORPUS + ["W"])
def test_permutation_covariance(name, perm):
    t = named(name)
    base = classify(t)
    g = classify(permute_factors(t, perm))
    assert g.subcase is base.subcase
    # direction k of t becomes direction a with perm[a] = k
    moved = {perm.index(k) + 1 for k in base.null_directions}
    assert set(g.null_directions) == moved


def test_case_c_with_larger_core():
    # slices E11 + E22 and E33 + E12: flattening ranks (2, 3, 3)
    t = Tensor3.from_dict((2, 3, 3), {(0, 0, 0): 1, (0, 1, 1): 1, (1, 2, 2): 1, (1, 0, 1): 1}, F)
    assert flattening_ranks(t) == (2, 3, 3)
    g = classify(t)
    assert g.subcase is Subcase.RestrictsToI
    for src, rec in certificate_sources(g, t):
        assert verify_certificate(src, rec.certificate)


def test_rational_pencil_with_irrational_roots():
    # det(x I + y [[0, 1], [2, 0]]) = x^2 - 2 y^2 has no rational roots
    q = Rationals()
    t = Tensor3.from_dict((2, 2, 2), {(0, 0, 0): 1, (0, 1, 1): 1, (1, 0, 1): 1, (1, 1, 0): 2}, q)
    g = classify(t)
    assert g.subcase is Subcase.RestrictsToI
    assert all(verify_certificate(t, rec.certificate) for rec in g.certificates)
    if not g.certificates:
        assert any("not found" in n for n in g.notes)


def test_small_fields_record_the_extension():
    g = classify(tensor_W(PrimeField(2)))
    assert g.work_field == ExtensionField(2, 7)
    assert any("GF(2^7)" in n for n in g.notes)


def test_d_branch_slice_spaces_are_skew():
    for seed in range(5):
        maps = RestrictionMaps(*(random_invertible(3, F, 10 * seed + i) for i in range(3)))
        t = apply(tensor_D(), maps)
        g = classify(t, seed)
        assert g.subcase is Subcase.DEquivalent
        for d in DIRECTIONS:
            assert classify_subspace(slice_space(t, d)).tag is SubspaceTag.Skew3x3


def concise_gf2_cubes():
    gf2 = PrimeField(2)
    for bits in range(1, 256):
        t = cube(gf2, [(bits >> i) & 1 for i in range(8)])
        if flattening_ranks(t) == (2, 2, 2):
            yield t


def test_agreement_with_oracle_on_all_concise_gf2_cubes():
    cubes = list(concise_gf2_cubes())
    assert len(cubes) > 100
    for t in cubes:
        assert brute_bucket(t) == classify(t).bucket.value
