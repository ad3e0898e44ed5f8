"""Gap classification of nonzero 3-tensors by asymptotic subrank.

Every nonzero tensor lands in exactly one bucket:

* ``One``        some flattening has rank one (value 1);
* ``C1``         equivalent to W (value c1 = 2^{h(1/3)});
* ``Two``        restricts to I and has a flattening of rank two (value 2);
* ``AtLeastC2``  all flattenings have rank >= 3; either degenerates to some
  N^(k) (value >= c2) or is equivalent to D (value 3).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field as dc_field

from .corpus import null_tensor, tensor_D, tensor_I, tensor_W
from .degeneration import (DegenerationCertificate, RestrictionCertificate,
                           blaser_lysikov_normalize, degenerate_tensor_to_N,
                           null_algebra_isomorphism, verify_certificate)
from .errors import (GenericityFailure, InternalContradiction, PreconditionFailed, ShapeMismatch,
                     Singular, ZeroTensor)
from .fields import Rationals, derive_seed, lifted_field, make_rng
from .linalg import Matrix, complete_basis, invert, random_full_rank, rank, solve
from .subspace import SubspaceTag, classify_subspace
from .tensor import (DIRECTIONS, MAX_RETRIES, RestrictionMaps, Tensor3, apply, concise_core,
                     flattening_ranks, inverse_permutation, other_directions, permute_factors,
                     permute_maps, slice_ranks, slice_space, slices)


class Bucket(enum.Enum):
    One = "One"
    C1 = "C1"
    Two = "Two"
    AtLeastC2 = "AtLeastC2"


class Subcase(enum.Enum):
    RankOneFlattening = "RankOneFlattening"
    WEquivalent = "WEquivalent"
    RestrictsToI = "RestrictsToI"
    NullAlgebra = "NullAlgebra"
    DEquivalent = "DEquivalent"


_BUCKET_OF = {
    Subcase.RankOneFlattening: Bucket.One,
    Subcase.WEquivalent: Bucket.C1,
    Subcase.RestrictsToI: Bucket.Two,
    Subcase.NullAlgebra: Bucket.AtLeastC2,
    Subcase.DEquivalent: Bucket.AtLeastC2,
}


@dataclass(frozen=True)
class Value:
    kind: str      # "Exact" or "LowerBound"
    symbol: str    # "1", "c1", "2", "3" or "c2"

    def numeric(self, digits: int = 30):
        from .values import compute_constants
        if self.symbol in ("1", "2", "3"):
            return int(self.symbol)
        consts = compute_constants(digits)
        return consts.c1 if self.symbol == "c1" else consts.c2

    def __str__(self):
        return f"{self.kind}({self.symbol})"


@dataclass(frozen=True)
class CertificateRecord:
    """A certificate together with what it is applied to: ``"input"`` or a named tensor."""

    label: str
    source: str
    certificate: object


@dataclass
class GapClass:
    subcase: Subcase
    value: Value
    flattening_ranks: tuple
    slice_ranks: tuple | None = None
    null_direction: int | None = None
    null_directions: tuple = ()
    certificates: list = dc_field(default_factory=list)
    field: object = None
    work_field: object = None
    seed: int = 0
    attempts: dict = dc_field(default_factory=dict)
    notes: list = dc_field(default_factory=list)

    @property
    def bucket(self) -> Bucket:
        return _BUCKET_OF[self.subcase]

    @property
    def subcase_label(self) -> str:
        if self.subcase is Subcase.NullAlgebra:
            return f"NullAlgebra({self.null_direction})"
        return self.subcase.value


# ------------------------------------------------------------------ hyperdeterminant

def cayley_hyperdeterminant(t: Tensor3):
    """Cayley's degree-4 hyperdeterminant of a 2×2×2 tensor."""
    if t.dims != (2, 2, 2):
        raise ShapeMismatch(f"hyperdeterminant needs a 2x2x2 tensor, got {t.dims}")
    f = t.field
    add, mul = f.add, f.mul

    def a(i, j, k):
        return t[i, j, k]

    def prod(*xs):
        out = f.one
        for x in xs:
            out = mul(out, x)
        return out

    squares = [
        prod(a(0, 0, 0), a(0, 0, 0), a(1, 1, 1), a(1, 1, 1)),
        prod(a(0, 0, 1), a(0, 0, 1), a(1, 1, 0), a(1, 1, 0)),
        prod(a(0, 1, 0), a(0, 1, 0), a(1, 0, 1), a(1, 0, 1)),
        prod(a(1, 0, 0), a(1, 0, 0), a(0, 1, 1), a(0, 1, 1)),
    ]
    pairs = [
        prod(a(0, 0, 0), a(0, 0, 1), a(1, 1, 0), a(1, 1, 1)),
        prod(a(0, 0, 0), a(0, 1, 0), a(1, 0, 1), a(1, 1, 1)),
        prod(a(0, 0, 0), a(1, 0, 0), a(0, 1, 1), a(1, 1, 1)),
        prod(a(0, 0, 1), a(0, 1, 0), a(1, 0, 1), a(1, 1, 0)),
        prod(a(0, 0, 1), a(1, 0, 0), a(0, 1, 1), a(1, 1, 0)),
        prod(a(0, 1, 0), a(1, 0, 0), a(0, 1, 1), a(1, 0, 1)),
    ]
    quads = [
        prod(a(0, 0, 0), a(0, 1, 1), a(1, 0, 1), a(1, 1, 0)),
        prod(a(0, 0, 1), a(0, 1, 0), a(1, 0, 0), a(1, 1, 1)),
    ]
    total = f.zero
    for x in squares:
        total = add(total, x)
    m2, p4 = f.coerce(-2), f.coerce(4)
    for x in pairs:
        total = add(total, mul(m2, x))
    for x in quads:
        total = add(total, mul(p4, x))
    return total


def _det2(m: Matrix):
    f = m.field
    return f.sub(f.mul(m[0, 0], m[1, 1]), f.mul(m[0, 1], m[1, 0]))


def pencil_form(t: Tensor3):
    """Coefficients (a, b, c) of det(x·T[0] + y·T[1]) = a x² + b xy + c y²."""
    s0, s1 = slices(t, 1)
    f = t.field
    a, c = _det2(s0), _det2(s1)
    b = f.sub(f.sub(_det2(s0 + s1), a), c)
    return a, b, c


def projective_roots(a, b, c, f):
    """Distinct roots (x, y) in P^1(f) of a x² + b xy + c y², not identically zero."""
    z = f.zero
    roots = []
    if a == z:
        roots.append((f.one, z))
        if b != z:
            roots.append((f.neg(c), b))
        return roots
    if f.characteristic != 2:
        disc = f.sub(f.mul(b, b), f.mul(f.coerce(4), f.mul(a, c)))
        two_a = f.mul(f.coerce(2), a)
        if disc == z:
            return [(f.neg(b), two_a)]
        sq = f.sqrt(disc)
        if sq is None:
            return []
        return [(f.add(f.neg(b), sq), two_a), (f.sub(f.neg(b), sq), two_a)]
    if b == z:
        return [(f.sqrt(f.div(c, a)), f.one)]
    if f.size is None or f.size > 10**6:
        return []
    return [(x, f.one) for x in f.elements() if f.add(f.add(f.mul(a, f.mul(x, x)), f.mul(b, x)), c) == z]


def _rank_one_factors(m: Matrix):
    """(u, v) with m = u vᵀ for a rank-one matrix."""
    f = m.field
    for i in range(m.rows):
        for j in range(m.cols):
            if m[i, j] != f.zero:
                u = m.col(j)
                piv = m[i, j]
                v = [f.div(x, piv) for x in m.row(i)]
                return u, v
    raise Singular("zero matrix has no rank-one factorization")


def _maps_to_I(s: Tensor3):
    """Invertible maps sending a 2×2×2 tensor with two distinct pencil roots to I."""
    f = s.field
    roots = projective_roots(*pencil_form(s), f)
    if len(roots) != 2:
        return None
    s0, s1 = slices(s, 1)
    g1_rows, us, vs = [], [], []
    for x, y in roots:
        m = s0.scale(x) + s1.scale(y)
        if rank(m) != 1:
            return None
        u, v = _rank_one_factors(m)
        g1_rows.append([x, y])
        us.append(u)
        vs.append(v)
    try:
        g2 = invert(Matrix.from_columns(us, f))
        g3 = invert(Matrix.from_columns(vs, f))
    except Singular:
        return None
    maps = RestrictionMaps(Matrix.from_rows(g1_rows, f, coerce=False), g2, g3)
    return maps if apply(s, maps) == tensor_I(f) else None


def _maps_to_W(s: Tensor3):
    """Invertible maps sending a concise 2×2×2 tensor with vanishing hyperdeterminant to W."""
    f = s.field
    roots = projective_roots(*pencil_form(s), f)
    if len(roots) != 1:
        return None
    x0, y0 = roots[0]
    s0, s1 = slices(s, 1)
    r1 = s0.scale(x0) + s1.scale(y0)
    if rank(r1) != 1:
        return None
    u, v = _rank_one_factors(r1)
    other = [f.one, f.zero] if y0 != f.zero else [f.zero, f.one]
    b0 = s0.scale(other[0]) + s1.scale(other[1])
    g2 = invert(complete_basis([u], 2, f))
    g3 = invert(complete_basis([v], 2, f))
    bt = g2 @ b0 @ g3.T
    p, q, r, w = bt[0, 0], bt[0, 1], bt[1, 0], bt[1, 1]
    if w != f.zero or q == f.zero or r == f.zero:
        return None
    row0 = [f.sub(other[0], f.mul(p, x0)), f.sub(other[1], f.mul(p, y0))]
    g1 = Matrix.from_rows([row0, [x0, y0]], f, coerce=False)
    g2 = Matrix.from_rows([g2.row(0), [f.div(a, r) for a in g2.row(1)]], f, coerce=False)
    g3 = Matrix.from_rows([g3.row(0), [f.div(a, q) for a in g3.row(1)]], f, coerce=False)
    maps = RestrictionMaps(g1, g2, g3)
    return maps if apply(s, maps) == tensor_W(f) else None


def _inverse_maps(maps: RestrictionMaps) -> RestrictionMaps:
    return RestrictionMaps(*(invert(m) for m in maps))


def _compression(t: Tensor3, rng):
    f = t.field
    mats = []
    for n in t.dims:
        if isinstance(f, Rationals):
            while True:
                m = Matrix.from_rows([[rng.randint(-2, 2) for _ in range(n)] for _ in range(2)], f)
                if rank(m) == 2:
                    break
        else:
            m = random_full_rank(2, n, f, rng)
        mats.append(m)
    return RestrictionMaps(*mats)


def _restriction_to_I(work: Tensor3, core, to_core, rng_seed):
    """Best-effort certificate work ≥ I by random 2×2×2 compression."""
    candidates = []
    if core.dims == (2, 2, 2):
        candidates.append(to_core)
    for attempt in range(MAX_RETRIES):
        if attempt >= len(candidates):
            candidates.append(_compression(work, make_rng(rng_seed, "to-I", attempt)))
        comp = candidates[attempt]
        s = apply(work, comp)
        if cayley_hyperdeterminant(s) == s.field.zero:
            continue
        maps = _maps_to_I(s)
        if maps is not None:
            return comp.then(maps), attempt + 1
    return None, MAX_RETRIES


# ------------------------------------------------------------------ helpers for D and N

def _maps_to_D(core: Tensor3, rng_seed):
    """Invertible maps sending a 3×3×3 tensor with alternating-equivalent slices to D."""
    f = core.field
    cls = classify_subspace(slice_space(core, 1), derive_seed(rng_seed, "D-space"),
                            field_lift=False)
    if cls.tag is not SubspaceTag.Skew3x3:
        return None
    r, c = cls.row_transform, cls.col_transform
    t2 = apply(core, RestrictionMaps(Matrix.identity(3, f), r, c.T))
    d = tensor_D(f)
    d_vecs = [m.vec() for m in slices(d, 1)]
    basis = Matrix.from_columns(d_vecs, f)
    g_rows = []
    for m in slices(t2, 1):
        coeffs = solve(basis, m.vec())
        if coeffs is None:
            return None
        g_rows.append(coeffs)
    g = Matrix.from_rows(g_rows, f, coerce=False)     # t2 = (g ⊗ 1 ⊗ 1) D
    try:
        maps = RestrictionMaps(invert(g), r, c.T)
    except Singular:
        return None
    return maps if apply(core, maps) == d else None


def _isomorphism_to_null(core: Tensor3, k: int, rng_seed):
    """Invertible maps core -> N^(k) when the core is isomorphic to it, else None."""
    if core.dims != (3, 3, 3):
        return None
    i, j = other_directions(k)
    perm = (i, j, k)
    core_perm = permute_factors(core, perm)
    try:
        form = blaser_lysikov_normalize(core_perm, derive_seed(rng_seed, "exact-N"))
    except (PreconditionFailed, GenericityFailure):
        return None
    iso = null_algebra_isomorphism(form)
    if iso is None:
        return None
    perm_maps = form.base_change.then(iso)
    inv = inverse_permutation(perm)
    maps = permute_maps(perm_maps, inv)
    return maps if apply(core, maps) == null_tensor(3, k, core.field) else None


def _record(records, label, source, cert, src_tensor):
    if verify_certificate(src_tensor, cert):
        records.append(CertificateRecord(label, source, cert))
        return True
    return False


# ------------------------------------------------------------------ classify

def classify(t: Tensor3, rng_seed: int = 0, field_lift: bool = True) -> GapClass:
    """Place a nonzero tensor in its asymptotic-subrank gap bucket, with certificates."""
    if t.is_zero():
        raise ZeroTensor("zero tensor")
    work_field = lifted_field(t.field) if field_lift else t.field
    work = t.lift(work_field)
    f = work_field
    ranks = flattening_ranks(t)
    result = dict(flattening_ranks=ranks, field=t.field, work_field=work_field, seed=rng_seed)
    if work_field != t.field:
        notes = [f"genericity-dependent steps run over {work_field.name} "
                 f"(geometric semantics over the algebraic closure)"]
    else:
        notes = []
    certs = []

    # (a) a flattening of rank one
    if min(ranks) == 1:
        (i, j, k), v = next(iter(sorted(work.nonzero().items())))
        rows = []
        for n, idx, scale in zip(work.dims, (i, j, k), (f.inv(v), f.one, f.one)):
            rows.append(Matrix.from_rows([[scale if x == idx else f.zero for x in range(n)]], f,
                                         coerce=False))
        target = Tensor3.from_dict((1, 1, 1), {(0, 0, 0): f.one}, f)
        _record(certs, "T >= <1>", "input", RestrictionCertificate(RestrictionMaps(*rows), target),
                work)
        return GapClass(Subcase.RankOneFlattening, Value("Exact", "1"), certificates=certs,
                        notes=notes, **result)

    # (b), (c) minimal flattening rank two
    if min(ranks) == 2:
        core, to_core, from_core = concise_core(work)
        if core.dims == (2, 2, 2) and cayley_hyperdeterminant(core) == f.zero:
            maps = _maps_to_W(core)
            if maps is not None:
                w = tensor_W(f)
                _record(certs, "T >= W", "input",
                        RestrictionCertificate(to_core.then(maps), w), work)
                _record(certs, "W >= T", "W",
                        RestrictionCertificate(_inverse_maps(maps).then(from_core), work), w)
            else:
                notes.append("W-equivalence certificate: not found")
            return GapClass(Subcase.WEquivalent, Value("Exact", "c1"), certificates=certs,
                            notes=notes, **result)
        maps, attempts = _restriction_to_I(work, core, to_core, derive_seed(rng_seed, "I"))
        result["attempts"] = {"restriction_to_I": attempts}
        if maps is not None:
            _record(certs, "T >= I", "input", RestrictionCertificate(maps, tensor_I(f)), work)
        else:
            notes.append("certificate: not found (classification still sound by elimination)")
        return GapClass(Subcase.RestrictsToI, Value("Exact", "2"), certificates=certs,
                        notes=notes, **result)

    # (d) all flattening ranks at least three
    q = slice_ranks(work, derive_seed(rng_seed, "slice-ranks"))
    result["slice_ranks"] = q
    if min(q) < 2:
        raise InternalContradiction(f"all flattening ranks >= 3 but slice ranks {q}")
    null_dirs = tuple(k for k in DIRECTIONS
                      if all(q[d - 1] >= 3 for d in other_directions(k)))
    if null_dirs:
        k = max(null_dirs)
        cert = degenerate_tensor_to_N(work, k, derive_seed(rng_seed, "N", k), q=q)
        if not _record(certs, f"T |> N({k})", "input", cert, work):
            raise InternalContradiction("degeneration certificate failed verification")
        value = Value("LowerBound", "c2")
        core, to_core, from_core = concise_core(work)
        iso = _isomorphism_to_null(core, k, derive_seed(rng_seed, "iso-N"))
        if iso is not None:
            n_k = null_tensor(3, k, f)
            ok1 = _record(certs, f"T >= N({k})", "input",
                          RestrictionCertificate(to_core.then(iso), n_k), work)
            ok2 = _record(certs, f"N({k}) >= T", f"N{k}",
                          RestrictionCertificate(_inverse_maps(iso).then(from_core), work), n_k)
            if ok1 and ok2:
                value = Value("Exact", "c2")
        return GapClass(Subcase.NullAlgebra, value, null_direction=k, null_directions=null_dirs,
                        certificates=certs, notes=notes, **result)

    core, to_core, from_core = concise_core(work)
    if core.dims != (3, 3, 3):
        raise InternalContradiction(f"slice ranks {q} but concise core has dims {core.dims}")
    tags = [classify_subspace(slice_space(core, d), derive_seed(rng_seed, "skew", d),
                              field_lift=False).tag for d in DIRECTIONS]
    if any(tag is not SubspaceTag.Skew3x3 for tag in tags):
        raise InternalContradiction(f"slice ranks {q} but slice spaces classify as "
                                    f"{[tag.value for tag in tags]}")
    maps = _maps_to_D(core, rng_seed)
    if maps is None:
        raise InternalContradiction("could not realize the isomorphism with D")
    d = tensor_D(f)
    _record(certs, "T >= D", "input", RestrictionCertificate(to_core.then(maps), d), work)
    _record(certs, "D >= T", "D", RestrictionCertificate(_inverse_maps(maps).then(from_core), work), d)
    return GapClass(Subcase.DEquivalent, Value("Exact", "3"), certificates=certs, notes=notes,
                    **result)

