"""Order-3 tensors: flattenings, slice spaces, restriction, Kronecker product, coring.

Directions (flattening axes) are numbered 1, 2, 3 throughout the public API.
The flattening in direction i is the n_i × (n_j n_k) matrix with column index
``j * n_k + k`` where (j, k) are the remaining axes in increasing order.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import product

from .errors import FieldMismatch, GenericityFailure, ShapeMismatch, ZeroTensor
from .fields import derive_seed, embedding, make_rng
from .linalg import (DEFAULT_TRIALS, Matrix, MatrixSpace, complete_basis, invert, max_rank,
                     random_matrix, rank, rref)

DIRECTIONS = (1, 2, 3)
MAX_RETRIES = 10


def other_directions(i: int):
    return tuple(d for d in DIRECTIONS if d != i)


@dataclass(frozen=True)
class Tensor3:
    dims: tuple
    entries: tuple  # flat, row-major in (i, j, k)
    field: object

    def __post_init__(self):
        n1, n2, n3 = self.dims
        if min(self.dims) < 1:
            raise ShapeMismatch(f"all dims must be >= 1, got {self.dims}")
        if len(self.entries) != n1 * n2 * n3:
            raise ShapeMismatch("entry count does not match dims")

    # construction -----------------------------------------------------
    @classmethod
    def zeros(cls, dims, field):
        n1, n2, n3 = dims
        return cls(tuple(dims), (field.zero,) * (n1 * n2 * n3), field)

    @classmethod
    def from_dict(cls, dims, values, field, coerce=False):
        """Build from ``{(i, j, k): value}`` with 0-based indices.

        Values are taken as field elements unless ``coerce`` is set, in which
        case integers and fractions are mapped into the field.
        """
        n1, n2, n3 = dims
        flat = [field.zero] * (n1 * n2 * n3)
        for (i, j, k), v in values.items():
            if not (0 <= i < n1 and 0 <= j < n2 and 0 <= k < n3):
                raise ShapeMismatch(f"index {(i, j, k)} out of range for {dims}")
            flat[(i * n2 + j) * n3 + k] = field.coerce(v) if coerce else v
        return cls(tuple(dims), tuple(flat), field)

    @classmethod
    def from_nested(cls, nested, field):
        n1, n2, n3 = len(nested), len(nested[0]), len(nested[0][0])
        flat = [field.coerce(nested[i][j][k]) for i in range(n1) for j in range(n2) for k in range(n3)]
        return cls((n1, n2, n3), tuple(flat), field)

    # access -----------------------------------------------------------
    def __getitem__(self, idx):
        i, j, k = idx
        _, n2, n3 = self.dims
        return self.entries[(i * n2 + j) * n3 + k]

    def nonzero(self):
        """Dict {(i, j, k): value} of nonzero entries, 0-based."""
        _, n2, n3 = self.dims
        z = self.field.zero
        out = {}
        for pos, v in enumerate(self.entries):
            if v != z:
                i, rem = divmod(pos, n2 * n3)
                j, k = divmod(rem, n3)
                out[(i, j, k)] = v
        return out

    def is_zero(self):
        z = self.field.zero
        return all(v == z for v in self.entries)

    def lift(self, field):
        if field == self.field:
            return self
        emb = embedding(self.field, field)
        return Tensor3(self.dims, tuple(emb(v) for v in self.entries), field)

    def scale(self, c):
        mul = self.field.mul
        return Tensor3(self.dims, tuple(mul(c, v) for v in self.entries), self.field)

    def __add__(self, other):
        if self.field != other.field:
            raise FieldMismatch("tensors over different fields")
        if self.dims != other.dims:
            raise ShapeMismatch(f"{self.dims} + {other.dims}")
        add = self.field.add
        return Tensor3(self.dims, tuple(add(a, b) for a, b in zip(self.entries, other.entries)),
                       self.field)

    def __neg__(self):
        return self.scale(self.field.neg(self.field.one))

    def __sub__(self, other):
        return self + (-other)

    def __repr__(self):
        nz = ", ".join(f"{tuple(x + 1 for x in idx)}:{self.field.format(v)}"
                       for idx, v in sorted(self.nonzero().items()))
        return f"Tensor3({self.dims} over {self.field.name}: {{{nz}}})"


@dataclass(frozen=True)
class RestrictionMaps:
    """Linear maps A_i : F^{n_i} -> F^{m_i}, stored as m_i × n_i matrices."""

    a1: Matrix
    a2: Matrix
    a3: Matrix

    def __iter__(self):
        return iter((self.a1, self.a2, self.a3))

    def __getitem__(self, i):
        return (self.a1, self.a2, self.a3)[i]

    @property
    def field(self):
        return self.a1.field

    @classmethod
    def identity(cls, dims, field):
        return cls(*(Matrix.identity(n, field) for n in dims))

    def then(self, other: "RestrictionMaps") -> "RestrictionMaps":
        """Composition: first ``self``, then ``other``."""
        return RestrictionMaps(*(b @ a for a, b in zip(self, other)))

    def lift(self, field):
        return RestrictionMaps(*(m.lift(field) for m in self))


# ------------------------------------------------------------ flattenings

def _axis(direction):
    if direction not in DIRECTIONS:
        raise ValueError(f"direction must be 1, 2 or 3, got {direction!r}")
    return direction - 1


def flattening(t: Tensor3, direction: int) -> Matrix:
    a = _axis(direction)
    n = t.dims
    others = [x for x in range(3) if x != a]
    rows = []
    for i in range(n[a]):
        row = []
        for j in range(n[others[0]]):
            for k in range(n[others[1]]):
                idx = [0, 0, 0]
                idx[a], idx[others[0]], idx[others[1]] = i, j, k
                row.append(t[tuple(idx)])
        rows.append(tuple(row))
    return Matrix(n[a], n[others[0]] * n[others[1]], tuple(rows), t.field)


def flattening_ranks(t: Tensor3):
    return tuple(rank(flattening(t, d)) for d in DIRECTIONS)


def slices(t: Tensor3, direction: int):
    """The n_i slices T^{(i)}(e_j) as n_j × n_k matrices (remaining axes in order)."""
    a = _axis(direction)
    n = t.dims
    others = [x for x in range(3) if x != a]
    flat = flattening(t, direction)
    nk = n[others[1]]
    out = []
    for i in range(n[a]):
        row = flat.data[i]
        out.append(Matrix(n[others[0]], nk, tuple(tuple(row[j * nk:(j + 1) * nk])
                                                  for j in range(n[others[0]])), t.field))
    return out


def slice_space(t: Tensor3, direction: int) -> MatrixSpace:
    sl = slices(t, direction)
    return MatrixSpace(tuple(sl), sl[0].rows, sl[0].cols, t.field).reduce_basis()


def subrank_i(t: Tensor3, direction: int, rng_seed: int = 0, trials: int = DEFAULT_TRIALS,
              lift: bool = True) -> int:
    """q_i: generic rank of the slice span in the given direction."""
    space = slice_space(t, direction)
    if space.dim == 0:
        return 0
    return max_rank(space, trials=trials, rng_seed=derive_seed(rng_seed, "q", direction), lift=lift)


def slice_ranks(t: Tensor3, rng_seed: int = 0, lift: bool = True):
    return tuple(subrank_i(t, d, rng_seed, lift=lift) for d in DIRECTIONS)


# ------------------------------------------------------------ restriction

def mode_product(t: Tensor3, m: Matrix, direction: int) -> Tensor3:
    """Apply the linear map m on one tensor factor."""
    if m.field != t.field:
        raise FieldMismatch(f"map over {m.field.name}, tensor over {t.field.name}")
    a = _axis(direction)
    if m.cols != t.dims[a]:
        raise ShapeMismatch(f"map {m.shape} cannot act on factor of size {t.dims[a]}")
    f = t.field
    add, mul, z = f.add, f.mul, f.zero
    new_dims = list(t.dims)
    new_dims[a] = m.rows
    n1, n2, n3 = new_dims
    out = [z] * (n1 * n2 * n3)
    for (i, j, k), v in t.nonzero().items():
        idx = [i, j, k]
        src = idx[a]
        for r in range(m.rows):
            c = m.data[r][src]
            if c != z:
                idx[a] = r
                pos = (idx[0] * n2 + idx[1]) * n3 + idx[2]
                out[pos] = add(out[pos], mul(c, v))
    return Tensor3(tuple(new_dims), tuple(out), f)


def apply(t: Tensor3, maps: RestrictionMaps) -> Tensor3:
    """(A1 ⊗ A2 ⊗ A3) t."""
    for d, m in zip(DIRECTIONS, maps):
        t = mode_product(t, m, d)
    return t


def kronecker(t: Tensor3, s: Tensor3) -> Tensor3:
    """Kronecker product; factor index (i, i') maps to i * s_dim + i'."""
    if t.field != s.field:
        raise FieldMismatch("Kronecker product of tensors over different fields")
    f = t.field
    dims = tuple(a * b for a, b in zip(t.dims, s.dims))
    vals = {}
    for (i, j, k), v in t.nonzero().items():
        for (i2, j2, k2), w in s.nonzero().items():
            vals[(i * s.dims[0] + i2, j * s.dims[1] + j2, k * s.dims[2] + k2)] = f.mul(v, w)
    return Tensor3.from_dict(dims, vals, f)


def permute_factors(t: Tensor3, perm) -> Tensor3:
    """Relocate factors: factor a of the result is factor ``perm[a]`` of t (1-based).

    This is ``numpy.transpose`` with 1-based axes; ``(3, 1, 2)`` sends N3 to N1.
    """
    perm = tuple(perm)
    if sorted(perm) != [1, 2, 3]:
        raise ValueError(f"not a permutation of (1, 2, 3): {perm}")
    src = [p - 1 for p in perm]
    dims = tuple(t.dims[s] for s in src)
    vals = {}
    for idx, v in t.nonzero().items():
        vals[tuple(idx[s] for s in src)] = v
    return Tensor3.from_dict(dims, vals, t.field)


def inverse_permutation(perm):
    inv = [0, 0, 0]
    for a, p in enumerate(perm):
        inv[p - 1] = a + 1
    return tuple(inv)


def permute_maps(maps: RestrictionMaps, perm) -> RestrictionMaps:
    """Maps for ``permute_factors(t, perm)`` given maps acting on t."""
    return RestrictionMaps(*(maps[p - 1] for p in perm))


# ------------------------------------------------------------ coring

def concise_core(t: Tensor3):
    """Compress t to its concise core S of dims (r1, r2, r3).

    Returns ``(S, to_core, from_core)`` with ``apply(t, to_core) == S`` and
    ``apply(S, from_core) == t``.  ``to_core`` selects independent coordinate
    rows of each flattening; ``from_core`` embeds back through the column space.
    """
    if t.is_zero():
        raise ZeroTensor("zero tensor has no concise core")
    f = t.field
    to_maps, from_maps = [], []
    for d in DIRECTIONS:
        flat = flattening(t, d)
        n = flat.rows
        row_pivots = rref(flat.T)[1]          # independent rows of the flattening
        col_pivots = rref(flat)[1]            # independent columns
        sel = Matrix.from_rows([[f.one if c == p else f.zero for c in range(n)] for p in row_pivots],
                               f, coerce=False)
        basis = Matrix.from_columns([flat.col(c) for c in col_pivots], f, n)
        emb = basis @ invert(sel @ basis)
        to_maps.append(sel)
        from_maps.append(emb)
    to_core = RestrictionMaps(*to_maps)
    from_core = RestrictionMaps(*from_maps)
    return apply(t, to_core), to_core, from_core


# ------------------------------------------------------------ generic restriction

def _projection_rows(g: Matrix, m: int) -> Matrix:
    """First m rows of g, padded with zero rows when m exceeds its size."""
    f = g.field
    rows = [g.row(i) for i in range(min(m, g.rows))]
    rows += [[f.zero] * g.cols for _ in range(m - len(rows))]
    return Matrix.from_rows(rows, f, coerce=False)


def expected_slice_ranks(q, m):
    """min{q_i, m_j, m_k} for each direction."""
    out = []
    for i in range(3):
        j, k = [x for x in range(3) if x != i]
        out.append(min(q[i], m[j], m[k]))
    return tuple(out)


def generic_restrict(t: Tensor3, m, rng_seed: int = 0, max_retries: int = MAX_RETRIES,
                     q_source=None):
    """Restrict t to format m keeping every q_i as large as the format allows.

    Acts by three random invertible matrices and keeps the leading
    m1 × m2 × m3 block.  The slice-rank postcondition is checked and the
    sampling repeated with a derived seed on failure.

    Returns ``(S, maps, attempts)``.
    """
    if t.is_zero():
        raise ZeroTensor("generic restriction of the zero tensor")
    m = tuple(m)
    if len(m) != 3 or min(m) < 1:
        raise ShapeMismatch(f"target format must be three positive sizes, got {m}")
    q_t = q_source if q_source is not None else slice_ranks(t, derive_seed(rng_seed, "qT"))
    want = expected_slice_ranks(q_t, m)
    f = t.field
    for attempt in range(max_retries):
        rng = make_rng(rng_seed, "generic_restrict", attempt)
        maps = []
        for n, mi in zip(t.dims, m):
            while True:
                g = random_matrix(n, n, f, rng)
                if rank(g) == n:
                    break
            maps.append(_projection_rows(g, mi))
        maps = RestrictionMaps(*maps)
        s = apply(t, maps)
        if s.is_zero():
            continue
        if slice_ranks(s, derive_seed(rng_seed, "qS", attempt)) == want:
            return s, maps, attempt + 1
    raise GenericityFailure(f"generic restriction to {m} failed after {max_retries} attempts")


def coordinate_embedding(n: int, m: int, field) -> Matrix:
    """The m × n matrix [I; 0] (or its truncation)."""
    return Matrix.from_rows([[field.one if i == j else field.zero for j in range(n)]
                             for i in range(m)], field, coerce=False)


def all_index_triples(dims):
    return product(range(dims[0]), range(dims[1]), range(dims[2]))


__all__ = [
    "Tensor3", "RestrictionMaps", "flattening", "flattening_ranks", "slices", "slice_space",
    "subrank_i", "slice_ranks", "mode_product", "apply", "kronecker", "permute_factors",
    "inverse_permutation", "permute_maps", "concise_core", "generic_restrict",
    "expected_slice_ranks", "complete_basis", "DIRECTIONS", "other_directions",
]
