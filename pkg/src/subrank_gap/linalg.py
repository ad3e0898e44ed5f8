"""Exact dense matrices over a field, elimination, and max-rank of matrix spaces."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from itertools import product
from math import lcm

from .errors import EmptySpace, FieldMismatch, ShapeMismatch, Singular
from .fields import Rationals, embedding, lifted_field, make_rng

#: q^dim limit for exhaustive enumeration of a matrix space
EXHAUSTIVE_LIMIT = 10**6
DEFAULT_TRIALS = 20


@dataclass(frozen=True)
class Matrix:
    rows: int
    cols: int
    data: tuple  # tuple of row tuples
    field: object

    @classmethod
    def from_rows(cls, rows, field, coerce=True):
        rows = [list(r) for r in rows]
        nr = len(rows)
        nc = len(rows[0]) if rows else 0
        if any(len(r) != nc for r in rows):
            raise ShapeMismatch("ragged rows")
        conv = field.coerce if coerce else (lambda a: a)
        return cls(nr, nc, tuple(tuple(conv(a) for a in r) for r in rows), field)

    @classmethod
    def zeros(cls, rows, cols, field):
        z = field.zero
        return cls(rows, cols, tuple((z,) * cols for _ in range(rows)), field)

    @classmethod
    def identity(cls, n, field):
        return cls(n, n, tuple(tuple(field.one if i == j else field.zero for j in range(n))
                               for i in range(n)), field)

    @classmethod
    def from_columns(cls, columns, field, nrows=None):
        columns = [list(c) for c in columns]
        nr = len(columns[0]) if columns else (nrows or 0)
        return cls(nr, len(columns), tuple(tuple(c[i] for c in columns) for i in range(nr)), field)

    @classmethod
    def elementary(cls, rows, cols, i, j, field):
        return cls(rows, cols, tuple(tuple(field.one if (a, b) == (i, j) else field.zero
                                           for b in range(cols)) for a in range(rows)), field)

    def __getitem__(self, idx):
        i, j = idx
        return self.data[i][j]

    @property
    def shape(self):
        return (self.rows, self.cols)

    def row(self, i):
        return list(self.data[i])

    def col(self, j):
        return [r[j] for r in self.data]

    def columns(self):
        return [self.col(j) for j in range(self.cols)]

    @property
    def T(self):
        return Matrix(self.cols, self.rows, tuple(zip(*self.data)) if self.rows else
                      tuple(() for _ in range(self.cols)), self.field)

    def is_zero(self):
        z = self.field.zero
        return all(a == z for r in self.data for a in r)

    def _check(self, other):
        if self.field != other.field:
            raise FieldMismatch(f"{self.field.name} vs {other.field.name}")

    def __add__(self, other):
        self._check(other)
        if self.shape != other.shape:
            raise ShapeMismatch(f"{self.shape} + {other.shape}")
        add = self.field.add
        return Matrix(self.rows, self.cols, tuple(tuple(add(a, b) for a, b in zip(r, s))
                                                  for r, s in zip(self.data, other.data)), self.field)

    def __sub__(self, other):
        return self + other.scale(self.field.neg(self.field.one))

    def scale(self, c):
        mul = self.field.mul
        return Matrix(self.rows, self.cols, tuple(tuple(mul(c, a) for a in r) for r in self.data),
                      self.field)

    def __matmul__(self, other):
        self._check(other)
        if self.cols != other.rows:
            raise ShapeMismatch(f"{self.shape} @ {other.shape}")
        f = self.field
        add, mul, z = f.add, f.mul, f.zero
        cols = list(zip(*other.data)) if other.rows else [()] * other.cols
        out = []
        for r in self.data:
            nz = [(k, a) for k, a in enumerate(r) if a != z]
            row = []
            for c in cols:
                acc = z
                for k, a in nz:
                    b = c[k]
                    if b != z:
                        acc = add(acc, mul(a, b))
                row.append(acc)
            out.append(tuple(row))
        return Matrix(self.rows, other.cols, tuple(out), f)

    def apply(self, vec):
        f = self.field
        add, mul, z = f.add, f.mul, f.zero
        return [reduce(add, (mul(a, b) for a, b in zip(r, vec)), z) for r in self.data]

    def submatrix(self, rows, cols):
        return Matrix(len(rows), len(cols), tuple(tuple(self.data[i][j] for j in cols) for i in rows),
                      self.field)

    def lift(self, field):
        if field == self.field:
            return self
        emb = embedding(self.field, field)
        return Matrix(self.rows, self.cols, tuple(tuple(emb(a) for a in r) for r in self.data), field)

    def to_lists(self):
        return [list(r) for r in self.data]

    def vec(self):
        return [a for r in self.data for a in r]

    def __repr__(self):
        body = "; ".join(" ".join(self.field.format(a) for a in r) for r in self.data)
        return f"Matrix({self.rows}x{self.cols} over {self.field.name}: [{body}])"


def block_diag(a: Matrix, b: Matrix) -> Matrix:
    f = a.field
    z = f.zero
    rows = [list(r) + [z] * b.cols for r in a.data] + [[z] * a.cols + list(r) for r in b.data]
    return Matrix.from_rows(rows, f, coerce=False) if rows else Matrix.zeros(0, a.cols + b.cols, f)


# ---------------------------------------------------------------- elimination

def _rref_rows(rows, field, ncols):
    """Reduced row echelon form of a list of rows; returns (rows, pivot columns)."""
    add, mul, neg, inv, z = field.add, field.mul, field.neg, field.inv, field.zero
    m = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c] != z), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        s = inv(m[r][c])
        m[r] = [mul(s, a) for a in m[r]]
        prow = m[r]
        for i in range(len(m)):
            if i != r and m[i][c] != z:
                factor = neg(m[i][c])
                m[i] = [add(a, mul(factor, b)) if b != z else a for a, b in zip(m[i], prow)]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rref(m: Matrix):
    rows, pivots = _rref_rows(m.data, m.field, m.cols)
    return rows, pivots


def _bareiss_rank(rows) -> int:
    """Fraction-free elimination on an integer matrix."""
    m = [list(r) for r in rows]
    nr = len(m)
    nc = len(m[0]) if m else 0
    rank = 0
    prev = 1
    for c in range(nc):
        piv = next((i for i in range(rank, nr) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        p = m[rank][c]
        for i in range(rank + 1, nr):
            a = m[i][c]
            m[i] = [(p * x - a * y) // prev for x, y in zip(m[i], m[rank])]
        prev = p
        rank += 1
        if rank == nr:
            break
    return rank


def rank(m: Matrix) -> int:
    """Exact rank: Bareiss over Q, Gauss-Jordan over finite fields."""
    if m.rows == 0 or m.cols == 0:
        return 0
    if isinstance(m.field, Rationals):
        int_rows = []
        for r in m.data:
            d = lcm(*(Fraction(a).denominator for a in r))
            int_rows.append([int(a * d) for a in r])
        return _bareiss_rank(int_rows)
    return len(_rref_rows(m.data, m.field, m.cols)[1])


def nullspace(m: Matrix):
    """Basis (list of column vectors) of {x : m x = 0}."""
    f = m.field
    rows, pivots = _rref_rows(m.data, f, m.cols)
    free = [c for c in range(m.cols) if c not in pivots]
    basis = []
    for fc in free:
        v = [f.zero] * m.cols
        v[fc] = f.one
        for r, pc in zip(rows, pivots):
            v[pc] = f.neg(r[fc])
        basis.append(v)
    return basis


def invert(m: Matrix) -> Matrix:
    if m.rows != m.cols:
        raise ShapeMismatch("inverse of a non-square matrix")
    f = m.field
    n = m.rows
    aug = [list(r) + [f.one if i == j else f.zero for j in range(n)] for i, r in enumerate(m.data)]
    rows, pivots = _rref_rows(aug, f, 2 * n)
    if len(pivots) < n or pivots[n - 1] >= n:
        raise Singular("matrix is singular")
    return Matrix(n, n, tuple(tuple(r[n:]) for r in rows), f)


def solve(m: Matrix, b):
    """One solution x of m x = b, or None if inconsistent."""
    f = m.field
    aug = [list(r) + [bi] for r, bi in zip(m.data, b)]
    rows, pivots = _rref_rows(aug, f, m.cols + 1)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [f.zero] * m.cols
    for r, pc in zip(rows, pivots):
        x[pc] = r[-1]
    return x


def span_basis(vectors, field, dim=None):
    """Reduced basis (RREF rows) of the span of ``vectors``."""
    vectors = [list(v) for v in vectors]
    if not vectors:
        return []
    return _rref_rows(vectors, field, len(vectors[0]) if dim is None else dim)[0]


def independent_subset(vectors, field):
    """Indices of a maximal linearly independent subset, chosen greedily in order."""
    if not vectors:
        return []
    cols = Matrix.from_columns(vectors, field)
    return rref(cols)[1]


def intersect_spans(u, v, field, dim):
    """Basis of span(u) ∩ span(v) in field^dim."""
    if not u or not v:
        return []
    big = Matrix.from_columns(list(u) + [[field.neg(a) for a in w] for w in v], field)
    out = []
    for coeffs in nullspace(big):
        vec = [field.zero] * dim
        for c, w in zip(coeffs[: len(u)], u):
            if c != field.zero:
                vec = [field.add(a, field.mul(c, b)) for a, b in zip(vec, w)]
        out.append(vec)
    return span_basis(out, field, dim)


def complete_basis(vectors, n, field) -> Matrix:
    """Invertible n×n matrix whose leading columns are ``vectors`` (independent)."""
    cols = [list(v) for v in vectors]
    for j in range(n):
        e = [field.one if i == j else field.zero for i in range(n)]
        if len(cols) == n:
            break
        if rank(Matrix.from_columns(cols + [e], field, n)) == len(cols) + 1:
            cols.append(e)
    if len(cols) != n:
        raise Singular("vectors are dependent")
    return Matrix.from_columns(cols, field, n)


# -------------------------------------------------------------- random matrices

def random_matrix(rows, cols, field, rng) -> Matrix:
    return Matrix(rows, cols, tuple(tuple(field.random(rng) for _ in range(cols))
                                    for _ in range(rows)), field)


def random_invertible(n: int, field, rng_seed: int) -> Matrix:
    """Uniformly random invertible matrix by rejection sampling; deterministic in the seed."""
    rng = make_rng(rng_seed, "random_invertible", n)
    while True:
        m = random_matrix(n, n, field, rng)
        if rank(m) == n:
            return m


def random_full_rank(rows, cols, field, rng) -> Matrix:
    target = min(rows, cols)
    while True:
        m = random_matrix(rows, cols, field, rng)
        if rank(m) == target:
            return m


# ---------------------------------------------------------------- matrix spaces

@dataclass(frozen=True)
class MatrixSpace:
    basis: tuple
    ambient_rows: int
    ambient_cols: int
    field: object

    @classmethod
    def span(cls, matrices, field=None, shape=None):
        matrices = tuple(matrices)
        if field is None:
            field = matrices[0].field
        if shape is None:
            shape = matrices[0].shape
        for m in matrices:
            if m.shape != shape:
                raise ShapeMismatch("matrices in a space must share a shape")
            if m.field != field:
                raise FieldMismatch("matrices in a space must share a field")
        return cls(matrices, shape[0], shape[1], field).reduce_basis()

    def reduce_basis(self) -> "MatrixSpace":
        keep = independent_subset([m.vec() for m in self.basis], self.field)
        return MatrixSpace(tuple(self.basis[i] for i in keep), self.ambient_rows,
                           self.ambient_cols, self.field)

    @property
    def dim(self) -> int:
        return len(self.basis)

    def combination(self, coeffs) -> Matrix:
        f = self.field
        acc = Matrix.zeros(self.ambient_rows, self.ambient_cols, f)
        for c, m in zip(coeffs, self.basis):
            if c != f.zero:
                acc = acc + m.scale(c)
        return acc

    def random_element(self, rng) -> Matrix:
        return self.combination([self.field.random(rng) for _ in self.basis])

    def lift(self, field) -> "MatrixSpace":
        if field == self.field:
            return self
        return MatrixSpace(tuple(m.lift(field) for m in self.basis), self.ambient_rows,
                           self.ambient_cols, field)

    def contains(self, m: Matrix) -> bool:
        vecs = [b.vec() for b in self.basis]
        return rank(Matrix.from_columns(vecs + [m.vec()], self.field)) == len(vecs)

    def same_subspace(self, other: "MatrixSpace") -> bool:
        return self.dim == other.dim and all(self.contains(m) for m in other.basis)

    def column_span(self):
        """Basis of the joint column space (in field^rows) of all basis matrices."""
        vecs = [c for m in self.basis for c in m.columns()]
        return span_basis(vecs, self.field, self.ambient_rows)

    def row_span(self):
        vecs = [m.row(i) for m in self.basis for i in range(m.rows)]
        return span_basis(vecs, self.field, self.ambient_cols)


def max_rank(space: MatrixSpace, trials: int = DEFAULT_TRIALS, rng_seed: int = 0,
             exhaustive: bool = False, lift: bool = True) -> int:
    """Largest rank attained in a matrix space.

    Sampling mode evaluates ``trials`` random combinations (over the lifted field
    when the base field is small, so the result is the generic rank over the
    algebraic closure).  A wrong answer needs every sample to land on the
    degeneracy hypersurface, which by Schwartz-Zippel has probability at most
    ``(maxrank / |F|)^trials``.  Exhaustive mode enumerates every combination
    over the given field (up to scaling) and is exact for that field.
    """
    if space.dim == 0:
        raise EmptySpace("matrix space has no basis")
    cap = min(space.ambient_rows, space.ambient_cols)
    if exhaustive:
        return _max_rank_exhaustive(space, cap)
    if lift:
        space = space.lift(lifted_field(space.field))
    rng = make_rng(rng_seed, "max_rank")
    best = 0
    for _ in range(max(1, trials)):
        best = max(best, rank(space.random_element(rng)))
        if best == cap:
            break
    return best


def _max_rank_exhaustive(space, cap):
    f = space.field
    if not f.is_finite or f.size**space.dim > EXHAUSTIVE_LIMIT:
        raise ValueError("exhaustive max_rank needs a finite field with q^dim <= 10^6")
    best = 0
    d = space.dim
    # projective representatives: leading nonzero coefficient equal to 1
    for lead in range(d):
        for tail in product(f.elements(), repeat=d - lead - 1):
            coeffs = [f.zero] * lead + [f.one] + list(tail)
            best = max(best, rank(space.combination(coeffs)))
            if best == cap:
                return best
    return best


def generic_element(space: MatrixSpace, rng, target_rank=None, attempts=50) -> Matrix:
    """A random element attaining ``target_rank`` (default: the sampled max rank)."""
    if target_rank is None:
        target_rank = max_rank(space, rng_seed=rng.getrandbits(63), lift=False)
    for _ in range(attempts):
        m = space.random_element(rng)
        if rank(m) == target_rank:
            return m
    raise Singular("no element of the requested rank found")
