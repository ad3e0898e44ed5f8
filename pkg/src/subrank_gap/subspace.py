"""Classification of matrix spaces of rank at most two up to equivalence.

Equivalence is simultaneous invertible row and column operations plus adding
or removing zero rows and columns.  A space of max-rank one is supported in a
single row or column; a space of max-rank two is supported in two rows, two
columns, a row plus a column, or is the full space of 3×3 alternating
matrices.  Each verdict carries a transform ``(R, C)`` such that every
``R @ A @ C`` fits the declared support pattern; the transform is checked
before it is returned.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

from .errors import EmptySpace, InternalContradiction, Singular, UnclassifiableOverSmallField
from .fields import GENERIC_FIELD_SIZE, derive_seed, lifted_field, make_rng
from .linalg import (Matrix, MatrixSpace, block_diag, complete_basis, intersect_spans, invert,
                     max_rank, nullspace, rank, span_basis)

MAX_RETRIES = 10


class SubspaceTag(enum.Enum):
    SingleRow = "SingleRow"
    SingleColumn = "SingleColumn"
    TwoRows = "TwoRows"
    TwoColumns = "TwoColumns"
    RowPlusColumn = "RowPlusColumn"
    Skew3x3 = "Skew3x3"
    RankAtLeast3 = "RankAtLeast3"


#: precedence when several patterns fit
PRECEDENCE = (SubspaceTag.SingleRow, SubspaceTag.SingleColumn, SubspaceTag.TwoRows,
              SubspaceTag.TwoColumns, SubspaceTag.RowPlusColumn, SubspaceTag.Skew3x3)


@dataclass(frozen=True)
class SubspaceClass:
    tag: SubspaceTag
    row_transform: Matrix | None = None
    col_transform: Matrix | None = None
    max_rank: int | None = None
    field: object = None

    def transformed(self, space: MatrixSpace):
        lifted = space.lift(self.field) if self.field is not None else space
        return [self.row_transform @ a @ self.col_transform for a in lifted.basis]


def skew_space(field, size: int = 3) -> MatrixSpace:
    """The space of size×size alternating matrices (zero diagonal, A^T = -A)."""
    basis = []
    for i in range(size):
        for j in range(i + 1, size):
            rows = [[field.zero] * size for _ in range(size)]
            rows[i][j] = field.one
            rows[j][i] = field.neg(field.one)
            basis.append(Matrix.from_rows(rows, field, coerce=False))
    return MatrixSpace.span(basis)


def conjugate_space(s: MatrixSpace, r: Matrix, c: Matrix) -> MatrixSpace:
    """Replace every basis matrix A by r @ A @ c (r, c invertible)."""
    if r.rows != r.cols or c.rows != c.cols:
        raise Singular("conjugating matrices must be square")
    if rank(r) < r.rows or rank(c) < c.rows:
        raise Singular("conjugating matrices must be invertible")
    return MatrixSpace.span([r @ a @ c for a in s.basis], s.field, (s.ambient_rows, s.ambient_cols))


# -------------------------------------------------------------- pattern checks

def _is_alternating(block, f):
    n = len(block)
    return all(block[i][i] == f.zero for i in range(n)) and all(
        f.add(block[i][j], block[j][i]) == f.zero for i in range(n) for j in range(n))


def fits_pattern(tag: SubspaceTag, matrices) -> bool:
    """Whether every matrix is supported in the canonical pattern of ``tag``."""
    if not matrices:
        return True
    f = matrices[0].field
    z = f.zero

    def support_ok(pred):
        return all(m[i, j] == z for m in matrices for i in range(m.rows) for j in range(m.cols)
                   if not pred(i, j))

    if tag is SubspaceTag.SingleRow:
        return support_ok(lambda i, j: i == 0)
    if tag is SubspaceTag.SingleColumn:
        return support_ok(lambda i, j: j == 0)
    if tag is SubspaceTag.TwoRows:
        return support_ok(lambda i, j: i < 2)
    if tag is SubspaceTag.TwoColumns:
        return support_ok(lambda i, j: j < 2)
    if tag is SubspaceTag.RowPlusColumn:
        return support_ok(lambda i, j: i == 0 or j == 0)
    if tag is SubspaceTag.Skew3x3:
        if not support_ok(lambda i, j: i < 3 and j < 3):
            return False
        blocks = [[[m[i, j] for j in range(3)] for i in range(3)] for m in matrices]
        if not all(_is_alternating(b, f) for b in blocks):
            return False
        # the blocks must span the whole 3-dimensional alternating space
        return len(span_basis([[b[0][1], b[0][2], b[1][2]] for b in blocks], f, 3)) == 3
    return False


def _transform_for_span(basis_vectors, n, f):
    """Invertible R with R u ∈ span(e_1..e_d) for every u in span(basis_vectors)."""
    return invert(complete_basis(basis_vectors, n, f))


# -------------------------------------------------------------- classification

def _row_plus_column(space: MatrixSpace, rng):
    """Look for a line L and hyperplane W with A(W) ⊆ L for all A in the space."""
    f = space.field
    nr, nc = space.ambient_rows, space.ambient_cols
    elems = []
    for _ in range(3):
        a = space.random_element(rng)
        if rank(a) != 2:
            return None
        elems.append(a)
    w = span_basis([v for a in elems for v in nullspace(a)], f, nc)
    line = span_basis(elems[0].columns(), f, nr)
    for a in elems[1:]:
        line = intersect_spans(line, span_basis(a.columns(), f, nr), f, nr)
    if len(w) != nc - 1 or len(line) != 1:
        return None
    for a in space.basis:
        for x in w:
            image = a.apply(x)
            if rank(Matrix.from_columns([line[0], image], f, nr)) > 1:
                return None
    r = _transform_for_span(line, nr, f)
    # C sends e_1 outside W and e_2.. onto a basis of W
    c = complete_basis(w, nc, f)
    cols = c.columns()
    c = Matrix.from_columns([cols[-1]] + cols[:-1], f, nc)
    return r, c


def _skew_normalization(space: MatrixSpace):
    """Find (R, C) making the compressed space the full 3×3 alternating space."""
    f = space.field
    nr, nc = space.ambient_rows, space.ambient_cols
    col_span, row_span = space.column_span(), space.row_span()
    if space.dim != 3 or len(col_span) != 3 or len(row_span) != 3:
        return None
    r0 = _transform_for_span(col_span, nr, f)
    c0 = _transform_for_span(row_span, nc, f).T
    comp = [(r0 @ a @ c0).submatrix(range(3), range(3)) for a in space.basis]
    # unknown N (3×3, row-major): N @ A alternating for every compressed A
    eqs = []
    for a in comp:
        def entry(i, j, a=a):
            coeffs = [f.zero] * 9
            for k in range(3):
                coeffs[3 * i + k] = f.add(coeffs[3 * i + k], a[k, j])
            return coeffs
        for i in range(3):
            eqs.append(entry(i, i))
            for j in range(i + 1, 3):
                eqs.append([f.add(x, y) for x, y in zip(entry(i, j), entry(j, i))])
    sols = nullspace(Matrix.from_rows(eqs, f, coerce=False))
    for vec in sols:
        n = Matrix.from_rows([vec[0:3], vec[3:6], vec[6:9]], f, coerce=False)
        if rank(n) == 3:
            r = block_diag(n, Matrix.identity(nr - 3, f)) @ r0
            return r, c0
    return None


def classify_subspace(s: MatrixSpace, rng_seed: int = 0, field_lift: bool = True) -> SubspaceClass:
    """Equivalence class of a matrix space of max-rank at most two."""
    s = s.reduce_basis()
    if s.dim == 0:
        raise EmptySpace("matrix space has no nonzero element")
    work_field = lifted_field(s.field) if field_lift else s.field
    s_work = s.lift(work_field)
    f = work_field
    nr, nc = s.ambient_rows, s.ambient_cols
    mr = max_rank(s_work, rng_seed=derive_seed(rng_seed, "classify_subspace"), lift=False)
    if mr >= 3:
        return SubspaceClass(SubspaceTag.RankAtLeast3, max_rank=mr, field=work_field)

    col_span, row_span = s_work.column_span(), s_work.row_span()
    candidates = []
    if len(col_span) <= 1:
        candidates.append((SubspaceTag.SingleRow, _transform_for_span(col_span, nr, f),
                           Matrix.identity(nc, f)))
    if len(row_span) <= 1:
        candidates.append((SubspaceTag.SingleColumn, Matrix.identity(nr, f),
                           _transform_for_span(row_span, nc, f).T))
    if not candidates and mr == 2:
        if len(col_span) <= 2:
            candidates.append((SubspaceTag.TwoRows, _transform_for_span(col_span, nr, f),
                               Matrix.identity(nc, f)))
        if len(row_span) <= 2:
            candidates.append((SubspaceTag.TwoColumns, Matrix.identity(nr, f),
                               _transform_for_span(row_span, nc, f).T))
    if not candidates and mr == 2:
        for attempt in range(MAX_RETRIES):
            found = _row_plus_column(s_work, make_rng(rng_seed, "rowcol", attempt))
            if found:
                candidates.append((SubspaceTag.RowPlusColumn, *found))
                break
        if not candidates:
            found = _skew_normalization(s_work)
            if found:
                candidates.append((SubspaceTag.Skew3x3, *found))
    for tag, r, c in candidates:
        if fits_pattern(tag, [r @ a @ c for a in s_work.basis]):
            return SubspaceClass(tag, r, c, mr, work_field)
    if not field_lift and s.field.is_finite and s.field.size < GENERIC_FIELD_SIZE:
        raise UnclassifiableOverSmallField(
            f"no rank-<=2 pattern found over {s.field.name}; enable field lifting")
    raise InternalContradiction(f"max-rank {mr} space fits none of the classified patterns")


def brute_force_pattern(space: MatrixSpace, tag: SubspaceTag, group) -> bool:
    """Exhaustive check over all (R, C) pairs from ``group`` (a list of invertible matrices)."""
    rows_only = tag in (SubspaceTag.SingleRow, SubspaceTag.TwoRows)
    cols_only = tag in (SubspaceTag.SingleColumn, SubspaceTag.TwoColumns)
    ident_r = Matrix.identity(space.ambient_rows, space.field)
    ident_c = Matrix.identity(space.ambient_cols, space.field)
    rs = group if not cols_only else [ident_r]
    cs = group if not rows_only else [ident_c]
    for r in rs:
        left = [r @ a for a in space.basis]
        for c in cs:
            if fits_pattern(tag, [m @ c for m in left]):
                return True
    return False
