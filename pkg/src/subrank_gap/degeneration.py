"""Laurent-polynomial maps, unital-algebra normalization and degeneration to N^(k)_n.

A degeneration T ⊵ S is witnessed by maps A(ε), B(ε), C(ε) with Laurent
polynomial entries such that (A ⊗ B ⊗ C) T = S + ε S_1 + ... + ε^t S_t.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from .corpus import null_tensor
from .errors import GenericityFailure, PreconditionFailed, ShapeMismatch, Singular
from .fields import derive_seed, make_rng
from .linalg import Matrix, complete_basis, invert, rank
from .tensor import (MAX_RETRIES, RestrictionMaps, Tensor3, apply, generic_restrict,
                     inverse_permutation, other_directions, permute_factors, permute_maps,
                     slice_ranks, slices)


@dataclass(frozen=True)
class LaurentMatrix:
    """Matrix with Laurent-polynomial entries, stored as {exponent: coefficient matrix}."""

    rows: int
    cols: int
    terms: dict = dc_field(hash=False, compare=False)
    field: object = None

    @classmethod
    def constant(cls, m: Matrix) -> "LaurentMatrix":
        return cls(m.rows, m.cols, {0: m}, m.field)._pruned()

    @classmethod
    def diagonal(cls, exponents, field) -> "LaurentMatrix":
        """diag(ε^{e_1}, ..., ε^{e_n})."""
        n = len(exponents)
        terms = {}
        for i, e in enumerate(exponents):
            rows = terms.setdefault(e, [[field.zero] * n for _ in range(n)])
            rows[i][i] = field.one
        return cls(n, n, {e: Matrix.from_rows(r, field, coerce=False) for e, r in terms.items()},
                   field)

    @classmethod
    def from_entries(cls, rows, cols, entries, field) -> "LaurentMatrix":
        """From an iterable of (row, col, exponent, value), 0-based."""
        acc = {}
        for r, c, e, v in entries:
            grid = acc.setdefault(e, [[field.zero] * cols for _ in range(rows)])
            grid[r][c] = field.add(grid[r][c], v)
        return cls(rows, cols, {e: Matrix.from_rows(g, field, coerce=False) if rows else
                                Matrix.zeros(rows, cols, field) for e, g in acc.items()},
                   field)._pruned()

    def _pruned(self):
        return LaurentMatrix(self.rows, self.cols,
                             {e: m for e, m in sorted(self.terms.items()) if not m.is_zero()},
                             self.field)

    def __eq__(self, other):
        return (isinstance(other, LaurentMatrix) and self.shape == other.shape
                and self._pruned().terms == other._pruned().terms)

    def __hash__(self):
        return hash((self.rows, self.cols))

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __matmul__(self, other):
        if isinstance(other, Matrix):
            other = LaurentMatrix.constant(other) if not other.is_zero() else \
                LaurentMatrix(other.rows, other.cols, {}, other.field)
        if self.cols != other.rows:
            raise ShapeMismatch(f"{self.shape} @ {other.shape}")
        out = {}
        for e1, m1 in self.terms.items():
            for e2, m2 in other.terms.items():
                prod = m1 @ m2
                out[e1 + e2] = out[e1 + e2] + prod if e1 + e2 in out else prod
        return LaurentMatrix(self.rows, other.cols, out, self.field)._pruned()

    def evaluate(self, x) -> Matrix:
        """Substitute ε := x (x must be nonzero if negative exponents occur)."""
        f = self.field
        acc = Matrix.zeros(self.rows, self.cols, f)
        for e, m in self.terms.items():
            acc = acc + m.scale(f.power(x, e))
        return acc

    def entries(self):
        """Sorted (row, col, exponent, value) tuples, 0-based, nonzero values only."""
        out = []
        for e, m in self.terms.items():
            for i in range(m.rows):
                for j in range(m.cols):
                    if m[i, j] != self.field.zero:
                        out.append((i, j, e, m[i, j]))
        return sorted(out, key=lambda t: (t[0], t[1], t[2]))

    def with_entry(self, row, col, exponent, value) -> "LaurentMatrix":
        """Copy with one coefficient replaced."""
        entries = [x for x in self.entries() if (x[0], x[1], x[2]) != (row, col, exponent)]
        entries.append((row, col, exponent, value))
        return LaurentMatrix.from_entries(self.rows, self.cols, entries, self.field)

    def min_exponent(self):
        return min(self.terms) if self.terms else None


@dataclass(frozen=True)
class RestrictionCertificate:
    """Witness of source ≥ target: apply(source, maps) == target."""

    maps: RestrictionMaps
    target: Tensor3
    label: str = ""


@dataclass(frozen=True)
class DegenerationCertificate:
    """Witness of source ⊵ target by Laurent-polynomial maps."""

    a: LaurentMatrix
    b: LaurentMatrix
    c: LaurentMatrix
    target: Tensor3
    max_error_order: int
    label: str = ""


@dataclass(frozen=True)
class AlgebraForm:
    """Invertible base change bringing a tensor into unital-algebra normal form.

    ``apply(source, base_change) == form`` where ``form`` equals N^(3)_n plus
    entries at positions (a, b, c) with a, b ≥ 2 (1-based).
    """

    base_change: RestrictionMaps
    form: Tensor3
    attempts: int = 1

    @property
    def n(self):
        return self.form.dims[0]

    @property
    def structure_constants(self):
        """{(a, b, c): value} (1-based) of the residual part with a, b ≥ 2."""
        return {(a + 1, b + 1, c + 1): v for (a, b, c), v in self.form.nonzero().items()
                if a >= 1 and b >= 1}


@dataclass(frozen=True)
class Verification:
    ok: bool
    reason: str = ""

    def __bool__(self):
        return self.ok


# ------------------------------------------------------------------- expansion

def apply_laurent(t: Tensor3, a: LaurentMatrix, b: LaurentMatrix, c: LaurentMatrix):
    """Expand (A(ε) ⊗ B(ε) ⊗ C(ε)) t as {exponent: tensor}, zero coefficients dropped."""
    for m, n in zip((a, b, c), t.dims):
        if m.cols != n:
            raise ShapeMismatch(f"Laurent map with {m.cols} columns on factor of size {n}")
    out = {}
    dims = (a.rows, b.rows, c.rows)
    for ea, ma in a.terms.items():
        partial_a = apply(t, RestrictionMaps(ma, Matrix.identity(t.dims[1], t.field),
                                             Matrix.identity(t.dims[2], t.field)))
        if partial_a.is_zero():
            continue
        for eb, mb in b.terms.items():
            partial_b = apply(partial_a, RestrictionMaps(Matrix.identity(dims[0], t.field), mb,
                                                         Matrix.identity(t.dims[2], t.field)))
            if partial_b.is_zero():
                continue
            for ec, mc in c.terms.items():
                term = apply(partial_b, RestrictionMaps(Matrix.identity(dims[0], t.field),
                                                        Matrix.identity(dims[1], t.field), mc))
                e = ea + eb + ec
                out[e] = out[e] + term if e in out else term
    return {e: s for e, s in sorted(out.items()) if not s.is_zero()}


# --------------------------------------------------------- algebra normalization

def _unit_form_holds(s: Tensor3) -> bool:
    """e_1 is a two-sided unit: s[1,b,c] = δ_bc and s[a,1,c] = δ_ac."""
    f = s.field
    n = s.dims[0]
    for x in range(n):
        for c in range(n):
            want = f.one if x == c else f.zero
            if s[0, x, c] != want or s[x, 0, c] != want:
                return False
    return True


def _combine(mats, coeffs, f):
    acc = Matrix.zeros(mats[0].rows, mats[0].cols, f)
    for m, x in zip(mats, coeffs):
        if x != f.zero:
            acc = acc + m.scale(x)
    return acc


def blaser_lysikov_normalize(t: Tensor3, rng_seed: int = 0,
                             max_retries: int = MAX_RETRIES) -> AlgebraForm:
    """Bring t (with q_1 = q_2 = n) to the form N^(3)_n + Σ_{a,b≥2} T_abc e_a⊗e_b⊗e_c.

    With M_α = Σ α_a T[a,:,:] and N_β = Σ β_b T[:,b,:] invertible, the product
    x∘y = T(R_β^{-1} x, L_α^{-1} y) has two-sided unit u = T(α, β); a final
    change of basis moves u to e_1.  The first attempt uses α = β = e_1.
    """
    n = t.dims[0]
    if t.dims != (n, n, n):
        raise PreconditionFailed(f"normalization needs a cubic format, got {t.dims}")
    q = slice_ranks(t, derive_seed(rng_seed, "bl-pre"))
    if q[0] < n or q[1] < n:
        raise PreconditionFailed(f"q1 = {q[0]}, q2 = {q[1]}; both must equal {n}")
    f = t.field
    s1, s2 = slices(t, 1), slices(t, 2)
    for attempt in range(max_retries):
        if attempt == 0:
            alpha = [f.one] + [f.zero] * (n - 1)
            beta = list(alpha)
        else:
            rng = make_rng(rng_seed, "bl-normalize", attempt)
            alpha = [f.random(rng) for _ in range(n)]
            beta = [f.random(rng) for _ in range(n)]
        m_alpha = _combine(s1, alpha, f)   # indexed (b, c)
        n_beta = _combine(s2, beta, f)     # indexed (a, c)
        if rank(m_alpha) < n or rank(n_beta) < n:
            continue
        u = m_alpha.T.apply(beta)          # u_c = Σ α_a β_b T[a,b,c]
        p = complete_basis([u], n, f)
        g1 = p.T @ invert(n_beta)
        g2 = p.T @ invert(m_alpha)
        g3 = invert(p)
        maps = RestrictionMaps(g1, g2, g3)
        form = apply(t, maps)
        if _unit_form_holds(form):
            return AlgebraForm(maps, form, attempt + 1)
    raise GenericityFailure(f"unital normalization failed after {max_retries} attempts")


def null_algebra_isomorphism(form: AlgebraForm):
    """If the normalized algebra is the null algebra, return maps sending it to N^(3)_n.

    Writes each e_a (a ≥ 2) as λ_a·1 + m_a; for the null algebra the ideal
    spanned by the m_a squares to zero and λ_a is read off as the e_b
    coefficient of e_b∘e_a for any b ≠ a.
    """
    s = form.form
    f = s.field
    n = form.n
    if n < 3:
        return None
    lam = []
    for a in range(1, n):
        b = 1 if a != 1 else 2
        lam.append(s[b, a, b])
    rows = [[f.one if i == j else f.zero for j in range(n)] for i in range(n)]
    for a in range(1, n):
        rows[0][a] = f.neg(lam[a - 1])
    p = Matrix.from_rows(rows, f, coerce=False)       # columns: e_1, e_a - λ_a e_1
    maps = RestrictionMaps(p.T, p.T, invert(p))
    if apply(s, maps) == null_tensor(n, 3, f):
        return maps
    return None


# ------------------------------------------------------------------ degeneration

def null_degeneration_maps(n: int, field):
    """The diagonal Laurent maps A = B: e_1 ↦ ε^{-2} e_1, e_j ↦ ε e_j; C: e_1 ↦ ε^4 e_1, e_j ↦ ε e_j."""
    ab = LaurentMatrix.diagonal([-2] + [1] * (n - 1), field)
    c = LaurentMatrix.diagonal([4] + [1] * (n - 1), field)
    return ab, ab, c


def degenerate_to_null(form: AlgebraForm) -> DegenerationCertificate:
    """Certificate source ⊵ N^(3)_n composed from the base change and the diagonal maps."""
    f = form.form.field
    n = form.n
    a, b, c = null_degeneration_maps(n, f)
    g1, g2, g3 = form.base_change
    return DegenerationCertificate(a @ g1, b @ g2, c @ g3, null_tensor(n, 3, f), 6,
                                   label=f"degeneration to N^(3)_{n}")


def degenerate_tensor_to_N(t: Tensor3, k: int, rng_seed: int = 0, q=None,
                           size: int = 3) -> DegenerationCertificate:
    """Certificate t ⊵ N^(k) via generic restriction to 3×3×3, normalization and scaling."""
    i, j = other_directions(k)
    if q is None:
        q = slice_ranks(t, derive_seed(rng_seed, "deg-q"))
    if q[i - 1] < size or q[j - 1] < size:
        raise PreconditionFailed(f"q_{i} = {q[i - 1]}, q_{j} = {q[j - 1]}; both must be >= {size}")
    s, rmaps, _ = generic_restrict(t, (size,) * 3, derive_seed(rng_seed, "deg-restrict"), q_source=q)
    perm = (i, j, k)                   # moves direction k to the third factor
    s_perm = permute_factors(s, perm)
    form = blaser_lysikov_normalize(s_perm, derive_seed(rng_seed, "deg-normalize"))
    cert = degenerate_to_null(form)
    # maps for s_perm factor a act on s factor perm[a]; undo the permutation
    inv = inverse_permutation(perm)
    laurent = (cert.a, cert.b, cert.c)
    per_factor = [laurent[inv[x] - 1] for x in range(3)]
    composed = [lm @ r for lm, r in zip(per_factor, rmaps)]
    target = null_tensor(size, k, t.field)
    return DegenerationCertificate(*composed, target, cert.max_error_order,
                                   label=f"degeneration to N^({k})")


# ------------------------------------------------------------------ verification

def verify_certificate(source: Tensor3, cert) -> Verification:
    """Re-apply a certificate exactly and check its defining identity."""
    if isinstance(cert, DegenerationCertificate):
        fld = cert.target.field
    else:
        fld = cert.target.field
    try:
        src = source.lift(fld)
    except Exception as exc:  # noqa: BLE001 - reported, not raised
        return Verification(False, f"field mismatch: {exc}")
    try:
        if isinstance(cert, RestrictionCertificate):
            image = apply(src, cert.maps)
            if image.dims != cert.target.dims:
                return Verification(False, f"dims mismatch: {image.dims} vs {cert.target.dims}")
            if image != cert.target:
                return Verification(False, "restriction image differs from target")
            return Verification(True, "restriction identity holds")
        if isinstance(cert, DegenerationCertificate):
            expansion = apply_laurent(src, cert.a, cert.b, cert.c)
            if expansion and min(expansion) < 0:
                return Verification(False, f"negative epsilon exponent {min(expansion)}")
            lead = expansion.get(0, Tensor3.zeros((cert.a.rows, cert.b.rows, cert.c.rows), fld))
            if lead != cert.target:
                return Verification(False, "epsilon^0 mismatch")
            if expansion and max(expansion) > cert.max_error_order:
                return Verification(False, f"exponent {max(expansion)} exceeds declared order "
                                           f"{cert.max_error_order}")
            return Verification(True, "degeneration identity holds")
    except (ShapeMismatch, Singular) as exc:
        return Verification(False, f"shape mismatch: {exc}")
    return Verification(False, f"unknown certificate type {type(cert).__name__}")
