"""Named tensors: I, W, D, the null-algebra tensors N^(k)_n, diagonal tensors."""

from __future__ import annotations

import re
from itertools import permutations

from .fields import PrimeField
from .tensor import Tensor3, permute_factors

DEFAULT_FIELD = PrimeField(101)

# result factor a is factor perm[a] of N^(3)_n
_NULL_PERMS = {1: (3, 1, 2), 2: (2, 3, 1), 3: (1, 2, 3)}


def diag(r: int, field=DEFAULT_FIELD) -> Tensor3:
    """The unit tensor <r> = sum_i e_i ⊗ e_i ⊗ e_i."""
    return Tensor3.from_dict((r, r, r), {(i, i, i): 1 for i in range(r)}, field, coerce=True)


def tensor_I(field=DEFAULT_FIELD) -> Tensor3:
    return diag(2, field)


def tensor_W(field=DEFAULT_FIELD) -> Tensor3:
    return Tensor3.from_dict((2, 2, 2), {(0, 0, 1): 1, (0, 1, 0): 1, (1, 0, 0): 1}, field,
                             coerce=True)


def _perm_sign(p):
    sign = 1
    p = list(p)
    for i in range(len(p)):
        for j in range(i + 1, len(p)):
            if p[i] > p[j]:
                sign = -sign
    return sign


def tensor_D(field=DEFAULT_FIELD) -> Tensor3:
    """e1 ∧ e2 ∧ e3: the determinant trilinear form on K^3."""
    vals = {p: _perm_sign(p) for p in permutations(range(3))}
    return Tensor3.from_dict((3, 3, 3), vals, field, coerce=True)


def null_tensor(n: int = 3, direction: int = 3, field=DEFAULT_FIELD) -> Tensor3:
    """N^(k)_n: multiplication tensor of K[x_1..x_{n-1}]/m^2, output in factor k."""
    vals = {(0, 0, 0): 1}
    for i in range(1, n):
        vals[(0, i, i)] = 1
        vals[(i, 0, i)] = 1
    n3 = Tensor3.from_dict((n, n, n), vals, field, coerce=True)
    return permute_factors(n3, _NULL_PERMS[direction])


def truncated_polynomial_algebra(n: int = 3, field=DEFAULT_FIELD) -> Tensor3:
    """Multiplication tensor of K[x]/(x^n) in the basis 1, x, ..., x^{n-1}."""
    vals = {(a, b, a + b): 1 for a in range(n) for b in range(n) if a + b < n}
    return Tensor3.from_dict((n, n, n), vals, field, coerce=True)


def rank_one(u, v, w, field=DEFAULT_FIELD) -> Tensor3:
    vals = {}
    for i, a in enumerate(u):
        for j, b in enumerate(v):
            for k, c in enumerate(w):
                if a * b * c:
                    vals[(i, j, k)] = a * b * c
    return Tensor3.from_dict((len(u), len(v), len(w)), vals, field, coerce=True)


def zero_pad(t: Tensor3, dims) -> Tensor3:
    """Embed t in a larger format by zero padding."""
    return Tensor3.from_dict(dims, t.nonzero(), t.field)


CORPUS_NAMES = ("I", "W", "D", "N1", "N2", "N3", "Diag(r)", "N1(n)", "N2(n)", "N3(n)")


def named(name: str, field=DEFAULT_FIELD) -> Tensor3:
    """Look up a named tensor: I, W, D, N1, N2, N3, Nk(n) / Nk_n, Diag(r) / Diag_r."""
    key = name.strip()
    if key == "I":
        return tensor_I(field)
    if key == "W":
        return tensor_W(field)
    if key == "D":
        return tensor_D(field)
    m = re.fullmatch(r"N([123])(?:[(_](\d+)\)?)?", key)
    if m:
        n = int(m.group(2)) if m.group(2) else 3
        return null_tensor(n, int(m.group(1)), field)
    m = re.fullmatch(r"Diag[(_](\d+)\)?", key)
    if m:
        return diag(int(m.group(1)), field)
    raise KeyError(f"unknown tensor name {name!r}; known: {', '.join(CORPUS_NAMES)}")
