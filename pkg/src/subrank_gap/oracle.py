"""Exhaustive ground truth at tiny scale: subrank, restriction and Kronecker squares.

All verdicts hold over the stated finite field only; over GF(2) a subrank is a
field-specific lower bound for the geometric value.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from .corpus import diag, tensor_W
from .errors import BudgetExceeded, FieldError, ShapeMismatch
from .fields import ExtensionField
from .linalg import Matrix, rank, solve
from .tensor import RestrictionMaps, Tensor3, apply, flattening, flattening_ranks, kronecker, mode_product

MAX_ORACLE_FIELD = 16


@dataclass(frozen=True)
class SearchBudget:
    max_maps: int = 5_000_000
    time_limit: float = 300.0

    def __post_init__(self):
        if self.max_maps <= 0 or self.time_limit <= 0:
            raise ValueError("budget limits must be positive")


class _Clock:
    def __init__(self, budget: SearchBudget):
        self.budget = budget
        self.start = time.monotonic()
        self.nodes = 0

    def tick(self, best=None, n=1):
        self.nodes += n
        if self.nodes > self.budget.max_maps:
            raise BudgetExceeded(f"more than {self.budget.max_maps} candidates", best)
        if self.nodes % 1024 == 0 and time.monotonic() - self.start > self.budget.time_limit:
            raise BudgetExceeded(f"time limit of {self.budget.time_limit}s reached", best)


class _Tables:
    """Addition and multiplication tables on element codes 0..q-1."""

    def __init__(self, field):
        if not field.is_finite or field.size > MAX_ORACLE_FIELD:
            raise FieldError(f"oracle needs a finite field with at most {MAX_ORACLE_FIELD} elements")
        q = field.size
        elems = list(field.elements())
        if elems != list(range(q)):
            raise FieldError("field elements must be coded 0..q-1")
        self.q = q
        self.add = np.array([[field.add(a, b) for b in elems] for a in elems], dtype=np.int64)
        self.mul = np.array([[field.mul(a, b) for b in elems] for a in elems], dtype=np.int64)

    def vectors(self, n, projective=False):
        vecs = np.array(list(itertools.product(range(self.q), repeat=n)), dtype=np.int64)
        if projective:
            nz = vecs != 0
            first = nz.argmax(axis=1)
            keep = nz.any(axis=1) & (vecs[np.arange(len(vecs)), first] == 1)
            vecs = vecs[keep]
        return vecs

    def evaluate(self, entries, u, v, w):
        """T(u, v, w) for batches of code vectors (leading axis broadcast)."""
        acc = np.zeros(np.broadcast_shapes(u.shape[:-1], v.shape[:-1], w.shape[:-1]), np.int64)
        for (i, j, k), c in entries:
            term = self.mul[self.mul[self.mul[c, u[..., i]], v[..., j]], w[..., k]]
            acc = self.add[acc, term]
        return acc


@dataclass(frozen=True)
class SubrankResult:
    value: int
    witness: RestrictionMaps | None
    field: object
    complete: bool = True


def _unit_triples(t: Tensor3, tables: _Tables, clock: _Clock):
    """All (u, v, w) with T(u, v, w) = 1, u and v normalized projectively."""
    n1, n2, n3 = t.dims
    us, vs, ws = tables.vectors(n1, True), tables.vectors(n2, True), tables.vectors(n3)
    clock.tick(0, len(us) * len(vs) * len(ws))
    entries = list(t.nonzero().items())
    out = []
    for u in us:
        vals = tables.evaluate(entries, u[None, None, :], vs[:, None, :], ws[None, :, :])
        for a, b in zip(*np.nonzero(vals == 1)):
            out.append((u, vs[a], ws[b]))
    return out


def brute_subrank(t: Tensor3, budget: SearchBudget = SearchBudget()) -> SubrankResult:
    """Largest r with t ≥ <r> over t's own finite field, by branch and bound."""
    f = t.field
    if t.is_zero():
        return SubrankResult(0, None, f)
    tables = _Tables(f)
    clock = _Clock(budget)
    cap = min(flattening_ranks(t))
    entries = list(t.nonzero().items())
    triples = _unit_triples(t, tables, clock)
    if not triples:
        return SubrankResult(0, None, f)
    U = np.array([x[0] for x in triples])
    V = np.array([x[1] for x in triples])
    W = np.array([x[2] for x in triples])
    best = [[]]

    def compatible(idx, chosen):
        """Candidates idx whose every mixed evaluation with the chosen triples vanishes."""
        if not chosen or len(idx) == 0:
            return idx
        u, v, w = (arr[idx][:, None, None, None, :] for arr in (U, V, W))
        old = (U[chosen][None, :, None, None, :], V[chosen][None, None, :, None, :],
               W[chosen][None, None, None, :, :])
        ok = np.ones(len(idx), dtype=bool)
        # the new triple fills a nonempty proper subset of the three positions
        for mask in itertools.product((0, 1), repeat=3):
            if all(mask) or not any(mask):
                continue
            args = [new if m else o for m, new, o in zip(mask, (u, v, w), old)]
            vals = tables.evaluate(entries, *args)
            ok &= (vals.reshape(len(idx), -1) == 0).all(axis=1)
        return idx[ok]

    def search(chosen, cands):
        clock.tick(len(best[0]))
        if len(chosen) > len(best[0]):
            best[0] = list(chosen)
        if len(best[0]) >= cap or len(chosen) + len(cands) <= len(best[0]):
            return
        for pos, c in enumerate(cands):
            if len(chosen) + len(cands) - pos <= len(best[0]):
                return
            rest = compatible(cands[pos + 1:], chosen + [c])
            search(chosen + [c], rest)
            if len(best[0]) >= cap:
                return

    try:
        search([], np.arange(len(triples)))
    except BudgetExceeded as exc:
        raise BudgetExceeded(str(exc), len(best[0])) from None
    chosen = best[0]
    maps = RestrictionMaps(*(Matrix.from_rows([[int(x) for x in arr[c]] for c in chosen], f,
                                              coerce=False) for arr in (U, V, W)))
    return SubrankResult(len(chosen), maps, f)


def _full_rank_matrices(rows, cols, field, min_rank, clock):
    out = []
    for flat in itertools.product(list(field.elements()), repeat=rows * cols):
        clock.tick()
        m = Matrix.from_rows([flat[r * cols:(r + 1) * cols] for r in range(rows)], field,
                             coerce=False)
        if rank(m) >= min_rank:
            out.append(m)
    return out


def brute_restricts_to(t: Tensor3, s: Tensor3, budget: SearchBudget = SearchBudget()):
    """Decide t ≥ s over their common finite field; returns (verdict, maps or None).

    The first two maps are enumerated (pruned by the rank each must have), the
    third is solved for linearly.
    """
    if t.field != s.field:
        raise FieldError("restriction test needs a common field")
    f = t.field
    if not f.is_finite or f.size > MAX_ORACLE_FIELD:
        raise FieldError(f"oracle needs a finite field with at most {MAX_ORACLE_FIELD} elements")
    clock = _Clock(budget)
    if s.is_zero():
        return True, RestrictionMaps(*(Matrix.zeros(m, n, f) for m, n in zip(s.dims, t.dims)))
    rs, rt = flattening_ranks(s), flattening_ranks(t)
    if any(a > b for a, b in zip(rs, rt)):
        return False, None
    (m1, m2, m3), (n1, n2, n3) = s.dims, t.dims
    guard = f.size ** (m1 * n1) + f.size ** (m2 * n2)
    if guard > budget.max_maps:
        raise BudgetExceeded(f"map enumeration of size {guard} exceeds the budget")
    a1s = _full_rank_matrices(m1, n1, f, rs[0], clock)
    a2s = _full_rank_matrices(m2, n2, f, rs[1], clock)
    targets = [[s[a, b, c] for a in range(m1) for b in range(m2)] for c in range(m3)]
    for a1 in a1s:
        t1 = mode_product(t, a1, 1)
        for a2 in a2s:
            clock.tick()
            flat = flattening(mode_product(t1, a2, 2), 3).T      # (m1 m2) × n3
            rows = []
            for target in targets:
                x = solve(flat, target)
                if x is None:
                    break
                rows.append(x)
            else:
                maps = RestrictionMaps(a1, a2, Matrix.from_rows(rows, f, coerce=False))
                if apply(t, maps) == s:
                    return True, maps
    return False, None


@dataclass(frozen=True)
class PowerResult:
    n: int
    subrank: int
    lower_bound: float      # subrank ** (1/n), a lower bound for the asymptotic subrank
    field: object


def kronecker_power_subrank(t: Tensor3, n: int, budget: SearchBudget = SearchBudget()) -> PowerResult:
    """Subrank of the n-th Kronecker power (n = 1 or 2) by exhaustive search."""
    if n not in (1, 2):
        raise ShapeMismatch("only n = 1 and n = 2 are supported")
    power = t if n == 1 else kronecker(t, t)
    res = brute_subrank(power, budget)
    return PowerResult(n, res.value, res.value ** (1.0 / n), t.field)


def brute_bucket(t: Tensor3, budget: SearchBudget = SearchBudget()) -> str:
    """Bucket of a 2×2×2 tensor over GF(2) from exhaustive tests over GF(4).

    "One" for a rank-one flattening, "Two" when the subrank over GF(4) is two,
    "C1" when t and W restrict to each other, else "undetermined".
    """
    if t.dims != (2, 2, 2):
        raise ShapeMismatch("brute_bucket expects a 2x2x2 tensor")
    if min(flattening_ranks(t)) <= 1:
        return "One"
    big = ExtensionField(t.field.characteristic, 2 * t.field.degree)
    if brute_subrank(t.lift(big), budget).value >= 2:
        return "Two"
    w = tensor_W(t.field)
    if brute_restricts_to(t, w, budget)[0] and brute_restricts_to(w, t, budget)[0]:
        return "C1"
    return "undetermined"


def diagonal_target(r: int, field) -> Tensor3:
    return diag(r, field)
