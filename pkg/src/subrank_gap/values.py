"""Gap constants, tight supports and the max-min marginal entropy of a support."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .errors import BracketingFailure, DomainError, NotTight, SearchExhausted
from .fields import Rationals, make_rng
from .linalg import Matrix, nullspace

RESTARTS = 10
GRID_LIMIT = 6


# ------------------------------------------------------------------ entropy and constants

def _to_mpf(x):
    if isinstance(x, Fraction):
        return mpmath.mpf(x.numerator) / x.denominator
    return mpmath.mpf(x)


def binary_entropy(x):
    """h(x) = -x log2 x - (1-x) log2(1-x), in the current mpmath precision."""
    v = _to_mpf(x)
    if v < 0 or v > 1:
        raise DomainError(f"binary entropy is defined on [0, 1], got {x}")
    if v == 0 or v == 1:
        return mpmath.mpf(0)
    return -(v * mpmath.log(v, 2) + (1 - v) * mpmath.log(1 - v, 2))


def tau_equation(t):
    """g(t) = h(2t) - h(t) + t; its root in (0, 1/2) defines tau."""
    return binary_entropy(2 * t) - binary_entropy(t) + t


@dataclass(frozen=True)
class GapConstants:
    c1: mpmath.mpf
    c2: mpmath.mpf
    tau: mpmath.mpf
    digits: int
    residual: mpmath.mpf

    h = staticmethod(binary_entropy)

    def formatted(self, name: str) -> str:
        return mpmath.nstr(getattr(self, name), self.digits, strip_zeros=False)


@lru_cache(maxsize=None)
def compute_constants(precision_digits: int = 30) -> GapConstants:
    """c1 = 2^h(1/3) and c2 = 2^(tau + h(tau)), tau found by bisection."""
    if precision_digits < 10:
        raise DomainError("precision must be at least 10 digits")
    with mpmath.workdps(precision_digits + 15):
        lo, hi = mpmath.mpf(10) ** -6, mpmath.mpf(1) / 2 - mpmath.mpf(10) ** -6
        g_lo, g_hi = tau_equation(lo), tau_equation(hi)
        if not (g_lo > 0 > g_hi):
            raise BracketingFailure(f"no sign change: g(lo) = {g_lo}, g(hi) = {g_hi}")
        # one sign change on a sample grid, so the bracket isolates a single root
        samples = [tau_equation(lo + (hi - lo) * i / 64) for i in range(65)]
        changes = sum(1 for a, b in zip(samples, samples[1:]) if (a > 0) != (b > 0))
        if changes != 1:
            raise BracketingFailure(f"g changes sign {changes} times on the bracket")
        tol = mpmath.mpf(10) ** -(precision_digits + 8)
        while hi - lo > tol:
            mid = (lo + hi) / 2
            if tau_equation(mid) > 0:
                lo = mid
            else:
                hi = mid
        tau = (lo + hi) / 2
        residual = abs(tau_equation(tau))
        if residual >= mpmath.mpf(10) ** -(precision_digits - 2):
            raise BracketingFailure(f"residual {residual} too large")
        c1 = mpmath.power(2, binary_entropy(Fraction(1, 3)))
        c2 = mpmath.power(2, tau + binary_entropy(tau))
    with mpmath.workdps(precision_digits):
        return GapConstants(+c1, +c2, +tau, precision_digits, residual)


# ------------------------------------------------------------------ supports and tightness

@dataclass(frozen=True)
class Support:
    """Set of index triples (0-based)."""

    points: frozenset

    def __post_init__(self):
        if not self.points:
            raise DomainError("support must be nonempty")
        for p in self.points:
            if len(p) != 3 or any(int(x) != x or x < 0 for x in p):
                raise DomainError(f"bad support point {p}")

    @classmethod
    def of(cls, points) -> "Support":
        return cls(frozenset(tuple(int(x) for x in p) for p in points))

    def used(self, factor: int):
        return sorted({p[factor] for p in self.points})

    @property
    def dims(self):
        return tuple(max(p[i] for p in self.points) + 1 for i in range(3))

    def permuted(self, perm) -> "Support":
        """Factor a of the result is factor perm[a] (1-based) of self."""
        return Support.of(tuple(p[q - 1] for q in perm) for p in self.points)


def support_of(t) -> Support:
    return Support.of(t.nonzero().keys())


@dataclass(frozen=True)
class Tightness:
    tight: bool
    witness: tuple | None      # one dict {index: label} per factor
    reason: str


def _integer_vector(vec):
    den = math.lcm(*(x.denominator for x in vec))
    ints = [int(x * den) for x in vec]
    g = math.gcd(*ints)
    return [x // g for x in ints] if g else ints


def is_tight(s: Support, window: int | None = None, max_combinations: int = 200_000) -> Tightness:
    """Search injective integer labelings α_i with α_1(a) + α_2(b) + α_3(c) = 0 on s.

    Raises SearchExhausted when no labeling is found inside the window although
    none is ruled out; returns ``tight=False`` only with a proof.
    """
    used = [s.used(i) for i in range(3)]
    offsets, pos = [], 0
    for u in used:
        offsets.append({x: pos + j for j, x in enumerate(u)})
        pos += len(u)
    nvars = pos
    q = Rationals()
    rows = []
    for p in sorted(s.points):
        row = [Fraction(0)] * nvars
        for i in range(3):
            row[offsets[i][p[i]]] += 1
        rows.append(row)
    kernel = [_integer_vector(v) for v in nullspace(Matrix.from_rows(rows, q))]
    pairs = [(offsets[i][a], offsets[i][b]) for i in range(3)
             for a, b in itertools.combinations(used[i], 2)]
    for x, y in pairs:
        if all(v[x] == v[y] for v in kernel):
            return Tightness(False, None, "a pair of indices gets equal labels in every solution")
    if window is None:
        window = 3 * sum(s.dims)
    basis = np.array(kernel, dtype=np.int64).reshape(len(kernel), nvars)
    count = 0
    for bound in range(1, window + 1):
        for coeffs in itertools.product(range(-bound, bound + 1), repeat=len(kernel)):
            if max(abs(c) for c in coeffs) != bound:
                continue
            count += 1
            if count > max_combinations:
                raise SearchExhausted("not tight within window (combination budget reached)")
            vals = np.asarray(coeffs, dtype=np.int64) @ basis
            if np.abs(vals).max() > window:
                continue
            if all(vals[x] != vals[y] for x, y in pairs):
                witness = tuple({a: int(vals[offsets[i][a]]) for a in used[i]} for i in range(3))
                return Tightness(True, witness, "injective labeling found")
    raise SearchExhausted(f"not tight within window [-{window}, {window}]")


# ------------------------------------------------------------------ max-min marginal entropy

def _incidence(s: Support):
    pts = sorted(s.points)
    mats = []
    for i in range(3):
        used = s.used(i)
        idx = {x: j for j, x in enumerate(used)}
        m = np.zeros((len(used), len(pts)))
        for col, p in enumerate(pts):
            m[idx[p[i]], col] = 1.0
        mats.append(m)
    return mats


def _entropies(mats, p):
    out = []
    for m in mats:
        marg = m @ p
        marg = marg[marg > 0]
        out.append(float(-(marg * np.log2(marg)).sum()))
    return np.array(out)


def _objective(mats, p):
    return float(_entropies(mats, p).min())


def _project_simplex(v):
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1
    k = np.nonzero(u * np.arange(1, len(v) + 1) > css)[0][-1]
    theta = css[k] / (k + 1)
    return np.maximum(v - theta, 0)


def _supergradient_ascent(mats, p, steps=400):
    best_p, best = p, _objective(mats, p)
    for t in range(steps):
        ent = _entropies(mats, p)
        active = np.nonzero(ent <= ent.min() + 1e-12)[0]
        g = np.zeros_like(p)
        for i in active:
            marg = np.maximum(mats[i] @ p, 1e-300)
            g -= mats[i].T @ (np.log2(marg) + 1 / math.log(2))
        g /= len(active)
        g -= g.mean()
        norm = np.linalg.norm(g)
        if norm == 0:
            break
        p = _project_simplex(p + (0.5 / math.sqrt(t + 1)) * g / norm)
        val = _objective(mats, p)
        if val > best:
            best_p, best = p, val
    return best_p, best


def _polish(mats, p):
    """Epigraph form: maximize t subject to H_i(P_i) >= t on the simplex."""
    from scipy.optimize import minimize

    n = len(p)

    def ent(i, x):
        marg = np.clip(mats[i] @ x[:n], 1e-15, None)
        return -(marg * np.log2(marg)).sum()

    cons = [{"type": "eq", "fun": lambda x: x[:n].sum() - 1}]
    cons += [{"type": "ineq", "fun": (lambda x, i=i: ent(i, x) - x[n])} for i in range(3)]
    x0 = np.append(p, _objective(mats, p))
    with warnings.catch_warnings():
        # SLSQP steps slightly outside the box and clips back; harmless here
        warnings.filterwarnings("ignore", "Values in x were outside bounds", RuntimeWarning)
        res = minimize(lambda x: -x[n], x0, method="SLSQP", constraints=cons,
                       bounds=[(0, 1)] * n + [(None, None)],
                       options={"ftol": 1e-14, "maxiter": 500})
    q = _project_simplex(np.clip(res.x[:n], 0, None))
    return q, _objective(mats, q)


@dataclass(frozen=True)
class SupportValue:
    value: float          # 2^(max min_i H(P_i))
    log2_value: float
    distribution: tuple   # over sorted(support.points)
    tight: bool | None
    label: str            # "value" or "upper bound"


def max_min_entropy(s: Support, rng_seed: int = 0):
    """(max over P on s of min_i H(P_i), maximizing P) by ascent with restarts plus polish."""
    mats = _incidence(s)
    n = len(s.points)
    rng = make_rng(rng_seed, "support-value")
    starts = [np.full(n, 1.0 / n)]
    for _ in range(RESTARTS):
        w = np.array([rng.expovariate(1.0) for _ in range(n)])
        starts.append(w / w.sum())
    best_p, best = starts[0], _objective(mats, starts[0])
    for p0 in starts:
        p, val = _supergradient_ascent(mats, p0)
        if n > 1:
            q, pval = _polish(mats, p)
            if pval > val:
                p, val = q, pval
        if val > best:
            best_p, best = p, val
    return best, best_p


def tight_support_value(s: Support, strict: bool = False, rng_seed: int = 0) -> SupportValue:
    """2 to the max over distributions on s of the least marginal entropy."""
    try:
        tight = is_tight(s).tight
    except SearchExhausted:
        tight = None
    if strict and not tight:
        raise NotTight("support is not known to be tight")
    best, p = max_min_entropy(s, rng_seed)
    return SupportValue(2.0 ** best, best, tuple(float(x) for x in p), tight,
                        "value" if tight else "upper bound")


# ------------------------------------------------------------------ grid cross-check

def _compositions(total, parts):
    for cut in itertools.combinations(range(total + parts - 1), parts - 1):
        prev, out = -1, []
        for c in cut:
            out.append(c - prev - 1)
            prev = c
        out.append(total + parts - 2 - prev)
        yield out


def grid_max_min_entropy(s: Support, resolution: int = 30, radius: int = 3, levels: int = 40):
    """Dense simplex grid followed by shrinking box grids around the best point."""
    if len(s.points) > GRID_LIMIT:
        raise DomainError(f"grid cross-check limited to supports of size <= {GRID_LIMIT}")
    mats = _incidence(s)
    n = len(s.points)
    if n == 1:
        return 0.0, np.ones(1)

    def batch_values(ps):
        vals = None
        for m in mats:
            marg = ps @ m.T
            with np.errstate(divide="ignore", invalid="ignore"):
                h = -np.where(marg > 0, marg * np.log2(marg), 0.0).sum(axis=1)
            vals = h if vals is None else np.minimum(vals, h)
        return vals

    grid = np.array(list(_compositions(resolution, n)), dtype=float) / resolution
    vals = batch_values(grid)
    best_p, best = grid[vals.argmax()], vals.max()
    offsets = np.array(list(itertools.product(range(-radius, radius + 1), repeat=n - 1)), float)
    offsets = np.hstack([offsets, -offsets.sum(axis=1, keepdims=True)])
    step, halvings = 1.0 / resolution, 0
    while halvings < levels:
        cand = best_p + step * offsets
        cand = cand[(cand >= 0).all(axis=1)]
        vals = batch_values(cand)
        if vals.max() > best + 1e-15:
            best_p, best = cand[vals.argmax()], vals.max()
        else:
            step /= 2
            halvings += 1
    return float(best), best_p
