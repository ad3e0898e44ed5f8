"""Exact coefficient fields: GF(p), GF(p^k) and the rationals.

Field elements are plain Python objects (``int`` for finite fields,
``fractions.Fraction`` for the rationals); the field object carries the
arithmetic.  Elements of GF(p^k) are encoded as integers
``c_0 + c_1 p + ... + c_{k-1} p^{k-1}`` for the residue class of
``c_0 + c_1 x + ... + c_{k-1} x^{k-1}`` modulo a fixed primitive
polynomial, so GF(p) sits inside GF(p^k) as the integers ``0..p-1``.
"""

from __future__ import annotations

import hashlib
import math
import random
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

from sympy import isprime
from sympy.ntheory.residue_ntheory import sqrt_mod

from .errors import FieldError, ParseError

#: minimum field size at which random sampling is considered reliable
GENERIC_FIELD_SIZE = 101

RNG_ALGORITHM = "MT19937 (Python random.Random), subseeds via BLAKE2b-64"

_INT_RE = re.compile(r"^\s*([+-]?\d+)\s*(?:/\s*([+-]?\d+)\s*)?$")


def derive_seed(seed: int, *labels) -> int:
    """Deterministically derive a 64-bit subseed from ``seed`` and labels."""
    h = hashlib.blake2b(digest_size=8)
    h.update(str(int(seed)).encode())
    for label in labels:
        h.update(b"\x1f")
        h.update(str(label).encode())
    return int.from_bytes(h.digest(), "little")


def make_rng(seed: int, *labels) -> random.Random:
    return random.Random(derive_seed(seed, *labels) if labels else seed)


def _parse_fraction(text: str) -> Fraction:
    m = _INT_RE.match(str(text))
    if not m:
        raise ParseError(f"malformed field value {text!r}")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"zero denominator in {text!r}")
    return Fraction(num, den)


class _FieldBase:
    zero = 0
    one = 1

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def is_zero(self, a) -> bool:
        return a == self.zero

    def random_nonzero(self, rng: random.Random):
        while True:
            a = self.random(rng)
            if a != self.zero:
                return a

    def power(self, a, e: int):
        if e < 0:
            a, e = self.inv(a), -e
        result = self.one
        while e:
            if e & 1:
                result = self.mul(result, a)
            a = self.mul(a, a)
            e >>= 1
        return result

    @property
    def is_finite(self) -> bool:
        return self.size is not None


@dataclass(frozen=True)
class Rationals(_FieldBase):
    """The field Q with exact ``Fraction`` arithmetic."""

    #: half-width of the integer box used for random sampling
    sample_bound: int = 2**20

    zero = Fraction(0)
    one = Fraction(1)
    size = None
    characteristic = 0
    degree = 1

    @property
    def name(self) -> str:
        return "Qq"

    def __repr__(self):
        return "Rationals()"

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        return 1 / Fraction(a)

    def div(self, a, b):
        return Fraction(a) / b

    def coerce(self, x):
        return Fraction(x)

    def random(self, rng):
        return Fraction(rng.randint(-self.sample_bound, self.sample_bound))

    def parse(self, text):
        return _parse_fraction(text)

    def format(self, a) -> str:
        a = Fraction(a)
        return str(a.numerator) if a.denominator == 1 else f"{a.numerator}/{a.denominator}"

    def sqrt(self, a):
        a = Fraction(a)
        if a < 0:
            return None
        n, d = math.isqrt(a.numerator), math.isqrt(a.denominator)
        if n * n == a.numerator and d * d == a.denominator:
            return Fraction(n, d)
        return None


@dataclass(frozen=True)
class PrimeField(_FieldBase):
    """GF(p) with elements ``0..p-1``."""

    p: int

    def __post_init__(self):
        if not isinstance(self.p, int) or self.p < 2 or self.p >= 2**64 or not isprime(self.p):
            raise FieldError(f"GF(p) requires a prime p < 2^64, got {self.p!r}")

    degree = 1

    @property
    def size(self) -> int:
        return self.p

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def name(self) -> str:
        return f"GF({self.p})"

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        if a % self.p == 0:
            raise ZeroDivisionError("inverse of zero")
        return pow(a, -1, self.p)

    def coerce(self, x):
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise FieldError(f"{x} is not defined in {self.name}")
            return x.numerator * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def random(self, rng):
        return rng.randrange(self.p)

    def parse(self, text):
        try:
            return self.coerce(_parse_fraction(text))
        except FieldError as exc:
            raise ParseError(str(exc)) from None

    def format(self, a) -> str:
        return str(a)

    def elements(self):
        return range(self.p)

    def sqrt(self, a):
        if a == 0:
            return 0
        if self.p == 2:
            return a
        return sqrt_mod(a, self.p)


@lru_cache(maxsize=None)
def _extension_tables(p: int, k: int):
    """Find the first primitive monic polynomial of degree k and build exp/log tables."""
    q = p**k
    for tail in product(range(p), repeat=k):
        # tail = (c_0, ..., c_{k-1}) of x^k + c_{k-1} x^{k-1} + ... + c_0
        if tail[0] == 0:
            continue
        exp = [0] * (q - 1)
        cur = [1] + [0] * (k - 1)
        ok = True
        for e in range(q - 1):
            code = sum(c * p**i for i, c in enumerate(cur))
            if e > 0 and code == 1:
                ok = False
                break
            exp[e] = code
            # multiply by x modulo the polynomial
            top = cur[-1]
            cur = [0] + cur[:-1]
            cur = [(cur[i] - top * tail[i]) % p for i in range(k)]
        if ok and sum(c * p**i for i, c in enumerate(cur)) == 1:
            log = [0] * q
            for e, code in enumerate(exp):
                log[code] = e
            modulus = tuple(tail) + (1,)
            return modulus, tuple(exp), tuple(log)
    raise FieldError(f"no primitive polynomial found for GF({p}^{k})")


@dataclass(frozen=True)
class ExtensionField(_FieldBase):
    """GF(p^k) as GF(p)[x]/(f) for the lexicographically first primitive monic f."""

    p: int
    k: int

    def __post_init__(self):
        if not isprime(self.p) or self.k < 1 or self.p**self.k > 10**6:
            raise FieldError(f"unsupported extension GF({self.p}^{self.k})")

    @property
    def size(self) -> int:
        return self.p**self.k

    @property
    def characteristic(self) -> int:
        return self.p

    @property
    def degree(self) -> int:
        return self.k

    @property
    def name(self) -> str:
        return f"GF({self.p}^{self.k})"

    @property
    def modulus(self) -> tuple:
        """Coefficients (low to high) of the defining primitive polynomial."""
        return _extension_tables(self.p, self.k)[0]

    def _digits(self, a):
        out = []
        for _ in range(self.k):
            a, r = divmod(a, self.p)
            out.append(r)
        return out

    def _undigits(self, ds):
        code = 0
        for d in reversed(ds):
            code = code * self.p + d
        return code

    def add(self, a, b):
        p = self.p
        if self.k == 1:
            return (a + b) % p
        code, scale = 0, 1
        while a or b:
            a, ra = divmod(a, p)
            b, rb = divmod(b, p)
            code += ((ra + rb) % p) * scale
            scale *= p
        return code

    def neg(self, a):
        p = self.p
        code, scale = 0, 1
        while a:
            a, r = divmod(a, p)
            code += ((-r) % p) * scale
            scale *= p
        return code

    def mul(self, a, b):
        if a == 0 or b == 0:
            return 0
        _, exp, log = _extension_tables(self.p, self.k)
        return exp[(log[a] + log[b]) % (self.size - 1)]

    def inv(self, a):
        if a == 0:
            raise ZeroDivisionError("inverse of zero")
        _, exp, log = _extension_tables(self.p, self.k)
        return exp[(-log[a]) % (self.size - 1)]

    def coerce(self, x):
        return PrimeField(self.p).coerce(x)

    def random(self, rng):
        return rng.randrange(self.size)

    def parse(self, text):
        m = _INT_RE.match(str(text))
        if not m or m.group(2) is not None:
            raise ParseError(f"GF(p^k) values are integer codes, got {text!r}")
        code = int(m.group(1))
        if not 0 <= code < self.size:
            raise ParseError(f"code {code} out of range for {self.name}")
        return code

    def format(self, a) -> str:
        return str(a)

    def elements(self):
        return range(self.size)

    def sqrt(self, a):
        if a == 0:
            return 0
        _, exp, log = _extension_tables(self.p, self.k)
        e, n = log[a], self.size - 1
        if self.p == 2:
            return exp[(e * pow(2, -1, n)) % n] if n > 1 else a
        if e % 2:
            return None
        return exp[e // 2]

    def primitive_element(self):
        return _extension_tables(self.p, self.k)[1][1] if self.size > 2 else 1


Field = "Rationals | PrimeField | ExtensionField"


def field_from_name(name: str):
    """Parse ``Qq``, ``GF(p)`` or ``GF(p^k)``."""
    text = name.strip()
    if text in ("Qq", "QQ", "Q"):
        return Rationals()
    m = re.fullmatch(r"GF\(\s*(\d+)\s*(?:\^\s*(\d+)\s*)?\)", text)
    if not m:
        raise ParseError(f"unknown field {name!r}")
    p = int(m.group(1))
    k = int(m.group(2)) if m.group(2) else 1
    try:
        return PrimeField(p) if k == 1 else ExtensionField(p, k)
    except FieldError as exc:
        raise ParseError(str(exc)) from exc


def lifted_field(field, min_size: int = GENERIC_FIELD_SIZE):
    """Smallest extension of ``field`` with at least ``min_size`` elements.

    Infinite fields and large finite fields are returned unchanged.
    """
    if not field.is_finite or field.size >= min_size:
        return field
    p, d = field.characteristic, field.degree
    k = d
    while p**k < min_size:
        k += d
    return ExtensionField(p, k)


@lru_cache(maxsize=None)
def _extension_embedding(src: ExtensionField, dst: ExtensionField):
    # image of x: a root of src's modulus in dst, found by enumeration
    mod = src.modulus
    for rho in dst.elements():
        acc = 0
        for c in reversed(mod):
            acc = dst.add(dst.mul(acc, rho), c)
        if acc == 0:
            powers = [dst.one]
            for _ in range(src.k - 1):
                powers.append(dst.mul(powers[-1], rho))
            table = []
            for code in src.elements():
                val = 0
                for c, pw in zip(src._digits(code), powers):
                    val = dst.add(val, dst.mul(c, pw))
                table.append(val)
            return tuple(table)
    raise FieldError(f"{src.name} does not embed in {dst.name}")


def embedding(src, dst):
    """Return a function mapping elements of ``src`` into ``dst``."""
    if src == dst:
        return lambda a: a
    if isinstance(src, PrimeField) and dst.is_finite and dst.characteristic == src.p:
        return lambda a: a
    if isinstance(src, ExtensionField) and isinstance(dst, ExtensionField) and src.p == dst.p:
        if dst.k % src.k:
            raise FieldError(f"{src.name} does not embed in {dst.name}")
        table = _extension_embedding(src, dst)
        return table.__getitem__
    raise FieldError(f"no embedding of {src.name} into {dst.name}")
