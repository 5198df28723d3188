"""Exact scalar fields: rationals, prime fields and single quadratic extensions."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

from sympy import isprime, legendre_symbol, nextprime
from sympy.ntheory import sqrt_mod
from sympy.ntheory.factor_ import core

from .errors import DenominatorDivisibleByPrime, InvalidField, MixedExtension

MIN_PRIME = 10**9
# Residues must stay below 2**31 so that products fit in int64.
MAX_PRIME = 2**31 - 1


class QSqrt:
    """An element a + b*sqrt(d) of Q(sqrt d) with rational a, b and square-free d."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = int(d)

    @staticmethod
    def make(a, b, d: int):
        """Build a + b*sqrt(d), collapsing to a rational when b == 0."""
        if b == 0:
            return _rat(a)
        return QSqrt(a, b, d)

    def _coerce(self, other):
        if isinstance(other, QSqrt):
            if other.d != self.d:
                raise MixedExtension(f"cannot combine sqrt({self.d}) with sqrt({other.d})")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QSqrt.make(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QSqrt(-self.a, -self.b, self.d)

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QSqrt.make(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        return QSqrt.make(c[0] - self.a, c[1] - self.b, self.d)

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return NotImplemented
        a, b = c
        return QSqrt.make(self.a * a + self.b * b * self.d, self.a * b + self.b * a, self.d)

    __rmul__ = __mul__

    def conjugate(self) -> QSqrt:
        return QSqrt(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("division by zero in Q(sqrt d)")
        return QSqrt.make(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        if isinstance(other, QSqrt):
            self._coerce(other)
            return self * other.inverse()
        if isinstance(other, (int, Fraction)):
            return QSqrt.make(self.a / other, self.b / other, self.d)
        return NotImplemented

    def __rtruediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.inverse() * other
        return NotImplemented

    def __pow__(self, k: int):
        out = Fraction(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, QSqrt):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return self.b == 0 and self.a == other
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __bool__(self):
        return bool(self.a) or bool(self.b)

    def sign(self) -> int:
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        lhs, rhs = self.a * self.a, self.b * self.b * self.d
        return sa if lhs > rhs else sb

    def __lt__(self, other):
        return sign(self - other) < 0

    def __gt__(self, other):
        return sign(self - other) > 0

    def __float__(self):
        return float(self.a) + float(self.b) * self.d**0.5

    def __repr__(self):
        return f"QSqrt({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return format_scalar(self)


def _rat(x):
    """Normalise a rational to int when integral, else Fraction."""
    if isinstance(x, int):
        return x
    x = Fraction(x)
    return x.numerator if x.denominator == 1 else x


def sign(x) -> int:
    if isinstance(x, QSqrt):
        return x.sign()
    return (x > 0) - (x < 0)


def is_rational(x) -> bool:
    return isinstance(x, (int, Fraction)) or (isinstance(x, Rational))


@dataclass(frozen=True)
class FieldSpec:
    """Which exact field a computation runs over."""

    kind: str  # "QQ", "GF" or "QQ_SQRT"
    p: int | None = None
    d: int | None = None

    def __post_init__(self):
        if self.kind == "GF":
            if self.p is None or not isprime(self.p) or not MIN_PRIME < self.p <= MAX_PRIME:
                raise InvalidField(f"prime field needs a prime in ({MIN_PRIME}, {MAX_PRIME}], got {self.p}")
        elif self.kind == "QQ_SQRT":
            if self.d is None or self.d in (0, 1) or core(abs(self.d)) != abs(self.d):
                raise InvalidField(f"extension needs a square-free d != 0, 1, got {self.d}")
        elif self.kind != "QQ":
            raise InvalidField(f"unknown field kind {self.kind!r}")

    @property
    def exact(self) -> bool:
        return self.kind != "GF"

    def __str__(self):
        if self.kind == "GF":
            return f"GF({self.p})"
        if self.kind == "QQ_SQRT":
            return f"QQ(sqrt({self.d}))"
        return "QQ"

    @staticmethod
    def parse(token: str) -> FieldSpec:
        token = token.strip()
        if token == "QQ":
            return QQ
        if token.startswith("GF(") and token.endswith(")"):
            return FieldSpec("GF", p=int(token[3:-1]))
        if token.startswith("QQ(sqrt(") and token.endswith("))"):
            return FieldSpec("QQ_SQRT", d=int(token[8:-2]))
        raise InvalidField(f"cannot parse field {token!r}")


QQ = FieldSpec("QQ")


def gf(p: int) -> FieldSpec:
    return FieldSpec("GF", p=p)


def qq_sqrt(d: int) -> FieldSpec:
    return FieldSpec("QQ_SQRT", d=d)


def field_of(values) -> FieldSpec:
    """Smallest exact field containing all values (QQ or a single QQ(sqrt d))."""
    d = None
    for v in values:
        if isinstance(v, QSqrt):
            if d is None:
                d = v.d
            elif d != v.d:
                raise MixedExtension(f"entries use both sqrt({d}) and sqrt({v.d})")
    return QQ if d is None else qq_sqrt(d)


def join_fields(a: FieldSpec, b: FieldSpec) -> FieldSpec:
    if a.kind == "QQ":
        return b
    if b.kind == "QQ" or a == b:
        return a
    raise MixedExtension(f"cannot join {a} and {b}")


def check_in_field(x, f: FieldSpec):
    if isinstance(x, QSqrt) and (f.kind != "QQ_SQRT" or f.d != x.d):
        raise MixedExtension(f"{x} is not an element of {f}")


def to_modp(x, p: int, s: int | None = None) -> int:
    """Image of an exact scalar in GF(p); s is the chosen square root of d mod p."""
    if isinstance(x, int):
        return x % p
    if isinstance(x, Fraction):
        if x.denominator % p == 0:
            raise DenominatorDivisibleByPrime(f"denominator of {x} divisible by {p}")
        return x.numerator * pow(x.denominator, -1, p) % p
    if isinstance(x, QSqrt):
        if s is None:
            raise MixedExtension("no square root of d supplied for the modular image")
        return (to_modp(x.a, p) + to_modp(x.b, p) * s) % p
    raise TypeError(f"unsupported scalar {x!r}")


def random_primes(count: int, seed: int = 0, d: int | None = None) -> list[int]:
    """Distinct primes in (1e9, 2^31) from a seeded generator; d must be a residue mod each."""
    rng = random.Random(f"primes:{seed}:{d}")
    out: list[int] = []
    while len(out) < count:
        p = int(nextprime(rng.randrange(MIN_PRIME, MAX_PRIME - 10**6)))
        if p in out or p > MAX_PRIME:
            continue
        if d is not None and legendre_symbol(d % p, p) != 1:
            continue
        out.append(p)
    return out


def sqrt_modp(d: int, p: int) -> int:
    """Smallest square root of d modulo p."""
    r = sqrt_mod(d % p, p)
    if r is None:
        raise InvalidField(f"{d} is not a square modulo {p}")
    return min(r, p - r)


def rational_sqrt(x: Fraction):
    """Exact square root of a non-negative rational, or None when irrational."""
    from math import isqrt

    x = Fraction(x)
    if x < 0:
        return None
    n, d = x.numerator, x.denominator
    rn, rd = isqrt(n), isqrt(d)
    if rn * rn == n and rd * rd == d:
        return _rat(Fraction(rn, rd))
    return None


def field_sqrt(x, d: int | None = None):
    """Square root of x inside QQ, or inside QQ(sqrt d) when d is given; None if absent."""
    if isinstance(x, QSqrt):
        d = x.d
        a, b = x.a, x.b
    else:
        a, b = Fraction(x), Fraction(0)
    if b == 0:
        r = rational_sqrt(a)
        if r is not None:
            return r
        if d is None or a < 0:
            return None
        # sqrt(a) = y*sqrt(d) with y rational
        y = rational_sqrt(a / d)
        return None if y is None else QSqrt.make(0, y, d)
    # (u + v sqrt d)^2 = a + b sqrt d: u^2 + d v^2 = a, 2uv = b
    disc = rational_sqrt(a * a - d * b * b)
    if disc is None:
        return None
    for u2 in ((a + disc) / 2, (a - disc) / 2):
        u = rational_sqrt(u2)
        if u:
            v = b / (2 * u)
            cand = QSqrt.make(u, v, d)
            if cand * cand == x:
                return cand if sign(cand) > 0 else -cand
    return None


def squarefree_part(x: Fraction) -> tuple[int, Fraction]:
    """Write a positive rational as d * q^2 with d square-free; returns (d, q)."""
    x = Fraction(x)
    n = x.numerator * x.denominator
    d = int(core(n)) if n > 1 else 1
    q = rational_sqrt(x / d)
    return d, Fraction(q)


def sqrt_of_rational(x) -> object:
    """sqrt of a positive rational as an element of QQ or QQ(sqrt d)."""
    d, q = squarefree_part(Fraction(x))
    return _rat(q) if d == 1 else QSqrt.make(0, q, d)


def format_scalar(x) -> str:
    """Text form used in golden files and JSON: num/den or [a,b] for a + b sqrt d."""
    if isinstance(x, QSqrt):
        return f"[{_fmt_rat(x.a)},{_fmt_rat(x.b)}]"
    return _fmt_rat(x)


def _fmt_rat(x) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def parse_scalar(text: str, f: FieldSpec):
    text = text.strip()
    if text.startswith("["):
        if f.kind != "QQ_SQRT":
            raise InvalidField(f"extension value {text!r} in field {f}")
        a, b = text[1:-1].split(",")
        return QSqrt.make(Fraction(a), Fraction(b), f.d)
    value = _rat(Fraction(text))
    if f.kind == "GF":
        return value % f.p
    return value


def pretty(x) -> str:
    """Human-readable form, e.g. 1/2+3/4*sqrt(3)."""
    if isinstance(x, QSqrt):
        parts = []
        if x.a:
            parts.append(_fmt_rat(x.a))
        coef = "" if abs(x.b) == 1 else _fmt_rat(abs(x.b)) + "*"
        term = f"{coef}sqrt({x.d})"
        if parts:
            parts.append(("+" if x.b > 0 else "-") + term)
        else:
            parts.append(("" if x.b > 0 else "-") + term)
        return "".join(parts)
    return _fmt_rat(x)


def fdiv(a, b):
    """Exact quotient a / b for rationals and extension elements."""
    if isinstance(b, QSqrt):
        return a * b.inverse()
    if isinstance(a, QSqrt):
        return a / b
    return _rat(Fraction(a) / Fraction(b))


def to_fraction_or_qsqrt(x):
    return x if isinstance(x, QSqrt) else _rat(x)
