"""Exact coefficient fields: the rationals and prime fields F_p.

Rational scalars are plain :class:`fractions.Fraction` values; prime-field
scalars are :class:`Fp` instances carrying their modulus.  A :class:`Field`
turns Python ints / Fractions / strings into scalars of that field so the
rest of the library can use ordinary operators.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction

from .errors import UsageError

MAX_PRIME = 2**61


def is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin, exact for p < 3.3e24."""
    if p < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if p % q == 0:
            return p == q
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


class Fp:
    """Residue class modulo a prime, reduced into [0, p)."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _lift(self, other):
        if isinstance(other, Fp):
            if other.p != self.p:
                raise UsageError(f"mixing F_{self.p} and F_{other.p}")
            return other.v
        if isinstance(other, int):
            return other % self.p
        if isinstance(other, Fraction):
            if other.denominator % self.p == 0:
                raise ZeroDivisionError(f"{other} has no image in F_{self.p}")
            return other.numerator * pow(other.denominator, -1, self.p) % self.p
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else Fp(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else Fp(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else Fp(o - self.v, self.p)

    def __mul__(self, other):
        o = self._lift(other)
        return NotImplemented if o is NotImplemented else Fp(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if o == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return Fp(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        if self.v == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return Fp(o * pow(self.v, -1, self.p), self.p)

    def __neg__(self):
        return Fp(-self.v, self.p)

    def __pow__(self, k: int):
        if k < 0:
            if self.v == 0:
                raise ZeroDivisionError("0 has no inverse")
            return Fp(pow(pow(self.v, -1, self.p), -k, self.p), self.p)
        return Fp(pow(self.v, k, self.p), self.p)

    def __eq__(self, other):
        o = self._lift(other) if not isinstance(other, float) else NotImplemented
        return NotImplemented if o is NotImplemented else self.v == o

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"Fp({self.v}, {self.p})"

    def __str__(self):
        return str(self.v)


_FP_RE = re.compile(r"^\s*(?:fp|f|gf)\s*[:(]\s*(\d+)\s*\)?\s*$", re.IGNORECASE)


@dataclass(frozen=True)
class Field:
    """Either Q (``p is None``) or F_p."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if not is_prime(self.p) or self.p > MAX_PRIME:
                raise UsageError(f"F_p needs a prime p <= 2^61, got {self.p}")

    @property
    def is_rational(self) -> bool:
        return self.p is None

    @property
    def tag(self) -> str:
        return "Q" if self.p is None else f"Fp({self.p})"

    def __str__(self):
        return self.tag

    def __call__(self, x):
        if self.p is None:
            if isinstance(x, Fp):
                raise UsageError("cannot coerce an F_p element into Q")
            return Fraction(x)
        if isinstance(x, str):
            x = Fraction(x)
        if isinstance(x, Fp):
            if x.p != self.p:
                raise UsageError(f"mixing F_{x.p} and F_{self.p}")
            return x
        if isinstance(x, Fraction):
            if x.denominator % self.p == 0:
                raise ZeroDivisionError(f"{x} has no image in F_{self.p}")
            return Fp(x.numerator * pow(x.denominator, -1, self.p), self.p)
        return Fp(int(x), self.p)

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def owns(self, x) -> bool:
        if self.p is None:
            return isinstance(x, Fraction)
        return isinstance(x, Fp) and x.p == self.p

    @classmethod
    def parse(cls, text: str) -> "Field":
        """Accepts ``q``, ``Q``, ``fp:<p>``, ``Fp(<p>)``."""
        t = text.strip()
        if t.lower() in ("q", "qq", "rational"):
            return cls()
        m = _FP_RE.match(t)
        if m is None:
            raise UsageError(f"unknown field {text!r}")
        return cls(int(m.group(1)))


QQ = Field()


def GF(p: int) -> Field:
    return Field(p)


def format_scalar(c) -> str:
    if isinstance(c, Fp):
        return str(c.v)
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
