"""Truncated iterated Laurent series in k((z1))...((zn)).

An element is stored as a finite map from exponent vectors to nonzero
scalars together with two per-variable bounds:

* ``order`` -- a certified lower bound on the exponents of the true element,
* ``precision`` -- coefficients at exponents below it (in every variable) are
  exact; nothing is stored at or above it.

``math.inf`` in ``precision`` means "exact in that variable".  The leading
term convention compares z_n first, matching the z_n-filtration
K(m) = z_n^m k((z1))...((z_{n-1}))[[z_n]].
"""
from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import IndeterminateError, NotAUnitError, PrecisionError, UsageError
from .field import QQ, Field, format_scalar

INF = math.inf
Exponent = tuple[int, ...]


def _norm(x):
    """Keep finite bounds as ints so printing stays exact."""
    if x == INF or x == -INF:
        return x
    return int(x)


def lex_key(e: Exponent):
    """Sort key for the field order: z_n is the most significant variable."""
    return tuple(reversed(e))


@dataclass(frozen=True)
class Window:
    """A finite box of exponent vectors, one closed interval per variable."""

    bounds: tuple[tuple[int, int], ...]

    def __post_init__(self):
        for lo, hi in self.bounds:
            if lo > hi:
                raise UsageError(f"empty window interval [{lo},{hi}]")

    @classmethod
    def cube(cls, n: int, radius: int) -> "Window":
        return cls(tuple((-radius, radius) for _ in range(n)))

    @classmethod
    def parse(cls, text: str) -> "Window":
        """``[-8,8]x[-8,8]``; a single interval may be given for n=1."""
        parts = re.findall(r"\[\s*(-?\d+)\s*,\s*(-?\d+)\s*\]", text)
        rest = re.sub(r"\[\s*-?\d+\s*,\s*-?\d+\s*\]", "", text).replace("x", "").strip()
        if not parts or rest:
            raise UsageError(f"cannot parse window {text!r}")
        return cls(tuple((int(a), int(b)) for a, b in parts))

    def __str__(self):
        return "x".join(f"[{lo},{hi}]" for lo, hi in self.bounds)

    @property
    def n(self) -> int:
        return len(self.bounds)

    @property
    def size(self) -> int:
        return math.prod(hi - lo + 1 for lo, hi in self.bounds)

    def points(self) -> Iterator[Exponent]:
        return itertools.product(*(range(lo, hi + 1) for lo, hi in self.bounds))

    def grid(self) -> np.ndarray:
        """All points as an (N, n) int64 array in lexicographic order."""
        axes = [np.arange(lo, hi + 1, dtype=np.int64) for lo, hi in self.bounds]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def contains(self, e: Exponent) -> bool:
        return all(lo <= x <= hi for x, (lo, hi) in zip(e, self.bounds))

    def on_boundary(self, e: Exponent) -> bool:
        return any(x == lo or x == hi for x, (lo, hi) in zip(e, self.bounds))

    def boundary_mask(self, grid: np.ndarray) -> np.ndarray:
        lo = np.array([b[0] for b in self.bounds])
        hi = np.array([b[1] for b in self.bounds])
        return ((grid == lo) | (grid == hi)).any(axis=1)

    def drop_last(self) -> "Window":
        return Window(self.bounds[:-1])


class TruncatedSeries:
    """Immutable truncated element of k((z1))...((zn))."""

    __slots__ = ("n", "field", "_coeffs", "order", "precision")

    def __init__(self, coeffs: Mapping[Exponent, object] | None = None, n: int = 1,
                 field: Field = QQ, precision=None, order=None):
        self.n = n
        self.field = field
        if precision is None:
            precision = (INF,) * n
        elif not isinstance(precision, tuple):
            precision = (precision,) * n
        if len(precision) != n:
            raise UsageError(f"precision {precision} does not match n={n}")
        self.precision = tuple(_norm(p) for p in precision)
        stored = {}
        for e, c in (coeffs or {}).items():
            e = tuple(int(x) for x in e)
            if len(e) != n:
                raise UsageError(f"exponent {e} does not have {n} entries")
            if any(x >= p for x, p in zip(e, self.precision)):
                continue
            c = field(c)
            if c:
                stored[e] = c
        self._coeffs = stored
        lowest = tuple(min([e[t] for e in stored] + [self.precision[t]]) for t in range(n))
        if order is None:
            order = lowest
        else:
            if not isinstance(order, tuple):
                order = (order,) * n
            if len(order) != n or any(o > x for o, x in zip(order, lowest)):
                raise UsageError(f"order {order} exceeds the stored support {lowest}")
        self.order = tuple(_norm(o) for o in order)

    # ------------------------------------------------------------------ basics
    @property
    def coeffs(self) -> dict[Exponent, object]:
        return dict(self._coeffs)

    def items(self):
        return sorted(self._coeffs.items(), key=lambda kv: lex_key(kv[0]))

    def __getitem__(self, e: Exponent):
        e = tuple(e)
        if any(x >= p for x, p in zip(e, self.precision)):
            raise IndeterminateError(f"coefficient at {e} is beyond precision {self.precision}")
        return self._coeffs.get(e, self.field.zero)

    def is_zero(self) -> bool:
        """True when nothing nonzero is stored (zero within precision)."""
        return not self._coeffs

    def support(self) -> list[Exponent]:
        return sorted(self._coeffs, key=lex_key)

    def __eq__(self, other):
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return (self.n == other.n and self.field == other.field
                and self._coeffs == other._coeffs and self.order == other.order
                and self.precision == other.precision)

    def __hash__(self):
        return hash((self.n, self.field, frozenset(self._coeffs.items()),
                     self.order, self.precision))

    def __repr__(self):
        return f"TruncatedSeries({format_series(self)!r})"

    def _check(self, other: "TruncatedSeries"):
        if not isinstance(other, TruncatedSeries):
            raise UsageError(f"expected a TruncatedSeries, got {type(other).__name__}")
        if other.n != self.n:
            raise UsageError(f"variable count mismatch: {self.n} vs {other.n}")
        if other.field != self.field:
            raise UsageError(f"field mismatch: {self.field} vs {other.field}")

    # ---------------------------------------------------------- constructors
    @classmethod
    def monomial(cls, e: Exponent, field: Field = QQ, coeff=1) -> "TruncatedSeries":
        e = tuple(e)
        return cls({e: coeff}, n=len(e), field=field)

    @classmethod
    def constant(cls, c, n: int, field: Field = QQ, precision=None) -> "TruncatedSeries":
        return cls({(0,) * n: c}, n=n, field=field, precision=precision)

    @classmethod
    def zero(cls, n: int, field: Field = QQ, precision=None) -> "TruncatedSeries":
        return cls({}, n=n, field=field, precision=precision)

    def truncate(self, precision) -> "TruncatedSeries":
        if not isinstance(precision, tuple):
            precision = (precision,) * self.n
        prec = tuple(min(a, b) for a, b in zip(self.precision, precision))
        order = tuple(min(o, p) for o, p in zip(self.order, prec))
        return TruncatedSeries(self._coeffs, self.n, self.field, prec, order)

    # ------------------------------------------------------------ operators
    def __add__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(other, self.n, self.field)
        return series_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries({e: -c for e, c in self._coeffs.items()}, self.n,
                               self.field, self.precision, self.order)

    def __sub__(self, other):
        if not isinstance(other, TruncatedSeries):
            other = TruncatedSeries.constant(other, self.n, self.field)
        return series_add(self, -other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, TruncatedSeries):
            return series_mul(self, other)
        c = self.field(other)
        return TruncatedSeries({e: c * v for e, v in self._coeffs.items()}, self.n,
                               self.field, self.precision, self.order)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise UsageError("use series_inverse for negative powers")
        out = TruncatedSeries.constant(1, self.n, self.field)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def shift(self, e: Exponent) -> "TruncatedSeries":
        """Multiply by the monomial z^e (exact, so no precision loss)."""
        e = tuple(e)
        return TruncatedSeries({tuple(a + b for a, b in zip(k, e)): c for k, c in self._coeffs.items()},
                               self.n, self.field,
                               tuple(_norm(p + s) for p, s in zip(self.precision, e)),
                               tuple(_norm(o + s) for o, s in zip(self.order, e)))


# ---------------------------------------------------------------- operations
def series_add(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    f._check(g)
    prec = tuple(min(a, b) for a, b in zip(f.precision, g.precision))
    order = tuple(min(a, b) for a, b in zip(f.order, g.order))
    out = dict(f._coeffs)
    zero = f.field.zero
    for e, c in g._coeffs.items():
        out[e] = out.get(e, zero) + c
    order = tuple(min(o, p) for o, p in zip(order, prec))
    return TruncatedSeries(out, f.n, f.field, prec, order)


def series_mul(f: TruncatedSeries, g: TruncatedSeries) -> TruncatedSeries:
    """Convolution with the per-variable rule
    precision_t = min(precision_t(f) + order_t(g), precision_t(g) + order_t(f))."""
    f._check(g)
    order = tuple(_norm(a + b) if a != INF and b != INF else INF for a, b in zip(f.order, g.order))
    prec = tuple(_norm(min(pf + og, pg + of)) for pf, pg, of, og
                 in zip(f.precision, g.precision, f.order, g.order))
    out: dict[Exponent, object] = {}
    zero = f.field.zero
    for e1, c1 in f._coeffs.items():
        for e2, c2 in g._coeffs.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            if any(x >= p for x, p in zip(e, prec)):
                continue
            out[e] = out.get(e, zero) + c1 * c2
    order = tuple(min(o, p) for o, p in zip(order, prec))
    return TruncatedSeries(out, f.n, f.field, prec, order)


def leading_term(f: TruncatedSeries):
    """Lex-leading (exponent, coefficient), certified against unknown terms."""
    if f.is_zero():
        raise NotAUnitError("no nonzero coefficient inside the known window")
    lead = min(f._coeffs, key=lex_key)
    # An unknown term (some e_u >= precision_u) can only sit lex-below the
    # stored leader through a variable t with order_t < lead_t and a finite
    # precision in some less significant variable u < t.
    for t in range(f.n):
        if f.order[t] < lead[t] and any(f.precision[u] != INF for u in range(t)):
            raise NotAUnitError(f"lex-leading term {lead} is not certified by order {f.order}")
    return lead, f._coeffs[lead]


def series_inverse(f: TruncatedSeries, target_precision) -> TruncatedSeries:
    """Multiplicative inverse in k((z1))...((zn)) up to ``target_precision``.

    Writes f = c z^L (1 + h) with h lex-positive and sums the geometric
    series.  Terms are pruned by a positive weight w with w.e >= 1 on every
    term of h: a partial product of weight >= W_max can never feed a term
    below the target precision.
    """
    if not isinstance(target_precision, tuple):
        target_precision = (target_precision,) * f.n
    if any(p == INF for p in target_precision):
        raise UsageError("series_inverse needs a finite target precision in every variable")
    lead, c = leading_term(f)
    neg_lead = tuple(-x for x in lead)
    g = f.shift(neg_lead) * (1 / c)
    h = g - 1
    target = tuple(min(t + x, p) for t, x, p in zip(target_precision, lead, g.precision))

    neg = [max(0, -min([e[t] for e in h._coeffs] + [h.order[t]])) for t in range(f.n)]
    w = [0] * f.n
    for t in range(f.n):
        w[t] = 1 + sum(w[s] * neg[s] for s in range(t))
    w_max = sum(wt * pt for wt, pt in zip(w, target))

    def prune(s: TruncatedSeries) -> TruncatedSeries:
        keep = {e: v for e, v in s._coeffs.items() if sum(a * b for a, b in zip(w, e)) < w_max}
        return TruncatedSeries(keep, s.n, s.field, s.precision, s.order)

    mh = -h
    term = TruncatedSeries.constant(1, f.n, f.field)
    total = term
    for _ in range(max(1, int(w_max)) + 1):
        term = prune(series_mul(term, mh))
        if term.is_zero():
            break
        total = total + term
    else:
        raise PrecisionError("geometric series did not terminate within the weight bound")
    out = total.truncate(target).shift(neg_lead) * (1 / c)
    return out


def zn_valuation(f: TruncatedSeries):
    """Largest m with f in K(m); ``math.inf`` for the exact zero series."""
    if f.is_zero():
        if all(p == INF for p in f.precision):
            return INF
        raise IndeterminateError("series vanishes inside its window; valuation unknown")
    m = min(e[-1] for e in f._coeffs)
    if f.order[-1] < m:
        raise IndeterminateError(f"z_n-order bound {f.order[-1]} does not certify valuation {m}")
    return m


def graded_slice(f: TruncatedSeries, m: int) -> TruncatedSeries:
    """Coefficient of z_n^m, an element of k((z1))...((z_{n-1}))."""
    if m >= f.precision[-1]:
        raise IndeterminateError(f"slice {m} is beyond z_n-precision {f.precision[-1]}")
    part = {e[:-1]: c for e, c in f._coeffs.items() if e[-1] == m}
    prec = f.precision[:-1]
    return TruncatedSeries(part, f.n - 1, f.field, prec)


def valuation_1d(f: TruncatedSeries) -> int:
    """Valuation of a one-variable series (pole order is its negative)."""
    if f.n != 1:
        raise UsageError("valuation_1d needs a one-variable series")
    return zn_valuation(f)


# ------------------------------------------------------------- literal format
_TOKEN = re.compile(r"\s*(?:(z)(\d+)|(\d+)|(\^)|(\*)|(/)|(\+)|(-)|(\()|(\)))")


def _format_term(e: Exponent, c) -> tuple[str, str]:
    sign = "+"
    if isinstance(c, Fraction) and c < 0:
        sign, c = "-", -c
    vars_ = [f"z{i + 1}" if x == 1 else f"z{i + 1}^{x}" for i, x in enumerate(e) if x != 0]
    cs = format_scalar(c)
    if not vars_:
        return sign, cs
    if cs == "1":
        return sign, "*".join(vars_)
    return sign, "*".join([cs] + vars_)


def _format_tuple(t) -> str:
    return "(" + ",".join("inf" if x == INF else str(x) for x in t) + ")"


def format_series(f: TruncatedSeries) -> str:
    """``<terms> ; n=<n> field=<F> order=(..) precision=(..)``."""
    parts = []
    for i, (e, c) in enumerate(f.items()):
        sign, body = _format_term(e, c)
        if i == 0:
            parts.append(body if sign == "+" else "-" + body)
        else:
            parts.append(f" {sign} {body}")
    body = "".join(parts) or "0"
    return (f"{body} ; n={f.n} field={f.field.tag} order={_format_tuple(f.order)} "
            f"precision={_format_tuple(f.precision)}")


def _parse_tuple(text: str):
    inner = text.strip()
    if not (inner.startswith("(") and inner.endswith(")")):
        raise UsageError(f"expected a tuple, got {text!r}")
    items = [x.strip() for x in inner[1:-1].split(",") if x.strip()]
    return tuple(INF if x == "inf" else int(x) for x in items)


def _parse_terms(text: str, n: int | None, field: Field) -> tuple[dict, int]:
    pos, toks = 0, []
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            raise UsageError(f"bad series literal near {text[pos:]!r}")
        toks.append(m)
        pos = m.end()
    i = 0
    terms: list[tuple[int, Fraction, dict[int, int]]] = []

    def peek(k):
        return toks[i].group(k) if i < len(toks) else None

    sign = 1
    while i < len(toks):
        if peek(7) or peek(8):
            sign = 1 if peek(7) else -1
            i += 1
            if i < len(toks) and (peek(7) or peek(8)):
                raise UsageError("doubled sign in series literal")
        coeff = Fraction(1)
        exps: dict[int, int] = {}
        expect_factor = True
        while expect_factor:
            if i >= len(toks):
                raise UsageError("dangling operator in series literal")
            if peek(3):
                num = int(peek(3))
                i += 1
                if i < len(toks) and peek(6):
                    i += 1
                    if i >= len(toks) or not peek(3):
                        raise UsageError("bad rational coefficient")
                    coeff *= Fraction(num, int(peek(3)))
                    i += 1
                else:
                    coeff *= num
            elif peek(1):
                var = int(peek(2))
                i += 1
                power = 1
                if i < len(toks) and peek(4):
                    i += 1
                    paren = i < len(toks) and peek(9)
                    if paren:
                        i += 1
                    neg = i < len(toks) and peek(8)
                    if neg:
                        i += 1
                    if i >= len(toks) or not peek(3):
                        raise UsageError("bad exponent")
                    power = -int(peek(3)) if neg else int(peek(3))
                    i += 1
                    if paren:
                        if i >= len(toks) or not peek(10):
                            raise UsageError("unbalanced parenthesis in exponent")
                        i += 1
                exps[var] = exps.get(var, 0) + power
            else:
                raise UsageError("expected a coefficient or variable")
            if i < len(toks) and peek(5):
                i += 1
            else:
                expect_factor = False
        terms.append((sign, coeff, exps))
        sign = 1
    top = max([max(e) for _, _, e in terms if e] + [0])
    if n is None:
        n = max(top, 1)
    if top > n or any(k < 1 for _, _, e in terms for k in e):
        raise UsageError(f"variable index out of range for n={n}")
    out: dict[Exponent, object] = {}
    for s, c, e in terms:
        key = tuple(e.get(k + 1, 0) for k in range(n))
        out[key] = out.get(key, field.zero) + field(s * c)
    return out, n


def parse_series(text: str, n: int | None = None, field: Field | None = None) -> TruncatedSeries:
    """Inverse of :func:`format_series`; metadata may be omitted."""
    body, _, meta = text.partition(";")
    opts = dict(re.findall(r"(\w+)=(\([^)]*\)|\S+)", meta))
    unknown = set(opts) - {"n", "field", "order", "precision"}
    if unknown:
        raise UsageError(f"unknown series metadata {sorted(unknown)}")
    if "n" in opts:
        n = int(opts["n"])
    if "field" in opts:
        field = Field.parse(opts["field"])
    field = field or QQ
    body = body.strip()
    coeffs, n = ({}, n or 1) if body == "0" else _parse_terms(body, n, field)
    precision = _parse_tuple(opts["precision"]) if "precision" in opts else None
    order = _parse_tuple(opts["order"]) if "order" in opts else None
    return TruncatedSeries(coeffs, n, field, precision, order)


def from_coefficients(values: Iterable, start: int, field: Field, precision=None) -> TruncatedSeries:
    """One-variable series sum values[k] t^(start+k)."""
    coeffs = {(start + k,): v for k, v in enumerate(values)}
    return TruncatedSeries(coeffs, 1, field, precision)
