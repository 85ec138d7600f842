"""Shared generators for the test-suite (hypothesis strategies and a seeded
sampler used by the acceptance run)."""
from __future__ import annotations

import random

from hypothesis import strategies as st

from flagcohom.errors import NotAUnitError
from flagcohom.field import QQ, GF
from flagcohom.series import TruncatedSeries, series_inverse, series_mul

FIELDS = [QQ, GF(7), GF(1000000007)]


def _same_window(f: TruncatedSeries, g: TruncatedSeries) -> bool:
    """Equal on the common certified box."""
    prec = tuple(min(a, b) for a, b in zip(f.precision, g.precision))
    return f.truncate(prec).coeffs == g.truncate(prec).coeffs


@st.composite
def series(draw, n=None, field=None, lo=-2, hi=3):
    n = n or draw(st.integers(1, 3))
    field = field or draw(st.sampled_from(FIELDS))
    exps = st.tuples(*[st.integers(lo, hi) for _ in range(n)])
    coeffs = draw(st.dictionaries(exps, st.integers(-5, 5), max_size=6))
    precision = tuple(draw(st.sampled_from([2, 3, 4, 5, 6, float("inf")])) for _ in range(n))
    return TruncatedSeries(coeffs, n, field, precision)


@st.composite
def triples(draw):
    n = draw(st.integers(1, 3))
    field = draw(st.sampled_from(FIELDS))
    return tuple(draw(series(n=n, field=field)) for _ in range(3))


def random_series(rng: random.Random, n: int, field, lo=-2, hi=3) -> TruncatedSeries:
    coeffs = {tuple(rng.randint(lo, hi) for _ in range(n)): rng.randint(-5, 5)
              for _ in range(rng.randint(0, 6))}
    precision = tuple(rng.choice([2, 3, 4, 5, 6, float("inf")]) for _ in range(n))
    return TruncatedSeries(coeffs, n, field, precision)


def inverse_round_trip(f: TruncatedSeries, target: int) -> bool | None:
    """f * f^-1 == 1 on the certified box; None when f is not a certified unit."""
    try:
        g = series_inverse(f, target)
    except NotAUnitError:
        return None
    one = TruncatedSeries.constant(1, f.n, f.field)
    return _same_window(series_mul(f, g), one)


def law_checks(rng: random.Random, count: int):
    """Yield (name, passed) for ``count`` randomized arithmetic checks."""
    kinds = ["assoc_add", "comm_add", "assoc_mul", "comm_mul", "distrib", "inverse"]
    done = 0
    while done < count:
        kind = kinds[done % len(kinds)]
        n = rng.randint(1, 3)
        field = rng.choice(FIELDS)
        f, g, h = (random_series(rng, n, field) for _ in range(3))
        if kind == "assoc_add":
            ok = (f + g) + h == f + (g + h)
        elif kind == "comm_add":
            ok = f + g == g + f
        elif kind == "assoc_mul":
            ok = _same_window((f * g) * h, f * (g * h))
        elif kind == "comm_mul":
            ok = f * g == g * f
        elif kind == "distrib":
            ok = _same_window(f * (g + h), f * g + f * h)
        else:
            unit = exact_unit(rng, n, field)
            ok = inverse_round_trip(unit, rng.randint(1, 5))
            if ok is None:
                continue
        yield kind, bool(ok)
        done += 1


def exact_unit(rng: random.Random, n: int, field) -> TruncatedSeries:
    """An exact polynomial whose lex-leading term is the nonzero constant."""
    coeffs = {(0,) * n: rng.choice([1, 2, -3, 5])}
    for _ in range(rng.randint(0, 4)):
        e = [rng.randint(-2, 3) for _ in range(n)]
        # make e lex-positive: last nonzero entry positive (z_n most significant)
        e[-1] = rng.randint(1, 3)
        coeffs[tuple(e)] = rng.randint(-4, 4)
    return TruncatedSeries(coeffs, n, field)
