"""Concrete schemes with their flags, charts and trivializations.

Projective space P^n, homogeneous coordinates x_0..x_n:

* Y_i = {x_n = ... = x_{n-i+1} = 0}, so Y_n = [1:0:...:0] is the marked point;
* local parameters z_j = x_j / x_0, hence z_{n-i+1} cuts Y_i inside Y_{i-1};
* O(d) is trivialized near Y_n by x_0^d, so x^a (|a| = d) becomes z^(a_1..a_n)
  with a_0 = d - (a_1 + ... + a_n).

Vertex eta of the flag contributes the open piece U_eta = Y_eta - Y_{eta+1},
on which x_{n-eta} is invertible, completed along Y_eta.  Running the
localize-then-complete recipe through sigma = (eta_0 < ... < eta_k) lets
x_{n-eta} carry negative exponents for every eta in sigma and forces every
other homogeneous exponent to stay nonnegative.  That is the cone below.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .cones import (CoefficientConstraint, Inequality, LinearSubspaceModel, MonomialCone,
                    Simplex, SubspaceFamily, all_simplices)
from .errors import DiscriminantError, PrecisionError, UsageError
from .field import QQ, Field
from .series import Exponent, TruncatedSeries, series_mul

SUPPORTED_N = (1, 2, 3)
POSITIONS = ("off-y1", "on-y1-off-y2")


# ------------------------------------------------------------- scheme models
@dataclass(frozen=True)
class ProjSpace:
    n: int
    d: int = 0
    kind = "pn"


@dataclass(frozen=True)
class ProjLine:
    d: int = 0
    kind = "p1"

    @property
    def n(self) -> int:
        return 1


@dataclass(frozen=True)
class Elliptic:
    """y^2 = x^3 + a x + b with the marked point at infinity."""

    a: object
    b: object
    kind = "elliptic"

    @property
    def n(self) -> int:
        return 1


@dataclass(frozen=True)
class IdealPoint:
    """The ideal sheaf m_Q of a point Q on P^2 (coordinate flag)."""

    position: str
    q: tuple | None = None
    kind = "ideal"

    @property
    def n(self) -> int:
        return 2


# ------------------------------------------------------ projective space cones
def _homogeneous_inequality(n: int, d: int, j: int) -> Inequality:
    """a_j >= 0 written in the z-exponents e = (a_1..a_n)."""
    if j == 0:
        return Inequality(tuple([-1] * n), d)
    coeffs = [0] * n
    coeffs[j - 1] = 1
    return Inequality(tuple(coeffs))


def inverted_coordinates(n: int, sigma: Simplex) -> set[int]:
    """Homogeneous coordinates allowed negative exponents in A_sigma."""
    return {n - eta for eta in sigma}


def proj_space_cone(n: int, d: int, sigma: Simplex | None) -> MonomialCone:
    """Cone of A_sigma(O(d)); ``sigma=None`` gives H^0(P^n, O(d))."""
    free = inverted_coordinates(n, sigma) if sigma else set()
    return MonomialCone(n, tuple(_homogeneous_inequality(n, d, j)
                                 for j in range(n + 1) if j not in free))


def proj_space_family(n: int, d: int, field: Field = QQ) -> SubspaceFamily:
    if n not in SUPPORTED_N:
        raise UsageError(f"P^n preset supports n in {SUPPORTED_N}, got {n}")
    models = {s: LinearSubspaceModel(proj_space_cone(n, d, s), (), field) for s in all_simplices(n)}
    h0 = LinearSubspaceModel(proj_space_cone(n, d, None), (), field)
    return SubspaceFamily(n, models, h0, field, f"P{n}(O({d}))", {"n": n, "d": d})


def p1_family(d: int, field: Field = QQ) -> SubspaceFamily:
    return proj_space_family(1, d, field)


def window_radius(d: int) -> int:
    """Documented sufficient margin for O(d) presets."""
    return abs(d) + 2


# ------------------------------------------------------------ ideal of a point
def _default_q(position: str):
    return (1, 1, 1) if position == "off-y1" else (1, 1, 0)


def _validate_q(position: str, q) -> None:
    if position not in POSITIONS:
        raise UsageError(f"position must be one of {POSITIONS}, got {position!r}")
    if len(q) != 3 or not any(q):
        raise UsageError(f"Q must be a nonzero point of P^2, got {q}")
    if position == "off-y1" and not q[2]:
        raise UsageError("off-y1 needs x_2(Q) != 0")
    if position == "on-y1-off-y2" and (q[2] or not q[1]):
        raise UsageError("on-y1-off-y2 needs x_2(Q) = 0 and x_1(Q) != 0")


def point_evaluation(q, field: Field) -> CoefficientConstraint:
    """z^e -> value at Q of the degree-0 monomial x_0^{-e1-e2} x_1^{e1} x_2^{e2}.

    Only used on cones where every exponent with q_j = 0 is nonnegative, so
    0^0 = 1 and 0^k = 0 are the right conventions."""
    qs = [field(x) for x in q]

    def weight(e: Exponent):
        a = (-e[0] - e[1], e[0], e[1])
        val = field.one
        for qj, aj in zip(qs, a):
            if aj == 0:
                continue
            if not qj:
                if aj < 0:
                    raise UsageError(f"monomial {e} has a pole at Q")
                return field.zero
            val = val * qj ** aj
        return val

    label = "vanish-at-Q[" + ":".join(str(x) for x in q) + "]"
    return CoefficientConstraint(weight, label)


def ideal_point_family(position: str, field: Field = QQ, q=None) -> SubspaceFamily:
    """A_sigma(m_Q) on P^2.  Only the vertex sigma = (eta) with Q in U_eta sees Q
    (plus H^0); every other A_sigma agrees with the O_X model."""
    q = tuple(q) if q is not None else _default_q(position)
    _validate_q(position, q)
    base = proj_space_family(2, 0, field)
    ev = point_evaluation(q, field)
    seen = (0,) if position == "off-y1" else (1,)
    models = dict(base.models)
    models[seen] = LinearSubspaceModel(base.models[seen].cone, (ev,), field)
    h0 = LinearSubspaceModel(base.h0.cone, (ev,), field)
    return SubspaceFamily(2, models, h0, field, f"P2(m_Q,{position})",
                          {"position": position, "q": q, "sees": seen})


# --------------------------------------------------------------- elliptic
def discriminant(a, b, field: Field):
    a, b = field(a), field(b)
    return 4 * a ** 3 + 27 * b ** 2


def elliptic_expansions(a, b, N: int, field: Field = QQ) -> tuple[TruncatedSeries, TruncatedSeries]:
    """Expansions of x, y at infinity in the parameter t = x/y.

    With x = t^-2 u, y = t^-3 u the curve equation becomes
    u^2 - u^3 + a t^4 u + b t^6 = 0, i.e. u = 1 + v with
    v = -(a t^4 / u + b t^6 / u^2); iterating gains four orders per pass.
    u is certified mod t^N, so x carries N coefficients (precision N-2) and
    y likewise (precision N-3).
    """
    if not field.is_rational and field.p <= 3:
        raise UsageError("short Weierstrass form needs characteristic > 3")
    if not discriminant(a, b, field):
        raise DiscriminantError(f"4a^3 + 27b^2 vanishes for a={a}, b={b}")
    if N < 8:
        raise PrecisionError(f"elliptic expansions need N >= 8, got {N}")
    A, B = field(a), field(b)
    one = TruncatedSeries.constant(1, 1, field, precision=N)
    t4 = TruncatedSeries.monomial((4,), field, A)
    t6 = TruncatedSeries.monomial((6,), field, B)
    u = one
    for _ in range(N // 4 + 2):
        inv_u = _unit_inverse(u, N)
        u_next = (one - series_mul(t4, inv_u) - series_mul(t6, series_mul(inv_u, inv_u))).truncate(N)
        if u_next == u:
            break
        u = u_next
    x = u.shift((-2,))
    y = u.shift((-3,))
    return x, y


def _unit_inverse(u: TruncatedSeries, N: int) -> TruncatedSeries:
    """1/u for a one-variable unit u = 1 + O(t), to precision N."""
    c = [u[(k,)] if k < u.precision[0] else None for k in range(N)]
    inv = [u.field.zero] * N
    inv[0] = 1 / c[0]
    for k in range(1, N):
        s = u.field.zero
        for j in range(1, k + 1):
            s = s + c[j] * inv[k - j]
        inv[k] = -s * inv[0]
    return TruncatedSeries({(k,): v for k, v in enumerate(inv)}, 1, u.field, precision=N)


def elliptic_residual(x: TruncatedSeries, y: TruncatedSeries, a, b) -> TruncatedSeries:
    F = x.field
    return y * y - x * x * x - x * F(a) - F(b)


def validate_elliptic(a, b, field: Field) -> None:
    if not field.is_rational and field.p <= 3:
        raise UsageError("short Weierstrass form needs characteristic > 3")
    if not discriminant(a, b, field):
        raise DiscriminantError(f"4a^3 + 27b^2 vanishes for a={a}, b={b}")


def as_scalar(text, field: Field):
    return field(Fraction(str(text)))
