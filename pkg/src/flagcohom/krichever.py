"""The map from geometric data to the pair (B, W) and its checks.

B is the image of A_{(0,..,n-1)}(O_X) in K = k((z1))...((zn)), W the image of
A_{(0,..,n-1)}(F) in K^r under the fixed trivialization.  Toric presets give
cones; curve presets give finite echelon bases of certified expansions,
labelled by pole order at the marked point.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from math import comb
from typing import Iterable, Sequence

import numpy as np

from . import linalg
from .cones import (LawReport, LinearSubspaceModel, MonomialCone, Simplex, SubspaceFamily,
                    all_simplices, cone_intersect, standard_constraint_cone)
from .errors import InconsistentInputError, PrecisionError, UsageError
from .field import QQ, Field
from .presets import (Elliptic, IdealPoint, ProjLine, ProjSpace, elliptic_expansions,
                      ideal_point_family, proj_space_family, validate_elliptic, window_radius)
from .series import TruncatedSeries, Window, graded_slice, series_mul, zn_valuation

DEFAULT_MAX_POLE = 10


@dataclass(frozen=True)
class GeometricData:
    """Scheme + coordinate flag + bundle (direct sum of twists) + frame.

    The frame of a sum of twists is the preset trivialization of each summand
    in the order given by ``twists``."""

    scheme: ProjSpace | ProjLine | Elliptic | IdealPoint
    field: Field = QQ
    twists: tuple[int, ...] | None = None
    window: Window | None = None
    precision: int = 40
    max_pole: int = DEFAULT_MAX_POLE

    @property
    def n(self) -> int:
        return self.scheme.n

    @property
    def bundle(self) -> tuple[int, ...]:
        if self.twists is not None:
            return tuple(self.twists)
        return (getattr(self.scheme, "d", 0),)

    def resolved_window(self) -> Window:
        if self.window is not None:
            return self.window
        radius = max(window_radius(max(abs(d) for d in self.bundle)), 4)
        return Window.cube(self.n, radius)


# ----------------------------------------------------------- series bases
class SeriesBasis:
    """Echelon basis of a subspace of k((t)), one witness per valuation.

    ``vanish_from`` is an exponent v0 with (subspace) & t^v0 k[[t]] = 0, so a
    series belongs to the span exactly when its terms below v0 reduce away and
    the remainder vanishes.  ``window_pole`` bounds the pole orders that form
    the finite window used for closure checks.
    """

    def __init__(self, witnesses: Sequence[TruncatedSeries], vanish_from: int, window_pole: int,
                 field: Field = QQ):
        self.field = field
        self.vanish_from = vanish_from
        self.window_pole = window_pole
        pivots: dict[int, TruncatedSeries] = {}
        for w in sorted(witnesses, key=zn_valuation):
            r = w
            while not r.is_zero():
                v = zn_valuation(r)
                if v not in pivots:
                    break
                r = r - pivots[v] * r[(v,)]
            if r.is_zero():
                continue
            v = zn_valuation(r)
            pivots[v] = r * (1 / r[(v,)])
        self.pivots = dict(sorted(pivots.items()))

    @property
    def witnesses(self) -> list[TruncatedSeries]:
        return list(self.pivots.values())

    def pole_orders(self) -> list[int]:
        return sorted(-v for v in self.pivots)

    def window_witnesses(self) -> list[TruncatedSeries]:
        return [w for v, w in self.pivots.items() if -v <= self.window_pole]

    @property
    def min_precision(self):
        return min(w.precision[0] for w in self.window_witnesses())

    def reduce(self, f: TruncatedSeries):
        """Eliminate every term below ``vanish_from``.

        Returns ``(remainder, None)`` or ``(remainder, v)`` where v is an
        exponent with no pivot (f is then certainly outside the span)."""
        r = f
        while True:
            low = [e[0] for e in r.support() if e[0] < self.vanish_from]
            if not low:
                if r.precision[0] < self.vanish_from:
                    raise PrecisionError(
                        f"terms below t^{self.vanish_from} are not all certified (precision {r.precision[0]})")
                return r, None
            v = low[0]
            piv = self.pivots.get(v)
            if piv is None:
                return r, v
            r = r - piv * r[(v,)]

    def contains(self, f: TruncatedSeries, required_precision: int | None = None):
        """(verdict, detail).  Raises PrecisionError when undecidable."""
        r, missing = self.reduce(f)
        if missing is not None:
            return False, {"missing_exponent": missing}
        need = self.vanish_from if required_precision is None else required_precision
        if r.precision[0] < need:
            raise PrecisionError(f"remainder certified below t^{r.precision[0]}, need t^{need}")
        if not r.is_zero():
            return False, {"remainder_exponent": r.support()[0][0]}
        return True, {}

    def required_precision(self) -> int:
        """Remainders must be certified through every window pole order plus one."""
        return self.vanish_from + self.window_pole

    def shifted(self, d: int) -> "SeriesBasis":
        return SeriesBasis([w.shift((d,)) for w in self.witnesses], self.vanish_from + d,
                           self.window_pole - d, self.field)


Model = LinearSubspaceModel | SeriesBasis


@dataclass
class KricheverPair:
    n: int
    field: Field
    B: Model
    W: tuple[Model, ...]
    window: Window | None
    precision: int | None
    data: GeometricData | None = None

    @property
    def is_cone(self) -> bool:
        return isinstance(self.B, LinearSubspaceModel)

    def records(self) -> list[str]:
        out = [f"record=pair n={self.n} field={self.field.tag} rank={len(self.W)} "
               f"kind={'cone' if self.is_cone else 'basis'}"
               + (f" window={self.window}" if self.window else "")
               + (f" precision={self.precision}" if self.precision is not None else "")]
        from .series import format_series
        for name, model in [("B", self.B)] + [(f"W{i}", w) for i, w in enumerate(self.W)]:
            if isinstance(model, LinearSubspaceModel):
                out.append(f"record=model space={name} cone={str(model).replace(' ', '')}")
            else:
                for v, w in model.pivots.items():
                    if -v <= model.window_pole:
                        out.append(f"record=witness space={name} pole={-v} series={format_series(w)}")
        return out


# -------------------------------------------------------------------- phi
def top_face(n: int) -> Simplex:
    return tuple(range(n))


def _elliptic_basis(x: TruncatedSeries, y: TruncatedSeries, max_pole: int) -> list[TruncatedSeries]:
    field = x.field
    out = [TruncatedSeries.constant(1, 1, field)]
    powers = [TruncatedSeries.constant(1, 1, field)]
    while 2 * len(powers) <= max_pole + 2:
        powers.append(series_mul(powers[-1], x))
    for p in range(2, max_pole + 1):
        out.append(powers[p // 2] if p % 2 == 0 else series_mul(powers[(p - 3) // 2], y))
    return out


def phi(data: GeometricData) -> KricheverPair:
    s = data.scheme
    if isinstance(s, IdealPoint):
        raise UsageError("m_Q is not locally free; the pair (B, W) is defined for vector bundles")
    if isinstance(s, (ProjSpace, ProjLine)):
        window = data.resolved_window()
        top = top_face(s.n)
        B = proj_space_family(s.n, 0, data.field)[top]
        W = tuple(proj_space_family(s.n, d, data.field)[top] for d in data.bundle)
        return KricheverPair(s.n, data.field, B, W, window, None, data)
    if isinstance(s, Elliptic):
        validate_elliptic(s.a, s.b, data.field)
        N, M = data.precision, data.max_pole
        x, y = elliptic_expansions(s.a, s.b, N, data.field)
        raw = _elliptic_basis(x, y, 2 * M)
        B = SeriesBasis(raw, vanish_from=1, window_pole=M, field=data.field)
        if B.min_precision < B.required_precision():
            raise PrecisionError(
                f"precision {N} certifies witnesses only below t^{B.min_precision}; "
                f"need t^{B.required_precision()} for pole orders up to {M}")
        W = tuple(B.shifted(d) for d in data.bundle)
        return KricheverPair(1, data.field, B, W, None, N, data)
    raise UsageError(f"unsupported scheme {s!r}")


# ----------------------------------------------------------- closure checks
def _cone_closure(left: LinearSubspaceModel, right: LinearSubspaceModel, target: LinearSubspaceModel,
                  window: Window, check: str, unit: bool) -> LawReport:
    grid = window.grid()
    a = grid[left.mask(grid)]
    b = grid[right.mask(grid)]
    violations = []
    if unit and not left.contains_monomial((0,) * window.n):
        violations.append({"missing": "unit"})
    checked = 0
    for start in range(0, len(a), 256):
        block = a[start:start + 256]
        sums = (block[:, None, :] + b[None, :, :]).reshape(-1, window.n)
        ok = target.cone.mask(sums)
        checked += len(sums)
        if not ok.all():
            k = int(np.flatnonzero(~ok)[0])
            i, j = divmod(k, len(b))
            violations.append({"left": tuple(int(v) for v in block[i]),
                               "right": tuple(int(v) for v in b[j])})
            break
    return LawReport(check, not violations, checked, violations)


def _basis_closure(left: SeriesBasis, right: SeriesBasis, target: SeriesBasis, check: str,
                   symmetric: bool, unit: bool) -> LawReport:
    violations = []
    if unit:
        one = TruncatedSeries.constant(1, 1, left.field)
        if not left.contains(one)[0]:
            violations.append({"missing": "unit"})
    lw = left.window_witnesses()
    rw = right.window_witnesses()
    need = target.required_precision()
    checked = 0
    for i, f in enumerate(lw):
        for j, g in enumerate(rw):
            if symmetric and j < i:
                continue
            prod = series_mul(f, g)
            ok, detail = target.contains(prod, need)
            checked += 1
            if not ok:
                violations.append({"left_pole": -zn_valuation(f), "right_pole": -zn_valuation(g), **detail})
    return LawReport(check, not violations, checked, violations)


def check_ring_closure(B: Model, window: Window | None = None) -> LawReport:
    """1 in B and B.B within B on the window (cones) or witness window (bases)."""
    if isinstance(B, SeriesBasis):
        return _basis_closure(B, B, B, "ring_closure", True, True)
    if window is None:
        raise UsageError("cone closure needs a window")
    return _cone_closure(B, B, B, window, "ring_closure", True)


def check_module_closure(B: Model, W: Model | Iterable[Model], window: Window | None = None) -> LawReport:
    Ws = [W] if isinstance(W, (LinearSubspaceModel, SeriesBasis)) else list(W)
    reports = []
    for k, Wi in enumerate(Ws):
        if isinstance(B, SeriesBasis):
            reports.append(_basis_closure(B, Wi, Wi, "module_closure", False, False))
        else:
            if window is None:
                raise UsageError("cone closure needs a window")
            reports.append(_cone_closure(B, Wi, Wi, window, "module_closure", False))
        for v in reports[-1].violations:
            v["summand"] = k
    return LawReport("module_closure", all(r.passed for r in reports),
                     sum(r.checked for r in reports), [v for r in reports for v in r.violations])


# -------------------------------------------------------- one image suffices
def recover_sigma_models(model: LinearSubspaceModel, n: int) -> dict[Simplex, MonomialCone]:
    """Every A_sigma from the single image A_{(0..n-1)} and standard subspaces."""
    out = {}
    for s in all_simplices(n):
        with_n = tuple(sorted(set(s) | {n}))
        omitted = [j for j in range(n) if j not in with_n]
        std = standard_constraint_cone(n, omitted)
        out[s] = std if n in s else cone_intersect(model.cone, std)
    return out


def check_one_image_suffices(model: LinearSubspaceModel, fam: SubspaceFamily, window: Window) -> LawReport:
    rec = recover_sigma_models(model, fam.n)
    grid = window.grid()
    violations = []
    for s, cone in rec.items():
        bad = cone.mask(grid) != fam.models[s].cone.mask(grid)
        if bad.any():
            violations.append({"sigma": s, "exponent": tuple(int(v) for v in grid[np.flatnonzero(bad)[0]])})
    return LawReport("one_image", not violations, len(rec), violations)


# ------------------------------------------------------------- reductions
@dataclass
class ReductionResult:
    pieces: dict[int, dict[str, set]]
    dims: dict[int, dict[str, int]]
    mismatches: list[dict] = dc_field(default_factory=list)

    @property
    def agree(self) -> bool:
        return not self.mismatches


def _graded_piece(model: LinearSubspaceModel, window: Window, m: int) -> set:
    """Image of (model & K(m)) in K(m)/K(m+1), on the window's monomials."""
    out = set()
    for e in model.cone.points(window):
        if e[-1] < m:
            continue
        s = graded_slice(TruncatedSeries.monomial(e, model.field), m)
        out.update(s.support())
    return out


def graded_reduction(pair: KricheverPair, m_range: Iterable[int]) -> ReductionResult:
    """Graded pieces of (B, W) compared with phi of the restricted data on Y_1
    (bundle F(-m Y_1)|Y_1, i.e. twists shifted by -m)."""
    if pair.n < 2 or not pair.is_cone:
        raise UsageError("graded_reduction needs a cone pair with n >= 2")
    window = pair.window
    lower = window.drop_last()
    twists = pair.data.bundle if pair.data else None
    pieces, dims, mismatches = {}, {}, []
    for m in m_range:
        got = {"B": _graded_piece(pair.B, window, m)}
        for i, Wi in enumerate(pair.W):
            got[f"W{i}"] = _graded_piece(Wi, window, m)
        reduced = phi(GeometricData(ProjSpace(pair.n - 1), pair.field,
                                    twists=(-m,) + tuple(d - m for d in twists), window=lower))
        want = {"B": set(reduced.W[0].cone.points(lower))}
        for i in range(len(pair.W)):
            want[f"W{i}"] = set(reduced.W[i + 1].cone.points(lower))
        for key in got:
            diff = got[key] ^ want[key]
            if diff:
                mismatches.append({"m": m, "space": key, "exponent": min(diff)})
        pieces[m] = got
        dims[m] = {k: len(v) for k, v in got.items()}
    return ReductionResult(pieces, dims, mismatches)


# ---------------------------------------------------------- Hilbert data
@dataclass
class HilbertReport:
    dims: dict[int, int]
    unreliable: bool

    def sequence(self) -> list[int]:
        return [self.dims[m] for m in sorted(self.dims)]


def affine_part(model: LinearSubspaceModel, n: int) -> MonomialCone:
    """A_(0) = A_{(0..n-1)} & A_{(0,n)}, the affine coordinate ring of X - Y_1."""
    return cone_intersect(model.cone, standard_constraint_cone(n, range(1, n)))


def hilbert_dims(pair: KricheverPair, m_range: Iterable[int], which: str = "B") -> HilbertReport:
    """dim(A_(0) & K(-m)) per m; for n = 1 A_(0) is B itself."""
    model = pair.B if which == "B" else pair.W[int(which[1:])]
    dims, unreliable = {}, False
    if isinstance(model, SeriesBasis):
        ws = model.window_witnesses()
        lowest = min(zn_valuation(w) for w in ws)
        for m in m_range:
            if m > model.window_pole:
                unreliable = True
            cols = list(range(lowest, -m))
            rows = [[w[(v,)] for w in ws] for v in cols]
            dims[m] = len(ws) - (linalg.rank(rows, model.field) if rows else 0)
        return HilbertReport(dims, unreliable)
    cone = affine_part(model, pair.n)
    grid = pair.window.grid()
    inside = cone.mask(grid)
    boundary = pair.window.boundary_mask(grid)
    for m in m_range:
        sel = inside & (grid[:, -1] >= -m)
        dims[m] = int(sel.sum())
        unreliable = unreliable or bool((sel & boundary).any())
    return HilbertReport(dims, unreliable)


def hilbert_oracle(kind: str, n: int, m: int) -> int:
    if kind == "elliptic":
        return 1 if m == 0 else m
    return comb(m + n, n)


# ----------------------------------------------------------- reconstruction
@dataclass
class ReconstructionResult:
    kind: str
    genus: int
    gaps: list[int]
    params: dict[str, object] = dc_field(default_factory=dict)

    def record(self) -> str:
        from .field import format_scalar
        parts = [f"record=reconstruct kind={self.kind} genus={self.genus}",
                 "gaps={" + ",".join(map(str, self.gaps)) + "}"]
        parts += [f"{k}={format_scalar(v)}" for k, v in sorted(self.params.items())]
        return " ".join(parts)


def gap_sequence(B: Model, window: Window | None = None) -> list[int]:
    if isinstance(B, SeriesBasis):
        poles = set(B.pole_orders())
        top = B.window_pole
    else:
        top = -window.bounds[0][0]
        poles = {m for m in range(top + 1) if B.contains_monomial((-m,))}
    return [m for m in range(1, top + 1) if m not in poles]


def _short_weierstrass(c, field: Field):
    """Kernel vector over [1, X, Y, X^2, XY, X^3, Y^2] -> short form (A, B)."""
    c = [x / c[6] for x in c]
    if c[5] != -1:
        raise InconsistentInputError("relation does not have unit leading coefficients")
    a1, a3, a2, a4, a6 = c[4], c[2], -c[3], -c[1], -c[0]
    b2 = a1 * a1 + 4 * a2
    b4 = 2 * a4 + a1 * a3
    b6 = a3 * a3 + 4 * a6
    c4 = b2 * b2 - 24 * b4
    c6 = -b2 ** 3 + 36 * b2 * b4 - 216 * b6
    return -c4 / field(48), -c6 / field(864)


def reconstruct_affine_ring(pair: KricheverPair, hint: str | None = None) -> ReconstructionResult:
    """Recover the curve from B: genus from the gap sequence, and for genus 1
    the short Weierstrass coefficients from the pole-order 2 and 3 witnesses."""
    if pair.n != 1:
        raise UsageError("reconstruction is implemented for curves (n = 1)")
    gaps = gap_sequence(pair.B, pair.window)
    if not gaps:
        if hint not in (None, "p1"):
            raise InconsistentInputError(f"hint {hint!r} but B has no gaps (genus 0)")
        return ReconstructionResult("p1", 0, [])
    if gaps != [1]:
        raise InconsistentInputError(f"gap sequence {gaps} is not that of a genus-1 curve")
    if hint not in (None, "elliptic"):
        raise InconsistentInputError(f"hint {hint!r} but B has gap sequence {{1}}")
    B = pair.B
    if pair.precision is None or pair.precision < 24:
        raise PrecisionError(f"reconstruction needs precision >= 24 (4 x pole order 6), got {pair.precision}")
    X, Y = B.pivots[-2], B.pivots[-3]
    one = TruncatedSeries.constant(1, 1, pair.field)
    mons = [one, X, Y, X * X, X * Y, X * X * X, Y * Y]
    top = min(m.precision[0] for m in mons)
    rows = [[m[(v,)] for m in mons] for v in range(-6, int(top))]
    kernel = linalg.nullspace(rows, pair.field, len(mons))
    if not kernel:
        raise PrecisionError("no relation among 1, X, Y, X^2, XY, X^3, Y^2 within precision")
    if len(kernel) > 1:
        raise InconsistentInputError(f"{len(kernel)} independent relations found")
    a, b = _short_weierstrass(kernel[0], pair.field)
    return ReconstructionResult("elliptic", 1, gaps, {"a": a, "b": b})


# ----------------------------------------------------------- counterexample
@dataclass
class CounterexampleReport:
    position: str
    sheaf: str
    identity: str
    violated: bool
    witness: tuple | None
    dim_small: int
    dim_intersection: int

    def record(self) -> str:
        w = "none" if self.witness is None else "(" + ",".join(map(str, self.witness)) + ")"
        return (f"record=counterexample position={self.position} sheaf={self.sheaf} "
                f"identity={self.identity.replace(' ', '')} violated={int(self.violated)} witness={w} "
                f"dim_small={self.dim_small} dim_intersection={self.dim_intersection}")


_CASES = {"off-y1": ((0,), (0, 1), (0, 2)), "on-y1-off-y2": ((1,), (0, 1), (1, 2))}


def counterexample_check(position: str, sheaf: str = "mQ", field: Field = QQ,
                         window: Window | None = None, q=None) -> CounterexampleReport:
    """Compare A_small with A_s1 & A_s2 for m_Q (expected to differ) or O_X."""
    if position not in _CASES:
        raise UsageError(f"position must be one of {sorted(_CASES)}")
    window = window or Window.cube(2, 3)
    if sheaf == "mQ":
        fam = ideal_point_family(position, field, q)
    elif sheaf == "O":
        fam = proj_space_family(2, 0, field)
    else:
        raise UsageError(f"sheaf must be 'mQ' or 'O', got {sheaf!r}")
    small, s1, s2 = _CASES[position]
    inter = fam[s1].intersect(fam[s2])
    witness = None
    # nearest-to-origin witness first, so 1 = z^0 shows up when it is one
    for e in sorted(window.points(), key=lambda e: (sum(map(abs, e)), e)):
        if inter.contains_monomial(e) != fam[small].contains_monomial(e):
            witness = e
            break
    d_small = fam[small].graded_dimension(window)
    d_inter = inter.graded_dimension(window)
    ident = f"A{small} = A{s1} & A{s2}"
    return CounterexampleReport(position, sheaf, ident, witness is not None or d_small != d_inter,
                                witness, d_small, d_inter)
