"""Lattice models of the subspaces A_sigma(F) inside k((z1))...((zn)).

A subspace is a cone of exponent vectors cut out by affine integer
inequalities, optionally refined by linear conditions on coefficients.
Everything here is evaluated pointwise on finite windows; there is no
polyhedral machinery.
"""
from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field as dc_field
from typing import Callable, Iterable, Mapping

import numpy as np

from . import linalg
from .errors import UsageError
from .field import QQ, Field
from .series import Exponent, Window

Simplex = tuple[int, ...]


@dataclass(frozen=True)
class Inequality:
    """coeffs . e + const >= 0."""

    coeffs: tuple[int, ...]
    const: int = 0

    def holds(self, e: Exponent) -> bool:
        return sum(a * x for a, x in zip(self.coeffs, e)) + self.const >= 0

    def __str__(self):
        terms = [f"{a}*i{k + 1}" for k, a in enumerate(self.coeffs)]
        return " + ".join(terms + [str(self.const)]) + " >= 0"

    @classmethod
    def parse(cls, text: str, n: int) -> "Inequality":
        lhs, sep, rhs = text.partition(">=")
        if not sep or rhs.strip() != "0":
            raise UsageError(f"expected '<affine form> >= 0', got {text!r}")
        coeffs = [0] * n
        const = 0
        for sign, body in re.findall(r"([+-]?)\s*([^+-]+)", lhs.replace(" ", "")):
            s = -1 if sign == "-" else 1
            m = re.fullmatch(r"(-?\d+)\*i(\d+)|i(\d+)|(-?\d+)", body)
            if m is None:
                raise UsageError(f"bad inequality term {body!r}")
            if m.group(4) is not None:
                const += s * int(m.group(4))
                continue
            k = int(m.group(2) or m.group(3))
            if not 1 <= k <= n:
                raise UsageError(f"variable i{k} out of range for n={n}")
            coeffs[k - 1] += s * int(m.group(1) or 1)
        return cls(tuple(coeffs), const)


@dataclass(frozen=True)
class MonomialCone:
    """{e in Z^n : every inequality holds}; no inequalities means all of Z^n."""

    n: int
    constraints: tuple[Inequality, ...] = ()

    def __post_init__(self):
        for c in self.constraints:
            if len(c.coeffs) != self.n:
                raise UsageError(f"inequality {c} does not live in Z^{self.n}")

    def contains(self, e: Exponent) -> bool:
        if len(e) != self.n:
            raise UsageError(f"exponent {e} is not in Z^{self.n}")
        return all(c.holds(e) for c in self.constraints)

    def mask(self, grid: np.ndarray) -> np.ndarray:
        """Vectorized membership for an (N, n) array of exponents."""
        out = np.ones(len(grid), dtype=bool)
        for c in self.constraints:
            out &= grid @ np.asarray(c.coeffs, dtype=np.int64) + c.const >= 0
        return out

    def points(self, window: Window) -> list[Exponent]:
        g = window.grid()
        return [tuple(int(x) for x in row) for row in g[self.mask(g)]]

    def slice_last(self, m: int) -> "MonomialCone":
        """The cone in n-1 variables obtained by fixing e_n = m."""
        return MonomialCone(self.n - 1, tuple(
            Inequality(c.coeffs[:-1], c.const + c.coeffs[-1] * m) for c in self.constraints))

    def __str__(self):
        if not self.constraints:
            return "all"
        return "; ".join(str(c) for c in self.constraints)


def cone_contains(c: MonomialCone, e: Exponent) -> bool:
    return c.contains(e)


def cone_intersect(c1: MonomialCone, c2: MonomialCone) -> MonomialCone:
    if c1.n != c2.n:
        raise UsageError(f"cannot intersect cones in Z^{c1.n} and Z^{c2.n}")
    return MonomialCone(c1.n, c1.constraints + c2.constraints)


def standard_constraint_cone(n: int, omitted: Iterable[int]) -> MonomialCone:
    """{e : e_{n-j} >= 0 for every omitted vertex j}."""
    cons = []
    for j in sorted(set(omitted)):
        if not 0 <= j <= n - 1:
            raise UsageError(f"omitted index {j} outside 0..{n - 1}")
        coeffs = [0] * n
        coeffs[n - j - 1] = 1
        cons.append(Inequality(tuple(coeffs)))
    return MonomialCone(n, tuple(cons))


@dataclass(frozen=True)
class CoefficientConstraint:
    """A linear functional sum_e weight(e) * c_e that must vanish.

    ``weight`` is defined on every exponent so the functional restricts to
    any window; ``label`` is what gets printed.
    """

    weight: Callable[[Exponent], object]
    label: str

    @classmethod
    def finite(cls, weights: Mapping[Exponent, object], label: str = "") -> "CoefficientConstraint":
        table = {tuple(k): v for k, v in weights.items()}
        return cls(lambda e: table.get(tuple(e), 0), label or f"finite{sorted(table)}")


@dataclass(frozen=True)
class LinearSubspaceModel:
    cone: MonomialCone
    coefficient_constraints: tuple[CoefficientConstraint, ...] = ()
    field: Field = QQ

    @property
    def n(self) -> int:
        return self.cone.n

    def contains_monomial(self, e: Exponent) -> bool:
        if not self.cone.contains(e):
            return False
        return all(not self.field(c.weight(e)) for c in self.coefficient_constraints)

    def contains_vector(self, coeffs: Mapping[Exponent, object]) -> bool:
        """Membership of a finite combination sum c_e z^e."""
        if not all(self.cone.contains(e) for e, c in coeffs.items() if c):
            return False
        for con in self.coefficient_constraints:
            total = self.field.zero
            for e, c in coeffs.items():
                total = total + self.field(c) * self.field(con.weight(e))
            if total:
                return False
        return True

    def mask(self, grid: np.ndarray) -> np.ndarray:
        out = self.cone.mask(grid)
        if self.coefficient_constraints:
            for k in np.flatnonzero(out):
                e = tuple(int(x) for x in grid[k])
                if any(self.field(c.weight(e)) for c in self.coefficient_constraints):
                    out[k] = False
        return out

    def constraint_rows(self, points: list[Exponent]) -> list[list]:
        return [[self.field(c.weight(e)) for e in points] for c in self.coefficient_constraints]

    def window_basis(self, window: Window) -> list[dict[Exponent, object]]:
        """A basis of (model restricted to the window's monomials)."""
        pts = self.cone.points(window)
        if not self.coefficient_constraints:
            return [{e: self.field.one} for e in pts]
        rows = self.constraint_rows(pts)
        return [{e: c for e, c in zip(pts, v) if c}
                for v in linalg.nullspace(rows, self.field, len(pts))]

    def graded_dimension(self, window: Window, selector: Callable[[Exponent], bool] | None = None) -> int:
        return graded_dimension(self, window, selector)

    def intersect(self, other: "LinearSubspaceModel") -> "LinearSubspaceModel":
        return LinearSubspaceModel(cone_intersect(self.cone, other.cone),
                                   self.coefficient_constraints + other.coefficient_constraints,
                                   self.field)

    def __str__(self):
        s = str(self.cone)
        if self.coefficient_constraints:
            s += " | " + ", ".join(c.label for c in self.coefficient_constraints)
        return s


def graded_dimension(s: LinearSubspaceModel | MonomialCone, window: Window,
                     selector: Callable[[Exponent], bool] | None = None) -> int:
    """Lattice points of the cone in the window meeting ``selector``, minus
    the rank of the coefficient constraints on those points."""
    if isinstance(s, MonomialCone):
        s = LinearSubspaceModel(s)
    pts = s.cone.points(window)
    if selector is not None:
        pts = [e for e in pts if selector(e)]
    if not s.coefficient_constraints or not pts:
        return len(pts)
    return len(pts) - linalg.rank(s.constraint_rows(pts), s.field)


# ------------------------------------------------------------------ families
def all_simplices(n: int) -> list[Simplex]:
    """Every nonempty strictly increasing tuple in {0..n}, by size then lex."""
    verts = range(n + 1)
    return [s for k in range(1, n + 2) for s in itertools.combinations(verts, k)]


@dataclass(frozen=True)
class SubspaceFamily:
    """sigma -> A_sigma model for every simplex, plus the H^0 model."""

    n: int
    models: Mapping[Simplex, LinearSubspaceModel]
    h0: LinearSubspaceModel
    field: Field = QQ
    name: str = "family"
    meta: Mapping[str, object] = dc_field(default_factory=dict)

    def __post_init__(self):
        missing = [s for s in all_simplices(self.n) if s not in self.models]
        if missing:
            raise UsageError(f"family {self.name} lacks models for {missing}")

    def __getitem__(self, sigma: Iterable[int]) -> LinearSubspaceModel:
        return self.models[tuple(sorted(sigma))]

    @property
    def simplices(self) -> list[Simplex]:
        return all_simplices(self.n)

    @property
    def is_monomial(self) -> bool:
        return not any(m.coefficient_constraints for m in self.models.values()) \
            and not self.h0.coefficient_constraints

    def replace(self, sigma: Simplex, model: LinearSubspaceModel, name: str | None = None) -> "SubspaceFamily":
        models = dict(self.models)
        models[tuple(sigma)] = model
        return SubspaceFamily(self.n, models, self.h0, self.field, name or self.name, self.meta)

    def masks(self, grid: np.ndarray) -> dict[Simplex, np.ndarray]:
        return {s: self.models[s].mask(grid) for s in self.simplices}


@dataclass
class LawReport:
    """Outcome of an extensional law check on a window."""

    check: str
    passed: bool
    checked: int
    violations: list[dict] = dc_field(default_factory=list)

    def record(self) -> str:
        w = self.violations[0] if self.violations else None
        parts = ["record=law", f"check={self.check}", f"verdict={'pass' if self.passed else 'fail'}",
                 f"checked={self.checked}", f"violations={len(self.violations)}"]
        if w:
            parts.append("witness=" + ",".join(f"{k}:{_fmt(v)}" for k, v in sorted(w.items())))
        return " ".join(parts)


def _fmt(v) -> str:
    if isinstance(v, tuple):
        return "(" + ",".join(str(x) for x in v) + ")"
    return str(v)


def family_check_monotone(fam: SubspaceFamily, window: Window) -> LawReport:
    """sigma1 < sigma2 implies A_sigma1 within A_sigma2; H^0 within every A_sigma.

    Stops at the first violation, which is reported with its witness."""
    grid = window.grid()
    masks = fam.masks(grid)
    h0 = fam.h0.mask(grid)
    simplices = fam.simplices
    checked = 0
    for s1 in simplices:
        bad = h0 & ~masks[s1]
        checked += 1
        if bad.any():
            e = tuple(int(x) for x in grid[np.flatnonzero(bad)[0]])
            return LawReport("monotone", False, checked, [{"small": "H0", "big": s1, "exponent": e}])
    for s1 in simplices:
        for s2 in simplices:
            if len(s2) > len(s1) and set(s1) < set(s2):
                checked += 1
                bad = masks[s1] & ~masks[s2]
                if bad.any():
                    e = tuple(int(x) for x in grid[np.flatnonzero(bad)[0]])
                    return LawReport("monotone", False, checked,
                                     [{"small": s1, "big": s2, "exponent": e}])
    return LawReport("monotone", True, checked)


def family_check_intersections(fam: SubspaceFamily, window: Window) -> LawReport:
    """A_s1 and A_s2 both contain z^e exactly when A_{s1 & s2} does (H^0 if
    the simplices are disjoint).  All violating (pair, witness) records are
    collected, one witness per pair."""
    grid = window.grid()
    masks = fam.masks(grid)
    h0 = fam.h0.mask(grid)
    simplices = fam.simplices
    violations = []
    checked = 0
    for i, s1 in enumerate(simplices):
        for s2 in simplices[i:]:
            meet = tuple(sorted(set(s1) & set(s2)))
            small = masks[meet] if meet else h0
            both = masks[s1] & masks[s2]
            bad = both != small
            checked += 1
            if bad.any():
                k = np.flatnonzero(bad)[0]
                violations.append({"left": s1, "right": s2, "meet": meet or "H0",
                                   "exponent": tuple(int(x) for x in grid[k]),
                                   "side": "intersection-larger" if both[k] else "intersection-smaller"})
    return LawReport("intersections", not violations, checked, violations)
