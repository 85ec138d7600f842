import random
from fractions import Fraction

import pytest

from flagcohom.cones import all_simplices, family_check_intersections, family_check_monotone
from flagcohom.complex import total_cohomology
from flagcohom.errors import DiscriminantError, PrecisionError, UsageError
from flagcohom.field import GF, QQ
from flagcohom.presets import (discriminant, elliptic_expansions, elliptic_residual,
                               ideal_point_family, p1_family, proj_space_family)
from flagcohom.series import Window, zn_valuation


def test_p2_top_cone_is_everything():
    fam = proj_space_family(2, 0)
    assert fam[(0, 1, 2)].cone.constraints == ()


def test_p2_h0_is_constants():
    fam = proj_space_family(2, 0)
    assert fam.h0.cone.points(Window.cube(2, 6)) == [(0, 0)]


def test_p2_twist_two_sections():
    assert proj_space_family(2, 2).h0.graded_dimension(Window.cube(2, 4)) == 6


@pytest.mark.parametrize("d,dim", [(0, 1), (3, 4), (-1, 0)])
def test_p1_sections(d, dim):
    fam = p1_family(d)
    assert fam.h0.graded_dimension(Window.cube(1, abs(d) + 2)) == dim


def test_p1_minus_one_acyclic():
    assert total_cohomology(p1_family(-1), Window.cube(1, 3)).dims == (0, 0)


def test_unsupported_dimension():
    with pytest.raises(UsageError):
        proj_space_family(4, 0)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_preset_families_pass_laws(n):
    for d in (-2, 0, 2):
        fam = proj_space_family(n, d)
        w = Window.cube(n, 4)
        assert family_check_monotone(fam, w).passed
        assert family_check_intersections(fam, w).passed


# --------------------------------------------------------------- elliptic
def _random_curve(rng, field):
    while True:
        a, b = rng.randint(-20, 20), rng.randint(-20, 20)
        if discriminant(a, b, field):
            return a, b


@pytest.mark.parametrize("field", [QQ, GF(1000000007), GF(101)])
def test_elliptic_residual_vanishes(field):
    rng = random.Random(7)
    for _ in range(20):
        a, b = _random_curve(rng, field)
        x, y = elliptic_expansions(a, b, 30, field)
        assert zn_valuation(x) == -2 and zn_valuation(y) == -3
        r = elliptic_residual(x, y, a, b)
        assert r.is_zero()
        # certified through the constant term and beyond
        assert r.precision[0] >= 30 - 6


def test_elliptic_rational_coefficients():
    x, y = elliptic_expansions(Fraction(1, 2), Fraction(-3, 7), 24, QQ)
    assert elliptic_residual(x, y, Fraction(1, 2), Fraction(-3, 7)).is_zero()


def test_elliptic_leading_terms():
    # x = t^-2 - a t^2 - b t^4 + ...
    x, _ = elliptic_expansions(3, 5, 20, QQ)
    assert x[(-2,)] == 1 and x[(0,)] == 0 and x[(2,)] == -3 and x[(4,)] == -5


def test_singular_curve():
    with pytest.raises(DiscriminantError):
        elliptic_expansions(0, 0, 20, QQ)
    with pytest.raises(DiscriminantError):
        elliptic_expansions(-3, 2, 20, QQ)


def test_small_characteristic_rejected():
    with pytest.raises(UsageError):
        elliptic_expansions(1, 1, 20, GF(3))


def test_precision_floor():
    with pytest.raises(PrecisionError):
        elliptic_expansions(1, 1, 6, QQ)


# ------------------------------------------------------------ ideal point
def test_off_y1_agrees_away_from_q():
    G, O = ideal_point_family("off-y1"), proj_space_family(2, 0)
    w = Window.cube(2, 4)
    for s in [(0, 1), (0, 2)]:
        assert G[s].cone.points(w) == O[s].cone.points(w)
        assert not G[s].coefficient_constraints


def test_off_y1_codimension_one():
    G, O = ideal_point_family("off-y1"), proj_space_family(2, 0)
    w = Window.cube(2, 3)
    assert G[(0,)].graded_dimension(w) == O[(0,)].graded_dimension(w) - 1


def test_on_y1_differs_at_vertex_one():
    G, O = ideal_point_family("on-y1-off-y2"), proj_space_family(2, 0)
    w = Window.cube(2, 3)
    assert G[(1,)].graded_dimension(w) < O[(1,)].graded_dimension(w)
    assert not G[(0,)].coefficient_constraints


def test_only_one_vertex_sees_q():
    for pos, seen in [("off-y1", (0,)), ("on-y1-off-y2", (1,))]:
        G = ideal_point_family(pos)
        touched = [s for s in all_simplices(2) if G[s].coefficient_constraints]
        assert touched == [seen]


@pytest.mark.parametrize("pos,q", [("off-y1", (1, 1, 0)), ("on-y1-off-y2", (1, 1, 1)),
                                   ("on-y1-off-y2", (1, 0, 0)), ("bogus", (1, 1, 1))])
def test_bad_point_positions(pos, q):
    with pytest.raises(UsageError):
        ideal_point_family(pos, QQ, q)
