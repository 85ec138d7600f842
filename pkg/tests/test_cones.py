import pytest
from hypothesis import given, strategies as st

from flagcohom.cones import (CoefficientConstraint, Inequality, LinearSubspaceModel, MonomialCone,
                             cone_contains, cone_intersect, family_check_intersections,
                             family_check_monotone, graded_dimension, standard_constraint_cone)
from flagcohom.errors import UsageError
from flagcohom.field import GF
from flagcohom.presets import ideal_point_family, proj_space_family
from flagcohom.series import Window

I1 = MonomialCone(2, (Inequality((1, 0)),))
I2 = MonomialCone(2, (Inequality((0, 1)),))


def test_standard_constraint_cones():
    assert standard_constraint_cone(2, {0}) == I2
    assert standard_constraint_cone(2, set()).constraints == ()
    c = standard_constraint_cone(3, {0, 2})
    w = Window.cube(3, 2)
    assert c.points(w) == [e for e in w.points() if e[2] >= 0 and e[0] >= 0]
    with pytest.raises(UsageError):
        standard_constraint_cone(2, {2})


def test_cone_contains_examples():
    assert cone_contains(I1, (0, -5))
    assert not cone_contains(I1, (-1, 3))
    both = MonomialCone(2, (Inequality((1, 0)), Inequality((-1, -1))))
    assert cone_contains(both, (2, -2))


def test_cone_intersect_examples():
    w = Window.cube(2, 4)
    meet = cone_intersect(I1, I2)
    assert set(meet.points(w)) == {e for e in w.points() if e[0] >= 0 and e[1] >= 0}
    assert cone_intersect(I1, I1).points(w) == I1.points(w)
    empty = cone_intersect(I1, MonomialCone(2, (Inequality((-1, 0), -1),)))
    assert empty.points(Window.cube(2, 10)) == []


def test_graded_dimension_examples():
    assert graded_dimension(MonomialCone(2), Window(((0, 2), (0, 2)))) == 9
    tri = MonomialCone(2, (Inequality((1, 0)), Inequality((0, 1)), Inequality((-1, -1), 2)))
    assert graded_dimension(tri, Window.cube(2, 4)) == 6
    con = CoefficientConstraint.finite({(0, 0): 1, (1, 0): 1})
    assert graded_dimension(LinearSubspaceModel(tri, (con,)), Window.cube(2, 4)) == 5


def test_graded_dimension_selector():
    tri = MonomialCone(2, (Inequality((1, 0)), Inequality((0, 1)), Inequality((-1, -1), 2)))
    assert graded_dimension(tri, Window.cube(2, 4), lambda e: e[1] == 0) == 3


@pytest.mark.parametrize("text", ["1*i1 + -1*i2 + 3 >= 0", "i1 - 2*i2 >= 0", "-i2 + 4 >= 0"])
def test_inequality_parse(text):
    ineq = Inequality.parse(text, 2)
    assert Inequality.parse(str(ineq), 2) == ineq


@given(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), st.integers(-3, 3),
       st.tuples(st.integers(-6, 6), st.integers(-6, 6)))
def test_mask_matches_pointwise(coeffs, const, e):
    c = MonomialCone(2, (Inequality(coeffs, const),))
    w = Window.cube(2, 6)
    grid = w.grid()
    row = [tuple(int(x) for x in g) for g in grid].index(e)
    assert bool(c.mask(grid)[row]) == c.contains(e)


# ---------------------------------------------------------------- law checks
def test_p1_monotone():
    assert family_check_monotone(proj_space_family(1, 0), Window.cube(1, 6)).passed


def test_p2_monotone():
    assert family_check_monotone(proj_space_family(2, 0), Window.cube(2, 6)).passed


@pytest.mark.parametrize("d", range(-3, 4))
def test_p2_intersections(d):
    rep = family_check_intersections(proj_space_family(2, d), Window.cube(2, 6))
    assert rep.passed and not rep.violations


def test_shrunk_model_is_caught():
    fam = proj_space_family(2, 0)
    shrunk = LinearSubspaceModel(cone_intersect(fam[(0, 1)].cone, MonomialCone(2, (Inequality((0, -1), -5),))))
    bad = fam.replace((0, 1), shrunk)
    rep = family_check_monotone(bad, Window.cube(2, 6))
    assert not rep.passed
    w = rep.violations[0]
    assert w["small"] == "H0" or fam[w["small"]].contains_monomial(w["exponent"])
    assert not bad[w["big"]].contains_monomial(w["exponent"])


@pytest.mark.parametrize("position", ["off-y1", "on-y1-off-y2"])
def test_ideal_point_breaks_intersections(position):
    rep = family_check_intersections(ideal_point_family(position), Window.cube(2, 3))
    assert not rep.passed
    assert "record=law check=intersections verdict=fail" in rep.record()


def test_constraint_over_fp():
    F = GF(5)
    con = CoefficientConstraint.finite({(0,): 1, (1,): 4})
    model = LinearSubspaceModel(MonomialCone(1), (con,), F)
    # 1 + z is killed by 1 + 4 = 0 mod 5
    assert model.contains_vector({(0,): 1, (1,): 1})
    assert not model.contains_vector({(0,): 1})
