from fractions import Fraction as F

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from higherconvex.convexity import convexity_order, forward_differences, function_convexity_check
from higherconvex.errors import DomainViolation, TooSmall
from higherconvex.experiments import random_convex
from higherconvex.maps import IntegerPower, LogMap, PolynomialMap, RealPower
from higherconvex.sets import GroupedSet


def test_forward_differences():
    assert forward_differences([1, 4, 9, 16]) == (3, 5, 7)
    assert forward_differences([5, 1]) == (-4,)  # index order is kept
    with pytest.raises(TooSmall):
        forward_differences([1])


@pytest.mark.parametrize("seq, order", [
    ([n * n for n in range(1, 11)], 1),
    ([n ** 3 for n in range(1, 11)], 2),
    ([2 ** n for n in range(1, 11)], 8),
    ([1, 2, 3, 4], 0),
])
def test_convexity_order(seq, order):
    assert convexity_order(GroupedSet(seq)).order == order


def test_report_profile_and_note():
    cubes = convexity_order([n ** 3 for n in range(1, 6)])
    assert cubes.direction_profile == (1, 1) and cubes.order == 2 and not cubes.note
    rep = convexity_order([2 ** n for n in range(1, 7)])
    assert rep.checkable_levels == 4 and rep.order == 4 and rep.note
    concave = convexity_order([1, 5, 8, 10])
    assert concave.order == 0 and concave.direction_profile[0] == -1


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 4), st.integers(6, 30), st.integers(0, 10 ** 6))
def test_random_convex_has_order(k, N, seed):
    assert convexity_order(random_convex(k, N, seed)).order >= k


def test_grid_check_polynomial():
    grid = range(1, 20)
    assert function_convexity_check(IntegerPower(5), 3, grid, (1, 2, 3))
    bad = function_convexity_check(PolynomialMap([0, -3, 0, 1]), 1, range(-3, 4), (1,))
    assert not bad and bad.violation[0] == 0
    assert "fail at level 0" in bad.describe()


def test_grid_check_log_and_real_power():
    check = function_convexity_check(LogMap(), 1, range(1, 30), (1,))
    assert check and check.directions == [1, -1]
    assert function_convexity_check(RealPower(F(5, 2)), 2, range(1, 12), (1, 2))


def test_grid_check_validates():
    with pytest.raises(ValueError):
        function_convexity_check(IntegerPower(3), 1, range(5), (1, 1))
    with pytest.raises(DomainViolation):
        function_convexity_check(LogMap(), 1, range(0, 5), (1,))
    f = PolynomialMap([0, 0, 1], domain=(0, 5))
    with pytest.raises(DomainViolation):
        function_convexity_check(f, 1, range(0, 6), (1,))
