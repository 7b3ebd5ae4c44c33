from fractions import Fraction as F

import pytest

from higherconvex import certified
from higherconvex.certified import Interval
from higherconvex.errors import NotKConvexFunction, PrecisionExhausted
from higherconvex.polynomial import (Polynomial, certify_nonvanishing, changes_sign, count_roots,
                                     isolate_real_roots, root_free_interval)


def test_arithmetic_and_evaluation():
    p = Polynomial([1, 0, 2])  # 2x^2 + 1
    assert p(F(1, 2)) == F(3, 2)
    assert p.degree == 2
    assert (p - p).is_zero() and (p - p).degree == -1
    assert p.derivative() == Polynomial([0, 4])
    assert p.derivative(3).is_zero()


def test_shift_and_delta():
    cube = Polynomial.monomial(3)
    assert cube.shift(1) == Polynomial([1, 3, 3, 1])
    # Delta_1 x^3 = 3x^2 + 3x + 1 and Delta_{1,1} x^3 = 6x + 6
    assert cube.delta(1) == Polynomial([1, 3, 3])
    assert cube.delta(1).delta(1) == Polynomial([6, 6])
    assert Polynomial.monomial(2).delta(1)(3) == 7


def test_isolation_is_exact():
    p = Polynomial([-2, 0, 1])  # roots +-sqrt 2
    roots = isolate_real_roots(p)
    assert len(roots) == 2
    for a, b, mult in roots:
        assert mult == 1
        assert a * a <= 2 <= b * b or b * b <= 2 <= a * a
    assert count_roots(p, F(0), F(2)) == 1
    assert count_roots(p, F(-2), F(2)) == 2


def test_changes_sign_ignores_even_roots():
    assert not changes_sign(Polynomial([1, -2, 1]), F(0), F(2))  # (x - 1)^2
    assert changes_sign(Polynomial([-1, 1]), F(0), F(2))
    assert not changes_sign(Polynomial([-1, 1]), F(1), F(2))  # root at the closed end


def test_certify_nonvanishing():
    p = Polynomial.monomial(5)
    certify_nonvanishing(p, range(1, 5), F(1), F(3))
    with pytest.raises(NotKConvexFunction):
        certify_nonvanishing(p, range(1, 5), F(-1), F(3))
    with pytest.raises(NotKConvexFunction):
        certify_nonvanishing(Polynomial([0, 1]), [2], F(0), F(1))


def test_root_free_interval_is_certified():
    p = Polynomial([0, -3, 0, 1])  # x^3 - 3x: f' roots +-1, f'' root 0
    lo, hi = root_free_interval(p, [1, 2, 3])
    assert lo < hi
    certify_nonvanishing(p, [1, 2, 3], lo, hi)
    assert not (lo <= 1 <= hi) and not (lo <= 0 <= hi) and not (lo <= -1 <= hi)


def test_root_free_interval_without_roots():
    lo, hi = root_free_interval(Polynomial([1, 1]), [1])
    assert lo < hi


# ------------------------------------------------------------- certified

def test_log_enclosure_contains_truth():
    box = certified.log_enclosure(F(8), 128)
    assert box.lo < box.hi
    three_log2 = certified.log_enclosure(F(2), 128).scaled(3)
    assert box.lo <= three_log2.hi and three_log2.lo <= box.hi
    assert box.width < F(1, 2 ** 100)


def test_compare_and_refine():
    sqrt2 = lambda p: certified.power_enclosure(F(2), F(1, 2), p)  # noqa: E731
    assert certified.compare(sqrt2, lambda p: Interval.point(F(141421, 100000))) == 1
    assert certified.compare(sqrt2, lambda p: Interval.point(F(141422, 100000))) == -1
    box = certified.refine(sqrt2, F(1, 2 ** 200))
    assert box.width < F(1, 2 ** 200) and box.lo ** 2 < 2 < box.hi ** 2


def test_compare_exhausts_on_equal_values():
    four_log2 = lambda p: certified.log_enclosure(F(16), p)  # noqa: E731
    two_log4 = lambda p: certified.log_enclosure(F(4), p).scaled(2)  # noqa: E731
    with pytest.raises(PrecisionExhausted):
        certified.compare(four_log2, two_log4, ceiling=512)


def test_set_max_precision_validates():
    saved = certified.MAX_PRECISION
    try:
        certified.set_max_precision(256)
        assert certified.MAX_PRECISION == 256
        with pytest.raises(ValueError):
            certified.set_max_precision(8)
    finally:
        certified.set_max_precision(saved)
