import csv
import io
import json
from fractions import Fraction as F

import pytest

from higherconvex.errors import BadFamily, CapExceeded, HypothesisViolated
from higherconvex.experiments import (CSV_HEADER, Family, check_corollary, check_theorem3, check_theorem4,
                                      check_threefold, growth_report, loglog_slope, oracle_iterated, parse_family,
                                      threefold_bound, threefold_holds)
from higherconvex.maps import IntegerPower, LogMap
from higherconvex.sets import MULTIPLICATIVE, GroupedSet, iterated_combine


# -------------------------------------------------------------------- oracle

def test_oracle_small_examples():
    A = GroupedSet([0, 1])
    assert oracle_iterated(A, 2, 1) == iterated_combine(A, 2, 1)
    B = GroupedSet([1, 4, 9])
    assert [int(x) for x in oracle_iterated(B, 2, 1)] == [-7, -4, -2, -1, 1, 4, 6, 7, 9, 12, 14, 17]
    assert oracle_iterated(B, 1, 0) == B


def test_oracle_rational_and_multiplicative():
    A = GroupedSet(["1/2", "2/3", 5])
    assert oracle_iterated(A, 2, 2) == iterated_combine(A, 2, 2)
    G = GroupedSet(["1/2", 3, 7], MULTIPLICATIVE)
    assert oracle_iterated(G, 2, 1) == iterated_combine(G, 2, 1)


def test_oracle_cap():
    with pytest.raises(CapExceeded):
        oracle_iterated(GroupedSet(range(0, 300, 7)), 2, 1, cap=10)


# ------------------------------------------------------------------ families

def test_families():
    assert Family("powers", F(3)).build(5).elements == (1, 8, 27, 64, 125)
    assert Family("ap", F(2)).build(4).elements == (1, 3, 5, 7)
    assert Family("geometric", F(1, 2)).build(3).elements == (F(1, 8), F(1, 4), F(1, 2))
    assert parse_family("random-convex order 2", 5) == Family("random-convex", F(2), 5)
    a = parse_family("random-convex 3", 11).build(20)
    assert a == parse_family("random-convex 3", 11).build(20)


@pytest.mark.parametrize("text", ["cosh 2", "powers", "powers 1/2", "geometric 1", "ap -1", "powers x"])
def test_bad_families(text):
    with pytest.raises(BadFamily):
        parse_family(text)


# ------------------------------------------------------------ theorem checks

def test_check_theorem3_rows():
    rep = check_theorem3("powers 3", [15], 2)
    (row,) = rep.rows
    assert row.verdict == "pass" and row.bound == F(3375, 16)
    assert row.measured == 20931
    ap = check_theorem3("ap 1", [15], 1)
    assert ap.rows[0].verdict == "expected-failure"
    assert ap.passed


def test_check_theorem4_rows():
    rep = check_theorem4(GroupedSet(range(1, 17)), IntegerPower(2), 1)
    (row,) = rep.rows
    assert row.verdict == "pass" and row.bound == 32 and row.measured == 120
    assert row.K == F(46, 16)
    log = check_theorem4(GroupedSet(range(2, 18)), LogMap(), 1)
    assert log.rows[0].verdict == "pass"
    small = check_theorem4(GroupedSet(range(1, 11)), IntegerPower(2), 1)
    assert small.rows[0].verdict == "too-small"
    trend = check_theorem4(GroupedSet(range(1, 65)), IntegerPower(3), 2)
    assert trend.rows[0].verdict == "report" and trend.rows[0].measured > 0


# ----------------------------------------------------------------- corollary

def test_corollary_part_one():
    rep = check_corollary(1, GroupedSet(range(1, 17)), 2, F(1, 2))
    (row,) = rep.rows
    assert row.sumset == 31
    assert row.measured == len(iterated_combine(GroupedSet(range(1, 17), MULTIPLICATIVE), 2, 1))


def test_corollary_part_two_uses_shifted_set():
    A = GroupedSet([2 ** n for n in range(1, 11)])
    rep = check_corollary(2, A, 2, F(1, 2))
    shifted = GroupedSet([a + 1 for a in A], MULTIPLICATIVE)
    assert rep.rows[0].measured == len(iterated_combine(shifted, 2, 1))


def test_corollary_part_three_and_polynomial_restriction():
    A = GroupedSet(range(1, 17))
    rep = check_corollary(3, A, 2, F(1, 2))
    squares = GroupedSet([a * a for a in A])
    assert rep.rows[0].measured == len(iterated_combine(squares, 2, 1))
    # x^3 - 3x: the derivatives of order 1..3 are root-free only on (1, inf) among these points
    B = GroupedSet(range(-10, 11))
    rep = check_corollary(3, B, 3, F(1, 2), poly=[0, -3, 0, 1])
    assert "restricted to 9 elements" in rep.rows[0].note


def test_corollary_hypothesis_violated():
    with pytest.raises(HypothesisViolated):
        check_corollary(1, GroupedSet([2 ** n for n in range(1, 21)]), 2, F(1, 10))
    with pytest.raises(HypothesisViolated):
        check_corollary(2, GroupedSet([2 ** n for n in range(1, 21)]), 2, F(1, 5))


# ---------------------------------------------------------------- threefold

def test_threefold_examples():
    rep = check_threefold(GroupedSet(range(1, 65)), assert_bound=True)
    row = rep.rows[0]
    assert row.tripling == 190 and row.verdict == "pass"
    assert rep.extras["additive_ratio"] == pytest.approx(5.454, abs=1e-3)
    gp = check_threefold(GroupedSet([2 ** n for n in range(1, 65)]), assert_bound=True)
    assert gp.rows[0].quotient == 190
    single = check_threefold(GroupedSet([3]), assert_bound=True)
    assert single.rows[0].bound == 0 and single.rows[0].verdict == "pass"


def test_threefold_holds_exactly():
    # 64: bound is 512 / 6^1.5; 35 clears it, 34 does not
    assert threefold_holds(64, 35) and not threefold_holds(64, 34)
    assert threefold_bound(64) == pytest.approx(34.837, abs=1e-3)
    # non powers of two go through certified logarithms
    b = threefold_bound(100)
    assert threefold_holds(100, int(b) + 1) and not threefold_holds(100, int(b))


# --------------------------------------------------------------- growth fits

def test_growth_cubes_slope():
    rep = growth_report("powers 3", [2], [7, 15, 31])
    slope = rep.extras["slope k=2"]
    assert 2.5 <= slope <= 3.2
    assert rep.extras["predicted exponent k=2"] == 3


def test_growth_ap_slope_near_one():
    rep = growth_report("ap 1", [1], [16, 32, 64, 128], mn=(3, 2))
    # |3A - 2A| = 5(N - 1) + 1 for an AP
    assert [r.measured for r in rep.rows] == [5 * (n - 1) + 1 for n in (16, 32, 64, 128)]
    assert rep.extras["slope k=1"] == pytest.approx(1.0, abs=0.03)


def test_growth_cap_rows_and_empty():
    rep = growth_report("powers 3", [3], [15], cap=1000)
    assert rep.rows[0].verdict == "cap-exceeded"
    assert growth_report("ap 1", [], []).rows == []


def test_loglog_slope():
    assert loglog_slope([2, 4, 8], [4, 16, 64]) == pytest.approx(2.0)
    assert loglog_slope([2], [4]) is None


def test_report_formats_are_deterministic():
    a = growth_report("random-convex 2", [1, 2], [8, 12], jobs=2)
    b = growth_report("random-convex 2", [1, 2], [8, 12], jobs=1)
    assert a.to_csv() == b.to_csv() and a.to_json() == b.to_json()
    rows = list(csv.reader(io.StringIO(a.to_csv())))
    assert rows[0] == CSV_HEADER and len(rows) == 5
    doc = json.loads(a.to_json())
    assert set(CSV_HEADER) <= set(doc["rows"][0])
