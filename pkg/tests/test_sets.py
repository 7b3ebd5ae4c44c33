from fractions import Fraction as F
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from higherconvex import sets as S
from higherconvex.errors import CapExceeded, MonoidMismatch, ParseError, ZeroDilation
from higherconvex.sets import ADDITIVE, MULTIPLICATIVE, GroupedSet


def brute(A, m, n):
    op = A.monoid
    out = set()
    for plus in product(A.elements, repeat=m):
        for minus in product(A.elements, repeat=n):
            acc = op.identity
            for x in plus:
                acc = op.op(acc, x)
            for x in minus:
                acc = op.diff(acc, x)
            out.add(acc)
    return sorted(out)


# ---------------------------------------------------------------- scalars

def test_scalar_coercion():
    assert S.scalar(3) == 3
    assert S.scalar("6/4") == F(3, 2)
    assert S.scalar(F(1, 3)) == F(1, 3)
    with pytest.raises(TypeError):
        S.scalar(0.5)
    with pytest.raises(TypeError):
        S.scalar(True)


@pytest.mark.parametrize("text", ["", "1/0", "x", "1.5", "1/2/3"])
def test_parse_scalar_rejects(text):
    with pytest.raises(ParseError):
        S.parse_scalar(text)


def test_format_scalar_canonical():
    assert S.format_scalar(F(4, 2)) == "2"
    assert S.format_scalar(F(-6, 4)) == "-3/2"


# ------------------------------------------------------------- GroupedSet

def test_construction_sorts_and_dedups():
    A = GroupedSet([3, 1, 1, "1/2"])
    assert A.elements == (F(1, 2), F(1), F(3))
    assert 3 in A and 2 not in A and 0.5 not in A
    assert A.min == F(1, 2) and A.max == 3


def test_immutable():
    A = GroupedSet([1])
    with pytest.raises(AttributeError):
        A.elements = ()


def test_multiplicative_needs_positive():
    with pytest.raises(ValueError):
        GroupedSet([0, 1], MULTIPLICATIVE)


def test_equality_respects_monoid():
    assert GroupedSet([1, 2]) != GroupedSet([1, 2], MULTIPLICATIVE)
    assert hash(GroupedSet([1, 2])) == hash(GroupedSet([2, 1]))


# --------------------------------------------------------------- combine

def test_combine_additive():
    A = GroupedSet([1, 2, 4])
    assert [int(x) for x in S.combine(A, A)] == [2, 3, 4, 5, 6, 8]


def test_combine_mismatch():
    with pytest.raises(MonoidMismatch):
        S.combine(GroupedSet([1]), GroupedSet([1], MULTIPLICATIVE))


def test_iterated_small_examples():
    assert [int(x) for x in S.iterated_combine(GroupedSet([0, 1]), 2, 1)] == [-1, 0, 1, 2]
    G = GroupedSet([2, 4, 8], MULTIPLICATIVE)
    assert S.iterated_combine(G, 2, 1).elements == tuple(F(2) ** e for e in range(-1, 6))
    assert S.iterated_combine(G, 1, 0) == G


def test_iterated_bad_arguments():
    with pytest.raises(ValueError):
        S.iterated_combine(GroupedSet([1]), 0, 1)


def test_invert_both_monoids():
    assert S.invert(GroupedSet([1, 3])).elements == (-3, -1)
    assert S.invert(GroupedSet([2, 4], MULTIPLICATIVE)).elements == (F(1, 4), F(1, 2))


def test_translate_and_dilate():
    A = GroupedSet([1, 2])
    assert S.translate(A, "1/2").elements == (F(3, 2), F(5, 2))
    assert S.dilate(A, -2).elements == (-4, -2)
    with pytest.raises(ZeroDilation):
        S.dilate(A, 0)
    with pytest.raises(MonoidMismatch):
        S.translate(A.retag(MULTIPLICATIVE), 1)


def test_cap_enforced():
    A = GroupedSet(range(0, 1000, 7))
    with pytest.raises(CapExceeded):
        S.iterated_combine(A, 3, 0, cap=100)


def test_cap_env(monkeypatch):
    monkeypatch.setenv(S.CAP_ENV, "10")
    with pytest.raises(CapExceeded):
        S.iterated_size(GroupedSet(range(20)), 2)


def test_rational_elements():
    A = GroupedSet(["1/2", "1/3", 1])
    assert list(S.iterated_combine(A, 2, 1)) == brute(A, 2, 1)


def test_wide_values_match_brute_force():
    # values near 2^70 force the multi-limb path
    A = GroupedSet([2 ** 70, 2 ** 70 + 3, -(2 ** 69), 5, 2 ** 64 - 1])
    assert list(S.iterated_combine(A, 2, 1)) == brute(A, 2, 1)
    assert list(S.iterated_combine(A, 1, 2)) == brute(A, 1, 2)


def test_wide_multiplicative_matches_brute_force():
    A = GroupedSet([F(2 ** 40, 3), F(5, 2 ** 35), 7, F(3 ** 30, 11)], MULTIPLICATIVE)
    assert list(S.iterated_combine(A, 2, 1)) == brute(A, 2, 1)


def test_bitmap_and_sort_paths_agree():
    dense = GroupedSet(range(50))
    sparse = GroupedSet([x * x * x for x in range(50)])
    assert list(S.iterated_combine(dense, 2, 1)) == brute(dense, 2, 1)
    assert S.iterated_size(sparse, 2) == len({a + b for a in sparse for b in sparse})


@settings(max_examples=60, deadline=None)
@given(st.lists(st.fractions(min_value=-20, max_value=20, max_denominator=6), min_size=1, max_size=6),
       st.integers(1, 3), st.integers(0, 2))
def test_iterated_matches_brute_additive(xs, m, n):
    A = GroupedSet(xs)
    assert list(S.iterated_combine(A, m, n)) == brute(A, m, n)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.fractions(min_value=F(1, 7), max_value=30, max_denominator=7), min_size=1, max_size=5),
       st.integers(1, 3), st.integers(0, 2))
def test_iterated_matches_brute_multiplicative(xs, m, n):
    A = GroupedSet(xs, MULTIPLICATIVE)
    assert list(S.iterated_combine(A, m, n)) == brute(A, m, n)


# ------------------------------------------------------------ text format

def test_text_round_trip(tmp_path):
    A = GroupedSet(["-7/3", 0, 5, "1/2"])
    path = tmp_path / "a.txt"
    S.write_set(path, A)
    assert S.read_set(path) == A
    G = GroupedSet([1, "3/2"], MULTIPLICATIVE)
    assert S.loads(S.dumps(G)) == G


def test_loads_comments_and_override():
    text = "# a comment\n#monoid: multiplicative\n2\n\n4/2\n3\n"
    A = S.loads(text)
    assert A.monoid is MULTIPLICATIVE and A.elements == (2, 3)
    assert S.loads(text, ADDITIVE).monoid is ADDITIVE


def test_loads_errors():
    with pytest.raises(ParseError):
        S.loads("1\nabc\n")
    with pytest.raises(ParseError):
        S.loads("#monoid: ring\n1\n")
    with pytest.raises(ParseError):
        S.loads("#monoid: multiplicative\n-1\n")
