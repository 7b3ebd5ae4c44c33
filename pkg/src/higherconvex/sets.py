"""Exact ordered sets of rationals and their sum/product set arithmetic.

A :class:`GroupedSet` is an immutable, strictly increasing tuple of
:class:`fractions.Fraction` tagged with the monoid its arithmetic uses.
``iterated_combine(A, m, n)`` is ``mA - nA`` for additive sets and
``A^(m) / A^(n)`` for multiplicative ones.
"""
from __future__ import annotations

import enum
import os
from bisect import bisect_left
from fractions import Fraction
from numbers import Rational

from . import _kernel
from .errors import CapExceeded, MonoidMismatch, ParseError, ZeroDilation

DEFAULT_CAP = 50_000_000
CAP_ENV = "HIGHERCONVEX_CAP"


def default_cap():
    raw = os.environ.get(CAP_ENV)
    return int(raw) if raw else DEFAULT_CAP


class Monoid(enum.Enum):
    ADDITIVE = "additive"
    MULTIPLICATIVE = "multiplicative"

    def op(self, x, y):
        return x + y if self is Monoid.ADDITIVE else x * y

    def inverse(self, x):
        return -x if self is Monoid.ADDITIVE else 1 / x

    def diff(self, x, y):
        """``x`` combined with the inverse of ``y``."""
        return x - y if self is Monoid.ADDITIVE else x / y

    @property
    def identity(self):
        return Fraction(0) if self is Monoid.ADDITIVE else Fraction(1)


ADDITIVE = Monoid.ADDITIVE
MULTIPLICATIVE = Monoid.MULTIPLICATIVE


def scalar(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.  Floats are refused."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(x, (int, Rational)):
        return Fraction(x)
    if isinstance(x, str):
        return parse_scalar(x)
    raise TypeError(f"cannot use {type(x).__name__} as an exact scalar")


def parse_scalar(text: str) -> Fraction:
    text = text.strip()
    try:
        if "/" in text:
            p, q = text.split("/")
            p, q = int(p), int(q)
            if q == 0:
                raise ZeroDivisionError
            return Fraction(p, q)
        return Fraction(int(text))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"not a rational literal: {text!r}") from None


def format_scalar(x: Fraction) -> str:
    x = Fraction(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class GroupedSet:
    """Immutable finite set of rationals, sorted ascending, with a monoid tag.

    Construction sorts and deduplicates its input, so ``GroupedSet([3, 1, 1])``
    holds ``(1, 3)``.  Multiplicative sets must be strictly positive.
    """

    __slots__ = ("elements", "monoid")

    def __init__(self, elements=(), monoid=ADDITIVE):
        monoid = Monoid(monoid)
        elems = tuple(sorted({scalar(x) for x in elements}))
        if monoid is MULTIPLICATIVE and elems and elems[0] <= 0:
            raise ValueError("multiplicative sets must contain only positive elements")
        object.__setattr__(self, "elements", elems)
        object.__setattr__(self, "monoid", monoid)

    @classmethod
    def _trusted(cls, elems, monoid):
        obj = object.__new__(cls)
        object.__setattr__(obj, "elements", tuple(elems))
        object.__setattr__(obj, "monoid", monoid)
        return obj

    def __setattr__(self, name, value):
        raise AttributeError("GroupedSet is immutable")

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    def __contains__(self, x):
        try:
            x = scalar(x)
        except TypeError:
            return False
        i = bisect_left(self.elements, x)
        return i < len(self.elements) and self.elements[i] == x

    def __eq__(self, other):
        if not isinstance(other, GroupedSet):
            return NotImplemented
        return self.monoid is other.monoid and self.elements == other.elements

    def __hash__(self):
        return hash((self.monoid, self.elements))

    def __repr__(self):
        body = ", ".join(format_scalar(x) for x in self.elements[:8])
        if len(self) > 8:
            body += f", ... ({len(self)} elements)"
        return f"GroupedSet({{{body}}}, {self.monoid.value})"

    @property
    def min(self):
        return self.elements[0]

    @property
    def max(self):
        return self.elements[-1]

    def retag(self, monoid):
        return GroupedSet(self.elements, monoid)

    def subset(self, elems):
        return GroupedSet._trusted(sorted(elems), self.monoid)


# --------------------------------------------------------------- operations

def _encode(A):
    if A.monoid is ADDITIVE:
        return _kernel.add_encode(A.elements)
    return _kernel.mul_encode(A.elements)


def _decode(state, monoid):
    if monoid is ADDITIVE:
        return GroupedSet._trusted(_kernel.add_decode(state), monoid)
    return GroupedSet._trusted(_kernel.mul_decode(state), monoid)


def _combine_states(sx, sy, monoid, cap):
    if monoid is ADDITIVE:
        return _kernel.add_combine(sx, sy, cap)
    return _kernel.mul_combine(sx, sy, cap)


def _invert_state(state, monoid):
    if monoid is ADDITIVE:
        return _kernel.add_negate(state)
    return _kernel.mul_invert(state)


def combine(X: GroupedSet, Y: GroupedSet, cap=None) -> GroupedSet:
    """``{x o y : x in X, y in Y}`` under the shared monoid operation."""
    if X.monoid is not Y.monoid:
        raise MonoidMismatch(f"cannot combine {X.monoid.value} with {Y.monoid.value}")
    cap = default_cap() if cap is None else cap
    state = _combine_states(_encode(X), _encode(Y), X.monoid, cap)
    return _decode(state, X.monoid)


def invert(X: GroupedSet) -> GroupedSet:
    if X.monoid is ADDITIVE:
        return GroupedSet._trusted([-x for x in reversed(X.elements)], ADDITIVE)
    return GroupedSet._trusted([1 / x for x in reversed(X.elements)], MULTIPLICATIVE)


def _iterated_state(A, m, n, cap):
    if m < 1 or n < 0:
        raise ValueError("iterated_combine needs m >= 1 and n >= 0")
    if len(A) > cap:
        raise CapExceeded(cap, len(A), "input")
    base = _encode(A)
    inv = _invert_state(base, A.monoid)
    acc = base
    # mA - nA as successive folds with A and then with -A; every stage is deduplicated
    for stage, step in enumerate([base] * (m - 1) + [inv] * n, start=2):
        acc = _combine_states(acc, step, A.monoid, cap)
        if len(acc) > cap:
            raise CapExceeded(cap, len(acc), f"stage {stage}")
    return acc


def iterated_combine(A: GroupedSet, m: int, n: int = 0, cap=None) -> GroupedSet:
    """``mA - nA`` (additive) or ``A^(m)/A^(n)`` (multiplicative), exactly."""
    cap = default_cap() if cap is None else cap
    return _decode(_iterated_state(A, m, n, cap), A.monoid)


def iterated_size(A: GroupedSet, m: int, n: int = 0, cap=None) -> int:
    """Cardinality of :func:`iterated_combine` without materialising the elements."""
    cap = default_cap() if cap is None else cap
    return len(_iterated_state(A, m, n, cap))


def translate(A: GroupedSet, c) -> GroupedSet:
    if A.monoid is not ADDITIVE:
        raise MonoidMismatch("translate is defined on additive sets only")
    c = scalar(c)
    return GroupedSet._trusted([x + c for x in A.elements], ADDITIVE)


def dilate(A: GroupedSet, c) -> GroupedSet:
    c = scalar(c)
    if c == 0:
        raise ZeroDilation("dilation by zero")
    elems = [c * x for x in A.elements]
    if c < 0:
        elems.reverse()
    return GroupedSet(elems, A.monoid) if A.monoid is MULTIPLICATIVE else GroupedSet._trusted(elems, ADDITIVE)


# --------------------------------------------------------------- text format

def dumps(A: GroupedSet) -> str:
    lines = [f"#monoid: {A.monoid.value}"]
    lines.extend(format_scalar(x) for x in A.elements)
    return "\n".join(lines) + "\n"


def loads(text: str, monoid=None) -> GroupedSet:
    """Parse the one-element-per-line format.  ``monoid`` overrides the header."""
    header = None
    elems = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            key, _, value = line[1:].partition(":")
            if key.strip() == "monoid":
                try:
                    header = Monoid(value.strip())
                except ValueError:
                    raise ParseError(f"line {lineno}: unknown monoid {value.strip()!r}") from None
            continue
        try:
            elems.append(parse_scalar(line))
        except ParseError as exc:
            raise ParseError(f"line {lineno}: {exc}") from None
    try:
        return GroupedSet(elems, monoid or header or ADDITIVE)
    except ValueError as exc:
        raise ParseError(str(exc)) from None


def read_set(path, monoid=None) -> GroupedSet:
    with open(path) as fh:
        return loads(fh.read(), monoid)


def write_text_atomic(path, text: str):
    path = os.fspath(path)
    tmp = f"{path}.tmp{os.getpid()}"
    with open(tmp, "w") as fh:
        fh.write(text)
    os.replace(tmp, path)


def write_set(path, A: GroupedSet):
    write_text_atomic(path, dumps(A))
