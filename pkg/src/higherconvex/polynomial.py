"""Exact univariate polynomials over the rationals, plus root isolation.

Root counting and isolation are delegated to sympy's Sturm/continued-fraction
machinery; everything else here is plain Fraction arithmetic.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb, lcm

import sympy

from .errors import NotKConvexFunction

_X = sympy.Symbol("x")


class Polynomial:
    """Coefficients are stored low-to-high, trailing zeros stripped."""

    __slots__ = ("coeffs", "_scaled")

    def __init__(self, coeffs):
        cs = [Fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        self.coeffs = tuple(cs)
        den = lcm(*(c.denominator for c in cs)) if cs else 1
        self._scaled = (den, tuple(c.numerator * (den // c.denominator) for c in cs))

    @classmethod
    def monomial(cls, n, c=1):
        return cls([0] * n + [c])

    @property
    def degree(self):
        return len(self.coeffs) - 1  # the zero polynomial has degree -1

    def is_zero(self):
        return not self.coeffs

    def __call__(self, x):
        # homogenised Horner in integers: one normalisation instead of one per step
        x = Fraction(x)
        p, q = x.numerator, x.denominator
        den, ints = self._scaled
        acc, qpow = 0, 1
        for c in reversed(ints):
            acc = acc * p + c * qpow
            qpow *= q
        return Fraction(acc, den * (qpow // q if ints else 1))

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        return f"Polynomial({', '.join(str(c) for c in self.coeffs)})"

    def __add__(self, other):
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (Fraction(0),) * (n - len(self.coeffs))
        b = other.coeffs + (Fraction(0),) * (n - len(other.coeffs))
        return Polynomial([x + y for x, y in zip(a, b)])

    def __neg__(self):
        return Polynomial([-c for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return Polynomial([c * x for x in self.coeffs])

    def derivative(self, order=1):
        cs = list(self.coeffs)
        for _ in range(order):
            cs = [i * c for i, c in enumerate(cs)][1:]
        return Polynomial(cs)

    def shift(self, h):
        """The polynomial ``x -> p(x + h)`` (Taylor shift)."""
        h = Fraction(h)
        n = len(self.coeffs)
        out = [Fraction(0)] * n
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            hp = Fraction(1)
            for j in range(i, -1, -1):
                out[j] += c * comb(i, j) * hp
                hp *= h
        return Polynomial(out)

    def delta(self, h):
        """Forward difference ``p(x + h) - p(x)``; drops the degree by one."""
        return self.shift(h) - self

    def to_sympy(self):
        return sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in reversed(self.coeffs)] or [0],
                          _X, domain="QQ")


def _frac(r):
    r = sympy.Rational(r)
    return Fraction(int(r.p), int(r.q))


def isolate_real_roots(p: Polynomial, lo=None, hi=None):
    """Disjoint rational isolating intervals ``(a, b, multiplicity)`` of the real roots."""
    if p.degree < 1:
        return []
    kw = {}
    if lo is not None:
        kw["inf"] = sympy.Rational(lo.numerator, lo.denominator)
    if hi is not None:
        kw["sup"] = sympy.Rational(hi.numerator, hi.denominator)
    return [(_frac(a), _frac(b), mult) for (a, b), mult in p.to_sympy().intervals(**kw)]


def count_roots(p: Polynomial, lo, hi) -> int:
    """Number of distinct real roots in the closed interval ``[lo, hi]``."""
    if p.is_zero():
        raise ValueError("the zero polynomial vanishes everywhere")
    if p.degree < 1:
        return 0
    return int(p.to_sympy().count_roots(sympy.Rational(lo.numerator, lo.denominator),
                                        sympy.Rational(hi.numerator, hi.denominator)))


def changes_sign(p: Polynomial, lo, hi) -> bool:
    """True iff ``p`` has a root of odd multiplicity strictly inside ``(lo, hi)``."""
    for a, b, mult in isolate_real_roots(p, lo, hi):
        if mult % 2 == 0:
            continue
        if a == b and (a == lo or a == hi):
            continue
        if b <= lo or a >= hi:
            continue
        return True
    return False


def certify_nonvanishing(p: Polynomial, orders, lo, hi):
    """Raise unless every listed derivative of ``p`` is root-free on ``[lo, hi]``."""
    for j in orders:
        d = p.derivative(j)
        if d.is_zero():
            raise NotKConvexFunction(f"derivative of order {j} vanishes identically")
        if count_roots(d, lo, hi):
            raise NotKConvexFunction(f"derivative of order {j} has a root in [{lo}, {hi}]")


def root_free_interval(p: Polynomial, orders, window=None):
    """Widest closed interval on which the given derivatives of ``p`` have no root.

    Roots are isolated exactly; the returned interval sits strictly inside the
    widest gap between isolating intervals (the unbounded ends are clipped to
    ``window``, default one root-span beyond the extreme roots).  The result is
    re-certified by exact root counting before it is returned.
    """
    spans = []
    for j in orders:
        d = p.derivative(j)
        if d.is_zero():
            raise NotKConvexFunction(f"derivative of order {j} vanishes identically")
        spans.extend((a, b) for a, b, _ in isolate_real_roots(d))
    spans.sort()
    merged = []
    for a, b in spans:
        if merged and a <= merged[-1][1]:
            merged[-1] = (merged[-1][0], max(b, merged[-1][1]))
        else:
            merged.append((a, b))
    if window is None:
        if merged:
            reach = max(Fraction(1), merged[-1][1] - merged[0][0])
            window = (merged[0][0] - reach, merged[-1][1] + reach)
        else:
            window = (Fraction(-1), Fraction(1))
    wlo, whi = Fraction(window[0]), Fraction(window[1])
    cuts = [(wlo, wlo)] + [(a, b) for a, b in merged if b > wlo and a < whi] + [(whi, whi)]
    best = None
    for (_, left), (right, _) in zip(cuts, cuts[1:]):
        left, right = max(left, wlo), min(right, whi)
        if right > left and (best is None or right - left > best[1] - best[0]):
            best = (left, right)
    if best is None:
        raise NotKConvexFunction("no root-free interval inside the window")
    left, right = best
    pad = (right - left) / 16
    lo, hi = left + pad, right - pad
    certify_nonvanishing(p, orders, lo, hi)
    return lo, hi
