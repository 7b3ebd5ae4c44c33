"""Outward-rounded interval enclosures for the transcendental maps.

mpmath's interval context does the rounding; this module pins precision,
converts endpoints back to exact Fractions and implements the escalation
policy used whenever two irrational quantities must be ordered.
"""
from __future__ import annotations

import threading
from fractions import Fraction
from typing import Callable, NamedTuple

import mpmath
from mpmath import libmp

from .errors import PrecisionExhausted

START_PRECISION = 128
MAX_PRECISION = 4096

_iv = mpmath.iv
_lock = threading.RLock()


class Interval(NamedTuple):
    lo: Fraction
    hi: Fraction

    @property
    def width(self):
        return self.hi - self.lo

    def __contains__(self, x):
        return self.lo <= x <= self.hi

    def __add__(self, other):
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other):
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def scaled(self, n: int):
        return Interval(self.lo * n, self.hi * n) if n >= 0 else Interval(self.hi * n, self.lo * n)

    @property
    def midpoint(self):
        return (self.lo + self.hi) / 2

    @classmethod
    def point(cls, x):
        x = Fraction(x)
        return cls(x, x)


def _rational_iv(x: Fraction):
    return _iv.mpf(x.numerator) / _iv.mpf(x.denominator)


def _to_interval(v) -> Interval:
    a, b = v._mpi_
    return Interval(Fraction(*map(int, libmp.to_rational(a))), Fraction(*map(int, libmp.to_rational(b))))


def enclose(build: Callable, prec: int) -> Interval:
    """Run ``build(iv, to_iv)`` at ``prec`` bits and return the exact enclosure."""
    with _lock:
        saved = _iv.prec
        _iv.prec = prec
        try:
            return _to_interval(build(_iv, _rational_iv))
        finally:
            _iv.prec = saved


def log_enclosure(x: Fraction, prec: int) -> Interval:
    return enclose(lambda iv, r: iv.log(r(x)), prec)


def power_enclosure(x: Fraction, alpha: Fraction, prec: int) -> Interval:
    return enclose(lambda iv, r: iv.exp(r(alpha) * iv.log(r(x))), prec)


def set_max_precision(bits: int):
    """Change the escalation ceiling used when no explicit ``ceiling`` is passed."""
    global MAX_PRECISION
    if bits < START_PRECISION:
        raise ValueError(f"ceiling must be at least {START_PRECISION} bits")
    MAX_PRECISION = int(bits)


def refine(build_at: Callable[[int], Interval], width, start=START_PRECISION, ceiling=None) -> Interval:
    """Double the working precision until the enclosure is narrower than ``width``."""
    ceiling = MAX_PRECISION if ceiling is None else ceiling
    prec = start
    while prec <= ceiling:
        box = build_at(prec)
        if box.width < width:
            return box
        prec *= 2
    raise PrecisionExhausted(f"enclosure wider than {float(width):.3g} at {ceiling} bits")


def compare(left: Callable[[int], Interval], right: Callable[[int], Interval],
            start=START_PRECISION, ceiling=None) -> int:
    """Certified sign of ``left - right``; never returns 0.

    Raises PrecisionExhausted when the enclosures still overlap at ``ceiling``.
    """
    ceiling = MAX_PRECISION if ceiling is None else ceiling
    prec = start
    while prec <= ceiling:
        a, b = left(prec), right(prec)
        if a.hi < b.lo:
            return -1
        if a.lo > b.hi:
            return 1
        prec *= 2
    raise PrecisionExhausted(f"values not separated at {ceiling} bits")
