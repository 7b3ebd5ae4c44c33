"""Symbolic monotone maps ``f`` and their iterated forward differences.

Every map has an *input* monoid (how steps are applied to arguments) and an
*output* monoid (how values combine).  Polynomials work additively on both
sides.  ``Log`` and ``ShiftedLogExp`` return *carriers*: a positive rational
``c`` standing for the real number ``log c``.  Since ``log`` is increasing,
comparing carriers compares the values, and multiplying carriers adds them, so
every count that goes through these maps stays exact.  ``ShiftedLogExp`` also
takes carriers as input: the argument ``a`` stands for ``x = log a`` and the
image ``1 + a`` for ``log(1 + e^x)``.

``RealPower`` is the one genuinely irrational family; its values are only ever
available as certified enclosures (see :mod:`higherconvex.certified`).
"""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from . import certified
from .certified import Interval
from .errors import DomainViolation, EmptyDomain, NotKConvexFunction, NotMonotone, ParseError
from .polynomial import Polynomial, certify_nonvanishing, changes_sign, count_roots
from .sets import ADDITIVE, MULTIPLICATIVE, GroupedSet, format_scalar, parse_scalar, scalar


def _fmt_bound(x, default):
    return default if x is None else format_scalar(x)


class ConvexMap:
    kind = "map"
    input_monoid = ADDITIVE
    output_monoid = ADDITIVE
    exact = True

    def __init__(self, domain=(None, None)):
        lo, hi = domain
        self.domain = (None if lo is None else scalar(lo), None if hi is None else scalar(hi))

    # -- domain handling
    def in_domain(self, x):
        lo, hi = self.domain
        return (lo is None or x >= lo) and (hi is None or x <= hi)

    def check_domain(self, x):
        if not self.in_domain(x):
            raise DomainViolation(f"{format_scalar(x)} outside the domain of {self.descriptor()}")

    # -- evaluation
    def image(self, x) -> Fraction:
        """Exact value (additive output) or carrier (multiplicative output)."""
        raise NotImplementedError

    def enclosure(self, x, prec) -> Interval:
        """Certified enclosure of the real value ``f(x)``."""
        if self.output_monoid is ADDITIVE:
            return Interval.point(self.image(x))
        return certified.log_enclosure(self.image(x), prec)

    def check_level(self, k, lo, hi):
        """Certify that ``f`` is ``k``-convex on ``[lo, hi]`` (derivatives 1..k+1 non-vanishing)."""
        raise NotImplementedError

    def descriptor(self) -> str:
        raise NotImplementedError

    def serialize(self) -> str:
        text = self.descriptor()
        if self.domain != (None, None):
            text += f"; domain: {_fmt_bound(self.domain[0], '-inf')}..{_fmt_bound(self.domain[1], 'inf')}"
        return text

    def __repr__(self):
        return f"<{type(self).__name__} {self.serialize()}>"

    def __eq__(self, other):
        return type(self) is type(other) and self.serialize() == other.serialize()

    def __hash__(self):
        return hash(self.serialize())


class PolynomialMap(ConvexMap):
    kind = "poly"

    def __init__(self, coeffs, domain=(None, None)):
        super().__init__(domain)
        self.poly = coeffs if isinstance(coeffs, Polynomial) else Polynomial(coeffs)
        if self.poly.degree < 1:
            raise ValueError("a convex map needs a polynomial of degree >= 1")

    def image(self, x):
        return self.poly(x)

    def check_level(self, k, lo, hi):
        certify_nonvanishing(self.poly, range(1, k + 2), lo, hi)

    def descriptor(self):
        return "poly: " + ",".join(format_scalar(c) for c in self.poly.coeffs)


class IntegerPower(PolynomialMap):
    kind = "power"

    def __init__(self, n, domain=(None, None)):
        if n < 2:
            raise ValueError("IntegerPower needs an exponent >= 2")
        self.n = int(n)
        super().__init__(Polynomial.monomial(self.n), domain)

    def image(self, x):
        return Fraction(x) ** self.n

    def descriptor(self):
        return f"power: {self.n}"


class RealPower(ConvexMap):
    """``x -> x**alpha`` on the positive axis; values are certified enclosures."""

    kind = "real-power"
    exact = False

    def __init__(self, alpha, bits=256, domain=(0, None)):
        super().__init__(domain)
        self.alpha = scalar(alpha)
        self.bits = int(bits)
        if self.alpha == 0:
            raise ValueError("x**0 is constant")

    def in_domain(self, x):
        return x > 0 and super().in_domain(x)

    def image(self, x):
        raise TypeError("RealPower values are irrational; use enclosure()")

    def enclosure(self, x, prec):
        return certified.power_enclosure(Fraction(x), self.alpha, prec)

    def check_level(self, k, lo, hi):
        if lo <= 0:
            raise DomainViolation("RealPower needs a positive interval")
        if self.alpha.denominator == 1 and 0 <= self.alpha <= k:
            raise NotKConvexFunction(f"x**{self.alpha} has a vanishing derivative of order <= {k + 1}")

    def descriptor(self):
        return f"real-power: {format_scalar(self.alpha)}@{self.bits}bits"


class LogMap(ConvexMap):
    kind = "log"
    output_monoid = MULTIPLICATIVE

    def __init__(self, domain=(0, None)):
        super().__init__(domain)

    def in_domain(self, x):
        return x > 0 and super().in_domain(x)

    def image(self, x):
        return Fraction(x)

    def check_level(self, k, lo, hi):
        if lo <= 0:
            raise DomainViolation("log needs a positive interval")

    def descriptor(self):
        return "log"


def _softplus_derivative_polys(count):
    """``P_j`` with ``f^(j)(x) = P_j(sigma(x))`` for ``f = log(1 + e^x)``, j = 1..count."""
    s_one_minus_s = Polynomial([0, 1, -1])
    polys = [Polynomial([0, 1])]
    while len(polys) < count:
        d = polys[-1].derivative()
        prod = [Fraction(0)] * (len(d.coeffs) + 2)
        for i, c in enumerate(d.coeffs):
            for j, e in enumerate(s_one_minus_s.coeffs):
                prod[i + j] += c * e
        polys.append(Polynomial(prod))
    return polys


class ShiftedLogExp(ConvexMap):
    """``x -> log(1 + e^x)`` written on carriers: ``a`` (for ``log a``) maps to ``1 + a``."""

    kind = "shifted-log-exp"
    input_monoid = MULTIPLICATIVE
    output_monoid = MULTIPLICATIVE

    def __init__(self, domain=(0, None)):
        super().__init__(domain)

    def in_domain(self, x):
        return x > 0 and super().in_domain(x)

    def image(self, x):
        return 1 + Fraction(x)

    def check_level(self, k, lo, hi):
        lo, hi = scalar(lo), scalar(hi)
        if lo <= 0:
            raise DomainViolation("carriers must be positive")
        # sigma(log a) = a / (1 + a), so the carrier interval maps to an exact sigma interval
        s_lo, s_hi = lo / (1 + lo), hi / (1 + hi)
        for j, p in enumerate(_softplus_derivative_polys(k + 1), start=1):
            if count_roots(p, s_lo, s_hi):
                raise NotKConvexFunction(f"derivative of order {j} of log(1+e^x) vanishes on the interval")

    def descriptor(self):
        return "shifted-log-exp"


class DeltaMap(ConvexMap):
    """``Delta_{h_1,...,h_j} f``; composable through :func:`delta_h`."""

    kind = "delta"

    def __init__(self, base: ConvexMap, steps):
        if isinstance(base, DeltaMap):
            steps = base.steps + tuple(steps)
            base = base.base
        self.base = base
        self.steps = tuple(scalar(h) for h in steps)
        self.input_monoid = base.input_monoid
        self.output_monoid = base.output_monoid
        self.exact = base.exact
        op = base.input_monoid
        total = op.identity
        for h in self.steps:
            total = op.op(total, h)
        lo, hi = base.domain
        super().__init__((lo, None if hi is None else op.diff(hi, total)))
        self._terms = []
        j = len(self.steps)
        for r in range(j + 1):
            for subset in combinations(self.steps, r):
                offset = op.identity
                for h in subset:
                    offset = op.op(offset, h)
                self._terms.append((offset, 1 if (j - r) % 2 == 0 else -1))

    def in_domain(self, x):
        return self.base.in_domain(x) and super().in_domain(x)

    @property
    def polynomial(self):
        if not isinstance(self.base, PolynomialMap):
            return None
        p = self.base.poly
        for h in self.steps:
            p = p.delta(h)
        return p

    def terms(self):
        """Signed argument offsets: ``Delta f(x) = sum sign * f(x o offset)``."""
        return list(self._terms)

    def image(self, x):
        op = self.input_monoid
        if self.output_monoid is ADDITIVE:
            return sum((sign * self.base.image(op.op(x, off)) for off, sign in self._terms), Fraction(0))
        acc = Fraction(1)
        for off, sign in self._terms:
            c = self.base.image(op.op(x, off))
            acc = acc * c if sign > 0 else acc / c
        return acc

    def enclosure(self, x, prec):
        if self.exact:
            return super().enclosure(x, prec)
        op = self.input_monoid
        box = Interval.point(0)
        for off, sign in self._terms:
            part = self.base.enclosure(op.op(x, off), prec)
            box = box + part if sign > 0 else box - part
        return box

    def check_level(self, k, lo, hi):
        self.base.check_level(k + len(self.steps), lo, hi)

    def descriptor(self):
        steps = ",".join(format_scalar(h) for h in self.steps)
        return f"delta[{steps}] {self.base.descriptor()}"


# ------------------------------------------------------------------ operations

def evaluate(f: ConvexMap, x, precision: int = 64):
    """Exact Fraction for additive exact maps, otherwise an enclosure narrower than 2**-precision."""
    x = scalar(x)
    f.check_domain(x)
    if f.exact and f.output_monoid is ADDITIVE:
        return f.image(x)
    return certified.refine(lambda prec: f.enclosure(x, prec), Fraction(1, 2 ** precision),
                            start=max(certified.START_PRECISION, precision + 32))


def map_set(f: ConvexMap, A: GroupedSet) -> GroupedSet:
    """``f(A)`` as an exact set (carriers for the log family)."""
    for x in (A.elements[:1] + A.elements[-1:]):
        f.check_domain(x)
    if isinstance(f, LogMap):
        return GroupedSet(A.elements, MULTIPLICATIVE)
    if isinstance(f, ShiftedLogExp):
        return GroupedSet._trusted([1 + a for a in A.elements], MULTIPLICATIVE)
    if not f.exact:
        raise DomainViolation(f"{f.descriptor()} has irrational values; no exact image set exists")
    if isinstance(f, PolynomialMap) and len(A) >= 2:
        if changes_sign(f.poly.derivative(), A.min, A.max):
            raise NotMonotone(f"derivative of {f.descriptor()} changes sign on [{A.min}, {A.max}]")
    values = [f.image(x) for x in A.elements]
    signs = {(b > a) - (b < a) for a, b in zip(values, values[1:])}
    if 0 in signs or len(signs) > 1:
        raise NotMonotone(f"{f.descriptor()} is not strictly monotone on the set")
    return GroupedSet(values, f.output_monoid)


def delta_h(f: ConvexMap, h) -> DeltaMap:
    h = scalar(h)
    if f.input_monoid is ADDITIVE and h <= 0:
        raise ValueError("step must be positive")
    if f.input_monoid is MULTIPLICATIVE and h <= 1:
        raise ValueError("carrier step must exceed 1 (it stands for log h > 0)")
    d = DeltaMap(f, (h,))
    lo, hi = d.domain
    if lo is not None and hi is not None and hi <= lo:
        raise EmptyDomain(f"step {format_scalar(h)} leaves an empty domain")
    return d


# ------------------------------------------------------------------ text format

def _parse_domain(text):
    lo_s, sep, hi_s = text.partition("..")
    if not sep:
        raise ParseError(f"domain must look like lo..hi, got {text!r}")

    def bound(s):
        s = s.strip()
        return None if s in ("inf", "+inf", "-inf") else parse_scalar(s)

    return bound(lo_s), bound(hi_s)


def parse_map(text: str) -> ConvexMap:
    """Parse ``poly: 0,0,1``, ``power: 5``, ``log``, ``shifted-log-exp``, ``real-power: 5/2@256bits``.

    An optional ``domain: lo..hi`` may follow on the next line or after ``;``.
    """
    parts = [p.strip() for chunk in text.splitlines() for p in chunk.split(";") if p.strip()]
    if not parts:
        raise ParseError("empty map descriptor")
    domain = None
    head = None
    for part in parts:
        key, _, value = part.partition(":")
        key, value = key.strip(), value.strip()
        if key == "domain":
            domain = _parse_domain(value)
        elif head is None:
            head = (key, value)
        else:
            raise ParseError(f"unexpected field {part!r}")
    key, value = head
    kw = {} if domain is None else {"domain": domain}
    try:
        if key == "poly":
            return PolynomialMap([parse_scalar(c) for c in value.split(",")], **kw)
        if key == "power":
            return IntegerPower(int(value), **kw)
        if key == "log":
            return LogMap(**kw)
        if key == "shifted-log-exp":
            return ShiftedLogExp(**kw)
        if key == "real-power":
            alpha, _, bits = value.partition("@")
            alpha = Fraction(alpha.strip())
            bits = int(bits.strip().removesuffix("bits")) if bits else 256
            return RealPower(alpha, bits, **kw)
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"bad map descriptor {text!r}: {exc}") from None
    raise ParseError(f"unknown map kind {key!r}")
