"""Dyadic pigeonhole, consecutive-difference refinements and witness engines.

The two engines build explicit elements of ``2^k X - (2^k - 1) X`` together
with a signed representation over the ground set and an interval that keeps
each element apart from its siblings.  :func:`verify_certificate` re-checks a
certificate from scratch and shares no code with the generators.
"""
from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key
from math import ceil

from . import certified
from .certified import Interval
from .convexity import convexity_order
from .errors import NotKConvex, NotKConvexFunction, SqueezeViolated, TooSmall
from .maps import ConvexMap
from .sets import ADDITIVE, MULTIPLICATIVE, GroupedSet, Monoid, format_scalar, scalar

PIGEONHOLE_MIN_SIZE = 8


# ------------------------------------------------------------ difference index

@dataclass(frozen=True)
class DifferenceIndex:
    """Consecutive differences of a sorted set and their popularity classes.

    ``ranks[j]`` is the index ``i(j)``: one plus the number of
    distinct differences smaller than the ``j``-th gap.
    """

    monoid: Monoid
    H: tuple
    index_of: dict
    ranks: tuple
    fiber_count: dict
    dyadic_classes: dict
    index_sum: int

    @property
    def gaps(self):
        return tuple(self.H[r - 1] for r in self.ranks)


def _points(A, monoid=None):
    if isinstance(A, GroupedSet):
        return A.elements, Monoid(monoid or A.monoid)
    pts = tuple(sorted({scalar(x) for x in A}))
    return pts, Monoid(monoid or ADDITIVE)


def difference_index(A, monoid=None) -> DifferenceIndex:
    """Index structure of the consecutive differences (ratios, for multiplicative input)."""
    pts, op = _points(A, monoid)
    if len(pts) < 2:
        raise TooSmall("need at least two elements")
    gaps = [op.diff(b, a) for a, b in zip(pts, pts[1:])]
    H = tuple(sorted(set(gaps)))
    index_of = {h: r for r, h in enumerate(H, start=1)}
    ranks = tuple(index_of[g] for g in gaps)
    fiber_count = {}
    for r in ranks:
        fiber_count[r] = fiber_count.get(r, 0) + 1
    classes = {}
    for r, c in sorted(fiber_count.items()):
        classes.setdefault(c.bit_length() - 1, []).append(r)
    return DifferenceIndex(op, H, index_of, ranks, fiber_count,
                           {t: tuple(ls) for t, ls in sorted(classes.items())}, sum(ranks))


def fiber(A, h, monoid=None):
    """``A_h``: elements whose successor in ``A`` is exactly ``a o h``."""
    pts, op = _points(A, monoid)
    h = scalar(h)
    return tuple(a for a, b in zip(pts, pts[1:]) if op.diff(b, a) == h)


@dataclass(frozen=True)
class DyadicDecomposition:
    N: int
    t: int
    L: int
    H_prime: tuple
    fibers: dict
    index_sum: int

    @property
    def m(self):
        return len(self.H_prime)

    @property
    def sumset_lower_bound(self) -> Fraction:
        """Certified lower bound ``L m^2 / 2`` for ``|A + A - A|``."""
        return Fraction(self.L * self.m * self.m, 2)

    def satisfies_density(self) -> bool:
        """``L m >= N / (3 log2 N)``, decided exactly as ``N^(3Lm) >= 2^N``."""
        if self.N < 2:
            return True
        return self.N ** (3 * self.L * self.m) >= 2 ** self.N

    def satisfies_fiber_sizes(self) -> bool:
        return all(self.L <= len(f) <= 2 * self.L for f in self.fibers.values())


def dyadic_pigeonhole(A, monoid=None, strict=True) -> DyadicDecomposition:
    """Popular-difference level ``t`` maximising ``2^t |I_t|`` (smallest ``t`` on ties)."""
    pts, op = _points(A, monoid)
    if len(pts) < 2 or (strict and len(pts) < PIGEONHOLE_MIN_SIZE):
        raise TooSmall(f"dyadic pigeonhole needs at least {PIGEONHOLE_MIN_SIZE if strict else 2} elements")
    idx = difference_index(pts, op)
    t = max(idx.dyadic_classes, key=lambda s: ((len(idx.dyadic_classes[s]) << s), -s))
    H_prime = tuple(idx.H[r - 1] for r in idx.dyadic_classes[t])
    fibers = {}
    wanted = set(H_prime)
    for a, b in zip(pts, pts[1:]):
        g = op.diff(b, a)
        if g in wanted:
            fibers.setdefault(g, []).append(a)
    return DyadicDecomposition(len(pts), t, 1 << t, H_prime,
                               {h: tuple(fibers[h]) for h in H_prime}, idx.index_sum)


# ------------------------------------------------------------------ refinement

@dataclass(frozen=True)
class Refinement:
    steps: tuple
    members: tuple

    def split(self):
        """Lower and upper halves at index ``ceil(n/2)``; odd sizes share the middle element."""
        n = len(self.members)
        mid = (n + 1) // 2
        lower = self.members[:mid]
        upper = self.members[mid - 1:] if n % 2 else self.members[mid:]
        return lower, upper


def refine(A, steps, monoid=None) -> Refinement:
    pts, op = _points(A, monoid)
    steps = tuple(scalar(h) for h in steps)
    if not steps:
        raise ValueError("refine needs at least one step")
    members = pts
    for h in steps:
        members = tuple(a for a, b in zip(members, members[1:]) if op.diff(b, a) == h)
    return Refinement(steps, members)


# -------------------------------------------------------------------- squeeze

@dataclass(frozen=True)
class SqueezeInstance:
    lower: object
    middle: object
    upper: object
    closed: str  # "upper", "lower" or "none": which endpoint the middle may touch


def _sign(x):
    return (x > 0) - (x < 0)


def squeeze_check(f, a_i, a_j, h=1, directions=None) -> SqueezeInstance:
    """Certify ``f(a_i) < f(a_i) + f(a_j o h) - f(a_j) <= f(a_i o h)`` (mirrored when ``f`` decreases).

    ``f`` may be a ConvexMap, ``None`` for the identity, or a GroupedSet read
    as the index map ``i -> a_i`` (1-based), in which case ``a_i`` and ``a_j``
    are indices, ``h`` must be 1 and both inequalities are strict.
    """
    if isinstance(f, GroupedSet):
        seq = f.elements
        i, j = int(a_i), int(a_j)
        if h != 1 or not (1 <= i < len(seq) and 1 <= j < len(seq)):
            raise SqueezeViolated("index squeeze needs h = 1 and indices with successors")
        lo, up = seq[i - 1], seq[i]
        mid = lo + seq[j] - seq[j - 1]
        if not lo < mid < up:
            raise SqueezeViolated(f"{lo} < {mid} < {up} fails")
        return SqueezeInstance(lo, mid, up, "none")
    a_i, a_j, h = scalar(a_i), scalar(a_j), scalar(h)
    if f is None:
        vals = {x: x for x in (a_i, a_j, a_i + h, a_j + h)}
        op, out = ADDITIVE, ADDITIVE
    else:
        if not f.exact:
            raise TypeError("squeeze_check needs an exact map; use the witness engine for enclosures")
        op, out = f.input_monoid, f.output_monoid
        pts = (a_i, a_j, op.op(a_i, h), op.op(a_j, h))
        for x in pts:
            f.check_domain(x)
        vals = {x: f.image(x) for x in pts}
    fi, fih = vals[a_i], vals[op.op(a_i, h)]
    mid = out.op(fi, out.diff(vals[op.op(a_j, h)], vals[a_j]))
    if directions is not None:
        s0, s1 = directions
        if (s0 * s1 > 0 and a_j > a_i) or (s0 * s1 < 0 and a_j < a_i):
            raise SqueezeViolated("index order inconsistent with the monotonicity branch")
    if fi < fih:
        if not fi < mid <= fih:
            raise SqueezeViolated(f"{fi} < {mid} <= {fih} fails")
        return SqueezeInstance(fi, mid, fih, "upper")
    if not fih <= mid < fi:
        raise SqueezeViolated(f"{fih} <= {mid} < {fi} fails")
    return SqueezeInstance(fih, mid, fi, "lower")


# ---------------------------------------------------------------- certificates

@dataclass(frozen=True)
class CertInterval:
    """Endpoints are ground points; the actual interval is between their images."""

    lo: Fraction
    hi: Fraction
    lo_closed: bool = False
    hi_closed: bool = False

    def to_json(self):
        return {"lo": format_scalar(self.lo), "hi": format_scalar(self.hi),
                "lo_closed": self.lo_closed, "hi_closed": self.hi_closed}


@dataclass(frozen=True)
class WitnessCertificate:
    value: object  # Fraction, or an Interval enclosure for inexact maps
    plus_part: tuple
    minus_part: tuple
    interval: CertInterval
    branch: tuple = ()

    def to_json(self):
        if isinstance(self.value, Interval):
            value = [format_scalar(self.value.lo), format_scalar(self.value.hi)]
        else:
            value = format_scalar(self.value)
        return {
            "value": value,
            "plus": [format_scalar(x) for x in self.plus_part],
            "minus": [format_scalar(x) for x in self.minus_part],
            "interval": self.interval.to_json(),
            "branch": [format_scalar(x) for x in self.branch],
        }


@dataclass
class WitnessBatch:
    certificates: list
    claimed_count_bound: Fraction
    ground_set: GroupedSet
    map_used: ConvexMap | None
    k: int
    engine: str
    output_monoid: Monoid = ADDITIVE
    details: dict = field(default_factory=dict)

    @property
    def count(self):
        return len(self.certificates)

    def meets_claim(self):
        return self.count >= ceil(self.claimed_count_bound)

    def values(self):
        return [c.value for c in self.certificates]

    def to_json(self):
        return {
            "engine": self.engine,
            "k": self.k,
            "map": "identity" if self.map_used is None else self.map_used.serialize(),
            "ground": {"monoid": self.ground_set.monoid.value,
                       "elements": [format_scalar(x) for x in self.ground_set]},
            "output_monoid": self.output_monoid.value,
            "count": self.count,
            "claimed_count_bound": format_scalar(self.claimed_count_bound),
            "details": {k: (format_scalar(v) if isinstance(v, Fraction) else v) for k, v in self.details.items()},
            "certificates": [c.to_json() for c in self.certificates],
        }

    def dumps(self):
        return json.dumps(self.to_json(), indent=1, sort_keys=True) + "\n"

    def digest(self):
        return hashlib.sha256(self.dumps().encode()).hexdigest()


# ---------------------------------------------------------- theorem-3 engine

def _truncate(pts):
    n = len(pts)
    return pts[:(1 << (n + 1).bit_length() - 1) - 1]


def _t3_branches(seq, level, mode):
    """Witnesses of ``2^level S - (2^level - 1) S`` over the index set of ``seq``.

    Returns ``(branch, P, M)`` triples: P/M are index tuples into ``seq`` and
    the value lies in ``(seq[branch], seq[branch + 1])``.
    """
    n = len(seq)
    out = []
    if n < 2:
        return out
    if mode == "half":
        half = (n - 1) // 2
        receivers = range(half, n - 1)
    else:
        receivers = range(n - 1)
    if level == 1:
        for r in receivers:
            donors = range(half) if mode == "half" else range(r)
            for j in donors:
                out.append((r, (r, j + 1), (j,)))
        return out
    diffs = [b - a for a, b in zip(seq, seq[1:])]
    if mode == "half":
        child = _t3_branches(diffs[:half], level - 1, mode)
    else:
        child = _t3_branches(diffs[:max(0, n - 2)], level - 1, mode)
    for r in receivers:
        for cb, P, M in child:
            # prefix mode: donors are diffs[:r]; a child branch cb touches indices <= cb + 1
            if mode != "half" and cb > r - 2:
                continue
            plus = (r,) + tuple(d + 1 for d in P) + tuple(M)
            minus = tuple(P) + tuple(d + 1 for d in M)
            out.append((r, plus, minus))
    return out


def theorem3_witnesses(A: GroupedSet, k: int, mode: str = "prefix") -> WitnessBatch:
    """Distinct elements of ``2^k A - (2^k - 1) A`` inside ``(min A, max A)``.

    ``mode="half"`` follows the halving recursion verbatim: at every level the
    difference sequence is cut at its midpoint and only the upper half of the
    gaps receive witnesses.  ``mode="prefix"`` (default) runs the same
    squeeze with every gap as a receiver, feeding it all smaller differences;
    it produces roughly ``N^(k+1) / (k+1)!`` witnesses instead of
    ``N^(k+1) / 2^(k(k+1))``.
    """
    if A.monoid is not ADDITIVE:
        raise ValueError("theorem3_witnesses works on additive sets")
    if k < 1:
        raise ValueError("k must be at least 1")
    if mode not in ("prefix", "half"):
        raise ValueError(f"unknown mode {mode!r}")
    if len(A) < 3:
        raise TooSmall("need at least three elements")
    report = convexity_order(A)
    if report.order < k:
        raise NotKConvex(f"set is {report.order}-convex, {k} required")
    pts = _truncate(A.elements)
    certs = []
    for r, P, M in _t3_branches(pts, k, mode):
        plus = tuple(pts[i] for i in P)
        minus = tuple(pts[i] for i in M)
        value = sum(plus, Fraction(0)) - sum(minus, Fraction(0))
        certs.append(WitnessCertificate(value, plus, minus, CertInterval(pts[r], pts[r + 1]), (pts[r],)))
    certs.sort(key=lambda c: c.value)
    n = len(pts)
    return WitnessBatch(certs, Fraction(n ** (k + 1), 2 ** (k * k)), A, None, k, f"theorem3/{mode}",
                        details={"truncated_size": n, "order": report.order})


# ---------------------------------------------------------- theorem-4 engine

class _Valuer:
    """Evaluates signed combinations of ``f`` at ground points, exactly or certified."""

    def __init__(self, f: ConvexMap):
        self.f = f
        self.out = f.output_monoid
        self.exact = f.exact
        self._cache = {}
        self._enc = {}

    def value(self, x):
        v = self._cache.get(x)
        if v is None:
            self.f.check_domain(x)
            v = self._cache[x] = self.f.image(x)
        return v

    def enclosure(self, x, prec):
        key = (x, prec)
        v = self._enc.get(key)
        if v is None:
            self.f.check_domain(x)
            v = self._enc[key] = self.f.enclosure(x, prec)
        return v

    def total(self, plus, minus):
        if self.out is ADDITIVE:
            return sum((self.value(x) for x in plus), Fraction(0)) - sum((self.value(x) for x in minus), Fraction(0))
        num = Fraction(1)
        for x in plus:
            num *= self.value(x)
        for x in minus:
            num /= self.value(x)
        return num

    def total_enclosure(self, plus, minus, prec):
        box = Interval.point(0)
        for x in plus:
            box = box + self.enclosure(x, prec)
        for x in minus:
            box = box - self.enclosure(x, prec)
        return box

    def compare(self, a, b):
        """Sign of ``value(a) - value(b)`` for ``(plus, minus)`` pairs."""
        if self.exact:
            va, vb = self.total(*a), self.total(*b)
            return (va > vb) - (va < vb)
        if _cancelled(a) == _cancelled(b):
            return 0
        return certified.compare(lambda p: self.total_enclosure(*a, p), lambda p: self.total_enclosure(*b, p))


def _cancelled(combo):
    plus, minus = combo
    counts = {}
    for x in plus:
        counts[x] = counts.get(x, 0) + 1
    for x in minus:
        counts[x] = counts.get(x, 0) - 1
    return sorted((x, c) for x, c in counts.items() if c)


def _psi(terms, x, op):
    """Argument lists of ``Psi(x) = sum sign * f(x o offset)``."""
    plus = [op.op(x, off) for off, s in terms if s > 0]
    minus = [op.op(x, off) for off, s in terms if s < 0]
    return plus, minus


def _monotone_direction(points, terms, valuer, op, what):
    combos = [_psi(terms, x, op) for x in points]
    direction = 0
    for a, b in zip(combos, combos[1:]):
        s = valuer.compare(b, a)
        if s == 0 or (direction and s != direction):
            raise NotKConvexFunction(f"{what} is not strictly monotone on the witness grid")
        direction = s
    return direction


def _t4_level(S, terms, level, valuer, op, top=False):
    """Witnesses over ``Psi`` on the sorted set ``S``.

    Returns ``(branch, P, M)`` with argument lists for ``Psi``; for every
    constant ``c`` the values ``c + sum_P Psi - sum_M Psi`` are pairwise
    distinct and lie in the closed hull of ``c + Psi(S)``.  ``branch`` is
    ``(h, a_i)``.  ``top=True`` applies the strict pigeonhole size guard.
    """
    if len(S) < 2:
        return [], None
    dec = dyadic_pigeonhole(S, op, strict=top)
    s0 = _monotone_direction(S, terms, valuer, op, "the map")
    out = []
    for h in dec.H_prime:
        fib = dec.fibers[h]
        dterms = [(op.op(off, h), s) for off, s in terms] + [(off, -s) for off, s in terms]
        s1 = _monotone_direction(fib, dterms, valuer, op, "its difference map") if len(fib) > 1 else 1
        growing = s0 * s1 > 0  # |Delta_h Psi| increases along the fiber
        if level == 1:
            for i, a_i in enumerate(fib):
                donors = fib[:i + 1] if growing else fib[i:]
                for a_j in donors:
                    out.append(((h, a_i), (a_i, op.op(a_j, h)), (a_j,)))
            continue
        lower, upper = Refinement((h,), fib).split()
        donors, receivers = (lower, upper) if growing else (upper, lower)
        child, _ = _t4_level(donors, dterms, level - 1, valuer, op)
        for a_i in receivers:
            for _, P, M in child:
                plus = (a_i,) + tuple(op.op(x, h) for x in P) + tuple(M)
                minus = tuple(P) + tuple(op.op(x, h) for x in M)
                out.append(((h, a_i), plus, minus))
    return out, dec


def theorem4_witnesses(A: GroupedSet, f: ConvexMap, k: int, input_monoid=None) -> WitnessBatch:
    """Distinct elements of ``2^k f(A) - (2^k - 1) f(A)`` with certificates.

    Every witness of branch ``(h, a_i)`` lies between ``f(a_i)`` and
    ``f(a_i o h)``, closed at the ``f(a_i o h)`` end.  ``claimed_count_bound``
    is the number of witnesses the construction certifies; for ``k = 1`` the
    constant-free bound ``m L^2 / 2`` is stored in ``details``.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if len(A) <= 10 * k:
        raise TooSmall(f"need more than {10 * k} elements for k = {k}")
    op = Monoid(input_monoid or f.input_monoid)
    pts = A.elements
    f.check_domain(pts[0])
    f.check_domain(pts[-1])
    f.check_level(k, pts[0], pts[-1])
    valuer = _Valuer(f)
    branches, dec = _t4_level(pts, [(op.identity, 1)], k, valuer, op, top=True)
    certs = []
    for (h, a_i), plus, minus in branches:
        a_next = op.op(a_i, h)
        if valuer.exact:
            value = valuer.total(plus, minus)
            increasing = valuer.value(a_i) < valuer.value(a_next)
        else:
            value = certified.refine(lambda p: valuer.total_enclosure(plus, minus, p),
                                     Fraction(1, 2 ** f.bits), start=certified.START_PRECISION)
            increasing = valuer.compare(((a_next,), ()), ((a_i,), ())) > 0
        interval = (CertInterval(a_i, a_next, False, True) if increasing
                    else CertInterval(a_next, a_i, True, False))
        certs.append(WitnessCertificate(value, plus, minus, interval, (h, a_i)))
    if valuer.exact:
        certs.sort(key=lambda c: c.value)
    else:
        certs.sort(key=cmp_to_key(lambda a, b: valuer.compare((a.plus_part, a.minus_part),
                                                               (b.plus_part, b.minus_part))))
    details = {"t": dec.t, "L": dec.L, "m": dec.m, "H_prime": [format_scalar(h) for h in dec.H_prime]}
    if k == 1:
        details["pigeonhole_bound"] = Fraction(dec.m * dec.L * dec.L, 2)
    return WitnessBatch(certs, Fraction(len(certs)), A, f, k, "theorem4", f.output_monoid, details)


# ---------------------------------------------------------------- verification

@dataclass(frozen=True)
class Verification:
    ok: bool
    clause: str = ""

    def __bool__(self):
        return self.ok


def _direct_value(f, x):
    if f is None:
        return x
    return f.image(x)


def verify_certificate(c: WitnessCertificate, ground: GroupedSet, k: int, f: ConvexMap | None = None) -> Verification:
    """Recompute a certificate from its signed representation.

    Checks arity (``2^k`` plus, ``2^k - 1`` minus), that every term is a ground
    element, the stated value, and strict/closed membership in the interval.
    """
    if len(c.plus_part) != 2 ** k or len(c.minus_part) != 2 ** k - 1:
        return Verification(False, "arity")
    members = set(ground.elements)
    for x in c.plus_part + c.minus_part + (c.interval.lo, c.interval.hi):
        if x not in members:
            return Verification(False, "membership")
    multiplicative = f is not None and f.output_monoid is MULTIPLICATIVE
    if f is not None and not f.exact:
        return _verify_enclosed(c, f)
    if multiplicative:
        value = Fraction(1)
        for x in c.plus_part:
            value *= _direct_value(f, x)
        for x in c.minus_part:
            value /= _direct_value(f, x)
    else:
        value = Fraction(0)
        for x in c.plus_part:
            value += _direct_value(f, x)
        for x in c.minus_part:
            value -= _direct_value(f, x)
    if value != c.value:
        return Verification(False, "value-mismatch")
    lo, hi = _direct_value(f, c.interval.lo), _direct_value(f, c.interval.hi)
    above = lo <= value if c.interval.lo_closed else lo < value
    below = value <= hi if c.interval.hi_closed else value < hi
    if not (above and below):
        return Verification(False, "interval")
    return Verification(True)


def _verify_enclosed(c, f):
    def total(prec):
        box = Interval.point(0)
        for x in c.plus_part:
            box = box + f.enclosure(x, prec)
        for x in c.minus_part:
            box = box - f.enclosure(x, prec)
        return box

    box = total(max(certified.START_PRECISION, f.bits))
    if not (box.lo <= c.value.hi and c.value.lo <= box.hi):
        return Verification(False, "value-mismatch")
    lo_at = lambda p: f.enclosure(c.interval.lo, p)  # noqa: E731
    hi_at = lambda p: f.enclosure(c.interval.hi, p)  # noqa: E731
    # a closed endpoint can be hit exactly only by the one-term representation of that endpoint
    for end, at, closed, want in ((c.interval.lo, lo_at, c.interval.lo_closed, 1),
                                  (c.interval.hi, hi_at, c.interval.hi_closed, -1)):
        if closed and _cancelled((c.plus_part, c.minus_part)) == [(end, 1)]:
            continue
        if certified.compare(total, at) != want:
            return Verification(False, "interval")
    return Verification(True)


def distinct_values(batch: WitnessBatch) -> bool:
    """True iff the (sorted) certificate values are pairwise distinct."""
    vals = batch.certificates
    if not vals or not isinstance(vals[0].value, Interval):
        return all(a.value < b.value for a, b in zip(vals, vals[1:]))
    f = batch.map_used
    valuer = _Valuer(f)
    return all(valuer.compare((a.plus_part, a.minus_part), (b.plus_part, b.minus_part)) < 0
               for a, b in zip(vals, vals[1:]))
