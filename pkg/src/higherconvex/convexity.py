"""Convexity order of finite sequences and grid checks for convex maps."""
from __future__ import annotations

from dataclasses import dataclass, field

from . import certified
from .errors import DomainViolation, TooSmall
from .maps import ConvexMap, DeltaMap
from .sets import GroupedSet, format_scalar, scalar


def _as_sequence(A):
    if isinstance(A, GroupedSet):
        return list(A.elements)
    return [scalar(x) for x in A]


def forward_differences(A):
    """``(a[i+1] - a[i])`` in index order; the result is not re-sorted."""
    seq = _as_sequence(A)
    if len(seq) < 2:
        raise TooSmall("forward differences need at least two terms")
    return tuple(b - a for a, b in zip(seq, seq[1:]))


def _direction(seq):
    """+1 / -1 if strictly increasing / decreasing, else 0."""
    if all(b > a for a, b in zip(seq, seq[1:])):
        return 1
    if all(b < a for a, b in zip(seq, seq[1:])):
        return -1
    return 0


@dataclass(frozen=True)
class ConvexityReport:
    """``order`` counts leading difference levels that are strictly increasing.

    ``direction_profile[j-1]`` is the monotone direction of the ``j``-th
    difference sequence, recorded for as long as the levels stay strictly
    monotone (either way) and have at least two terms.
    """

    order: int
    direction_profile: tuple
    checkable_levels: int
    note: str = ""


def convexity_order(A) -> ConvexityReport:
    seq = _as_sequence(A)
    checkable = max(0, len(seq) - 2)
    profile = []
    level = seq
    for _ in range(checkable):
        level = [b - a for a, b in zip(level, level[1:])]
        d = _direction(level)
        if d == 0:
            break
        profile.append(d)
    order = 0
    for d in profile:
        if d != 1:
            break
        order += 1
    note = ""
    if order == checkable and checkable > 0:
        note = f"all {checkable} checkable levels increasing; the last difference level has one term"
    return ConvexityReport(order, tuple(profile), checkable, note)


@dataclass
class ConvexityCheck:
    passed: bool
    directions: list = field(default_factory=list)
    violation: tuple | None = None  # (level j, x_prev, x_next, value_prev, value_next)

    def __bool__(self):
        return self.passed

    def describe(self):
        if self.passed:
            return "pass, directions " + ",".join(f"{d:+d}" for d in self.directions)
        j, x0, x1, v0, v1 = self.violation
        return f"fail at level {j}: x={format_scalar(x0)} -> {format_scalar(x1)} gives {v0} -> {v1}"


def _compare_values(f, x0, x1, exact_values):
    if exact_values is not None:
        a, b = exact_values
        return (b > a) - (b < a)
    # exact=False maps: order the two real values by certified enclosures
    return certified.compare(lambda p: f.enclosure(x1, p), lambda p: f.enclosure(x0, p))


def function_convexity_check(f: ConvexMap, k: int, grid, steps=()) -> ConvexityCheck:
    """Check strict monotonicity of ``Delta_{h_1..h_j} f`` on ``grid`` for every prefix ``j``.

    ``j = 0`` checks ``f`` itself.  Values are compared exactly, or through
    certified enclosures for inexact maps (which may raise PrecisionExhausted).
    """
    steps = tuple(scalar(h) for h in steps)
    if len(steps) > k:
        raise ValueError(f"{len(steps)} steps exceed convexity level {k}")
    points = sorted({scalar(x) for x in grid})
    out = ConvexityCheck(True)
    for j in range(len(steps) + 1):
        g = DeltaMap(f, steps[:j]) if j else f
        for x in points:
            if not g.in_domain(x):
                raise DomainViolation(f"grid point {format_scalar(x)} (shifted by level-{j} steps) leaves the domain")
        values = [g.image(x) for x in points] if g.exact else None
        direction = 0
        for i in range(len(points) - 1):
            pair = None if values is None else (values[i], values[i + 1])
            s = _compare_values(g, points[i], points[i + 1], pair)
            if s == 0 or (direction and s != direction):
                v0, v1 = pair if pair else (None, None)
                return ConvexityCheck(False, out.directions, (j, points[i], points[i + 1], v0, v1))
            direction = s
        out.directions.append(direction or 1)
    return out
