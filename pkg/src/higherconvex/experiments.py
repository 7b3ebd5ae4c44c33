"""Desk-scale experiment harness: oracles, bound checks and growth reports.

Every asserted bound is recomputed from (N, k) or from the pigeonhole data
alone; cardinalities come from exact enumeration.  Bounds whose constants
are not explicit are reported, never asserted.
"""
from __future__ import annotations

import csv
import hashlib
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import comb

import numpy as np

from . import certified
from .construction import distinct_values, theorem3_witnesses, theorem4_witnesses, verify_certificate
from .errors import (BadFamily, CapExceeded, HypothesisViolated, NotKConvex, NotKConvexFunction, ParseError,
                     TooSmall)
from .maps import ConvexMap, IntegerPower, PolynomialMap, ShiftedLogExp, map_set
from .polynomial import count_roots
from .sets import (ADDITIVE, MULTIPLICATIVE, GroupedSet, Monoid, default_cap, format_scalar, iterated_size,
                   parse_scalar)

# an oracle run enumerates at most this many multisets per side
ORACLE_LIMIT = 400_000


# -------------------------------------------------------------------- oracle

def _multiset_values(elems, r, op):
    if r == 0:
        return {op.identity}
    out = set()
    for combo in combinations_with_replacement(elems, r):
        acc = combo[0]
        for x in combo[1:]:
            acc = op.op(acc, x)
        out.add(acc)
    return out


def oracle_feasible(N, m, n):
    return comb(N + m - 1, m) <= ORACLE_LIMIT and comb(N + n - 1, n) <= ORACLE_LIMIT


def oracle_iterated(A: GroupedSet, m: int, n: int = 0, cap=None) -> GroupedSet:
    """``m A - n A`` by direct multiset enumeration, independent of the set kernel.

    Sums of ``m``-multisets and ``n``-multisets are enumerated and deduplicated
    separately, then paired.  Integer additive data pair through a Python-int
    bitmask (one shift-or per subtrahend), everything else through plain sets.
    """
    if m < 1 or n < 0:
        raise ValueError("need m >= 1 and n >= 0")
    cap = default_cap() if cap is None else cap
    op = A.monoid
    elems = A.elements
    plus = _multiset_values(elems, m, op)
    minus = _multiset_values(elems, n, op)
    if len(plus) * len(minus) > cap * 64:
        raise CapExceeded(cap, stage="oracle")
    if op is ADDITIVE and all(x.denominator == 1 for x in elems):
        lo = min(plus)
        mask = 0
        for p in plus:
            mask |= 1 << int(p - lo)
        acc = 0
        top = max(minus)
        for q in minus:
            acc |= mask << int(top - q)
        base = lo - top
        bits = bin(acc)[:1:-1]
        out = [base + i for i, b in enumerate(bits) if b == "1"]
    else:
        out = {op.diff(p, q) for p in plus for q in minus}
    if len(out) > cap:
        raise CapExceeded(cap, len(out), stage="oracle")
    return GroupedSet(out, op)


# ------------------------------------------------------------------ families

@dataclass(frozen=True)
class Family:
    """``powers k``, ``geometric r``, ``ap d`` or ``random-convex k``."""

    kind: str
    param: Fraction
    seed: int = 0

    KINDS = ("powers", "geometric", "ap", "random-convex")

    def __post_init__(self):
        if self.kind not in self.KINDS:
            raise BadFamily(f"unknown family {self.kind!r}")
        p = self.param
        if self.kind in ("powers", "random-convex") and (p.denominator != 1 or p < 1):
            raise BadFamily(f"{self.kind} needs a positive integer parameter")
        if self.kind == "geometric" and (p <= 0 or p == 1):
            raise BadFamily("geometric ratio must be positive and different from 1")
        if self.kind == "ap" and p <= 0:
            raise BadFamily("ap step must be positive")

    @property
    def descriptor(self):
        return f"{self.kind} {format_scalar(self.param)}"

    def build(self, N: int) -> GroupedSet:
        if N < 1:
            raise BadFamily("N must be at least 1")
        p = self.param
        if self.kind == "powers":
            return GroupedSet([Fraction(n) ** int(p) for n in range(1, N + 1)])
        if self.kind == "geometric":
            return GroupedSet([p ** n for n in range(1, N + 1)])
        if self.kind == "ap":
            return GroupedSet([1 + (n - 1) * p for n in range(1, N + 1)])
        return GroupedSet(random_convex(int(p), N, self.seed))


def random_convex(k: int, N: int, seed: int):
    """Positive random increments at difference level ``k + 1``, integrated back up.

    Every integration starts from a positive value, so levels ``1..k`` are
    strictly increasing and the result has convexity order at least ``k``.
    """
    rng = np.random.default_rng(seed)
    top = max(N - k - 1, 0)
    level = [int(x) for x in rng.integers(1, 11, size=top)]
    for _ in range(k + 1):
        start = int(rng.integers(1, 11))
        seq = [start]
        for d in level:
            seq.append(seq[-1] + d)
        level = seq
    return level[:N]


def parse_family(text: str, seed: int = 0) -> Family:
    parts = text.replace(":", " ").split()
    if len(parts) == 3 and parts[0] == "random-convex" and parts[1] == "order":
        parts = [parts[0], parts[2]]
    if len(parts) != 2:
        raise BadFamily(f"cannot parse family {text!r}")
    try:
        param = parse_scalar(parts[1])
    except ParseError as exc:
        raise BadFamily(str(exc)) from None
    return Family(parts[0], param, seed)


# ------------------------------------------------------------------- reports

@dataclass
class ReportRow:
    family: str
    N: int
    k: int
    map: str = ""
    sumset: int | None = None        # |A+A|
    tripling: int | None = None      # |A+A-A|
    quotient: int | None = None      # |AA/A|
    measured: int | None = None
    bound: object = None
    ratio: object = None
    verdict: str = "report"
    K: Fraction | None = None
    digest: str = ""
    note: str = ""

    def cells(self):
        return [self.family, self.N, self.k, self.map, _cell(self.sumset), _cell(self.tripling),
                _cell(self.quotient), _cell(self.measured), _cell(self.bound), _cell(self.ratio), self.verdict]


CSV_HEADER = ["family", "N", "k", "map", "|A+A|", "|A+A-A|", "|AA/A|", "measured", "bound", "ratio", "verdict"]


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, Fraction):
        return format_scalar(x)
    if isinstance(x, float):
        return f"{x:.6g}"
    return str(x)


@dataclass
class ExperimentReport:
    name: str
    rows: list = field(default_factory=list)
    extras: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(r.verdict != "fail" for r in self.rows)

    @property
    def sizes(self):
        return [r.N for r in self.rows]

    def verdicts(self):
        return [r.verdict for r in self.rows]

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_HEADER)
        for r in self.rows:
            w.writerow(r.cells())
        return buf.getvalue()

    def to_json(self):
        rows = []
        for r in self.rows:
            d = dict(zip(CSV_HEADER, r.cells()))
            d["N"], d["k"] = r.N, r.k
            d["K"] = _cell(r.K)
            d["digest"] = r.digest
            d["note"] = r.note
            rows.append(d)
        extras = {k: _cell(v) if isinstance(v, (Fraction, float)) else v for k, v in self.extras.items()}
        return json.dumps({"experiment": self.name, "rows": rows, "extras": extras}, indent=1, sort_keys=True) + "\n"

    def to_text(self):
        lines = [f"# {self.name}"]
        for r in self.rows:
            cells = dict(zip(CSV_HEADER, r.cells()))
            shown = " ".join(f"{k}={v}" for k, v in cells.items() if v != "")
            lines.append(shown + (f" ({r.note})" if r.note else ""))
        for k, v in self.extras.items():
            lines.append(f"{k}: {_cell(v) if isinstance(v, (Fraction, float)) else v}")
        return "\n".join(lines) + "\n"

    def render(self, fmt="text"):
        return {"csv": self.to_csv, "json": self.to_json, "text": self.to_text}[fmt]()


def _safe_size(A, m, n, cap, monoid=None):
    try:
        X = A if monoid is None else A.retag(monoid)
        return iterated_size(X, m, n, cap)
    except CapExceeded:
        return None


def _basic_sizes(A, cap):
    positive = len(A) > 0 and A.min > 0
    return (_safe_size(A.retag(ADDITIVE), 2, 0, cap), _safe_size(A.retag(ADDITIVE), 2, 1, cap),
            _safe_size(A, 2, 1, cap, MULTIPLICATIVE) if positive else None)


def _run_cells(fn, items, jobs):
    if jobs and jobs > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(fn, items))
    return [fn(x) for x in items]


def _family_of(family):
    return parse_family(family) if isinstance(family, str) else family


# ------------------------------------------------------------ theorem checks

def _theorem3_cell(family, N, k, cap):
    A = family.build(N)
    row = ReportRow(family.descriptor, N, k, "identity")
    row.sumset, row.tripling, row.quotient = _basic_sizes(A, cap)
    try:
        batch = theorem3_witnesses(A, k)
    except NotKConvex as exc:
        row.verdict, row.note = "expected-failure", f"NotKConvex: {exc}"
        return row
    except TooSmall as exc:
        row.verdict, row.note = "too-small", str(exc)
        return row
    bound = batch.claimed_count_bound
    row.bound, row.digest = bound, batch.digest()
    ok = all(verify_certificate(c, A, k) for c in batch.certificates) and distinct_values(batch)
    lo, hi = A.min, A.max
    ok = ok and all(lo < c.value < hi for c in batch.certificates)
    exact = _safe_size(A, 2 ** k, 2 ** k - 1, cap)
    if exact is None:
        row.measured, row.note = batch.count, "cap exceeded: witness count reported"
    else:
        row.measured = exact
    if oracle_feasible(len(A), 2 ** k, 2 ** k - 1):
        try:
            oracle = set(oracle_iterated(A, 2 ** k, 2 ** k - 1, cap).elements)
            ok = ok and all(c.value in oracle for c in batch.certificates)
            row.note = (row.note + "; " if row.note else "") + "witnesses inside oracle set"
        except CapExceeded:
            pass
    row.ratio = float(Fraction(row.measured) / bound)
    row.note = (row.note + "; " if row.note else "") + f"witnesses={batch.count}"
    row.verdict = "pass" if ok and row.measured >= bound and batch.count >= bound else "fail"
    return row


def check_theorem3(family, sizes, k: int, cap=None, jobs=1) -> ExperimentReport:
    family = _family_of(family)
    cap = default_cap() if cap is None else cap
    rows = _run_cells(lambda N: _theorem3_cell(family, N, k, cap), list(sizes), jobs)
    return ExperimentReport(f"theorem3 {family.descriptor} k={k}", rows)


def check_theorem4(A, f: ConvexMap, k: int, cap=None, family: str = "custom", epsilon=Fraction(0)) -> ExperimentReport:
    """Run the witness engine, verify every certificate and record the counts.

    For ``k = 1`` the count is asserted against ``m L^2 / 2``; for larger ``k``
    the row compares the count with ``|A|^(k+1-epsilon)`` without a verdict.
    """
    cap = default_cap() if cap is None else cap
    if isinstance(A, (str, Family)):
        raise TypeError("pass a GroupedSet; build family members with Family.build")
    row = ReportRow(family, len(A), k, f.serialize())
    row.sumset, row.tripling, row.quotient = _basic_sizes(A, cap)
    if row.tripling is not None and len(A):
        row.K = Fraction(row.tripling, len(A))
    report = ExperimentReport(f"theorem4 {family} k={k} map={f.serialize()}", [row])
    try:
        batch = theorem4_witnesses(A, f, k)
    except TooSmall as exc:
        row.verdict, row.note = "too-small", str(exc)
        return report
    except NotKConvexFunction as exc:
        row.verdict, row.note = "expected-failure", f"NotKConvexFunction: {exc}"
        return report
    row.measured, row.digest = batch.count, batch.digest()
    ok = all(verify_certificate(c, A, k, f) for c in batch.certificates) and distinct_values(batch)
    notes = []
    if f.exact and oracle_feasible(len(A), 2 ** k, 2 ** k - 1):
        try:
            image = map_set(f, A)
            oracle = set(oracle_iterated(image, 2 ** k, 2 ** k - 1, cap).elements)
            ok = ok and all(c.value in oracle for c in batch.certificates)
            notes.append("witnesses inside oracle set")
        except CapExceeded:
            notes.append("oracle skipped: cap")
    if k == 1:
        bound = batch.details["pigeonhole_bound"]
        row.bound = bound
        row.ratio = float(Fraction(batch.count) / bound)
        row.verdict = "pass" if ok and batch.count >= bound else "fail"
    else:
        trend = len(A) ** (k + 1 - float(epsilon))
        row.bound, row.ratio = float(trend), batch.count / trend
        row.verdict = "report" if ok else "fail"
        notes.append("trend only: the constant C is not explicit")
    d = batch.details
    notes.append(f"t={d['t']} L={d['L']} m={d['m']}")
    row.note = "; ".join(notes)
    return report


# ----------------------------------------------------------------- corollary

def _below_power(size, N, delta: Fraction):
    """``size <= N^(1 + delta)`` decided exactly for rational ``delta``."""
    p, q = delta.numerator, delta.denominator
    return size ** q <= N ** (q + p)


def _root_free_run(poly, orders, elems):
    """Longest run of consecutive elements with no root of the listed derivatives in its hull."""
    derivs = [poly.derivative(j) for j in orders]
    runs, start = [], 0
    for i, x in enumerate(elems):
        if any(d(x) == 0 for d in derivs):
            runs.append((start, i))
            start = i + 1
        elif i > start and any(count_roots(d, elems[i - 1], x) for d in derivs):
            runs.append((start, i))
            start = i
    runs.append((start, len(elems)))
    lo, hi = max(runs, key=lambda r: (r[1] - r[0], -r[0]))
    return elems[lo:hi]


def check_corollary(part: int, A: GroupedSet, k: int, delta, cap=None, poly=None,
                    family: str = "custom") -> ExperimentReport:
    """Small-doubling hypothesis check followed by an exact iterated-set count.

    ``epsilon`` is not searched for: the report records the exponent gap
    ``k - log|X| / log|A|`` actually measured.
    """
    cap = default_cap() if cap is None else cap
    delta = Fraction(delta)
    if k < 1 or (part == 3 and k < 2):
        raise ValueError("k must be at least 1 (at least 2 for part 3)")
    N = len(A)
    if part == 1:
        hyp = iterated_size(A.retag(ADDITIVE), 2, 0, cap)
        what = "|A+A|"
    elif part == 2:
        if A.min <= 0:
            raise HypothesisViolated("part 2 needs positive elements")
        hyp = iterated_size(A.retag(MULTIPLICATIVE), 2, 0, cap)
        what = "|AA|"
    elif part == 3:
        hyp = iterated_size(A.retag(ADDITIVE), 2, 0, cap)
        what = "|A+A|"
    else:
        raise ValueError("part must be 1, 2 or 3")
    if not _below_power(hyp, N, delta):
        raise HypothesisViolated(f"{what} = {hyp} exceeds |A|^(1+{format_scalar(delta)}) for |A| = {N}")
    m, n = 2 ** (k - 1), 2 ** (k - 1) - 1
    map_desc = "identity"
    used = A
    if part == 1:
        if A.min <= 0:
            raise HypothesisViolated("part 1 needs positive elements")
        measured = iterated_size(A.retag(MULTIPLICATIVE), m, n, cap)
    elif part == 2:
        shifted = map_set(ShiftedLogExp(), A.retag(MULTIPLICATIVE))
        map_desc = "a+1"
        measured = iterated_size(shifted, m, n, cap)
    else:
        f = IntegerPower(k) if poly is None else PolynomialMap(poly)
        if f.poly.degree != k:
            raise ValueError(f"part 3 needs a polynomial of degree {k}")
        map_desc = f.serialize()
        used = A.subset(_root_free_run(f.poly, range(1, k + 1), A.elements))
        measured = iterated_size(map_set(f, used), m, n, cap)
    row = ReportRow(family, N, k, map_desc, measured=measured)
    row.sumset, row.tripling, row.quotient = _basic_sizes(A, cap)
    gap = k - math.log(measured) / math.log(len(used)) if len(used) > 1 and measured > 0 else None
    row.bound = float(len(used) ** k)
    row.ratio = measured / row.bound
    row.note = f"part {part}; hypothesis {what}={hyp}; delta={format_scalar(delta)}"
    if gap is not None:
        row.note += f"; measured epsilon={gap:.4f}"
    if len(used) != N:
        row.note += f"; restricted to {len(used)} elements"
    return ExperimentReport(f"corollary part {part} k={k}", [row], {"epsilon": gap})


# ---------------------------------------------------------------- threefold

def threefold_holds(N: int, size: int) -> bool:
    """``size >= N^(3/2) / (log2 N)^(3/2)``, i.e. ``size^2 (log2 N)^3 >= N^3``, decided with certainty."""
    if N <= 1:
        return True
    e = N.bit_length() - 1
    if N == 1 << e:
        return size * size * e ** 3 >= N ** 3
    target = Fraction(N ** 3, size * size)
    cube = lambda p: certified.enclose(lambda iv, r: (iv.log(r(Fraction(N))) / iv.log(r(Fraction(2)))) ** 3, p)  # noqa: E731
    return certified.compare(cube, lambda p: certified.Interval.point(target)) > 0


def threefold_bound(N: int) -> float:
    return 0.0 if N <= 1 else N ** 1.5 / math.log2(N) ** 1.5


def check_threefold(A: GroupedSet, cap=None, family: str = "custom", assert_bound: bool = False) -> ExperimentReport:
    """Both cardinalities exactly, and their ratios to ``|A|^(3/2) / (log2 |A|)^(3/2)``.

    The verdict asserts the constant-1 inequality only when ``assert_bound``
    is set (the built-in families); otherwise it is reported.
    """
    cap = default_cap() if cap is None else cap
    N = len(A)
    add = iterated_size(A.retag(ADDITIVE), 2, 1, cap)
    mul = iterated_size(A.retag(MULTIPLICATIVE), 2, 1, cap)
    bound = threefold_bound(N)
    best = max(add, mul)
    row = ReportRow(family, N, 1, "identity", iterated_size(A.retag(ADDITIVE), 2, 0, cap), add, mul, best, bound)
    row.K = Fraction(add, N)
    holds = threefold_holds(N, best)
    row.ratio = best / bound if bound else float("inf")
    if assert_bound:
        row.verdict = "pass" if holds else "fail"
    else:
        row.verdict = "report"
    extras = {"additive_ratio": add / bound if bound else float("inf"),
              "multiplicative_ratio": mul / bound if bound else float("inf"),
              "holds": holds}
    row.note = f"additive ratio {_cell(extras['additive_ratio'])}, multiplicative ratio {_cell(extras['multiplicative_ratio'])}"
    return ExperimentReport(f"threefold {family}", [row], extras)


# ----------------------------------------------------------------- growth fit

def loglog_slope(sizes, values):
    """Least-squares slope of ``log2 value`` against ``log2 N``."""
    if len(sizes) < 2:
        return None
    slope, _ = np.polyfit(np.log2(np.asarray(sizes, float)), np.log2(np.asarray(values, float)), 1)
    return float(slope)


def growth_report(family, ks, sizes, mn=None, cap=None, jobs=1, monoid=None) -> ExperimentReport:
    """Rows of ``|2^k A - (2^k - 1) A|`` (or ``|m A - n A|`` when ``mn`` is given) with log-log slopes.

    The predicted exponent for the Theorem-3 quantity is ``k + 1``.
    """
    family = _family_of(family)
    cap = default_cap() if cap is None else cap
    monoid = Monoid(monoid or ADDITIVE)
    cells = [(k, N) for k in ks for N in sizes]

    def run(cell):
        k, N = cell
        m, n = mn if mn else (2 ** k, 2 ** k - 1)
        A = family.build(N).retag(monoid)
        row = ReportRow(family.descriptor, N, k, f"{m}A-{n}A {monoid.value}")
        try:
            row.measured = iterated_size(A, m, n, cap)
            if not mn:
                row.bound = Fraction(N ** (k + 1))
                row.ratio = row.measured / N ** (k + 1)
        except CapExceeded as exc:
            row.verdict, row.note = "cap-exceeded", str(exc)
        return row

    rows = _run_cells(run, cells, jobs)
    extras = {}
    for k in ks:
        got = [(r.N, r.measured) for r in rows if r.k == k and r.measured]
        slope = loglog_slope([a for a, _ in got], [b for _, b in got])
        if slope is not None:
            extras[f"slope k={k}"] = slope
            if not mn:
                extras[f"predicted exponent k={k}"] = k + 1
    return ExperimentReport(f"growth {family.descriptor}", rows, extras)


def report_digest(report: ExperimentReport) -> str:
    return hashlib.sha256(report.to_json().encode()).hexdigest()

