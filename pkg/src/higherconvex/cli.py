"""Command-line front end.

Exit status: 0 on success, 2 when a bound or a certificate check fails,
1 on usage, parse and precondition errors.
"""
from __future__ import annotations

import argparse
import sys

from . import certified
from .construction import (difference_index, distinct_values, dyadic_pigeonhole, theorem3_witnesses,
                           theorem4_witnesses, verify_certificate)
from .convexity import convexity_order, function_convexity_check
from .errors import HigherConvexError
from .experiments import (ExperimentReport, check_corollary, check_theorem3, check_threefold,
                          growth_report, oracle_feasible, oracle_iterated, parse_family)
from .maps import map_set, parse_map
from .sets import (DEFAULT_CAP, Monoid, default_cap, dumps, format_scalar, iterated_combine, parse_scalar,
                   read_set, write_text_atomic)

EXIT_OK, EXIT_USAGE, EXIT_FAILED = 0, 1, 2


class _Failed(Exception):
    """A bound or verification failure: exit status 2."""


def _int_list(text):
    return [int(x) for x in text.replace(",", " ").split()]


def _scalar_list(text):
    return [parse_scalar(x) for x in text.replace(",", " ").split()]


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cap", type=int, default=None,
                        help=f"element cap for enumerations (default {DEFAULT_CAP}, or $HIGHERCONVEX_CAP)")
    common.add_argument("--max-precision", type=int, default=certified.MAX_PRECISION,
                        help="ceiling in bits for certified comparisons (default %(default)s)")
    common.add_argument("--jobs", type=int, default=1, help="worker threads for independent cells (default 1)")
    common.add_argument("--format", choices=("text", "csv", "json"), default="text",
                        help="report format (default %(default)s)")
    common.add_argument("--seed", type=int, default=0, help="seed for randomized families (default 0)")
    common.add_argument("--out", default=None, help="write the artifact here (atomically) instead of stdout")

    p = argparse.ArgumentParser(prog="higherconvex", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", parents=[common], help="generate a family member as a set file")
    g.add_argument("family", choices=("powers", "geometric", "ap", "random-convex"))
    g.add_argument("param", help="exponent, ratio, step or convexity order")
    g.add_argument("-N", "--size", type=int, required=True, help="number of elements")

    def with_input(name, help_):
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("--in", dest="input", required=True, help="set file")
        sp.add_argument("--monoid", choices=("additive", "multiplicative"), default=None,
                        help="override the file's monoid header")
        return sp

    s = with_input("sumset", "compute m A - n A (or A^(m)/A^(n))")
    s.add_argument("--m", type=int, default=2)
    s.add_argument("--n", type=int, default=0)
    s.add_argument("--verify-oracle", action="store_true", help="cross-check with the enumeration oracle")

    c = with_input("convexity", "convexity order of a set, or a grid check of a map")
    c.add_argument("--map", default=None, help="map descriptor, e.g. 'power: 5'; the set is the grid")
    c.add_argument("--k", type=int, default=1)
    c.add_argument("--steps", type=_scalar_list, default=(), help="comma separated positive steps")

    with_input("pigeonhole", "dyadic popular-difference decomposition")

    w3 = with_input("witness3", "witnesses in 2^k A - (2^k - 1) A for a k-convex set")
    w3.add_argument("--k", type=int, required=True)
    w3.add_argument("--mode", choices=("prefix", "half"), default="prefix")
    w3.add_argument("--verify-oracle", action="store_true")

    w4 = with_input("witness4", "witnesses in 2^k f(A) - (2^k - 1) f(A) for a k-convex map")
    w4.add_argument("--k", type=int, required=True)
    w4.add_argument("--map", required=True)
    w4.add_argument("--verify-oracle", action="store_true")

    co = with_input("corollary", "small-doubling hypothesis and iterated growth")
    co.add_argument("--part", type=int, choices=(1, 2, 3), required=True)
    co.add_argument("--k", type=int, required=True)
    co.add_argument("--delta", type=parse_scalar, required=True)
    co.add_argument("--poly", type=_scalar_list, default=None, help="part 3: coefficients low to high")

    t = with_input("threefold", "max(|A+A-A|, |AA/A|) against |A|^(3/2) / log2(|A|)^(3/2)")
    t.add_argument("--assert", dest="assert_bound", action="store_true",
                   help="fail (exit 2) when the constant-1 inequality does not hold")

    r = sub.add_parser("report", parents=[common], help="growth report or bound check over a family")
    r.add_argument("--family", required=True, help="e.g. 'powers 3', 'geometric 2', 'random-convex 2'")
    r.add_argument("--sizes", type=_int_list, required=True)
    r.add_argument("--k", type=_int_list, default=[1])
    r.add_argument("--check", choices=("growth", "theorem3"), default="growth")
    r.add_argument("--mn", type=_int_list, default=None, help="fixed m,n instead of 2^k, 2^k - 1")
    r.add_argument("--monoid", choices=("additive", "multiplicative"), default="additive")
    return p


def _emit(args, text):
    if args.out:
        write_text_atomic(args.out, text)
    else:
        sys.stdout.write(text)


def _load(args):
    return read_set(args.input, Monoid(args.monoid) if args.monoid else None)


def _cmd_gen(args):
    fam = parse_family(f"{args.family} {args.param}", args.seed)
    A = fam.build(args.size)
    if args.family == "random-convex" and convexity_order(A).order < min(int(fam.param), max(args.size - 2, 0)):
        raise _Failed("generated set lost its convexity order")
    _emit(args, dumps(A))


def _cmd_sumset(args):
    A = _load(args)
    X = iterated_combine(A, args.m, args.n, args.cap)
    if args.verify_oracle and oracle_iterated(A, args.m, args.n, args.cap) != X:
        raise _Failed("kernel and oracle disagree")
    if args.out:
        write_text_atomic(args.out, dumps(X))
    print(f"|{args.m}A-{args.n}A| = {len(X)} ({A.monoid.value})")


def _cmd_convexity(args):
    A = _load(args)
    if args.map is None:
        rep = convexity_order(A)
        profile = ",".join(f"{d:+d}" for d in rep.direction_profile)
        print(f"order {rep.order}; profile [{profile}]; checkable levels {rep.checkable_levels}")
        if rep.note:
            print(rep.note)
        return
    f = parse_map(args.map)
    check = function_convexity_check(f, args.k, A.elements, args.steps)
    print(check.describe())
    if not check:
        raise _Failed("map is not strictly monotone at some difference level")


def _cmd_pigeonhole(args):
    A = _load(args)
    dec = dyadic_pigeonhole(A)
    idx = difference_index(A)
    print(f"t={dec.t}, L={dec.L}, m={dec.m}")
    print("H' = {" + ", ".join(format_scalar(h) for h in dec.H_prime) + "}")
    print(f"sum of i(j) = {idx.index_sum}; L m^2 / 2 = {format_scalar(dec.sumset_lower_bound)}")
    ok_i, ok_iii = dec.satisfies_density(), dec.satisfies_fiber_sizes()
    print(f"(i) L m >= N / (3 log2 N): {'ok' if ok_i else 'FAILED'}")
    print(f"(iii) L <= |A_h| <= 2L: {'ok' if ok_iii else 'FAILED'}")
    if not (ok_i and ok_iii):
        raise _Failed("pigeonhole invariants violated")


def _check_batch(args, A, batch, f=None):
    bad = [c for c in batch.certificates if not verify_certificate(c, A, batch.k, f)]
    if bad:
        raise _Failed(f"{len(bad)} certificates failed verification ({verify_certificate(bad[0], A, batch.k, f).clause})")
    if not distinct_values(batch):
        raise _Failed("certificate values are not pairwise distinct")
    summary = [f"{batch.count} certified witnesses, all verified; claimed bound {format_scalar(batch.claimed_count_bound)}"]
    if getattr(args, "verify_oracle", False) and f is not None and not f.exact:
        summary.append("oracle check skipped: map values are irrational")
    elif getattr(args, "verify_oracle", False):
        m, n = 2 ** batch.k, 2 ** batch.k - 1
        ground = A if f is None else map_set(f, A)
        if not oracle_feasible(len(ground), m, n):
            summary.append("oracle check skipped: too large")
        else:
            oracle = set(oracle_iterated(ground, m, n, args.cap).elements)
            if any(c.value not in oracle for c in batch.certificates):
                raise _Failed("a witness is missing from the oracle set")
            summary.append(f"all witnesses inside the oracle set ({len(oracle)} elements)")
    return summary


def _cmd_witness3(args):
    A = _load(args)
    batch = theorem3_witnesses(A, args.k, args.mode)
    summary = _check_batch(args, A, batch)
    if args.out:
        write_text_atomic(args.out, batch.dumps())
    print("\n".join(summary))
    if not batch.meets_claim():
        raise _Failed(f"{batch.count} witnesses, fewer than the claimed {format_scalar(batch.claimed_count_bound)}")


def _cmd_witness4(args):
    A = _load(args)
    f = parse_map(args.map)
    batch = theorem4_witnesses(A, f, args.k)
    summary = _check_batch(args, A, batch, f)
    if args.k == 1:
        bound = batch.details["pigeonhole_bound"]
        summary.append(f"m L^2 / 2 = {format_scalar(bound)}")
        if batch.count < bound:
            raise _Failed(f"{batch.count} witnesses, below m L^2 / 2 = {format_scalar(bound)}")
    if args.out:
        write_text_atomic(args.out, batch.dumps())
    print("\n".join(summary))


def _report_out(args, report: ExperimentReport):
    _emit(args, report.render(args.format))
    if not report.passed:
        raise _Failed("a bound check failed")


def _cmd_corollary(args):
    A = _load(args)
    _report_out(args, check_corollary(args.part, A, args.k, args.delta, args.cap, args.poly))


def _cmd_threefold(args):
    A = _load(args)
    _report_out(args, check_threefold(A, args.cap, args.input, args.assert_bound))


def _cmd_report(args):
    fam = parse_family(args.family, args.seed)
    if args.check == "theorem3":
        if len(args.k) != 1:
            raise ValueError("--check theorem3 takes a single --k")
        report = check_theorem3(fam, args.sizes, args.k[0], args.cap, args.jobs)
    else:
        mn = tuple(args.mn) if args.mn else None
        if mn is not None and len(mn) != 2:
            raise ValueError("--mn takes two integers")
        report = growth_report(fam, args.k, args.sizes, mn, args.cap, args.jobs, args.monoid)
    _report_out(args, report)


COMMANDS = {
    "gen": _cmd_gen, "sumset": _cmd_sumset, "convexity": _cmd_convexity, "pigeonhole": _cmd_pigeonhole,
    "witness3": _cmd_witness3, "witness4": _cmd_witness4, "corollary": _cmd_corollary,
    "threefold": _cmd_threefold, "report": _cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        certified.set_max_precision(args.max_precision)
        if args.cap is None:
            args.cap = default_cap()
        COMMANDS[args.command](args)
    except _Failed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except (HigherConvexError, ValueError, OSError) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
