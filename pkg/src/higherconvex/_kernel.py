"""Vectorised set-combination kernels behind :mod:`higherconvex.sets`.

Additive sets are embedded as integers over a common denominator; multiplicative
sets as coprime (numerator, denominator) pairs.  Deduplication is sort based
(``np.unique``) or, for dense integer ranges, a bitmap.  Integers beyond int64
use multi-limb arrays; oversized multiplicative pairs drop to Python Fractions.
"""
from __future__ import annotations

from fractions import Fraction
from math import lcm

import numpy as np

from .errors import CapExceeded

_INT_LIMIT = 1 << 62
BITMAP_MAX = 1 << 26
_CHUNK = 1 << 22
_MERGE_AT = 1 << 24


class MulState:
    __slots__ = ("nums", "dens", "native")

    def __init__(self, nums, dens, native):
        self.nums = nums  # native: unique pairs as int64 arrays; else a set of Fractions
        self.dens = dens
        self.native = native

    def __len__(self):
        return len(self.nums)


# ---------------------------------------------------------------- additive
#
# "i64" states hold a sorted unique int64 array.  "wide" states hold an (n, L)
# uint64 array of little-endian two's-complement limbs, unique but unordered,
# plus an upper bound on the bit length of the values.

class AddState:
    __slots__ = ("den", "values", "wide", "bits")

    def __init__(self, den, values, wide=False, bits=0):
        self.den = den
        self.values = values
        self.wide = wide
        self.bits = bits

    def __len__(self):
        return len(self.values)


def add_encode(elements):
    den = 1
    for x in elements:
        den = lcm(den, x.denominator)
    return _add_state(den, [x.numerator * (den // x.denominator) for x in elements])


def _add_state(den, ints):
    bits = max((abs(v).bit_length() for v in ints), default=0)
    if bits < 62:
        return AddState(den, np.asarray(sorted(ints), dtype=np.int64))
    return AddState(den, _to_wide(ints, _limbs(bits)), True, bits)


def _limbs(bits):
    return (bits + 2) // 64 + 1


def _to_wide(ints, nlimbs):
    width = 8 * nlimbs
    buf = b"".join(v.to_bytes(width, "little", signed=True) for v in ints)
    return np.frombuffer(buf, dtype="<u8").reshape(-1, nlimbs).copy()


def _from_wide(arr):
    n, nlimbs = arr.shape
    width = 8 * nlimbs
    raw = np.ascontiguousarray(arr, dtype="<u8").tobytes()
    return [int.from_bytes(raw[i * width:(i + 1) * width], "little", signed=True) for i in range(n)]


def _state_ints(state):
    if state.wide:
        return _from_wide(state.values)
    return state.values.tolist()


def _widen(state, nlimbs):
    if not state.wide:
        return _to_wide(state.values.tolist(), nlimbs)
    arr = state.values
    extra = nlimbs - arr.shape[1]
    if extra <= 0:
        return arr
    sign = np.where(arr[:, -1] >> np.uint64(63), np.uint64(0xFFFFFFFFFFFFFFFF), np.uint64(0))
    return np.hstack([arr, np.repeat(sign[:, None], extra, axis=1)])


def _wide_add(a, b):
    out = np.empty(np.broadcast_shapes(a.shape, b.shape), dtype=np.uint64)
    carry = None
    for limb in range(out.shape[-1]):
        x, y = a[..., limb], b[..., limb]
        s = x + y
        c = s < x
        if carry is not None:
            s2 = s + carry
            c |= s2 < s
            s = s2
        out[..., limb] = s
        carry = c.astype(np.uint64)
    return out


def _wide_unique(arr):
    nlimbs = arr.shape[1]
    void = np.ascontiguousarray(arr).view(np.dtype((np.void, 8 * nlimbs))).ravel()
    return np.unique(void).view("<u8").reshape(-1, nlimbs)


def _rescale(state, den):
    f = den // state.den
    if f == 1:
        return state
    return _add_state(den, [v * f for v in _state_ints(state)])


def add_negate(state):
    if not state.wide:
        return AddState(state.den, -state.values[::-1])
    flipped = ~state.values
    one = np.zeros(state.values.shape[1], dtype=np.uint64)
    one[0] = 1
    return AddState(state.den, _wide_add(flipped, one[None, :]), True, state.bits)


def add_combine(sx, sy, cap):
    den = lcm(sx.den, sy.den)
    sx, sy = _rescale(sx, den), _rescale(sy, den)
    if not len(sx) or not len(sy):
        return AddState(den, np.empty(0, dtype=np.int64))
    if not sx.wide and not sy.wide:
        lo = int(sx.values[0]) + int(sy.values[0])
        hi = int(sx.values[-1]) + int(sy.values[-1])
        if max(abs(lo), abs(hi)) < _INT_LIMIT:
            return AddState(den, _native_sum(sx.values, sy.values, lo, hi, cap))
    bits = max(sx.bits or 63, sy.bits or 63) + 1
    nlimbs = _limbs(bits)
    xv, yv = _widen(sx, nlimbs), _widen(sy, nlimbs)
    if len(xv) > len(yv):
        xv, yv = yv, xv
    step = max(1, _CHUNK // (len(yv) * nlimbs))
    parts, pending, acc = [], 0, np.empty((0, nlimbs), dtype=np.uint64)
    for i in range(0, len(xv), step):
        block = _wide_add(xv[i:i + step, None, :], yv[None, :, :]).reshape(-1, nlimbs)
        parts.append(_wide_unique(block))
        pending += len(parts[-1])
        if pending >= _MERGE_AT:
            acc = _wide_unique(np.concatenate([acc] + parts))
            parts, pending = [], 0
            if len(acc) > cap:
                raise CapExceeded(cap, len(acc))
    acc = _wide_unique(np.concatenate([acc] + parts))
    if len(acc) > cap:
        raise CapExceeded(cap, len(acc))
    return AddState(den, acc, True, bits)


def _native_sum(xv, yv, lo, hi, cap):
    if len(xv) > len(yv):
        xv, yv = yv, xv
    width = hi - lo + 1
    pairs = len(xv) * len(yv)
    if width <= BITMAP_MAX and width <= 64 * pairs:
        out = np.zeros(width, dtype=bool)
        y0 = int(yv[0])
        span = int(yv[-1]) - y0 + 1
        if span <= 8 * len(yv):
            ybits = np.zeros(span, dtype=bool)
            ybits[yv - y0] = True
            for x in xv.tolist():
                s = x + y0 - lo
                out[s:s + span] |= ybits
        else:
            base = yv - lo
            for x in xv.tolist():
                out[base + x] = True
        res = np.flatnonzero(out).astype(np.int64) + lo
        if len(res) > cap:
            raise CapExceeded(cap, len(res))
        return res
    step = max(1, _CHUNK // len(yv))
    parts, pending, acc = [], 0, np.empty(0, dtype=np.int64)
    for i in range(0, len(xv), step):
        block = np.unique((xv[i:i + step, None] + yv[None, :]).ravel())
        parts.append(block)
        pending += len(block)
        if pending >= _MERGE_AT:
            acc = np.unique(np.concatenate([acc] + parts))
            parts, pending = [], 0
            if len(acc) > cap:
                raise CapExceeded(cap, len(acc))
    acc = np.unique(np.concatenate([acc] + parts))
    if len(acc) > cap:
        raise CapExceeded(cap, len(acc))
    return acc


def add_decode(state):
    den = state.den
    ints = _state_ints(state)
    if state.wide:
        ints.sort()
    return [Fraction(v, den) for v in ints]


# ----------------------------------------------------------- multiplicative

def mul_encode(elements):
    nums = [x.numerator for x in elements]
    dens = [x.denominator for x in elements]
    if nums and max(max(nums), max(dens)) >= _INT_LIMIT:
        return MulState(set(elements), None, False)
    return MulState(np.asarray(nums, dtype=np.int64), np.asarray(dens, dtype=np.int64), True)


def mul_invert(state):
    if state.native:
        return MulState(state.dens, state.nums, True)
    return MulState({1 / x for x in state.nums}, None, False)


def _as_fraction_set(state):
    if not state.native:
        return state.nums
    return {Fraction(int(p), int(q)) for p, q in zip(state.nums.tolist(), state.dens.tolist())}


def mul_combine(sx, sy, cap):
    if len(sx) == 0 or len(sy) == 0:
        return MulState(np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64), True)
    if sx.native and sy.native:
        pmax = int(sx.nums.max()) * int(sy.nums.max())
        qmax = int(sx.dens.max()) * int(sy.dens.max())
        if pmax < _INT_LIMIT and qmax < _INT_LIMIT:
            return _native_product(sx, sy, pmax, qmax, cap)
    xs, ys = _as_fraction_set(sx), _as_fraction_set(sy)
    if len(xs) > len(ys):
        xs, ys = ys, xs
    ys = list(ys)
    out = set()
    for x in xs:
        out.update([x * y for y in ys])
        if len(out) > cap:
            raise CapExceeded(cap, len(out))
    return MulState(out, None, False)


def _native_product(sx, sy, pmax, qmax, cap):
    if len(sx) > len(sy):
        sx, sy = sy, sx
    shift = qmax.bit_length()
    packed = pmax.bit_length() + shift < 63
    step = max(1, _CHUNK // len(sy))
    parts, pending, acc = [], 0, None

    def merge(blocks):
        if packed:
            return np.unique(np.concatenate(blocks))
        return np.unique(np.concatenate(blocks, axis=0), axis=0)

    for i in range(0, len(sx), step):
        p = (sx.nums[i:i + step, None] * sy.nums[None, :]).ravel()
        q = (sx.dens[i:i + step, None] * sy.dens[None, :]).ravel()
        g = np.gcd(p, q)
        p //= g
        q //= g
        block = (p << shift) | q if packed else np.stack([p, q], axis=1)
        parts.append(merge([block]))
        pending += len(parts[-1])
        if pending >= _MERGE_AT:
            acc = merge(parts if acc is None else [acc] + parts)
            parts, pending = [], 0
            if len(acc) > cap:
                raise CapExceeded(cap, len(acc))
    acc = merge(parts if acc is None else [acc] + parts)
    if len(acc) > cap:
        raise CapExceeded(cap, len(acc))
    if packed:
        return MulState(acc >> shift, acc & ((1 << shift) - 1), True)
    return MulState(acc[:, 0].copy(), acc[:, 1].copy(), True)


def mul_decode(state):
    if not state.native:
        return sorted(state.nums)
    nums, dens = state.nums, state.dens
    approx = nums.astype(np.float64) / dens.astype(np.float64)
    order = np.argsort(approx, kind="stable")
    out = [Fraction(int(p), int(q)) for p, q in zip(nums[order].tolist(), dens[order].tolist())]
    # correctly rounded division is monotone, so only equal floats can be misordered
    sa = approx[order]
    ties = np.flatnonzero(sa[1:] == sa[:-1])
    if len(ties):
        i = 0
        tie_set = set(ties.tolist())
        n = len(out)
        while i < n - 1:
            if i in tie_set:
                j = i
                while j in tie_set:
                    j += 1
                out[i:j + 1] = sorted(out[i:j + 1])
                i = j + 1
            else:
                i += 1
    return out
