"""Low-level arithmetic shared by every engine.

Two concerns live here: reducing large products modulo 1 without losing the
fractional digits (error-free products in double-double form), and
compensated summation kernels with a fixed left-to-right order.
"""

from __future__ import annotations

import numba
import numpy as np

_SPLITTER = 134217729.0  # 2**27 + 1


def frac(x):
    """Fractional part in [0, 1); values that round up to 1.0 wrap to 0.0."""
    r = np.asarray(x, dtype=float)
    r = r - np.floor(r)
    return np.where(r >= 1.0, 0.0, r)


def _split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """Error-free product: returns ``(p, e)`` with ``p + e == a * b`` exactly."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    p = a * b
    ah, al = _split(a)
    bh, bl = _split(b)
    e = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, e


def frac_mul(n, hi, lo=0.0):
    """``frac(n * (hi + lo))`` accurate to a few ulps of 1.

    ``n`` holds integers (as ints or floats, |n| < 2**52); ``hi + lo`` is a
    double-double multiplier. The naive ``(n * hi) % 1`` loses
    ``log10(n * hi)`` digits.
    """
    n = np.asarray(n, dtype=float)
    p, e = two_prod(n, hi)
    r = (p - np.floor(p)) + e + n * lo
    return frac(r)


def floor_split(x_int, x_frac):
    """Split ``x_int + x_frac`` (integer part exact, x_frac small) into
    ``(integer, fraction)`` with the fraction in [0, 1)."""
    fl = np.floor(x_frac)
    r = x_frac - fl
    wrap = r >= 1.0
    r = np.where(wrap, 0.0, r)
    return x_int + fl + wrap, r


def torus_distance(a, b):
    """Coordinatewise circle distance ``min(|a-b|, 1-|a-b|)``; same shape as inputs."""
    d = np.abs(frac(np.asarray(a) - np.asarray(b)))
    return np.minimum(d, 1.0 - d)


@numba.njit(nogil=True, cache=True)
def kahan_rows(block, s, c):
    """Accumulate the rows of ``block`` (B, P) into ``s`` with compensation ``c``.

    Rows are added strictly in order, so splitting a sum over several calls
    gives bit-identical results to a single call.
    """
    B, P = block.shape
    for i in range(B):
        for p in range(P):
            y = block[i, p] - c[p]
            t = s[p] + y
            c[p] = (t - s[p]) - y
            s[p] = t


@numba.njit(nogil=True, cache=True)
def _kahan_sum_1d(values):
    s = 0.0
    c = 0.0
    for i in range(values.shape[0]):
        y = values[i] - c
        t = s + y
        c = (t - s) - y
        s = t
    return s


def kahan_sum(values) -> float:
    """Compensated left-to-right sum of a 1-D real array."""
    v = np.ascontiguousarray(values, dtype=float)
    if v.ndim != 1:
        raise ValueError("kahan_sum expects a 1-D array")
    return float(_kahan_sum_1d(v))


def kahan_mean_last_axis(values):
    """Compensated mean along the last axis of a real array of any rank."""
    v = np.ascontiguousarray(values, dtype=float)
    flat = v.reshape(-1, v.shape[-1])
    out = np.empty(flat.shape[0])
    for i in range(flat.shape[0]):
        out[i] = _kahan_sum_1d(flat[i])
    return (out / v.shape[-1]).reshape(v.shape[:-1])


def kahan_prefix(values, checkpoints):
    """Running compensated sums of a 1-D real array recorded after
    ``checkpoints[j]`` terms (each ``1 <= checkpoint <= len(values)``)."""
    v = np.ascontiguousarray(values, dtype=float)
    out = []
    s = 0.0
    c = 0.0
    start = 0
    for cp in checkpoints:
        seg = v[start:cp]
        for x in seg:
            y = x - c
            t = s + y
            c = (t - s) - y
            s = t
        start = cp
        out.append(s)
    return out
