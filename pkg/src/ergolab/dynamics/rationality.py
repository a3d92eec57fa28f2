"""Symbolic rational-independence verdicts for configured shift constants."""

from __future__ import annotations

from fractions import Fraction

import mpmath
import numpy as np

INDEPENDENT = "rationally-independent"
DEPENDENT = "dependent"
UNKNOWN = "unknown"

DENOMINATOR_BOUND = 10**6
QUOTIENT_BOUND = 10**6
PSLQ_MAXCOEFF = 10**4
PSLQ_TOL = 1e-11


def continued_fraction(x: float, max_terms: int = 64) -> list[int]:
    """Partial quotients of the double ``x`` (exact rational arithmetic)."""
    r = Fraction(x)
    out = []
    for _ in range(max_terms):
        a = r.numerator // r.denominator
        out.append(a)
        r -= a
        if r == 0:
            break
        r = 1 / r
    return out


def rational_approximation(x: float) -> Fraction | None:
    """``p/q`` with ``q <= 1e6`` that ``x`` equals up to double rounding, else None.

    Walk the convergents of ``x``. The expansion stops with a rational verdict
    when the remainder vanishes or the next partial quotient exceeds 1e6 (the
    double sits within ``1 / (1e6 q^2)`` of the convergent), and with an
    irrational verdict once the denominator passes 1e6.
    """
    r = Fraction(x)
    p0, q0, p1, q1 = 0, 1, 1, 0
    while True:
        a = r.numerator // r.denominator
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        if q1 > DENOMINATOR_BOUND:
            return None
        rem = r - a
        if rem == 0:
            return Fraction(p1, q1)
        r = 1 / rem
        if r > QUOTIENT_BOUND:
            return Fraction(p1, q1)


def is_rational(x: float) -> bool:
    return rational_approximation(x) is not None


def independence_verdict(shift) -> str:
    """Whether ``1, shift_1, ..., shift_d`` are rationally independent.

    A rotation of ``T^d`` by ``shift`` is ergodic exactly in that case. For
    ``d = 1`` the continued-fraction test decides; for ``d > 1`` an integer
    relation search (PSLQ, coefficients up to 1e4) does.
    """
    v = np.atleast_1d(np.asarray(shift, dtype=float))
    if v.size == 0:
        return DEPENDENT
    if v.size == 1:
        return DEPENDENT if is_rational(float(v[0])) else INDEPENDENT
    for a in v:
        if is_rational(float(a)):
            return DEPENDENT
    with mpmath.workdps(30):
        rel = mpmath.pslq([mpmath.mpf(1)] + [mpmath.mpf(float(a)) for a in v], tol=PSLQ_TOL, maxcoeff=PSLQ_MAXCOEFF, maxsteps=10_000)
    return DEPENDENT if rel is not None else INDEPENDENT


def integer_relation(values, maxcoeff: int = PSLQ_MAXCOEFF):
    """Integer vector ``r`` with ``r[0] + sum r[i] values[i-1] ~ 0``, or None."""
    with mpmath.workdps(30):
        return mpmath.pslq([mpmath.mpf(1)] + [mpmath.mpf(float(a)) for a in values], tol=PSLQ_TOL, maxcoeff=maxcoeff, maxsteps=10_000)
