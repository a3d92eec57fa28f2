from fractions import Fraction
import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from ergolab.dynamics import independence_verdict, is_rational, rational_approximation
from ergolab.dynamics.rationality import DEPENDENT, INDEPENDENT, continued_fraction, integer_relation


@given(st.integers(-1000, 1000), st.integers(1, 1000))
def test_small_rationals_detected(p, q):
    assert rational_approximation(p / q) == Fraction(p, q)


@pytest.mark.parametrize("x", [math.sqrt(2) - 1, math.sqrt(3) - 1, math.sqrt(5) - 2, math.pi - 3, math.e])
def test_irrationals(x):
    assert not is_rational(x)
    assert independence_verdict(x) == INDEPENDENT


def test_continued_fraction_of_golden_ratio():
    cf = continued_fraction((math.sqrt(5) - 1) / 2, 20)
    assert cf[0] == 0 and set(cf[1:18]) == {1}


def test_vector_verdicts():
    a, b = math.sqrt(2) - 1, math.sqrt(3) - 1
    assert independence_verdict((a, b)) == INDEPENDENT
    assert independence_verdict((a, 2 * a)) == DEPENDENT
    assert independence_verdict((a, 0.5)) == DEPENDENT
    assert independence_verdict((a, 1 - 3 * a)) == DEPENDENT


def test_integer_relation():
    a = math.sqrt(2) - 1
    r = integer_relation([a, 3 * a + 1])
    assert r is not None
    assert abs(r[0] + r[1] * a + r[2] * (3 * a + 1)) < 1e-9
    assert integer_relation([a, math.sqrt(3) - 1]) is None
