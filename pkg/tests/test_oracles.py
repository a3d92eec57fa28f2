import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergolab import suite
from ergolab.averaging import multi_average_function
from ergolab.dynamics import Grid, cosine, rotation_system
from ergolab.dynamics.observables import FourierPoly
from ergolab.oracles import (
    detect_relations,
    product_counterexample_limit,
    progression_identity_gap,
    progression_shifts,
    rotation_multi_limit,
)

from .strategies import fourier_coeffs

A, B = math.sqrt(2) - 1, math.sqrt(3) - 1


def brute_limit(rational_shifts, fs):
    """Oracle: keep tuples with sum k_i a_i an exact integer (Fractions), add up the products."""
    acc = {}
    for combo in itertools.product(*(f.terms for f in fs)):
        ks = [k[0] for k, _ in combo]
        if sum(Fraction(k) * a for k, a in zip(ks, rational_shifts)).denominator == 1:
            c = np.prod([c for _, c in combo])
            acc[sum(ks)] = acc.get(sum(ks), 0) + c
    return acc


def test_detect_relations():
    assert detect_relations([A, B]) == []
    rels = detect_relations(progression_shifts(A, 3))
    assert rels == [(0, -2, 1, 0), (0, -3, 0, 1)]
    assert detect_relations([0.25, A]) == [(-1, 4, 0)]


@given(st.lists(st.integers(0, 11), min_size=1, max_size=3), st.data())
@settings(max_examples=25)
def test_rational_shifts_against_exact_enumeration(ps, data):
    q = 12
    shifts = [Fraction(p, q) for p in ps]
    fs = [FourierPoly.from_dict(data.draw(fourier_coeffs(real=False)), 1) for _ in ps]
    lim = rotation_multi_limit([float(s) for s in shifts], fs)
    expect = brute_limit(shifts, fs)
    got = {k[0]: c for k, c in lim.poly.terms}
    for k in set(got) | set(expect):
        assert abs(got.get(k, 0) - expect.get(k, 0)) < 1e-12


@given(st.lists(st.integers(1, 7), min_size=1, max_size=3), st.data())
@settings(max_examples=10)
def test_rational_limit_equals_full_period_average(ps, data):
    """For shifts p/q the average over a full period is exactly the limit."""
    q = 8
    fs = [FourierPoly.from_dict(data.draw(fourier_coeffs()), 1) for _ in ps]
    shifts = [p / q for p in ps]
    lim = rotation_multi_limit(shifts, fs)
    snap = multi_average_function(rotation_system(*shifts, sampler=Grid(32)), fs, q * 50)
    vals = lim.evaluate(Grid(32).points(1)).real
    assert np.max(np.abs(snap.values - vals)) < 1e-12


def test_progression_resonance_rule():
    """For T^j with irrational alpha the tuple resonates iff sum_j j k_j = 0."""
    fs = [suite.battery()["p1"], suite.battery()["p2"]]
    lim = rotation_multi_limit(progression_shifts(A, 2), fs)
    acc = {}
    for (k1, c1), (k2, c2) in itertools.product(fs[0].terms, fs[1].terms):
        if k1[0] + 2 * k2[0] == 0:
            acc[k1[0] + k2[0]] = acc.get(k1[0] + k2[0], 0) + c1 * c2
    got = {k[0]: c for k, c in lim.poly.terms}
    assert set(got) == {k for k, v in acc.items() if v != 0}
    for k in got:
        assert abs(got[k] - acc[k]) < 1e-15
    assert lim.conditional and "conditional" in lim.provenance


def test_declared_relations_match_detected():
    fs = list(suite.degree2_battery().values())
    det = rotation_multi_limit(progression_shifts(B, 3), fs)
    dec = rotation_multi_limit(progression_shifts(B, 3), fs, relations=[(0, -2, 1, 0), (0, -3, 0, 1)])
    assert det.poly == dec.poly and not dec.conditional


def test_single_map_limit_is_the_mean():
    f = cosine(1) + FourierPoly.from_dict({(0,): 0.3}, 1)
    lim = rotation_multi_limit([A], [f])
    assert lim.poly.terms == (((0,), 0.3 + 0j),)


def test_independent_rotations_give_product_of_means():
    fs = [cosine(1) + FourierPoly.from_dict({(0,): 0.5}, 1), cosine(2) + FourierPoly.from_dict({(0,): -0.2}, 1)]
    lim = rotation_multi_limit([A, B], fs)
    assert lim.poly.terms == (((0,), -0.1 + 0j),)


def test_real_limits_are_conjugate_symmetric():
    fs = list(suite.degree2_battery().values())
    lim = rotation_multi_limit(progression_shifts(A, 3), fs)
    c = lim.poly.coeffs
    assert lim.poly.real
    for k, v in c.items():
        assert c[(-k[0],)] == np.conj(v)


def test_identity_gap_small_run():
    b = suite.battery()
    res = progression_identity_gap(A, B, [b["p1"], b["p2"]], N=20_000, sampler=Grid(128))
    assert res.oracle_identical and res.hypotheses_ok
    assert res.gap < 1e-3 and res.gap_alpha < 1e-3 and res.gap_beta < 1e-3


def test_identity_oracle_differs_for_non_ergodic_progression():
    b = suite.battery()
    res = progression_identity_gap(0.5, A, [b["p1"], b["p2"]], N=2000, sampler=Grid(64))
    assert not res.hypotheses_ok
    assert not res.oracle_identical


def test_counterexample_limit_is_parseval():
    f = FourierPoly.from_dict({(1,): 0.6, (3,): 0.8j}, 1)
    assert product_counterexample_limit(f) == pytest.approx(1.0)
