import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from ergolab import suite
from ergolab.dynamics import (
    Grid,
    LowDiscrepancy,
    NilRotation,
    Rotation,
    SystemSpec,
    character,
    constant,
    cosine,
    heisenberg_theta,
    rotation_system,
    sine,
)
from ergolab.seminorms import (
    bound_check,
    characteristic_check,
    resolve_schedule,
    seminorm,
    seminorm1,
    seminorm_equality_check,
)
from ergolab.dynamics.observables import FourierPoly
from ergolab.errors import ArityMismatch, ComplexObservableError, ScheduleError

A, B = math.sqrt(2) - 1, math.sqrt(3) - 1


def quad_seminorm2(f):
    """Oracle for an ergodic rotation: |||f|||_2^4 = int_0^1 (int_0^1 f(x) f(x+t) dx)^2 dt."""
    fx = lambda x: float(f.evaluate(np.array([[x % 1.0]]))[0].real)
    corr = lambda t: integrate.quad(lambda x: fx(x) * fx(x + t), 0, 1, limit=200)[0]
    v4 = integrate.quad(lambda t: corr(t) ** 2, 0, 1, limit=200)[0]
    return v4 ** 0.25


def quad_seminorm3(f):
    """Oracle: |||f|||_3^8 = int int (int f(x) f(x+s) f(x+t) f(x+s+t) dx)^2 ds dt."""
    g = lambda x: f.evaluate(np.asarray(x, dtype=float)[..., None] % 1.0).real
    xs = np.linspace(0, 1, 64, endpoint=False)  # exact for the degrees used here

    def inner(s, t):
        return float(np.mean(g(xs) * g(xs + s) * g(xs + t) * g(xs + s + t)))

    v8 = integrate.dblquad(lambda t, s: inner(s, t) ** 2, 0, 1, 0, 1, epsabs=1e-10)[0]
    return v8 ** 0.125


def test_quad_oracle_for_cosine():
    assert quad_seminorm2(cosine(1)) == pytest.approx(8 ** -0.25, abs=1e-8)


@pytest.mark.parametrize("name", ["cos", "p1", "p3"])
def test_k2_against_quadrature(name):
    f = suite.battery()[name]
    est = seminorm(f, 2, Rotation(A), sampler=Grid(1024), schedule=[5000])
    assert est.value == pytest.approx(quad_seminorm2(f), abs=1e-2)
    assert est.trace[-1] == (5000, est.value)
    assert [m for m, _ in est.trace] == [1000, 2000, 5000]


def test_k3_against_quadrature():
    f = suite.battery()["cos"]
    est = seminorm(f, 3, Rotation(B), sampler=Grid(256), schedule=[500, 500])
    assert est.value == pytest.approx(quad_seminorm3(f), abs=2e-2)


def test_k1_is_absolute_mean():
    f = cosine(1) + constant(-0.25)
    assert seminorm1(f, sampler=Grid(64)) == pytest.approx(0.25)
    assert seminorm(f, 1, Rotation(A), sampler=Grid(64)).value == pytest.approx(0.25)


@given(st.floats(-3, 3).filter(lambda c: abs(c) > 1e-3))
@settings(max_examples=8)
def test_homogeneity(c):
    f = cosine(1) + sine(2, amplitude=0.5)
    base = seminorm(f, 2, Rotation(A), sampler=Grid(256), schedule=[500]).value
    scaled = seminorm(f.scale(c), 2, Rotation(A), sampler=Grid(256), schedule=[500]).value
    assert scaled == pytest.approx(abs(c) * base, rel=1e-9)


def test_seminorm_dominates_mean():
    f = cosine(1) + constant(0.4)
    v2 = seminorm(f, 2, Rotation(A), sampler=Grid(256), schedule=[2000]).value
    assert v2 >= seminorm1(f, sampler=Grid(256)) - 1e-3


def test_equality_across_commuting_rotations():
    res = seminorm_equality_check(suite.battery()["p2"], 2, Rotation(A), Rotation(B), sampler=Grid(512), schedule=[3000])
    assert res.discrepancy <= 2e-2
    assert res.warnings == ()
    same = seminorm_equality_check(cosine(1), 2, Rotation(A), Rotation(A), sampler=Grid(64), schedule=[100])
    assert same.discrepancy == 0.0


def test_equality_flags_non_ergodic_maps():
    res = seminorm_equality_check(cosine(1), 2, Rotation(A), Rotation(0.5), sampler=Grid(64), schedule=[100])
    assert any("ergodic" in w for w in res.warnings)


def test_heisenberg_equality_small():
    T = NilRotation((A, B, 0.0))
    spec = SystemSpec(T.space, (T, T.power(2)), LowDiscrepancy(512, 0))
    res = seminorm_equality_check(heisenberg_theta(), 2, T, T.power(2), spec, schedule=[800])
    assert res.discrepancy < 5e-2


def test_schedule_rules():
    assert resolve_schedule(2, None) == (5000,)
    assert resolve_schedule(3, None) == (5000, 5000)
    with pytest.raises(ScheduleError):
        resolve_schedule(4, None)
    assert resolve_schedule(4, [10, 10, 10]) == (10, 10, 10)
    with pytest.raises(ScheduleError):
        resolve_schedule(3, [10])
    with pytest.raises(ScheduleError):
        resolve_schedule(0, None)


def test_complex_input_rejected():
    with pytest.raises(ComplexObservableError):
        seminorm(character(1), 2, Rotation(A), sampler=Grid(16), schedule=[10])


def test_worker_independence():
    f = suite.battery()["p1"]
    a = seminorm(f, 3, Rotation(A), sampler=Grid(64), schedule=[50, 40], workers=1)
    b = seminorm(f, 3, Rotation(A), sampler=Grid(64), schedule=[50, 40], workers=4)
    assert a.value == b.value and a.trace == b.trace


def test_bound_check_on_rotation_pair():
    spec = rotation_system(A, B, sampler=Grid(256))
    b = suite.battery()
    res = bound_check(spec, [b["p1"], b["p2"]], 20_000, schedule=[2000])
    assert res.applicable and res.passed
    assert res.avg_norm <= res.min_seminorm + 0.02


def test_bound_check_inapplicable_cases():
    bad = rotation_system(A, A + 0.5, sampler=Grid(64))
    res = bound_check(bad, [cosine(1), cosine(1)], 100, schedule=[10])
    assert not res.applicable and "T1 T2^-1" in res.reason and not res.passed
    big = bound_check(rotation_system(A, B, sampler=Grid(64)), [cosine(1, amplitude=2.0), cosine(1)], 100, schedule=[10])
    assert not big.applicable and "sup bound" in big.reason
    with pytest.raises(ArityMismatch):
        bound_check(rotation_system(A, B), [cosine(1)], 10)


def test_characteristic_check_rotations_trivial():
    spec = rotation_system(A, B, sampler=Grid(64))
    res = characteristic_check(spec, [cosine(1), cosine(2)], 1000)
    assert res.gap == 0.0


def test_characteristic_check_heisenberg_small():
    T = NilRotation((A, B, 0.0))
    spec = SystemSpec(T.space, (T, T.power(2)), LowDiscrepancy(256, 0))
    f = character((0, 0, 1))
    g = cosine((1, 0, 0))
    res = characteristic_check(spec, [f, g], 20_000)
    assert res.projected_norm == 0.0
    assert res.gap < 0.05


def test_characteristic_check_fails_without_hypotheses():
    """e(v) and e(-v) on the skew-product fiber: the average stays 1, the projected one is 0."""
    spec = suite.anzai_counterexample()
    f = FourierPoly.from_dict({(0, 1, 0): 1.0}, 3)
    res = characteristic_check(spec, [f, f.conj()], 2000)
    assert res.full_norm == pytest.approx(1.0)
    assert res.projected_norm == 0.0
    assert res.gap > 0.9
