import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ergolab import suite
from ergolab.cocycles import (
    Cocycle,
    CubePoint,
    coboundary,
    coboundary_cocycle,
    delta_k,
    l_cocycle_check,
    quasi_coboundary_residual,
    search_quasi_coboundary,
    skew_product,
    trig_battery,
    vertical_rotation,
)
from ergolab.dynamics import FiberMap, Grid, Random, Rotation, Space, check_commuting, cosine, reduce, rotation_system, sine
from ergolab.errors import ArityMismatch, IncompatibleCocycle, SpaceMismatch

A, B = math.sqrt(2) - 1, math.sqrt(3) - 1


def test_coboundary_values():
    f = cosine(1, amplitude=0.3)
    d = coboundary(f, Rotation(A))
    x = Grid(32).points(1)
    expect = (0.3 * np.cos(2 * np.pi * (x + A)) - 0.3 * np.cos(2 * np.pi * x)) % 1.0
    dist = np.abs(d(x) - expect)
    assert np.max(np.minimum(dist, 1 - dist)) < 1e-12


@given(st.integers(0, 10_000))
@settings(max_examples=15)
def test_quasi_coboundaries_are_compatible_and_commute(seed):
    coc = suite.random_cocycle(seed, compatible=True)
    assert l_cocycle_check(coc).compatible
    base = rotation_system(*[T.alpha[0] for T in coc.base_maps])
    ext = skew_product(base, coc)
    assert check_commuting(ext)[0]


@given(st.integers(0, 10_000))
@settings(max_examples=15)
def test_perturbed_cocycles_are_incompatible_and_do_not_commute(seed):
    coc = suite.random_cocycle(seed, compatible=False)
    res = l_cocycle_check(coc)
    assert not res.compatible and res.max_residual > 1e-3
    base = rotation_system(*[T.alpha[0] for T in coc.base_maps])
    with pytest.raises(IncompatibleCocycle):
        skew_product(base, coc)
    assert not check_commuting(skew_product(base, coc, check=False))[0]


def test_linear_cocycle_compatibility_rule():
    """rho_i(y) = m_i y over rotations: compatible iff m_1 alpha_2 = m_2 alpha_1 mod 1."""
    base = rotation_system(A, 2 * A)
    ok = Cocycle((FiberMap.linear([[1]]), FiberMap.linear([[2]])), base.maps)
    bad = Cocycle((FiberMap.linear([[1]]), FiberMap.linear([[1]])), base.maps)
    assert l_cocycle_check(ok).compatible
    assert not l_cocycle_check(bad).compatible


def test_quasi_coboundary_residual_zero_for_its_own_data():
    g = cosine(1, amplitude=0.2) + sine(2, amplitude=0.1)
    coc = coboundary_cocycle(g, rotation_system(A, B).maps, constants=[0.1, 0.4])
    assert quasi_coboundary_residual(coc, g, [0.1, 0.4]) < 1e-12
    assert quasi_coboundary_residual(coc, g, [0.1, 0.2]) > 0.1
    with pytest.raises(ArityMismatch):
        quasi_coboundary_residual(coc, g, [0.1])


def test_battery_search_finds_battery_member():
    g = cosine(2, amplitude=0.2)
    coc = coboundary_cocycle(g, rotation_system(A, B).maps, constants=[0.3, 0.6])
    res = search_quasi_coboundary(coc, trig_battery())
    assert res.best_residual < 1e-9
    assert res.candidates == 64
    assert res.best_constants[0][0] == pytest.approx(0.3, abs=1e-9)


def test_battery_search_reports_large_residual_for_linear_cocycle():
    coc = Cocycle((FiberMap.linear([[1]]), FiberMap.linear([[2]])), rotation_system(A, 2 * A).maps)
    assert search_quasi_coboundary(coc, trig_battery()).best_residual > 0.1


def test_vertical_rotation_commutes_with_skew_product():
    coc = Cocycle((FiberMap.linear([[1]]),), (Rotation(A),))
    ext = skew_product(rotation_system(A), coc)
    V = vertical_rotation(0.3, ext.space)
    pts = Random(64, 0).points(2)
    a = V.apply_array(ext.maps[0].apply_array(pts))
    b = ext.maps[0].apply_array(V.apply_array(pts))
    d = np.abs(a - b)
    assert np.max(np.minimum(d, 1 - d)) < 1e-12
    with pytest.raises(SpaceMismatch):
        vertical_rotation((0.1, 0.2), Space.torus(2))


def test_cube_point_validation():
    x = reduce([0.2], Space.torus(1))
    with pytest.raises(ArityMismatch):
        CubePoint(2, (x, x, x))
    assert len(CubePoint.diagonal(x, 3).points) == 8
    assert CubePoint.epsilons(2) == [(0, 0), (0, 1), (1, 0), (1, 1)]


def _cube(xs):
    S = Space.torus(1)
    return CubePoint(int(math.log2(len(xs))), tuple(reduce([x], S) for x in xs))


@given(st.lists(st.floats(0, 1, exclude_max=True), min_size=4, max_size=4), st.integers(-3, 3), st.integers(-3, 3))
def test_delta_k_is_a_homomorphism(xs, a, b):
    """Delta^k(a rho + b sigma) = a Delta^k rho + b Delta^k sigma for integers a, b (values mod 1)."""
    f, g = cosine(1), sine(2)
    cube = _cube(xs)
    lhs = delta_k(FiberMap.from_observables([f.scale(a) + g.scale(b)]), 2, cube)
    rhs = (a * delta_k(FiberMap.from_observables([f]), 2, cube) + b * delta_k(FiberMap.from_observables([g]), 2, cube)) % 1.0
    d = abs(float(lhs[0]) - float(rhs[0]))
    assert min(d, 1 - d) < 1e-9


@given(st.floats(0, 1, exclude_max=True), st.floats(-1, 1), st.floats(-1, 1))
def test_delta_2_kills_affine_maps(x, s, t):
    """Delta^2 of y -> m y + c vanishes on parallelograms (x, x+s, x+t, x+s+t)."""
    rho = FiberMap.constant(0.37, 1) + FiberMap.linear([[3]])
    cube = _cube([x, x + s, x + t, x + s + t])
    v = float(delta_k(rho, 2, cube)[0])
    assert min(v, 1 - v) < 1e-9


def test_delta_k_on_diagonal_is_zero():
    x = reduce([0.3], Space.torus(1))
    assert float(delta_k(FiberMap.from_observables([cosine(1)]), 3, CubePoint.diagonal(x, 3))[0]) == 0.0
    with pytest.raises(ArityMismatch):
        delta_k(cosine(1), 2, CubePoint.diagonal(x, 3))
