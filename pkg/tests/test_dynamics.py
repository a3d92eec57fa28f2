import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ergolab._numerics import torus_distance
from ergolab.dynamics import (
    FiberMap,
    Grid,
    Identity,
    NilRotation,
    Point,
    ProductMap,
    Rotation,
    SkewLift,
    Space,
    apply,
    compose,
    cosine,
    difference,
    iterate,
    reduce,
    reduce_array,
)
from ergolab.dynamics.spaces import heisenberg_inv, heisenberg_mul
from ergolab.errors import DimensionMismatch, SpaceMismatch

from .strategies import points, raw_points, shift, small_n


def repeated(T, n, c):
    """Oracle: apply the map n times, one step at a time."""
    for _ in range(n):
        c = T.apply_array(c)
    return c


def close_on_torus(a, b, tol=1e-9):
    return float(np.max(torus_distance(a, b))) < tol


def heis_close(a, b, tol=1e-8):
    # z is only meaningful modulo 1 once x, y agree
    return close_on_torus(a, b, tol)


# spaces ---------------------------------------------------------------------

def test_point_validates_domain():
    with pytest.raises(ValueError):
        Point((1.0,), Space.torus(1))
    with pytest.raises(DimensionMismatch):
        Point((0.1, 0.2), Space.torus(1))


@given(raw_points(2))
def test_torus_reduction_idempotent(c):
    r = reduce_array(c, Space.torus(2))
    assert np.all((r >= 0) & (r < 1))
    assert np.array_equal(reduce_array(r, Space.torus(2)), r)


@given(raw_points(3, bound=20.0))
def test_heisenberg_reduction_idempotent(c):
    H = Space.heisenberg()
    r = reduce_array(c, H)
    assert np.all((r >= 0) & (r < 1))
    assert close_on_torus(reduce_array(r, H), r, 1e-12)


@given(raw_points(3, count=1, bound=5.0), st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4))
def test_heisenberg_reduction_is_lattice_invariant(c, a, b, k):
    """Right multiplication by a lattice element does not change the coset."""
    H = Space.heisenberg()
    g = c[0]
    moved = heisenberg_mul(g, np.array([a, b, k], dtype=float))
    assert close_on_torus(reduce_array(moved, H), reduce_array(g, H), 1e-8)


def test_heisenberg_reduction_against_lattice_search():
    """Brute force: the canonical representative is g * gamma for some small lattice gamma."""
    H = Space.heisenberg()
    rng = np.random.default_rng(3)
    for g in rng.uniform(-3, 3, size=(20, 3)):
        r = reduce_array(g, H)
        found = False
        for a in range(-4, 5):
            for b in range(-4, 5):
                cand = heisenberg_mul(g, np.array([a, b, 0.0]))
                if 0 <= cand[0] < 1 and 0 <= cand[1] < 1:
                    dz = (cand[2] - r[2]) % 1.0
                    found = abs(cand[0] - r[0]) < 1e-12 and abs(cand[1] - r[1]) < 1e-12 and min(dz, 1 - dz) < 1e-9
                    if found:
                        break
            if found:
                break
        assert found


@given(raw_points(3, count=3, bound=10.0))
def test_heisenberg_group_law(c):
    a, b, d = c[0], c[-1], c[len(c) // 2]
    assert np.allclose(heisenberg_mul(heisenberg_mul(a, b), d), heisenberg_mul(a, heisenberg_mul(b, d)), atol=1e-9)
    assert np.allclose(heisenberg_mul(a, heisenberg_inv(a)), 0.0, atol=1e-9)


def test_reduce_rejects_wrong_dimension():
    with pytest.raises(DimensionMismatch):
        reduce([0.1, 0.2], Space.torus(3))


# maps -----------------------------------------------------------------------

@given(shift, points(1), small_n)
def test_rotation_iterate_matches_repeated(a, c, n):
    T = Rotation(a)
    assert close_on_torus(T.iterate_array(n, c), repeated(T, n, c))


@given(st.tuples(shift, shift, shift), points(3, count=4), st.integers(0, 120))
def test_nilrotation_iterate_matches_repeated(a, c, n):
    T = NilRotation(a)
    assert heis_close(T.iterate_array(n, c), repeated(T, n, c), 1e-7)


@given(st.tuples(shift, shift, shift), st.integers(-5, 5), points(3, count=4))
def test_nil_power_is_iterate(a, k, c):
    T = NilRotation(a)
    if k >= 0:
        assert heis_close(T.power(k).apply_array(c), T.iterate_array(k, c), 1e-7)
    else:
        assert heis_close(T.power(k).apply_array(c), repeated(T.inverse(), -k, c), 1e-7)


@given(st.tuples(shift, shift, shift), points(3, count=4))
def test_nil_inverse(a, c):
    T = NilRotation(a)
    assert heis_close(T.inverse().apply_array(T.apply_array(c)), c, 1e-9)


@given(shift, st.integers(-3, 3), points(2, count=4), st.integers(0, 200))
def test_anzai_closed_form_matches_stepping(a, m, c, n):
    T = SkewLift(Rotation(a), FiberMap.linear([[m]]))
    assert T.has_closed_form
    assert close_on_torus(T.iterate_array(n, c), repeated(T, n, c), 1e-8)


@given(shift, shift, points(2, count=4), small_n)
def test_product_iterate(a, b, c, n):
    T = ProductMap((Rotation(a), Rotation(b)))
    assert close_on_torus(T.iterate_array(n, c), repeated(T, n, c))


@given(shift, shift, points(1, count=4))
def test_compose_and_difference(a, b, c):
    Ta, Tb = Rotation(a), Rotation(b)
    assert close_on_torus(compose(Ta, Tb).apply_array(c), Ta.apply_array(Tb.apply_array(c)))
    D = difference(Ta, Tb)
    assert close_on_torus(D.apply_array(Tb.apply_array(c)), Ta.apply_array(c))


@given(st.tuples(shift, shift, shift), st.tuples(shift, shift, shift), points(3, count=4))
def test_nil_difference(a, b, c):
    Ta, Tb = NilRotation(a), NilRotation(b)
    D = difference(Ta, Tb)
    assert heis_close(D.apply_array(Tb.apply_array(c)), Ta.apply_array(c), 1e-8)


def test_point_api_checks_space():
    x = Point((0.1,), Space.torus(1))
    assert apply(Rotation(0.25), x).coords == pytest.approx((0.35,))
    assert iterate(Rotation(0.25), 4, x).coords == pytest.approx((0.1,))
    with pytest.raises((SpaceMismatch, DimensionMismatch)):
        apply(Rotation((0.1, 0.2)), x)


def test_identity_fixes_points():
    c = Grid(8).points(2)
    assert np.array_equal(Identity(Space.torus(2)).iterate_array(17, c), c)


# measure preservation ------------------------------------------------------

@pytest.mark.parametrize(
    "T",
    [
        Rotation(np.sqrt(2) - 1),
        NilRotation((np.sqrt(2) - 1, np.sqrt(3) - 1, 0.3)),
        SkewLift(Rotation(np.sqrt(2) - 1), FiberMap.linear([[2]])),
    ],
    ids=["rotation", "nilrotation", "skew"],
)
def test_measure_preserved_on_trig_functions(T):
    """Haar integrals of smooth test functions are unchanged by pushing points through T."""
    dim = T.space.dim
    pts = Grid(64 if dim == 1 else (64, 64) if dim == 2 else (32, 32, 32)).points(dim)
    for k in [(1,) + (0,) * (dim - 1), (0,) * (dim - 1) + (1,), (2,) * dim]:
        f = cosine(k, dim)
        before = np.mean(f.evaluate(pts))
        after = np.mean(f.evaluate(T.apply_array(pts)))
        assert abs(before - after) < 1e-9
