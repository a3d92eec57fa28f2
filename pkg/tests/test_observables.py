import json

import numpy as np
import pytest
from hypothesis import given

from ergolab.dynamics import FourierPoly, Grid, character, constant, cosine, evaluate, heisenberg_theta, reduce, sine, Space
from ergolab.dynamics.spaces import heisenberg_mul, reduce_array
from ergolab.errors import DimensionMismatch

from .strategies import fourier_coeffs, points


def naive(coeffs, c):
    """Oracle: direct sum of exponentials."""
    c = np.asarray(c, dtype=float)
    out = np.zeros(c.shape[:-1], dtype=complex)
    for k, a in coeffs.items():
        out += a * np.exp(2j * np.pi * (c @ np.array(k, dtype=float)))
    return out


@given(fourier_coeffs(dim=2, real=False), points(2))
def test_evaluate_matches_direct_sum(coeffs, c):
    f = FourierPoly.from_dict(coeffs, 2)
    assert np.allclose(f.evaluate(c), naive(coeffs, c), atol=1e-10)


@given(fourier_coeffs(dim=1), points(1))
def test_real_polys_evaluate_real(coeffs, c):
    f = FourierPoly.from_dict(coeffs, 1)
    assert f.real
    assert np.max(np.abs(f.evaluate(c).imag)) < 1e-12


@given(fourier_coeffs(dim=1, real=False), fourier_coeffs(dim=1, real=False), points(1))
def test_algebra_is_pointwise(a, b, c):
    f, g = FourierPoly.from_dict(a, 1), FourierPoly.from_dict(b, 1)
    fv, gv = f.evaluate(c), g.evaluate(c)
    assert np.allclose((f + g).evaluate(c), fv + gv, atol=1e-10)
    assert np.allclose((f * g).evaluate(c), fv * gv, atol=1e-10)
    assert np.allclose(f.conj().evaluate(c), np.conj(fv), atol=1e-10)
    assert np.allclose(f.scale(2 - 1j).evaluate(c), (2 - 1j) * fv, atol=1e-10)


@given(fourier_coeffs(dim=2, real=False), points(2))
def test_sup_bound_dominates(coeffs, c):
    f = FourierPoly.from_dict(coeffs, 2)
    assert np.all(np.abs(f.evaluate(c)) <= f.sup_bound + 1e-12)


@given(fourier_coeffs(dim=2, real=False))
def test_json_round_trip(coeffs):
    f = FourierPoly.from_dict(coeffs, 2)
    g = FourierPoly.from_json(json.loads(json.dumps(f.to_json())))
    assert g.terms == f.terms and g.real == f.real


def test_constructors():
    x = np.array([[0.125]])
    assert cosine(1).evaluate(x)[0] == pytest.approx(np.cos(np.pi / 4))
    assert sine(1).evaluate(x)[0] == pytest.approx(np.sin(np.pi / 4))
    assert character(2).evaluate(x)[0] == pytest.approx(1j)
    assert constant(0.3).mean() == 0.3
    assert cosine(1).mean() == 0
    assert cosine((1, 2)).degree == 2


def test_real_flag_requires_symmetry():
    with pytest.raises(ValueError):
        FourierPoly.from_dict({(1,): 1.0}, 1, real=True)


def test_dimension_checks():
    with pytest.raises(DimensionMismatch):
        FourierPoly.from_dict({(1, 0): 1.0}, 1)
    with pytest.raises(DimensionMismatch):
        cosine(1).evaluate(np.zeros((3, 2)))
    with pytest.raises(DimensionMismatch):
        evaluate(cosine(1), reduce([0.1, 0.2], Space.torus(2)))


def test_heisenberg_theta_descends_to_the_nilmanifold():
    """Continuity on G/Gamma: the value does not depend on the coset representative."""
    F = heisenberg_theta()
    rng = np.random.default_rng(0)
    g = rng.uniform(0, 1, size=(50, 3))
    for gamma in ([1, 0, 0], [0, 1, 0], [0, 0, 1], [2, -1, 3]):
        moved = heisenberg_mul(g, np.array(gamma, dtype=float))
        assert np.allclose(F.evaluate(moved), F.evaluate(g), atol=1e-10)
        assert np.allclose(F.evaluate(reduce_array(moved, Space.heisenberg())), F.evaluate(g), atol=1e-9)
    vals = F.evaluate(Grid(16).points(3))
    assert np.max(np.abs(vals)) <= F.sup_bound + 1e-12
    assert abs(np.mean(vals)) < 1e-12
