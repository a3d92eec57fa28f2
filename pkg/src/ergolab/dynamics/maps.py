"""Measure-preserving transformations on the spaces of :mod:`spaces`.

All maps act on arrays of reduced coordinates with shape ``(..., dim)``.
Rotations and nilrotations have closed-form iterates; everything else is
iterated by repeated application.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .._numerics import floor_split, frac, frac_mul, two_prod
from ..errors import SpaceMismatch
from .fibermaps import FiberMap
from .spaces import Point, Space, heisenberg_inv, heisenberg_mul, reduce_array


class Transformation:
    """Base class. Subclasses are frozen dataclasses exposing ``space``."""

    space: Space
    has_closed_form = False

    def apply_array(self, coords) -> np.ndarray:
        raise NotImplementedError

    def iterate_array(self, n, coords) -> np.ndarray:
        """``T^n`` applied to ``coords``; ``n`` broadcasts against ``coords.shape[:-1]``."""
        coords = np.asarray(coords, dtype=float)
        n = np.asarray(n)
        if np.any(n < 0):
            return self.inverse().iterate_array(-n, coords)
        shape = np.broadcast_shapes(n.shape, coords.shape[:-1])
        cur = np.array(np.broadcast_to(coords, shape + coords.shape[-1:]))
        steps = np.broadcast_to(n, shape)
        out = cur.copy()
        for step in range(1, int(steps.max(initial=0)) + 1):
            cur = self.apply_array(cur)
            hit = steps == step
            out[hit] = cur[hit]
        return out

    def inverse(self) -> "Transformation":
        raise NotImplementedError

    def translation(self):
        """Shift vector if this map is a translation of an abelian torus, else None."""
        return None

    def horizontal_shift(self):
        """Image in the abelianization (the horizontal torus rotation), or None."""
        return None

    def describe(self) -> dict:
        raise NotImplementedError


def _check_space(T: Transformation, x: Point):
    if x.space != T.space:
        raise SpaceMismatch(f"map acts on {T.space.tag}, point lives in {x.space.tag}")


def apply(T: Transformation, x: Point) -> Point:
    _check_space(T, x)
    return Point.from_array(T.apply_array(x.array()), T.space)


def iterate(T: Transformation, n: int, x: Point) -> Point:
    if n < 0:
        raise ValueError("iterate expects n >= 0")
    _check_space(T, x)
    return Point.from_array(T.iterate_array(int(n), x.array()), T.space)


@dataclass(frozen=True)
class Identity(Transformation):
    space: Space
    has_closed_form = True

    def apply_array(self, coords):
        return np.array(coords, dtype=float)

    def iterate_array(self, n, coords):
        coords = np.asarray(coords, dtype=float)
        shape = np.broadcast_shapes(np.shape(n), coords.shape[:-1])
        return np.array(np.broadcast_to(coords, shape + coords.shape[-1:]))

    def inverse(self):
        return self

    def translation(self):
        return np.zeros(self.space.dim) if self.space.is_abelian() else None

    def horizontal_shift(self):
        return np.zeros(len(self.space.horizontal_axes()))

    def describe(self):
        return {"kind": "identity", "space": self.space.tag}


@dataclass(frozen=True)
class Rotation(Transformation):
    alpha: tuple[float, ...]
    has_closed_form = True

    def __post_init__(self):
        object.__setattr__(self, "alpha", tuple(float(a) for a in np.atleast_1d(self.alpha)))

    @property
    def space(self) -> Space:
        return Space.torus(len(self.alpha))

    def apply_array(self, coords):
        return frac(np.asarray(coords, dtype=float) + np.asarray(self.alpha))

    def iterate_array(self, n, coords):
        n = np.asarray(n, dtype=float)[..., None]
        return frac(frac_mul(n, np.asarray(self.alpha)) + np.asarray(coords, dtype=float))

    def inverse(self):
        return Rotation(tuple(-a for a in self.alpha))

    def translation(self):
        return np.asarray(self.alpha)

    horizontal_shift = translation

    def describe(self):
        return {"kind": "rotation", "alpha": list(self.alpha)}


@dataclass(frozen=True)
class NilRotation(Transformation):
    """Left translation by ``a = (alpha, beta, gamma)`` on the Heisenberg nilmanifold.

    ``a`` is a group element, not a coset, and is kept unreduced.
    """

    a: tuple[float, float, float]
    has_closed_form = True

    def __post_init__(self):
        a = tuple(float(v) for v in self.a)
        if len(a) != 3:
            raise ValueError("a Heisenberg group element has three coordinates")
        object.__setattr__(self, "a", a)

    @property
    def space(self) -> Space:
        return Space.heisenberg()

    def apply_array(self, coords):
        return reduce_array(heisenberg_mul(np.asarray(self.a), coords), self.space)

    def iterate_array(self, n, coords):
        # a^n = (n al, n be, n ga + n(n-1)/2 al be); every mod-1 reduction of a
        # large product goes through frac_mul to keep ~1e-15 absolute accuracy.
        al, be, ga = self.a
        c = np.asarray(coords, dtype=float)
        n = np.asarray(n, dtype=float)
        x, y, z = c[..., 0], c[..., 1], c[..., 2]

        fx = frac(frac_mul(n, al) + x)

        p, e = two_prod(n, be)
        q = np.floor(p)
        iy, fy = floor_split(q, (p - q) + e + y)

        tri = n * (n - 1.0) / 2.0
        ab_hi, ab_lo = two_prod(al, be)
        ay_hi, ay_lo = two_prod(al, y)
        fz = (
            frac_mul(n, ga)
            + frac_mul(tri, ab_hi, ab_lo)
            + z
            + frac_mul(n, ay_hi, ay_lo)
            - frac_mul(iy, fx)
        )
        shape = np.broadcast_shapes(n.shape, c.shape[:-1])
        return np.stack([np.broadcast_to(v, shape) for v in (fx, fy, frac(fz))], axis=-1)

    def inverse(self):
        return NilRotation(tuple(heisenberg_inv(np.asarray(self.a)).tolist()))

    def power(self, k: int) -> "NilRotation":
        al, be, ga = self.a
        return NilRotation((k * al, k * be, k * ga + k * (k - 1) / 2 * al * be))

    def horizontal_shift(self):
        return np.asarray(self.a[:2])

    def describe(self):
        return {"kind": "nilrotation", "a": list(self.a)}


@dataclass(frozen=True)
class ProductMap(Transformation):
    maps: tuple[Transformation, ...]

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))

    @property
    def space(self) -> Space:
        return Space.product(*(m.space for m in self.maps))

    @property
    def has_closed_form(self):
        return all(m.has_closed_form for m in self.maps)

    def _slices(self):
        off = 0
        for m in self.maps:
            yield m, slice(off, off + m.space.dim)
            off += m.space.dim

    def apply_array(self, coords):
        c = np.asarray(coords, dtype=float)
        return np.concatenate([m.apply_array(c[..., s]) for m, s in self._slices()], axis=-1)

    def iterate_array(self, n, coords):
        if not self.has_closed_form:
            return super().iterate_array(n, coords)
        c = np.asarray(coords, dtype=float)
        return np.concatenate([m.iterate_array(n, c[..., s]) for m, s in self._slices()], axis=-1)

    def inverse(self):
        return ProductMap(tuple(m.inverse() for m in self.maps))

    def translation(self):
        parts = [m.translation() for m in self.maps]
        return None if any(p is None for p in parts) else np.concatenate(parts)

    def horizontal_shift(self):
        parts = [m.horizontal_shift() for m in self.maps]
        return None if any(p is None for p in parts) else np.concatenate(parts)

    def describe(self):
        return {"kind": "product", "maps": [m.describe() for m in self.maps]}


@dataclass(frozen=True)
class SkewLift(Transformation):
    """``(y, v) -> (S y, v + rho(y))`` on ``Y x T^d``."""

    base: Transformation
    rho: FiberMap

    def __post_init__(self):
        if self.rho.base_dim != self.base.space.dim:
            raise ValueError("cocycle component is defined on a different base")

    @property
    def space(self) -> Space:
        return Space.product(self.base.space, Space.torus(self.rho.target_dim))

    @property
    def has_closed_form(self):
        return isinstance(self.base, Rotation) and self.rho.matrix is not None

    def apply_array(self, coords):
        c = np.asarray(coords, dtype=float)
        d = self.base.space.dim
        y, v = c[..., :d], c[..., d:]
        return np.concatenate([self.base.apply_array(y), frac(v + self.rho(y))], axis=-1)

    def iterate_array(self, n, coords):
        if not self.has_closed_form:
            return super().iterate_array(n, coords)
        # linear rho over a rotation: v_n = v + n M y + C(n, 2) M alpha
        c = np.asarray(coords, dtype=float)
        d = self.base.space.dim
        y, v = c[..., :d], c[..., d:]
        m = np.asarray(self.rho.matrix, dtype=float)
        nn = np.asarray(n, dtype=float)[..., None]
        my = frac(y @ m.T)
        ma = frac(np.asarray(self.base.alpha) @ m.T)
        v_n = frac(v + frac_mul(nn, my) + frac_mul(nn * (nn - 1) / 2, ma))
        y_n = self.base.iterate_array(n, y)
        y_n, v_n = np.broadcast_arrays(y_n, v_n)
        return np.concatenate([y_n[..., :d], v_n[..., : self.rho.target_dim]], axis=-1)

    def inverse(self):
        base_inv = self.base.inverse()
        return SkewLift(base_inv, -self.rho.compose(base_inv))

    def describe(self):
        return {"kind": "skew", "base": self.base.describe(), "rho": self.rho.label}


@dataclass(frozen=True)
class Composition(Transformation):
    """``maps[0] o maps[1] o ...``: the last map is applied first."""

    maps: tuple[Transformation, ...]

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if len({m.space for m in self.maps}) != 1:
            raise SpaceMismatch("composed maps must act on one space")

    @property
    def space(self) -> Space:
        return self.maps[0].space

    def apply_array(self, coords):
        c = np.asarray(coords, dtype=float)
        for m in reversed(self.maps):
            c = m.apply_array(c)
        return c

    def inverse(self):
        return Composition(tuple(m.inverse() for m in reversed(self.maps)))

    def _sum(self, attr):
        parts = [getattr(m, attr)() for m in self.maps]
        return None if any(p is None for p in parts) else np.sum(parts, axis=0)

    def translation(self):
        return self._sum("translation")

    def horizontal_shift(self):
        return self._sum("horizontal_shift")

    def describe(self):
        return {"kind": "composition", "maps": [m.describe() for m in self.maps]}


def compose(outer: Transformation, inner: Transformation) -> Transformation:
    """``outer o inner``, simplified to a closed-form map where possible."""
    if outer.space != inner.space:
        raise SpaceMismatch("cannot compose maps on different spaces")
    if isinstance(inner, Identity):
        return outer
    if isinstance(outer, Identity):
        return inner
    if isinstance(outer, Rotation) and isinstance(inner, Rotation):
        return Rotation(tuple(a + b for a, b in zip(outer.alpha, inner.alpha)))
    if isinstance(outer, NilRotation) and isinstance(inner, NilRotation):
        return NilRotation(tuple(heisenberg_mul(np.asarray(outer.a), np.asarray(inner.a)).tolist()))
    if (
        isinstance(outer, ProductMap)
        and isinstance(inner, ProductMap)
        and [m.space for m in outer.maps] == [m.space for m in inner.maps]
    ):
        return ProductMap(tuple(compose(a, b) for a, b in zip(outer.maps, inner.maps)))
    return Composition((outer, inner))


def difference(Ti: Transformation, Tj: Transformation) -> Transformation:
    """``T_i T_j^{-1}``."""
    return compose(Ti, Tj.inverse())
