"""Spaces, their fundamental domains, and points.

Every space is a compact quotient whose fundamental domain is ``[0, 1)^d``:

* ``Torus(d)``: ``R^d / Z^d``.
* ``Heisenberg``: ``G / Gamma`` with ``G`` the real Heisenberg group in
  coordinates ``(x, y, z)``, product
  ``(x, y, z)(x', y', z') = (x + x', y + y', z + z' + x y')``, and ``Gamma``
  the integer points. The Haar measure is Lebesgue measure on the domain.
* ``Product``: concatenated coordinates of its factors.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .._numerics import frac, frac_mul, torus_distance
from ..errors import DimensionMismatch


@dataclass(frozen=True)
class Space:
    kind: str
    dim: int
    factors: tuple["Space", ...] = field(default=())

    def __post_init__(self):
        if self.kind not in ("torus", "heisenberg", "product"):
            raise ValueError(f"unknown space kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if self.kind == "heisenberg" and self.dim != 3:
            raise ValueError("the Heisenberg nilmanifold has dimension 3")
        if self.kind == "product" and self.dim != sum(f.dim for f in self.factors):
            raise ValueError("product dimension must equal the sum of factor dimensions")

    @classmethod
    def torus(cls, d: int = 1) -> "Space":
        return cls("torus", int(d))

    @classmethod
    def heisenberg(cls) -> "Space":
        return cls("heisenberg", 3)

    @classmethod
    def product(cls, *factors: "Space") -> "Space":
        flat: list[Space] = []
        for f in factors:
            flat.extend(f.factors if f.kind == "product" else (f,))
        return cls("product", sum(f.dim for f in flat), tuple(flat))

    @property
    def tag(self) -> str:
        if self.kind == "torus":
            return f"T{self.dim}"
        if self.kind == "heisenberg":
            return "H3"
        return "x".join(f.tag for f in self.factors)

    def leaves(self) -> list[tuple[int, "Space"]]:
        """(offset, factor) pairs for the non-product constituents."""
        if self.kind != "product":
            return [(0, self)]
        out, off = [], 0
        for f in self.factors:
            out.append((off, f))
            off += f.dim
        return out

    def vertical_axes(self) -> list[int]:
        """Coordinate indices of Heisenberg central (z) directions."""
        return [off + 2 for off, f in self.leaves() if f.kind == "heisenberg"]

    def horizontal_axes(self) -> list[int]:
        vert = set(self.vertical_axes())
        return [i for i in range(self.dim) if i not in vert]

    def is_abelian(self) -> bool:
        return all(f.kind == "torus" for _, f in self.leaves())

    def __str__(self):
        return self.tag


def heisenberg_mul(a, b):
    """Group product of raw (unreduced) Heisenberg coordinates, last axis of size 3."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    out = np.empty(np.broadcast_shapes(a.shape, b.shape))
    out[..., 0] = a[..., 0] + b[..., 0]
    out[..., 1] = a[..., 1] + b[..., 1]
    out[..., 2] = a[..., 2] + b[..., 2] + a[..., 0] * b[..., 1]
    return out


def heisenberg_inv(a):
    a = np.asarray(a, dtype=float)
    return np.stack([-a[..., 0], -a[..., 1], a[..., 0] * a[..., 1] - a[..., 2]], axis=-1)


def _reduce_heisenberg(c):
    fx = frac(c[..., 0])
    iy = np.floor(c[..., 1])
    fy = c[..., 1] - iy
    wrap = fy >= 1.0
    fy = np.where(wrap, 0.0, fy)
    iy = iy + wrap
    # z absorbs the x * n correction of right-multiplying by (0, -n, 0)
    fz = frac(frac(c[..., 2]) - frac_mul(iy, fx))
    return np.stack([fx, fy, fz], axis=-1)


def reduce_array(coords, space: Space):
    """Canonical representatives in ``[0, 1)^d`` for raw coordinates (..., d)."""
    c = np.asarray(coords, dtype=float)
    if c.shape[-1] != space.dim:
        raise DimensionMismatch(f"expected {space.dim} coordinates for {space.tag}, got {c.shape[-1]}")
    if space.kind == "torus":
        return frac(c)
    if space.kind == "heisenberg":
        return _reduce_heisenberg(c)
    parts = [reduce_array(c[..., off:off + f.dim], f) for off, f in space.leaves()]
    return np.concatenate(parts, axis=-1)


@dataclass(frozen=True)
class Point:
    coords: tuple[float, ...]
    space: Space

    def __post_init__(self):
        if len(self.coords) != self.space.dim:
            raise DimensionMismatch(
                f"{self.space.tag} has dimension {self.space.dim}, point has {len(self.coords)} coordinates"
            )
        for v in self.coords:
            if not 0.0 <= v < 1.0:
                raise ValueError(f"coordinate {v!r} outside the fundamental domain [0, 1)")

    @property
    def space_tag(self) -> str:
        return self.space.tag

    def array(self) -> np.ndarray:
        return np.array(self.coords, dtype=float)

    @classmethod
    def from_array(cls, arr, space: Space) -> "Point":
        return cls(tuple(float(v) for v in np.asarray(arr, dtype=float)), space)


def reduce(raw_coords, space: Space) -> Point:
    raw = np.atleast_1d(np.asarray(raw_coords, dtype=float))
    if raw.ndim != 1 or raw.shape[0] != space.dim:
        raise DimensionMismatch(f"expected {space.dim} raw coordinates for {space.tag}, got {raw.shape}")
    return Point.from_array(reduce_array(raw, space), space)


def point_distance(a: Point, b: Point) -> float:
    """Sup over coordinates of the circle distance."""
    if a.space != b.space:
        raise DimensionMismatch("points live in different spaces")
    return float(np.max(torus_distance(a.array(), b.array())))
