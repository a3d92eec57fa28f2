"""Torus-valued cocycles over commuting maps and the extensions they define.

A cocycle attaches ``rho_i : Y -> T^d`` to each base map ``T_i``; the lifted
maps ``(y, v) -> (T_i y, v + rho_i(y))`` commute exactly when
``d_i rho_j = d_j rho_i`` for all pairs, where ``d_i g = g o T_i - g``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from ._numerics import frac, torus_distance
from .dynamics.fibermaps import FiberMap
from .dynamics.maps import Identity, ProductMap, Rotation, SkewLift, Transformation
from .dynamics.observables import FourierPoly, Observable, cosine, sine
from .dynamics.sampling import Random, SamplerSpec
from .dynamics.spaces import Point, Space
from .dynamics.system import SystemSpec
from .errors import ArityMismatch, IncompatibleCocycle, SpaceMismatch

COMPAT_TOL = 1e-9


def as_fiber_map(f, base_dim: int | None = None) -> FiberMap:
    """Accept a FiberMap, a real Observable (read mod 1) or a constant."""
    if isinstance(f, FiberMap):
        return f
    if isinstance(f, Observable):
        return FiberMap.from_observables([f])
    if base_dim is None:
        raise ValueError("a constant fiber map needs base_dim")
    return FiberMap.constant(f, base_dim)


@dataclass(frozen=True, eq=False)
class Cocycle:
    components: tuple[FiberMap, ...]
    base_maps: tuple[Transformation, ...]

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(self.components))
        object.__setattr__(self, "base_maps", tuple(self.base_maps))
        if len(self.components) != len(self.base_maps):
            raise ArityMismatch(f"{len(self.components)} components for {len(self.base_maps)} maps")
        if len({T.space for T in self.base_maps}) > 1:
            raise SpaceMismatch("base maps must act on one space")
        if len({(c.base_dim, c.target_dim) for c in self.components}) > 1:
            raise ValueError("components must share base and target dimensions")
        if self.components[0].base_dim != self.base_space.dim:
            raise SpaceMismatch("components are defined on a different base space")

    @property
    def l(self) -> int:
        return len(self.components)

    @property
    def target_dim(self) -> int:
        return self.components[0].target_dim

    @property
    def base_space(self) -> Space:
        return self.base_maps[0].space

    def describe(self) -> dict:
        return {"target_dim": self.target_dim, "components": [c.label for c in self.components]}


@dataclass(frozen=True)
class CubePoint:
    """Points ``x_eps`` of one space indexed by ``eps in {0,1}^k`` (binary order)."""

    k: int
    points: tuple[Point, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if len(self.points) != 2**self.k:
            raise ArityMismatch(f"a {self.k}-cube needs {2**self.k} points, got {len(self.points)}")
        if len({p.space for p in self.points}) != 1:
            raise SpaceMismatch("cube coordinates must share a space")

    @staticmethod
    def epsilons(k: int):
        """``{0,1}^k`` in the order used by ``points``; the first coordinate varies slowest."""
        return list(itertools.product((0, 1), repeat=k))

    @classmethod
    def diagonal(cls, x: Point, k: int) -> "CubePoint":
        return cls(k, (x,) * 2**k)


def coboundary(f, T: Transformation) -> FiberMap:
    """``d f = f o T - f`` reduced mod 1."""
    g = as_fiber_map(f, T.space.dim)

    def func(c):
        return g(T.apply_array(c)) - g(c)

    return FiberMap(func, g.base_dim, g.target_dim, f"∂({g.label})")


def coboundary_cocycle(f, maps: Sequence[Transformation], constants=None) -> Cocycle:
    """The quasi-coboundary family ``rho_i = c_i + d_i f`` (``c_i = 0`` by default)."""
    maps = tuple(maps)
    g = as_fiber_map(f, maps[0].space.dim)
    comps = []
    for i, T in enumerate(maps):
        comp = coboundary(g, T)
        if constants is not None:
            comp = FiberMap.constant(constants[i], g.base_dim) + comp
        comps.append(comp)
    return Cocycle(tuple(comps), maps)


@dataclass(frozen=True)
class CompatibilityResult:
    compatible: bool
    max_residual: float

    def to_json(self) -> dict:
        return {"compatible": self.compatible, "max_residual": self.max_residual}


def _check_points(space: Space, sampler: SamplerSpec | None) -> np.ndarray:
    return (sampler or Random(1024, 0)).points(space)


def l_cocycle_check(cocycle: Cocycle, sampler: SamplerSpec | None = None, tol: float = COMPAT_TOL) -> CompatibilityResult:
    """Largest torus distance between ``d_i rho_j`` and ``d_j rho_i`` on sampled points."""
    pts = _check_points(cocycle.base_space, sampler)
    worst = 0.0
    for i, j in itertools.combinations(range(cocycle.l), 2):
        Ti, Tj = cocycle.base_maps[i], cocycle.base_maps[j]
        ri, rj = cocycle.components[i], cocycle.components[j]
        dirj = rj(Ti.apply_array(pts)) - rj(pts)
        djri = ri(Tj.apply_array(pts)) - ri(pts)
        worst = max(worst, float(np.max(torus_distance(dirj, djri))))
    return CompatibilityResult(worst <= tol, worst)


def skew_product(base: SystemSpec, cocycle: Cocycle, check: bool = True, sampler: SamplerSpec | None = None) -> SystemSpec:
    """The extension of ``base`` by ``cocycle`` on ``Y x T^d``."""
    if tuple(base.maps) != cocycle.base_maps:
        raise SpaceMismatch("the cocycle is attached to different base maps")
    if check:
        res = l_cocycle_check(cocycle, sampler)
        if not res.compatible:
            raise IncompatibleCocycle(res.max_residual, COMPAT_TOL)
    maps = tuple(SkewLift(T, rho) for T, rho in zip(base.maps, cocycle.components))
    name = f"{base.name} extended" if base.name else "skew product"
    return SystemSpec(maps[0].space, maps, None, name=name)


def vertical_rotation(v, space: Space) -> Transformation:
    """``R_v(y, u) = (y, u + v)`` on a skew-product space ``Y x T^d``."""
    v = tuple(float(a) for a in np.atleast_1d(v))
    d = len(v)
    if space.dim <= d:
        raise SpaceMismatch(f"{space.tag} has no fiber of dimension {d}")
    base_dim = space.dim - d
    base = Space.torus(base_dim) if space.kind != "product" else _base_of(space, d)
    return ProductMap((Identity(base), Rotation(v)))


def _base_of(space: Space, d: int) -> Space:
    leaves = [s for _, s in space.leaves()]
    last = leaves[-1]
    if last.kind != "torus" or last.dim != d:
        raise SpaceMismatch(f"{space.tag} does not end in a T^{d} fiber")
    rest = leaves[:-1]
    return rest[0] if len(rest) == 1 else Space.product(*rest)


def quasi_coboundary_residual(cocycle: Cocycle, f, c, sampler: SamplerSpec | None = None) -> float:
    """Largest torus distance between ``rho_i`` and ``c_i + d_i f`` on sampled points."""
    if len(c) != cocycle.l:
        raise ArityMismatch(f"{len(c)} constants for {cocycle.l} components")
    pts = _check_points(cocycle.base_space, sampler)
    g = as_fiber_map(f, cocycle.base_space.dim)
    worst = 0.0
    for rho, T, ci in zip(cocycle.components, cocycle.base_maps, c):
        target = frac(np.asarray(ci, dtype=float) + g(T.apply_array(pts)) - g(pts))
        worst = max(worst, float(np.max(torus_distance(rho(pts), target))))
    return worst


def _circular_mean(values: np.ndarray) -> float:
    z = np.mean(np.exp(2j * np.pi * values))
    return float(np.angle(z) / (2 * np.pi)) % 1.0 if abs(z) > 0 else 0.0


def trig_battery(dim: int = 1, degree: int = 8, amplitudes=(0.05, 0.2, 0.5, 1.0)) -> list[FourierPoly]:
    """Real candidate transfer functions: single cosines and sines of degree <= ``degree``."""
    out = []
    for k in range(1, degree + 1):
        freq = (k,) + (0,) * (dim - 1)
        for a in amplitudes:
            out.append(cosine(freq, dim, a))
            out.append(sine(freq, dim, a))
    return out


@dataclass(frozen=True)
class BatterySearch:
    best_residual: float
    best_label: str
    best_constants: tuple[tuple[float, ...], ...]
    candidates: int


def search_quasi_coboundary(cocycle: Cocycle, candidates: Sequence, sampler: SamplerSpec | None = None) -> BatterySearch:
    """Smallest residual over a candidate battery, with ``c_i`` fitted per candidate.

    For each candidate ``f`` the constants are the circular means of
    ``rho_i - d_i f``. This reports residuals; it decides nothing.
    """
    pts = _check_points(cocycle.base_space, sampler)
    best = (float("inf"), "", ())
    for f in candidates:
        g = as_fiber_map(f, cocycle.base_space.dim)
        cs = []
        for rho, T in zip(cocycle.components, cocycle.base_maps):
            diff = frac(rho(pts) - (g(T.apply_array(pts)) - g(pts)))
            cs.append(tuple(_circular_mean(diff[:, j]) for j in range(diff.shape[1])))
        r = quasi_coboundary_residual(cocycle, g, cs, sampler)
        if r < best[0]:
            best = (r, g.label, tuple(cs))
    return BatterySearch(best[0], best[1], best[2], len(candidates))


def delta_k(rho, k: int, x: CubePoint) -> np.ndarray:
    """``sum_eps (-1)^|eps| rho(x_eps)`` reduced mod 1."""
    if x.k != k:
        raise ArityMismatch(f"expected a {k}-cube point, got a {x.k}-cube")
    g = as_fiber_map(rho, x.points[0].space.dim)
    acc = np.zeros(g.target_dim)
    for eps, p in zip(CubePoint.epsilons(k), x.points):
        sign = -1.0 if sum(eps) % 2 else 1.0
        acc = acc + sign * g(p.array())
    return frac(acc)
