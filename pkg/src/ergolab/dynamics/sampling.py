"""Deterministic point sets for integrating against the invariant measure.

* ``Grid(r)``: the points ``j / r`` on every axis (``r`` may be a tuple, one
  entry per axis). The mean is exact for trigonometric polynomials whose
  frequencies satisfy ``|k_j| < r_j``.
* ``LowDiscrepancy(count, seed)``: scrambled Halton sequence from
  ``scipy.stats.qmc`` (radical inverses in the first primes, Owen-type digit
  scrambling seeded by ``seed``).
* ``Random(count, seed)``: uniform draws from ``numpy.random.Philox(seed)``,
  a counter-based generator, consumed in row-major order.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.stats import qmc

from .spaces import Space


@dataclass(frozen=True)
class SamplerSpec:
    mode: str
    resolution: int | tuple[int, ...] | None = None
    count: int | None = None
    seed: int = 0

    def __post_init__(self):
        if self.mode == "grid":
            res = self.resolution
            if res is None:
                raise ValueError("grid sampler needs a resolution")
            if isinstance(res, (list, tuple)):
                object.__setattr__(self, "resolution", tuple(int(r) for r in res))
            else:
                object.__setattr__(self, "resolution", int(res))
        elif self.mode in ("lowdiscrepancy", "random"):
            if self.count is None or int(self.count) < 1:
                raise ValueError(f"{self.mode} sampler needs a positive count")
            object.__setattr__(self, "count", int(self.count))
        else:
            raise ValueError(f"unknown sampler mode {self.mode!r}")

    def axes(self, dim: int) -> tuple[int, ...]:
        res = self.resolution
        if isinstance(res, tuple):
            if len(res) != dim:
                raise ValueError(f"grid resolution has {len(res)} axes, space has {dim}")
            return res
        return (res,) * dim

    def size(self, dim: int) -> int:
        if self.mode == "grid":
            return int(np.prod(self.axes(dim)))
        return self.count

    def points(self, space: Space | int) -> np.ndarray:
        dim = space if isinstance(space, int) else space.dim
        return _points(self, dim)

    def extended(self, extra_axes: int, resolution: int | None = None) -> "SamplerSpec":
        """The same sampler on a space with ``extra_axes`` more coordinates."""
        if self.mode != "grid" or not isinstance(self.resolution, tuple):
            return self
        r = resolution if resolution is not None else self.resolution[-1]
        return SamplerSpec("grid", self.resolution + (r,) * extra_axes)

    def to_json(self) -> dict:
        out = {"mode": self.mode, "seed": self.seed}
        if self.mode == "grid":
            out["resolution"] = list(self.resolution) if isinstance(self.resolution, tuple) else self.resolution
        else:
            out["count"] = self.count
        return out


def Grid(resolution) -> SamplerSpec:
    return SamplerSpec("grid", resolution=resolution)


def LowDiscrepancy(count: int, seed: int = 0) -> SamplerSpec:
    return SamplerSpec("lowdiscrepancy", count=count, seed=seed)


def Random(count: int, seed: int) -> SamplerSpec:
    return SamplerSpec("random", count=count, seed=seed)


@lru_cache(maxsize=32)
def _points(spec: SamplerSpec, dim: int) -> np.ndarray:
    if spec.mode == "grid":
        axes = [np.arange(r, dtype=float) / r for r in spec.axes(dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        pts = np.stack([m.ravel() for m in mesh], axis=-1)
    elif spec.mode == "lowdiscrepancy":
        pts = qmc.Halton(d=dim, scramble=True, seed=spec.seed).random(spec.count)
    else:
        gen = np.random.Generator(np.random.Philox(spec.seed))
        pts = gen.random((spec.count, dim))
    pts = np.ascontiguousarray(pts, dtype=float)
    pts.setflags(write=False)
    return pts


def sampler_mean(values, axis=0):
    """Equal-weight quadrature mean (all samplers carry uniform weights)."""
    return np.mean(values, axis=axis)


def default_sampler(space: Space) -> SamplerSpec:
    """Grid(1024) on T1, Grid(64^2) on T2, LowDiscrepancy(1e5) elsewhere."""
    if space.kind == "torus" and space.dim == 1:
        return Grid(1024)
    if space.kind == "torus" and space.dim == 2:
        return Grid(64)
    return LowDiscrepancy(100_000)
