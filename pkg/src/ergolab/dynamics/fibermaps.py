"""Torus-valued maps ``Y -> T^d``, the raw material of cocycles."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .._numerics import frac


@dataclass(frozen=True, eq=False)
class FiberMap:
    """A map from base coordinates (..., base_dim) to ``T^target_dim``.

    ``func`` may return unreduced values; calling the map reduces them mod 1.
    ``matrix`` is set for linear maps ``y -> M y`` so that skew products can
    use their closed-form iterates.
    """

    func: Callable[[np.ndarray], np.ndarray]
    base_dim: int
    target_dim: int
    label: str = ""
    matrix: tuple | None = None

    def __call__(self, coords) -> np.ndarray:
        c = np.asarray(coords, dtype=float)
        out = np.asarray(self.func(c), dtype=float)
        return frac(out.reshape(c.shape[:-1] + (self.target_dim,)))

    @classmethod
    def constant(cls, value, base_dim: int) -> "FiberMap":
        v = frac(np.atleast_1d(np.asarray(value, dtype=float)))

        def f(c):
            return np.broadcast_to(v, c.shape[:-1] + v.shape)

        return cls(f, base_dim, v.shape[0], f"constant{tuple(v.tolist())}")

    @classmethod
    def linear(cls, matrix) -> "FiberMap":
        """``y -> M y mod 1`` for an integer matrix (target_dim x base_dim)."""
        m = np.atleast_2d(np.asarray(matrix))
        if not np.all(np.equal(np.round(m), m)):
            raise ValueError("linear fiber maps need integer matrices to be well defined on the torus")
        m = m.astype(float)

        def f(c):
            return c @ m.T

        ints = m.astype(int).tolist()
        return cls(f, m.shape[1], m.shape[0], f"linear{ints}", tuple(map(tuple, ints)))

    @classmethod
    def from_observables(cls, observables: Sequence) -> "FiberMap":
        """Real-valued observables read mod 1, one per fiber coordinate."""
        obs = list(observables)
        if not obs:
            raise ValueError("need at least one component")
        dims = {o.dim for o in obs}
        if len(dims) != 1:
            raise ValueError("components must share a base dimension")
        for o in obs:
            if not o.real:
                raise ValueError("fiber map components must be real-valued observables")

        def f(c):
            return np.stack([o.evaluate(c).real for o in obs], axis=-1)

        return cls(f, dims.pop(), len(obs), "observables[" + ", ".join(getattr(o, "label", "") or "f" for o in obs) + "]")

    def compose(self, transform) -> "FiberMap":
        """``y -> self(T y)``."""
        inner = self

        def f(c):
            return inner(transform.apply_array(c))

        return FiberMap(f, self.base_dim, self.target_dim, f"{self.label}∘T")

    def _check(self, other: "FiberMap"):
        if (self.base_dim, self.target_dim) != (other.base_dim, other.target_dim):
            raise ValueError("fiber maps have different shapes")

    def __add__(self, other: "FiberMap") -> "FiberMap":
        self._check(other)
        a, b = self, other
        return FiberMap(lambda c: a(c) + b(c), self.base_dim, self.target_dim, f"({a.label} + {b.label})")

    def __sub__(self, other: "FiberMap") -> "FiberMap":
        self._check(other)
        a, b = self, other
        return FiberMap(lambda c: a(c) - b(c), self.base_dim, self.target_dim, f"({a.label} - {b.label})")

    def __neg__(self) -> "FiberMap":
        a = self
        return FiberMap(lambda c: -a(c), self.base_dim, self.target_dim, f"-{a.label}")

    def scale(self, m: int) -> "FiberMap":
        """Integer multiple (the only scalings well defined mod 1)."""
        a = self
        m = int(m)
        return FiberMap(lambda c: m * a(c), self.base_dim, self.target_dim, f"{m}*{a.label}")


def zero_map(base_dim: int, target_dim: int = 1) -> FiberMap:
    return FiberMap.constant(np.zeros(target_dim), base_dim)
