"""Bounded observables: finite Fourier expansions and black-box callables."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from ..errors import DimensionMismatch
from .spaces import Point

_TWO_PI = 2.0 * np.pi
_SYM_TOL = 1e-12


class Observable:
    dim: int
    real: bool
    sup_bound: float
    label: str

    @property
    def value_kind(self) -> str:
        return "real" if self.real else "complex"

    def evaluate(self, coords) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class FourierPoly(Observable):
    """``sum_k c_k e(k . x)`` with ``e(t) = exp(2 pi i t)``.

    ``terms`` is the sorted tuple of ``(frequency, coefficient)`` pairs with
    zero coefficients dropped. Use :meth:`from_dict` to build one.
    """

    dim: int
    terms: tuple[tuple[tuple[int, ...], complex], ...]
    real: bool
    sup_bound: float
    label: str = ""

    @classmethod
    def from_dict(
        cls,
        coeffs: Mapping,
        dim: int,
        real: bool | None = None,
        sup_bound: float | None = None,
        label: str = "",
    ) -> "FourierPoly":
        acc: dict[tuple[int, ...], complex] = {}
        for k, c in coeffs.items():
            key = tuple(int(v) for v in np.atleast_1d(k))
            if len(key) != dim:
                raise DimensionMismatch(f"frequency {key} has length {len(key)}, expected {dim}")
            acc[key] = acc.get(key, 0j) + complex(c)
        terms = tuple(sorted((k, c) for k, c in acc.items() if c != 0))
        symmetric = _conj_symmetric(dict(terms))
        if real is None:
            real = symmetric
        elif real and not symmetric:
            raise ValueError("a real FourierPoly needs conjugate-symmetric coefficients")
        if sup_bound is None:
            sup_bound = float(sum(abs(c) for _, c in terms))
        return cls(dim, terms, bool(real), float(sup_bound), label)

    @property
    def coeffs(self) -> dict[tuple[int, ...], complex]:
        return dict(self.terms)

    @property
    def degree(self) -> int:
        return max((max(abs(v) for v in k) for k, _ in self.terms), default=0)

    def mean(self) -> complex:
        return self.coeffs.get((0,) * self.dim, 0j)

    def evaluate(self, coords) -> np.ndarray:
        c = np.asarray(coords, dtype=float)
        if c.shape[-1] != self.dim:
            raise DimensionMismatch(f"observable has dimension {self.dim}, coordinates have {c.shape[-1]}")
        out = np.zeros(c.shape[:-1], dtype=complex)
        if not self.terms:
            return out
        tables = _power_tables(c, self.terms)
        for k, coef in self.terms:
            term = np.full(c.shape[:-1], coef, dtype=complex)
            for j, kj in enumerate(k):
                if kj:
                    term = term * tables[j][kj]
            out += term
        return out

    # algebra -----------------------------------------------------------
    def _same_dim(self, other):
        if other.dim != self.dim:
            raise DimensionMismatch("observables live on spaces of different dimension")

    def __add__(self, other: "FourierPoly") -> "FourierPoly":
        self._same_dim(other)
        acc = self.coeffs
        for k, c in other.terms:
            acc[k] = acc.get(k, 0j) + c
        return FourierPoly.from_dict(acc, self.dim, real=None)

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s: complex) -> "FourierPoly":
        real = self.real and complex(s).imag == 0
        return FourierPoly(
            self.dim,
            tuple((k, c * s) for k, c in self.terms if c * s != 0),
            real,
            self.sup_bound * abs(s),
            self.label,
        )

    def __mul__(self, other):
        if isinstance(other, FourierPoly):
            self._same_dim(other)
            acc: dict[tuple[int, ...], complex] = {}
            for k1, c1 in self.terms:
                for k2, c2 in other.terms:
                    k = tuple(a + b for a, b in zip(k1, k2))
                    acc[k] = acc.get(k, 0j) + c1 * c2
            poly = FourierPoly.from_dict(acc, self.dim, real=None)
            return FourierPoly(poly.dim, poly.terms, poly.real, min(poly.sup_bound, self.sup_bound * other.sup_bound))
        return self.scale(other)

    __rmul__ = __mul__

    def conj(self) -> "FourierPoly":
        terms = tuple(sorted((tuple(-v for v in k), c.conjugate()) for k, c in self.terms))
        return FourierPoly(self.dim, terms, self.real, self.sup_bound, self.label)

    def restrict_frequencies(self, keep: Callable[[tuple[int, ...]], bool]) -> "FourierPoly":
        kept = {k: c for k, c in self.terms if keep(k)}
        poly = FourierPoly.from_dict(kept, self.dim, real=None)
        return FourierPoly(poly.dim, poly.terms, self.real or poly.real, min(poly.sup_bound, self.sup_bound), self.label)

    def to_json(self) -> dict:
        return {
            "kind": "fourier",
            "dim": self.dim,
            "real": self.real,
            "terms": [{"k": list(k), "c": [c.real, c.imag]} for k, c in self.terms],
        }

    @classmethod
    def from_json(cls, obj: Mapping) -> "FourierPoly":
        terms = obj["terms"]
        if not terms:
            dim = int(obj["dim"])
        else:
            dim = int(obj.get("dim", len(terms[0]["k"])))
        coeffs: dict = {}
        for t in terms:
            re, im = t["c"]
            key = tuple(int(v) for v in t["k"])
            coeffs[key] = coeffs.get(key, 0j) + complex(re, im)
        return cls.from_dict(coeffs, dim, real=obj.get("real"), sup_bound=obj.get("sup_bound"), label=obj.get("label", ""))


def _conj_symmetric(coeffs: dict) -> bool:
    for k, c in coeffs.items():
        partner = coeffs.get(tuple(-v for v in k), 0j)
        if abs(partner - c.conjugate()) > _SYM_TOL * max(1.0, abs(c)):
            return False
    return True


def _power_tables(c, terms):
    """Per axis, ``e(x_j)^m`` for every exponent m used by ``terms``."""
    tables = []
    for j in range(c.shape[-1]):
        needed = {k[j] for k, _ in terms if k[j]}
        table: dict[int, np.ndarray] = {}
        if needed:
            base = np.exp(1j * _TWO_PI * c[..., j])
            top = max(abs(m) for m in needed)
            cur = base
            for m in range(1, top + 1):
                if m > 1:
                    cur = cur * base
                if m in needed:
                    table[m] = cur
                if -m in needed:
                    table[-m] = np.conj(cur)
        tables.append(table)
    return tables


@dataclass(frozen=True, eq=False)
class FunctionObservable(Observable):
    """Black-box observable; ``func`` maps coordinates (..., dim) to values (...)."""

    func: Callable[[np.ndarray], np.ndarray]
    dim: int
    real: bool
    sup_bound: float
    label: str = field(default="")

    def evaluate(self, coords) -> np.ndarray:
        c = np.asarray(coords, dtype=float)
        if c.shape[-1] != self.dim:
            raise DimensionMismatch(f"observable has dimension {self.dim}, coordinates have {c.shape[-1]}")
        return np.asarray(self.func(c), dtype=complex)

    def scale(self, s: complex) -> "FunctionObservable":
        g = self.func
        return FunctionObservable(lambda c: s * g(c), self.dim, self.real and complex(s).imag == 0, self.sup_bound * abs(s), self.label)

    def conj(self) -> "FunctionObservable":
        g = self.func
        return FunctionObservable(lambda c: np.conj(g(c)), self.dim, self.real, self.sup_bound, self.label)


def evaluate(f: Observable, x: Point) -> complex:
    if x.space.dim != f.dim:
        raise DimensionMismatch(f"observable has dimension {f.dim}, point lives in {x.space.tag}")
    return complex(f.evaluate(x.array()[None, :])[0])


# constructors -------------------------------------------------------------

def constant(value: complex, dim: int = 1) -> FourierPoly:
    return FourierPoly.from_dict({(0,) * dim: value}, dim, label=f"const({value})")


def character(k, dim: int | None = None) -> FourierPoly:
    k = tuple(int(v) for v in np.atleast_1d(k))
    dim = len(k) if dim is None else dim
    return FourierPoly.from_dict({k: 1.0}, dim, real=all(v == 0 for v in k), label=f"e({k})")


def cosine(k, dim: int | None = None, amplitude: float = 1.0) -> FourierPoly:
    k = tuple(int(v) for v in np.atleast_1d(k))
    dim = len(k) if dim is None else dim
    neg = tuple(-v for v in k)
    return FourierPoly.from_dict({k: amplitude / 2, neg: amplitude / 2}, dim, real=True, label=f"cos{k}")


def sine(k, dim: int | None = None, amplitude: float = 1.0) -> FourierPoly:
    k = tuple(int(v) for v in np.atleast_1d(k))
    dim = len(k) if dim is None else dim
    neg = tuple(-v for v in k)
    return FourierPoly.from_dict({k: amplitude / 2j, neg: -amplitude / 2j}, dim, real=True, label=f"sin{k}")


def heisenberg_theta(width: float = 0.25, terms: int = 3) -> FunctionObservable:
    """A smooth function on the Heisenberg nilmanifold with vertical frequency 1.

    ``F(x, y, z) = Re( e(z) * sum_m phi(y + m) e(m x) )`` with a Gaussian
    ``phi``; invariance under the lattice makes it continuous on ``G / Gamma``
    although ``e(z)`` alone is not.
    """
    ms = np.arange(-terms, terms + 1)
    # sup over y of sum_m phi(y + m) bounds |F|
    grid = np.linspace(0.0, 1.0, 2001)
    bound = float(np.max(np.exp(-((grid[:, None] + ms[None, :]) ** 2) / (2 * width**2)).sum(axis=1)))

    def func(c):
        x, y, z = c[..., 0], c[..., 1], c[..., 2]
        acc = np.zeros(np.shape(x), dtype=complex)
        for m in ms:
            acc = acc + np.exp(-((y + m) ** 2) / (2 * width**2)) * np.exp(1j * _TWO_PI * m * x)
        return (np.exp(1j * _TWO_PI * z) * acc).real

    return FunctionObservable(func, 3, True, bound, f"theta(w={width})")
