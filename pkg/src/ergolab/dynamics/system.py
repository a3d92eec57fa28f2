"""Systems of commuting maps, their hypothesis checks, and Kronecker projections."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .._numerics import torus_distance
from ..errors import SpaceMismatch, UnsupportedSpace
from .maps import Identity, NilRotation, ProductMap, Rotation, SkewLift, Transformation, difference
from .observables import FourierPoly, FunctionObservable, Observable
from .rationality import DEPENDENT, UNKNOWN, independence_verdict
from .sampling import Random, SamplerSpec, default_sampler
from .spaces import Space

WEYL_N = 10_000
WEYL_FLAG = 0.05
FIBER_QUADRATURE = 256
_GOLDEN = 0.6180339887498949


@dataclass(frozen=True)
class HypothesisEntry:
    name: str
    symbolic_verdict: str
    empirical_weyl_sum: float
    flagged: bool

    @property
    def ergodic(self) -> bool:
        """Verdict-level pass: not symbolically dependent and not flagged."""
        return self.symbolic_verdict != DEPENDENT and not self.flagged

    def to_json(self):
        return {
            "hypothesis_name": self.name,
            "symbolic_verdict": self.symbolic_verdict,
            "empirical_weyl_sum": self.empirical_weyl_sum,
            "flagged": self.flagged,
        }


@dataclass(frozen=True)
class ErgodicityReport:
    entries: tuple[HypothesisEntry, ...]

    @property
    def maps_ergodic(self) -> bool:
        return all(e.ergodic for e in self.entries if "^-1" not in e.name)

    @property
    def all_ergodic(self) -> bool:
        return all(e.ergodic for e in self.entries)

    def failures(self) -> list[str]:
        return [e.name for e in self.entries if not e.ergodic]

    def to_json(self):
        return {"entries": [e.to_json() for e in self.entries], "all_ergodic": self.all_ergodic}


@dataclass(frozen=True)
class SystemSpec:
    space: Space
    maps: tuple[Transformation, ...]
    sampler: SamplerSpec | None = None
    hypothesis_report: ErgodicityReport | None = None
    name: str = field(default="")

    def __post_init__(self):
        object.__setattr__(self, "maps", tuple(self.maps))
        if self.sampler is None:
            object.__setattr__(self, "sampler", default_sampler(self.space))
        for i, T in enumerate(self.maps):
            if T.space != self.space:
                raise SpaceMismatch(f"map {i} acts on {T.space.tag}, system space is {self.space.tag}")

    @property
    def l(self) -> int:
        return len(self.maps)

    def describe(self) -> dict:
        return {
            "name": self.name,
            "space": self.space.tag,
            "maps": [T.describe() for T in self.maps],
            "sampler": self.sampler.to_json(),
        }


def rotation_system(*alphas, sampler: SamplerSpec | None = None, name: str = "") -> SystemSpec:
    maps = tuple(Rotation(a) for a in alphas)
    return SystemSpec(maps[0].space, maps, sampler, name=name)


def nil_system(*elements, sampler: SamplerSpec | None = None, name: str = "") -> SystemSpec:
    maps = tuple(a if isinstance(a, NilRotation) else NilRotation(a) for a in elements)
    return SystemSpec(Space.heisenberg(), maps, sampler, name=name)


def check_commuting(spec: SystemSpec, sample_count: int = 256, tol: float = 1e-12, seed: int = 0):
    """``(commute, max_discrepancy)`` of ``T_i T_j x`` vs ``T_j T_i x`` on random points."""
    if sample_count < 1:
        raise ValueError("sample_count must be >= 1")
    pts = Random(sample_count, seed).points(spec.space)
    worst = 0.0
    for Ti, Tj in itertools.combinations(spec.maps, 2):
        a = Ti.apply_array(Tj.apply_array(pts))
        b = Tj.apply_array(Ti.apply_array(pts))
        worst = max(worst, float(np.max(torus_distance(a, b))))
    return worst <= tol, worst


def weyl_start(dim: int) -> np.ndarray:
    """Fixed generic starting point for orbit diagnostics."""
    return (np.arange(1, dim + 1) * _GOLDEN) % 1.0


def orbit(T: Transformation, x, N: int) -> np.ndarray:
    """``(N, dim)`` array of ``T^n x`` for ``n < N``."""
    x = np.asarray(x, dtype=float)
    if T.has_closed_form:
        return T.iterate_array(np.arange(N)[:, None], x[None, :])
    out = np.empty((N, x.shape[-1]))
    cur = x
    for n in range(N):
        out[n] = cur
        cur = T.apply_array(cur)
    return out


def weyl_battery(dim: int) -> np.ndarray:
    """Nonzero frequencies in ``{-1, 0, 1}^dim``, one of each +-pair."""
    ks = []
    for k in itertools.product((-1, 0, 1), repeat=dim):
        nz = [v for v in k if v]
        if nz and nz[0] > 0:
            ks.append(k)
    return np.array(ks, dtype=float)


def empirical_weyl(T: Transformation, N: int = WEYL_N) -> float:
    """``max_k |1/N sum_n e(k . T^n x0)|`` over :func:`weyl_battery`."""
    pts = orbit(T, weyl_start(T.space.dim), N)
    ks = weyl_battery(T.space.dim)
    phases = (pts @ ks.T) % 1.0
    sums = np.abs(np.exp(2j * np.pi * phases).mean(axis=0))
    return float(sums.max())


def _symbolic(T: Transformation) -> str:
    shift = T.horizontal_shift()
    if shift is None:
        return UNKNOWN
    return independence_verdict(shift)


def check_hypotheses(spec: SystemSpec, N: int = WEYL_N) -> ErgodicityReport:
    entries = []
    for i, T in enumerate(spec.maps, start=1):
        w = empirical_weyl(T, N)
        entries.append(HypothesisEntry(f"T{i} ergodic", _symbolic(T), w, w > WEYL_FLAG))
    for i, j in itertools.combinations(range(len(spec.maps)), 2):
        D = difference(spec.maps[i], spec.maps[j])
        w = empirical_weyl(D, N)
        entries.append(HypothesisEntry(f"T{i + 1} T{j + 1}^-1 ergodic", _symbolic(D), w, w > WEYL_FLAG))
    return ErgodicityReport(tuple(entries))


# Kronecker factor ---------------------------------------------------------

def _vertical_axes(T: Transformation):
    """Axes averaged out by the Kronecker projection of ``T``, or None if unknown.

    Rotations are their own Kronecker factor. A Heisenberg nilrotation and an
    integer-linear skew product ``(y, v) -> (y + alpha, v + M y)`` with ``M``
    of full row rank both have the base rotation as Kronecker factor.
    """
    if isinstance(T, (Rotation, Identity)):
        return []
    if isinstance(T, NilRotation):
        return [2]
    if isinstance(T, SkewLift):
        m = T.rho.matrix
        if not isinstance(T.base, Rotation) or m is None or np.linalg.matrix_rank(np.array(m)) < T.rho.target_dim:
            return None
        d = T.base.space.dim
        return list(range(d, d + T.rho.target_dim))
    if isinstance(T, ProductMap):
        axes, off = [], 0
        for m in T.maps:
            sub = _vertical_axes(m)
            if sub is None:
                return None
            axes += [a + off for a in sub]
            off += m.space.dim
        return axes
    return None


def kronecker_project(f: Observable, spec: SystemSpec) -> Observable:
    """Conditional expectation of ``f`` onto the Kronecker factor.

    Supported when every map is (a product of) torus rotations, Heisenberg
    nilrotations and integer-linear skew products over rotations: the factor
    is then spanned by the horizontal coordinates, and projecting means
    averaging out the vertical ones.
    """
    per_map = [_vertical_axes(T) for T in spec.maps]
    if any(a is None for a in per_map) or any(a != per_map[0] for a in per_map):
        raise UnsupportedSpace(
            "the Kronecker factor (Z1) is only available in closed form for torus rotations, "
            f"Heisenberg nilrotations and linear skew products; got {spec.space.tag} with maps "
            + ", ".join(T.describe()["kind"] for T in spec.maps)
        )
    if f.dim != spec.space.dim:
        raise SpaceMismatch("observable and system have different dimensions")
    vertical = per_map[0]
    if not vertical:
        return f
    if isinstance(f, FourierPoly):
        return f.restrict_frequencies(lambda k: all(k[a] == 0 for a in vertical))
    nodes = np.arange(FIBER_QUADRATURE, dtype=float) / FIBER_QUADRATURE
    inner = f

    def projected(c):
        c = np.asarray(c, dtype=float)
        grids = np.meshgrid(*([nodes] * len(vertical)), indexing="ij")
        acc = np.zeros(c.shape[:-1], dtype=complex)
        for zs in zip(*(g.ravel() for g in grids)):
            cc = c.copy()
            for axis, z in zip(vertical, zs):
                cc[..., axis] = z
            acc += inner.evaluate(cc)
        return acc / (FIBER_QUADRATURE ** len(vertical))

    return FunctionObservable(projected, f.dim, f.real, f.sup_bound, f"E[{f.label}|Z1]")
