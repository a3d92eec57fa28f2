"""Multiple ergodic averages ``(1/N) sum_n prod_i f_i(T_i^n x)`` and their diagnostics.

Orbit sums are accumulated with Kahan compensation in increasing ``n``.
Sample points are processed in fixed chunks of ``CHUNK_POINTS``; each point's
sum is sequential, so results do not depend on the number of workers.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import fft as sfft

from ._numerics import frac, frac_mul, kahan_rows
from .dynamics.maps import Transformation
from .dynamics.observables import FourierPoly, Observable
from .dynamics.sampling import SamplerSpec
from .dynamics.spaces import Point
from .dynamics.system import SystemSpec
from .errors import ArityMismatch, DimensionMismatch, PointSetMismatch

CHUNK_POINTS = 256
BLOCK_ROWS = 1024
VDC_CHUNK = 16
_TWO_PI_I = 2j * np.pi


class _OrbitValues:
    """Values ``f(T^n x_p)`` for consecutive blocks of ``n`` at fixed points."""

    def __init__(self, T: Transformation, f: Observable, pts: np.ndarray):
        self.T, self.f, self.pts = T, f, pts
        shift = T.translation()
        self.separable = shift is not None and isinstance(f, FourierPoly)
        if self.separable:
            # f(x + n v) = sum_k c_k e(k.x) e(n k.v)
            ks = np.array([k for k, _ in f.terms], dtype=float).reshape(-1, f.dim)
            self.cs = np.array([c for _, c in f.terms], dtype=complex)
            self.kv = ks @ shift
            self.ph_x = np.exp(_TWO_PI_I * frac(pts @ ks.T))
        elif not T.has_closed_form:
            self.state = np.array(pts, dtype=float)
            self.next_n = 0

    def block(self, n0: int, B: int) -> np.ndarray:
        P = self.pts.shape[0]
        if self.separable:
            out = np.zeros((B, P), dtype=complex)
            if not len(self.cs):
                return out
            n = np.arange(n0, n0 + B, dtype=float)
            ph_n = np.exp(_TWO_PI_I * frac_mul(n[:, None], self.kv[None, :]))
            for j in range(len(self.cs)):
                out += (self.cs[j] * ph_n[:, j])[:, None] * self.ph_x[None, :, j]
            return out
        if self.T.has_closed_form:
            n = np.arange(n0, n0 + B)[:, None]
            coords = self.T.iterate_array(n, self.pts[None, :, :])
            return self.f.evaluate(coords)
        if n0 != self.next_n:
            raise RuntimeError("stepped orbits must be consumed in order")
        coords = np.empty((B,) + self.state.shape)
        cur = self.state
        for i in range(B):
            coords[i] = cur
            cur = self.T.apply_array(cur)
        self.state, self.next_n = cur, n0 + B
        return self.f.evaluate(coords)


def _check_inputs(spec: SystemSpec, fs: Sequence[Observable]):
    if len(fs) != len(spec.maps):
        raise ArityMismatch(f"{len(fs)} observables for {len(spec.maps)} maps")
    for f in fs:
        if f.dim != spec.space.dim:
            raise DimensionMismatch(f"observable of dimension {f.dim} on {spec.space.tag}")


def _product_block(gens, n0, B):
    prod = gens[0].block(n0, B)
    for g in gens[1:]:
        prod = prod * g.block(n0, B)
    return prod


def _chunk_averages(maps, fs, pts, checkpoints) -> np.ndarray:
    """``A_N`` at every checkpoint for the points of one chunk: (len(checkpoints), P)."""
    gens = [_OrbitValues(T, f, pts) for T, f in zip(maps, fs)]
    P = pts.shape[0]
    s = np.zeros(P, dtype=complex)
    c = np.zeros(P, dtype=complex)
    out = np.empty((len(checkpoints), P), dtype=complex)
    cp_iter = iter(enumerate(checkpoints))
    j, cp = next(cp_iter)
    n_max = checkpoints[-1]
    n0 = 0
    while n0 < n_max:
        B = min(BLOCK_ROWS, n_max - n0)
        vals = _product_block(gens, n0, B)
        start = 0
        while cp is not None and cp <= n0 + B:
            kahan_rows(vals[start:cp - n0], s, c)
            out[j] = s / cp
            start = cp - n0
            j, cp = next(cp_iter, (None, None))
        kahan_rows(vals[start:], s, c)
        n0 += B
    return out


def _averages(spec, fs, pts, checkpoints, workers=1) -> np.ndarray:
    checkpoints = [int(n) for n in checkpoints]
    if not checkpoints or checkpoints[0] < 1 or any(b <= a for a, b in zip(checkpoints, checkpoints[1:])):
        raise ValueError("N values must be strictly increasing and >= 1")
    chunks = [pts[i:i + CHUNK_POINTS] for i in range(0, pts.shape[0], CHUNK_POINTS)]

    def run(chunk):
        return _chunk_averages(spec.maps, fs, chunk, checkpoints)

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(ch) for ch in chunks]
    return np.concatenate(parts, axis=1)


def _realify(values, fs):
    return values.real.copy() if all(f.real for f in fs) else values


@dataclass(frozen=True, eq=False)
class Snapshot:
    """Values of ``A_N`` on the points of ``sampler``."""

    values: np.ndarray
    sampler: SamplerSpec
    N: int

    def __sub__(self, other: "Snapshot") -> "Snapshot":
        if other.sampler != self.sampler or other.values.shape != self.values.shape:
            raise PointSetMismatch("snapshots were taken on different point sets")
        return Snapshot(self.values - other.values, self.sampler, self.N)


def multi_average_at(spec: SystemSpec, fs: Sequence[Observable], x: Point, N: int):
    _check_inputs(spec, fs)
    if N < 1:
        raise ValueError("N must be >= 1")
    if x.space != spec.space:
        raise DimensionMismatch("point does not live in the system's space")
    v = _averages(spec, fs, x.array()[None, :], [N])[0, 0]
    return float(v.real) if all(f.real for f in fs) else complex(v)


def multi_average_function(
    spec: SystemSpec, fs: Sequence[Observable], N: int, sampler: SamplerSpec | None = None, workers: int = 1
) -> Snapshot:
    return multi_average_snapshots(spec, fs, [N], sampler, workers)[0]


def multi_average_snapshots(
    spec: SystemSpec, fs: Sequence[Observable], n_grid: Sequence[int], sampler: SamplerSpec | None = None, workers: int = 1
) -> list[Snapshot]:
    """Snapshots for every ``N`` in ``n_grid`` from a single pass over the orbits."""
    _check_inputs(spec, fs)
    sampler = sampler or spec.sampler
    pts = sampler.points(spec.space)
    vals = _realify(_averages(spec, fs, pts, n_grid, workers), fs)
    return [Snapshot(vals[i], sampler, int(N)) for i, N in enumerate(n_grid)]


def l2_norm(snapshot: Snapshot, sampler: SamplerSpec | None = None) -> float:
    if sampler is not None and sampler != snapshot.sampler:
        raise PointSetMismatch("snapshot was not taken on this sampler's points")
    return math.sqrt(float(np.mean(np.abs(snapshot.values) ** 2)))


def fit_decay_exponent(ns, gaps) -> float:
    """Least-squares slope of ``log gap`` against ``log N`` over positive gaps."""
    ns = np.asarray(ns, dtype=float)
    gaps = np.asarray(gaps, dtype=float)
    keep = gaps > 0
    if keep.sum() < 2:
        return float("nan")
    slope, _ = np.polyfit(np.log(ns[keep]), np.log(gaps[keep]), 1)
    return float(slope)


@dataclass
class AverageReport:
    n_grid: list[int]
    l2_norms: list[float]
    cauchy_gaps: list[float]
    fitted_decay_exponent: float
    means: list[complex]
    sampler: SamplerSpec
    snapshots: list[Snapshot] = field(default_factory=list, repr=False)

    def rows(self):
        for i, N in enumerate(self.n_grid):
            gap = self.cauchy_gaps[i] if i < len(self.cauchy_gaps) else None
            yield N, self.l2_norms[i], gap

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "l2_norm", "cauchy_gap"])
        for N, norm, gap in self.rows():
            w.writerow([N, repr(norm), "" if gap is None else repr(gap)])
        return buf.getvalue()

    def to_json(self, include_snapshots: bool = False) -> dict:
        exp = self.fitted_decay_exponent
        out = {
            "n_grid": self.n_grid,
            "l2_norms": self.l2_norms,
            "cauchy_gaps": self.cauchy_gaps,
            "fitted_decay_exponent": None if math.isnan(exp) else exp,
            "means": [[complex(m).real, complex(m).imag] for m in self.means],
            "sampler": self.sampler.to_json(),
        }
        if include_snapshots:
            out["snapshots"] = [
                {"N": s.N, "values": np.real(s.values).tolist(), "imag": np.imag(s.values).tolist()}
                for s in self.snapshots
            ]
        return out

    def dumps(self, include_snapshots: bool = False) -> str:
        return json.dumps(self.to_json(include_snapshots), indent=2)


def convergence_report(
    spec: SystemSpec,
    fs: Sequence[Observable],
    n_grid: Sequence[int],
    sampler: SamplerSpec | None = None,
    workers: int = 1,
    keep_snapshots: bool = False,
) -> AverageReport:
    """L2 norms of ``A_N`` along ``n_grid`` and the Cauchy gaps between neighbours."""
    snaps = multi_average_snapshots(spec, fs, n_grid, sampler, workers)
    norms = [l2_norm(s) for s in snaps]
    gaps = [l2_norm(b - a) for a, b in zip(snaps, snaps[1:])]
    return AverageReport(
        n_grid=[int(n) for n in n_grid],
        l2_norms=norms,
        cauchy_gaps=gaps,
        fitted_decay_exponent=fit_decay_exponent(list(n_grid)[:-1], gaps),
        means=[complex(np.mean(s.values)) for s in snaps],
        sampler=snaps[0].sampler,
        snapshots=snaps if keep_snapshots else [],
    )


@dataclass(frozen=True)
class PointwiseReport:
    n_grid: list[int]
    values: list[complex]
    gaps: list[float]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["N", "value_re", "value_im", "gap"])
        for i, N in enumerate(self.n_grid):
            v = complex(self.values[i])
            gap = repr(self.gaps[i]) if i < len(self.gaps) else ""
            w.writerow([N, repr(v.real), repr(v.imag), gap])
        return buf.getvalue()


def pointwise_report(spec: SystemSpec, fs: Sequence[Observable], x: Point, n_grid: Sequence[int]) -> PointwiseReport:
    """``A_N(x)`` along ``n_grid`` at one point, with gaps ``|A_{N_{j+1}} - A_{N_j}|``."""
    _check_inputs(spec, fs)
    vals = _averages(spec, fs, x.array()[None, :], n_grid)[:, 0]
    vals = _realify(vals, fs)
    gaps = [float(abs(b - a)) for a, b in zip(vals, vals[1:])]
    return PointwiseReport([int(n) for n in n_grid], [complex(v) for v in vals], gaps)


@dataclass(frozen=True)
class VdcDiagnostic:
    lhs: float
    rhs: float
    N: int
    M: int


def _vdc_chunk(maps, fs, pts, N, M):
    gens = [_OrbitValues(T, f, pts) for T, f in zip(maps, fs)]
    total = N + M
    u = np.empty((total, pts.shape[0]), dtype=complex)
    for n0 in range(0, total, BLOCK_ROWS):
        B = min(BLOCK_ROWS, total - n0)
        u[n0:n0 + B] = _product_block(gens, n0, B)
    s = np.zeros(pts.shape[0], dtype=complex)
    c = np.zeros(pts.shape[0], dtype=complex)
    kahan_rows(u[:N], s, c)
    # C_p(m) = sum_{n<N} u_{n+m}(p) conj(u_n(p)) via one circular correlation
    L = sfft.next_fast_len(total)
    Fa = sfft.fft(u, n=L, axis=0)
    Fb = sfft.fft(u[:N], n=L, axis=0)
    corr = sfft.ifft(Fa * np.conj(Fb), axis=0)[:M]
    return s / N, corr.sum(axis=1)


def vdc_diagnostic(
    spec: SystemSpec, fs: Sequence[Observable], N: int, M: int, sampler: SamplerSpec | None = None, workers: int = 1
) -> VdcDiagnostic:
    """Both sides of the van der Corput comparison for ``u_n = prod_i f_i o T_i^n``.

    ``lhs = ||(1/N) sum_{n<N} u_n||^2`` and
    ``rhs = (1/M) sum_{m<M} |(1/N) sum_{n<N} <u_{n+m}, u_n>|``.
    """
    _check_inputs(spec, fs)
    if M < 1 or M > N / 10:
        raise ValueError(f"M must satisfy 1 <= M <= N/10 (got M={M}, N={N})")
    sampler = sampler or spec.sampler
    pts = sampler.points(spec.space)
    chunks = [pts[i:i + VDC_CHUNK] for i in range(0, pts.shape[0], VDC_CHUNK)]

    def run(chunk):
        return _vdc_chunk(spec.maps, fs, chunk, N, M)

    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, chunks))
    else:
        parts = [run(ch) for ch in chunks]
    avg = np.concatenate([p[0] for p in parts])
    corr_sum = np.zeros(M, dtype=complex)
    for _, cs in parts:
        corr_sum += cs
    P = pts.shape[0]
    lhs = float(np.mean(np.abs(avg) ** 2))
    rhs = float(np.mean(np.abs(corr_sum / P / N)))
    return VdcDiagnostic(lhs, rhs, int(N), int(M))
