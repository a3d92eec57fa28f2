"""Host-Kra seminorms through the averaging recursion, and the checks built on them.

``V_1(g) = |mean(g)|`` and ``V_{j+1}(g)^(2^(j+1)) = (1/M_j) sum_{m<M_j} V_j(g * g o T^m)^(2^j)``.
Unrolled, ``V_k(f)^(2^k)`` is the mean over ``m = (m_1, ..., m_{k-1})`` of
``mean_x(prod_{eps in {0,1}^(k-1)} f(T^(eps.m) x))^2``; the space mean is a
quadrature over a sampler, never an orbit average.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numba
import numpy as np

from ._numerics import kahan_prefix
from .averaging import _OrbitValues, l2_norm, multi_average_function
from .dynamics.maps import Transformation
from .dynamics.observables import Observable
from .dynamics.rationality import DEPENDENT
from .dynamics.sampling import SamplerSpec
from .dynamics.system import (
    WEYL_FLAG,
    ErgodicityReport,
    SystemSpec,
    _symbolic,
    check_commuting,
    check_hypotheses,
    empirical_weyl,
    kronecker_project,
)
from .errors import ArityMismatch, ComplexObservableError, ScheduleError, SpaceMismatch

log = logging.getLogger(__name__)

DEFAULT_DEPTH = 5000
TRACE_CHECKPOINTS = (1000, 2000, 5000)
MAX_DEFAULT_K = 3
DEFAULT_SLACK = 0.02
POINT_CHUNK = 1024


@numba.njit(nogil=True, cache=True)
def _cube_rows(F, G, offsets, M1, out):
    """``out[m] += sum_p G[p] * prod_o F[m + o, p]`` for ``m < M1``."""
    P = F.shape[1]
    for m in range(M1):
        acc = 0.0
        for p in range(P):
            v = G[p]
            for o in offsets:
                v *= F[m + o, p]
            acc += v
        out[m] += acc


def _require_real(f: Observable):
    if not f.real:
        raise ComplexObservableError(
            "seminorms are defined here for real-valued observables; split f into its real and "
            "imaginary parts and estimate each separately"
        )


def _resolve_sampler(spec: SystemSpec | None, sampler: SamplerSpec | None, T: Transformation) -> SamplerSpec:
    if sampler is not None:
        return sampler
    if spec is not None:
        return spec.sampler
    from .dynamics.sampling import default_sampler

    return default_sampler(T.space)


def seminorm1(f: Observable, spec: SystemSpec | None = None, sampler: SamplerSpec | None = None) -> float:
    """``|mean(f)|`` on the sampler's points."""
    _require_real(f)
    if sampler is None:
        if spec is None:
            raise ValueError("seminorm1 needs a system or a sampler")
        sampler = spec.sampler
    pts = sampler.points(f.dim)
    return float(abs(np.mean(f.evaluate(pts).real)))


def resolve_schedule(k: int, schedule: Sequence[int] | None) -> tuple[int, ...]:
    if k < 1:
        raise ScheduleError("k must be >= 1")
    if schedule is None:
        if k > MAX_DEFAULT_K:
            raise ScheduleError(
                f"k={k} exceeds the default cap of {MAX_DEFAULT_K}; cost grows like the product of the depths "
                "times the sampler size, so pass an explicit schedule"
            )
        return (DEFAULT_DEPTH,) * (k - 1)
    sched = tuple(int(m) for m in schedule)
    if len(sched) != k - 1:
        raise ScheduleError(f"k={k} needs {k - 1} depths, got {len(sched)}")
    if any(m < 1 for m in sched):
        raise ScheduleError("every depth must be >= 1")
    return sched


@dataclass(frozen=True)
class SeminormEstimate:
    k: int
    map_id: str
    value: float
    depth_schedule: tuple[int, ...]
    trace: tuple[tuple[int, float], ...]
    quadrature: SamplerSpec
    clamped: float = 0.0

    def to_json(self) -> dict:
        return {
            "k": self.k,
            "map_id": self.map_id,
            "value": self.value,
            "depth_schedule": list(self.depth_schedule),
            "trace": [{"M": m, "value": v} for m, v in self.trace],
            "quadrature": self.quadrature.to_json(),
            "clamped": self.clamped,
        }


def _map_id(T: Transformation, spec: SystemSpec | None) -> str:
    if spec is not None:
        for i, S in enumerate(spec.maps):
            if S == T:
                return f"T{i + 1}"
    return T.describe()["kind"]


def _cube_sums(F: np.ndarray, sched: tuple[int, ...], workers: int) -> np.ndarray:
    """Point sums ``S[m_{k-1}, ..., m_2, m_1]`` of the cube products for one chunk."""
    M1 = sched[0]
    outer_ranges = [range(M) for M in reversed(sched[1:])]
    outer = list(itertools.product(*outer_ranges))
    S = np.zeros((len(outer), M1))

    def fill(rows):
        for r in rows:
            mo = outer[r][::-1]  # (m_2, ..., m_{k-1})
            offs = sorted(sum(e * m for e, m in zip(eps, mo)) for eps in itertools.product((0, 1), repeat=len(mo)))
            offs = np.array(offs, dtype=np.int64)
            G = np.prod(F[offs], axis=0) if len(offs) > 1 else F[offs[0]].copy()
            _cube_rows(F, G, offs, M1, S[r])

    idx = list(range(len(outer)))
    if workers > 1 and len(idx) > 1:
        step = math.ceil(len(idx) / workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, [idx[i:i + step] for i in range(0, len(idx), step)]))
    else:
        fill(idx)
    return S.reshape(tuple(reversed(sched[1:])) + (M1,))


def seminorm(
    f: Observable,
    k: int,
    T: Transformation,
    spec: SystemSpec | None = None,
    schedule: Sequence[int] | None = None,
    sampler: SamplerSpec | None = None,
    workers: int = 1,
) -> SeminormEstimate:
    """Estimate ``|||f|||_k`` with respect to ``T`` by the truncated recursion."""
    _require_real(f)
    sched = resolve_schedule(k, schedule)
    if f.dim != T.space.dim:
        raise SpaceMismatch("observable and map live on different spaces")
    sampler = _resolve_sampler(spec, sampler, T)
    map_id = _map_id(T, spec)
    if k == 1:
        v = seminorm1(f, sampler=sampler)
        return SeminormEstimate(1, map_id, v, (), ((1, v),), sampler)

    pts = sampler.points(T.space)
    P = pts.shape[0]
    n_rows = sum(m - 1 for m in sched) + 1
    S = None
    for start in range(0, P, POINT_CHUNK):
        chunk = pts[start:start + POINT_CHUNK]
        F = np.ascontiguousarray(_OrbitValues(T, f, chunk).block(0, n_rows).real)
        part = _cube_sums(F, sched, workers)
        S = part if S is None else S + part

    Q = (S / P) ** 2
    outer_M = sched[-1]
    level = Q if k == 2 else Q.reshape(outer_M, -1).mean(axis=1)
    cps = [c for c in TRACE_CHECKPOINTS if c < outer_M] + [outer_M]
    sums = kahan_prefix(level, cps)
    clamped = 0.0
    trace = []
    for cp, s in zip(cps, sums):
        power = s / cp
        if power < 0:
            clamped = max(clamped, -power)
            log.warning("clamped negative round-off %.3e before the 2^%d-th root", power, k)
            power = 0.0
        trace.append((cp, float(power ** (1.0 / 2**k))))
    return SeminormEstimate(k, map_id, trace[-1][1], sched, tuple(trace), sampler, clamped)


def _ergodicity_warnings(spec: SystemSpec | None, maps: Sequence[Transformation]) -> list[str]:
    out = []
    for T in maps:
        verdict = _symbolic(T)
        w = empirical_weyl(T)
        if verdict == DEPENDENT or w > WEYL_FLAG:
            out.append(f"{T.describe()['kind']} {T.describe()} may not be ergodic (verdict {verdict}, weyl {w:.3g})")
    if len(maps) == 2 and maps[0] != maps[1]:
        probe = SystemSpec(maps[0].space, tuple(maps), sampler=spec.sampler if spec else None)
        ok, disc = check_commuting(probe)
        if not ok:
            out.append(f"maps do not commute (discrepancy {disc:.3g})")
    return out


@dataclass(frozen=True)
class EqualityResult:
    discrepancy: float
    estimate_T: SeminormEstimate
    estimate_S: SeminormEstimate
    warnings: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "discrepancy": self.discrepancy,
            "T": self.estimate_T.to_json(),
            "S": self.estimate_S.to_json(),
            "warnings": list(self.warnings),
        }


def seminorm_equality_check(
    f: Observable,
    k: int,
    T: Transformation,
    S: Transformation,
    spec: SystemSpec | None = None,
    schedule: Sequence[int] | None = None,
    sampler: SamplerSpec | None = None,
    workers: int = 1,
) -> EqualityResult:
    """``|V_k(f; T) - V_k(f; S)|`` for commuting ergodic ``T`` and ``S``.

    Failed hypotheses are attached as warnings; the estimate is still computed.
    """
    warnings = _ergodicity_warnings(spec, [T, S])
    eT = seminorm(f, k, T, spec, schedule, sampler, workers)
    eS = eT if S == T else seminorm(f, k, S, spec, schedule, sampler, workers)
    return EqualityResult(abs(eT.value - eS.value), eT, eS, tuple(warnings))


@dataclass(frozen=True)
class BoundResult:
    applicable: bool
    reason: str
    avg_norm: float
    min_seminorm: float
    satisfied_with_slack: float
    seminorms: tuple[SeminormEstimate, ...] = ()
    hypothesis_report: ErgodicityReport | None = None

    @property
    def passed(self) -> bool:
        return self.applicable and self.satisfied_with_slack >= 0

    def to_json(self) -> dict:
        return {
            "applicable": self.applicable,
            "reason": self.reason,
            "avg_norm": self.avg_norm,
            "min_seminorm": self.min_seminorm,
            "satisfied_with_slack": self.satisfied_with_slack,
            "seminorms": [e.to_json() for e in self.seminorms],
            "hypothesis_report": self.hypothesis_report.to_json() if self.hypothesis_report else None,
        }


def bound_check(
    spec: SystemSpec,
    fs: Sequence[Observable],
    N: int,
    schedule: Sequence[int] | None = None,
    sampler: SamplerSpec | None = None,
    slack: float = DEFAULT_SLACK,
    workers: int = 1,
    report: ErgodicityReport | None = None,
) -> BoundResult:
    """Compare ``||A_N||_2`` with ``min_i |||f_i|||_l`` taken with respect to ``T_i``.

    The bound is stated for observables with sup norm at most 1 under the
    hypotheses that every map and every pairwise difference is ergodic; when
    either fails the result is marked inapplicable and nothing is computed.
    """
    if len(fs) != spec.l:
        raise ArityMismatch(f"{len(fs)} observables for {spec.l} maps")
    nan = float("nan")
    report = report or spec.hypothesis_report or check_hypotheses(spec)
    if not report.all_ergodic:
        return BoundResult(False, "hypotheses fail: " + ", ".join(report.failures()), nan, nan, nan, (), report)
    big = [i + 1 for i, f in enumerate(fs) if f.sup_bound > 1 + 1e-12]
    if big:
        return BoundResult(False, f"observables {big} have sup bound > 1; normalise them first", nan, nan, nan, (), report)
    sampler = sampler or spec.sampler
    avg = l2_norm(multi_average_function(spec, fs, N, sampler, workers))
    ests = tuple(seminorm(f, spec.l, T, spec, schedule, sampler, workers) for f, T in zip(fs, spec.maps))
    low = min(e.value for e in ests)
    return BoundResult(True, "", avg, low, low + slack - avg, ests, report)


@dataclass(frozen=True)
class CharacteristicResult:
    full_norm: float
    projected_norm: float
    gap: float

    def to_json(self) -> dict:
        return {"full_norm": self.full_norm, "projected_norm": self.projected_norm, "gap": self.gap}


def characteristic_check(
    spec: SystemSpec,
    fs: Sequence[Observable],
    N: int,
    sampler: SamplerSpec | None = None,
    workers: int = 1,
) -> CharacteristicResult:
    """``||A_N(f_1, f_2) - A_N(E f_1, E f_2)||_2`` with ``E`` the Kronecker projection."""
    if spec.l != 2 or len(fs) != 2:
        raise ArityMismatch("characteristic_check is defined for two maps and two observables")
    projected = [kronecker_project(f, spec) for f in fs]
    sampler = sampler or spec.sampler
    full = multi_average_function(spec, fs, N, sampler, workers)
    proj = multi_average_function(spec, projected, N, sampler, workers)
    return CharacteristicResult(l2_norm(full), l2_norm(proj), l2_norm(full - proj))
