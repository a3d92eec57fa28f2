"""Closed-form limits of multiple averages for rotations of the circle.

For ``T_i x = x + alpha_i`` and trigonometric polynomials ``f_i``,

    (1/N) sum_n prod_i f_i(x + n alpha_i)
        -> sum over (k_1..k_l) with sum_i k_i alpha_i in Z of prod_i c_i(k_i) e((sum_i k_i) x).

Which tuples resonate depends only on the integer relations among
``(1, alpha_1, ..., alpha_l)``. Those are found once (continued fractions for
rational shifts, PSLQ for the rest) or supplied by the caller, and then every
tuple is tested in exact rational arithmetic.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .averaging import Snapshot, l2_norm, multi_average_function
from .dynamics.observables import FourierPoly
from .dynamics.rationality import integer_relation, rational_approximation
from .dynamics.sampling import Grid, SamplerSpec
from .dynamics.system import check_hypotheses, rotation_system
from .errors import DimensionMismatch

CONDITIONAL = "conditional on independence verdicts"


def detect_relations(shifts: Sequence[float]) -> list[tuple[int, ...]]:
    """Integer vectors ``r`` with ``r_0 + sum_i r_i shifts_i = 0`` spanning all relations.

    Greedy: each shift is either rational, an integer combination of the
    shifts already kept as a basis (with 1), or a new basis element.
    """
    l = len(shifts)
    basis: list[int] = []
    rels = []
    for i, a in enumerate(shifts):
        q = rational_approximation(float(a))
        if q is not None:
            r = [0] * (l + 1)
            r[0], r[i + 1] = -q.numerator, q.denominator
            rels.append(tuple(r))
            continue
        found = integer_relation([shifts[j] for j in basis] + [a]) if basis else None
        if found is not None and found[-1] != 0:
            r = [0] * (l + 1)
            r[0] = int(found[0])
            for j, c in zip(basis, found[1:-1]):
                r[j + 1] = int(c)
            r[i + 1] = int(found[-1])
            if r[i + 1] < 0:
                r = [-c for c in r]
            rels.append(tuple(r))
        else:
            basis.append(i)
    return rels


class _RelationSpace:
    """Row-reduced relation vectors, columns ordered ``(k_1..k_l, const)``."""

    def __init__(self, relations: Sequence[Sequence[int]], l: int):
        rows = []
        for r in relations:
            if len(r) != l + 1:
                raise ValueError(f"relations need {l + 1} entries (constant first)")
            rows.append([Fraction(int(c)) for c in list(r[1:]) + [r[0]]])
        self.pivots: list[int] = []
        self.rows: list[list[Fraction]] = []
        for row in rows:
            row = self._reduce(row)
            lead = next((j for j in range(l) if row[j] != 0), None)
            if lead is None:
                if row[l] != 0:
                    raise ValueError("inconsistent relations (they imply 1 = 0)")
                continue
            row = [c / row[lead] for c in row]
            for other in self.rows:
                if other[lead] != 0:
                    f = other[lead]
                    for j in range(l + 1):
                        other[j] -= f * row[j]
            self.rows.append(row)
            self.pivots.append(lead)
        self.l = l

    def _reduce(self, v):
        v = list(v)
        for p, row in zip(self.pivots, self.rows):
            if v[p] != 0:
                f = v[p]
                v = [a - f * b for a, b in zip(v, row)]
        return v

    def resonant(self, ks: Sequence[int]) -> bool:
        """Whether ``sum_i k_i alpha_i`` is an integer."""
        if not any(ks):
            return True
        rem = self._reduce([Fraction(k) for k in ks] + [Fraction(0)])
        if any(rem[: self.l]):
            return False
        return rem[self.l].denominator == 1


@dataclass(frozen=True)
class LimitFunction:
    poly: FourierPoly
    provenance: str
    conditional: bool

    def to_json(self) -> dict:
        out = self.poly.to_json()
        out["provenance"] = self.provenance
        out["conditional"] = self.conditional
        return out

    def evaluate(self, coords):
        return self.poly.evaluate(coords)


def rotation_multi_limit(
    shifts: Sequence[float], fs: Sequence[FourierPoly], relations: Sequence[Sequence[int]] | None = None
) -> LimitFunction:
    """Limit of the multiple average for circle rotations by ``shifts``."""
    if len(shifts) != len(fs):
        raise ValueError("one observable per shift")
    for f in fs:
        if f.dim != 1:
            raise DimensionMismatch("rotation oracles are defined on the circle")
    l = len(fs)
    conditional = relations is None
    rels = detect_relations(shifts) if conditional else [tuple(int(c) for c in r) for r in relations]
    space = _RelationSpace(rels, l)
    acc: dict[tuple[int], complex] = {}
    n_res = 0
    for combo in itertools.product(*(f.terms for f in fs)):
        ks = [k[0] for k, _ in combo]
        if not space.resonant(ks):
            continue
        n_res += 1
        c = complex(1.0)
        for _, ci in combo:
            c *= ci
        key = (sum(ks),)
        acc[key] = acc.get(key, 0j) + c
    acc = {k: v for k, v in acc.items() if v != 0}
    real = all(f.real for f in fs)
    if real:
        # pair k with -k explicitly so the result is exactly conjugate-symmetric
        acc = {k: (v + np.conj(acc.get((-k[0],), 0j))) / 2 for k, v in acc.items()}
        acc = {k: v for k, v in acc.items() if v != 0}
    bound = float(np.prod([f.sup_bound for f in fs]))
    poly = FourierPoly.from_dict(acc, 1, real=real, sup_bound=min(bound, sum(abs(v) for v in acc.values()) or 0.0), label="limit")
    how = "detected" if conditional else "declared"
    provenance = (
        f"{n_res} resonant frequency tuples; relations ({how}) "
        + json.dumps([list(r) for r in rels])
        + (f"; {CONDITIONAL}" if conditional else "")
    )
    return LimitFunction(poly, provenance, conditional)


def progression_shifts(alpha: float, l: int) -> tuple[float, ...]:
    return tuple(j * alpha for j in range(1, l + 1))


@dataclass(frozen=True)
class IdentityGap:
    gap: float
    gap_alpha: float
    gap_beta: float
    oracle_identical: bool
    hypotheses_ok: bool
    limit: LimitFunction
    snapshots: tuple = field(default=(), repr=False, compare=False)

    def to_json(self) -> dict:
        return {
            "gap": self.gap,
            "gap_alpha": self.gap_alpha,
            "gap_beta": self.gap_beta,
            "oracle_identical": self.oracle_identical,
            "hypotheses_ok": self.hypotheses_ok,
            "limit": self.limit.to_json(),
        }


def _limit_snapshot(limit: LimitFunction, sampler: SamplerSpec, N: int, real: bool) -> Snapshot:
    vals = limit.poly.evaluate(sampler.points(1))
    return Snapshot(vals.real.copy() if real else vals, sampler, N)


def progression_identity_gap(
    alpha: float,
    beta: float,
    fs: Sequence[FourierPoly],
    l: int | None = None,
    N: int = 100_000,
    sampler: SamplerSpec | None = None,
    workers: int = 1,
) -> IdentityGap:
    """Compare the progression averages along ``(T, ..., T^l)`` for ``T = R_alpha`` and ``S = R_beta``."""
    l = len(fs) if l is None else l
    if len(fs) != l:
        raise ValueError(f"need {l} observables, got {len(fs)}")
    sampler = sampler or Grid(1024)
    sys_a = rotation_system(*progression_shifts(alpha, l), sampler=sampler)
    sys_b = rotation_system(*progression_shifts(beta, l), sampler=sampler)
    hyp_ok = check_hypotheses(sys_a).all_ergodic and check_hypotheses(sys_b).all_ergodic
    A = multi_average_function(sys_a, fs, N, sampler, workers)
    B = A if beta == alpha else multi_average_function(sys_b, fs, N, sampler, workers)
    lim_a = rotation_multi_limit(progression_shifts(alpha, l), fs)
    lim_b = rotation_multi_limit(progression_shifts(beta, l), fs)
    identical = lim_a.poly == lim_b.poly
    real = all(f.real for f in fs)
    L = _limit_snapshot(lim_a, sampler, N, real)
    Lb = L if identical else _limit_snapshot(lim_b, sampler, N, real)
    return IdentityGap(
        gap=l2_norm(A - B),
        gap_alpha=l2_norm(A - L),
        gap_beta=l2_norm(B - Lb),
        oracle_identical=identical,
        hypotheses_ok=hyp_ok,
        limit=lim_a,
        snapshots=(A, B, L),
    )


def product_counterexample_limit(f: FourierPoly) -> float:
    """``int |f|^2 = sum_k |c_k|^2``: the limit of ``f(y_n) conj(f)(y_n)`` averages."""
    return float(sum(abs(c) ** 2 for _, c in f.terms))

