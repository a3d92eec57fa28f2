"""Canonical systems and observables shared by tests, scripts and the CLI defaults."""

from __future__ import annotations

import math

import numpy as np

from .cocycles import Cocycle, coboundary_cocycle, skew_product
from .dynamics.fibermaps import FiberMap
from .dynamics.maps import NilRotation, ProductMap, Rotation
from .dynamics.observables import FourierPoly, constant, cosine, heisenberg_theta, sine
from .dynamics.sampling import Grid, SamplerSpec
from .dynamics.spaces import Space
from .dynamics.system import SystemSpec, rotation_system

ALPHA = math.sqrt(2) - 1
BETA = math.sqrt(3) - 1
GAMMA = math.sqrt(5) - 2
CHECK_N = 100_000


def battery() -> dict[str, FourierPoly]:
    """Real trigonometric polynomials on the circle, degree <= 3, sup bound <= 1.

    Frequencies are chosen so that the progression averages have
    non-constant limits (``k_1 + 2 k_2 = 0`` has nonzero solutions).
    """
    return {
        "cos": cosine(1),
        "p1": cosine(2, amplitude=0.5) + sine(1, amplitude=0.3) + constant(0.2),
        "p2": cosine(1, amplitude=0.6) + sine(3, amplitude=0.2) + constant(-0.1),
        "p3": cosine(1, amplitude=0.4) + cosine(2, amplitude=0.3) + sine(2, amplitude=0.2),
    }


def degree2_battery() -> dict[str, FourierPoly]:
    """Degree <= 2 inputs for three-term progressions (``k_1 + 2 k_2 + 3 k_3 = 0``)."""
    return {
        "q1": cosine(1, amplitude=0.5) + sine(2, amplitude=0.3),
        "q2": cosine(1, amplitude=0.4) + constant(0.3),
        "q3": cosine(1, amplitude=0.6) + sine(1, amplitude=0.2),
    }


def l2_pairs() -> list[tuple[str, str]]:
    names = list(battery())
    return [(a, b) for a in names for b in names]


def rotation_pair(sampler: SamplerSpec | None = None) -> SystemSpec:
    """Independent rotations ``(R_alpha, R_beta)`` of the circle."""
    return rotation_system(ALPHA, BETA, sampler=sampler or Grid(1024), name="rotation pair")


def progression(alpha: float = ALPHA, l: int = 2, sampler: SamplerSpec | None = None) -> SystemSpec:
    """``(T, T^2, ..., T^l)`` for ``T = R_alpha``."""
    return rotation_system(*(j * alpha for j in range(1, l + 1)), sampler=sampler or Grid(1024), name=f"progression l={l}")


def l2_systems() -> dict[str, SystemSpec]:
    """Two-map circle systems used for bound checks; all satisfy the hypotheses."""
    return {
        "rotation pair": rotation_pair(),
        "progression alpha": progression(ALPHA),
        "progression beta": progression(BETA),
    }


def heisenberg_element(gamma: float = 0.0) -> NilRotation:
    return NilRotation((ALPHA, BETA, gamma))


def heisenberg_progression(sampler: SamplerSpec | None = None) -> SystemSpec:
    T = heisenberg_element()
    return SystemSpec(Space.heisenberg(), (T, T.power(2)), sampler, name="heisenberg progression")


def heisenberg_observable():
    return heisenberg_theta()


def product_counterexample(sampler: SamplerSpec | None = None) -> SystemSpec:
    """``T_1 = R x S_1`` and ``T_2 = R x S_2`` on the 2-torus; ``T_1 T_2^-1`` is not ergodic."""
    T1 = ProductMap((Rotation(ALPHA), Rotation(BETA)))
    T2 = ProductMap((Rotation(ALPHA), Rotation(GAMMA)))
    return SystemSpec(T1.space, (T1, T2), sampler or Grid(64), name="product counterexample")


def shared_factor_observables(f: FourierPoly) -> tuple[FourierPoly, FourierPoly]:
    """``f(y)`` and ``conj(f)(y)`` lifted to ``Y x Z`` through the first coordinate."""
    def lift(g: FourierPoly) -> FourierPoly:
        return FourierPoly.from_dict({(k[0], 0): c for k, c in g.terms}, 2, real=g.real, sup_bound=g.sup_bound)

    return lift(f), lift(f.conj())


def anzai_counterexample(sampler: SamplerSpec | None = None) -> SystemSpec:
    """The product example with a non-Kronecker shared factor.

    ``Y`` is the skew product ``(y, v) -> (y + alpha, v + y)``, whose Kronecker
    factor is the ``y`` circle; ``T_i = R x S_i`` with circle rotations ``S_i``.
    """
    anzai = skew_product(rotation_system(ALPHA), Cocycle((FiberMap.linear([[1]]),), (Rotation(ALPHA),)))
    R = anzai.maps[0]
    T1 = ProductMap((R, Rotation(BETA)))
    T2 = ProductMap((R, Rotation(GAMMA)))
    return SystemSpec(T1.space, (T1, T2), sampler or Grid((32, 32, 4)), name="skew product counterexample")


def _random_trig(rng: np.random.Generator, degree: int = 3) -> FourierPoly:
    out = constant(0.0)
    for k in range(1, degree + 1):
        out = out + cosine(k, amplitude=float(rng.uniform(-0.5, 0.5))) + sine(k, amplitude=float(rng.uniform(-0.5, 0.5)))
    return out


def _random_base(rng: np.random.Generator, l: int) -> tuple[Rotation, ...]:
    return tuple(Rotation(float(rng.uniform(0.05, 0.95))) for _ in range(l))


def random_cocycle(seed: int, compatible: bool, l: int = 2) -> Cocycle:
    """A seeded cocycle over random circle rotations.

    Compatible ones are quasi-coboundaries ``c_i + d_i g`` with a random
    trigonometric ``g``. Incompatible ones perturb the first component by a
    term ``h`` that is not ``T_j``-invariant (a nonzero-frequency trigonometric
    polynomial, or an integer-linear ``m y``), which breaks ``d_j rho_1 = d_1 rho_j``.
    """
    rng = np.random.default_rng(seed)
    while True:
        maps = _random_base(rng, l)
        base = coboundary_cocycle(_random_trig(rng), maps, constants=[float(c) for c in rng.uniform(0, 1, l)])
        if compatible:
            return base
        if rng.integers(2):
            k = 1
            bad = FiberMap.linear([[int(rng.choice([-1, 1]))]])
        else:
            k = int(rng.integers(1, 4))
            bad = FiberMap.from_observables([cosine(k, amplitude=float(rng.uniform(0.2, 0.8)))])
        # d_j h vanishes when k alpha_j is an integer; keep clear of that
        if all(abs(k * T.alpha[0] - round(k * T.alpha[0])) > 0.05 for T in maps[1:]):
            return Cocycle((base.components[0] + bad,) + base.components[1:], maps)
