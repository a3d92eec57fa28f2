from .fibermaps import FiberMap, zero_map
from .maps import (
    Composition,
    Identity,
    NilRotation,
    ProductMap,
    Rotation,
    SkewLift,
    Transformation,
    apply,
    compose,
    difference,
    iterate,
)
from .observables import (
    FourierPoly,
    FunctionObservable,
    Observable,
    character,
    constant,
    cosine,
    evaluate,
    heisenberg_theta,
    sine,
)
from .rationality import independence_verdict, is_rational, rational_approximation
from .sampling import Grid, LowDiscrepancy, Random, SamplerSpec, default_sampler
from .spaces import Point, Space, point_distance, reduce, reduce_array
from .system import (
    ErgodicityReport,
    HypothesisEntry,
    SystemSpec,
    check_commuting,
    check_hypotheses,
    empirical_weyl,
    kronecker_project,
    nil_system,
    orbit,
    rotation_system,
)
