"""The experiment catalog behind ``ergolab run``.

Each scenario validates its config completely (``prepare``) before it
computes anything (``execute``), so a bad config never leaves partial output.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Any, Callable

import numpy as np

from . import suite
from .averaging import convergence_report, l2_norm, multi_average_snapshots, pointwise_report
from .cocycles import Cocycle, l_cocycle_check, search_quasi_coboundary, skew_product, trig_battery
from .config import (
    SCHEMA_VERSION,
    ConfigError,
    build_fibermap,
    build_maps,
    build_observable,
    build_observables,
    build_sampler,
    expect_dict,
    increasing_ints,
    integer,
    number,
    numbers,
    positive,
    require,
)
from .dynamics.observables import FourierPoly
from .dynamics.spaces import reduce
from .dynamics.system import ErgodicityReport, SystemSpec, check_commuting, check_hypotheses, weyl_start
from .errors import ErgolabError
from .oracles import product_counterexample_limit, progression_identity_gap
from .seminorms import bound_check, characteristic_check, resolve_schedule, seminorm, seminorm_equality_check

THEOREM_HYPOTHESES = "every T_i ergodic and every T_i T_j^-1 ergodic (i != j)"


@dataclass(frozen=True)
class Check:
    name: str
    measured: Any
    threshold: Any
    relation: str
    passed: bool

    def to_json(self) -> dict:
        m = self.measured
        if isinstance(m, float) and math.isnan(m):
            m = None
        return {"name": self.name, "measured": m, "threshold": self.threshold, "relation": self.relation, "pass": self.passed}


def at_most(name, measured, threshold) -> Check:
    return Check(name, float(measured), threshold, "<=", bool(measured <= threshold))


def at_least(name, measured, threshold) -> Check:
    return Check(name, float(measured), threshold, ">=", bool(measured >= threshold))


def equals(name, measured, expected) -> Check:
    return Check(name, measured, expected, "==", bool(measured == expected))


@dataclass
class Outcome:
    checks: list[Check]
    csv: dict[str, str]
    details: dict = field(default_factory=dict)
    hypothesis_report: ErgodicityReport | None = None
    hypothesis_failed: bool = False


@dataclass(frozen=True)
class Scenario:
    name: str
    claim: str
    hypotheses: str
    required: tuple[str, ...]
    optional: tuple[str, ...]
    defaults: Callable[[], dict]
    prepare: Callable[[dict], dict]
    execute: Callable[[dict, int], Outcome]
    csv_columns: dict[str, list[str]] = field(default_factory=dict)

    def catalog_entry(self) -> dict:
        return {
            "name": self.name,
            "claim": self.claim,
            "hypotheses": self.hypotheses,
            "required_keys": list(self.required),
            "optional_keys": list(self.optional),
            "csv": self.csv_columns,
        }


# helpers ---------------------------------------------------------------------

def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([repr(v) if isinstance(v, float) else v for v in r])
    return buf.getvalue()


def _poly_json(f: FourierPoly) -> dict:
    return f.to_json()


def _system(data: dict, key: str = "system") -> SystemSpec:
    sysobj = expect_dict(require(data, key, "$"), f"$.{key}")
    maps = build_maps(require(sysobj, "maps", f"$.{key}"), f"$.{key}.maps")
    seed = data.get("seed")
    sampler = None
    if "sampler" in sysobj:
        sampler = build_sampler(sysobj["sampler"], f"$.{key}.sampler", seed)
    elif "sampler" in data:
        sampler = build_sampler(data["sampler"], "$.sampler", seed)
    try:
        spec = SystemSpec(maps[0].space, maps, sampler, name=sysobj.get("name", ""))
    except ErgolabError as e:
        raise ConfigError(str(e), f"$.{key}") from None
    if spec.sampler.mode == "grid":
        try:
            spec.sampler.axes(spec.space.dim)
        except ValueError as e:
            raise ConfigError(str(e), "$.sampler") from None
    ok, disc = check_commuting(spec, seed=int(seed or 0))
    if not ok:
        raise ConfigError(f"maps do not commute (max discrepancy {disc:.3e})", f"$.{key}.maps")
    return spec


def _tol(data: dict, key: str) -> float:
    return positive(require(data.get("tolerances", {}), key, "$.tolerances"), f"$.tolerances.{key}")


def _rotation(alpha) -> dict:
    return {"kind": "rotation", "alpha": [alpha]}


ALPHA_EXPR = "sqrt(2)-1"
BETA_EXPR = "sqrt(3)-1"
GAMMA_EXPR = "sqrt(5)-2"


# convergence -----------------------------------------------------------------

def _convergence_defaults():
    b = suite.battery()
    return {
        "system": {"maps": [_rotation(ALPHA_EXPR), _rotation(BETA_EXPR)]},
        "observables": [_poly_json(b["p1"]), _poly_json(b["p2"])],
        "n_grid": [1000 * 2**j for j in range(8)],
        "sampler": {"mode": "grid", "resolution": 1024},
        "require_hypotheses": True,
        "tolerances": {"max_final_gap": 1e-3, "max_decay_exponent": -0.8},
    }


def _convergence_prepare(data):
    spec = _system(data)
    fs = build_observables(require(data, "observables", "$"), "$.observables", spec.space.dim)
    if len(fs) != spec.l:
        raise ConfigError(f"{len(fs)} observables for {spec.l} maps", "$.observables")
    return {
        "spec": spec,
        "fs": fs,
        "n_grid": increasing_ints(require(data, "n_grid", "$"), "$.n_grid"),
        "gap_tol": _tol(data, "max_final_gap"),
        "exp_tol": number(require(data["tolerances"], "max_decay_exponent", "$.tolerances"), "$.tolerances.max_decay_exponent"),
        "require_hypotheses": bool(data.get("require_hypotheses", True)),
    }


def _hypotheses(p) -> tuple[ErgodicityReport, bool]:
    report = check_hypotheses(p["spec"])
    return report, p.get("require_hypotheses", True) and not report.all_ergodic


def _convergence_execute(p, workers):
    report, failed = _hypotheses(p)
    if failed:
        return Outcome([], {}, hypothesis_report=report, hypothesis_failed=True)
    rep = convergence_report(p["spec"], p["fs"], p["n_grid"], workers=workers)
    gaps = rep.cauchy_gaps
    checks = []
    if gaps:
        checks.append(at_most("final cauchy gap", gaps[-1], p["gap_tol"]))
        if all(g == 0 for g in gaps):
            checks.append(Check("decay exponent", float("nan"), p["exp_tol"], "gaps identically zero", True))
        else:
            e = rep.fitted_decay_exponent
            checks.append(Check("decay exponent", e, p["exp_tol"], "<=", bool(e <= p["exp_tol"])))
    return Outcome(checks, {"convergence.csv": rep.to_csv()}, rep.to_json(), report)


# theorem2-identity ---------------------------------------------------------

def _identity_defaults():
    b = suite.battery()
    return {
        "alpha": ALPHA_EXPR,
        "beta": BETA_EXPR,
        "l": 2,
        "observables": [_poly_json(b["p1"]), _poly_json(b["p2"])],
        "N": 100_000,
        "sampler": {"mode": "grid", "resolution": 1024},
        "tolerances": {"max_gap": 1e-2, "max_oracle_gap": 5e-3},
    }


def _identity_prepare(data):
    l = integer(require(data, "l", "$"), "$.l", 1)
    fs = build_observables(require(data, "observables", "$"), "$.observables", 1)
    if len(fs) != l:
        raise ConfigError(f"need {l} observables for l={l}", "$.observables")
    for i, f in enumerate(fs):
        if not isinstance(f, FourierPoly):
            raise ConfigError("oracle comparisons need Fourier observables", f"$.observables[{i}]")
    sampler = build_sampler(require(data, "sampler", "$"), "$.sampler", data.get("seed"))
    if sampler.mode == "grid":
        try:
            sampler.axes(1)
        except ValueError as e:
            raise ConfigError(str(e), "$.sampler") from None
    return {
        "alpha": number(require(data, "alpha", "$"), "$.alpha"),
        "beta": number(require(data, "beta", "$"), "$.beta"),
        "l": l,
        "fs": fs,
        "N": integer(require(data, "N", "$"), "$.N", 1),
        "sampler": sampler,
        "gap_tol": _tol(data, "max_gap"),
        "oracle_tol": _tol(data, "max_oracle_gap"),
    }


def _identity_execute(p, workers):
    from .dynamics.system import rotation_system
    from .oracles import progression_shifts

    entries = []
    for a in (p["alpha"], p["beta"]):
        entries += check_hypotheses(rotation_system(*progression_shifts(a, p["l"]))).entries
    report = ErgodicityReport(tuple(entries))
    if not report.all_ergodic:
        return Outcome([], {}, hypothesis_report=report, hypothesis_failed=True)
    res = progression_identity_gap(p["alpha"], p["beta"], p["fs"], p["l"], p["N"], p["sampler"], workers)
    A, B, L = res.snapshots
    xs = p["sampler"].points(1)[:, 0]
    rows = [(float(x), float(np.real(a)), float(np.real(b)), float(np.real(c))) for x, a, b, c in zip(xs, A.values, B.values, L.values)]
    checks = [
        at_most("gap between T and S averages", res.gap, p["gap_tol"]),
        at_most("gap to oracle (alpha)", res.gap_alpha, p["oracle_tol"]),
        at_most("gap to oracle (beta)", res.gap_beta, p["oracle_tol"]),
        equals("oracle limits bit-identical across shifts", res.oracle_identical, True),
    ]
    return Outcome(checks, {"identity.csv": _csv(["x", "A_alpha", "A_beta", "limit"], rows)}, res.to_json(), report)


# seminorm ------------------------------------------------------------------

def _seminorm_defaults():
    return {
        "system": {"maps": [_rotation(ALPHA_EXPR), _rotation(BETA_EXPR)]},
        "observable": _poly_json(suite.battery()["cos"]),
        "k": 2,
        "map_index": 0,
        "compare_map_index": 1,
        "schedule": [5000],
        "sampler": {"mode": "grid", "resolution": 1024},
        "expected": "8**-0.25",
        "tolerances": {"max_error": 1e-2, "max_discrepancy": 2e-2},
    }


def _seminorm_prepare(data):
    spec = _system(data)
    f = build_observable(require(data, "observable", "$"), "$.observable")
    if f.dim != spec.space.dim:
        raise ConfigError("observable dimension does not match the space", "$.observable")
    if not f.real:
        raise ConfigError("seminorms need a real observable; split real and imaginary parts", "$.observable")
    k = integer(require(data, "k", "$"), "$.k", 1)
    try:
        sched = resolve_schedule(k, data.get("schedule"))
    except ErgolabError as e:
        raise ConfigError(str(e), "$.schedule") from None

    def index(key):
        i = integer(data[key], f"$.{key}", 0)
        if i >= spec.l:
            raise ConfigError(f"system has {spec.l} maps", f"$.{key}")
        return i

    p = {"spec": spec, "f": f, "k": k, "schedule": sched, "i": index("map_index") if "map_index" in data else 0}
    if data.get("compare_map_index") is not None:
        p["j"] = index("compare_map_index")
        p["disc_tol"] = _tol(data, "max_discrepancy")
    if data.get("expected") is not None:
        p["expected"] = number(data["expected"], "$.expected")
        p["err_tol"] = _tol(data, "max_error")
    return p


def _seminorm_execute(p, workers):
    spec = p["spec"]
    T = spec.maps[p["i"]]
    checks, details, rows = [], {}, []
    if "j" in p:
        res = seminorm_equality_check(p["f"], p["k"], T, spec.maps[p["j"]], spec, p["schedule"], workers=workers)
        ests = [res.estimate_T, res.estimate_S]
        checks.append(at_most("seminorm discrepancy between maps", res.discrepancy, p["disc_tol"]))
        details["equality"] = res.to_json()
    else:
        ests = [seminorm(p["f"], p["k"], T, spec, p["schedule"], workers=workers)]
        details["estimate"] = ests[0].to_json()
    if "expected" in p:
        checks.append(at_most("error against expected value", abs(ests[0].value - p["expected"]), p["err_tol"]))
    for e in ests:
        rows += [(e.map_id, m, v) for m, v in e.trace]
    return Outcome(checks, {"seminorm_trace.csv": _csv(["map", "M", "value"], rows)}, details)


# bounds --------------------------------------------------------------------

def _bounds_defaults():
    b = suite.battery()
    return {
        "system": {"maps": [_rotation(ALPHA_EXPR), _rotation(BETA_EXPR)]},
        "observables": [_poly_json(b["cos"]), _poly_json(b["cos"])],
        "N": 100_000,
        "schedule": [5000],
        "sampler": {"mode": "grid", "resolution": 1024},
        "tolerances": {"slack": 0.02},
    }


def _bounds_prepare(data):
    spec = _system(data)
    fs = build_observables(require(data, "observables", "$"), "$.observables", spec.space.dim)
    if len(fs) != spec.l:
        raise ConfigError(f"{len(fs)} observables for {spec.l} maps", "$.observables")
    for i, f in enumerate(fs):
        if not f.real:
            raise ConfigError("the bound uses seminorms of real observables", f"$.observables[{i}]")
    try:
        sched = resolve_schedule(spec.l, data.get("schedule"))
    except ErgolabError as e:
        raise ConfigError(str(e), "$.schedule") from None
    return {"spec": spec, "fs": fs, "N": integer(require(data, "N", "$"), "$.N", 1), "schedule": sched, "slack": _tol(data, "slack")}


def _bounds_execute(p, workers):
    report = check_hypotheses(p["spec"])
    if not report.all_ergodic:
        return Outcome([], {}, hypothesis_report=report, hypothesis_failed=True)
    res = bound_check(p["spec"], p["fs"], p["N"], p["schedule"], slack=p["slack"], workers=workers, report=report)
    if not res.applicable:
        raise ConfigError(res.reason, "$.observables")
    rows = [("avg_norm", res.avg_norm), ("min_seminorm", res.min_seminorm), ("satisfied_with_slack", res.satisfied_with_slack)]
    rows += [(f"seminorm_{e.map_id}", e.value) for e in res.seminorms]
    checks = [at_least("min seminorm + slack - avg norm", res.satisfied_with_slack, 0.0)]
    return Outcome(checks, {"bounds.csv": _csv(["quantity", "value"], rows)}, res.to_json(), report)


# characteristic ------------------------------------------------------------

def _characteristic_defaults():
    return {
        "system": {
            "maps": [
                {"kind": "nilrotation", "a": [ALPHA_EXPR, BETA_EXPR, 0.0]},
                {"kind": "nilrotation", "a": [ALPHA_EXPR, BETA_EXPR, 0.0], "power": 2},
            ]
        },
        "observables": [
            {"kind": "fourier", "dim": 3, "terms": [{"k": [0, 0, 1], "c": [1.0, 0.0]}]},
            {"kind": "fourier", "dim": 3, "terms": [{"k": [1, 0, 0], "c": [0.5, 0.0]}, {"k": [-1, 0, 0], "c": [0.5, 0.0]}]},
        ],
        "N": 20_000,
        "sampler": {"mode": "lowdiscrepancy", "count": 1024, "seed": 0},
    }


CHARACTERISTIC_MAX_GAP = 0.05


def _characteristic_prepare(data):
    spec = _system(data)
    fs = build_observables(require(data, "observables", "$"), "$.observables", spec.space.dim)
    if spec.l != 2 or len(fs) != 2:
        raise ConfigError("the characteristic check uses two maps and two observables", "$")
    from .dynamics.system import kronecker_project

    try:
        kronecker_project(fs[0], spec)
    except ErgolabError as e:
        raise ConfigError(str(e), "$.system") from None
    tol = data.get("tolerances", {})
    if "max_gap" not in tol and "min_gap" not in tol:
        tol = data["tolerances"] = {**tol, "max_gap": CHARACTERISTIC_MAX_GAP}
    return {
        "spec": spec,
        "fs": fs,
        "N": integer(require(data, "N", "$"), "$.N", 1),
        "max_gap": _tol(data, "max_gap") if "max_gap" in tol else None,
        "min_gap": _tol(data, "min_gap") if "min_gap" in tol else None,
    }


def _characteristic_execute(p, workers):
    report = check_hypotheses(p["spec"])
    res = characteristic_check(p["spec"], p["fs"], p["N"], workers=workers)
    checks = []
    if p["max_gap"] is not None:
        checks.append(at_most("gap to Kronecker-projected average", res.gap, p["max_gap"]))
    if p["min_gap"] is not None:
        checks.append(at_least("gap to Kronecker-projected average", res.gap, p["min_gap"]))
    rows = [("full_norm", res.full_norm), ("projected_norm", res.projected_norm), ("gap", res.gap)]
    return Outcome(checks, {"characteristic.csv": _csv(["quantity", "value"], rows)}, res.to_json(), report)


# counterexample ------------------------------------------------------------

def _counterexample_defaults():
    return {
        "alpha": ALPHA_EXPR,
        "beta": BETA_EXPR,
        "gamma": GAMMA_EXPR,
        "observable": {"kind": "fourier", "dim": 1, "terms": [{"k": [1], "c": [1.0, 0.0]}]},
        "n_grid": [1000, 10_000, 100_000],
        "sampler": {"mode": "grid", "resolution": [64, 8]},
        "tolerances": {"max_limit_error": 1e-2},
    }


VERDICT = "Z1 not characteristic without difference-ergodicity"


def _counterexample_prepare(data):
    f = build_observable(require(data, "observable", "$"), "$.observable")
    if f.dim != 1 or not isinstance(f, FourierPoly):
        raise ConfigError("the shared-factor observable is a Fourier polynomial on the circle", "$.observable")
    sampler = build_sampler(require(data, "sampler", "$"), "$.sampler", data.get("seed"))
    if sampler.mode == "grid":
        try:
            sampler.axes(2)
        except ValueError as e:
            raise ConfigError(str(e), "$.sampler") from None
    from .dynamics.maps import ProductMap, Rotation

    a, b, g = (number(require(data, k, "$"), f"$.{k}") for k in ("alpha", "beta", "gamma"))
    T1 = ProductMap((Rotation(a), Rotation(b)))
    T2 = ProductMap((Rotation(a), Rotation(g)))
    spec = SystemSpec(T1.space, (T1, T2), sampler, name="product counterexample")
    return {
        "spec": spec,
        "f": f,
        "n_grid": increasing_ints(require(data, "n_grid", "$"), "$.n_grid"),
        "tol": _tol(data, "max_limit_error"),
    }


def _counterexample_execute(p, workers):
    spec, f = p["spec"], p["f"]
    report = check_hypotheses(spec)
    f1, f2 = suite.shared_factor_observables(f)
    limit = product_counterexample_limit(f)
    snaps = multi_average_snapshots(spec, [f1, f2], p["n_grid"], workers=workers)
    rows = []
    for s in snaps:
        err = math.sqrt(float(np.mean(np.abs(s.values - limit) ** 2)))
        rows.append((s.N, l2_norm(s), err))
    mean_f = abs(f.mean())
    checks = [at_most("distance of A_N to int |f|^2", rows[-1][2], p["tol"])]
    verdict = VERDICT if (not report.all_ergodic and limit > 0 and mean_f == 0) else "no counterexample"
    avg = float(np.mean(np.real(snaps[-1].values)))
    details = {"limit": limit, "average_mean": avg, "mean_f": mean_f, "verdict": verdict}
    return Outcome(checks, {"counterexample.csv": _csv(["N", "l2_norm", "limit_error"], rows)}, details, report)


# cocycle -------------------------------------------------------------------

def _cocycle_defaults():
    phi = {"kind": "fourier", "dim": 1, "terms": [{"k": [1], "c": [0.15, 0.0]}, {"k": [-1], "c": [0.15, 0.0]}]}
    return {
        "system": {"maps": [_rotation(ALPHA_EXPR), _rotation(BETA_EXPR)]},
        "cocycle": [
            {"kind": "coboundary-of", "f": phi, "map": _rotation(ALPHA_EXPR), "constant": [0.1]},
            {"kind": "coboundary-of", "f": phi, "map": _rotation(BETA_EXPR), "constant": [0.7]},
        ],
        "expect_compatible": True,
        "sampler": {"mode": "random", "count": 1024, "seed": 0},
        "tolerances": {"compatibility": 1e-9, "commuting": 1e-12},
    }


def _cocycle_prepare(data):
    spec = _system(data)
    comps = require(data, "cocycle", "$")
    if not isinstance(comps, list) or len(comps) != spec.l:
        raise ConfigError(f"need one component per map ({spec.l})", "$.cocycle")
    rho = tuple(build_fibermap(c, f"$.cocycle[{i}]", spec.space.dim) for i, c in enumerate(comps))
    if len({r.target_dim for r in rho}) != 1:
        raise ConfigError("components must share a fiber dimension", "$.cocycle")
    expect = data.get("expect_compatible")
    if expect is not None and not isinstance(expect, bool):
        raise ConfigError("expected true or false", "$.expect_compatible")
    return {
        "spec": spec,
        "cocycle": Cocycle(rho, spec.maps),
        "expect": expect,
        "compat_tol": _tol(data, "compatibility"),
        "comm_tol": _tol(data, "commuting"),
        "seed": int(data.get("seed") or 0),
    }


def _cocycle_execute(p, workers):
    spec, coc = p["spec"], p["cocycle"]
    compat = l_cocycle_check(coc, spec.sampler, p["compat_tol"])
    ext = skew_product(spec, coc, check=False)
    commute, disc = check_commuting(ext, tol=p["comm_tol"], seed=p["seed"])
    checks = [equals("skew product commutes iff cocycle compatible", commute, compat.compatible)]
    if p["expect"] is not None:
        checks.append(equals("compatibility verdict", compat.compatible, p["expect"]))
    rows = [("max_residual", compat.max_residual), ("compatible", compat.compatible), ("commuting_discrepancy", disc), ("commutes", commute)]
    details = {"compatibility": compat.to_json(), "commuting_discrepancy": disc, "commutes": commute}
    if coc.base_space.dim == 1 and coc.target_dim == 1:
        search = search_quasi_coboundary(coc, trig_battery(), spec.sampler)
        rows.append(("best_quasi_coboundary_residual", search.best_residual))
        details["quasi_coboundary_search"] = {"best_residual": search.best_residual, "best": search.best_label, "candidates": search.candidates}
    return Outcome(checks, {"cocycle.csv": _csv(["quantity", "value"], rows)}, details)


# nil-equidistribution ------------------------------------------------------

def _nil_defaults():
    return {
        "system": {
            "maps": [
                {"kind": "nilrotation", "a": [ALPHA_EXPR, BETA_EXPR, 0.0]},
                {"kind": "nilrotation", "a": [ALPHA_EXPR, BETA_EXPR, 0.0], "power": 2},
            ]
        },
        "observables": [{"kind": "builtin", "name": "heisenberg_theta"}, {"kind": "builtin", "name": "heisenberg_theta"}],
        "x": [float(v) for v in weyl_start(3)],
        "n_grid": [3125 * 2**j for j in range(7)],
        "require_monotone": False,
        "tolerances": {"max_final_gap": 0.05},
    }


def _nil_prepare(data):
    spec = _system(data)
    fs = build_observables(require(data, "observables", "$"), "$.observables", spec.space.dim)
    if len(fs) != spec.l:
        raise ConfigError(f"{len(fs)} observables for {spec.l} maps", "$.observables")
    x = numbers(require(data, "x", "$"), "$.x")
    if len(x) != spec.space.dim:
        raise ConfigError(f"point needs {spec.space.dim} coordinates", "$.x")
    return {
        "spec": spec,
        "fs": fs,
        "x": reduce(x, spec.space),
        "n_grid": increasing_ints(require(data, "n_grid", "$"), "$.n_grid"),
        "monotone": bool(data.get("require_monotone", False)),
        "tol": _tol(data, "max_final_gap"),
    }


def _nil_execute(p, workers):
    report = check_hypotheses(p["spec"])
    rep = pointwise_report(p["spec"], p["fs"], p["x"], p["n_grid"])
    gaps = rep.gaps
    checks = []
    if gaps:
        checks.append(at_most("final pointwise gap", gaps[-1], p["tol"]))
        mono = all(b < a for a, b in zip(gaps, gaps[1:]))
        if p["monotone"]:
            checks.append(equals("gaps strictly decreasing", mono, True))
    details = {"values": [[v.real, v.imag] for v in rep.values], "gaps": gaps, "monotone": all(b < a for a, b in zip(gaps, gaps[1:]))}
    return Outcome(checks, {"nil_pointwise.csv": rep.to_csv()}, details, report)


SCENARIOS: dict[str, Scenario] = {
    s.name: s
    for s in [
        Scenario(
            "convergence",
            "L2 convergence of multiple ergodic averages (Cauchy criterion along doubling N)",
            THEOREM_HYPOTHESES,
            ("system.maps", "observables", "n_grid"),
            ("sampler", "require_hypotheses", "tolerances.max_final_gap", "tolerances.max_decay_exponent", "seed"),
            _convergence_defaults,
            _convergence_prepare,
            _convergence_execute,
            {"convergence.csv": ["N", "l2_norm", "cauchy_gap"]},
        ),
        Scenario(
            "theorem2-identity",
            "progression averages along (T, T^2, ..., T^l) and (S, ..., S^l) share their limit",
            THEOREM_HYPOTHESES + " for both progressions",
            ("alpha", "beta", "l", "observables", "N"),
            ("sampler", "tolerances.max_gap", "tolerances.max_oracle_gap"),
            _identity_defaults,
            _identity_prepare,
            _identity_execute,
            {"identity.csv": ["x", "A_alpha", "A_beta", "limit"]},
        ),
        Scenario(
            "seminorm",
            "Host-Kra seminorm via the averaging recursion; equal for commuting ergodic maps",
            "the compared maps commute and are ergodic",
            ("system.maps", "observable", "k"),
            ("map_index", "compare_map_index", "schedule", "sampler", "expected", "tolerances.max_error", "tolerances.max_discrepancy"),
            _seminorm_defaults,
            _seminorm_prepare,
            _seminorm_execute,
            {"seminorm_trace.csv": ["map", "M", "value"]},
        ),
        Scenario(
            "bounds",
            "the L2 norm of the average is eventually at most min_i of the order-l seminorms",
            THEOREM_HYPOTHESES + "; observables bounded by 1",
            ("system.maps", "observables", "N"),
            ("schedule", "sampler", "tolerances.slack"),
            _bounds_defaults,
            _bounds_prepare,
            _bounds_execute,
            {"bounds.csv": ["quantity", "value"]},
        ),
        Scenario(
            "characteristic",
            "for two maps the Kronecker factor is characteristic: projecting the inputs leaves the average unchanged",
            THEOREM_HYPOTHESES + " (run without them to see the factor fail)",
            ("system.maps", "observables", "N"),
            ("sampler", "tolerances.max_gap (default 0.05)", "tolerances.min_gap"),
            _characteristic_defaults,
            _characteristic_prepare,
            _characteristic_execute,
            {"characteristic.csv": ["quantity", "value"]},
        ),
        Scenario(
            "counterexample",
            "product maps R x S_1, R x S_2 with f, conj(f) on the shared factor: the average tends to int |f|^2",
            "deliberately violated: T_1 T_2^-1 is not ergodic",
            ("alpha", "beta", "gamma", "observable", "n_grid"),
            ("sampler", "tolerances.max_limit_error"),
            _counterexample_defaults,
            _counterexample_prepare,
            _counterexample_execute,
            {"counterexample.csv": ["N", "l2_norm", "limit_error"]},
        ),
        Scenario(
            "cocycle",
            "lifted maps (T_i x, u + rho_i(x)) commute exactly when d_i rho_j = d_j rho_i",
            "the base maps commute",
            ("system.maps", "cocycle"),
            ("expect_compatible", "sampler", "tolerances.compatibility", "tolerances.commuting", "seed"),
            _cocycle_defaults,
            _cocycle_prepare,
            _cocycle_execute,
            {"cocycle.csv": ["quantity", "value"]},
        ),
        Scenario(
            "nil-equidistribution",
            "averages along a nilrotation converge at every point",
            "the nilrotation is ergodic (its horizontal shift is irrational)",
            ("system.maps", "observables", "x", "n_grid"),
            ("require_monotone", "tolerances.max_final_gap"),
            _nil_defaults,
            _nil_prepare,
            _nil_execute,
            {"nil_pointwise.csv": ["N", "value_re", "value_im", "gap"]},
        ),
    ]
}


def catalog() -> list[dict]:
    return [s.catalog_entry() for s in SCENARIOS.values()]


def get(name) -> Scenario:
    if name not in SCENARIOS:
        raise ConfigError(f"unknown scenario {name!r}; known: {', '.join(SCENARIOS)}", "$.scenario")
    return SCENARIOS[name]


def check_schema(raw: dict):
    v = raw.get("schema_version")
    if v is None:
        raise ConfigError("missing required key 'schema_version'", "$")
    if v != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema_version {v!r} (this build reads {SCHEMA_VERSION})", "$.schema_version")
