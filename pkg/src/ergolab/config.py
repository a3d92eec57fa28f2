"""JSON experiment configs: parsing, validation and construction of engine objects.

A config is one JSON object with ``schema_version`` and ``scenario``; the
remaining keys depend on the scenario (see :mod:`ergolab.scenarios`).
Building blocks:

* sampler: ``{"mode": "grid", "resolution": 1024}``,
  ``{"mode": "lowdiscrepancy", "count": 4096, "seed": 0}`` or
  ``{"mode": "random", "count": 1000, "seed": 7}``
* map: ``{"kind": "rotation", "alpha": [a, ...]}``,
  ``{"kind": "nilrotation", "a": [alpha, beta, gamma], "power": 1}``,
  ``{"kind": "product", "maps": [...]}``, ``{"kind": "identity", "dim": d}``,
  ``{"kind": "skew", "base": map, "rho": fibermap}``
* observable: ``{"kind": "fourier", "dim": 1, "terms": [{"k": [1], "c": [0.5, 0]}, ...]}``
  or ``{"kind": "builtin", "name": "heisenberg_theta"}``
* fiber map (cocycle component): ``{"kind": "linear", "matrix": [[1]]}``,
  ``{"kind": "constant", "value": [0.3], "dim": 1}``,
  ``{"kind": "coboundary-of", "f": observable, "map": map, "constant": [c]}``
  or ``{"kind": "fourier", ...}`` (an observable read mod 1)

Numbers may be given as strings ``"sqrt(2)-1"`` style expressions over
``sqrt``, ``+ - * /`` and ``**``.
"""

from __future__ import annotations

import ast
import copy
import hashlib
import json
import math
import operator
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .dynamics.fibermaps import FiberMap
from .dynamics.maps import Identity, NilRotation, ProductMap, Rotation, SkewLift, Transformation
from .dynamics.observables import FourierPoly, Observable, heisenberg_theta
from .dynamics.sampling import SamplerSpec
from .dynamics.spaces import Space

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    """Invalid config; ``where`` is a JSON path, or a ``line:column`` for parse errors."""

    def __init__(self, message: str, where: str = ""):
        self.where = where
        super().__init__(f"{where}: {message}" if where else message)


def load_text(text: str) -> dict:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError(e.msg, f"line {e.lineno}, column {e.colno}") from None
    if not isinstance(obj, dict):
        raise ConfigError("top level must be a JSON object", "line 1, column 1")
    return obj


def load_path(path: str | Path) -> dict:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise ConfigError(f"cannot read config: {e.strerror}", str(path)) from None
    return load_text(text)


def config_hash(config: dict) -> str:
    """sha256 of the canonical JSON form (sorted keys), stable under key reordering."""
    blob = json.dumps(config, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


# numbers --------------------------------------------------------------------

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: operator.pow,
}


def _eval_expr(node):
    if isinstance(node, ast.Expression):
        return _eval_expr(node.body)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_expr(node.left), _eval_expr(node.right))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_eval_expr(node.operand)
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id == "sqrt" and len(node.args) == 1:
        return math.sqrt(_eval_expr(node.args[0]))
    raise ValueError("unsupported expression")


def number(value, where: str) -> float:
    if isinstance(value, bool):
        raise ConfigError("expected a number", where)
    if isinstance(value, (int, float)):
        return float(value)
    if isinstance(value, str):
        try:
            return float(_eval_expr(ast.parse(value, mode="eval")))
        except (SyntaxError, ValueError, ZeroDivisionError, OverflowError):
            raise ConfigError(f"cannot evaluate {value!r}", where) from None
    raise ConfigError("expected a number", where)


def numbers(value, where: str) -> list[float]:
    if not isinstance(value, list):
        value = [value]
    return [number(v, f"{where}[{i}]") for i, v in enumerate(value)]


def integer(value, where: str, minimum: int | None = None) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, float)) or int(value) != value:
        raise ConfigError("expected an integer", where)
    v = int(value)
    if minimum is not None and v < minimum:
        raise ConfigError(f"must be >= {minimum}", where)
    return v


def require(obj: dict, key: str, where: str):
    if key not in obj:
        raise ConfigError(f"missing required key {key!r}", where)
    return obj[key]


def expect_dict(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise ConfigError("expected an object", where)
    return obj


# building blocks ------------------------------------------------------------

def build_sampler(obj, where: str, seed: int | None) -> SamplerSpec:
    obj = expect_dict(obj, where)
    mode = require(obj, "mode", where)
    if mode == "grid":
        res = require(obj, "resolution", where)
        if isinstance(res, list):
            res = tuple(integer(r, f"{where}.resolution[{i}]", 1) for i, r in enumerate(res))
        else:
            res = integer(res, f"{where}.resolution", 1)
        return SamplerSpec("grid", resolution=res)
    if mode in ("lowdiscrepancy", "random"):
        count = integer(require(obj, "count", where), f"{where}.count", 1)
        s = obj.get("seed", seed)
        if s is None:
            if mode == "random":
                raise ConfigError("a random sampler needs a seed (here or at top level)", where)
            s = 0
        return SamplerSpec(mode, count=count, seed=integer(s, f"{where}.seed", 0))
    raise ConfigError(f"unknown sampler mode {mode!r}", f"{where}.mode")


def build_map(obj, where: str) -> Transformation:
    obj = expect_dict(obj, where)
    kind = require(obj, "kind", where)
    if kind == "rotation":
        return Rotation(tuple(numbers(require(obj, "alpha", where), f"{where}.alpha")))
    if kind == "nilrotation":
        a = numbers(require(obj, "a", where), f"{where}.a")
        if len(a) != 3:
            raise ConfigError("a Heisenberg element has three coordinates", f"{where}.a")
        T = NilRotation(tuple(a))
        power = integer(obj.get("power", 1), f"{where}.power")
        return T.power(power) if power != 1 else T
    if kind == "product":
        maps = require(obj, "maps", where)
        if not isinstance(maps, list) or not maps:
            raise ConfigError("expected a non-empty list", f"{where}.maps")
        return ProductMap(tuple(build_map(m, f"{where}.maps[{i}]") for i, m in enumerate(maps)))
    if kind == "identity":
        return Identity(Space.torus(integer(require(obj, "dim", where), f"{where}.dim", 1)))
    if kind == "skew":
        base = build_map(require(obj, "base", where), f"{where}.base")
        rho = build_fibermap(require(obj, "rho", where), f"{where}.rho", base.space.dim)
        try:
            return SkewLift(base, rho)
        except ValueError as e:
            raise ConfigError(str(e), where) from None
    raise ConfigError(f"unknown map kind {kind!r}", f"{where}.kind")


BUILTIN_OBSERVABLES = {"heisenberg_theta": heisenberg_theta}


def build_observable(obj, where: str) -> Observable:
    obj = expect_dict(obj, where)
    kind = require(obj, "kind", where)
    if kind == "builtin":
        name = require(obj, "name", where)
        if name not in BUILTIN_OBSERVABLES:
            raise ConfigError(f"unknown builtin {name!r}; known: {sorted(BUILTIN_OBSERVABLES)}", f"{where}.name")
        return BUILTIN_OBSERVABLES[name]()
    if kind == "fourier":
        dim = integer(require(obj, "dim", where), f"{where}.dim", 1)
        terms = require(obj, "terms", where)
        if not isinstance(terms, list):
            raise ConfigError("expected a list", f"{where}.terms")
        coeffs = {}
        for i, t in enumerate(terms):
            tw = f"{where}.terms[{i}]"
            t = expect_dict(t, tw)
            k = require(t, "k", tw)
            if not isinstance(k, list) or len(k) != dim:
                raise ConfigError(f"frequency must be a list of {dim} integers", f"{tw}.k")
            k = tuple(integer(v, f"{tw}.k", None) for v in k)
            c = numbers(require(t, "c", tw), f"{tw}.c")
            if len(c) != 2:
                raise ConfigError("coefficient must be [re, im]", f"{tw}.c")
            coeffs[k] = coeffs.get(k, 0) + complex(c[0], c[1])
        real = obj.get("real")
        try:
            return FourierPoly.from_dict(coeffs, dim, real=real, sup_bound=obj.get("sup_bound"), label=obj.get("label", ""))
        except ValueError as e:
            raise ConfigError(str(e), where) from None
    raise ConfigError(f"unknown observable kind {kind!r}", f"{where}.kind")


def build_fibermap(obj, where: str, base_dim: int) -> FiberMap:
    obj = expect_dict(obj, where)
    kind = require(obj, "kind", where)
    if kind == "linear":
        try:
            m = FiberMap.linear(require(obj, "matrix", where))
        except ValueError as e:
            raise ConfigError(str(e), f"{where}.matrix") from None
    elif kind == "constant":
        m = FiberMap.constant(numbers(require(obj, "value", where), f"{where}.value"), base_dim)
    elif kind == "coboundary-of":
        from .cocycles import coboundary

        f = build_observable(require(obj, "f", where), f"{where}.f")
        T = build_map(require(obj, "map", where), f"{where}.map")
        m = coboundary(f, T)
        if "constant" in obj:
            m = FiberMap.constant(numbers(obj["constant"], f"{where}.constant"), m.base_dim) + m
    elif kind == "fourier":
        f = build_observable(obj, where)
        if not f.real:
            raise ConfigError("fiber map components must be real", where)
        m = FiberMap.from_observables([f])
    else:
        raise ConfigError(f"unknown fiber map kind {kind!r}", f"{where}.kind")
    if m.base_dim != base_dim:
        raise ConfigError(f"defined on dimension {m.base_dim}, base has dimension {base_dim}", where)
    return m


def build_maps(obj, where: str) -> tuple[Transformation, ...]:
    if not isinstance(obj, list) or not obj:
        raise ConfigError("expected a non-empty list of maps", where)
    maps = tuple(build_map(m, f"{where}[{i}]") for i, m in enumerate(obj))
    if len({T.space for T in maps}) != 1:
        raise ConfigError("all maps must act on one space", where)
    return maps


def build_observables(obj, where: str, dim: int | None = None) -> list[Observable]:
    if not isinstance(obj, list) or not obj:
        raise ConfigError("expected a non-empty list of observables", where)
    out = [build_observable(o, f"{where}[{i}]") for i, o in enumerate(obj)]
    if dim is not None:
        for i, f in enumerate(out):
            if f.dim != dim:
                raise ConfigError(f"observable has dimension {f.dim}, space has dimension {dim}", f"{where}[{i}]")
    return out


def increasing_ints(obj, where: str) -> list[int]:
    if not isinstance(obj, list) or not obj:
        raise ConfigError("expected a non-empty list of integers", where)
    vals = [integer(v, f"{where}[{i}]", 1) for i, v in enumerate(obj)]
    if any(b <= a for a, b in zip(vals, vals[1:])):
        raise ConfigError("must be strictly increasing", where)
    return vals


def positive(value, where: str) -> float:
    v = number(value, where)
    if not v > 0:
        raise ConfigError("tolerances must be positive", where)
    return v


@dataclass
class Resolved:
    """A validated config: the raw dict with defaults filled in."""

    data: dict[str, Any]

    @property
    def scenario(self) -> str:
        return self.data["scenario"]

    def hash(self) -> str:
        return config_hash(self.data)


def resolve(raw: dict, defaults: dict, seed_override: int | None = None) -> Resolved:
    data = copy.deepcopy(defaults)
    data.update(copy.deepcopy(raw))
    tol = copy.deepcopy(defaults.get("tolerances", {}))
    tol.update(raw.get("tolerances", {}))
    if tol:
        data["tolerances"] = tol
    if seed_override is not None:
        data["seed"] = int(seed_override)
        _override_seeds(data, int(seed_override))
    return Resolved(data)


def _override_seeds(obj, seed: int):
    if isinstance(obj, dict):
        if obj.get("mode") in ("random", "lowdiscrepancy"):
            obj["seed"] = seed
        for v in obj.values():
            _override_seeds(v, seed)
    elif isinstance(obj, list):
        for v in obj:
            _override_seeds(v, seed)
