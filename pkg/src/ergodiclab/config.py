"""Experiment configs: YAML documents checked against a JSON Schema.

A config names one lab and carries the sections that lab reads.  Schema
errors are reported with the dotted path of the offending field, e.g.
``space.dim: -1 is less than the minimum of 1``.
"""

import copy
import hashlib
import json
import math

import jsonschema
import numpy as np
import yaml

from .driving import DrivingError, DrivingSystem
from .gauge import (GaugeError, RawGauge, load_table_gauge, log1p_gauge, power_gauge,
                    regularize_gauge)
from .groups import FreeGroup, Heisenberg, IntegerLattice
from .spaces import Euclidean, FreeGroupCayley, GaugedLine, ModelError, PoincareDisk, PosDefCone
from .spaces.disk import translation
from .spaces.tree import parse_word
from .walks import StepDistribution, WalkError

LABS = ("cocycle", "boundary", "oseledets", "walk", "gauge")


class ConfigError(ValueError):
    pass


_int = {"type": "integer"}
_pos_int = {"type": "integer", "minimum": 1}
_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_seed = {"type": "integer", "minimum": 0, "maximum": 2 ** 64 - 1}

_gauge = {
    "type": "object",
    "required": ["kind"],
    "additionalProperties": False,
    "properties": {
        "kind": {"enum": ["power", "log1p", "table", "raw"]},
        "p": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "path": {"type": "string"},
        "name": {"type": "string"},
        "grid": _pos_int,
    },
    "allOf": [
        {"if": {"properties": {"kind": {"const": "power"}}}, "then": {"required": ["p"]}},
        {"if": {"properties": {"kind": {"const": "table"}}}, "then": {"required": ["path"]}},
        {"if": {"properties": {"kind": {"const": "raw"}}}, "then": {"required": ["name"]}},
    ],
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "title": "ergodiclab experiment",
    "type": "object",
    "required": ["name", "lab", "space"],
    "additionalProperties": False,
    "properties": {
        "name": {"type": "string", "pattern": "^[A-Za-z0-9_.-]+$"},
        "description": {"type": "string"},
        "tag": {"type": "string"},
        "lab": {"enum": list(LABS)},
        "seeds": {"type": "array", "items": _seed, "minItems": 1, "uniqueItems": True},
        "out": {"type": "string"},
        "driving": {
            "type": "object",
            "required": ["kind"],
            "additionalProperties": False,
            "properties": {
                "kind": {"enum": ["iid", "irrational_rotation", "finite_markov"]},
                "seed": _seed,
                "params": {"type": "object"},
            },
        },
        "space": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "model": {"enum": ["euclidean", "poincare_disk", "posdef_cone",
                                   "free_group_cayley", "gauged_line"]},
                "group": {"enum": ["free_group", "integer_lattice", "heisenberg"]},
                "dim": _pos_int,
                "rank": {"type": "integer", "minimum": 1, "maximum": 26},
                "exact_radius": _pos_int,
                "gauge": _gauge,
            },
            "oneOf": [{"required": ["model"]}, {"required": ["group"]}],
        },
        "steps": {
            "type": "object",
            "required": ["rule"],
            "additionalProperties": False,
            "properties": {
                "rule": {"enum": ["identity", "table", "disk_translation", "rotated_diagonal", "interval"]},
                "elements": {"type": "array", "minItems": 1},
                "length": _pos,
                "diagonal": {"type": "array", "items": _pos, "minItems": 2, "maxItems": 2},
                "interval": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
                "inside": _num,
                "outside": _num,
            },
            "allOf": [
                {"if": {"properties": {"rule": {"const": "table"}}}, "then": {"required": ["elements"]}},
                {"if": {"properties": {"rule": {"const": "disk_translation"}}}, "then": {"required": ["length"]}},
                {"if": {"properties": {"rule": {"const": "rotated_diagonal"}}}, "then": {"required": ["diagonal"]}},
                {"if": {"properties": {"rule": {"const": "interval"}}},
                 "then": {"required": ["interval", "inside", "outside"]}},
            ],
        },
        "cocycle": {
            "type": "object",
            "required": ["n"],
            "additionalProperties": False,
            "properties": {
                "n": _pos_int,
                "trials": _pos_int,
                "tol": _pos,
                "expected_alpha": _num,
                "subadditivity_pairs": {"type": "integer", "minimum": 0},
                "record_times": {
                    "type": "object",
                    "required": ["epsilon"],
                    "additionalProperties": False,
                    "properties": {"epsilon": _pos, "K": _pos_int, "horizon": _pos_int},
                },
            },
        },
        "boundary": {
            "type": "object",
            "required": ["n"],
            "additionalProperties": False,
            "properties": {
                "n": _pos_int,
                "fit_factor": _pos_int,
                "trials": _pos_int,
                "tol_floor": _pos,
                "drift_threshold": _pos,
                "ray_tol": _pos,
                "convergence_tol": _pos,
                "cocycle_samples": {"type": "integer", "minimum": 0},
                "expected_mean": _num,
            },
        },
        "oseledets": {
            "type": "object",
            "required": ["n"],
            "additionalProperties": False,
            "properties": {
                "n": _pos_int,
                "eps": _pos,
                "gap": _pos,
                "tol": _pos,
                "expected": {"type": "array", "items": _num},
                "oracle": {"type": "boolean"},
                "inverse": {"type": "boolean"},
                "ray": {"type": "boolean"},
                "reorth_stride": _pos_int,
            },
        },
        "walk": {
            "type": "object",
            "required": ["n", "nu"],
            "additionalProperties": False,
            "properties": {
                "n": _pos_int,
                "trials": {"type": "integer", "minimum": 2},
                "tol": _pos,
                "nu": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {
                        "kind": {"enum": ["simple"]},
                        "support": {"type": "array", "minItems": 1},
                        "weights": {"type": "array", "items": {"type": "number", "minimum": 0}},
                    },
                    "oneOf": [{"required": ["kind"]}, {"required": ["support", "weights"]}],
                },
                "expected_drift": _num,
                "fk": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {"n": _pos_int, "trials": {"type": "integer", "minimum": 2},
                                   "depth": _pos_int, "samples": {"type": "integer", "minimum": 2}},
                },
                "stationarity": {
                    "type": "object",
                    "additionalProperties": False,
                    "properties": {"n": _pos_int, "trials": _pos_int, "depth": _pos_int},
                },
                "character": {"type": "boolean"},
                "centered": {"type": "boolean"},
                "centered_tol": _pos,
                "harmonic": {"type": "boolean"},
                "growth_radius": _pos_int,
            },
        },
        "gauge": {
            "type": "object",
            "required": ["check"],
            "additionalProperties": False,
            "properties": {
                "check": {"enum": ["aaronson", "mz", "log", "regularization", "trivial_boundary"]},
                "n": _pos_int,
                "trials": _pos_int,
                "p": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "tol": _pos,
                "guard_threshold": _pos,
            },
        },
    },
    "allOf": [
        {"if": {"properties": {"lab": {"const": lab}}}, "then": {"required": [lab]}}
        for lab in LABS
    ] + [
        {"if": {"properties": {"lab": {"enum": ["cocycle", "boundary", "oseledets", "gauge"]}}},
         "then": {"required": ["driving"], "properties": {"space": {"required": ["model"]}}}},
        {"if": {"properties": {"lab": {"const": "walk"}}},
         "then": {"properties": {"space": {"required": ["group"]}}}},
        {"if": {"properties": {"lab": {"const": "oseledets"}}},
         "then": {"required": ["steps"], "properties": {"space": {"properties": {"model": {"const": "posdef_cone"}}}}}},
        {"if": {"properties": {"lab": {"const": "gauge"}}},
         "then": {"properties": {"space": {"required": ["gauge"],
                                           "properties": {"model": {"const": "gauged_line"}}}}}},
    ],
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


def _path(error):
    parts = [str(p) for p in error.absolute_path]
    return ".".join(parts) if parts else "<root>"


def schema_errors(cfg):
    """All schema violations as ``"field.path: message"`` strings, deepest first."""
    errors = sorted(_VALIDATOR.iter_errors(cfg), key=lambda e: (-len(e.absolute_path), _path(e), e.message))
    out = []
    for e in errors:
        # oneOf/anyOf failures are clearer through their most specific sub-error
        if e.context:
            best = max(e.context, key=lambda c: len(c.absolute_path))
            if len(best.absolute_path) > len(e.absolute_path):
                e = best
        out.append(f"{_path(e)}: {e.message}")
    return out


def validate(cfg):
    """Schema and semantic checks; raises :class:`ConfigError` listing every problem."""
    if not isinstance(cfg, dict):
        raise ConfigError("<root>: config must be a mapping")
    errs = schema_errors(cfg)
    if errs:
        raise ConfigError("\n".join(errs))
    try:
        if cfg["lab"] == "gauge":
            build_gauge(cfg["space"]["gauge"])
        else:
            build_space(cfg)
        if "driving" in cfg:
            build_driving(cfg, seeds(cfg)[0])
        if "steps" in cfg:
            build_step_rule(cfg)
        if cfg["lab"] == "walk":
            build_walk(cfg)
    except ConfigError:
        raise
    except (DrivingError, GaugeError, ModelError, WalkError, ValueError, TypeError) as exc:
        raise ConfigError(str(exc)) from exc
    return cfg


def load(path):
    with open(path) as fh:
        try:
            cfg = yaml.safe_load(fh)
        except yaml.YAMLError as exc:
            raise ConfigError(f"{path}: not valid YAML: {exc}") from exc
    return validate(cfg)


def canonical(cfg):
    return json.dumps(cfg, sort_keys=True, separators=(",", ":"))


def config_hash(cfg):
    return hashlib.sha256(canonical(cfg).encode()).hexdigest()


def seeds(cfg):
    if "seeds" in cfg:
        return [int(s) for s in cfg["seeds"]]
    return [int(cfg.get("driving", {}).get("seed", 0))]


def with_seed_offset(cfg, offset):
    cfg = copy.deepcopy(cfg)
    cfg["seeds"] = [(s + int(offset)) % 2 ** 64 for s in seeds(cfg)]
    return cfg


# --- builders ---------------------------------------------------------------


def _ctx(section, exc):
    return ConfigError(f"{section}: {exc}")


def build_driving(cfg, seed):
    d = cfg["driving"]
    try:
        return DrivingSystem(d["kind"], int(seed), dict(d.get("params", {})))
    except DrivingError as exc:
        raise _ctx("driving.params", exc) from exc


RAW_GAUGES = {
    "sqrt_plus_one": lambda t: np.sqrt(t) + 1.0,
    "log_plus_one": lambda t: np.log1p(t) + 1.0,
    "min_linear_sqrt": lambda t: np.minimum(t, np.sqrt(t)),
}


def build_gauge(spec):
    kind = spec["kind"]
    try:
        if kind == "power":
            return power_gauge(spec["p"])
        if kind == "log1p":
            return log1p_gauge()
        if kind == "table":
            return load_table_gauge(spec["path"])
        if spec["name"] not in RAW_GAUGES:
            raise GaugeError(f"unknown raw gauge {spec['name']!r}; shipped: {sorted(RAW_GAUGES)}")
        raw = RawGauge(RAW_GAUGES[spec["name"]], spec["name"])
        return regularize_gauge(raw, spec.get("grid", 16))
    except (GaugeError, OSError) as exc:
        raise _ctx("space.gauge", exc) from exc


def build_space(cfg):
    sp = cfg["space"]
    try:
        if "group" in sp:
            if sp["group"] == "free_group":
                return FreeGroup(sp.get("rank", 2))
            if sp["group"] == "integer_lattice":
                return IntegerLattice(sp.get("dim", 1))
            return Heisenberg(sp.get("exact_radius", 14))
        model = sp["model"]
        if model == "euclidean":
            return Euclidean(sp.get("dim", 1))
        if model == "poincare_disk":
            return PoincareDisk()
        if model == "posdef_cone":
            return PosDefCone(sp.get("dim", 2))
        if model == "free_group_cayley":
            return FreeGroupCayley(sp.get("rank", 2))
        if "gauge" not in sp:
            raise ConfigError("space.gauge: a gauged line needs a gauge")
        return GaugedLine(build_gauge(sp["gauge"]))
    except ModelError as exc:
        raise _ctx("space", exc) from exc


def _rotation(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def _table_element(cfg, x):
    sp = cfg["space"]
    model = sp.get("model")
    if model == "free_group_cayley":
        return parse_word(x) if isinstance(x, str) else tuple(x)
    if model == "poincare_disk":
        if not isinstance(x, dict) or "length" not in x:
            raise ConfigError("steps.elements: disk elements are {length, angle} mappings")
        return translation(x["length"], x.get("angle", 0.0))
    if cfg["lab"] == "oseledets" or model == "posdef_cone":
        return np.asarray(x, dtype=float)
    return np.asarray(x, dtype=float) if isinstance(x, list) else float(x)


def build_step_rule(cfg):
    """Map ``steps`` to a callable ``symbol -> isometry`` (or matrix), None for identity."""
    st = cfg["steps"]
    rule = st["rule"]
    if rule == "identity":
        return None
    if rule == "table":
        table = [_table_element(cfg, x) for x in st["elements"]]

        def pick(s):
            i = int(s)
            if not 0 <= i < len(table):
                raise ConfigError(f"steps.elements: symbol {s!r} has no table entry")
            return table[i]

        return pick
    if rule == "disk_translation":
        L = float(st["length"])
        return lambda s: translation(L, 2 * math.pi * float(s))
    if rule == "rotated_diagonal":
        D = np.diag(st["diagonal"])
        return lambda s: _rotation(2 * math.pi * float(s)) @ D
    a, b = st["interval"]
    inside, outside = float(st["inside"]), float(st["outside"])
    return lambda s: inside if a <= float(s) < b else outside


def build_walk(cfg):
    group = build_space(cfg)
    spec = cfg["walk"]["nu"]
    if spec.get("kind") == "simple":
        nu = StepDistribution.uniform(group.generators())
    else:
        if len(spec["support"]) != len(spec["weights"]):
            raise ConfigError("walk.nu: support and weights differ in length")
        support = [group.element(parse_word(g) if isinstance(g, str) else g) for g in spec["support"]]
        try:
            nu = StepDistribution(support, spec["weights"])
        except WalkError as exc:
            raise _ctx("walk.nu", exc) from exc
    return group, nu.validate(group)
