"""Shipped experiment presets, each tagged with the result it demonstrates."""

import copy

TAGS = {
    "birkhoff": "Birkhoff ergodic theorem as the scalar case",
    "kingman": "Kingman subadditive ergodic theorem",
    "record-times": "infinitely many record times",
    "drift": "linear drift of an isometric cocycle",
    "horofunction": "horofunction ergodic theorem",
    "ray-cat0": "ray approximation in CAT(0) spaces",
    "convergence": "convergence to the limiting boundary point",
    "oseledets": "multiplicative ergodic theorem via Cartan decomposition",
    "ray-hyperbolic": "ray approximation in Gromov hyperbolic spaces",
    "birkhoff-boundary": "Birkhoff limit recovered from the boundary point",
    "gauge-metrics": "gauge metrics on the line have trivial boundary",
    "aaronson": "Aaronson ergodic theorem for gauges",
    "aaronson-weiss": "Aaronson-Weiss theorem via gauge regularization",
    "mz": "Marcinkiewicz-Zygmund law",
    "log-integrable": "log-integrable increments",
    "skew-product": "skew product and the horofunction cocycle relation",
    "stationary-measure": "stationary measure from empirical averages",
    "fk": "Furstenberg-Khasminskii drift formula",
    "liouville-character": "Liouville walks drift along a character",
    "harmonic-functions": "centered walks with positive drift have bounded harmonic functions",
    "subexponential": "subexponential growth and centered steps force zero drift",
}

_uniform = {"kind": "iid", "params": {"dist": "uniform"}}

PRESETS = {
    "birkhoff-rotation": {
        "tag": "birkhoff",
        "description": "indicator of [0, 0.7) along an irrational rotation; |S_n|/n -> 0.4",
        "lab": "cocycle",
        "driving": {"kind": "irrational_rotation", "params": {"theta": 0.6180339887498949, "x0": 0.1}},
        "space": {"model": "euclidean", "dim": 1},
        "steps": {"rule": "interval", "interval": [0.0, 0.7], "inside": 1.0, "outside": -1.0},
        "cocycle": {"n": 10000, "trials": 1, "expected_alpha": 0.4, "subadditivity_pairs": 50},
    },
    "kingman-gaussian-plane": {
        "tag": "kingman",
        "description": "gaussian steps with mean (0.5, 0.5) in the plane; drift sqrt(0.5)",
        "lab": "cocycle",
        "driving": {"kind": "iid", "params": {"dist": "normal", "mean": 0.5, "dim": 2}},
        "space": {"model": "euclidean", "dim": 2},
        "cocycle": {"n": 10000, "trials": 20},
    },
    "record-times-biased-walk": {
        "tag": "record-times",
        "description": "+-1 walk with P(+1) = 0.7 on the line; record times keep occurring",
        "lab": "cocycle",
        "driving": {"kind": "iid", "params": {"dist": "categorical", "weights": [0.7, 0.3],
                                              "values": [1.0, -1.0]}},
        "space": {"model": "euclidean", "dim": 1},
        "cocycle": {"n": 4000, "trials": 10, "record_times": {"epsilon": 0.1, "K": 200, "horizon": 4000}},
    },
    "drift-free-group-tree": {
        "tag": "drift",
        "description": "simple random walk on the Cayley tree of F_2; drift 1/2",
        "lab": "cocycle",
        "driving": {"kind": "iid", "params": {"dist": "categorical", "weights": [0.25, 0.25, 0.25, 0.25]}},
        "space": {"model": "free_group_cayley", "rank": 2},
        "steps": {"rule": "table", "elements": ["a", "A", "b", "B"]},
        "cocycle": {"n": 10000, "trials": 20, "expected_alpha": 0.5, "tol": 0.01},
    },
    "horofunction-disk": {
        "tag": "horofunction",
        "description": "hyperbolic translations of length 1 in uniform directions",
        "lab": "boundary",
        "driving": _uniform,
        "space": {"model": "poincare_disk"},
        "steps": {"rule": "disk_translation", "length": 1.0},
        "boundary": {"n": 10000, "fit_factor": 2, "ray_tol": 0.1},
    },
    "ray-posdef-cone": {
        "tag": "ray-cat0",
        "description": "rotated diag(2, 1/2) acting on positive definite 2x2 matrices",
        "lab": "boundary",
        "driving": _uniform,
        "space": {"model": "posdef_cone", "dim": 2},
        "steps": {"rule": "rotated_diagonal", "diagonal": [2.0, 0.5]},
        "boundary": {"n": 5000, "fit_factor": 2},
    },
    "convergence-euclidean-plane": {
        "tag": "convergence",
        "description": "gaussian steps with mean (0.5, 0.5); the direction settles",
        "lab": "boundary",
        "driving": {"kind": "iid", "params": {"dist": "normal", "mean": 0.5, "dim": 2}},
        "space": {"model": "euclidean", "dim": 2},
        "boundary": {"n": 10000, "fit_factor": 2, "trials": 4},
    },
    "ray-free-group-tree": {
        "tag": "ray-hyperbolic",
        "description": "simple random walk on the Cayley tree of F_2 tracks a geodesic ray",
        "lab": "boundary",
        "driving": {"kind": "iid", "params": {"dist": "categorical", "weights": [0.25, 0.25, 0.25, 0.25]}},
        "space": {"model": "free_group_cayley", "rank": 2},
        "steps": {"rule": "table", "elements": ["a", "A", "b", "B"]},
        "boundary": {"n": 10000, "fit_factor": 2},
    },
    "birkhoff-from-boundary-line": {
        "tag": "birkhoff-boundary",
        "description": "mean -0.3 steps on the line; the sign comes from the boundary point",
        "lab": "boundary",
        "driving": {"kind": "iid", "params": {"dist": "normal", "mean": -0.3, "dim": 1}},
        "space": {"model": "euclidean", "dim": 1},
        "boundary": {"n": 10000, "fit_factor": 2, "trials": 4, "expected_mean": -0.3},
    },
    "skew-product-cocycle": {
        "tag": "skew-product",
        "description": "horofunction cocycle relation under isometries of the disk",
        "lab": "boundary",
        "driving": _uniform,
        "space": {"model": "poincare_disk"},
        "steps": {"rule": "disk_translation", "length": 0.5},
        "boundary": {"n": 2000, "fit_factor": 2, "cocycle_samples": 500, "ray_tol": 0.1},
    },
    "oseledets-hyperbolic-pair": {
        "tag": "oseledets",
        "description": "random products of [[2,1],[1,1]] and [[1,1],[1,2]]",
        "lab": "oseledets",
        "driving": {"kind": "iid", "params": {"dist": "categorical", "weights": [0.5, 0.5]}},
        "space": {"model": "posdef_cone", "dim": 2},
        "steps": {"rule": "table", "elements": [[[2, 1], [1, 1]], [[1, 1], [1, 2]]]},
        "oseledets": {"n": 10000, "eps": 0.1, "oracle": True},
    },
    "gauge-trivial-boundary": {
        "tag": "gauge-metrics",
        "description": "the line with metric sqrt|x - y| has only the zero horofunction",
        "lab": "gauge",
        "driving": {"kind": "iid", "params": {"dist": "normal"}},
        "space": {"model": "gauged_line", "gauge": {"kind": "power", "p": 0.5}},
        "gauge": {"check": "trivial_boundary"},
    },
    "aaronson-pareto-0.9": {
        "tag": "aaronson",
        "description": "sqrt gauge against symmetric Pareto steps of tail index 0.9",
        "lab": "gauge",
        "driving": {"kind": "iid", "params": {"dist": "symmetric_pareto", "tail_index": 0.9}},
        "space": {"model": "gauged_line", "gauge": {"kind": "power", "p": 0.5}},
        "gauge": {"check": "aaronson", "n": 1000000, "trials": 10},
    },
    "aaronson-weiss-regularized": {
        "tag": "aaronson-weiss",
        "description": "sqrt(t) + 1 regularized to a gauge, then the Aaronson check",
        "lab": "gauge",
        "driving": {"kind": "iid", "params": {"dist": "normal"}},
        "space": {"model": "gauged_line", "gauge": {"kind": "raw", "name": "sqrt_plus_one"}},
        "gauge": {"check": "regularization", "n": 2000, "trials": 4, "tol": 0.1},
    },
    "mz-half": {
        "tag": "mz",
        "description": "|S_n| / n^2 for symmetric Pareto steps of tail index 0.7",
        "lab": "gauge",
        "driving": {"kind": "iid", "params": {"dist": "symmetric_pareto", "tail_index": 0.7}},
        "space": {"model": "gauged_line", "gauge": {"kind": "power", "p": 0.5}},
        "gauge": {"check": "mz", "p": 0.5, "n": 1000000, "trials": 10},
    },
    "log-integrable-pareto": {
        "tag": "log-integrable",
        "description": "|S_n|^(1/n) -> 1 for symmetric Pareto steps of tail index 0.7",
        "lab": "gauge",
        "driving": {"kind": "iid", "params": {"dist": "symmetric_pareto", "tail_index": 0.7}},
        "space": {"model": "gauged_line", "gauge": {"kind": "log1p"}},
        "gauge": {"check": "log", "n": 10000, "trials": 10},
    },
    "log-guard-exp-cauchy": {
        "tag": "log-integrable",
        "description": "exponentiated Cauchy steps are not log-integrable; the guard trips",
        "lab": "gauge",
        "driving": {"kind": "iid", "params": {"dist": "exp_cauchy"}},
        "space": {"model": "gauged_line", "gauge": {"kind": "log1p"}},
        "gauge": {"check": "log", "n": 10000, "trials": 10},
    },
    "aaronson-guard-pareto-0.4": {
        "tag": "aaronson",
        "description": "tail index 0.4 makes D(|f|) non-integrable for the sqrt gauge; the guard trips",
        "lab": "gauge",
        "driving": {"kind": "iid", "params": {"dist": "symmetric_pareto", "tail_index": 0.4}},
        "space": {"model": "gauged_line", "gauge": {"kind": "power", "p": 0.5}},
        "gauge": {"check": "aaronson", "n": 100000, "trials": 10},
    },
    "stationary-measure-free-group": {
        "tag": "stationary-measure",
        "description": "Cesaro averages of the walk laws approach a stationary boundary measure",
        "lab": "walk",
        "space": {"group": "free_group", "rank": 2},
        "walk": {"n": 1000, "nu": {"kind": "simple"}, "stationarity": {"n": 64, "trials": 1000, "depth": 1}},
    },
    "fk-free-group": {
        "tag": "fk",
        "description": "simple random walk on F_2: drift equals the boundary integral",
        "lab": "walk",
        "space": {"group": "free_group", "rank": 2},
        "walk": {"n": 100000, "trials": 10, "nu": {"kind": "simple"}, "expected_drift": 0.5,
                 "fk": {"depth": 4, "samples": 10000}},
    },
    "character-lattice": {
        "tag": "liouville-character",
        "description": "non-centered walk on Z^2 drifts at the best character value 1/3",
        "lab": "walk",
        "space": {"group": "integer_lattice", "dim": 2},
        "walk": {"n": 10000, "trials": 20, "character": True,
                 "nu": {"support": [[1, 0], [-1, 0], [0, 1], [0, -1]], "weights": [0.5, 0.16666666666666666,
                                                                                  0.16666666666666666, 0.16666666666666669]}},
    },
    "harmonic-free-group": {
        "tag": "harmonic-functions",
        "description": "symmetric walk on F_2 with drift 1/2 and a nonconstant bounded harmonic function",
        "lab": "walk",
        "space": {"group": "free_group", "rank": 2},
        "walk": {"n": 10000, "trials": 10, "nu": {"kind": "simple"}, "harmonic": True},
    },
    "centered-heisenberg": {
        "tag": "subexponential",
        "description": "simple random walk on the Heisenberg group has zero drift",
        "lab": "walk",
        "space": {"group": "heisenberg"},
        "walk": {"n": 10000, "trials": 20, "nu": {"kind": "simple"}, "centered": True,
                 "growth_radius": 12},
    },
}

for _name, _cfg in PRESETS.items():
    _cfg.setdefault("name", _name)
    _cfg.setdefault("seeds", [1])


def list_presets():
    """``[(name, tag, description)]`` sorted by name."""
    return [(name, cfg["tag"], cfg.get("description", "")) for name, cfg in sorted(PRESETS.items())]


def preset(name):
    if name not in PRESETS:
        raise KeyError(f"unknown preset {name!r}; try list-presets")
    return copy.deepcopy(PRESETS[name])


def covered_tags():
    return sorted({cfg["tag"] for cfg in PRESETS.values()})
