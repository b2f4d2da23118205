"""Acceptance suite: one test per criterion, each printing a pass/fail line.

Run with ``pytest -m acceptance -s`` to see the lines as they are produced;
they are also written straight to the terminal when output is captured.
"""

import json
import math
import time

import numpy as np
import pytest
import yaml

from ergodiclab import cli, presets
from ergodiclab import config as cf
from ergodiclab.cocycle import compose_trajectory, estimate_drift
from ergodiclab.driving import DrivingSystem, sample_path
from ergodiclab.gauge import (PROBE_GRID, RawGauge, aaronson_check, log1p_gauge, log_check, mz_check,
                              power_gauge, regularize_gauge)
from ergodiclab.groups import FreeGroup, Heisenberg, IntegerLattice
from ergodiclab.oseledets import MatrixCocycle, lyapunov_spectrum, reversed_path, verify_omet
from ergodiclab.runner import run_lab
from ergodiclab.spaces import Euclidean, FreeGroupCayley, GaugedLine, PoincareDisk, PosDefCone, parse_word
from ergodiclab.spaces.checks import metric_suite
from ergodiclab.walks import (StepDistribution, character_check, character_drift, drift,
                              empirical_stationary_measure, fk_check)

import oracles

pytestmark = pytest.mark.acceptance

PM = {"dist": "categorical", "weights": [0.5, 0.5], "values": [1.0, -1.0]}
SRW = {"dist": "categorical", "weights": [0.25] * 4}
LETTERS = [parse_word(w) for w in ("a", "A", "b", "B")]

IN_SCOPE_TAGS = [
    "aaronson", "aaronson-weiss", "birkhoff", "birkhoff-boundary", "convergence", "drift", "fk",
    "gauge-metrics", "harmonic-functions", "horofunction", "kingman", "liouville-character",
    "log-integrable", "mz", "oseledets", "ray-cat0", "ray-hyperbolic", "record-times", "skew-product",
    "stationary-measure", "subexponential",
]


class Criterion:
    def __init__(self, k, budget, capsys):
        self.k, self.budget, self.capsys = k, budget, capsys
        self.parts = []
        self.t0 = time.perf_counter()

    def check(self, label, ok, detail=""):
        self.parts.append((label, bool(ok), detail))

    def finish(self):
        elapsed = time.perf_counter() - self.t0
        self.check("runtime", elapsed < self.budget, f"{elapsed:.1f}s of {self.budget}s")
        ok = all(p[1] for p in self.parts)
        bad = [p[0] for p in self.parts if not p[1]]
        with self.capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {self.k}: "
                  + ("all checks hold" if ok else "failing: " + ", ".join(bad)))
            for label, good, detail in self.parts:
                print(f"    {'ok ' if good else 'BAD'} {label}: {detail}")
        assert ok, f"criterion {self.k} failing parts: {bad}"


@pytest.fixture
def criterion(capsys):
    return lambda k, budget: Criterion(k, budget, capsys)


def _const(value, n):
    return sample_path(DrivingSystem("iid", params={"dist": "constant", "value": value}), n)


def _preset(name, **overrides):
    cfg = presets.preset(name)
    cfg.setdefault("name", name)
    for section, values in overrides.items():
        cfg[section].update(values)
    return cf.validate(cfg)


def _verdicts(res, check):
    return [v for v in res.verdicts if v["check"] == check]


def test_criterion_1_metric_suite(criterion):
    c = criterion(1, 60)
    models = [Euclidean(1), Euclidean(3), FreeGroupCayley(2), PoincareDisk(), PosDefCone(2),
              GaugedLine(power_gauge(0.5)), GaugedLine(log1p_gauge())]
    for m in models:
        rep = metric_suite(m, cases=1000, seed=11)
        tol = 0.0 if isinstance(m, FreeGroupCayley) else 1e-9
        worst = max((v for k, v in rep.defects.items() if k != "chart_limit"), default=0.0)
        c.check(f"{m!r} axioms/isometry/basepoint/lipschitz", rep.passed(tol=tol, limit_tol=1e-6),
                f"worst defect {worst:.2e}, chart-vs-limit {rep.defects.get('chart_limit', 0.0):.2e}")
    c.finish()


def test_criterion_2_kingman_drift(criterion):
    c = criterion(2, 120)
    for v, alpha in (([1.0], 1.0), ([3.0, 4.0], 5.0)):
        est = estimate_drift([compose_trajectory(Euclidean(len(v)), _const(v, 200))])
        c.check(f"constant translation {v}", est.alpha == alpha, f"alpha {est.alpha!r}")
    sys_ = DrivingSystem("iid", 5, PM)
    trajs = [compose_trajectory(Euclidean(1), sample_path(sys_.trial(i), 10 ** 4)) for i in range(100)]
    est = estimate_drift(trajs)
    c.check("centered walk on the line, 1e4 x 100", est.alpha <= 0.02, f"alpha {est.alpha:.5f} <= 0.02")
    tree = FreeGroupCayley(2)
    srw = DrivingSystem("iid", 1, SRW)
    trajs = [compose_trajectory(tree, sample_path(srw.trial(i), 10 ** 5), lambda s: LETTERS[int(s)])
             for i in range(10)]
    est = estimate_drift(trajs)
    target = oracles.free_group_drift(2)
    c.check("free-group SRW drift at 1e5", abs(est.tail - target) <= 0.01,
            f"{est.tail:.5f} vs {target} (birth-death chain)")
    c.finish()


BOUNDARY = [name for name, _, _ in presets.list_presets() if presets.PRESETS[name]["lab"] == "boundary"]


@pytest.fixture(scope="module")
def boundary_runs():
    out = {}
    for name in BOUNDARY:
        t = time.perf_counter()
        cfg = _preset(name, boundary={"n": 10 ** 4})
        out[name] = (run_lab(cfg, cf.seeds(cfg)[0]), time.perf_counter() - t)
    return out


def test_criterion_3_horofunction_theorem(criterion, boundary_runs):
    c = criterion(3, 120)
    c.t0 -= sum(t for _, t in boundary_runs.values())
    for name, (res, _) in boundary_runs.items():
        for v in _verdicts(res, "horofunction_limit"):
            c.check(f"{name} residual at N=1e4", v["verdict"] == "pass",
                    f"{v['measured']:.3g} <= {v['tolerance']:.3g}")
        for v in _verdicts(res, "wrong_direction_worse"):
            c.check(f"{name} wrong direction", v["verdict"] == "pass", f"residual increase {v['measured']:.3g}")
    c.finish()


def test_criterion_4_ray_approximation(criterion, boundary_runs):
    c = criterion(4, 120)
    cases = {"convergence-euclidean-plane": 0.05, "ray-posdef-cone": 0.05, "horofunction-disk": 0.1}
    c.t0 -= sum(boundary_runs[n][1] for n in cases)
    for name, tol in cases.items():
        res = boundary_runs[name][0]
        for v in _verdicts(res, "ray_error"):
            c.check(f"{name} e_N", v["verdict"] == "pass" and v["tolerance"] <= tol,
                    f"{v['measured']:.3g} < {tol}, {v['note']}")
    c.finish()


A = np.array([[2.0, 1.0], [1.0, 1.0]])
B = np.array([[1.0, 1.0], [1.0, 2.0]])


def test_criterion_5_oseledets(criterion):
    c = criterion(5, 180)
    diag = MatrixCocycle(2, lambda s: np.diag([2.0, 0.5]))
    path = _const(0.0, 1000)
    spec = lyapunov_spectrum(diag, path)
    err = float(np.max(np.abs(spec.exponents - [math.log(2), -math.log(2)])))
    c.check("constant diag(2, 1/2)", err < 1e-9, f"error {err:.2e}")
    pair = MatrixCocycle(2, lambda s: A if int(s) == 0 else B, "pair")
    path = sample_path(DrivingSystem("iid", 3, {"dist": "categorical", "weights": [0.5, 0.5]}), 10 ** 4)
    spec = lyapunov_spectrum(pair, path)
    ref = oracles.product_singular_logs(pair.matrices(path))
    err = float(np.max(np.abs(spec.exponents - ref)))
    c.check("random 2x2 cocycle vs exact product", err <= 0.02, f"{spec.exponents} vs {np.round(ref, 6)}")
    rep = verify_omet(pair, spec, path, 0.1)
    c.check("determinant identity", rep.det_residual < 0.01, f"residual {rep.det_residual:.2e}")
    c.check("entry bounds at eps=0.1", rep.passed, f"bounds hold from n0={rep.n0}")
    inv = lyapunov_spectrum(pair.inverse(), reversed_path(path)).exponents
    err = float(np.max(np.abs(inv + spec.exponents[::-1])))
    c.check("inversion symmetry", err <= 0.02, f"error {err:.2e}")
    c.finish()


def test_criterion_6_fk_formula(criterion):
    c = criterion(6, 180)
    cfg = _preset("fk-free-group")
    res = run_lab(cfg, cf.seeds(cfg)[0])
    v = _verdicts(res, "furstenberg_khasminskii")[0]
    c.check("free-group SRW within 3 sigma (1e4 samples)", v["verdict"] == "pass",
            f"|gap| {v['measured']:.4f} <= {v['tolerance']:.4f}; {v['note']}")
    Z = IntegerLattice(1)
    nu = StepDistribution([1], [1.0])
    rep = fk_check(Z, nu, empirical_stationary_measure(Z, nu, 200, trials=2), drift(Z, nu, 200, trials=2),
                   samples=500)
    c.check("lattice delta walk exact", rep.drift == 1.0 and rep.rhs == 1.0, f"{rep.drift} = {rep.rhs}")
    F2 = FreeGroup(2)
    srw = StepDistribution.uniform(F2.generators())
    r1 = empirical_stationary_measure(F2, srw, 64, trials=1000, seed=5, depth=1).residual
    r2 = empirical_stationary_measure(F2, srw, 128, trials=1000, seed=5, depth=1).residual
    c.check("stationarity residual n=64 -> 128", r2 < r1, f"{r1:.4f} -> {r2:.4f}")
    c.finish()


def test_criterion_7_centered_walks(criterion):
    c = criterion(7, 120)
    for G in (IntegerLattice(2), IntegerLattice(3), Heisenberg()):
        nu = StepDistribution.uniform(G.generators())
        value = character_drift(G, nu)[1]
        c.check(f"symmetric steps on {type(G).__name__}", value == 0.0, f"integral {value!r}")
    Z2 = IntegerLattice(2)
    nu = StepDistribution([(1, 0), (-1, 0), (0, 1), (0, -1)], [0.5, 1 / 6, 1 / 6, 1 / 6])
    rep = character_check(Z2, nu, 10 ** 4, trials=10, seed=3)
    m1 = abs(0.5 - 1 / 6) + abs(1 / 6 - 1 / 6)
    c.check("non-centered lattice walk", rep.passed and abs(rep.integral - m1) < 1e-12,
            f"drift {rep.drift:.4f} +- {3 * rep.stderr:.4f} vs |m|_1 = {m1:.4f}")
    H = Heisenberg()
    wd = drift(H, StepDistribution.uniform(H.generators()), 10 ** 4, trials=10, seed=2)
    c.check("centered Heisenberg walk at 1e4", wd.value <= 0.05, f"drift {wd.value:.4f}")
    c.finish()


def test_criterion_8_gauges(criterion):
    c = criterion(8, 180)
    grid = PROBE_GRID[1:]
    for raw in (RawGauge(np.log1p, "log1p"), RawGauge(lambda t: np.sqrt(t) + 1.0, "sqrt_plus_one"),
                RawGauge(lambda t: np.sqrt(t), "sqrt")):
        D = regularize_gauge(raw)
        ratio = np.asarray(D(grid)) / raw(grid)
        c.check(f"d <= D <= 2d for {raw.name}", ratio.min() >= 1 - 1e-12 and ratio.max() <= 2 + 1e-9,
                f"D/d in [{ratio.min():.6f}, {ratio.max():.6f}]")

    def pareto(a):
        return DrivingSystem("iid", 1, {"dist": "symmetric_pareto", "tail_index": a})

    rep = aaronson_check(pareto(0.7), power_gauge(0.5), 10 ** 6, trials=10)
    c.check("Aaronson, tail index 0.7 at 1e6", rep.verdict == "pass",
            f"terminal {rep.terminal:.4f} vs 0.02 (stable-law value {oracles.stable_sqrt_mean(0.7, 10 ** 6):.4f})")
    rep = aaronson_check(pareto(0.4), power_gauge(0.5), 10 ** 5, trials=10)
    c.check("Aaronson, tail index 0.4 guard", rep.guard.tripped and rep.verdict == "flagged",
            f"hill index {rep.guard.hill_index:.3f}")
    rep = mz_check(0.5, pareto(0.7), 10 ** 6, trials=10)
    c.check("MZ p=1/2 at 1e6", rep.terminal < 0.02 and rep.passed, f"terminal {rep.terminal:.2e}")
    rep = log_check(pareto(0.7), 10 ** 4, trials=10)
    c.check("log check at 1e4", abs(rep.terminal - 1) < 0.01 and rep.passed, f"terminal {rep.terminal:.6f}")
    c.finish()


def _snapshot(out):
    files = {}
    for f in sorted(out.iterdir()):
        data = f.read_bytes()
        if f.name == "report.json":
            rep = json.loads(data)
            del rep["provenance"]["timestamp"]
            data = json.dumps(rep, sort_keys=True).encode()
        files[f.name] = data
    return files


def test_criterion_9_reproducibility_and_catalog(criterion, tmp_path, monkeypatch):
    c = criterion(9, 600)
    monkeypatch.delenv(cli.OUT_ENV, raising=False)
    for name in ("kingman-gaussian-plane", "stationary-measure-free-group", "oseledets-hyperbolic-pair"):
        cfg = dict(presets.preset(name), name=name, seeds=[1, 2, 3])
        f = tmp_path / f"{name}.yaml"
        f.write_text(yaml.safe_dump(cfg))
        runs = []
        for i, extra in enumerate(([], [], ["--jobs", "3"])):
            out = tmp_path / f"{name}-{i}"
            cli.main(["run", "--config", str(f), "--out", str(out)] + extra)
            runs.append(_snapshot(out))
        same = runs[0] == runs[1] == runs[2]
        c.check(f"{name} byte-identical", same and len(runs[0]) > 1, f"{len(runs[0])} files, 3 runs")
    covered = presets.covered_tags()
    missing = sorted(set(IN_SCOPE_TAGS) - set(covered))
    c.check("catalog covers every in-scope tag", not missing, f"{len(covered)} tags, missing {missing}")
    c.finish()
