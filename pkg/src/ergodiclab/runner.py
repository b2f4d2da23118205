"""Lab runners: one config and one seed in, verdicts and data series out.

Every verdict is a dict with the check name, the tag of the result it
exercises, ``pass``/``fail``/``flagged``, the measured value and the
tolerance it was held to.  Series are tables for CSV files; plots are
two-column arrays for ``.dat`` files.
"""

from dataclasses import dataclass, field
import math
import warnings

import numpy as np

from . import boundary as bd
from . import cocycle as cc
from . import config as cf
from . import gauge as gg
from . import oseledets as os_
from . import walks as wk
from .driving import sample_path
from .gauge import default_checkpoints
from .groups import FreeGroup, Heisenberg, growth_rates


class LabError(RuntimeError):
    pass


@dataclass
class LabResult:
    verdicts: list = field(default_factory=list)
    series: dict = field(default_factory=dict)
    plots: dict = field(default_factory=dict)
    # headline numbers keyed by name, e.g. {"alpha": ...}; merged per seed into the report
    estimates: dict = field(default_factory=dict)

    def add(self, check, tag, ok, measured, tolerance, seed, flagged=False, note=""):
        verdict = "flagged" if flagged else ("pass" if ok else "fail")
        self.verdicts.append({"check": check, "tag": tag, "verdict": verdict, "measured": measured,
                              "tolerance": tolerance, "seed": seed, "note": note})


def _f(x):
    return float(x) if x is not None else None


# --- cocycle ----------------------------------------------------------------


def run_cocycle(cfg, seed):
    p = cfg["cocycle"]
    n, trials, tol = p["n"], p.get("trials", 10), p.get("tol", 0.02)
    model = cf.build_space(cfg)
    rule = cf.build_step_rule(cfg) if "steps" in cfg else None
    system = cf.build_driving(cfg, seed)
    rt = p.get("record_times")
    pairs = p.get("subadditivity_pairs", 50)
    res = LabResult()
    trajs = []
    for i in range(trials):
        keep = i == 0 and (rt is not None or pairs > 0)
        trajs.append(cc.compose_trajectory(model, sample_path(system.trial(i), n), rule, keep_orbit=keep))
    est = cc.estimate_drift(trajs)
    # the infimum over n >= n/100 keeps one path's first steps from deciding alpha
    late = cc.estimate_drift(trajs, start=max(1, n // 100))
    gap = abs(late.tail - late.alpha)
    ktol = max(tol, 5 * math.hypot(late.tail_stderr, late.alpha_stderr))
    res.add("kingman_limit", "kingman", gap <= ktol, gap, ktol, seed,
            note=f"alpha={late.alpha:.6g} (full infimum {est.alpha:.6g}) tail={late.tail:.6g}")
    res.estimates.update(alpha=late.alpha, alpha_full=est.alpha, tail=est.tail, tail_stderr=est.tail_stderr)
    if "expected_alpha" in p:
        err = abs(est.tail - p["expected_alpha"])
        res.add("drift_value", "drift", err <= max(tol, 5 * est.tail_stderr), err,
                max(tol, 5 * est.tail_stderr), seed, note=f"expected {p['expected_alpha']}")
    S = cc.ScalarCocycle.from_trajectory(trajs[0])
    if pairs > 0:
        sub = cc.check_subadditivity(S, pairs, seed=seed % 2 ** 32)
        res.add("subadditivity", "kingman", sub.passed, sub.max_violation, 1e-9, seed)
    if rt is not None:
        H = min(rt.get("horizon", min(n, 2000)), n)
        params = cc.RecordTimeParams(rt["epsilon"], rt.get("K", 1), H)
        times = cc.record_times(S, late.alpha, params)
        n_late = sum(1 for t in times if t > H // 2)
        res.add("record_times_late", "record-times", n_late > 0, n_late, 1, seed,
                note=f"{len(times)} record times up to {H}")
        res.series[f"record_times_s{seed}"] = (["n"], [[t] for t in times])
    cp = default_checkpoints(n, count=200)
    rows = est.rows()[cp - 1]
    res.series[f"drift_s{seed}"] = (["n", "mean_S_n", "stderr", "mean_S_n_over_n"],
                                    np.column_stack([rows, rows[:, 1] / rows[:, 0]]))
    res.plots[f"drift_s{seed}"] = np.column_stack([cp, rows[:, 1] / cp])
    return res


# --- boundary ---------------------------------------------------------------

_RAY_TAG = {"euclidean": "ray-cat0", "posdef_cone": "ray-cat0",
            "poincare_disk": "ray-hyperbolic", "free_group_cayley": "ray-hyperbolic"}


def run_boundary(cfg, seed):
    p = cfg["boundary"]
    N = p["n"]
    M = N * p.get("fit_factor", 2)
    trials = p.get("trials", 1)
    tol_floor = p.get("tol_floor", 0.05)
    thresh = p.get("drift_threshold", 0.01)
    model = cf.build_space(cfg)
    rule = cf.build_step_rule(cfg) if "steps" in cfg else None
    system = cf.build_driving(cfg, seed)
    res = LabResult()
    cps = sorted(set(default_checkpoints(M).tolist()) | {N})
    trajs = [cc.compose_trajectory(model, sample_path(system.trial(i), M), rule, checkpoints=cps)
             for i in range(trials)]
    slopes = np.array([t.distances[N] / N for t in trajs])
    stderr = float(slopes.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    for i, traj in enumerate(trajs):
        label = f"s{seed}_t{i}"
        try:
            xi = bd.estimate_direction(traj, drift_threshold=thresh)
        except bd.BoundaryError as exc:
            res.add("horofunction_limit", "horofunction", False, _f(slopes[i]), thresh, seed,
                    flagged=True, note=str(exc))
            continue
        rep = bd.verify_main_theorem(traj, xi.point, stderr=stderr, depth=N, tol_floor=tol_floor)
        res.add("horofunction_limit", "horofunction", rep.passed, rep.residual, rep.tol, seed,
                note=f"fit at {M}, checked at {N}")
        right, wrong = bd.wrong_direction_gap(traj, xi.point, depth=N)
        res.add("wrong_direction_worse", "horofunction", wrong > right, wrong - right, 0.0, seed)
        res.series[f"horofunction_{label}"] = (["n", "minus_h_over_n", "norm_over_n"], rep.rows())
        res.plots[f"horofunction_gap_{label}"] = np.column_stack([rep.checkpoints, np.abs(rep.a - rep.b)])
        if model.has_rays:
            alpha = float(traj.distances[M] / M)
            res.estimates[f"alpha_t{i}"] = alpha
            ray = bd.ray_error(traj, xi.point, alpha, depth=N)
            tol = p.get("ray_tol", 0.1 if model.kind == "poincare_disk" else 0.05)
            ok = ray.terminal < tol and ray.slope < 0
            res.add("ray_error", _RAY_TAG[model.kind], ok, ray.terminal, tol, seed,
                    note=f"log-log slope {ray.slope:.3f}")
            cmp_ok = ray.comparison_ok()
            if cmp_ok is not None:
                worst = float(np.max(ray.errors ** 2 - ray.rhs))
                res.add("comparison_bound", "ray-cat0", cmp_ok, worst, 0.01, seed)
            res.series[f"ray_{label}"] = (["n", "e_n"], ray.rows())
            res.plots[f"ray_{label}"] = ray.rows()
        if model.kind == "free_group_cayley":
            ok = bd.prefix_agreement(traj, N, M)
            res.add("boundary_convergence", "convergence", ok, int(ok), 1, seed,
                    note=f"Z_{N} and Z_{M} share N/4 letters")
        elif model.kind in bd.DIRECTION_MODELS:
            dd = bd.direction_drift(traj, N, M)
            tol = p.get("convergence_tol", 0.05)
            res.add("boundary_convergence", "convergence", dd <= tol, dd, tol, seed)
        if "expected_mean" in p:
            sd = bd.birkhoff_from_boundary(traj, thresh)
            err = abs(sd.value - p["expected_mean"])
            res.add("birkhoff_from_boundary", "birkhoff-boundary", err <= max(tol_floor, 5 * stderr),
                    err, max(tol_floor, 5 * stderr), seed, note=f"sign {sd.sign:+d}")
    if p.get("cocycle_samples", 0):
        worst = bd.cocycle_identity(model, p["cocycle_samples"], seed % 2 ** 32)
        res.add("horofunction_cocycle", "skew-product", worst <= 1e-9, worst, 1e-9, seed)
    return res


# --- oseledets --------------------------------------------------------------


def run_oseledets(cfg, seed):
    p = cfg["oseledets"]
    n, eps, tol = p["n"], p.get("eps", 0.1), p.get("tol", 0.02)
    d = cfg["space"].get("dim", 2)
    coc = os_.MatrixCocycle(d, cf.build_step_rule(cfg), cfg["name"])
    path = sample_path(cf.build_driving(cfg, seed), n)
    res = LabResult()
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", os_.MomentWarning)
        spec = os_.lyapunov_spectrum(coc, path, p.get("reorth_stride", 1), p.get("gap"))
    mu = spec.exponents
    res.estimates["exponents"] = [float(v) for v in mu]
    if caught:
        res.add("moment_guard", "oseledets", False, _f(spec.moment[0]), None, seed, flagged=True,
                note=str(caught[0].message))
    if "expected" in p:
        exp = np.sort(np.asarray(p["expected"], dtype=float))[::-1]
        err = float(np.max(np.abs(mu - exp)))
        res.add("spectrum_expected", "oseledets", err <= tol, err, tol, seed)
    if p.get("oracle", False):
        ref = os_.product_exponents(coc, path)
        err = float(np.max(np.abs(mu - ref)))
        res.add("spectrum_oracle", "oseledets", err <= tol, err, tol, seed)
    rep = os_.verify_omet(coc, spec, path, eps)
    res.add("determinant_identity", "oseledets", rep.det_residual < 0.01, rep.det_residual, 0.01, seed)
    ok = bool(np.all(rep.margins[-1] <= 1e-9 * n))
    res.add("entry_bounds", "oseledets", ok, float(np.max(rep.margins[-1])), 1e-9 * n, seed,
            note=f"eps={eps}, bounds hold from n0={rep.n0}")
    if p.get("inverse", True):
        inv = os_.lyapunov_spectrum(coc.inverse(), os_.reversed_path(path), gap=p.get("gap"))
        err = float(np.max(np.abs(inv.exponents + mu[::-1])))
        res.add("inversion_symmetry", "oseledets", err <= tol, err, tol, seed)
    if p.get("ray", True) and d == 2:
        traj = os_.cone_trajectory(coc, path)
        try:
            H = os_.ray_matrix(traj)
            ev = np.sort(np.linalg.eigvalsh((H + H.T) / 2))[::-1]
            err = float(np.max(np.abs(ev - mu)))
            res.add("ray_matrix_spectrum", "oseledets", err <= tol, err, tol, seed)
        except os_.OseledetsError as exc:
            res.add("ray_matrix_spectrum", "oseledets", False, None, tol, seed, flagged=True, note=str(exc))
        drift = float(traj.distances[-1] / n)
        err = abs(drift - 2 * float(np.linalg.norm(mu)))
        res.add("cone_drift", "oseledets", err <= tol, err, tol, seed)
    header = ["n"] + [f"mu_{j + 1}" for j in range(d)] + ["det_residual"]
    res.series[f"lyapunov_s{seed}"] = (header, spec.series)
    res.series[f"entry_margins_s{seed}"] = (["n"] + [f"margin_{j + 1}" for j in range(d)], rep.rows())
    for j in range(d):
        res.plots[f"mu_{j + 1}_s{seed}"] = spec.series[:, [0, j + 1]]
    return res


# --- walk -------------------------------------------------------------------


def run_walk(cfg, seed):
    p = cfg["walk"]
    n, trials, tol = p["n"], p.get("trials", 10), p.get("tol", 0.01)
    group, nu = cf.build_walk(cfg)
    res = LabResult()
    wd = wk.drift(group, nu, n, trials, seed)
    res.estimates.update(drift=wd.value, drift_stderr=wd.stderr)
    if "expected_drift" in p:
        err = abs(wd.value - p["expected_drift"])
        res.add("drift_value", "drift", err <= tol, err, tol, seed, note=f"stderr {wd.stderr:.3g}")
    if "fk" in p:
        f = p["fk"]
        fn, ft = f.get("n", n), f.get("trials", trials)
        m = wk.empirical_stationary_measure(group, nu, fn, ft, seed, f.get("depth", 4))
        fwd = wd if (fn, ft) == (n, trials) else wk.drift(group, nu, fn, ft, seed)
        rep = wk.fk_check(group, nu, m, fwd, f.get("samples", 10 ** 4), seed % 2 ** 32)
        sigma = math.hypot(rep.drift_stderr, rep.rhs_stderr)
        res.add("furstenberg_khasminskii", "fk", rep.passed, abs(rep.drift - rep.rhs), 3 * sigma, seed,
                note=f"drift {rep.drift:.5g}, boundary integral {rep.rhs:.5g}")
        res.series[f"boundary_measure_s{seed}"] = (
            ["cylinder", "mass"], [[" ".join(map(str, c)), v] for c, v in sorted(m.cylinders.items())])
    if "stationarity" in p:
        s = p["stationarity"]
        sn, st_, depth = s.get("n", 64), s.get("trials", 1000), s.get("depth", 1)
        r1 = wk.empirical_stationary_measure(group, nu, sn, st_, seed, depth).residual
        r2 = wk.empirical_stationary_measure(group, nu, 2 * sn, st_, seed, depth).residual
        res.add("stationarity_residual_decreases", "stationary-measure", r2 < r1, r2, r1, seed,
                note=f"residual {r1:.4g} at n={sn}, {r2:.4g} at n={2 * sn}")
    if p.get("character", False):
        rep = wk.character_check(group, nu, n, trials, seed)
        res.add("character_drift", "liouville-character", rep.passed, abs(rep.drift - rep.integral),
                max(3 * rep.stderr, 1e-12), seed, note=f"integral {rep.integral:.5g}")
    if p.get("centered", False):
        if not nu.is_symmetric(group):
            raise LabError("walk.centered: the step distribution is not symmetric")
        _, integral = wk.character_drift(group, nu)
        res.add("character_mean_zero", "liouville-character", integral == 0.0, integral, 0.0, seed)
        ctol = p.get("centered_tol", 0.05)
        res.add("centered_drift", "subexponential" if isinstance(group, Heisenberg) else "liouville-character",
                wd.value <= ctol, wd.value, ctol, seed)
    if p.get("harmonic", False):
        if not isinstance(group, FreeGroup):
            raise LabError("walk.harmonic: the shipped harmonic function lives on the free group")
        f = wk.first_letter_probability(1, group.k)
        pts = wk.random_elements(group, 500, seed % 2 ** 32)
        resid = wk.harmonicity_residual(group, nu, f, pts)
        spread = f((1,)) - f((2,))
        res.add("bounded_harmonic_function", "harmonic-functions", resid <= 1e-12 and spread > 0 and wd.value > 0.05,
                resid, 1e-12, seed, note=f"f(a) - f(b) = {spread:.4g}, drift {wd.value:.4g}")
    if "growth_radius" in p:
        rates = growth_rates(group.ball_counts(p["growth_radius"]))
        tail = rates[len(rates) // 2:]
        falling = bool(np.all(np.diff(tail) < 0))
        res.add("subexponential_growth", "subexponential", falling, rates[-1], None, seed,
                note="(1/r) ln A_r decreasing over the second half of the radii")
        res.series["growth"] = (["r", "ball_count", "rate"],
                                [[r + 1, c, v] for r, (c, v) in enumerate(zip(group.ball_counts(p["growth_radius"])[1:], rates))])
    cp = default_checkpoints(n, count=200)
    est = wd.estimate
    res.series[f"walk_drift_s{seed}"] = (["n", "mean_length", "stderr"], est.rows()[cp - 1])
    res.plots[f"walk_drift_s{seed}"] = np.column_stack([cp, est.averages[cp - 1] / cp])
    return res


# --- gauge ------------------------------------------------------------------

_GAUGE_TAG = {"aaronson": "aaronson", "mz": "mz", "log": "log-integrable",
              "regularization": "aaronson-weiss", "trivial_boundary": "gauge-metrics"}


def _gauge_report(res, rep, tag, tol, seed, name):
    flagged = rep.verdict == "flagged"
    res.estimates["terminal"] = rep.terminal
    note = "; ".join(rep.flags) + (f" (tail index {rep.guard.hill_index:.3g})" if rep.guard else "")
    res.add(f"{rep.check}_terminal", tag, rep.passed, rep.terminal, tol, seed, flagged=flagged, note=note)
    res.series[f"{name}_s{seed}"] = (["n", "mean", "stderr"],
                                     np.column_stack([rep.checkpoints, rep.series, rep.stderr]))
    res.plots[f"{name}_s{seed}"] = np.column_stack([rep.checkpoints, rep.series])


def run_gauge(cfg, seed):
    p = cfg["gauge"]
    check = p["check"]
    tag = _GAUGE_TAG[check]
    D = cf.build_gauge(cfg["space"]["gauge"])
    res = LabResult()
    n, trials = p.get("n", 10 ** 4), p.get("trials", 10)
    guard = p.get("guard_threshold", 1.1)
    if check == "trivial_boundary":
        tol = p.get("tol", 1e-3)
        rep = gg.trivial_boundary_check(D, tol=tol)
        res.add("horofunctions_vanish", tag, rep.passed, rep.terminal, tol, seed)
        res.series["trivial_boundary"] = (["x", "sup_z_defect"], np.column_stack([rep.xs, rep.sups]))
        res.plots["trivial_boundary"] = np.column_stack([rep.xs, rep.sups])
        return res
    system = cf.build_driving(cfg, seed)
    if check == "regularization":
        raw = getattr(D, "raw", None)
        if raw is None:
            raise LabError("gauge.check=regularization needs space.gauge.kind = raw")
        grid = gg.PROBE_GRID[1:]
        ratio = np.asarray(D(grid)) / raw(grid)
        ok = bool(np.all(ratio >= 1 - 1e-12) and np.all(ratio <= 2 + 1e-9))
        res.add("band_d_le_D_le_2d", tag, ok, float(ratio.max()), 2.0, seed,
                note=f"min D/d = {ratio.min():.6g}")
        res.series["regularization"] = (["t", "d", "D"], np.column_stack([grid, raw(grid), D(grid)]))
        res.plots["regularization_ratio"] = np.column_stack([grid, ratio])
        tol = p.get("tol", 0.05)
        rep = gg.aaronson_check(system, D, n, trials, guard_threshold=guard, tol=tol)
        _gauge_report(res, rep, tag, tol, seed, "regularized_average")
        return res
    if check == "aaronson":
        tol = p.get("tol", 0.02)
        rep = gg.aaronson_check(system, D, n, trials, guard_threshold=guard, tol=tol)
    elif check == "mz":
        tol = p.get("tol", 0.02)
        rep = gg.mz_check(p.get("p", 0.5), system, n, trials, guard_threshold=guard, tol=tol)
    else:
        tol = p.get("tol", 0.01)
        rep = gg.log_check(system, n, trials, guard_threshold=guard, tol=tol)
    _gauge_report(res, rep, tag, tol, seed, check)
    return res


LAB_RUNNERS = {"cocycle": run_cocycle, "boundary": run_boundary, "oseledets": run_oseledets,
               "walk": run_walk, "gauge": run_gauge}


def run_lab(cfg, seed):
    try:
        return LAB_RUNNERS[cfg["lab"]](cfg, seed)
    except (LabError, cf.ConfigError):
        raise
    except Exception as exc:
        raise LabError(f"{cfg['lab']} lab failed for seed {seed}: {type(exc).__name__}: {exc}") from exc
