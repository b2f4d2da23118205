"""Gauge functions on the line and the ergodic theorems they support.

A gauge ``D`` is increasing, vanishes at 0, is subadditive and has ``D(t)/t``
decreasing to 0.  The line with the metric ``D(|x - y|)`` has trivial
horofunction boundary, which forces ``D(|S_n|)/n -> 0`` for Birkhoff sums
with ``E D(|f|) < oo``.  The checks below measure this at desk scale.
"""

from dataclasses import dataclass, field
import csv
import math

import numpy as np

from .driving import sample_path

PROBE_GRID = np.concatenate([[0.0], np.geomspace(1e-6, 1e12, 361)])


class GaugeError(ValueError):
    pass


def _pairs(rng, count=1000):
    t = 10.0 ** rng.uniform(-6, 12, count)
    s = 10.0 ** rng.uniform(-6, 12, count)
    return t, s


class GaugeFunction:
    """A validated gauge ``t -> D(t)``; calling it evaluates elementwise."""

    def __init__(self, fn, name="custom", allow_positive_origin=False):
        self.fn = fn
        self.name = name
        self.allow_positive_origin = allow_positive_origin
        self._validate()

    def __repr__(self):
        return f"GaugeFunction({self.name})"

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if np.any(t < 0):
            raise GaugeError("gauge argument must be nonnegative")
        out = np.asarray(self.fn(t), dtype=float)
        return float(out) if out.ndim == 0 else out

    def _validate(self):
        grid = PROBE_GRID
        D = np.asarray(self(grid), dtype=float)
        if not np.all(np.isfinite(D)) or np.any(D < 0):
            raise GaugeError(f"{self.name}: gauge must be finite and nonnegative")
        if D[0] != 0 and not self.allow_positive_origin:
            raise GaugeError(f"{self.name}: D(0) must be 0")
        if np.any(np.diff(D) < -1e-12 * np.maximum(D[1:], 1)):
            raise GaugeError(f"{self.name}: gauge must be increasing")
        ratio = D[1:] / grid[1:]
        if np.any(np.diff(ratio) > 1e-12 * ratio[:-1]):
            raise GaugeError(f"{self.name}: D(t)/t must be nonincreasing")
        tail = ratio[-40:]
        if not np.all(np.diff(tail) < 0) or not D[-1] > D[-40]:
            raise GaugeError(f"{self.name}: need D(t) -> oo and D(t)/t strictly decreasing to 0")
        t, s = _pairs(np.random.default_rng(0))
        lhs = np.asarray(self(t + s))
        rhs = np.asarray(self(t)) + np.asarray(self(s))
        if np.any(lhs > rhs * (1 + 1e-12) + 1e-15):
            raise GaugeError(f"{self.name}: gauge is not subadditive")


def power_gauge(p):
    """``D(t) = t**p`` with ``0 < p < 1``."""
    if not 0 < p < 1:
        raise GaugeError("power gauge exponent must lie in (0, 1)")
    return GaugeFunction(lambda t: np.power(t, p), name=f"power({p:g})")


def log1p_gauge():
    return GaugeFunction(np.log1p, name="log1p")


def table_gauge(ts, Ds, name="table"):
    """Piecewise-linear gauge through the knots ``(ts, Ds)``.

    Beyond the last knot the gauge continues as a power law with the log-log
    slope of the final segment, which must be below 1.
    """
    ts = np.asarray(ts, dtype=float)
    Ds = np.asarray(Ds, dtype=float)
    if ts.ndim != 1 or ts.shape != Ds.shape or ts.size < 2:
        raise GaugeError("gauge table needs at least two (t, D) rows")
    if ts[0] != 0 or Ds[0] != 0:
        raise GaugeError("gauge table must start at (0, 0)")
    if np.any(np.diff(ts) <= 0):
        raise GaugeError("gauge table abscissae must increase")
    slope = math.log(Ds[-1] / Ds[-2]) / math.log(ts[-1] / ts[-2]) if Ds[-2] > 0 else 0.0
    if not 0 < slope < 1:
        raise GaugeError("the last table segment must have log-log slope in (0, 1)")

    def fn(t):
        t = np.asarray(t, dtype=float)
        inside = np.interp(t, ts, Ds)
        with np.errstate(divide="ignore"):
            outside = Ds[-1] * np.power(np.maximum(t, ts[-1]) / ts[-1], slope)
        return np.where(t <= ts[-1], inside, outside)

    return GaugeFunction(fn, name=name)


def load_table_gauge(path):
    """Read a two-column ``t, D`` CSV (a header row is allowed)."""
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                rows.append((float(row[0]), float(row[1])))
            except ValueError:
                if rows:
                    raise GaugeError(f"bad row in gauge table: {row}")
    ts, Ds = zip(*rows)
    return table_gauge(ts, Ds, name=f"table({path})")


class RawGauge:
    """An increasing, unbounded, subadditive ``d(t) = o(t)`` to be regularized."""

    def __init__(self, fn, name="raw"):
        self.fn = fn
        self.name = name

    def __call__(self, t):
        return np.asarray(self.fn(np.asarray(t, dtype=float)), dtype=float)

    def check(self):
        grid = PROBE_GRID
        d = self(grid)
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise GaugeError(f"{self.name}: raw gauge must be finite and nonnegative")
        if np.any(np.diff(d) < -1e-12 * np.maximum(d[1:], 1)):
            raise GaugeError(f"{self.name}: raw gauge must be increasing")
        if not d[-1] > d[-61] * (1 + 1e-6):
            raise GaugeError(f"{self.name}: raw gauge must tend to infinity")
        ratio = d[1:] / grid[1:]
        if not ratio[-1] < 0.5 * ratio.max() or not np.all(np.diff(ratio[-40:]) < 0):
            raise GaugeError(f"{self.name}: raw gauge must be o(t)")
        t, s = _pairs(np.random.default_rng(1))
        if np.any(self(t + s) > (self(t) + self(s)) * (1 + 1e-12) + 1e-15):
            raise GaugeError(f"{self.name}: raw gauge is not subadditive")


def _sup_ratio(raw, t, per_octave, rtol=1e-6, max_octaves=60):
    """``sup_{u >= 1} d(u t)/u`` by a geometric grid plus local refinement."""
    if t == 0:
        return float(raw(0.0))
    best, best_u = float(raw(t)), 1.0
    low_run = 0
    for j in range(max_octaves):
        u = 2.0 ** (j + np.arange(1, per_octave + 1) / per_octave)
        vals = raw(u * t) / u
        i = int(np.argmax(vals))
        if vals[i] > best:
            best, best_u = float(vals[i]), float(u[i])
        low_run = low_run + 1 if vals.max() < 0.5 * best else 0
        if low_run >= 3:
            break
    else:
        raise GaugeError(f"{raw.name}: sup over u does not stabilize at t={t:g}")
    step = 2.0 ** (1.0 / per_octave)
    lo, hi = max(1.0, best_u / step), best_u * step
    for _ in range(200):
        u = np.geomspace(lo, hi, 33)
        vals = raw(u * t) / u
        i = int(np.argmax(vals))
        new = max(best, float(vals[i]))
        done = new - best <= rtol * abs(new) and hi / lo < 1 + 1e-9
        best = new
        lo, hi = max(1.0, u[max(i - 1, 0)]), u[min(i + 1, 32)]
        if done or hi / lo < 1 + 1e-13:
            break
    return best


def regularize_gauge(raw, grid=16):
    """The smallest gauge above ``raw`` with ``D(t)/t`` nonincreasing.

    ``D(t) = sup_{u >= 1} d(u t)/u`` satisfies ``d <= D <= 2 d``; the sup is
    taken over ``grid`` geometric points per octave of ``u`` and then refined
    around the maximizer until it moves by less than 1e-6 relative.
    """
    raw.check()

    def fn(t):
        t = np.asarray(t, dtype=float)
        flat = [_sup_ratio(raw, float(x), grid) for x in t.ravel()]
        return np.asarray(flat).reshape(t.shape)

    D = GaugeFunction(fn, name=f"regularized({raw.name})", allow_positive_origin=True)
    d = raw(PROBE_GRID)
    DD = D(PROBE_GRID)
    if np.any(DD < d * (1 - 1e-12)) or np.any(DD > 2 * d * (1 + 1e-9)):
        raise GaugeError(f"{raw.name}: regularization left the band d <= D <= 2d")
    D.raw = raw
    return D


# --- ergodic checks -------------------------------------------------------


def hill_index(values, k=None):
    """Hill estimate of the tail index of nonnegative samples (inf for light tails).

    Infinite samples (overflowed draws) count as the largest values and drive
    the estimate to 0.
    """
    values = np.asarray(values, dtype=float)
    y = np.sort(values[~np.isnan(values)])[::-1]
    y = y[y > 0]
    if k is None:
        k = int(min(1000, max(10, y.size // 100)))
    if y.size <= k:
        return math.inf
    if not np.isfinite(y[k]):
        return 0.0
    with np.errstate(over="ignore"):
        logs = np.log(y[:k] / y[k])
    s = logs.sum()
    return math.inf if s <= 0 else k / s


@dataclass
class MomentGuard:
    """Empirical integrability diagnostic for the integrand of a check."""

    integrand: str
    hill_index: float
    threshold: float
    running_mean_slope: float
    tripped: bool


@dataclass
class GaugeReport:
    check: str
    checkpoints: np.ndarray
    series: np.ndarray
    stderr: np.ndarray
    terminal: float
    slope: float
    passed: bool
    guard: MomentGuard
    flags: list = field(default_factory=list)
    extra: dict = field(default_factory=dict)

    @property
    def verdict(self):
        if self.guard is not None and self.guard.tripped:
            return "flagged"
        return "pass" if self.passed else "fail"


def default_checkpoints(n, count=40, first=10):
    cp = np.unique(np.geomspace(min(first, n), n, count).round().astype(np.int64))
    return cp[cp >= 1]


def _loglog_slope(cp, series):
    ok = np.isfinite(series) & (series > 0)
    half = cp >= np.sqrt(cp[0] * cp[-1])
    sel = ok & half
    if sel.sum() < 3:
        return math.nan
    return float(np.polyfit(np.log(cp[sel]), np.log(series[sel]), 1)[0])


def _running_mean_sizes(n):
    return np.unique(np.geomspace(min(100, n), n, 12).astype(np.int64))


def _running_mean_slope(sizes, means):
    """Log-log slope of the pooled running mean of the integrand."""
    if np.any(~np.isfinite(means)):
        return math.inf
    if np.any(means <= 0) or len(sizes) < 3:
        return 0.0
    return float(np.polyfit(np.log(sizes), np.log(means), 1)[0])


def _ensemble(f_sampler, n, trials, cp, stat, integrand):
    rows, tops, partial = [], [], []
    sizes = _running_mean_sizes(n)
    for i in range(trials):
        x = np.asarray(sample_path(f_sampler.trial(i), n).symbols, dtype=float)
        with np.errstate(over="ignore", invalid="ignore"):
            S = np.cumsum(x)
        rows.append(stat(S[cp - 1], cp))
        y = integrand(x)
        keep = min(y.size, 5000)
        tops.append(np.partition(y, y.size - keep)[y.size - keep:])
        with np.errstate(over="ignore", invalid="ignore"):
            partial.append(np.cumsum(y)[sizes - 1] / sizes)
    return np.asarray(rows), np.concatenate(tops), (sizes, np.mean(partial, axis=0), n * trials)


def _guard(name, tops, running, threshold):
    sizes, means, total = running
    alpha = hill_index(tops, k=int(min(1000, max(10, total // 100))))
    slope = _running_mean_slope(sizes, means)
    return MomentGuard(name, alpha, threshold, slope, bool(alpha < threshold))


def _summarize(rows):
    with np.errstate(invalid="ignore"):
        mean = rows.mean(axis=0)
        se = rows.std(axis=0, ddof=1) / np.sqrt(rows.shape[0]) if rows.shape[0] > 1 else np.zeros(rows.shape[1])
    return mean, se


def aaronson_check(f_sampler, D, n, trials=10, checkpoints=None, guard_threshold=1.1, tol=0.02):
    """Series ``D(|S_n|)/n`` averaged over ``trials`` independent streams.

    Passes iff the terminal value is below ``tol`` and the log-log slope over
    the second half of the checkpoints is negative (an identically zero series
    also passes).  The moment guard estimates the tail index of ``D(|f|)``
    and trips when it is below ``guard_threshold``; the check still runs.
    """
    cp = default_checkpoints(n) if checkpoints is None else np.asarray(checkpoints)
    rows, tops, running = _ensemble(
        f_sampler, n, trials, cp,
        lambda S, c: np.asarray(D(np.abs(S))) / c,
        lambda x: np.asarray(D(np.abs(x))))
    mean, se = _summarize(rows)
    guard = _guard("D(|f|)", tops, running, guard_threshold)
    slope = _loglog_slope(cp, mean)
    zero = bool(np.all(mean == 0))
    passed = bool(mean[-1] < tol and (zero or slope < 0))
    flags = ["hypothesis violated: moment guard tripped"] if guard.tripped else []
    return GaugeReport("aaronson", cp, mean, se, float(mean[-1]), slope, passed, guard, flags)


def mz_check(p, f_sampler, n, trials=10, checkpoints=None, guard_threshold=1.1, tol=0.02):
    """Series ``|S_n| / n**(1/p)``; passes iff the terminal value is below ``tol``."""
    if not 0 < p < 1:
        raise GaugeError("exponent p must lie in (0, 1)")
    cp = default_checkpoints(n) if checkpoints is None else np.asarray(checkpoints)
    rows, tops, running = _ensemble(
        f_sampler, n, trials, cp,
        lambda S, c: np.abs(S) / np.power(c, 1.0 / p),
        lambda x: np.power(np.abs(x), p))
    mean, se = _summarize(rows)
    guard = _guard("|f|^p", tops, running, guard_threshold)
    passed = bool(mean[-1] < tol)
    flags = ["hypothesis violated: moment guard tripped"] if guard.tripped else []
    return GaugeReport("marcinkiewicz-zygmund", cp, mean, se, float(mean[-1]),
                       _loglog_slope(cp, mean), passed, guard, flags, {"p": p})


def log_check(f_sampler, n, trials=10, checkpoints=None, guard_threshold=1.1, tol=0.01):
    """Series ``|S_n|**(1/n)`` computed as ``exp(ln|S_n| / n)``.

    Checkpoints with ``S_n = 0`` are skipped and counted; if every checkpoint
    is zero the report is degenerate and does not pass.
    """
    cp = default_checkpoints(n) if checkpoints is None else np.asarray(checkpoints)

    def stat(S, c):
        with np.errstate(divide="ignore"):
            v = np.exp(np.log(np.abs(S)) / c)
        return np.where(S == 0, np.nan, v)

    rows, tops, running = _ensemble(
        f_sampler, n, trials, cp, stat,
        lambda x: np.log(np.maximum(np.abs(x), 1.0)))
    zeros = int(np.isnan(rows).sum())
    with np.errstate(invalid="ignore"):
        mean = np.nanmean(np.where(np.isnan(rows), np.nan, rows), axis=0) if zeros < rows.size else np.full(len(cp), np.nan)
        cnt = np.sum(~np.isnan(rows), axis=0)
        sd = np.nanstd(rows, axis=0, ddof=1) if trials > 1 and zeros < rows.size else np.zeros(len(cp))
        se = np.where(cnt > 1, sd / np.sqrt(np.maximum(cnt, 1)), 0.0)
    guard = _guard("ln+|f|", tops, running, guard_threshold)
    flags = ["hypothesis violated: moment guard tripped"] if guard.tripped else []
    degenerate = zeros == rows.size
    if degenerate:
        flags.append("degenerate: S_n = 0 at every checkpoint")
        terminal = math.nan
        passed = False
    else:
        terminal = float(mean[-1])
        passed = bool(abs(terminal - 1.0) < tol)
    if not degenerate and not np.all(np.isfinite(mean)):
        flags.append("non-finite partial sums")
    return GaugeReport("log-integrable", cp, mean, se, terminal, math.nan, passed, guard, flags,
                       {"zero_checkpoints": zeros, "degenerate": degenerate})


@dataclass
class TrivialBoundaryReport:
    xs: np.ndarray
    sups: np.ndarray
    terminal: float
    passed: bool


def trivial_boundary_check(D, xs=None, zs=None, tol=1e-3):
    """``sup_z |D(|x - z|) - D(x)|`` along ``x -> oo``; every horofunction is 0."""
    xs = 4.0 ** np.arange(1, 21) if xs is None else np.asarray(xs, dtype=float)
    zs = np.linspace(-10, 10, 201) if zs is None else np.asarray(zs, dtype=float)
    sups = np.array([np.max(np.abs(np.asarray(D(np.abs(x - zs))) - D(x))) for x in xs])
    return TrivialBoundaryReport(xs, sups, float(sups[-1]), bool(sups[-1] < tol))
