"""Trajectories ``Z_n = g_1 g_2 ... g_n``, scalar cocycles, drift and record times."""

from contextlib import nullcontext
from dataclasses import dataclass, field

import mpmath
import numpy as np

from .driving import SymbolPath, shift
from .gauge import default_checkpoints


class CocycleError(ValueError):
    pass


def _precision(dps):
    return mpmath.workdps(dps) if dps else nullcontext()


def _steps(model, path, step_rule):
    if step_rule is None:
        return list(path.symbols) if model.high_precision else path.symbols
    out = []
    for i, s in enumerate(path.symbols):
        try:
            out.append(model.element(step_rule(s)))
        except Exception as exc:
            raise CocycleError(f"step rule failed at index {i} (symbol {s!r}): {exc}") from exc
    return out


def orbit_stride(n, dense=10 ** 5, sparse=10):
    """Indices at which orbit points are retained for record-time scans."""
    return np.concatenate([np.arange(0, min(n, dense) + 1), np.arange(dense + sparse, n + 1, sparse)])


@dataclass
class Trajectory:
    """A composed trajectory with its orbit distances ``|Z_k|`` for ``k = 0..n``.

    Elements ``Z_k`` are kept at ``checkpoints`` (always including ``n``) and
    orbit points ``Z_k x0`` at ``orbit_index`` when the orbit was retained.
    ``dps`` is the mpmath precision used for high-precision models.
    """

    model: object
    path: SymbolPath
    step_rule: object
    distances: np.ndarray
    checkpoints: np.ndarray
    elements: dict
    dps: int = None
    orbit_index: np.ndarray = None
    orbit: list = None

    def __len__(self):
        return len(self.distances) - 1

    @property
    def n(self):
        return len(self.distances) - 1

    def precision(self):
        return _precision(self.dps)

    def element(self, k):
        if k not in self.elements:
            raise CocycleError(f"Z_{k} was not retained; retained depths are {sorted(self.elements)[:8]}...")
        return self.elements[k]

    def orbit_point(self, k=None):
        k = self.n if k is None else k
        with self.precision():
            return self.model.orbit_point(self.element(k))

    def terminal(self):
        return self.elements[self.n]


def compose_trajectory(model, path, step_rule=None, checkpoints=None, keep_orbit=False, dps=None):
    """Compose ``Z_k = Z_{k-1} g_k`` along ``path`` with ``g_k = step_rule(symbol_k)``.

    ``step_rule=None`` uses the symbols themselves as isometries.  For
    high-precision models the working precision is sized from a double-precision
    pass over the steps unless ``dps`` is given.
    """
    n = len(path)
    if n < 1:
        raise CocycleError("path must have at least one symbol")
    cp = default_checkpoints(n) if checkpoints is None else np.asarray(checkpoints, dtype=int)
    cp = np.unique(np.concatenate([cp[(cp >= 1) & (cp <= n)], [n]])).astype(int)
    orbit_index = orbit_stride(n) if keep_orbit else None
    keep = set(cp.tolist()) | (set(orbit_index.tolist()) if keep_orbit else set())
    # steps are built at the default precision: their entries are exact binary
    # numbers, so composing them at a higher precision loses nothing
    steps = _steps(model, path, step_rule)
    if model.high_precision and dps is None:
        dps = model.precision_for(steps)
    with _precision(dps if model.high_precision else None):
        sizes, saved = model.fold(steps, keep)
        orbit = [model.orbit_point(saved[k]) for k in orbit_index] if keep_orbit else None
    if orbit is not None and not model.high_precision and model.kind != "free_group_cayley":
        orbit = np.asarray(orbit, dtype=float)
    elements = {int(k): saved[int(k)] for k in cp}
    return Trajectory(model, path, step_rule, np.asarray(sizes, dtype=float), cp, elements,
                      dps if model.high_precision else None, orbit_index, orbit)


@dataclass
class ScalarCocycle:
    """Values ``S_1..S_n`` of a scalar cocycle along one path.

    ``row(k)`` returns ``S_j(T^k omega)`` for ``j = 1..n-k`` when the cocycle
    can be re-evaluated on shifted paths; ``row`` is None otherwise.
    """

    values: np.ndarray
    row: object = None
    subadditive: bool = False
    name: str = ""

    def __len__(self):
        return len(self.values)

    def shifted(self, k):
        if k == 0:
            return self.values
        if self.row is None:
            raise CocycleError("this cocycle cannot be evaluated on shifted paths")
        return np.asarray(self.row(k), dtype=float)

    @classmethod
    def from_values(cls, values, subadditive=False, name="values"):
        return cls(np.asarray(values, dtype=float), None, subadditive, name)

    @classmethod
    def from_increments(cls, f, name="birkhoff"):
        """The additive cocycle ``S_n = f_1 + ... + f_n``."""
        f = np.asarray(f, dtype=float)
        S = np.concatenate([[0.0], np.cumsum(f)])
        return cls(S[1:], lambda k: S[k + 1:] - S[k], True, name)

    @classmethod
    def from_function(cls, fn, path, subadditive=False, name="function"):
        """``fn(path)`` returns ``S_1..S_len(path)``; shifts re-evaluate it on ``T^k`` paths."""
        return cls(np.asarray(fn(path), dtype=float), lambda k: fn(shift(path, k)), subadditive, name)

    @classmethod
    def from_sequence(cls, fn, n, name="sequence"):
        """A cocycle that does not depend on omega: ``S_j = fn(j)``."""
        S = np.asarray([fn(j) for j in range(1, n + 1)], dtype=float)
        return cls(S, lambda k: S[:n - k], False, name)

    @classmethod
    def from_trajectory(cls, traj):
        """``S_n = |Z_n|``, with ``S_j(T^k omega) = d(Z_k x0, Z_{k+j} x0)``."""
        model = traj.model

        def row(k):
            # reuse stored orbit points only where refolding would redo costly mp products
            if (model.high_precision and traj.orbit is not None
                    and k <= traj.orbit_index[-1] and traj.orbit_index[k] == k):
                idx = traj.orbit_index
                j = np.searchsorted(idx, k)
                with traj.precision():
                    d = model.distances_from(traj.orbit[j], traj.orbit[j + 1:])
                out = np.full(traj.n - k, np.nan)
                out[idx[j + 1:] - k - 1] = d
                return out
            sub = compose_trajectory(model, shift(traj.path, k), traj.step_rule,
                                     checkpoints=[traj.n - k], dps=traj.dps)
            return sub.distances[1:]

        return cls(traj.distances[1:].copy(), row, True, "orbit distance")


def _values(member, N=None):
    if isinstance(member, Trajectory):
        v = member.distances[1:]
    elif isinstance(member, ScalarCocycle):
        v = member.values
    else:
        v = np.asarray(member, dtype=float)
    if N is None:
        N = len(v)
    if len(v) < N:
        raise CocycleError(f"ensemble member has length {len(v)} < N = {N}")
    return np.asarray(v[:N], dtype=float)


@dataclass
class DriftEstimate:
    """``alpha = min_n mean(S_n)/n`` over depths ``n <= N``, with the terminal slope."""

    alpha: float
    depth: int
    trials: int
    averages: np.ndarray
    stderrs: np.ndarray
    argmin: int
    tail: float
    tail_stderr: float
    tails: np.ndarray = field(default=None, repr=False)

    @property
    def alpha_stderr(self):
        return float(self.stderrs[self.argmin - 1] / self.argmin)

    def kingman_gap(self):
        """``|tail - alpha|`` in units of the tail standard error."""
        se = self.tail_stderr
        gap = abs(self.tail - self.alpha)
        return 0.0 if gap == 0 else (np.inf if se == 0 else gap / se)

    def rows(self):
        n = np.arange(1, self.depth + 1)
        return np.column_stack([n, self.averages, self.stderrs])


def estimate_drift(ensemble, N=None, start=1):
    """Estimate the drift of an ensemble of trajectories or scalar cocycles.

    ``alpha`` is the minimum of ``average/n`` over ``start <= n <= N``;
    ``start = 1`` is the plain infimum.
    """
    ensemble = list(ensemble)
    if not ensemble:
        raise CocycleError("empty ensemble")
    if N is None:
        N = min(len(_values(m)) for m in ensemble)
    if N < 1:
        raise CocycleError("depth N must be at least 1")
    V = np.vstack([_values(m, N) for m in ensemble])
    trials = V.shape[0]
    avg = V.mean(axis=0)
    se = V.std(axis=0, ddof=1) / np.sqrt(trials) if trials > 1 else np.zeros(N)
    n = np.arange(1, N + 1)
    if not 1 <= start <= N:
        raise CocycleError(f"start must lie in [1, {N}]")
    ratios = avg / n
    i = start - 1 + int(np.argmin(ratios[start - 1:]))
    tails = V[:, -1] / N
    return DriftEstimate(float(ratios[i]), N, trials, avg, se, i + 1,
                         float(tails.mean()), float(se[-1] / N), tails)


@dataclass(frozen=True)
class RecordTimeParams:
    epsilon: float
    K: int = 1
    horizon: int = None

    def __post_init__(self):
        if not self.epsilon > 0:
            raise CocycleError("epsilon must be positive")
        if self.K < 1:
            raise CocycleError("K must be at least 1")


def record_times(S, alpha, params):
    """All ``n <= horizon`` with ``S_n - S_{n-k}(T^k omega) >= (alpha - eps) k`` for ``K <= k <= n``.

    With ``k = n`` the shifted term is ``S_0 = 0``.  Shifted values that
    were not retained (sparse orbit storage) are skipped.
    """
    N = len(S) if params.horizon is None else int(params.horizon)
    if N > len(S):
        raise CocycleError(f"cocycle has length {len(S)} < horizon {N}")
    K = params.K
    slope = alpha - params.epsilon
    # best[n] = min over k in [K, n] of S_n - S_{n-k}(T^k) - slope*k
    best = np.full(N + 1, np.inf)
    S_full = np.concatenate([[0.0], np.asarray(S.values[:N], dtype=float)])
    n_all = np.arange(N + 1)
    ok = n_all >= K
    best[ok] = S_full[ok] - slope * n_all[ok]  # k = n
    for k in range(K, N):
        row = S.shifted(k)[:N - k]  # S_j(T^k) for j = 1..N-k, i.e. n = k + j
        n = np.arange(k + 1, N + 1)
        margin = S_full[n] - row - slope * k
        good = ~np.isnan(margin)
        best[n[good]] = np.minimum(best[n[good]], margin[good])
    return [int(n) for n in range(K, N + 1) if best[n] >= 0]


@dataclass
class SubadditivityReport:
    max_violation: float
    worst: tuple
    pairs: int
    passed: bool


def check_subadditivity(S, pairs=100, seed=0, tol=1e-9):
    """Sample ``(n, m)`` and measure ``S_{n+m} - S_m - S_n(T^m omega)``."""
    N = len(S)
    if N < 2:
        raise CocycleError("need at least two values")
    rng = np.random.default_rng(seed)
    worst, where = -np.inf, None
    for _ in range(pairs):
        m = int(rng.integers(1, N))
        n = int(rng.integers(1, N - m + 1))
        row = S.shifted(m)
        if np.isnan(row[n - 1]):
            continue
        v = S.values[n + m - 1] - S.values[m - 1] - row[n - 1]
        if v > worst:
            worst, where = float(v), (n, m)
    return SubadditivityReport(worst, where, pairs, worst <= tol)
