"""Stationary symbol streams that drive the cocycles.

Every stream is generated from a Philox-4x64 counter-based generator keyed by
the seed.  Symbol ``k`` of an iid stream always reads counter block
``k * blocks_per_symbol``, so a path can be sampled from any starting offset
without generating the prefix, and two implementations that follow the same
recipe produce the same bits.

Raw 64-bit words are turned into uniforms on the open interval (0, 1) as
``((w >> 11) + 0.5) * 2**-53`` and then pushed through inverse CDFs.
"""

from dataclasses import dataclass, field
import math

import numpy as np
from scipy import special

KINDS = ("iid", "irrational_rotation", "finite_markov")

# number of uniforms consumed per symbol by each iid distribution
_WIDTH = {
    "constant": 0,
    "categorical": 1,
    "uniform": None,
    "normal": None,
    "symmetric_pareto": 2,
    "exp_cauchy": 1,
}


class DrivingError(ValueError):
    pass


def _uniforms(key, start_block, n_blocks):
    gen = np.random.Philox(key=int(key), counter=int(start_block))
    raw = gen.random_raw(4 * n_blocks).astype(np.uint64)
    return ((raw >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0 ** -53


@dataclass(frozen=True)
class DrivingSystem:
    """The ergodic base: a kind, a 64-bit seed and kind-specific parameters.

    ``stream`` selects one of 2**64 independent streams for the same seed; it
    fills the high word of the Philox key and is how ensembles get distinct
    trajectories.

    ``iid`` takes ``params = {"dist": name, ...}`` with one of the
    distributions ``constant`` (``value``), ``categorical`` (``weights`` and
    optional ``values``), ``uniform`` (``low``, ``high``, ``dim``), ``normal``
    (``mean``, ``std``, ``dim``), ``symmetric_pareto`` (``tail_index``,
    ``scale``) and ``exp_cauchy``.  ``irrational_rotation`` takes ``theta``
    in (0, 1) and ``x0`` in [0, 1).  ``finite_markov`` takes a row-stochastic
    ``matrix`` and either ``initial`` (a distribution) or ``start`` (a state).
    """

    kind: str
    seed: int = 0
    params: dict = field(default_factory=dict)
    stream: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise DrivingError(f"unknown driving kind {self.kind!r}")
        if not 0 <= int(self.seed) < 2 ** 64:
            raise DrivingError("seed must be a 64-bit unsigned integer")
        if not 0 <= int(self.stream) < 2 ** 64:
            raise DrivingError("stream must be a 64-bit unsigned integer")
        getattr(self, "_check_" + self.kind)()

    def _check_iid(self):
        dist = self.params.get("dist")
        if dist not in _WIDTH:
            raise DrivingError(f"unknown iid distribution {dist!r}")
        if dist == "constant" and "value" not in self.params:
            raise DrivingError("constant distribution needs 'value'")
        if dist == "categorical":
            w = np.asarray(self.params.get("weights", ()), dtype=float)
            if w.ndim != 1 or w.size == 0 or np.any(w < 0):
                raise DrivingError("categorical weights must be a nonempty nonnegative list")
            if abs(w.sum() - 1.0) > 1e-12:
                raise DrivingError("categorical weights must sum to 1")
            values = self.params.get("values")
            if values is not None and len(values) != w.size:
                raise DrivingError("categorical values and weights differ in length")
        if dist == "uniform" and not self.params.get("high", 1.0) > self.params.get("low", 0.0):
            raise DrivingError("uniform distribution needs low < high")
        if dist == "normal" and not self.params.get("std", 1.0) > 0:
            raise DrivingError("normal distribution needs std > 0")
        if dist == "symmetric_pareto" and not self.params.get("tail_index", 0) > 0:
            raise DrivingError("symmetric_pareto needs tail_index > 0")

    def _check_irrational_rotation(self):
        theta = self.params.get("theta")
        if theta is None or not 0 < theta < 1:
            raise DrivingError("rotation angle theta must lie in (0, 1)")
        if not 0 <= self.params.get("x0", 0.0) < 1:
            raise DrivingError("rotation start x0 must lie in [0, 1)")

    def _check_finite_markov(self):
        P = np.asarray(self.params.get("matrix", ()), dtype=float)
        if P.ndim != 2 or P.shape[0] != P.shape[1] or P.shape[0] == 0:
            raise DrivingError("markov matrix must be square and nonempty")
        if np.any(P < 0) or np.any(np.abs(P.sum(axis=1) - 1.0) > 1e-12):
            raise DrivingError("markov transition rows must be nonnegative and sum to 1")
        if "initial" in self.params:
            p0 = np.asarray(self.params["initial"], dtype=float)
            if p0.shape != (P.shape[0],) or np.any(p0 < 0) or abs(p0.sum() - 1) > 1e-12:
                raise DrivingError("markov initial distribution is invalid")
        elif not 0 <= int(self.params.get("start", 0)) < P.shape[0]:
            raise DrivingError("markov start state out of range")

    @property
    def width(self):
        """Uniforms consumed per iid symbol."""
        dist = self.params.get("dist")
        w = _WIDTH[dist]
        if w is None:
            w = int(self.params.get("dim", 1))
        return w

    @property
    def key(self):
        return int(self.seed) | (int(self.stream) << 64)

    def with_seed(self, seed):
        return DrivingSystem(self.kind, int(seed) % 2 ** 64, dict(self.params), self.stream)

    def trial(self, i):
        """The system driving ensemble member ``i``."""
        return DrivingSystem(self.kind, self.seed, dict(self.params), int(i))


@dataclass(frozen=True)
class SymbolPath:
    """A finite window ``symbols[start:start + n]`` of the driving stream."""

    symbols: np.ndarray
    start: int = 0
    system: DrivingSystem = None

    def __len__(self):
        return len(self.symbols)

    def __getitem__(self, i):
        return self.symbols[i]

    def __iter__(self):
        return iter(self.symbols)

    @property
    def length(self):
        return len(self.symbols)


def _iid_symbols(system, start, n):
    p = system.params
    dist = p["dist"]
    if dist == "constant":
        value = np.asarray(p["value"], dtype=float)
        return np.broadcast_to(value, (n,) + value.shape).copy()
    width = system.width
    blocks = max(1, math.ceil(width / 4))
    u = _uniforms(system.key, start * blocks, n * blocks).reshape(n, 4 * blocks)[:, :width]
    if dist == "categorical":
        cdf = np.cumsum(np.asarray(p["weights"], dtype=float))
        labels = np.minimum(np.searchsorted(cdf, u[:, 0], side="right"), len(cdf) - 1)
        if p.get("values") is None:
            return labels.astype(np.int64)
        return np.asarray(p["values"], dtype=float)[labels]
    if dist == "uniform":
        low, high = p.get("low", 0.0), p.get("high", 1.0)
        out = low + (high - low) * u
    elif dist == "normal":
        out = p.get("mean", 0.0) + p.get("std", 1.0) * special.ndtri(u)
    elif dist == "symmetric_pareto":
        sign = np.where(u[:, 0] < 0.5, -1.0, 1.0)
        return sign * p.get("scale", 1.0) * u[:, 1] ** (-1.0 / p["tail_index"])
    else:  # exp_cauchy
        with np.errstate(over="ignore"):
            return np.exp(np.tan(np.pi * (u[:, 0] - 0.5)))
    return out[:, 0] if width == 1 and "dim" not in p else out


def _markov_symbols(system, n_total):
    P = np.asarray(system.params["matrix"], dtype=float)
    cdf = np.cumsum(P, axis=1)
    u = _uniforms(system.key, 0, n_total)[::4]
    if "initial" in system.params:
        p0 = np.cumsum(np.asarray(system.params["initial"], dtype=float))
        state = min(int(np.searchsorted(p0, u[0], side="right")), len(p0) - 1)
    else:
        state = int(system.params.get("start", 0))
    out = np.empty(n_total, dtype=np.int64)
    for i in range(n_total):
        out[i] = state
        if i + 1 < n_total:
            state = min(int(np.searchsorted(cdf[state], u[i + 1], side="right")), len(cdf) - 1)
    return out


def sample_path(system, n, start=0):
    """Return symbols ``start .. start + n - 1`` of the stream of ``system``.

    ``sample_path(s, n, start=k)`` equals ``shift(sample_path(s, n + k), k)``.
    """
    if n < 1:
        raise DrivingError("path length must be at least 1")
    if start < 0:
        raise DrivingError("start offset must be nonnegative")
    if system.kind == "iid":
        symbols = _iid_symbols(system, start, n)
    elif system.kind == "irrational_rotation":
        theta = system.params["theta"]
        x0 = system.params.get("x0", 0.0)
        k = np.arange(start, start + n, dtype=np.float64)
        symbols = np.mod(x0 + k * theta, 1.0)
    else:
        symbols = _markov_symbols(system, start + n)[start:]
    return SymbolPath(symbols, start, system)


def shift(path, k):
    """Drop the first ``k`` symbols: the window seen from ``T^k omega``."""
    if k < 0 or k > len(path):
        raise DrivingError(f"cannot shift a path of length {len(path)} by {k}")
    return SymbolPath(path.symbols[k:], path.start + k, path.system)
