"""Random walks ``Z_n = g_0 g_1 ... g_{n-1}`` on groups with word metrics."""

from dataclasses import dataclass, field
import itertools
import math

import numpy as np

from .cocycle import DriftEstimate, estimate_drift
from .driving import DrivingSystem, sample_path
from .groups import FreeGroup, Heisenberg, IntegerLattice
from .spaces.tree import multiply


SAMPLE_HEAD = 32


class WalkError(ValueError):
    pass


@dataclass
class StepDistribution:
    """A finitely supported probability ``nu`` on the group."""

    support: list
    weights: np.ndarray
    nondegenerate: bool = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 1 or len(w) != len(self.support) or len(w) == 0:
            raise WalkError("support and weights must be nonempty lists of equal length")
        if np.any(w < 0) or abs(w.sum() - 1) > 1e-12:
            raise WalkError("weights must be nonnegative and sum to 1")
        self.weights = w

    @classmethod
    def uniform(cls, support):
        return cls(list(support), np.full(len(support), 1 / len(support)))

    def validate(self, group):
        self.support = [group.element(g) for g in self.support]
        if self.nondegenerate is None:
            self.nondegenerate = generates(group, [g for g, w in zip(self.support, self.weights) if w > 0])
        return self

    def is_symmetric(self, group):
        table = dict(zip(self.support, self.weights))
        return all(abs(table.get(group.inverse(g), 0.0) - w) <= 1e-12 for g, w in table.items())

    def driving(self, seed=0):
        return DrivingSystem("iid", seed, {"dist": "categorical", "weights": self.weights.tolist()})


def generates(group, elements):
    """Whether ``elements`` generate the group (checked on the standard generators)."""
    if not elements:
        return False
    reach = {group.identity()}
    frontier = [group.identity()]
    gens = set(elements) | {group.inverse(g) for g in elements}
    targets = set(group.generators())
    radius = 6
    for _ in range(radius):
        nxt = []
        for g in frontier:
            for s in gens:
                h = group.multiply(g, s)
                if h not in reach:
                    reach.add(h)
                    nxt.append(h)
        frontier = nxt
        if targets <= reach:
            return True
    return targets <= reach


@dataclass
class Walk:
    """One sample path: ``lengths[k] = |Z_k|`` for ``k = 0..n`` and the final element.

    For the Heisenberg group ``lengths`` is the midpoint of the word-length
    bounds and ``gaps`` holds ``upper - lower``.
    """

    lengths: np.ndarray
    final: tuple
    gaps: np.ndarray = None
    prefixes: np.ndarray = field(default=None, repr=False)
    samples: list = field(default=None, repr=False)
    pushed: np.ndarray = field(default=None, repr=False)


def _labels(nu, n, seed, trial):
    return np.asarray(sample_path(nu.driving(seed).trial(trial), n).symbols, dtype=np.int64)


def _code(word, depth, base):
    c = 0
    for x in word[:depth]:
        c = c * base + (2 * (x - 1) if x > 0 else 2 * (-x - 1) + 1)
    return c


def _free_walk(group, nu, labels, depth=0, keep_every=0, push=False, offset=0):
    steps = list(nu.support)
    base = 2 * group.k
    stack = []
    n = len(labels)
    lengths = np.zeros(n + 1, dtype=np.int64)
    code = np.full(n + 1, -1, dtype=np.int64) if depth else None
    pushed = np.full((n + 1, len(steps)), -1, dtype=np.int64) if push else None
    samples = [] if keep_every else None
    reach = max(len(g) for g in steps)
    # Phi_x(y) = |y| - 2 cp(x, y) only reads the first |y| letters of x, so a
    # bounded head of each retained sample is exact for fk_check
    head_len = max(SAMPLE_HEAD, depth + reach)
    for k in range(n + 1):
        if k:
            for x in steps[labels[k - 1]]:
                if stack and stack[-1] == -x:
                    stack.pop()
                else:
                    stack.append(x)
            lengths[k] = len(stack)
        if depth and len(stack) >= depth:
            code[k] = _code(stack, depth, base)
        if push:
            head = tuple(stack[:depth + reach])
            for j, g in enumerate(steps):
                y = multiply(g, head)
                if len(y) >= depth:
                    pushed[k, j] = _code(y, depth, base)
        if keep_every and k % keep_every == offset % keep_every:
            samples.append(tuple(stack[:head_len]) if keep_every > 1 else tuple(stack))
    return Walk(lengths.astype(float), tuple(stack), None, code, samples, pushed)


def sample_walk(group, nu, n, seed=0, trial=0, depth=0, keep_samples=False):
    """Sample ``Z_1..Z_n`` with iid steps from ``nu`` on stream ``trial`` of ``seed``.

    On the free group ``depth > 0`` also records the depth-``depth`` prefix
    code of every ``Z_k`` (``-1`` when ``|Z_k| < depth``).
    """
    nu.validate(group)
    labels = _labels(nu, n, seed, trial)
    if isinstance(group, FreeGroup):
        return _free_walk(group, nu, labels, depth, 1 if keep_samples else 0)
    steps = np.array(nu.support, dtype=np.int64)[labels]
    if isinstance(group, IntegerLattice):
        Z = np.vstack([np.zeros((1, group.d), dtype=np.int64), np.cumsum(steps, axis=0)])
        samples = [tuple(z) for z in Z.tolist()] if keep_samples else None
        return Walk(np.abs(Z).sum(axis=1).astype(float), tuple(Z[-1].tolist()), None, None, samples)
    if isinstance(group, Heisenberg):
        a = np.concatenate([[0], np.cumsum(steps[:, 0])])
        b = np.concatenate([[0], np.cumsum(steps[:, 1])])
        c = np.concatenate([[0], np.cumsum(steps[:, 2] + a[:-1] * steps[:, 1])])
        lo, hi = group.length_bounds(a, b, c)
        lo, hi = lo.astype(float), hi.astype(float)
        table = group.table
        for k in np.flatnonzero(lo <= group.exact_radius):
            z = (int(a[k]), int(b[k]), int(c[k]))
            if z in table:
                lo[k] = hi[k] = table[z]
        samples = list(zip(a.tolist(), b.tolist(), c.tolist())) if keep_samples else None
        return Walk((lo + hi) / 2, (int(a[-1]), int(b[-1]), int(c[-1])), hi - lo, None, samples)
    raise WalkError(f"unsupported group {group!r}")


@dataclass
class WalkDrift:
    """Drift estimates from an ensemble of walks.

    ``value`` is the mean of ``|Z_n|/n``.  When some coordinate of the walk is
    centered, ``E|Z_n| = l n + c sqrt(n) + o(sqrt(n))`` and ``value`` carries a
    bias of order ``n^-1/2``, as large as its standard error at any ``n``.
    ``corrected`` combines depths ``m = n/2`` and ``n`` per walk as
    ``(|Z_n| - sqrt(2) |Z_m|) / ((2 - sqrt(2)) m)``, which cancels the
    ``sqrt(n)`` term at the cost of a larger standard error.
    """

    estimate: DriftEstimate
    bound_gap: float = 0.0
    corrected: float = math.nan
    corrected_stderr: float = math.nan

    @property
    def value(self):
        return self.estimate.tail

    @property
    def stderr(self):
        """Standard error of the terminal slope, widened by the word-length bound gap."""
        return math.hypot(self.estimate.tail_stderr, self.bound_gap)


def drift(group, nu, n, trials=10, seed=0):
    """``l(nu)`` estimated as the ensemble mean of ``|Z_n|/n``."""
    walks = [sample_walk(group, nu, n, seed, i) for i in range(trials)]
    est = estimate_drift([w.lengths[1:] for w in walks], n)
    gap = 0.0
    if walks[0].gaps is not None:
        gap = float(np.mean([w.gaps[-1] for w in walks]) / (2 * n))
    m = n // 2
    corr, corr_se = math.nan, math.nan
    if m >= 1:
        r2 = math.sqrt(2)
        v = np.array([(w.lengths[2 * m] - r2 * w.lengths[m]) / ((2 - r2) * m) for w in walks])
        corr = float(v.mean())
        corr_se = float(v.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        # the word-length bracket enters the combination with weight (1 + sqrt 2)/(2 - sqrt 2)
        corr_se = math.hypot(corr_se, gap * (1 + r2) / (2 - r2))
    return WalkDrift(est, gap, corr, corr_se)


@dataclass
class EmpiricalBoundaryMeasure:
    """Cesaro average over ``i < n`` of the laws of ``Z_i`` read on the boundary chart.

    ``cylinders`` maps a depth-``depth`` prefix to its probability among the
    samples long enough to have one (free group), or a sign pattern to its
    probability among samples with no zero coordinate (lattice).
    """

    group: object
    depth: int
    cylinders: dict
    count: int
    total: int
    residual: float
    samples: list = field(default=None, repr=False)

    def mass(self, prefix):
        return self.cylinders.get(tuple(prefix), 0.0)


def _decode(c, depth, base):
    out = []
    for _ in range(depth):
        c, r = divmod(c, base)
        out.append(r // 2 + 1 if r % 2 == 0 else -(r // 2 + 1))
    return tuple(reversed(out))


def _signed_permutations(k):
    for perm in itertools.permutations(range(1, k + 1)):
        for signs in itertools.product((1, -1), repeat=k):
            yield {i + 1: signs[i] * perm[i] for i in range(k)}


def _relabel(word, sigma):
    return tuple(sigma[abs(x)] * (1 if x > 0 else -1) for x in word)


def symmetries(group, nu):
    """Signed permutations of the letters that preserve ``nu`` (only the identity when ``k > 4``)."""
    if group.k > 4:
        return [{i: i for i in range(1, group.k + 1)}]
    table = dict(zip(nu.support, nu.weights))
    out = []
    for sigma in _signed_permutations(group.k):
        if all(abs(table.get(_relabel(g, sigma), 0.0) - w) <= 1e-12 for g, w in table.items()):
            out.append(sigma)
    return out


def _symmetrize(v, sigmas, depth, base):
    words = [_decode(c, depth, base) for c in range(len(v))]
    out = np.zeros(len(v))
    for sigma in sigmas:
        out += v[[_code(_relabel(w, sigma), depth, base) for w in words]]
    return out / len(sigmas)


def empirical_stationary_measure(group, nu, n, trials=10, seed=0, depth=4, pool=50000):
    """Cesaro averages of the laws of ``Z_0..Z_{n-1}`` over ``trials`` walks.

    On the free group ``cylinders`` holds the depth-``depth`` cylinder
    probabilities and ``residual`` is ``max_C |mu(C) - sum_g nu(g) mu(g^-1 C)|``
    with unnormalized masses (shorter words lie in no cylinder).  Cylinder
    masses are averaged over the letter symmetries that preserve ``nu``, which
    leaves their expectations unchanged and removes the noise of the early
    letters each walk freezes.  The expected residual is at most ``1/n``.
    ``samples`` keeps about ``pool`` of the visited elements for
    :func:`fk_check`, each cut to its first ``SAMPLE_HEAD`` letters (enough
    to evaluate ``Phi_x(g^-1)`` exactly for steps no longer than that).
    """
    nu.validate(group)
    if isinstance(group, FreeGroup):
        base = 2 * group.k
        cells = base ** depth
        keep = max(1, (n * trials) // pool)
        raw = np.zeros(cells)
        pushed = np.zeros(cells)
        samples = []
        for i in range(trials):
            w = _free_walk(group, nu, _labels(nu, n, seed, i), depth, keep, push=True, offset=i)
            c = w.prefixes[:n]
            raw += np.bincount(c[c >= 0], minlength=cells)
            for j, wgt in enumerate(nu.weights):
                pc = w.pushed[:n, j]
                pushed += wgt * np.bincount(pc[pc >= 0], minlength=cells)
            samples.extend(x for k, x in zip(range(i % keep, n + 1, keep), w.samples) if k < n)
        total = n * trials
        raw, pushed = raw / total, pushed / total
        sigmas = symmetries(group, nu)
        raw = _symmetrize(raw, sigmas, depth, base)
        residual = float(np.max(np.abs(raw - _symmetrize(pushed, sigmas, depth, base))))
        mass = raw.sum()
        probs = raw / mass if mass > 0 else raw
        cyl = {_decode(int(c), depth, base): float(probs[c]) for c in np.flatnonzero(probs)}
        return EmpiricalBoundaryMeasure(group, depth, cyl, int(round(mass * total)), total, residual, samples)
    if isinstance(group, IntegerLattice):
        samples, signs = [], []
        for i in range(trials):
            w = sample_walk(group, nu, n, seed, i, keep_samples=True)
            samples.extend(w.samples[:n])
        S = np.array(samples, dtype=np.int64).reshape(-1, group.d)
        ok = np.all(S != 0, axis=1)
        pats, counts = np.unique(np.sign(S[ok]), axis=0, return_counts=True)
        cyl = {tuple(int(v) for v in p): c / max(ok.sum(), 1) for p, c in zip(pats, counts)}
        return EmpiricalBoundaryMeasure(group, 1, cyl, int(ok.sum()), len(S), math.nan, samples)
    raise WalkError(f"no boundary chart is shipped for {group.kind}")


@dataclass
class FKReport:
    """Drift against ``int h(g^-1) dmu(h) dnu(g)`` sampled from the Cesaro measure."""

    drift: float
    drift_stderr: float
    rhs: float
    rhs_stderr: float
    samples: int
    passed: bool

    @property
    def difference(self):
        return abs(self.drift - self.rhs)


def fk_check(group, nu, measure, walk_drift, samples=10 ** 4, seed=0):
    """Estimate the right side by sampling ``h ~ mu`` and ``g ~ nu`` and averaging ``h(g^-1)``.

    A sample ``x`` of the Cesaro measure stands for the function
    ``Phi_x(z) = d(x, z) - |x|``; on the tree it equals the Busemann function
    of every end through ``x`` once ``|x| > |g|``.
    """
    if measure.samples is None:
        raise WalkError("the measure carries no samples")
    nu.validate(group)
    rng = np.random.default_rng(seed)
    pool = measure.samples
    xi = rng.integers(0, len(pool), samples)
    gi = rng.choice(len(nu.support), size=samples, p=nu.weights)
    vals = np.empty(samples)
    for r, (i, j) in enumerate(zip(xi, gi)):
        x, g = pool[i], nu.support[j]
        vals[r] = group.distance(x, group.inverse(g)) - group.word_length(x)
    rhs = float(vals.mean())
    rhs_se = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    d, d_se = walk_drift.value, walk_drift.stderr
    sigma = math.hypot(rhs_se, d_se)
    passed = abs(d - rhs) <= max(3 * sigma, 1e-12)
    return FKReport(d, d_se, rhs, rhs_se, samples, bool(passed))


@dataclass
class Character:
    """A homomorphism ``T(g) = <coeffs, ab(g)>`` through the abelianization."""

    group: object
    coeffs: tuple

    def __call__(self, g):
        return float(np.dot(self.coeffs, self.group.abelianization(g)))

    @property
    def lipschitz(self):
        return float(max(abs(c) for c in self.coeffs))


def _liouville(group):
    if isinstance(group, FreeGroup):
        raise WalkError("the free group is not Liouville: there exist nonconstant bounded "
                        "nu-harmonic functions, so the drift is not a character value")


def character_drift(group, nu):
    """The 1-Lipschitz character maximizing ``int T dnu`` and that maximum.

    The extreme 1-Lipschitz characters are the sign patterns on the
    abelianization coordinates, so the optimum takes ``sign`` of the mean
    abelianized step in each coordinate.
    """
    _liouville(group)
    nu.validate(group)
    m = sum(w * np.asarray(group.abelianization(g), dtype=float) for g, w in zip(nu.support, nu.weights))
    coeffs = tuple(1.0 if v >= 0 else -1.0 for v in m)
    T = Character(group, coeffs)
    return T, float(sum(w * T(g) for g, w in zip(nu.support, nu.weights)))


@dataclass
class CharacterReport:
    character: Character
    integral: float
    drift: float
    stderr: float
    passed: bool


def character_check(group, nu, n, trials=10, seed=0):
    """Compare ``int T dnu`` with the bias-corrected drift within three standard errors."""
    T, value = character_drift(group, nu)
    wd = drift(group, nu, n, trials, seed)
    se = wd.corrected_stderr
    ok = abs(wd.corrected - value) <= max(3 * se, 1e-12)
    return CharacterReport(T, value, wd.corrected, se, bool(ok))


def harmonicity_residual(group, nu, f, samples):
    """``max_g |f(g) - sum_h nu(h) f(g h)|`` over the sampled ``g``."""
    nu.validate(group)
    worst = 0.0
    for g in samples:
        g = group.element(g)
        mean = sum(w * f(group.multiply(g, h)) for h, w in zip(nu.support, nu.weights))
        worst = max(worst, abs(f(g) - mean))
    return worst


def first_letter_probability(letter=1, k=2):
    """For simple random walk on the free group: probability of converging to an end starting with ``letter``.

    From a word of length ``m`` the walk ever reaches the identity with
    probability ``(2k - 1)^-m``; from the identity each first letter is
    equally likely.
    """
    q = 1 / (2 * k - 1)
    p0 = 1 / (2 * k)

    def f(g):
        m = len(g)
        if m and g[0] == letter:
            return 1 - (1 - p0) * q ** m
        return p0 * q ** m

    return f


def random_elements(group, count, seed=0, max_len=12):
    """Random products of up to ``max_len`` generators."""
    rng = np.random.default_rng(seed)
    gens = group.generators()
    out = []
    for _ in range(count):
        g = group.identity()
        for i in rng.integers(0, len(gens), rng.integers(0, max_len + 1)):
            g = group.multiply(g, gens[i])
        out.append(g)
    return out

