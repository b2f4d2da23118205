"""Matrix cocycles: Cartan decompositions, Lyapunov spectra, flags and the entry bounds.

The product along a path is ``A^(n) = A(T^{n-1} w) ... A(w)``; the step applied
first is the rightmost.  On the positive-definite cone the isometry attached
to a symbol is the transpose ``g = A^T``, so that ``Z_n = (A^(n))^T`` and the
orbit point ``Z_n Z_n^T`` has eigenvalues ``exp(2 n mu_i)`` asymptotically.
"""

from dataclasses import dataclass, field
import math
import warnings

import mpmath
import numpy as np
from scipy import linalg

from .cocycle import compose_trajectory
from .driving import SymbolPath
from .gauge import default_checkpoints, hill_index
from .spaces import PosDefCone
from .spaces import _mp


class OseledetsError(ValueError):
    pass


class MomentWarning(UserWarning):
    pass


@dataclass
class MatrixCocycle:
    """A cocycle ``symbol -> A`` of invertible ``d x d`` real matrices.

    ``moment_bound`` caps the empirical mean of ``max(ln||A||, ln||A^-1||)``
    before a :class:`MomentWarning` is emitted.
    """

    d: int
    step: object
    name: str = "cocycle"
    moment_bound: float = None

    def matrix(self, symbol):
        A = np.asarray(self.step(symbol), dtype=float)
        if A.shape != (self.d, self.d):
            raise OseledetsError(f"step matrix has shape {A.shape}, expected {(self.d, self.d)}")
        scale = max(np.abs(A).max(), 1e-300)
        if abs(np.linalg.det(A / scale)) <= 1e-12:
            raise OseledetsError("step matrix is numerically singular")
        return A

    def matrices(self, path):
        return np.array([self.matrix(s) for s in path.symbols])

    def moment(self, mats):
        """Mean of ``max(ln||A||, ln||A^-1||)`` over the path and the tail index of its terms."""
        s = np.linalg.svd(mats, compute_uv=False)
        terms = np.maximum(np.log(s[:, 0]), -np.log(s[:, -1]))
        mean = float(terms.mean())
        tail = hill_index(terms[terms > 0]) if np.count_nonzero(terms > 0) > 20 else math.inf
        if self.moment_bound is not None and mean > self.moment_bound:
            warnings.warn(f"moment estimate {mean:.3g} exceeds bound {self.moment_bound}", MomentWarning)
        if tail < 1.1:
            warnings.warn(f"log-norm tail index {tail:.2f} suggests a divergent moment", MomentWarning)
        return mean, tail

    def inverse(self):
        return MatrixCocycle(self.d, lambda s: np.linalg.inv(self.matrix(s)), self.name + "^-1", self.moment_bound)

    def transpose_rule(self):
        """The step rule ``symbol -> A^T`` used on the positive-definite cone."""
        return lambda s: self.matrix(s).T


def reversed_path(path):
    return SymbolPath(path.symbols[::-1].copy(), path.start, path.system)


@dataclass
class CartanTriple:
    """``A = L diag(delta) K`` with orthogonal ``L``, ``K`` and nonincreasing ``delta > 0``."""

    L: np.ndarray
    delta: np.ndarray
    K: np.ndarray

    def reconstruct(self):
        return self.L @ np.diag(self.delta) @ self.K


def cartan(A):
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise OseledetsError("cartan needs a square matrix")
    L, s, K = np.linalg.svd(A)
    if s[-1] <= 1e-12 * s[0] or s[0] == 0:
        raise OseledetsError("matrix is numerically singular")
    return CartanTriple(L, s, K)


@dataclass
class LyapunovSpectrum:
    """Exponents ``mu_1 >= ... >= mu_d`` and their grouping.

    ``groups`` lists ``(lambda_i, m_i)`` in increasing order of ``lambda``.
    ``flags[i]`` is an orthonormal basis (columns) of the subspace of vectors
    growing no faster than the ``i``-th largest distinct exponent, so
    ``flags[0]`` spans ``R^d`` and the last flag is the slowest subspace.
    ``basis`` holds the adapted vectors ``e_1..e_d``: ``e_j`` grows at rate
    ``mu_j``.
    """

    exponents: np.ndarray
    groups: list
    flags: list
    basis: np.ndarray
    n: int
    gap: float
    log_det: float
    moment: tuple = None
    series: np.ndarray = field(default=None, repr=False)

    @property
    def k(self):
        return len(self.groups)

    def rows(self):
        return self.series


def group_exponents(mu, gap):
    """Merge descending exponents closer than ``gap``; returns ``[(lambda, m)]`` increasing."""
    blocks = [[mu[0]]]
    for x in mu[1:]:
        if blocks[-1][-1] - x < gap:
            blocks[-1].append(x)
        else:
            blocks.append([x])
    return [(float(np.mean(b)), len(b)) for b in reversed(blocks)]


def _slow_frame(mats):
    """Orthonormal frame whose leading columns span the fast right-singular directions of ``A^(n)``."""
    d = mats.shape[1]
    Y = np.eye(d)
    for A in mats[::-1]:
        Y, R = np.linalg.qr(A.T @ Y)
        Y = Y * np.sign(np.diag(R))
    return Y


def lyapunov_spectrum(coc, path, reorth_stride=1, gap=None, checkpoints=None):
    """Exponents from accumulated QR factorizations of ``A^(n)``.

    Every ``reorth_stride`` steps the running frame is re-orthonormalized and
    the logs of the diagonal of ``R`` are accumulated.  ``gap`` defaults to
    ``10/sqrt(n)``.  ``series`` holds ``(n, mu_1..mu_d, det residual)`` at
    the checkpoints.
    """
    n = len(path)
    d = coc.d
    if n < d:
        raise OseledetsError("path must be at least as long as the dimension")
    if reorth_stride < 1:
        raise OseledetsError("reorth_stride must be at least 1")
    mats = coc.matrices(path)
    moment = coc.moment(mats)
    cp = set((default_checkpoints(n) if checkpoints is None else np.asarray(checkpoints)).tolist())
    logdets = np.cumsum(np.log(np.abs(np.linalg.det(mats))))
    Q = np.eye(d)
    M = np.eye(d)
    logs = np.zeros(d)
    rows = []
    for k in range(n):
        M = mats[k] @ M
        if (k + 1) % reorth_stride == 0 or k + 1 == n or (k + 1) in cp:
            Q, R = np.linalg.qr(M @ Q)
            diag = np.diag(R)
            if not np.all(np.isfinite(diag)) or np.any(diag == 0):
                raise OseledetsError(f"overflow at step {k + 1}; lower reorth_stride")
            logs += np.log(np.abs(diag))
            M = np.eye(d)
            if (k + 1) in cp:
                mu_k = np.sort(logs / (k + 1))[::-1]
                rows.append([k + 1, *mu_k, logdets[k] / (k + 1) - mu_k.sum()])
    mu = np.sort(logs / n)[::-1]
    gap = 10 / math.sqrt(n) if gap is None else gap
    groups = group_exponents(mu, gap)
    Y = _slow_frame(mats)
    flags, skipped = [], 0
    for lam, m in reversed(groups):
        flags.append(Y[:, skipped:].copy())
        skipped += m
    return LyapunovSpectrum(mu, groups, flags, Y, n, gap, float(logdets[-1] / n), moment,
                            np.array(rows))


def _product_precision(mats):
    Q = np.eye(mats.shape[1])
    logdiag = np.zeros(mats.shape[1])
    worst = 0.0
    for A in mats:
        Q, R = np.linalg.qr(A @ Q)
        logdiag += np.log(np.abs(np.diag(R)))
        worst = max(worst, logdiag.max() - logdiag.min(), np.abs(logdiag).max())
    return int((2 * worst + 40) / math.log(10)) + 40


def _mp_svd(B):
    """Left and right singular frames of an mp matrix, singular values descending."""
    _, L = _mp.sym_eig(B * B.T)
    _, K = _mp.sym_eig(B.T * B)
    return L, K


def product_exponents(coc, path):
    """``(1/n) ln`` of the singular values of ``A^(n)``, multiplied out in mpmath.

    An independent route to the exponents: no reorthogonalization, just the
    exact product at a precision that resolves its smallest singular value.
    """
    mats = coc.matrices(path)
    with mpmath.workdps(_product_precision(mats)):
        B = mpmath.eye(coc.d)
        for A in mats:
            B = _mp.to_matrix(A) * B
        w = _mp.sym_eigvals(B.T * B)
        return np.array([_mp.flog(x) / (2 * len(mats)) for x in w])


@dataclass
class OmetReport:
    """Entry bounds ``|(L_n^T A^(n) e_j)_i| <= exp(n (mu_j + eps))`` and the determinant identity."""

    eps: float
    checkpoints: np.ndarray
    margins: np.ndarray
    det_residual: float
    det_direct: float
    first_failure: tuple
    n0: int
    passed: bool

    def rows(self):
        return np.column_stack([self.checkpoints, self.margins])


def verify_omet(coc, spectrum, path, eps, checkpoints=None, slack=1e-9):
    """Check the entry bounds in the adapted basis and the determinant identity.

    The product is formed in mpmath at a precision that resolves its smallest
    singular value.  ``margins[k, j]`` is ``max_i ln|entry| - n (mu_j + eps)``
    at checkpoint ``k``; the bound holds when it is at most ``slack * n``.
    ``n0`` is the first checkpoint from which every later checkpoint passes.
    """
    mats = coc.matrices(path)
    n = len(mats)
    if n != spectrum.n:
        raise OseledetsError("spectrum was computed on a path of a different length")
    d = coc.d
    cp = default_checkpoints(n) if checkpoints is None else np.asarray(checkpoints, dtype=int)
    cp = np.unique(np.concatenate([cp[(cp >= 1) & (cp <= n)], [n]]))
    mu = spectrum.exponents
    with mpmath.workdps(_product_precision(mats)):
        prods = {}
        B = mpmath.eye(d)
        want = set(cp.tolist())
        for k, A in enumerate(mats, start=1):
            B = _mp.to_matrix(A) * B
            if k in want:
                prods[k] = B
        _, E = _mp_svd(prods[n])
        margins = np.empty((len(cp), d))
        for r, k in enumerate(cp):
            Bk = prods[int(k)]
            L, _ = _mp_svd(Bk)
            C = L.T * Bk * E
            for j in range(d):
                top = max((_mp.flog(abs(C[i, j])) for i in range(d) if C[i, j] != 0), default=-math.inf)
                margins[r, j] = top - k * (mu[j] + eps)
        det_direct = _mp.flog(abs(mpmath.det(prods[n]))) / n
    ok = np.all(margins <= slack * cp[:, None], axis=1)
    bad = np.argwhere(margins > slack * cp[:, None])
    first = None
    if len(bad):
        r, j = bad[0]
        first = (int(cp[r]), int(j) + 1)
    tail_ok = np.flip(np.cumprod(np.flip(ok)))
    n0 = int(cp[np.argmax(tail_ok)]) if tail_ok.any() else None
    det_res = abs(spectrum.log_det - float(mu.sum()))
    return OmetReport(eps, cp, margins, det_res, det_direct, first, n0,
                      bool(ok[-1] and det_res <= eps))


def principal_angles(U, V):
    """Largest principal angle between the column spans of ``U`` and ``V``."""
    if U.shape[1] == 0 and V.shape[1] == 0:
        return 0.0
    return float(np.max(linalg.subspace_angles(U, V)))


def cone_trajectory(coc, path, checkpoints=None):
    """The positive-definite cone trajectory of ``g = A^T``."""
    return compose_trajectory(PosDefCone(coc.d), path, coc.transpose_rule(), checkpoints=checkpoints)


def ray_matrix(traj, drift_threshold=0.01):
    """``(1/2n) log(Z_n x0)`` for a cone trajectory; its eigenvalues estimate the exponents."""
    model = traj.model
    if model.kind != "posdef_cone":
        raise OseledetsError("ray_matrix needs a positive-definite cone trajectory")
    n = traj.n
    if traj.distances[n] / n <= drift_threshold:
        raise OseledetsError("sublinear regime: the orbit has no ray direction")
    with traj.precision():
        H = model.log(model.orbit_point(traj.terminal()))
        return _mp.to_numpy(H) / (2 * n)
