"""The symmetric space of positive-definite matrices.

``GL(d)`` acts by ``g . P = g P g^T`` and the invariant metric is
``d(P, Q) = ||log(P^-1/2 Q P^-1/2)||_F``, so ``|g| = sqrt(sum ln^2 tau_i)``
with ``tau_i`` the eigenvalues of ``g g^T``.

Boundary charts are Busemann points of the rays ``exp(tH)`` from the
identity, with ``H`` symmetric of unit Frobenius norm.  Writing
``H = K diag(h) K^T`` with ``h`` decreasing and ``K^T P K = U D U^T`` with
``U`` upper unipotent, the Busemann function is ``b_H(P) = -sum h_i ln D_i``.
Everything is computed in mpmath at the ambient precision.
"""

import math

import mpmath
import numpy as np
from scipy import linalg

from . import _mp
from .base import BoundaryPoint, ModelError, SpaceModel


def rotation(angle):
    c, s = mpmath.cos(angle), mpmath.sin(angle)
    return mpmath.matrix([[c, -s], [s, c]])


class PosDefCone(SpaceModel):
    kind = "posdef_cone"
    high_precision = True

    def __init__(self, d=2):
        if d < 1:
            raise ModelError("dimension must be positive")
        self.d = int(d)

    def __repr__(self):
        return f"PosDefCone({self.d})"

    @property
    def basepoint(self):
        return mpmath.eye(self.d)

    def identity(self):
        return mpmath.eye(self.d)

    def _square(self, a, what):
        m = _mp.to_matrix(a)
        if m.rows != self.d or m.cols != self.d:
            raise ModelError(f"{what} must be {self.d}x{self.d}")
        return m

    def point(self, P):
        P = self._square(P, "points")
        asym = max(abs(P[i, j] - P[j, i]) for i in range(self.d) for j in range(self.d))
        scale = max(abs(P[i, i]) for i in range(self.d))
        if asym > 1e-9 * max(scale, 1):
            raise ModelError("points must be symmetric matrices")
        return (P + P.T) / 2

    def element(self, g):
        g = self._square(g, "isometries")
        if mpmath.det(g) == 0:
            raise ModelError("isometries must be invertible matrices")
        return g

    def _cholesky(self, P):
        try:
            return mpmath.cholesky(P)
        except ValueError:
            raise ModelError("matrix is not positive definite") from None

    def _log_eigs(self, M):
        w = _mp.sym_eigvals(M)
        if any(x <= 0 for x in w):
            raise ModelError("matrix is not positive definite")
        return [mpmath.log(x) for x in w]

    def distance(self, x, y):
        P, Q = self.point(x), self.point(y)
        L = self._cholesky(P)
        Li = mpmath.inverse(L)
        M = Li * Q * Li.T
        return mpmath.sqrt(sum(v ** 2 for v in self._log_eigs((M + M.T) / 2)))

    def act(self, g, x):
        g = _mp.to_matrix(g)
        P = g * self.point(x) * g.T
        return (P + P.T) / 2

    def compose(self, g, h):
        return _mp.to_matrix(g) * _mp.to_matrix(h)

    def inverse(self, g):
        return mpmath.inverse(_mp.to_matrix(g))

    def norm(self, g):
        g = _mp.to_matrix(g)
        return mpmath.sqrt(sum(v ** 2 for v in self._log_eigs(g * g.T)))

    def fast_norm(self, g):
        """``|g|`` as a double from the singular values of ``g`` (2x2 closed form)."""
        if self.d != 2:
            return float(self.norm(g))
        det2 = (g[0, 0] * g[1, 1] - g[0, 1] * g[1, 0]) ** 2
        with mpmath.workdps(30):
            F = g[0, 0] ** 2 + g[0, 1] ** 2 + g[1, 0] ** 2 + g[1, 1] ** 2
            big = (F + mpmath.sqrt(max(F * F - 4 * det2, 0))) / 2
        l1 = _mp.flog(big)
        l2 = _mp.flog(det2) - l1
        return math.sqrt(l1 * l1 + l2 * l2)

    def orbit_point(self, g):
        g = _mp.to_matrix(g)
        return g * g.T

    def boundary(self, chart):
        H = _mp.to_matrix(chart)
        if H.rows != self.d or H.cols != self.d:
            raise ModelError(f"chart must be {self.d}x{self.d}")
        H = (H + H.T) / 2
        n = _mp.frob(H)
        if n == 0:
            raise ModelError("chart matrix must be nonzero")
        return BoundaryPoint(self.kind, H / n)

    def _frame(self, xi):
        return _mp.sym_eig(self._check_chart(xi))

    def horofunction(self, xi, x):
        h, K = self._frame(xi)
        P = self.point(x)
        M = K.T * P * K
        C = self._cholesky(_mp.reverse((M + M.T) / 2))
        d = self.d
        return -sum(h[i] * 2 * mpmath.log(C[d - 1 - i, d - 1 - i]) for i in range(d))

    def geodesic_point(self, xi, t):
        self._check_t(t)
        h, K = self._frame(xi)
        return K * mpmath.diag([mpmath.exp(t * v) for v in h]) * K.T

    def boundary_act(self, g, xi):
        h, K = self._frame(xi)
        Q, R = mpmath.qr(_mp.to_matrix(g) * K)
        S = mpmath.diag([1 if R[i, i] >= 0 else -1 for i in range(self.d)])
        K2 = Q * S
        return BoundaryPoint(self.kind, K2 * mpmath.diag(h) * K2.T)

    def log(self, x):
        return _mp.sym_apply(self.point(x), mpmath.log)

    def direction(self, x):
        Lg = self.log(x)
        n = _mp.frob(Lg)
        if n == 0:
            raise ModelError("the identity has no direction")
        return BoundaryPoint(self.kind, Lg / n)

    def chart_distance(self, xi, eta):
        return float(_mp.frob(self._check_chart(xi) - self._check_chart(eta)))

    def opposite(self, xi):
        return BoundaryPoint(self.kind, -self._check_chart(xi))

    def precision_for(self, steps):
        """Digits needed so the smallest eigenvalue of ``Z_n Z_n^T`` stays resolved.

        The log condition number of ``Z_n`` is tracked in double precision by
        a QR sweep; twice its running maximum (for the square ``Z Z^T``) plus
        guard digits gives the working precision.
        """
        Q = np.eye(self.d)
        logdiag = np.zeros(self.d)
        worst = 0.0
        for g in steps:
            G = _mp.to_numpy(g) if isinstance(g, mpmath.matrix) else np.asarray(g, dtype=float)
            Q, R = np.linalg.qr(G.T @ Q)
            logdiag += np.log(np.abs(np.diag(R)))
            worst = max(worst, logdiag.max() - logdiag.min())
        return int((2 * worst + 40) / math.log(10)) + 40

    def random_point(self, rng, scale=2.0):
        A = rng.normal(scale=scale / math.sqrt(self.d), size=(self.d, self.d))
        return _mp.sym_apply(_mp.to_matrix((A + A.T) / 2), mpmath.exp)

    def random_element(self, rng, scale=1.0):
        A = rng.normal(scale=scale / math.sqrt(self.d), size=(self.d, self.d))
        return _mp.to_matrix(linalg.expm(A))

    def random_boundary(self, rng):
        A = rng.normal(size=(self.d, self.d))
        return self.boundary((A + A.T) / 2)
