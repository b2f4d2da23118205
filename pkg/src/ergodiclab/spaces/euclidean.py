import numpy as np

from .base import BoundaryPoint, ModelError, SpaceModel


class Euclidean(SpaceModel):
    """R^d acted on by translations; boundary charts are unit vectors u with h_u(z) = -<u, z>."""

    kind = "euclidean"

    def __init__(self, d=1):
        if d < 1:
            raise ModelError("dimension must be positive")
        self.d = int(d)

    def __repr__(self):
        return f"Euclidean({self.d})"

    @property
    def basepoint(self):
        return np.zeros(self.d)

    def identity(self):
        return np.zeros(self.d)

    def point(self, x):
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if x.shape != (self.d,):
            raise ModelError(f"expected a point of R^{self.d}, got shape {x.shape}")
        return x

    element = point

    def distance(self, x, y):
        return float(np.linalg.norm(self.point(x) - self.point(y)))

    def act(self, g, x):
        return self.point(x) + self.element(g)

    def compose(self, g, h):
        return self.element(g) + self.element(h)

    def inverse(self, g):
        return -self.element(g)

    def norm(self, g):
        return float(np.linalg.norm(self.element(g)))

    def fold(self, steps, keep=()):
        steps = np.asarray(steps, dtype=float).reshape(len(steps), self.d)
        Z = np.vstack([np.zeros(self.d), np.cumsum(steps, axis=0)])
        return np.linalg.norm(Z, axis=1), {int(k): Z[int(k)] for k in keep}

    def distances_from(self, x, points):
        return np.linalg.norm(np.asarray(points, dtype=float).reshape(-1, self.d) - self.point(x), axis=1)

    def boundary(self, chart):
        u = np.atleast_1d(np.asarray(chart, dtype=float))
        if u.shape != (self.d,):
            raise ModelError("chart vector has the wrong dimension")
        n = np.linalg.norm(u)
        if n == 0:
            raise ModelError("chart vector must be nonzero")
        return BoundaryPoint(self.kind, u / n)

    def horofunction(self, xi, x):
        return float(-np.dot(self._check_chart(xi), self.point(x)))

    def geodesic_point(self, xi, t):
        self._check_t(t)
        return t * self._check_chart(xi)

    def boundary_act(self, g, xi):
        self._check_chart(xi)
        return xi

    def direction(self, x):
        return self.boundary(self.point(x))

    def chart_distance(self, xi, eta):
        return float(np.linalg.norm(self._check_chart(xi) - self._check_chart(eta)))

    def opposite(self, xi):
        return BoundaryPoint(self.kind, -self._check_chart(xi))

    def random_point(self, rng, scale=5.0):
        return rng.normal(scale=scale, size=self.d)

    random_element = random_point

    def random_boundary(self, rng):
        return self.boundary(rng.normal(size=self.d))
