import numpy as np

from .base import BoundaryPoint, ModelError, SpaceModel


class GaugedLine(SpaceModel):
    """The real line with the metric ``D(|x - y|)`` for a gauge ``D``.

    Translations are isometries.  Because ``D(t)/t -> 0`` every horofunction
    vanishes identically, so the only boundary chart is ``"trivial"`` and there
    are no geodesic rays.
    """

    kind = "gauged_line"
    has_rays = False

    def __init__(self, gauge):
        if getattr(gauge, "allow_positive_origin", False) and gauge(0.0) != 0:
            raise ModelError("a gauged line needs D(0) = 0")
        self.gauge = gauge

    def __repr__(self):
        return f"GaugedLine({self.gauge.name})"

    @property
    def basepoint(self):
        return 0.0

    def identity(self):
        return 0.0

    def point(self, x):
        x = np.asarray(x, dtype=float)
        if x.ndim != 0 and x.shape != (1,):
            raise ModelError("gauged line points are scalars")
        return float(x.reshape(()))

    element = point

    def distance(self, x, y):
        return float(self.gauge(abs(self.point(x) - self.point(y))))

    def act(self, g, x):
        return self.point(x) + self.element(g)

    def compose(self, g, h):
        return self.element(g) + self.element(h)

    def inverse(self, g):
        return -self.element(g)

    def fold(self, steps, keep=()):
        Z = np.concatenate([[0.0], np.cumsum(np.asarray(steps, dtype=float).reshape(-1))])
        return np.asarray(self.gauge(np.abs(Z))), {int(k): float(Z[int(k)]) for k in keep}

    def distances_from(self, x, points):
        return np.asarray(self.gauge(np.abs(np.asarray(points, dtype=float) - self.point(x))))

    def boundary(self, chart="trivial"):
        if chart != "trivial":
            raise ModelError("the gauged line only has the trivial chart")
        return BoundaryPoint(self.kind, "trivial")

    def horofunction(self, xi, x):
        self._check_chart(xi)
        self.point(x)
        return 0.0

    def geodesic_point(self, xi, t):
        raise ModelError("the gauged line has no nontrivial geodesic rays")

    def boundary_act(self, g, xi):
        self._check_chart(xi)
        return xi

    def direction(self, x):
        return self.boundary()

    def chart_distance(self, xi, eta):
        self._check_chart(xi)
        self._check_chart(eta)
        return 0.0

    def opposite(self, xi):
        raise ModelError("the gauged line boundary is a single point")

    def random_point(self, rng, scale=100.0):
        return float(rng.normal(scale=scale))

    random_element = random_point

    def random_boundary(self, rng):
        return self.boundary()
