"""Common interface of the metric-space models."""

from dataclasses import dataclass
from typing import Any


class ModelError(ValueError):
    pass


@dataclass(frozen=True)
class BoundaryPoint:
    """A point of the horofunction boundary in a model-specific chart.

    ``chart`` is a unit vector (euclidean), the string ``"trivial"`` (gauged
    line), a unit complex number (disk), a :class:`TreeEnd` (free group) or a
    unit-Frobenius symmetric matrix (positive-definite cone).
    """

    kind: str
    chart: Any


class SpaceModel:
    """A proper metric space with an isometric action and boundary charts.

    Subclasses implement the primitive operations; the derived quantities
    ``norm`` and ``phi_eval`` are defined here once.
    """

    kind = ""
    has_rays = True
    high_precision = False

    @property
    def basepoint(self):
        raise NotImplementedError

    def identity(self):
        raise NotImplementedError

    def point(self, x):
        """Validate and normalize a point representation."""
        return x

    def element(self, g):
        """Validate and normalize an isometry representation."""
        return g

    def distance(self, x, y):
        raise NotImplementedError

    def act(self, g, x):
        raise NotImplementedError

    def compose(self, g, h):
        """The isometry ``g o h``."""
        raise NotImplementedError

    def inverse(self, g):
        raise NotImplementedError

    def norm(self, g):
        """``|g| = d(x0, g x0)``."""
        return self.distance(self.basepoint, self.act(g, self.basepoint))

    def orbit_point(self, g):
        return self.act(g, self.basepoint)

    def phi_eval(self, x, z):
        """``Phi_x(z) = d(x, z) - d(x, x0)``."""
        x, z = self.point(x), self.point(z)
        return self.distance(x, z) - self.distance(x, self.basepoint)

    def boundary(self, chart):
        raise NotImplementedError

    def horofunction(self, xi, x):
        raise NotImplementedError

    def geodesic_point(self, xi, t):
        raise NotImplementedError

    def boundary_act(self, g, xi):
        """The boundary point whose horofunction is ``z -> h(g^-1 z) - h(g^-1 x0)``."""
        raise NotImplementedError

    def direction(self, x):
        """Radial projection of a point to the boundary chart."""
        raise NotImplementedError

    def chart_distance(self, xi, eta):
        raise NotImplementedError

    def opposite(self, xi):
        """A chart point at chart distance at least 1 from ``xi``."""
        raise NotImplementedError

    def size(self, g):
        """``|g|`` as a double."""
        fast = getattr(self, "fast_norm", None)
        return float(fast(g) if fast else self.norm(g))

    def fold(self, steps, keep=()):
        """Right-multiply the steps in order.

        Returns the doubles ``|Z_k|`` for ``k = 0..n`` and a dict holding
        ``Z_k`` for every ``k`` in ``keep``.
        """
        keep = set(int(k) for k in keep)
        Z = self.identity()
        sizes = [0.0]
        saved = {0: Z} if 0 in keep else {}
        for k, g in enumerate(steps, start=1):
            Z = self.compose(Z, g)
            sizes.append(self.size(Z))
            if k in keep:
                saved[k] = Z
        return sizes, saved

    def distances_from(self, x, points):
        return [float(self.distance(x, y)) for y in points]

    def precision_for(self, steps):
        """Decimal digits needed to compose ``steps`` faithfully, or None for doubles."""
        return None

    def _check_chart(self, xi):
        if not isinstance(xi, BoundaryPoint) or xi.kind != self.kind:
            raise ModelError(f"boundary point {xi!r} does not belong to a {self.kind} model")
        return xi.chart

    def _check_t(self, t):
        if t < 0:
            raise ModelError("ray parameter t must be nonnegative")
