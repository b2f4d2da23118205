import math

import mpmath

from . import _mp
from .base import BoundaryPoint, ModelError, SpaceModel


def translation(length, angle):
    """Hyperbolic translation by ``length`` along the diameter at ``angle``."""
    a = mpmath.cosh(mpmath.mpf(length) / 2)
    b = mpmath.expj(angle) * mpmath.sinh(mpmath.mpf(length) / 2)
    return (mpmath.mpc(a), b)


def rotation(angle):
    return (mpmath.expj(mpmath.mpf(angle) / 2), mpmath.mpc(0))


class PoincareDisk(SpaceModel):
    """The Poincare disk of curvature -1.

    Isometries are Moebius maps ``z -> (a z + b)/(conj(b) z + conj(a))`` with
    ``|a|^2 - |b|^2 = 1``, stored as the pair ``(a, b)``.  Boundary points are
    unit complex numbers with Busemann function
    ``h_xi(z) = ln(|xi - z|^2 / (1 - |z|^2))``.

    Arithmetic is done in mpmath at the ambient working precision, so long
    products can be composed faithfully by raising ``mpmath.mp.dps``.  A pair
    with ``|a|^2 - |b|^2 = c > 0`` is accepted as the same map as the pair
    scaled by ``1/sqrt(c)``; steps rounded to double precision stay exact
    isometries this way and ``norm`` accounts for ``c``.
    """

    kind = "poincare_disk"
    high_precision = True

    def __repr__(self):
        return "PoincareDisk()"

    @property
    def basepoint(self):
        return mpmath.mpc(0)

    def identity(self):
        return (mpmath.mpc(1), mpmath.mpc(0))

    def point(self, z):
        z = mpmath.mpc(z)
        if not abs(z) < 1:
            raise ModelError("disk points must satisfy |z| < 1")
        return z

    def element(self, g):
        try:
            a, b = g
        except (TypeError, ValueError):
            raise ModelError("disk isometries are pairs (a, b)") from None
        a, b = mpmath.mpc(a), mpmath.mpc(b)
        det = abs(a) ** 2 - abs(b) ** 2
        if abs(det - 1) > 1e-12 * max(1, abs(a) ** 2):
            raise ModelError("Moebius coefficients must satisfy |a|^2 - |b|^2 = 1")
        return (a, b)

    def distance(self, x, y):
        z, w = self.point(x), self.point(y)
        r = abs(z - w) / abs(1 - mpmath.conj(w) * z)
        return 2 * mpmath.atanh(r)

    def act(self, g, x):
        a, b = g
        z = self.point(x)
        return (a * z + b) / (mpmath.conj(b) * z + mpmath.conj(a))

    def compose(self, g, h):
        a, b = g
        c, d = h
        return (a * c + b * mpmath.conj(d), a * d + b * mpmath.conj(c))

    def inverse(self, g):
        a, b = g
        return (mpmath.conj(a), -b)

    @staticmethod
    def _det(g):
        a, b = g
        return a.real ** 2 + a.imag ** 2 - b.real ** 2 - b.imag ** 2

    def norm(self, g):
        a, b = g
        return 2 * mpmath.log(abs(a) + abs(b)) - mpmath.log(self._det(g))

    def fast_norm(self, g):
        """``|g|`` as a double, cheap at any working precision."""
        a, b = g
        c = self._det(g)
        with mpmath.workdps(30):
            s = abs(a) + abs(b)
        return 2 * _mp.flog(s) - _mp.flog(c)

    def orbit_point(self, g):
        a, b = g
        return b / mpmath.conj(a)

    def boundary(self, chart):
        xi = mpmath.mpc(chart)
        if abs(xi) == 0:
            raise ModelError("boundary chart must be nonzero")
        return BoundaryPoint(self.kind, xi / abs(xi))

    def boundary_angle(self, angle):
        return BoundaryPoint(self.kind, mpmath.expj(angle))

    def _unit(self, xi):
        # renormalize at the working precision; charts may come from a coarser one
        c = self._check_chart(xi)
        return c / abs(c)

    def horofunction(self, xi, x):
        c = self._unit(xi)
        z = self.point(x)
        return mpmath.log(abs(c - z) ** 2 / (1 - abs(z) ** 2))

    def geodesic_point(self, xi, t):
        self._check_t(t)
        return self._unit(xi) * mpmath.tanh(mpmath.mpf(t) / 2)

    def boundary_act(self, g, xi):
        a, b = g
        c = self._unit(xi)
        w = (a * c + b) / (mpmath.conj(b) * c + mpmath.conj(a))
        return BoundaryPoint(self.kind, w / abs(w))

    def direction(self, x):
        z = self.point(x)
        if z == 0:
            raise ModelError("the center has no direction")
        return BoundaryPoint(self.kind, z / abs(z))

    def chart_distance(self, xi, eta):
        return abs(float(mpmath.arg(self._check_chart(xi) / self._check_chart(eta))))

    def opposite(self, xi):
        return BoundaryPoint(self.kind, -self._check_chart(xi))

    def precision_for(self, steps):
        """Digits that resolve every orbit point of the product of ``steps``.

        ``1 - |Z_k x0|`` is about ``exp(-|Z_k|)``; the largest ``|Z_k|`` is
        found by a double-precision pass that rescales ``(a, b)`` each step.
        """
        a, b, logscale, worst = 1.0 + 0j, 0j, 0.0, 0.0
        for g in steps:
            c, d = complex(g[0]), complex(g[1])
            a, b = a * c + b * d.conjugate(), a * d + b * c.conjugate()
            s = abs(a)
            a, b = a / s, b / s
            logscale += math.log(s)
            worst = max(worst, 2 * (logscale + math.log1p(abs(b))))
        return int(worst / math.log(10)) + 40

    def random_point(self, rng, scale=4.0):
        r = rng.uniform(0, scale)
        return mpmath.tanh(r / 2) * mpmath.expj(rng.uniform(0, 2 * math.pi))

    def random_element(self, rng, scale=4.0):
        r = rng.uniform(0, scale)
        a = mpmath.cosh(r / 2) * mpmath.expj(rng.uniform(0, 2 * math.pi))
        b = mpmath.sinh(r / 2) * mpmath.expj(rng.uniform(0, 2 * math.pi))
        return (a, b)

    def random_boundary(self, rng):
        return self.boundary_angle(rng.uniform(0, 2 * math.pi))
