"""Horofunction directions of trajectories and the ray approximation."""

from contextlib import nullcontext
from dataclasses import dataclass

import mpmath
import numpy as np

from .gauge import _loglog_slope
from .spaces.tree import common_prefix

DIRECTION_MODELS = ("euclidean", "poincare_disk", "free_group_cayley", "posdef_cone")


class BoundaryError(ValueError):
    pass


def _depths(traj, depth=None):
    N = traj.n if depth is None else int(depth)
    cp = traj.checkpoints[traj.checkpoints <= N]
    if N not in traj.elements:
        raise BoundaryError(f"depth {N} is not a retained checkpoint")
    return cp, N


@dataclass
class DirectionEstimate:
    """Chart point read off the orbit point ``Z_n x0`` at ``fit_depth``."""

    point: object
    fit_depth: int
    residual: float
    alpha: float


def estimate_direction(traj, alpha=None, drift_threshold=0.01, depth=None):
    """Radial projection of ``Z_n x0`` to the boundary chart.

    ``alpha`` defaults to the terminal slope ``|Z_n|/n``; at or below
    ``drift_threshold`` the walk is sublinear and no direction is defined.
    """
    model = traj.model
    if model.kind not in DIRECTION_MODELS:
        raise BoundaryError(f"no boundary direction for {model.kind}")
    _, N = _depths(traj, depth)
    a = float(traj.distances[N] / N) if alpha is None else float(alpha)
    if a <= drift_threshold:
        raise BoundaryError(f"sublinear regime, no direction (alpha = {a:.4g})")
    with traj.precision():
        x = model.orbit_point(traj.element(N))
        xi = model.direction(x)
        h = float(model.horofunction(xi, x))
    return DirectionEstimate(xi, N, abs(a + h / N), a)


@dataclass
class MainTheoremReport:
    """Series ``a_n = -h(Z_n x0)/n`` and ``b_n = |Z_n|/n`` with the verdict at depth N."""

    checkpoints: np.ndarray
    a: np.ndarray
    b: np.ndarray
    residual: float
    tol: float
    passed: bool
    trend: float

    def rows(self):
        return np.column_stack([self.checkpoints, self.a, self.b])


def horofunction_series(traj, xi, depth=None):
    cp, N = _depths(traj, depth)
    model = traj.model
    with traj.precision():
        a = np.array([-float(model.horofunction(xi, model.orbit_point(traj.element(int(n))))) / n
                      for n in cp])
    return cp, a


def verify_main_theorem(traj, xi, alpha=None, stderr=0.0, depth=None, tol_floor=0.05):
    """Compare ``-h_xi(Z_n x0)/n`` with ``|Z_n|/n`` along the checkpoints.

    Passes iff the two agree at depth N within ``max(tol_floor, 5 stderr)``.
    ``trend`` is the least-squares slope of ``|a_n - b_n|`` against ``n``.
    """
    cp, a = horofunction_series(traj, xi, depth)
    b = traj.distances[cp] / cp
    gap = np.abs(a - b)
    tol = max(tol_floor, 5 * stderr)
    trend = float(np.polyfit(cp, gap, 1)[0]) if len(cp) > 1 else 0.0
    return MainTheoremReport(cp, a, b, float(gap[-1]), tol, bool(gap[-1] <= tol), trend)


def wrong_direction_gap(traj, xi, depth=None):
    """Residuals of ``xi`` and of its opposite chart point at depth N."""
    model = traj.model
    right = verify_main_theorem(traj, xi, depth=depth).residual
    with traj.precision():
        other = model.opposite(xi)
    wrong = verify_main_theorem(traj, other, depth=depth).residual
    return right, wrong


@dataclass
class RayReport:
    """``e_n = d(Z_n x0, sigma_xi(alpha n))/n`` along the checkpoints."""

    alpha_used: float
    checkpoints: np.ndarray
    errors: np.ndarray
    slope: float
    rhs: np.ndarray = None

    @property
    def terminal(self):
        return float(self.errors[-1])

    def comparison_ok(self, slack=0.01):
        """``e_n^2 <= (alpha_n^2 - beta_n^2) + (beta_n - alpha)^2 + slack`` in flat comparison models."""
        if self.rhs is None:
            return None
        return bool(np.all(self.errors ** 2 <= self.rhs + slack))

    def rows(self):
        return np.column_stack([self.checkpoints, self.errors])


def ray_error(traj, xi, alpha, depth=None):
    """Distance from the orbit to the geodesic ray toward ``xi`` run at speed ``alpha``.

    On trees ``alpha n`` is rounded to the nearest vertex.  For the euclidean
    and cone models the report also carries the comparison-triangle bound
    built from ``alpha_n = |Z_n|/n`` and ``beta_n = -h(Z_n x0)/n``.
    """
    model = traj.model
    if not model.has_rays:
        raise BoundaryError(f"{model.kind} has no geodesic rays")
    if not alpha > 0:
        raise BoundaryError("ray approximation needs alpha > 0")
    cp, N = _depths(traj, depth)
    errs = []
    with traj.precision():
        for n in cp:
            t = alpha * n
            if model.kind == "free_group_cayley":
                t = float(np.floor(t + 0.5))
            x = model.orbit_point(traj.element(int(n)))
            errs.append(float(model.distance(x, model.geodesic_point(xi, t))) / n)
    errs = np.array(errs)
    rhs = None
    if model.kind in ("euclidean", "posdef_cone"):
        _, beta = horofunction_series(traj, xi, N)
        a_n = traj.distances[cp] / cp
        rhs = (a_n ** 2 - beta ** 2) + (beta - alpha) ** 2
    return RayReport(float(alpha), cp, errs, _loglog_slope(cp, errs), rhs)


def direction_drift(traj, n, m=None):
    """Chart distance between the directions of ``Z_n x0`` and ``Z_m x0`` (``m = 2n``)."""
    m = 2 * n if m is None else m
    model = traj.model
    with traj.precision():
        u = model.direction(model.orbit_point(traj.element(n)))
        v = model.direction(model.orbit_point(traj.element(m)))
        return float(model.chart_distance(u, v))


def prefix_agreement(traj, n, m=None):
    """Whether the reduced words ``Z_n`` and ``Z_m`` share their first ``n // 4`` letters."""
    m = 2 * n if m is None else m
    return common_prefix(traj.element(n), traj.element(m)) >= n // 4


@dataclass
class SignedDrift:
    value: float
    sign: int
    alpha: float
    flag: str = ""


def birkhoff_from_boundary(traj, drift_threshold=0.01):
    """Recover ``lim S_n/n`` on the line from the drift and the boundary point at ``+-infinity``.

    The sign is the end whose horofunction best matches the drift at depth N.
    """
    model = traj.model
    if model.kind != "euclidean" or model.d != 1:
        raise BoundaryError("birkhoff_from_boundary needs the euclidean line")
    N = traj.n
    alpha = float(traj.distances[N] / N)
    if alpha <= drift_threshold:
        return SignedDrift(0.0, 0, alpha, "sublinear")
    x = model.orbit_point(traj.element(N))
    residual = {s: abs(alpha + model.horofunction(model.boundary([s]), x) / N) for s in (1, -1)}
    sign = min(residual, key=residual.get)
    return SignedDrift(sign * alpha, sign, alpha)


def cocycle_identity(model, samples=200, seed=0):
    """Largest defect of ``h_{g xi}(z) = h_xi(g^-1 z) - h_xi(g^-1 x0)`` over random triples.

    This is the relation that makes ``(omega, h) -> (T omega, g(omega)^-1 h)``
    a skew product with the horofunction increment as its cocycle.
    """
    rng = np.random.default_rng(seed)
    draw = getattr(model, "random_element", model.random_point)
    worst = 0.0
    with mpmath.workdps(40) if model.high_precision else nullcontext():
        for _ in range(samples):
            g, z, xi = model.element(draw(rng)), model.random_point(rng), model.random_boundary(rng)
            gi = model.inverse(g)
            lhs = model.horofunction(model.boundary_act(g, xi), z)
            rhs = model.horofunction(xi, model.act(gi, z)) - model.horofunction(xi, model.act(gi, model.basepoint))
            worst = max(worst, abs(float(lhs - rhs)))
    return worst
