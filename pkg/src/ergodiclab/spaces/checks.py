"""Randomized checks of the metric-space contracts of a model.

``metric_suite`` measures, on random points, isometries and boundary charts,
how far each model is from being a metric space acted on by isometries with
normalized 1-Lipschitz horofunctions, and how far each closed-form
horofunction is from the limit of ``Phi_x`` along the ray toward it.
"""

from contextlib import nullcontext
from dataclasses import dataclass, field

import mpmath
import numpy as np

from . import _mp


@dataclass
class MetricSuiteReport:
    model: str
    cases: int
    defects: dict = field(default_factory=dict)

    def failures(self, tol=1e-9, limit_tol=1e-6):
        out = {}
        for name, v in self.defects.items():
            bound = limit_tol if name == "chart_limit" else tol
            if not v <= bound:
                out[name] = v
        return out

    def passed(self, tol=1e-9, limit_tol=1e-6):
        return not self.failures(tol, limit_tol)


def _f(x):
    return float(mpmath.re(x)) if isinstance(x, (mpmath.mpf, mpmath.mpc)) else float(x)


def richardson(values, ratio=2.0):
    """Extrapolate ``values[k] = F(T ratio^k)`` to ``t -> oo`` assuming a power series in ``1/t``."""
    table = list(values)
    m = len(table)
    for j in range(1, m):
        w = ratio ** j
        table = [(w * table[i + 1] - table[i]) / (w - 1) for i in range(len(table) - 1)]
    return table[0]


def _limit_precision(model, T, levels):
    if not model.high_precision:
        return None
    # entries of the ray point grow like exp(t); keep their squares resolved
    return int(2 * T * 2 ** (levels - 1) / 2.302585) + 60


def chart_limit_gap(model, xi, z, T=None, levels=5):
    """``|h_xi(z) - lim_t Phi_{sigma(t)}(z)|`` with the limit taken numerically.

    On the tree the ray point at ``t = |z| + 1`` already gives the exact value.
    Elsewhere ``Phi`` is evaluated at ``t = T, 2T, ..., 2^(levels-1) T`` and
    extrapolated in ``1/t``; the disk converges exponentially and the
    extrapolation leaves it unchanged.
    """
    if model.kind == "free_group_cayley":
        t = len(model.point(z)) + 1
        x = model.geodesic_point(xi, t)
        return abs(float(model.phi_eval(x, z) - model.horofunction(xi, z)))
    if T is None:
        T = {"poincare_disk": 40.0, "posdef_cone": 60.0}.get(model.kind, 1000.0)
    dps = _limit_precision(model, T, levels)
    with mpmath.workdps(dps) if dps else nullcontext():
        vals = []
        for k in range(levels):
            t = T * 2 ** k
            vals.append(model.phi_eval(model.geodesic_point(xi, t), z))
        if model.kind == "poincare_disk":
            limit = vals[-1]
        else:
            limit = richardson(vals)
        return abs(_f(limit - model.horofunction(xi, z)))


def _regular_chart(model, rng, min_gap):
    """A cone chart whose distinct eigenvalues are at least ``min_gap`` apart (or all equal)."""
    while True:
        xi = model.random_boundary(rng)
        h = sorted(_f(v) for v in _mp.sym_eigvals(xi.chart))
        gaps = np.diff(h)
        if np.all((gaps >= min_gap) | (gaps == 0)):
            return xi


def metric_suite(model, cases=1000, seed=0, limit_cases=None, min_gap=0.3):
    """Largest defect of each contract over ``cases`` random configurations.

    ``limit_cases`` (default ``cases // 10``) bounds the number of
    chart-vs-limit comparisons, which are the expensive ones.  Cone charts
    used for the limit are drawn with eigenvalue gaps of at least ``min_gap``
    so the exponentially small corrections are negligible at the ray depths
    used.  The gauged line has no rays and reports the subadditivity defect
    of its gauge instead.
    """
    rng = np.random.default_rng(seed)
    draw_g = getattr(model, "random_element", model.random_point)
    x0 = model.basepoint
    d = {k: 0.0 for k in ("identity", "symmetry", "triangle", "isometry", "basepoint", "lipschitz")}
    with mpmath.workdps(40) if model.high_precision else nullcontext():
        for _ in range(cases):
            x, y, z = (model.point(model.random_point(rng)) for _ in range(3))
            g = model.element(draw_g(rng))
            xi = model.random_boundary(rng)
            dxy, dyx = _f(model.distance(x, y)), _f(model.distance(y, x))
            d["identity"] = max(d["identity"], abs(_f(model.distance(x, x))))
            d["symmetry"] = max(d["symmetry"], abs(dxy - dyx))
            d["triangle"] = max(d["triangle"],
                                _f(model.distance(x, z)) - dxy - _f(model.distance(y, z)))
            d["isometry"] = max(d["isometry"],
                                abs(_f(model.distance(model.act(g, x), model.act(g, y))) - dxy))
            d["basepoint"] = max(d["basepoint"], abs(_f(model.horofunction(xi, x0))))
            hx, hy = _f(model.horofunction(xi, x)), _f(model.horofunction(xi, y))
            d["lipschitz"] = max(d["lipschitz"], abs(hx - hy) - dxy)
    if model.kind == "gauged_line":
        t = 10.0 ** rng.uniform(-6, 12, cases)
        s = 10.0 ** rng.uniform(-6, 12, cases)
        D = model.gauge
        d["subadditivity"] = float(max(0.0, np.max(D(t + s) - D(t) - D(s))))
    else:
        m = max(1, cases // 10) if limit_cases is None else limit_cases
        worst = 0.0
        for _ in range(m):
            z = model.point(model.random_point(rng))
            xi = _regular_chart(model, rng, min_gap) if model.kind == "posdef_cone" else model.random_boundary(rng)
            worst = max(worst, chart_limit_gap(model, xi, z))
        d["chart_limit"] = worst
    d["triangle"] = max(d["triangle"], 0.0)
    d["lipschitz"] = max(d["lipschitz"], 0.0)
    return MetricSuiteReport(model.kind, cases, d)
