import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ergodiclab.gauge import power_gauge
from ergodiclab.spaces import (Euclidean, FreeGroupCayley, GaugedLine, ModelError, PoincareDisk,
                               PosDefCone, TreeEnd, distance, act, format_word, parse_word)
from ergodiclab.spaces.checks import chart_limit_gap, metric_suite, richardson
from ergodiclab.spaces.disk import translation

import oracles


def test_distance_examples():
    assert distance(Euclidean(2), (0, 0), (3, 4)) == 5
    cone = PosDefCone(2)
    d = distance(cone, np.eye(2), np.diag([math.e ** 2, math.e ** -2]))
    assert abs(float(d) - 2 * math.sqrt(2)) < 1e-12
    assert distance(FreeGroupCayley(2), (), "abA") == 3


def test_action_examples():
    assert act(Euclidean(2), (1, 1), (0, 0)).tolist() == [1, 1]
    assert act(FreeGroupCayley(2), "ab", "B") == parse_word("a")
    P = act(PosDefCone(2), np.diag([2.0, 1.0]), np.eye(2))
    assert [float(P[i, j]) for i in range(2) for j in range(2)] == [4, 0, 0, 1]


def test_phi_examples():
    e1 = Euclidean(1)
    assert e1.phi_eval([10], [3]) == -3
    for m in (Euclidean(2), PoincareDisk(), FreeGroupCayley(2), PosDefCone(2)):
        rng = np.random.default_rng(0)
        assert float(m.phi_eval(m.random_point(rng), m.basepoint)) == 0
    g = GaugedLine(power_gauge(0.5))
    assert abs(g.phi_eval(100, 1) - (math.sqrt(99) - 10)) < 1e-12
    assert abs(g.phi_eval(100, 1) - (-0.0501256)) < 1e-6


def test_horofunction_examples():
    e2 = Euclidean(2)
    assert e2.horofunction(e2.boundary([1, 0]), [5, 0]) == -5
    g = GaugedLine(power_gauge(0.5))
    assert all(g.horofunction(g.boundary(), x) == 0 for x in (-1e6, 0, 3.5))
    tree = FreeGroupCayley(2)
    xi = tree.boundary("(a)")
    assert tree.horofunction(xi, "aa") == -2
    assert tree.horofunction(xi, "b") == 1


def test_geodesic_examples():
    e2 = Euclidean(2)
    assert e2.geodesic_point(e2.boundary([0, 1]), 3).tolist() == [0, 3]
    cone = PosDefCone(2)
    H = cone.boundary(np.diag([1.0, -1.0]) / math.sqrt(2))
    P = cone.geodesic_point(H, math.sqrt(2))
    assert abs(float(P[0, 0]) - math.e) < 1e-12 and abs(float(P[1, 1]) - 1 / math.e) < 1e-12
    tree = FreeGroupCayley(2)
    assert tree.geodesic_point(tree.boundary("(a)"), 2) == (1, 1)


def test_errors():
    with pytest.raises(ModelError):
        Euclidean(2).point([1, 2, 3])
    with pytest.raises(ModelError):
        FreeGroupCayley(2).point((1, -1))
    with pytest.raises(ModelError):
        PosDefCone(2).distance(np.eye(2), np.diag([1.0, -1.0]))
    with pytest.raises(ModelError):
        PoincareDisk().point(1.5)
    with pytest.raises(ModelError):
        GaugedLine(power_gauge(0.5)).geodesic_point(None, 1.0)
    with pytest.raises(ModelError):
        TreeEnd((1,), (-1,))


def test_word_round_trip():
    w = parse_word("abAB")
    assert w == (1, 2, -1, -2)
    assert format_word(w) == "abAB"
    assert parse_word("aA") == ()


def test_disk_translation_length():
    d = PoincareDisk()
    g = translation(2.5, 0.3)
    assert abs(float(d.norm(g)) - 2.5) < 1e-12


def test_richardson_removes_power_terms():
    f = lambda t: 3.0 + 2.0 / t - 5.0 / t ** 2 + 1.0 / t ** 3
    assert abs(richardson([f(10 * 2 ** k) for k in range(5)]) - 3.0) < 1e-12


def test_disk_busemann_matches_direct_limit():
    d = PoincareDisk()
    rng = np.random.default_rng(4)
    for _ in range(20):
        xi = d.random_boundary(rng)
        z = d.random_point(rng)
        ref = oracles.disk_busemann_limit(complex(xi.chart), complex(z))
        assert abs(float(d.horofunction(xi, z)) - ref) < 1e-9


def test_tree_busemann_matches_oracle():
    tree = FreeGroupCayley(2)
    rng = np.random.default_rng(5)
    for _ in range(200):
        xi = tree.random_boundary(rng)
        z = tree.random_point(rng)
        assert tree.horofunction(xi, z) == oracles.tree_busemann(xi.chart.letters(len(z) + 1), z)


def test_chart_limit_cone_flat_direction():
    cone = PosDefCone(2)
    xi = cone.boundary(np.eye(2))
    P = cone.random_point(np.random.default_rng(1))
    assert chart_limit_gap(cone, xi, P) < 1e-6


FAST_MODELS = [Euclidean(1), Euclidean(3), GaugedLine(power_gauge(0.5)), FreeGroupCayley(2), FreeGroupCayley(3)]


@pytest.mark.parametrize("model", FAST_MODELS, ids=repr)
def test_metric_suite_fast_models(model):
    rep = metric_suite(model, cases=300, seed=11)
    assert rep.passed(), rep.failures()


@pytest.mark.parametrize("model", [PoincareDisk(), PosDefCone(2)], ids=repr)
def test_metric_suite_precise_models(model):
    rep = metric_suite(model, cases=60, seed=12, limit_cases=5)
    assert rep.passed(), rep.failures()


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32), d=st.integers(1, 4))
def test_euclidean_horofunction_lipschitz(seed, d):
    m = Euclidean(d)
    rng = np.random.default_rng(seed)
    x, y, xi = m.random_point(rng), m.random_point(rng), m.random_boundary(rng)
    assert abs(m.horofunction(xi, x) - m.horofunction(xi, y)) <= m.distance(x, y) + 1e-9
    assert m.horofunction(xi, m.basepoint) == 0


@settings(max_examples=60, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_tree_isometry_and_triangle(seed):
    m = FreeGroupCayley(2)
    rng = np.random.default_rng(seed)
    g, x, y, z = (m.random_point(rng) for _ in range(4))
    assert m.distance(m.act(g, x), m.act(g, y)) == m.distance(x, y)
    assert m.distance(x, z) <= m.distance(x, y) + m.distance(y, z)


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 2 ** 32))
def test_disk_cocycle_relation(seed):
    m = PoincareDisk()
    rng = np.random.default_rng(seed)
    with mpmath.workdps(40):
        g, z, xi = m.random_element(rng), m.random_point(rng), m.random_boundary(rng)
        gi = m.inverse(g)
        lhs = m.horofunction(m.boundary_act(g, xi), z)
        rhs = m.horofunction(xi, m.act(gi, z)) - m.horofunction(xi, m.act(gi, m.basepoint))
        assert abs(float(lhs - rhs)) < 1e-20


@settings(max_examples=50, deadline=None)
@given(t=st.floats(0, 1e9), s=st.floats(0, 1e9), x=st.floats(-1e6, 1e6), y=st.floats(-1e6, 1e6),
       g=st.floats(-1e6, 1e6))
def test_gauged_line_translation_invariance(t, s, x, y, g):
    D = power_gauge(0.5)
    m = GaugedLine(D)
    assert D(t + s) <= D(t) + D(s) + 1e-9
    assert abs(m.distance(x + g, y + g) - m.distance(x, y)) <= 1e-9 * max(1.0, m.distance(x, y))
