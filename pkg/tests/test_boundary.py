import math

import numpy as np
import pytest

from ergodiclab.boundary import (BoundaryError, birkhoff_from_boundary, cocycle_identity,
                                 direction_drift, estimate_direction, prefix_agreement, ray_error,
                                 verify_main_theorem, wrong_direction_gap)
from ergodiclab.cocycle import compose_trajectory
from ergodiclab.driving import DrivingSystem, sample_path
from ergodiclab.gauge import power_gauge
from ergodiclab.spaces import (Euclidean, FreeGroupCayley, GaugedLine, PoincareDisk, PosDefCone,
                               parse_word)
from ergodiclab.spaces.disk import translation

PM = {"dist": "categorical", "weights": [0.5, 0.5], "values": [1.0, -1.0]}


def const(value, n):
    return sample_path(DrivingSystem("iid", params={"dist": "constant", "value": value}), n)


def test_constant_translation_direction():
    traj = compose_trajectory(Euclidean(2), const([1.0, 0.0], 100))
    est = estimate_direction(traj)
    assert est.point.chart.tolist() == [1.0, 0.0]
    assert est.residual == 0


def test_cone_constant_direction():
    cone = PosDefCone(2)
    traj = compose_trajectory(cone, const([[2.0, 0.0], [0.0, 1.0]], 30), lambda s: s)
    est = estimate_direction(traj)
    H = np.array([[float(est.point.chart[i, j]) for j in range(2)] for i in range(2)])
    assert np.allclose(H, np.diag([1.0, 0.0]), atol=1e-12)
    P = traj.orbit_point()
    assert abs(float(P[0, 0]) - 4.0 ** 30) < 1e-6 * 4.0 ** 30 and float(P[1, 1]) == 1.0


def test_main_theorem_line_signs():
    e1 = Euclidean(1)
    traj = compose_trajectory(e1, const(1.0, 100))
    right = verify_main_theorem(traj, e1.boundary([1]))
    assert right.passed and np.all(right.a == 1) and np.all(right.b == 1)
    wrong = verify_main_theorem(traj, e1.boundary([-1]))
    assert not wrong.passed and np.all(wrong.a == -1)


def test_gauged_line_trivial_chart():
    m = GaugedLine(power_gauge(0.5))
    x = sample_path(DrivingSystem("iid", 1, {"dist": "normal"}), 10 ** 4)
    traj = compose_trajectory(m, x)
    rep = verify_main_theorem(traj, m.boundary())
    assert np.all(rep.a == 0)
    # b_n = sqrt|S_n|/n -> 0
    assert rep.b[-1] < 0.02 and rep.passed


def test_ray_error_exact_for_constant_translation():
    e3 = Euclidean(3)
    v = np.array([1.0, 2.0, 2.0])
    traj = compose_trajectory(e3, const(v.tolist(), 64))
    rep = ray_error(traj, e3.boundary(v), 3.0)
    assert np.all(rep.errors < 1e-12)


def test_ray_error_clt_line():
    e1 = Euclidean(1)
    x = sample_path(DrivingSystem("iid", 2, {"dist": "normal", "mean": 1.0}), 10 ** 4)
    traj = compose_trajectory(e1, x)
    rep = ray_error(traj, e1.boundary([1]), 1.0)
    assert rep.terminal < 0.05
    assert rep.comparison_ok()


def test_ray_error_disk():
    d = PoincareDisk()
    path = sample_path(DrivingSystem("iid", 3, {"dist": "uniform"}), 10 ** 4)
    traj = compose_trajectory(d, path, lambda u: translation(1.0, 2 * math.pi * u))
    est = estimate_direction(traj)
    rep = ray_error(traj, est.point, traj.distances[-1] / traj.n)
    assert rep.terminal < 0.1
    assert rep.slope < 0


def test_wrong_direction_strictly_worse_on_tree():
    tree = FreeGroupCayley(2)
    letters = [parse_word(w) for w in "aAbB"]
    path = sample_path(DrivingSystem("iid", 4, {"dist": "categorical", "weights": [0.25] * 4}), 4000)
    traj = compose_trajectory(tree, path, lambda s: letters[int(s)], checkpoints=[1000, 2000])
    xi = estimate_direction(traj).point
    right, wrong = wrong_direction_gap(traj, xi)
    assert right == 0 and wrong > right
    assert prefix_agreement(traj, 1000, 2000)


def test_direction_drift_plane():
    e2 = Euclidean(2)
    x = sample_path(DrivingSystem("iid", 5, {"dist": "normal", "mean": 0.5, "dim": 2}), 2000)
    traj = compose_trajectory(e2, x, checkpoints=[1000, 2000])
    assert direction_drift(traj, 1000) < 0.05


def test_sublinear_raises():
    traj = compose_trajectory(Euclidean(1), sample_path(DrivingSystem("iid", 1, PM), 10 ** 4))
    with pytest.raises(BoundaryError):
        estimate_direction(traj, drift_threshold=0.05)


def test_birkhoff_from_boundary_examples():
    e1 = Euclidean(1)
    u = compose_trajectory(e1, sample_path(DrivingSystem("iid", 6, {"dist": "uniform"}), 10 ** 5))
    sd = birkhoff_from_boundary(u)
    assert sd.sign == 1 and abs(sd.value - 0.5) < 0.01
    neg = birkhoff_from_boundary(compose_trajectory(e1, const(-2.0, 100)))
    assert neg.value == -2.0
    centered = birkhoff_from_boundary(compose_trajectory(e1, sample_path(DrivingSystem("iid", 7, PM), 10 ** 5)))
    assert centered.flag == "sublinear" and centered.sign == 0


@pytest.mark.parametrize("model,tol", [
    (Euclidean(2), 1e-12), (FreeGroupCayley(2), 0), (PoincareDisk(), 1e-30), (PosDefCone(2), 1e-30),
], ids=repr)
def test_horofunction_cocycle_identity(model, tol):
    assert cocycle_identity(model, samples=40, seed=1) <= tol
