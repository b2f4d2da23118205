"""Random hyperbolic translations: the orbit escapes along a geodesic ray."""

import math

from ergodiclab.boundary import estimate_direction, ray_error, verify_main_theorem
from ergodiclab.cocycle import compose_trajectory, default_checkpoints
from ergodiclab.driving import DrivingSystem, sample_path
from ergodiclab.spaces import PoincareDisk
from ergodiclab.spaces.disk import translation

disk = PoincareDisk()
N = 4000
path = sample_path(DrivingSystem("iid", 7, {"dist": "uniform"}), 2 * N)
cps = sorted(set(default_checkpoints(2 * N).tolist()) | {N})
traj = compose_trajectory(disk, path, lambda u: translation(1.0, 2 * math.pi * u), checkpoints=cps)

xi = estimate_direction(traj).point
rep = verify_main_theorem(traj, xi, depth=N)
for n, a, b in list(zip(rep.checkpoints, rep.a, rep.b))[::8]:
    print(f"n={int(n):5d}  -h(Z_n)/n={a:.5f}  d(Z_n)/n={b:.5f}")

ray = ray_error(traj, xi, traj.distances[2 * N] / (2 * N), depth=N)
print(f"ray error at N: {ray.terminal:.4f}, log-log slope {ray.slope:.2f}")
