"""sqrt|S_n|/n for Pareto steps on either side of the moment boundary."""

from ergodiclab.driving import DrivingSystem
from ergodiclab.gauge import aaronson_check, power_gauge

for a in (0.9, 0.7, 0.4):
    f = DrivingSystem("iid", 1, {"dist": "symmetric_pareto", "tail_index": a})
    rep = aaronson_check(f, power_gauge(0.5), 10 ** 5, trials=8)
    hill = rep.guard.hill_index if rep.guard else float("nan")
    print(f"tail {a}: terminal {rep.terminal:.4f}  verdict {rep.verdict}  tail of sqrt|f| {hill:.2f}")
