"""Simple random walk on F_2: drift 1/2, boundary measure, and the FK identity."""

from ergodiclab.groups import FreeGroup
from ergodiclab.walks import StepDistribution, drift, empirical_stationary_measure, fk_check

F2 = FreeGroup(2)
nu = StepDistribution.uniform(F2.generators())

wd = drift(F2, nu, 20000, trials=10, seed=1)
print(f"drift {wd.value:.4f} +- {wd.stderr:.4f}  (exact 1/2)")

mu = empirical_stationary_measure(F2, nu, 5000, trials=40, seed=2, depth=2)
for word, p in sorted(mu.cylinders.items())[:4]:
    print(f"  mu[{word}] = {p:.4f}  (exact 1/12)")

rep = fk_check(F2, nu, mu, wd, samples=10 ** 4, seed=3)
print(f"boundary integral {rep.rhs:.4f} +- {rep.rhs_stderr:.4f}, pass={rep.passed}")
