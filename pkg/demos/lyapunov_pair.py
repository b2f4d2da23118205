"""Lyapunov spectrum of a random product of two positive matrices."""

import numpy as np

from ergodiclab.driving import DrivingSystem, sample_path
from ergodiclab.oseledets import MatrixCocycle, lyapunov_spectrum, product_exponents, verify_omet

A = np.array([[2.0, 1.0], [1.0, 1.0]])
B = np.array([[1.0, 1.0], [1.0, 2.0]])
coc = MatrixCocycle(2, lambda s: A if int(s) == 0 else B, "pair")
path = sample_path(DrivingSystem("iid", 3, {"dist": "categorical", "weights": [0.5, 0.5]}), 5000)

spec = lyapunov_spectrum(coc, path)
print("QR exponents      ", spec.exponents)
print("exact product     ", product_exponents(coc, path))
rep = verify_omet(coc, spec, path, 0.1)
print(f"det residual {rep.det_residual:.1e}; entry bounds from n0={rep.n0}")
