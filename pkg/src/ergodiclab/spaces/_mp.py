"""Small helpers around mpmath used by the disk and cone models."""

import math

import mpmath
import numpy as np

mp = mpmath.mp

LN2 = math.log(2.0)


def flog(x):
    """Double-precision natural log of a positive mpf of any magnitude."""
    m, e = mpmath.frexp(x)
    return math.log(float(m)) + e * LN2


def to_matrix(a):
    """Convert a nested list / numpy array / mp matrix to an mp matrix."""
    if isinstance(a, mpmath.matrix):
        return a
    arr = np.asarray(a)
    if arr.dtype != object:
        arr = arr.astype(float)
    if arr.ndim != 2:
        raise ValueError("expected a matrix")
    return mpmath.matrix(arr.tolist())


def to_numpy(a):
    """Round an mp matrix (or scalar) to float64."""
    if isinstance(a, mpmath.matrix):
        return np.array([[float(a[i, j]) for j in range(a.cols)] for i in range(a.rows)])
    if isinstance(a, mpmath.mpc):
        return complex(a)
    return float(a)


def eye(d):
    return mpmath.eye(d)


def frob(a):
    return mpmath.sqrt(sum(a[i, j] ** 2 for i in range(a.rows) for j in range(a.cols)))


def sym_eig(M):
    """Eigenvalues (descending) and eigenvectors (columns) of a symmetric matrix."""
    M = (M + M.T) / 2
    E, Q = mpmath.eigsy(M)
    d = M.rows
    order = sorted(range(d), key=lambda i: E[i], reverse=True)
    w = [E[i] for i in order]
    K = mpmath.matrix(d, d)
    for c, i in enumerate(order):
        for r in range(d):
            K[r, c] = Q[r, i]
    return w, K


def sym_eigvals(M):
    """Eigenvalues of a symmetric positive definite matrix, descending.

    The 2x2 case uses the closed form with the small root taken as det/large
    root, which keeps full relative accuracy for very ill-conditioned input.
    """
    if M.rows == 2:
        a, b, c = M[0, 0], (M[0, 1] + M[1, 0]) / 2, M[1, 1]
        half = (a + c) / 2
        big = half + mpmath.sqrt(((a - c) / 2) ** 2 + b * b)
        return [big, (a * c - b * b) / big]
    return sym_eig(M)[0]


def sym_apply(M, fn):
    """Apply a scalar function to a symmetric matrix through its eigenbasis."""
    w, K = sym_eig(M)
    D = mpmath.diag([fn(x) for x in w])
    return K * D * K.T


def reverse(M):
    d = M.rows
    return mpmath.matrix([[M[d - 1 - i, d - 1 - j] for j in range(d)] for i in range(d)])
