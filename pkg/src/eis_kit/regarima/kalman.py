"""Kalman innovations for ARMA(p,q) noise at unit innovation variance.

State-space form with state dimension r = max(p, q+1): companion
transition matrix carrying the AR coefficients, moving-average loadings as
the disturbance vector, observation of the first state with no measurement
noise. The covariance recursion is shared across any number of observed
columns, so whitening a target together with its regressors costs one
filter pass. Innovation variances F depend only on (phi, theta) and scale
linearly with the innovation variance, which the callers concentrate out.

The kernel is jitted with numba; the first call per process compiles (the
result is cached on disk next to this module).
"""

from __future__ import annotations

import numpy as np
from numba import njit

from ..errors import NumericalError


@njit(cache=True)
def _innovations_kernel(cols, phi, theta):  # pragma: no cover - jitted
    n, m = cols.shape
    p = phi.shape[0]
    q = theta.shape[0]
    r = max(p, q + 1)
    ph = np.zeros(r)
    for i in range(p):
        ph[i] = phi[i]
    th = np.zeros(r)
    th[0] = 1.0
    for i in range(q):
        th[i + 1] = theta[i]

    # Stationary initial covariance: (I - kron(T, T)) vec(P0) = vec(th th')
    rr = r * r
    A = np.zeros((rr, rr))
    bvec = np.zeros(rr)
    for i in range(r):
        for j in range(r):
            row = i * r + j
            bvec[row] = th[i] * th[j]
            for k in range(r):
                tik = 0.0
                if k == 0:
                    tik += ph[i]
                if k == i + 1:
                    tik += 1.0
                if tik == 0.0:
                    continue
                for l in range(r):
                    tjl = 0.0
                    if l == 0:
                        tjl += ph[j]
                    if l == j + 1:
                        tjl += 1.0
                    if tjl != 0.0:
                        A[row, k * r + l] -= tik * tjl
            A[row, row] += 1.0
    P = np.linalg.solve(A, bvec).reshape(r, r)

    V = np.empty((n, m))
    F = np.empty(n)
    a = np.zeros((r, m))
    ap = np.empty(r)
    K = np.empty(r)
    Ppost = np.empty((r, r))
    TP = np.empty((r, r))
    for t in range(n):
        Ft = P[0, 0]
        if not (Ft > 1e-300) or not np.isfinite(Ft):
            F[0] = -1.0
            return V, F
        F[t] = Ft
        for i in range(r):
            K[i] = P[i, 0] / Ft
        for j in range(m):
            v = cols[t, j] - a[0, j]
            V[t, j] = v
            for i in range(r):
                ap[i] = a[i, j] + K[i] * v
            for i in range(r - 1):
                a[i, j] = ph[i] * ap[0] + ap[i + 1]
            a[r - 1, j] = ph[r - 1] * ap[0]
        for i in range(r):
            for jj in range(r):
                Ppost[i, jj] = P[i, jj] - K[i] * P[0, jj]
        for i in range(r):
            for jj in range(r):
                val = ph[i] * Ppost[0, jj]
                if i < r - 1:
                    val += Ppost[i + 1, jj]
                TP[i, jj] = val
        for i in range(r):
            for jj in range(r):
                val = ph[jj] * TP[i, 0]
                if jj < r - 1:
                    val += TP[i, jj + 1]
                P[i, jj] = val + th[i] * th[jj]
    return V, F


def kalman_innovations(cols, phi, theta):
    """Innovations V (n, m) and variances F (n,) for columns under the
    unit-variance ARMA(p,q) model. Requires a stationary/invertible
    parameter point; a degenerate covariance recursion raises
    :class:`NumericalError`.
    """
    cols = np.ascontiguousarray(cols, dtype=np.float64)
    if cols.ndim == 1:
        cols = cols[:, None]
    phi = np.ascontiguousarray(phi, dtype=np.float64)
    theta = np.ascontiguousarray(theta, dtype=np.float64)
    V, F = _innovations_kernel(cols, phi, theta)
    if F[0] < 0.0:
        raise NumericalError("Kalman covariance recursion degenerated")
    return V, F
