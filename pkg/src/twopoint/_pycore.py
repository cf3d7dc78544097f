"""Pure-Python (NumPy) versions of the compiled kernels in ``_core.pyx``."""
import math

import numpy as np


def jacobi_table(alpha, beta, kmax, t):
    """Rows 0..kmax of P_k^{alpha,beta} evaluated at every entry of ``t``."""
    x = np.ascontiguousarray(t, dtype=np.float64).ravel()
    out = np.empty((kmax + 1, x.size))
    out[0] = 1.0
    if kmax == 0:
        return out
    ab = alpha + beta
    out[1] = (alpha + 1.0) + (ab + 2.0) * (x - 1.0) * 0.5
    for k in range(2, kmax + 1):
        c2k = 2.0 * k + ab
        a1 = 2.0 * k * (k + ab) * (c2k - 2.0)
        a2 = (c2k - 1.0) * c2k * (c2k - 2.0)
        a3 = (c2k - 1.0) * (alpha * alpha - beta * beta)
        a4 = 2.0 * (k + alpha - 1.0) * (k + beta - 1.0) * c2k
        out[k] = ((a2 * x + a3) * out[k - 1] - a4 * out[k - 2]) / a1
    return out


def _rotate(a, v, p, q, vectors):
    apq = a[p, q]
    theta = (a[q, q] - a[p, p]) / (2.0 * apq)
    if abs(theta) > 1e150:
        t = 0.5 / theta
    else:
        t = 1.0 / (abs(theta) + math.sqrt(theta * theta + 1.0))
        if theta < 0.0:
            t = -t
    c = 1.0 / math.sqrt(t * t + 1.0)
    s = t * c
    tau = s / (1.0 + c)
    app = a[p, p] - t * apq
    aqq = a[q, q] + t * apq
    g = a[:, p].copy()
    h = a[:, q].copy()
    a[:, p] = g - s * (h + g * tau)
    a[:, q] = h + s * (g - h * tau)
    a[p, :] = a[:, p]
    a[q, :] = a[:, q]
    a[p, p] = app
    a[q, q] = aqq
    a[p, q] = a[q, p] = 0.0
    if vectors:
        g = v[:, p].copy()
        h = v[:, q].copy()
        v[:, p] = g - s * (h + g * tau)
        v[:, q] = h + s * (g - h * tau)


def jacobi_sweeps(a, v, tol, max_sweeps, vectors):
    """Cyclic Jacobi rotations on ``a`` in place; returns sweeps used or -1."""
    n = a.shape[0]
    total = math.sqrt(float(np.sum(a * a)))
    iu = np.triu_indices(n, 1)
    for sweep in range(max_sweeps + 1):
        off = math.sqrt(2.0 * float(np.sum(a[iu] ** 2)))
        if off <= tol * total:
            return sweep
        if sweep == max_sweeps:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                if a[p, q] != 0.0:
                    _rotate(a, v, p, q, vectors)
    return -1
