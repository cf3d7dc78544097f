"""Symmetric eigen-solver by cyclic Jacobi rotations.

Used for Golub-Welsch quadrature and for Gram-matrix spectra. The rotation
sweeps run in the compiled core when it is available.
"""
import numpy as np

from . import _backend
from .config import DEFAULTS
from .errors import EigenSolverError


def jacobi_eigh(matrix, tol=None, max_sweeps=None, vectors=True, backend=None):
    """Eigen-decomposition of a real symmetric matrix.

    Parameters
    ----------
    matrix : (n, n) array_like
        Symmetric to within 1e-12 relative to its largest entry.
    tol : float, optional
        Stop once the off-diagonal Frobenius norm is at most ``tol`` times
        the Frobenius norm of ``matrix``.
    max_sweeps : int, optional
        Cap on full cyclic sweeps; exceeding it raises
        :class:`~twopoint.errors.EigenSolverError`.
    vectors : bool
        Accumulate eigenvectors.
    backend : {"cython", "python"}, optional
        Force a kernel backend (benchmarks and tests).

    Returns
    -------
    w : (n,) ndarray
        Eigenvalues in ascending order.
    v : (n, n) ndarray or None
        Orthonormal eigenvectors as columns, matching ``w``.
    """
    tol = DEFAULTS.eig_tol if tol is None else tol
    max_sweeps = DEFAULTS.eig_max_sweeps if max_sweeps is None else max_sweeps
    a = np.array(matrix, dtype=np.float64, order="C", copy=True)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    if scale and float(np.max(np.abs(a - a.T))) > 1e-12 * scale:
        raise ValueError("matrix is not symmetric within 1e-12")
    a = 0.5 * (a + a.T)
    v = np.eye(n) if vectors else np.empty((0, 0))
    sweeps = _backend.get(backend).jacobi_sweeps(a, v, tol, max_sweeps, vectors)
    if sweeps < 0:
        raise EigenSolverError(f"Jacobi rotations did not converge in {max_sweeps} sweeps (n={n})")
    w = np.diag(a).copy()
    order = np.argsort(w, kind="stable")
    return w[order], (v[:, order] if vectors else None)


def eigvalsh(matrix, **kwargs):
    """Ascending eigenvalues only."""
    return jacobi_eigh(matrix, vectors=False, **kwargs)[0]
