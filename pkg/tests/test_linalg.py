import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from oracles import power_iteration_spectrum
from twopoint import _backend
from twopoint.errors import EigenSolverError
from twopoint.linalg import eigvalsh, jacobi_eigh
from twopoint.special_functions import JacobiParams, jacobi_table


def _random_symmetric(rng, n):
    a = rng.standard_normal((n, n))
    return a + a.T


def test_closed_form_2x2(backend):
    w, v = jacobi_eigh([[2.0, 1.0], [1.0, 2.0]], backend=backend)
    np.testing.assert_allclose(w, [1.0, 3.0], atol=1e-15)
    assert np.allclose(np.abs(v), np.sqrt(0.5))


def test_identity_and_rank_one(backend):
    np.testing.assert_array_equal(eigvalsh(np.eye(2), backend=backend), [1.0, 1.0])
    np.testing.assert_allclose(eigvalsh(np.ones((2, 2)), backend=backend), [0.0, 2.0], atol=1e-15)


def test_against_power_iteration_oracle(backend):
    rng = np.random.default_rng(2024)
    for i in range(100):
        n = int(rng.integers(1, 13))
        a = _random_symmetric(rng, n)
        w, v = jacobi_eigh(a, backend=backend)
        np.testing.assert_allclose(w, power_iteration_spectrum(a, seed=i), atol=1e-7)
        assert abs(w.sum() - np.trace(a)) <= 1e-10 * max(1.0, np.abs(a).sum())
        np.testing.assert_allclose(a @ v, v * w, atol=1e-9)
        np.testing.assert_allclose(v.T @ v, np.eye(n), atol=1e-12)


@given(hnp.arrays(np.float64, (6, 6), elements=st.floats(-10, 10)))
def test_spectrum_invariants(m):
    a = m + m.T
    w = eigvalsh(a)
    assert np.all(np.diff(w) >= 0)
    assert abs(w.sum() - np.trace(a)) <= 1e-10 * max(1.0, np.abs(a).sum())
    assert abs(np.sum(w * w) - np.sum(a * a)) <= 1e-9 * max(1.0, np.sum(a * a))


def test_zero_and_empty():
    np.testing.assert_array_equal(eigvalsh(np.zeros((3, 3))), np.zeros(3))
    assert eigvalsh(np.zeros((0, 0))).shape == (0,)


def test_rejects_nonsymmetric():
    with pytest.raises(ValueError):
        jacobi_eigh([[1.0, 2.0], [0.0, 1.0]])
    with pytest.raises(ValueError):
        jacobi_eigh(np.ones((2, 3)))


def test_sweep_cap():
    a = _random_symmetric(np.random.default_rng(0), 10)
    with pytest.raises(EigenSolverError):
        jacobi_eigh(a, max_sweeps=1, tol=1e-15)


def test_backends_agree():
    if len(_backend.BACKENDS) < 2:
        pytest.skip("compiled core not built")
    rng = np.random.default_rng(5)
    a = _random_symmetric(rng, 25)
    wc, _ = jacobi_eigh(a, backend="cython")
    wp, _ = jacobi_eigh(a, backend="python")
    np.testing.assert_allclose(wc, wp, atol=1e-12)
    t = np.linspace(-1, 1, 101)
    for ab in [(0.0, 0.0), (0.5, -0.5), (7.0, 3.0)]:
        p = JacobiParams(*ab)
        np.testing.assert_allclose(jacobi_table(p, 80, t, backend="cython"),
                                   jacobi_table(p, 80, t, backend="python"), rtol=1e-13, atol=1e-13)


def test_backend_lookup():
    assert _backend.get() is _backend.kernels
    with pytest.raises(ValueError):
        _backend.get("fortran")
