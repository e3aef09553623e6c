import numpy as np
import pytest

from nscap.errors import SolverError
from nscap.sdp import maximize_lmi


def test_lp_corner():
    # maximize y1 + y2 with y >= 0, y1 + 2 y2 <= 4, 3 y1 + y2 <= 6  ->  (8/5, 6/5)
    G = np.array([[1.0, 0.0], [0.0, 1.0], [-1.0, -2.0], [-3.0, -1.0]])
    g0 = np.array([0.0, 0.0, 4.0, 6.0])
    F0 = np.eye(1)
    Fs = np.zeros((2, 1, 1))
    res = maximize_lmi([1.0, 1.0], 0.0, F0, Fs, G, g0, [0.5, 0.5])
    assert res.value == pytest.approx(14 / 5, abs=1e-7)
    np.testing.assert_allclose(res.y, [8 / 5, 6 / 5], atol=1e-6)


def test_largest_eigenvalue_as_lmi():
    # maximize y subject to A - y I >= 0  ->  smallest eigenvalue of A
    rng = np.random.default_rng(1)
    B = rng.normal(size=(5, 5))
    A = B @ B.T + np.eye(5)
    Fs = -np.eye(5)[None]
    G = np.zeros((0, 1))
    res = maximize_lmi([1.0], 0.0, A, Fs, G, np.zeros(0), [0.0])
    assert res.value == pytest.approx(np.linalg.eigvalsh(A)[0], abs=1e-7)
    assert res.gap <= 1e-7


def test_two_by_two_offdiagonal():
    # maximize the off-diagonal of [[1, y], [y, 1]] >= 0  ->  1
    F0 = np.eye(2)
    Fs = np.array([[[0.0, 1.0], [1.0, 0.0]]])
    res = maximize_lmi([1.0], 0.0, F0, Fs, np.zeros((0, 1)), np.zeros(0), [0.0])
    assert res.value == pytest.approx(1.0, abs=1e-7)


def test_infeasible_start_rejected():
    with pytest.raises(SolverError):
        maximize_lmi([1.0], 0.0, np.eye(1), np.zeros((1, 1, 1)), np.array([[1.0]]),
                     np.array([0.0]), [-1.0])


def test_newton_budget_exhaustion_raises():
    G = np.array([[1.0], [-1.0]])
    g0 = np.array([0.0, 1.0])
    with pytest.raises(SolverError):
        maximize_lmi([1.0], 0.0, np.eye(1), np.zeros((1, 1, 1)), G, g0, [0.5], max_newton=2)
