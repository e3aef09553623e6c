"""Log-barrier interior-point solver for small linear matrix inequalities.

Solves::

    maximize    c . y + c0
    subject to  F0 + sum_k y_k F_k  is positive semidefinite
                G y + g0 >= 0        (elementwise)

starting from a strictly feasible ``y0``.  Sized for a handful of 13x13
moment matrices, so everything is dense numpy.
"""
from dataclasses import dataclass

import numpy as np

from nscap.errors import SolverError


@dataclass(frozen=True)
class LMIResult:
    y: np.ndarray
    value: float
    gap: float
    newton_steps: int


def _barrier_terms(y, F0, Fs, G, g0):
    """Return (matrix, slacks, logdet + sum log slacks) or None if infeasible."""
    M = F0 + np.tensordot(y, Fs, axes=1)
    s = G @ y + g0
    if np.any(s <= 0):
        return None
    try:
        L = np.linalg.cholesky(M)
    except np.linalg.LinAlgError:
        return None
    return M, s, 2 * np.log(np.diag(L)).sum() + np.log(s).sum()


def maximize_lmi(c, c0, F0, Fs, G, g0, y0, tol=1e-8, t0=1.0, mu=20.0, max_newton=5000,
                 newton_tol=1e-8):
    c = np.asarray(c, dtype=float)
    y = np.array(y0, dtype=float)
    if _barrier_terms(y, F0, Fs, G, g0) is None:
        raise SolverError("starting point is not strictly feasible")
    m = F0.shape[0] + len(g0)
    t = t0
    steps = 0
    while True:
        while True:
            M, s, _ = _barrier_terms(y, F0, Fs, G, g0)
            Minv = np.linalg.inv(M)
            SF = np.einsum("ab,kbc->kac", Minv, Fs)
            grad = t * c + np.einsum("kaa->k", SF) + G.T @ (1 / s)
            hess = -np.einsum("iab,jba->ij", SF, SF) - (G.T * (1 / s**2)) @ G
            step = np.linalg.solve(hess, -grad)
            decrement = float(grad @ step)
            if decrement / 2 < newton_tol:
                break

            def phi(v):
                terms = _barrier_terms(v, F0, Fs, G, g0)
                return None if terms is None else t * (c @ v) + terms[2]

            base = phi(y)
            alpha = 1.0
            while True:
                trial = phi(y + alpha * step)
                if trial is not None and trial >= base + 0.25 * alpha * decrement:
                    break
                alpha *= 0.5
                if alpha < 1e-14:
                    if decrement < 1e3 * newton_tol:
                        break  # roundoff floor near the optimum
                    raise SolverError("line search stalled",
                                      {"t": t, "newton_steps": steps, "decrement": decrement})
            if alpha < 1e-14:
                break
            y = y + alpha * step
            steps += 1
            if steps >= max_newton:
                raise SolverError("Newton iteration budget exhausted",
                                  {"t": t, "newton_steps": steps, "gap_bound": m / t,
                                   "decrement": decrement})
        if m / t < tol:
            return LMIResult(y, float(c @ y + c0), m / t, steps)
        t *= mu
