"""Hot numeric kernels: coordinate-descent sweeps and the pairwise ranking sum.

Each kernel exists twice: a numba @njit version and a pure-numpy version with
the same loop structure. ``REGMEST_NO_NUMBA=1`` selects the numpy path (see
backend.py). Within one backend results are deterministic; across backends the
low-order bits can differ because BLAS reductions and scalar loops round
differently.
"""

import numpy as np

from .backend import NUMBA_ENABLED


def _cd_fit_numpy(X, y, gamma, theta0, tol, max_sweeps):
    """Cyclic coordinate descent on (1/n)||y - X t||^2 + sum_j gamma[j] |t_j|.

    gamma[j] is the full per-coordinate l1 factor (penalty level times weight).
    Returns (theta, sweeps_done, converged, objective_per_sweep).
    """
    n, p = X.shape
    theta = theta0.copy()
    # col_sq[j] = ||X_j||^2 / n; zero columns are skipped (coordinate stays put)
    col_sq = np.einsum("ij,ij->j", X, X) / n
    r = y - X @ theta
    obj_trace = np.empty(max_sweeps)
    sweeps = 0
    converged = False
    for s in range(max_sweeps):
        max_delta = 0.0
        for j in range(p):
            a = col_sq[j]
            if a == 0.0:
                continue
            old = theta[j]
            z = (X[:, j] @ r) / n + a * old
            thr = 0.5 * gamma[j]
            if z > thr:
                new = (z - thr) / a
            elif z < -thr:
                new = (z + thr) / a
            else:
                new = 0.0
            if new != old:
                r -= X[:, j] * (new - old)
                theta[j] = new
            d = abs(new - old)
            if d > max_delta:
                max_delta = d
        obj_trace[s] = (r @ r) / n + np.abs(theta) @ gamma
        sweeps = s + 1
        if max_delta <= tol:
            converged = True
            break
    return theta, sweeps, converged, obj_trace[:sweeps]


def _ranking_pairs_numpy(X, y, theta):
    """Average of the pairwise score over all ordered pairs i != j (direct sum)."""
    n, p = X.shape
    u = y - X @ theta
    acc = np.zeros(p)
    for i in range(n):
        d = X[i] - X  # (n, p) rows x_i - x_j
        e = u[i] - u  # residual differences absorb (y_i-y_j) - (x_i-x_j)'theta
        acc += -2.0 * d.T @ e
    return acc / (n * (n - 1))


if NUMBA_ENABLED:
    from numba import njit

    @njit(cache=True)
    def _cd_fit_numba(X, y, gamma, theta0, tol, max_sweeps):
        n, p = X.shape
        theta = theta0.copy()
        col_sq = np.zeros(p)
        for j in range(p):
            s = 0.0
            for i in range(n):
                s += X[i, j] * X[i, j]
            col_sq[j] = s / n
        r = np.empty(n)
        for i in range(n):
            acc = y[i]
            for j in range(p):
                acc -= X[i, j] * theta[j]
            r[i] = acc
        obj_trace = np.empty(max_sweeps)
        sweeps = 0
        converged = False
        for s in range(max_sweeps):
            max_delta = 0.0
            for j in range(p):
                a = col_sq[j]
                if a == 0.0:
                    continue
                old = theta[j]
                dot = 0.0
                for i in range(n):
                    dot += X[i, j] * r[i]
                z = dot / n + a * old
                thr = 0.5 * gamma[j]
                if z > thr:
                    new = (z - thr) / a
                elif z < -thr:
                    new = (z + thr) / a
                else:
                    new = 0.0
                if new != old:
                    diff = new - old
                    for i in range(n):
                        r[i] -= X[i, j] * diff
                    theta[j] = new
                d = abs(new - old)
                if d > max_delta:
                    max_delta = d
            rss = 0.0
            for i in range(n):
                rss += r[i] * r[i]
            pen = 0.0
            for j in range(p):
                pen += gamma[j] * abs(theta[j])
            obj_trace[s] = rss / n + pen
            sweeps = s + 1
            if max_delta <= tol:
                converged = True
                break
        return theta, sweeps, converged, obj_trace[:sweeps]

    @njit(cache=True)
    def _ranking_pairs_numba(X, y, theta):
        n, p = X.shape
        u = np.empty(n)
        for i in range(n):
            acc = y[i]
            for j in range(p):
                acc -= X[i, j] * theta[j]
            u[i] = acc
        out = np.zeros(p)
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                e = u[i] - u[j]
                for k in range(p):
                    out[k] += -2.0 * (X[i, k] - X[j, k]) * e
        return out / (n * (n - 1))

    cd_fit = _cd_fit_numba
    ranking_pairs = _ranking_pairs_numba
else:
    cd_fit = _cd_fit_numpy
    ranking_pairs = _ranking_pairs_numpy
