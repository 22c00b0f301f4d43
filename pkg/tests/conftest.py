"""Shared fixtures and independent oracle implementations.

The oracles here (naive elastic-net coordinate descent, brute-force ranking
double sum, central finite differences) are deliberately written from scratch
against the objective definitions, without calling into the package solvers,
so the tests can certify the fast paths against slow-but-obvious code.
"""

import numpy as np
import pytest

_acceptance_lines = []


@pytest.fixture(scope="session")
def acceptance_log():
    """Collector for the one-line-per-criterion acceptance summary."""
    return _acceptance_lines


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_lines:
        return
    terminalreporter.section("acceptance criteria")
    for line in _acceptance_lines:
        terminalreporter.write_line(line)


def naive_en_cd(X, Y, lam1, lam2, weights=None, tol=1e-12, max_sweeps=100000):
    """Plain coordinate descent on (1/n)||Y - X t||^2 + lam1 sum w|t| + lam2 ||t||^2.

    Works directly on the unaugmented problem: the exact coordinate minimizer
    is soft(X_j'r_j / n, lam1 w_j / 2) / (||X_j||^2/n + lam2). Slow python
    loops, no shared code with the package solvers.
    """
    n, p = X.shape
    w = np.ones(p) if weights is None else np.asarray(weights, dtype=float)
    theta = np.zeros(p)
    col_sq = (X * X).sum(axis=0) / n
    r = Y.astype(float).copy()
    for _ in range(max_sweeps):
        delta = 0.0
        for j in range(p):
            if col_sq[j] == 0.0 and lam2 == 0.0:
                continue
            old = theta[j]
            rho = float(X[:, j] @ r) / n + col_sq[j] * old
            cut = lam1 * w[j] / 2.0
            num = np.sign(rho) * max(abs(rho) - cut, 0.0)
            new = num / (col_sq[j] + lam2)
            if new != old:
                r -= (new - old) * X[:, j]
                theta[j] = new
                delta = max(delta, abs(new - old))
        if delta <= tol:
            break
    return theta


def brute_ranking_z(X, y, theta):
    """Average of -2 (x_i - x_j)((y_i - y_j) - (x_i - x_j)'theta) over i != j."""
    n, p = X.shape
    total = np.zeros(p)
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            d = X[i] - X[j]
            total += -2.0 * d * ((y[i] - y[j]) - float(d @ theta))
    return total / (n * (n - 1))


def fd_gradient(f, x, h=1e-6):
    x = np.asarray(x, dtype=float)
    g = np.zeros(x.size)
    for j in range(x.size):
        e = np.zeros(x.size)
        e[j] = h
        g[j] = (f(x + e) - f(x - e)) / (2.0 * h)
    return g


def fd_jacobian(f, x, h=1e-6):
    """Central-difference Jacobian of a vector-valued f, one column per coordinate."""
    x = np.asarray(x, dtype=float)
    cols = []
    for j in range(x.size):
        e = np.zeros(x.size)
        e[j] = h
        cols.append((f(x + e) - f(x - e)) / (2.0 * h))
    return np.column_stack(cols)


def random_regression(rng, n, p, sigma=0.5, sparse=False):
    X = rng.normal(size=(n, p))
    theta = rng.normal(size=p)
    if sparse:
        theta[rng.random(p) < 0.4] = 0.0
    Y = X @ theta + sigma * rng.normal(size=n)
    return X, theta, Y


def orthonormal_design(rng, n, p):
    """X with X'X = n I exactly up to float roundoff (scaled thin Q)."""
    q, _ = np.linalg.qr(rng.normal(size=(n, p)))
    return np.sqrt(n) * q
