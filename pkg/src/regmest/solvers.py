"""Reference optimizers for the penalized least-squares objective.

All objectives use the 1/n convention, (1/n)||Y - X theta||^2 + J(theta), so
the one-dimensional coordinate update soft-thresholds at half the penalty
level. The elastic net is reduced to a Lasso on augmented data; the exact
composition of the rescaling is documented at elastic_net and pinned by tests
against direct coordinate descent on the naive objective.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .data import Dataset
from .penalties import PenaltySpec, evaluate_penalty
from .zsystem import (RankingZSystem, ZSystem, empirical_z, ranking_z,
                      ranking_z_jacobian, z_jacobian)

DEFAULT_TOL = 1e-8
DEFAULT_MAX_SWEEPS = 10**5

#: 2-norm condition number of X above which FitResult carries a warning
#: (duplicated or near-collinear columns; CD still converges).
CONDITION_WARN_AT = 1e8


@dataclass(frozen=True)
class FitResult:
    theta_hat: np.ndarray
    objective: float
    iterations: int
    converged: bool
    active_set: tuple
    design_condition: float
    condition_warning: bool

    def __post_init__(self):
        t = np.array(self.theta_hat, dtype=float)
        t.setflags(write=False)
        object.__setattr__(self, "theta_hat", t)


def objective_value(dataset: Dataset, penalty: PenaltySpec, theta: np.ndarray) -> float:
    r = dataset.Y - dataset.X @ theta
    return float(r @ r) / dataset.n + evaluate_penalty(penalty, theta, 0)


def soft_threshold(z: float, gamma: float) -> float:
    """sign(z) * max(|z| - gamma, 0)."""
    if gamma < 0:
        raise ValueError("threshold must be >= 0")
    if z > gamma:
        return z - gamma
    if z < -gamma:
        return z + gamma
    return 0.0


def _design_condition(X: np.ndarray) -> tuple[float, bool]:
    c = float(np.linalg.cond(X))
    return c, (not np.isfinite(c)) or c > CONDITION_WARN_AT


def _check_monotone(trace: np.ndarray) -> None:
    if trace.size < 2:
        return
    slack = 1e-10 * max(1.0, float(np.max(np.abs(trace))))
    if np.any(np.diff(trace) > slack):
        raise RuntimeError("coordinate descent objective increased between sweeps")


def _cd_result(X, Y, gamma, theta0, tol, max_sweeps,
               objective_fn, design_for_condition) -> FitResult:
    theta, sweeps, converged, trace = kernels.cd_fit(
        np.ascontiguousarray(X, dtype=float), np.ascontiguousarray(Y, dtype=float),
        np.ascontiguousarray(gamma, dtype=float),
        np.ascontiguousarray(theta0, dtype=float), float(tol), int(max_sweeps))
    _check_monotone(trace)
    final = objective_fn(theta)
    active = tuple(int(j) for j in np.nonzero(theta)[0])
    cond, warn = _design_condition(design_for_condition)
    return FitResult(theta_hat=theta, objective=final, iterations=int(sweeps),
                     converged=bool(converged), active_set=active,
                     design_condition=cond, condition_warning=warn)


def lasso_cd(dataset: Dataset, lam: float, tol: float = DEFAULT_TOL,
             max_sweeps: int = DEFAULT_MAX_SWEEPS, weights: np.ndarray | None = None,
             theta0: np.ndarray | None = None) -> FitResult:
    """Shooting (cyclic coordinate descent) for the weighted-l1 objective.

    Each coordinate update is the exact one-dimensional minimizer, a
    soft-threshold of the partial residual correlation at level lam*w_j/2.
    Stops when the largest coordinate change in a sweep is <= tol; hitting
    max_sweeps first returns converged=False rather than raising.
    """
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    p = dataset.p
    w = np.ones(p) if weights is None else np.asarray(weights, dtype=float)
    if w.shape != (p,) or np.any(w < 0):
        raise ValueError("weights must be a nonnegative vector of length p")
    start = np.zeros(p) if theta0 is None else np.asarray(theta0, dtype=float)
    penalty = PenaltySpec(kind="l1", lambda1=lam, weights=w) if lam > 0 else \
        PenaltySpec(kind="l1", lambda1=0.0)
    return _cd_result(dataset.X, dataset.Y, lam * w, start, tol, max_sweeps,
                      lambda t: objective_value(dataset, penalty, t), dataset.X)


def elastic_net(dataset: Dataset, lambda1: float, lambda2: float,
                tol: float = DEFAULT_TOL, max_sweeps: int = DEFAULT_MAX_SWEEPS,
                weights: np.ndarray | None = None) -> FitResult:
    """Naive elastic net solved as a Lasso on augmented data.

    With n* = n + p augmented rows, the reduction that reproduces the
    minimizer of (1/n)||Y - X b||^2 + lambda1 ||b||_1 + lambda2 ||b||_2^2 is

        X* = [X ; sqrt(n lambda2) I] / sqrt(1 + lambda2),  y* = [Y ; 0],
        threshold gamma = (n / (n + p)) * lambda1 / sqrt(1 + lambda2),

    followed by the rescaling b_hat = b_hat^Lasso / sqrt(1 + lambda2). The
    l1 weights (if any) apply to the l1 part only.
    """
    if lambda1 < 0 or lambda2 < 0:
        raise ValueError("penalty levels must be >= 0")
    if lambda2 == 0.0:
        return lasso_cd(dataset, lambda1, tol=tol, max_sweeps=max_sweeps,
                        weights=weights)
    n, p = dataset.n, dataset.p
    w = np.ones(p) if weights is None else np.asarray(weights, dtype=float)
    scale = np.sqrt(1.0 + lambda2)
    Xa = np.vstack([dataset.X, np.sqrt(n * lambda2) * np.eye(p)]) / scale
    ya = np.concatenate([dataset.Y, np.zeros(p)])
    gamma = (n / (n + p)) * lambda1 / scale * w
    penalty = PenaltySpec(kind="elastic_net", lambda1=lambda1, lambda2=lambda2,
                          weights=None if weights is None else w)
    res = _cd_result(Xa, ya, gamma, np.zeros(p), tol, max_sweeps,
                     lambda b: 0.0, dataset.X)
    theta = res.theta_hat / scale
    active = tuple(int(j) for j in np.nonzero(theta)[0])
    return FitResult(theta_hat=theta,
                     objective=objective_value(dataset, penalty, theta),
                     iterations=res.iterations, converged=res.converged,
                     active_set=active, design_condition=res.design_condition,
                     condition_warning=res.condition_warning)


def adaptive_lasso(dataset: Dataset, lam: float, tol: float = DEFAULT_TOL,
                   max_sweeps: int = DEFAULT_MAX_SWEEPS,
                   base_weights: np.ndarray | None = None):
    """Two-stage adaptive Lasso: plain Lasso, then reweighting by 1/|init|.

    Stage-2 coordinates with a zero initial estimate are frozen at 0; the rest
    are refit with l1 weights base_w_j / |init_j|. Returns (init, final)
    FitResults; the final objective uses the stage-2 penalty on the active
    columns (frozen coordinates contribute nothing).
    """
    init = lasso_cd(dataset, lam, tol=tol, max_sweeps=max_sweeps,
                    weights=base_weights)
    p = dataset.p
    base = np.ones(p) if base_weights is None else np.asarray(base_weights, dtype=float)
    active = np.asarray(init.active_set, dtype=int)
    if active.size == 0:
        final = FitResult(theta_hat=np.zeros(p),
                          objective=float(dataset.Y @ dataset.Y) / dataset.n,
                          iterations=0, converged=True, active_set=(),
                          design_condition=init.design_condition,
                          condition_warning=init.condition_warning)
        return init, final
    Xs = np.ascontiguousarray(dataset.X[:, active])
    w2 = base[active] / np.abs(init.theta_hat[active])
    theta_s, sweeps, converged, trace = kernels.cd_fit(
        Xs, np.ascontiguousarray(dataset.Y), lam * w2,
        np.ascontiguousarray(init.theta_hat[active]), float(tol), int(max_sweeps))
    _check_monotone(trace)
    theta = np.zeros(p)
    theta[active] = theta_s
    r = dataset.Y - Xs @ theta_s
    obj = float(r @ r) / dataset.n + lam * float(w2 @ np.abs(theta_s))
    final = FitResult(theta_hat=theta, objective=obj, iterations=int(sweeps),
                      converged=bool(converged),
                      active_set=tuple(int(j) for j in np.nonzero(theta)[0]),
                      design_condition=init.design_condition,
                      condition_warning=init.condition_warning)
    return init, final


def ridge_init(dataset: Dataset, lambda2: float) -> np.ndarray:
    """Closed-form ridge (or OLS at lambda2=0) via a stable linear solve."""
    if lambda2 < 0:
        raise ValueError("lambda2 must be >= 0")
    n = dataset.n
    M = dataset.X.T @ dataset.X / n + lambda2 * np.eye(dataset.p)
    eigs = np.linalg.eigvalsh(M)
    if eigs[0] <= 1e-12 * max(1.0, eigs[-1]):
        raise ValueError(f"singular ridge system; smallest eigenvalue {eigs[0]:.6e}")
    return np.linalg.solve(M, dataset.X.T @ dataset.Y / n)


def _damped_newton(z_fn, jac_fn, theta0, tol, max_iter):
    """Newton on a generic Z-system with step halving on the Z-norm."""
    theta = np.array(theta0, dtype=float)
    z = z_fn(theta)
    znorm = float(np.linalg.norm(z))
    it = 0
    converged = znorm <= tol
    while not converged and it < max_iter:
        try:
            step = np.linalg.solve(jac_fn(theta), -z)
        except np.linalg.LinAlgError as e:
            raise ValueError("singular Z-Jacobian in Newton iteration") from e
        t = 1.0
        improved = False
        for _ in range(40):
            cand = theta + t * step
            cz = z_fn(cand)
            cn = float(np.linalg.norm(cz))
            if cn < znorm:
                theta, z, znorm = cand, cz, cn
                improved = True
                break
            t *= 0.5
        it += 1
        if not improved:
            break
        converged = znorm <= tol
    return theta, it, converged


def newton_zero(dataset: Dataset, penalty: PenaltySpec, theta0: np.ndarray,
                tol: float = 1e-10, max_iter: int = 100) -> FitResult:
    """Damped Newton iteration driving ||Z_n(theta)||_2 below tol.

    The penalty must be order-2 evaluable everywhere (smooth or ridge). Step
    lengths are halved until the Z-norm decreases; failure to improve ends the
    iteration with converged=False.
    """
    zsys = ZSystem(dataset=dataset, penalty=penalty)
    theta, it, converged = _damped_newton(
        lambda t: empirical_z(zsys, t), lambda t: z_jacobian(zsys, t),
        theta0, tol, max_iter)
    cond, warn = _design_condition(dataset.X)
    return FitResult(theta_hat=theta,
                     objective=objective_value(dataset, penalty, theta),
                     iterations=it, converged=bool(converged),
                     active_set=tuple(int(j) for j in np.nonzero(theta)[0]),
                     design_condition=cond, condition_warning=warn)


def ranking_newton(dataset: Dataset, penalty: PenaltySpec,
                   theta0: np.ndarray | None = None, tol: float = 1e-10,
                   max_iter: int = 100):
    """Zero of the pairwise-ranking Z-function via damped Newton.

    For the pairwise squared surrogate the system is affine, so this lands in
    one step; a smooth penalty adds curvature and more steps. Returns
    (theta, iterations, converged).
    """
    rz = RankingZSystem(dataset=dataset, penalty=penalty)
    start = np.zeros(dataset.p) if theta0 is None else theta0
    return _damped_newton(
        lambda t: ranking_z(rz, t), lambda t: ranking_z_jacobian(rz, t),
        start, tol, max_iter)
