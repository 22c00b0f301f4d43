"""Influence curves, the adaptive-Lasso partial IC, and one-step estimators.

The influence curve row for observation (x, y) at reference point theta_ref is

    psi = -A^{-1} (phi((x, y), theta_ref) + grad J(theta_ref)),

with A the Z-Jacobian at theta_ref. All solves are linear-system solves, never
explicit inverses. The reference point is the fitted estimate in feasible use
and the true parameter in simulations; both are accepted.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .data import Dataset
from .penalties import PenaltySpec, evaluate_penalty, smooth_approx
from .solvers import FitResult
from .zsystem import ZSystem, score_matrix, squared_loss_score, z_jacobian

#: condition number of the Z-Jacobian above which the IC solve refuses to run
SINGULAR_COND = 1e14


@dataclass(frozen=True)
class ICSample:
    """Per-observation influence curve rows psi (n x p) and the solve context."""

    psi: np.ndarray
    jacobian_used: np.ndarray
    theta_ref: np.ndarray
    penalty_ref: PenaltySpec
    dataset: Dataset
    cond: float


@dataclass(frozen=True)
class ICCheckReport:
    mean_psi: np.ndarray
    mean_psi_se: np.ndarray
    l2_norms_finite: bool
    cond_iii_matrix: np.ndarray | None
    verdicts: dict


def _checked_jacobian(dataset: Dataset, theta_ref, penalty) -> tuple[np.ndarray, float]:
    A = z_jacobian(ZSystem(dataset=dataset, penalty=penalty), theta_ref)
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > SINGULAR_COND:
        raise ValueError(f"singular Z-Jacobian; condition number {cond:.6e}")
    return A, cond


def influence_curve(dataset: Dataset, theta_ref: np.ndarray,
                    penalty: PenaltySpec) -> ICSample:
    """IC rows for every observation at theta_ref under a smooth penalty."""
    theta_ref = np.asarray(theta_ref, dtype=float)
    A, cond = _checked_jacobian(dataset, theta_ref, penalty)
    bracket = score_matrix(dataset, theta_ref) + evaluate_penalty(penalty, theta_ref, 1)
    psi = -np.linalg.solve(A, bracket.T).T
    return ICSample(psi=psi, jacobian_used=A, theta_ref=theta_ref,
                    penalty_ref=penalty, dataset=dataset, cond=cond)


def one_step(theta_tilde: np.ndarray, dataset: Dataset,
             penalty: PenaltySpec) -> np.ndarray:
    """Single Newton step on Z_n from theta_tilde; exact when Z_n is affine."""
    from .zsystem import empirical_z

    theta_tilde = np.asarray(theta_tilde, dtype=float)
    zsys = ZSystem(dataset=dataset, penalty=penalty)
    A, _ = _checked_jacobian(dataset, theta_tilde, penalty)
    return theta_tilde - np.linalg.solve(A, empirical_z(zsys, theta_tilde))


def _adaptive_active(init: FitResult, final: FitResult) -> np.ndarray:
    init_nz = init.theta_hat != 0.0
    final_nz = final.theta_hat != 0.0
    return np.nonzero(init_nz & final_nz)[0]


def _adaptive_block(dataset: Dataset, init: FitResult, final: FitResult,
                    lam: float, m: int, base_weights):
    """Active-set sub-problem whose IC gives the nonzero adaptive components."""
    active = _adaptive_active(init, final)
    p = dataset.p
    base = np.ones(p) if base_weights is None else np.asarray(base_weights, dtype=float)
    if active.size == 0:
        return active, None, None, None
    w_sub = base[active] / np.abs(init.theta_hat[active])
    pen_sub = smooth_approx(
        PenaltySpec(kind="adaptive_l1", lambda1=lam, weights=w_sub), m)
    sub = Dataset(X=dataset.X[:, active], Y=dataset.Y)
    theta_sub = final.theta_hat[active]
    return active, sub, pen_sub, theta_sub


def adaptive_lasso_ic(dataset: Dataset, fits, lam: float, m: int = 64,
                      index: int | None = None, x=None, y: float | None = None,
                      base_weights=None) -> np.ndarray:
    """Case-split adaptive-Lasso IC for one observation, embedded in R^p.

    Component j is exactly 0 whenever the initial or the final estimate
    vanishes there; the remaining block is the reweighted-Lasso IC with
    per-coordinate level lam / |init_j| (smooth approximation at index m),
    computed on the active columns only (a partial influence curve).

    The observation is either a dataset row (``index``) or a new pair
    (``x``, ``y``).
    """
    init, final = fits
    if (index is None) == (x is None or y is None):
        raise ValueError("pass either an observation index or a new (x, y) pair")
    active, sub, pen_sub, theta_sub = _adaptive_block(
        dataset, init, final, lam, m, base_weights)
    out = np.zeros(dataset.p)
    if active.size == 0:
        return out
    if index is not None:
        x_sub = sub.X[index]
        y_val = float(sub.Y[index])
    else:
        x_sub = np.asarray(x, dtype=float)[active]
        y_val = float(y)
    A, _ = _checked_jacobian(sub, theta_sub, pen_sub)
    bracket = squared_loss_score(x_sub, y_val, theta_sub) + \
        evaluate_penalty(pen_sub, theta_sub, 1)
    out[active] = -np.linalg.solve(A, bracket)
    return out


def adaptive_lasso_ic_sample(dataset: Dataset, fits, lam: float, m: int = 64,
                             base_weights=None) -> ICSample:
    """Adaptive IC rows for all observations at once (same case split)."""
    init, final = fits
    active, sub, pen_sub, theta_sub = _adaptive_block(
        dataset, init, final, lam, m, base_weights)
    psi = np.zeros((dataset.n, dataset.p))
    if active.size == 0:
        A = np.zeros((0, 0))
        return ICSample(psi=psi, jacobian_used=A, theta_ref=final.theta_hat,
                        penalty_ref=PenaltySpec(kind="adaptive_l1", lambda1=lam),
                        dataset=dataset, cond=1.0)
    ics = influence_curve(sub, theta_sub, pen_sub)
    psi[:, active] = ics.psi
    return ICSample(psi=psi, jacobian_used=ics.jacobian_used,
                    theta_ref=final.theta_hat, penalty_ref=pen_sub,
                    dataset=dataset, cond=ics.cond)


def ic_moment_checks(ics: ICSample, spec=None) -> ICCheckReport:
    """Empirical checks of the IC moment conditions.

    i)  rows and the sample second moment are finite;
    ii) componentwise |mean psi_j| <= 3 * SE_j;
    iii) only for Gaussian noise and an unpenalized reference (spec given,
         lambda = 0): (1/n) sum_i psi_i Lambda_i' compared to the identity,
         with Lambda_i = x_i (y_i - x_i' theta0) / sigma^2. Entrywise
         threshold 0.1. Skipped (None) otherwise; penalized ICs are partial
         ICs and have no closed-form Lambda here.
    """
    psi = ics.psi
    n = psi.shape[0]
    if n < 30:
        raise ValueError("need n >= 30 for meaningful standard errors")
    finite = bool(np.all(np.isfinite(psi)))
    second_moment = float(np.mean(np.sum(psi * psi, axis=1))) if finite else np.inf
    cond_i = bool(finite and np.isfinite(second_moment))
    mean_psi = psi.mean(axis=0)
    se = psi.std(axis=0, ddof=1) / np.sqrt(n)
    cond_ii = bool(np.all(np.abs(mean_psi) <= 3.0 * se)) if cond_i else False
    cond_iii_matrix = None
    cond_iii = None
    pen = ics.penalty_ref
    unpenalized = pen.lambda1 == 0.0 and pen.lambda2 == 0.0
    if spec is not None and unpenalized and spec.noise == "gaussian" and spec.sigma > 0:
        ds = ics.dataset
        resid = ds.Y - ds.X @ spec.theta0
        Lam = ds.X * resid[:, None] / spec.sigma**2
        cond_iii_matrix = psi.T @ Lam / n
        cond_iii = bool(np.max(np.abs(cond_iii_matrix - np.eye(psi.shape[1]))) <= 0.1)
    verdicts = {"cond_i": cond_i, "cond_ii": cond_ii, "cond_iii": cond_iii}
    return ICCheckReport(mean_psi=mean_psi, mean_psi_se=se,
                         l2_norms_finite=cond_i, cond_iii_matrix=cond_iii_matrix,
                         verdicts=verdicts)


def export_ic_csv(ics: ICSample, path) -> None:
    """Write rows `i,psi_1,...,psi_p` with round-trip decimal formatting."""
    n, p = ics.psi.shape
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow(["i"] + [f"psi_{j + 1}" for j in range(p)])
        for i in range(n):
            wr.writerow([i] + [repr(float(v)) for v in ics.psi[i]])
