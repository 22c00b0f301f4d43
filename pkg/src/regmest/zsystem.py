"""Scores and Z-functions for penalized squared loss and pairwise ranking.

Sign convention: the score is the gradient of the loss, phi = d/dtheta L, so
Z_n(theta) = grad empirical risk + grad penalty and a minimizer solves
Z_n(theta) = 0. Some references print the negative gradient for the same
object; the influence-curve formula is invariant under that flip because the
Jacobian inverse changes sign with it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import kernels
from .data import Dataset
from .penalties import PenaltySpec, evaluate_penalty

SCORE_CONVENTION = "gradient"


@dataclass(frozen=True)
class ZSystem:
    """Mean-score Z-function Z_n(theta) for one dataset and penalty."""

    dataset: Dataset
    penalty: PenaltySpec
    convention: str = SCORE_CONVENTION


@dataclass(frozen=True)
class RankingZSystem:
    """Pairwise-ranking Z-function; surrogate is the pairwise squared loss."""

    dataset: Dataset
    penalty: PenaltySpec
    surrogate: str = "pairwise_squared"
    convention: str = SCORE_CONVENTION


def squared_loss_score(x: np.ndarray, y: float, theta: np.ndarray) -> np.ndarray:
    """Gradient of (y - x'theta)^2 in theta: 2 x (x'theta - y)."""
    x = np.asarray(x, dtype=float)
    return 2.0 * x * (float(x @ theta) - y)


def score_matrix(dataset: Dataset, theta: np.ndarray) -> np.ndarray:
    """All per-observation scores as rows of an n x p matrix."""
    r = dataset.X @ theta - dataset.Y
    return 2.0 * dataset.X * r[:, None]


def empirical_z(zsys: ZSystem, theta: np.ndarray) -> np.ndarray:
    """(1/n) sum of scores + penalty gradient; the empirical Z-equation LHS."""
    theta = np.asarray(theta, dtype=float)
    ds = zsys.dataset
    g = (2.0 / ds.n) * (ds.X.T @ (ds.X @ theta - ds.Y))
    return g + evaluate_penalty(zsys.penalty, theta, 1)


def z_jacobian(zsys: ZSystem, theta: np.ndarray) -> np.ndarray:
    """(2/n) X'X + penalty Hessian; symmetric for separable penalties."""
    theta = np.asarray(theta, dtype=float)
    ds = zsys.dataset
    return (2.0 / ds.n) * (ds.X.T @ ds.X) + evaluate_penalty(zsys.penalty, theta, 2)


def ranking_score(xi, yi: float, xj, yj: float, theta) -> np.ndarray:
    """Gradient of the pairwise squared surrogate ((yi-yj) - (xi-xj)'theta)^2."""
    d = np.asarray(xi, dtype=float) - np.asarray(xj, dtype=float)
    return -2.0 * d * ((yi - yj) - float(d @ theta))


def ranking_z(rzsys: RankingZSystem, theta: np.ndarray, method: str = "fast") -> np.ndarray:
    """U-statistic average of ranking scores over ordered pairs, plus grad J.

    method "pairs" runs the direct O(n^2 p) double sum; "fast" uses the
    algebraically equal centered-moment form 4/(n-1) (Sxx theta - sxy), which
    is O(n p). Both are exposed so the shortcut can be certified against the
    direct sum.
    """
    theta = np.asarray(theta, dtype=float)
    ds = rzsys.dataset
    if ds.n < 2:
        raise ValueError("ranking Z needs n >= 2")
    if method == "pairs":
        u = kernels.ranking_pairs(ds.X, ds.Y, theta)
    elif method == "fast":
        Xc = ds.X - ds.X.mean(axis=0)
        yc = ds.Y - ds.Y.mean()
        u = 4.0 / (ds.n - 1) * (Xc.T @ (Xc @ theta) - Xc.T @ yc)
    else:
        raise ValueError(f"unknown method {method!r}")
    return u + evaluate_penalty(rzsys.penalty, theta, 1)


def ranking_z_jacobian(rzsys: RankingZSystem, theta: np.ndarray) -> np.ndarray:
    """Jacobian of ranking_z: 4/(n-1) Sxx + penalty Hessian."""
    theta = np.asarray(theta, dtype=float)
    ds = rzsys.dataset
    if ds.n < 2:
        raise ValueError("ranking Z needs n >= 2")
    Xc = ds.X - ds.X.mean(axis=0)
    return 4.0 / (ds.n - 1) * (Xc.T @ Xc) + evaluate_penalty(rzsys.penalty, theta, 2)
