"""Data model, synthetic linear-model data, and the coercivity parameter box.

The parameter box realizes the compact restriction argument: any minimizer of
empirical risk + penalty has objective no worse than at 0, so the penalty value
at the minimizer is at most the empirical risk at 0. For an l1-type penalty
this yields an explicit l1-ball.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .penalties import PenaltySpec


def _readonly(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Dataset:
    """Design matrix X (n x p) and response Y (length n), immutable."""

    X: np.ndarray
    Y: np.ndarray
    intercept_included: bool = False

    def __post_init__(self):
        X = _readonly(np.atleast_2d(self.X))
        Y = _readonly(np.atleast_1d(self.Y))
        if X.ndim != 2 or Y.ndim != 1:
            raise ValueError("X must be a matrix and Y a vector")
        n, p = X.shape
        if n < 1 or p < 1:
            raise ValueError("need n >= 1 and p >= 1")
        if Y.shape[0] != n:
            raise ValueError("X and Y disagree on n")
        if not np.all(np.isfinite(X)) or not np.all(np.isfinite(Y)):
            raise ValueError("non-finite entries in data")
        if self.intercept_included and not np.all(X[:, 0] == 1.0):
            raise ValueError("intercept flag set but first column is not all ones")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "Y", Y)

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class LinearModelSpec:
    """True parameter, noise level, and Gaussian design for Y = X theta0 + eps.

    theta0 has length p including the intercept coordinate (first) when
    ``intercept`` is set; design_covariance then describes the remaining p-1
    covariates. Noise is Gaussian in v1 (closed-form L2-derivative for the
    moment checks); sigma = 0 is allowed and gives noiseless responses.
    """

    theta0: np.ndarray
    sigma: float = 1.0
    design_covariance: np.ndarray | None = None
    intercept: bool = False
    noise: str = "gaussian"

    def __post_init__(self):
        theta0 = _readonly(np.atleast_1d(self.theta0))
        if theta0.ndim != 1 or theta0.size < 1:
            raise ValueError("theta0 must be a nonempty vector")
        if not np.isfinite(self.sigma) or self.sigma < 0:
            raise ValueError("sigma must be finite and >= 0")
        if self.noise != "gaussian":
            raise ValueError("only gaussian noise is supported in v1")
        q = theta0.size - 1 if self.intercept else theta0.size
        if self.intercept and q == 0:
            raise ValueError("intercept-only model needs p >= 2")
        cov = self.design_covariance
        if cov is None:
            cov = np.eye(q)
        cov = _readonly(np.atleast_2d(cov))
        if cov.shape != (q, q):
            raise ValueError(f"design covariance must be {q}x{q}, got {cov.shape}")
        if not np.allclose(cov, cov.T):
            raise ValueError("design covariance must be symmetric")
        try:
            np.linalg.cholesky(cov)
        except np.linalg.LinAlgError as e:
            raise ValueError("design covariance not positive definite") from e
        object.__setattr__(self, "theta0", theta0)
        object.__setattr__(self, "design_covariance", cov)

    @property
    def p(self) -> int:
        return self.theta0.size


@dataclass(frozen=True)
class ParameterBox:
    """l1-ball {theta : ||theta||_1 <= bound} that contains every minimizer."""

    bound: float
    dimension: int

    def __post_init__(self):
        if not np.isfinite(self.bound) or self.bound < 0:
            raise ValueError("bound must be finite and >= 0")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")

    def contains(self, theta: np.ndarray, strict: bool = False) -> bool:
        l1 = float(np.sum(np.abs(theta)))
        return l1 < self.bound if strict else l1 <= self.bound


def generate_linear_data(spec: LinearModelSpec, n: int, seed: int) -> Dataset:
    """Draw a Dataset from the linear model; pure function of (spec, n, seed).

    Rows of the covariate block are i.i.d. zero-mean Gaussian with the
    configured covariance; an intercept column of ones is prepended when the
    spec flags it. Draw order (covariates, then noise) is fixed so identical
    inputs give bit-identical output.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    rng = np.random.default_rng(seed)
    L = np.linalg.cholesky(spec.design_covariance)
    Z = rng.standard_normal((n, L.shape[0])) @ L.T
    X = np.column_stack([np.ones(n), Z]) if spec.intercept else Z
    eps = spec.sigma * rng.standard_normal(n) if spec.sigma > 0 else np.zeros(n)
    Y = X @ spec.theta0 + eps
    return Dataset(X=X, Y=Y, intercept_included=spec.intercept)


def empirical_risk_at_zero(dataset: Dataset) -> float:
    return float(dataset.Y @ dataset.Y) / dataset.n


def parameter_box(dataset: Dataset, penalty: PenaltySpec) -> ParameterBox:
    """Coercivity-derived l1 bound B: any minimizer theta has ||theta||_1 <= B.

    J(theta_hat) <= empirical risk at 0, so for an l1 part with level lambda1
    and weights w, B = risk0 / (lambda1 * min w). For a pure ridge penalty the
    l2 bound sqrt(risk0/lambda2) is converted to l1 via the sqrt(p) norm
    inequality.
    """
    r0 = empirical_risk_at_zero(dataset)
    p = dataset.p
    if penalty.kind == "ridge":
        if penalty.lambda2 <= 0:
            raise ValueError("no coercive penalty; box undefined")
        return ParameterBox(bound=float(np.sqrt(p * r0 / penalty.lambda2)), dimension=p)
    if penalty.lambda1 <= 0:
        raise ValueError("no coercive penalty; box undefined")
    w = penalty.weights_for(p)
    min_w = float(np.min(w))
    if min_w <= 0:
        raise ValueError("zero penalty weight on a coordinate; l1 box undefined")
    return ParameterBox(bound=r0 / (penalty.lambda1 * min_w), dimension=p)


def export_dataset_csv(dataset: Dataset, path) -> None:
    """Write `x1,...,xp,y` rows with round-trip decimal formatting."""
    with open(path, "w", newline="") as fh:
        wr = csv.writer(fh)
        wr.writerow([f"x{j + 1}" for j in range(dataset.p)] + ["y"])
        for i in range(dataset.n):
            wr.writerow([repr(float(v)) for v in dataset.X[i]] + [repr(float(dataset.Y[i]))])


def import_dataset_csv(path, intercept_included: bool = False) -> Dataset:
    with open(path, newline="") as fh:
        rd = csv.reader(fh)
        header = next(rd)
        p = len(header) - 1
        if p < 1 or header[-1] != "y" or header[0] != "x1":
            raise ValueError("malformed dataset CSV header")
        rows = [[float(v) for v in row] for row in rd]
    arr = np.asarray(rows, dtype=float)
    return Dataset(X=arr[:, :p], Y=arr[:, p], intercept_included=intercept_included)
