"""Penalty terms, their tanh smooth approximations, and Sobolev diagnostics.

Supported kinds: l1 (level lambda1), ridge (level lambda2), elastic_net
(lambda1 l1 part + lambda2 squared-l2 part), adaptive_l1 (l1 with
per-coordinate weights, typically 1/|initial estimate|). Weights apply to the
l1 part only; the default weight vector is all ones.

The smooth family replaces each |t| by t*tanh(m*t), which is even, infinitely
differentiable, bounded above by |t|, and within 2|t|exp(-2m|t|) of it.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np

KINDS = ("l1", "ridge", "elastic_net", "adaptive_l1")
L1_KINDS = ("l1", "elastic_net", "adaptive_l1")

_trapezoid = getattr(np, "trapezoid", None) or np.trapz


def _sech2(x):
    # 4 e^{-2|x|} / (1 + e^{-2|x|})^2, overflow-free form of sech^2
    a = np.exp(-2.0 * np.abs(x))
    return 4.0 * a / (1.0 + a) ** 2


def tanh_abs(t, m):
    """Smooth stand-in for |t|: t * tanh(m t)."""
    return t * np.tanh(m * t)


def tanh_abs_d1(t, m):
    return np.tanh(m * t) + m * t * _sech2(m * t)


def tanh_abs_d2(t, m):
    return 2.0 * m * _sech2(m * t) * (1.0 - m * t * np.tanh(m * t))


@dataclass(frozen=True)
class PenaltySpec:
    kind: str
    lambda1: float = 0.0
    lambda2: float = 0.0
    weights: np.ndarray | None = None
    smooth: bool = False
    m: int = 64

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown penalty kind {self.kind!r}")
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("penalty levels must be >= 0")
        if self.kind == "ridge" and self.lambda1 != 0:
            raise ValueError("ridge penalty has no l1 level; use lambda2")
        if self.kind in ("l1", "adaptive_l1") and self.lambda2 != 0:
            raise ValueError(f"{self.kind} penalty has no l2 level")
        if self.m < 1:
            raise ValueError("approximation index m must be >= 1")
        if self.weights is not None:
            w = np.array(self.weights, dtype=float)
            if w.ndim != 1 or np.any(w < 0) or not np.all(np.isfinite(w)):
                raise ValueError("weights must be a finite nonnegative vector")
            w.setflags(write=False)
            object.__setattr__(self, "weights", w)

    def weights_for(self, p: int) -> np.ndarray:
        if self.weights is None:
            return np.ones(p)
        if self.weights.size != p:
            raise ValueError(f"weights have length {self.weights.size}, expected {p}")
        return self.weights

    @property
    def has_l1(self) -> bool:
        return self.kind in L1_KINDS and self.lambda1 > 0


def smooth_approx(penalty: PenaltySpec, m: int) -> PenaltySpec:
    """Smooth version of the penalty at approximation index m.

    l1-type values become lambda1 * sum_j w_j t_j tanh(m t_j); a ridge part is
    already smooth and passes through unchanged.
    """
    if m < 1:
        raise ValueError("approximation index m must be >= 1")
    return dataclasses.replace(penalty, smooth=True, m=int(m))


def evaluate_penalty(penalty: PenaltySpec, theta: np.ndarray, order: int):
    """Penalty value (order 0), gradient (1), or Hessian matrix (2) at theta.

    Non-smooth l1-type penalties refuse gradient/Hessian queries at
    coordinates that are exactly 0 and carry a nonzero weight.
    """
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1, or 2")
    theta = np.asarray(theta, dtype=float)
    p = theta.size
    w = penalty.weights_for(p)
    lam1 = penalty.lambda1 if penalty.kind in L1_KINDS else 0.0
    lam2 = penalty.lambda2 if penalty.kind in ("ridge", "elastic_net") else 0.0

    if order == 0:
        val = lam2 * float(theta @ theta)
        if lam1 > 0:
            if penalty.smooth:
                val += lam1 * float(w @ tanh_abs(theta, penalty.m))
            else:
                val += lam1 * float(w @ np.abs(theta))
        return val

    if lam1 > 0 and not penalty.smooth and np.any((theta == 0.0) & (w != 0.0)):
        raise ValueError("subgradient ambiguity; use smooth approximation")

    if order == 1:
        g = 2.0 * lam2 * theta
        if lam1 > 0:
            if penalty.smooth:
                g = g + lam1 * w * tanh_abs_d1(theta, penalty.m)
            else:
                g = g + lam1 * w * np.sign(theta)
        return g

    h = np.full(p, 2.0 * lam2)
    if lam1 > 0 and penalty.smooth:
        h = h + lam1 * w * tanh_abs_d2(theta, penalty.m)
    return np.diag(h)


@dataclass(frozen=True)
class SobolevReport:
    """Per-order squared quadrature distances between J^m and the l1 penalty."""

    m: int
    lam: float
    order0: float
    order1: float
    order2: float
    half_width: float
    step: float
    exclude_radius: float

    def __post_init__(self):
        for v in (self.order0, self.order1, self.order2):
            if not np.isfinite(v) or v < 0:
                raise ValueError("distances must be finite and >= 0")

    def csv_row(self) -> str:
        fields = [self.m, self.lam, self.order0, self.order1, self.order2,
                  self.exclude_radius]
        return ",".join(repr(v) if isinstance(v, float) else str(v) for v in fields)


SOBOLEV_CSV_HEADER = "m,lambda,order0,order1,order2,exclude_radius"


def sobolev_distance(m: int, lam: float, half_width: float = 1.0,
                     step: float = 1e-3, exclude_radius: float = 0.0) -> SobolevReport:
    """Trapezoid quadrature of |d^a(J^m - lam|.|)|^2 for a = 0, 1, 2.

    The grid is symmetric on [-B, B]. Points with |t| < exclude_radius are
    zeroed in the integrand for every order: the l1 target has no classical
    first/second derivative at 0, so the comparison is made away from the
    origin (the order-2 target is 0 there).
    """
    if m < 1:
        raise ValueError("approximation index m must be >= 1")
    if lam < 0:
        raise ValueError("lambda must be >= 0")
    if half_width <= 0 or step <= 0:
        raise ValueError("half_width and step must be > 0")
    if exclude_radius >= half_width:
        raise ValueError("exclude_radius must be smaller than the grid half-width")
    npts = int(round(2.0 * half_width / step)) + 1
    t = np.linspace(-half_width, half_width, npts)
    keep = np.abs(t) >= exclude_radius
    d0 = lam * (tanh_abs(t, m) - np.abs(t))
    d1 = lam * (tanh_abs_d1(t, m) - np.sign(t))
    d2 = lam * tanh_abs_d2(t, m)
    orders = []
    for d in (d0, d1, d2):
        f = np.where(keep, d * d, 0.0)
        orders.append(float(_trapezoid(f, t)))
    return SobolevReport(m=int(m), lam=float(lam), order0=orders[0],
                         order1=orders[1], order2=orders[2],
                         half_width=float(half_width), step=float(step),
                         exclude_radius=float(exclude_radius))
