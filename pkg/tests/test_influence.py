"""Influence curves, one-step updates, and the moment-condition checks."""

import numpy as np
import pytest

from regmest import (Dataset, LinearModelSpec, PenaltySpec, ZSystem,
                     adaptive_lasso, adaptive_lasso_ic,
                     adaptive_lasso_ic_sample, empirical_z, export_ic_csv,
                     generate_linear_data, ic_moment_checks, influence_curve,
                     newton_zero, one_step, ridge_init, smooth_approx)
from regmest.zsystem import score_matrix
from regmest.penalties import evaluate_penalty
from conftest import random_regression

NOPEN = PenaltySpec(kind="l1", lambda1=0.0)


def small_ds(seed=0, n=40, p=3):
    rng = np.random.default_rng(seed)
    X, _, Y = random_regression(rng, n, p)
    return Dataset(X=X, Y=Y)


def test_unpenalized_ic_closed_form():
    ds = small_ds()
    theta = np.array([0.5, -1.0, 2.0])
    ics = influence_curve(ds, theta, NOPEN)
    Minv = np.linalg.inv(ds.X.T @ ds.X / ds.n)
    for i in (0, 7, 39):
        want = Minv @ ds.X[i] * (ds.Y[i] - ds.X[i] @ theta)
        assert np.allclose(ics.psi[i], want, atol=1e-10)


def test_zero_residual_row_has_zero_ic():
    ds = small_ds(seed=1)
    theta = np.linalg.lstsq(ds.X, ds.Y, rcond=None)[0]
    Y2 = ds.Y.copy()
    Y2[5] = ds.X[5] @ theta  # force an exact fit on row 5
    ics = influence_curve(Dataset(X=ds.X, Y=Y2), theta, NOPEN)
    assert np.allclose(ics.psi[5], np.zeros(3), atol=1e-12)


def test_mean_ic_vanishes_at_the_solution():
    ds = small_ds(seed=2)
    pen = PenaltySpec(kind="ridge", lambda2=0.3)
    theta = ridge_init(ds, 0.3)
    ics = influence_curve(ds, theta, pen)
    assert np.linalg.norm(ics.psi.mean(axis=0)) < 1e-10


def test_ic_rows_satisfy_the_defining_solve():
    ds = small_ds(seed=3)
    pen = smooth_approx(PenaltySpec(kind="l1", lambda1=0.2), 32)
    theta = newton_zero(ds, pen, ridge_init(ds, 0.2)).theta_hat
    ics = influence_curve(ds, theta, pen)
    bracket = score_matrix(ds, theta) + evaluate_penalty(pen, theta, 1)
    back = -(ics.jacobian_used @ ics.psi.T).T
    assert np.max(np.abs(back - bracket)) / np.max(np.abs(bracket)) < 1e-10
    assert ics.cond < 1e8


def test_singular_jacobian_is_refused():
    X = np.ones((30, 2))
    X[:, 1] = X[:, 0]
    ds = Dataset(X=X, Y=np.arange(30.0))
    with pytest.raises(ValueError, match="singular Z-Jacobian; condition number"):
        influence_curve(ds, np.zeros(2), NOPEN)


def test_one_step_is_exact_on_ridge():
    ds = small_ds(seed=4)
    pen = PenaltySpec(kind="ridge", lambda2=0.5)
    want = ridge_init(ds, 0.5)
    rng = np.random.default_rng(5)
    for _ in range(20):
        start = rng.normal(size=3) * 3.0
        got = one_step(start, ds, pen)
        assert np.max(np.abs(got - want)) < 1e-10


def test_one_step_fixed_point_and_descent():
    rng = np.random.default_rng(6)
    for seed in range(20):
        ds = small_ds(seed=100 + seed)
        pen = smooth_approx(PenaltySpec(kind="l1", lambda1=0.3), 16)
        full = newton_zero(ds, pen, ridge_init(ds, 0.3)).theta_hat
        assert np.max(np.abs(one_step(full, ds, pen) - full)) < 1e-9
        # descent is a local property: keep the start inside the Newton
        # basin, which for this smoothing has radius about 1/m
        start = full + 0.01 * rng.normal(size=3)
        zsys = ZSystem(dataset=ds, penalty=pen)
        before = np.linalg.norm(empirical_z(zsys, start))
        after = np.linalg.norm(empirical_z(zsys, one_step(start, ds, pen)))
        assert after < before


def test_one_step_permutation_equivariance():
    ds = small_ds(seed=7)
    pen = smooth_approx(PenaltySpec(kind="l1", lambda1=0.2), 16)
    start = ridge_init(ds, 0.2)
    perm = np.random.default_rng(8).permutation(ds.n)
    shuffled = Dataset(X=ds.X[perm], Y=ds.Y[perm])
    assert np.allclose(one_step(start, ds, pen),
                       one_step(start, shuffled, pen), atol=1e-12)


def adaptive_instance(seed):
    rng = np.random.default_rng(seed)
    n = 60
    X = rng.normal(size=(n, 4))
    theta0 = np.array([2.0, 0.0, -1.5, 0.0])
    Y = X @ theta0 + 0.5 * rng.normal(size=n)
    return Dataset(X=X, Y=Y)


def test_adaptive_ic_zero_cases_and_embedding():
    ds = adaptive_instance(0)
    lam = 0.25
    fits = adaptive_lasso(ds, lam)
    init, final = fits
    inactive = [j for j in range(4) if init.theta_hat[j] == 0.0
                or final.theta_hat[j] == 0.0]
    psi_row = adaptive_lasso_ic(ds, fits, lam, index=3)
    for j in inactive:
        assert psi_row[j] == 0.0
    sample = adaptive_lasso_ic_sample(ds, fits, lam)
    assert sample.psi.shape == (60, 4)
    assert np.allclose(sample.psi[3], psi_row, atol=1e-12)
    assert np.all(sample.psi[:, inactive] == 0.0)


def test_adaptive_ic_new_point_interface():
    ds = adaptive_instance(1)
    fits = adaptive_lasso(ds, 0.25)
    x_new = np.array([0.3, -1.0, 0.7, 2.0])
    psi = adaptive_lasso_ic(ds, fits, 0.25, x=x_new, y=1.0)
    assert psi.shape == (4,)
    with pytest.raises(ValueError, match="either an observation index"):
        adaptive_lasso_ic(ds, fits, 0.25)
    with pytest.raises(ValueError, match="either an observation index"):
        adaptive_lasso_ic(ds, fits, 0.25, index=0, x=x_new, y=1.0)


def test_adaptive_ic_all_active_reduces_to_reweighted_ic():
    # dense truth, tiny penalty: both stages keep every coordinate
    rng = np.random.default_rng(2)
    X = rng.normal(size=(80, 3))
    Y = X @ np.array([2.0, -1.0, 1.5]) + 0.3 * rng.normal(size=80)
    ds = Dataset(X=X, Y=Y)
    lam, m = 0.05, 64
    fits = adaptive_lasso(ds, lam)
    init, final = fits
    assert len(init.active_set) == 3 and len(final.active_set) == 3
    sample = adaptive_lasso_ic_sample(ds, fits, lam, m=m)
    w2 = 1.0 / np.abs(init.theta_hat)
    pen = smooth_approx(PenaltySpec(kind="adaptive_l1", lambda1=lam,
                                    weights=w2), m)
    direct = influence_curve(ds, final.theta_hat, pen)
    assert np.max(np.abs(sample.psi - direct.psi)) < 1e-12


def test_adaptive_ic_empty_active_set_is_all_zero():
    ds = adaptive_instance(3)
    lam = 100.0
    fits = adaptive_lasso(ds, lam)
    sample = adaptive_lasso_ic_sample(ds, fits, lam)
    assert np.array_equal(sample.psi, np.zeros((60, 4)))


def test_moment_checks_pass_at_truth():
    spec = LinearModelSpec(theta0=np.array([1.0, 2.0]), sigma=1.0)
    ds = generate_linear_data(spec, 4000, seed=11)
    ics = influence_curve(ds, spec.theta0, NOPEN)
    rep = ic_moment_checks(ics, spec)
    assert rep.verdicts["cond_i"] is True
    assert rep.verdicts["cond_ii"] is True
    assert rep.verdicts["cond_iii"] is True
    assert np.max(np.abs(rep.cond_iii_matrix - np.eye(2))) <= 0.1


def test_moment_checks_flag_shifted_ic():
    ds = small_ds(seed=12, n=100, p=2)
    psi = np.full((100, 2), 1e6)
    psi[:, :] += np.random.default_rng(13).normal(size=(100, 2))
    ics = influence_curve(ds, np.zeros(2), NOPEN)
    shifted = type(ics)(psi=psi, jacobian_used=ics.jacobian_used,
                        theta_ref=ics.theta_ref, penalty_ref=ics.penalty_ref,
                        dataset=ics.dataset, cond=ics.cond)
    rep = ic_moment_checks(shifted)
    assert rep.verdicts["cond_ii"] is False
    assert rep.verdicts["cond_iii"] is None  # no spec given


def test_moment_checks_zero_ic_and_small_n():
    ds = small_ds(seed=14, n=50, p=2)
    ics = influence_curve(ds, np.zeros(2), NOPEN)
    zeroed = type(ics)(psi=np.zeros((50, 2)), jacobian_used=ics.jacobian_used,
                       theta_ref=ics.theta_ref, penalty_ref=ics.penalty_ref,
                       dataset=ics.dataset, cond=ics.cond)
    rep = ic_moment_checks(zeroed)
    assert rep.verdicts["cond_ii"] is True  # 0 <= 3 * 0
    tiny = influence_curve(small_ds(seed=15, n=20, p=2), np.zeros(2), NOPEN)
    with pytest.raises(ValueError, match="n >= 30"):
        ic_moment_checks(tiny)


def test_ic_csv_format(tmp_path):
    ds = small_ds(seed=16, n=5, p=2)
    ics = influence_curve(ds, np.zeros(2), NOPEN)
    path = tmp_path / "ic.csv"
    export_ic_csv(ics, path)
    lines = path.read_text().splitlines()
    assert lines[0] == "i,psi_1,psi_2"
    assert len(lines) == 6
    first = lines[1].split(",")
    assert first[0] == "0"
    assert float(first[1]) == ics.psi[0, 0]
