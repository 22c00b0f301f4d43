"""Monte Carlo harness: seeding, schedules, sandwiches, and self-audits."""

import dataclasses
import json
import math

import numpy as np
import pytest

from regmest import (Dataset, LinearModelSpec, MCConfig, MCRow, PenaltySpec,
                     check_seed_grid, generate_linear_data,
                     ic_convergence_experiment, lambda_schedule, mix_seed,
                     normality_experiment, onestep_experiment,
                     population_moment_matrix, remainder_scaling_experiment,
                     report_to_dict, sandwich_covariance, splitmix64,
                     verify_report, write_rows_csv)
from regmest.harness import MC_CSV_HEADER, _check_failures

SPEC2 = LinearModelSpec(theta0=np.array([1.0, 2.0]), sigma=1.0)


def test_splitmix_is_deterministic_and_bounded():
    assert splitmix64(0) == splitmix64(0)
    vals = {splitmix64(z) for z in range(1000)}
    assert len(vals) == 1000
    assert all(0 <= v < 2**64 for v in vals)


def test_mix_seed_collision_free_on_grid():
    seeds = set()
    for master in (0, 1, 7):
        for n in (100, 200, 400, 800, 1600):
            for rep in range(500):
                seeds.add(mix_seed(master, n, rep))
    assert len(seeds) == 3 * 5 * 500
    cfg = MCConfig(spec=SPEC2, n_grid=(100, 200), reps=50, estimator="ols")
    check_seed_grid(cfg)


def test_lambda_schedule_value_and_shape():
    want = math.sqrt(math.log(10) / 100)
    assert abs(lambda_schedule(100, 10, 1.0) - want) < 1e-15
    assert lambda_schedule(400, 10, 1.0) == want / 2.0
    assert lambda_schedule(100, 10, 2.0) == 2.0 * lambda_schedule(100, 10, 1.0)
    assert lambda_schedule(100, 50, 1.0) > lambda_schedule(100, 10, 1.0)
    with pytest.raises(ValueError, match="p >= 2"):
        lambda_schedule(100, 1, 1.0)
    with pytest.raises(ValueError, match="n >= 2"):
        lambda_schedule(1, 10, 1.0)
    with pytest.raises(ValueError, match="> 0"):
        lambda_schedule(100, 10, 0.0)


def test_sandwich_closed_forms():
    cov = np.array([[2.0, 0.3], [0.3, 1.0]])
    spec = LinearModelSpec(theta0=np.array([1.0, -1.0]), sigma=1.5,
                           design_covariance=cov)
    ols = sandwich_covariance(spec, None)
    assert np.allclose(ols, 1.5**2 * np.linalg.inv(cov), atol=1e-12)
    lam2 = 0.4
    pen = PenaltySpec(kind="ridge", lambda2=lam2)
    ridge = sandwich_covariance(spec, pen)
    R = np.linalg.inv(cov + lam2 * np.eye(2))
    assert np.allclose(ridge, 1.5**2 * R @ cov @ R, atol=1e-12)


def test_sandwich_accepts_empirical_moment():
    rng = np.random.default_rng(0)
    X = rng.normal(size=(500, 2))
    M = X.T @ X / 500
    got = sandwich_covariance(SPEC2, None, moment=M)
    assert np.allclose(got, np.linalg.inv(M), atol=1e-10)


def test_population_moment_with_intercept():
    spec = LinearModelSpec(theta0=np.array([0.5, 1.0, -1.0]), intercept=True,
                           design_covariance=np.array([[2.0, 0.0], [0.0, 3.0]]))
    M = population_moment_matrix(spec)
    want = np.diag([1.0, 2.0, 3.0])
    assert np.array_equal(M, want)


def test_config_validation():
    with pytest.raises(ValueError, match="ascending"):
        MCConfig(spec=SPEC2, n_grid=(200, 100), reps=10, estimator="ols")
    with pytest.raises(ValueError, match="unknown estimator"):
        MCConfig(spec=SPEC2, n_grid=(100,), reps=10, estimator="mle")
    with pytest.raises(ValueError, match="unknown lambda rule"):
        MCConfig(spec=SPEC2, n_grid=(100,), reps=10, estimator="ols",
                 lambda_rule="cv")
    with pytest.raises(ValueError):
        MCConfig(spec=SPEC2, n_grid=(100,), reps=0, estimator="ols")
    with pytest.raises(ValueError):
        MCConfig(spec=SPEC2, n_grid=(100,), reps=10, estimator="ols",
                 cov_threshold=0.0)


def test_exact_linear_estimator_has_zero_remainder():
    cfg = MCConfig(spec=SPEC2, n_grid=(50, 100, 200, 400), reps=100,
                   estimator="exact_linear", master_seed=3)
    report = remainder_scaling_experiment(cfg)
    assert report.verdicts["linearity"] is True
    assert report.verdicts["zero_remainder"] is True
    assert report.slope is None
    assert all(row.remainder_norm < 1e-14 for row in report.rows)
    assert verify_report(report)


def test_linearity_report_is_reproducible_and_audited():
    cfg = MCConfig(spec=SPEC2, n_grid=(50, 100, 200, 400), reps=100,
                   estimator="ols", master_seed=5)
    a = remainder_scaling_experiment(cfg)
    b = remainder_scaling_experiment(cfg)
    assert a.rows == b.rows
    assert a.mean_remainder == b.mean_remainder
    assert a.slope == b.slope
    assert verify_report(a)
    json.dumps(report_to_dict(a))  # must be serializable as-is


def test_verify_report_detects_tampering():
    cfg = MCConfig(spec=SPEC2, n_grid=(50, 100, 200, 400), reps=100,
                   estimator="ols", master_seed=6)
    report = remainder_scaling_experiment(cfg)
    wrong_mean = dataclasses.replace(
        report, mean_remainder=tuple(v * 1.01 for v in report.mean_remainder))
    assert not verify_report(wrong_mean)
    bad_row = dataclasses.replace(report.rows[0], remainder_norm=99.0)
    wrong_rows = dataclasses.replace(report,
                                     rows=(bad_row,) + report.rows[1:])
    assert not verify_report(wrong_rows)
    flipped = dataclasses.replace(
        report, verdicts={**report.verdicts,
                          "linearity": not report.verdicts["linearity"]})
    assert not verify_report(flipped)


def test_rows_csv_schema_and_stability(tmp_path):
    cfg = MCConfig(spec=SPEC2, n_grid=(50, 100, 200, 400), reps=100,
                   estimator="ols", master_seed=7)
    report = remainder_scaling_experiment(cfg)
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    write_rows_csv(report.rows, p1)
    write_rows_csv(report.rows, p2)
    assert p1.read_bytes() == p2.read_bytes()
    lines = p1.read_text().splitlines()
    assert lines[0] == MC_CSV_HEADER
    assert len(lines) == 1 + 4 * 100
    first = lines[1].split(",")
    assert first[3] == "ols" and first[8] == "1"
    assert float(first[6]) == report.rows[0].remainder_norm


def test_m_rule_sqrt_n_recorded_in_rows():
    cfg = MCConfig(spec=SPEC2, n_grid=(50, 100, 200, 400), reps=100,
                   estimator="lasso", lambda_rule="schedule", lambda_value=1.0,
                   m_rule="sqrt_n", master_seed=8)
    report = remainder_scaling_experiment(cfg)
    by_n = {row.n: row.m for row in report.rows}
    assert by_n == {50: 8, 100: 10, 200: 15, 400: 20}


def test_feasible_psi_variant_runs():
    cfg = MCConfig(spec=SPEC2, n_grid=(50, 100, 200, 400), reps=100,
                   estimator="lasso", lambda_rule="schedule", lambda_value=1.0,
                   feasible_psi=True, master_seed=9)
    report = remainder_scaling_experiment(cfg)
    assert report.failures == 0
    assert all(np.isfinite(row.remainder_norm) for row in report.rows)


def test_slope_experiments_reject_thin_configs():
    with pytest.raises(ValueError, match="reps >= 100"):
        remainder_scaling_experiment(
            MCConfig(spec=SPEC2, n_grid=(50, 100, 200, 400), reps=10,
                     estimator="ols"))
    with pytest.raises(ValueError, match="at least 4 grid points"):
        remainder_scaling_experiment(
            MCConfig(spec=SPEC2, n_grid=(100, 200), reps=100, estimator="ols"))
    with pytest.raises(ValueError, match="estimator 'onestep'"):
        onestep_experiment(
            MCConfig(spec=SPEC2, n_grid=(50, 100, 200, 400), reps=100,
                     estimator="ols"))


def test_failure_budget_enforced():
    def row(rep, ok):
        return MCRow(n=100, rep=rep, seed=rep, estimator="ols", lam=0.0, m=64,
                     remainder_norm=float("nan") if not ok else 0.1,
                     theta_err_norm=0.1, fit_converged=ok)

    fine = [row(r, r >= 2) for r in range(100)]
    assert _check_failures(fine) == 2
    broken = [row(r, r >= 10) for r in range(100)]
    with pytest.raises(RuntimeError, match="replications failed"):
        _check_failures(broken)


def test_normality_experiment_small_smoke():
    cfg = MCConfig(spec=SPEC2, n_grid=(400,), reps=300, estimator="ols",
                   master_seed=10, cov_threshold=0.5)
    report = normality_experiment(cfg)
    assert report.extra["n_used"] == 400
    assert report.extra["frobenius_rel_error"] < 0.5
    assert report.verdicts["normality"] is True
    assert verify_report(report)
    tampered = dataclasses.replace(
        report, extra={**report.extra, "frobenius_rel_error": 0.0})
    assert not verify_report(tampered)


def test_normality_fixed_design_shares_one_design():
    cfg = MCConfig(spec=SPEC2, n_grid=(300,), reps=40, estimator="ridge",
                   lambda2=0.5, master_seed=11, fixed_design=True,
                   cov_threshold=5.0)
    report = normality_experiment(cfg)
    assert report.failures == 0
    # same seed, same flag: the shared design must make runs reproducible
    again = normality_experiment(cfg)
    assert report.extra["frobenius_rel_error"] == again.extra["frobenius_rel_error"]


def test_ic_convergence_monotone_and_edge_cases():
    ds = generate_linear_data(SPEC2, 200, seed=12)
    rep = ic_convergence_experiment(ds, 0.2, (8, 16, 32, 64, 128))
    assert rep.m_ref == 128
    assert rep.monotone
    assert rep.sup_row_diff[-1] == 0.0
    assert rep.failures == ()
    # lam = 0: the smoothing index is inert, every difference is exactly 0
    flat = ic_convergence_experiment(ds, 0.0, (4, 8, 16))
    assert flat.sup_row_diff == (0.0, 0.0, 0.0)
    dup = ic_convergence_experiment(ds, 0.2, (16, 16))
    assert dup.sup_row_diff[0] == dup.sup_row_diff[1] == 0.0
    with pytest.raises(ValueError, match="non-decreasing"):
        ic_convergence_experiment(ds, 0.2, (16, 8))
    with pytest.raises(ValueError, match=">= 2 entries"):
        ic_convergence_experiment(ds, 0.2, (16,))
