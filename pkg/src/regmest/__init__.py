"""Regularized M-estimation via Z-equations.

Lasso-family solvers, influence curves and one-step estimators for penalized
least squares, tanh smooth approximations of the l1 penalty with Sobolev
diagnostics, and seeded Monte Carlo experiments for asymptotic linearity and
normality. Hot loops are numba-jitted with a pure-numpy fallback selected by
the REGMEST_NO_NUMBA environment variable (see regmest.backend).
"""

from .backend import NUMBA_ENABLED
from .data import (Dataset, LinearModelSpec, ParameterBox,
                   empirical_risk_at_zero, export_dataset_csv,
                   generate_linear_data, import_dataset_csv, parameter_box)
from .harness import (ICConvergenceReport, MCConfig, MCReport, MCRow,
                      check_seed_grid, ic_convergence_experiment,
                      lambda_schedule, mix_seed, normality_experiment,
                      onestep_experiment, population_moment_matrix,
                      remainder_scaling_experiment, report_to_dict,
                      sandwich_covariance, splitmix64, verify_report,
                      write_rows_csv)
from .influence import (ICCheckReport, ICSample, adaptive_lasso_ic,
                        adaptive_lasso_ic_sample, export_ic_csv,
                        ic_moment_checks, influence_curve, one_step)
from .penalties import (SOBOLEV_CSV_HEADER, PenaltySpec, SobolevReport,
                        evaluate_penalty, smooth_approx, sobolev_distance,
                        tanh_abs, tanh_abs_d1, tanh_abs_d2)
from .solvers import (FitResult, adaptive_lasso, elastic_net, lasso_cd,
                      newton_zero, objective_value, ranking_newton, ridge_init,
                      soft_threshold)
from .zsystem import (RankingZSystem, ZSystem, empirical_z, ranking_score,
                      ranking_z, ranking_z_jacobian, score_matrix,
                      squared_loss_score, z_jacobian)

__version__ = "0.1.0"

__all__ = [
    "Dataset", "LinearModelSpec", "ParameterBox", "PenaltySpec",
    "SobolevReport", "SOBOLEV_CSV_HEADER", "FitResult", "ZSystem",
    "RankingZSystem", "ICSample", "ICCheckReport", "ICConvergenceReport",
    "MCConfig", "MCReport", "MCRow", "NUMBA_ENABLED", "generate_linear_data",
    "empirical_risk_at_zero", "parameter_box", "export_dataset_csv",
    "import_dataset_csv", "evaluate_penalty", "smooth_approx",
    "sobolev_distance", "tanh_abs", "tanh_abs_d1", "tanh_abs_d2",
    "squared_loss_score", "score_matrix", "empirical_z", "z_jacobian",
    "ranking_score", "ranking_z", "ranking_z_jacobian", "soft_threshold",
    "lasso_cd", "elastic_net", "adaptive_lasso", "ridge_init", "newton_zero",
    "ranking_newton", "objective_value", "influence_curve",
    "adaptive_lasso_ic", "adaptive_lasso_ic_sample", "one_step",
    "ic_moment_checks", "export_ic_csv", "splitmix64", "mix_seed",
    "check_seed_grid", "lambda_schedule", "population_moment_matrix",
    "sandwich_covariance", "remainder_scaling_experiment",
    "normality_experiment", "onestep_experiment", "ic_convergence_experiment",
    "verify_report", "write_rows_csv", "report_to_dict",
]
