"""Command-line front end: config handling, dispatch, and artifact output.

Commands: fit, ic, onestep, mc-linearity, mc-normality, approx-check,
rank-fit. Settings come from a flat `key = value` config file (``#`` starts a
comment, lists are comma-separated) merged with flag overrides; flags win.
Every run writes a normalized ``config.echo`` under --out that pins all
settings, so re-running a command from its echo reproduces the CSV outputs
byte for byte.

Exit status: 0 on success, 1 when an experiment verdict fails (the failing
criteria are printed) or the experiment itself aborts (failure budget), 2 on
usage or config errors.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from .data import (Dataset, LinearModelSpec, export_dataset_csv,
                   generate_linear_data, parameter_box)
from .harness import (MCConfig, MCReport, lambda_schedule,
                      normality_experiment, remainder_scaling_experiment,
                      report_to_dict, write_rows_csv)
from .influence import (adaptive_lasso_ic_sample, export_ic_csv,
                        ic_moment_checks, influence_curve, one_step)
from .penalties import (SOBOLEV_CSV_HEADER, PenaltySpec, smooth_approx,
                        sobolev_distance)
from .solvers import (FitResult, adaptive_lasso, elastic_net, lasso_cd,
                      newton_zero, objective_value, ranking_newton, ridge_init)
from .zsystem import RankingZSystem, ZSystem, empirical_z, ranking_z

COMMANDS = ("fit", "ic", "onestep", "mc-linearity", "mc-normality",
            "approx-check", "rank-fit")

FIT_ESTIMATORS = ("ols", "ridge", "lasso", "en", "adaptive")
MC_ESTIMATORS = ("ols", "ridge", "lasso", "en", "adaptive", "onestep",
                 "exact_linear")


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class Field:
    kind: str
    default: object
    choices: tuple = ()
    minimum: float | None = None
    strict_min: bool = False


SCHEMA = {
    "seed": Field("int", 0, minimum=0),
    "n": Field("int", 200, minimum=1),
    "p": Field("int", 2, minimum=1),
    "theta0": Field("floats", None),
    "sigma": Field("float", 1.0, minimum=0.0),
    "estimator": Field("str", "ols", choices=MC_ESTIMATORS),
    "lambda": Field("float", 0.5, minimum=0.0),
    "lambda_rule": Field("str", "fixed", choices=("fixed", "schedule")),
    "lambda2": Field("float", 0.0, minimum=0.0),
    "m": Field("int", 64, minimum=1),
    "m_rule": Field("str", "fixed", choices=("fixed", "sqrt_n")),
    "reps": Field("int", 200, minimum=1),
    "n_grid": Field("ints", (100, 200, 400, 800), minimum=2),
    "threads": Field("int", 1, minimum=1),
    "cov_threshold": Field("float", 0.15, minimum=0.0, strict_min=True),
    "fixed_design": Field("bool", False),
    "feasible_psi": Field("bool", False),
    "onestep_penalty": Field("str", "smooth_l1", choices=("smooth_l1", "ridge")),
    "theta_ref": Field("str", "fitted", choices=("fitted", "true")),
    "half_width": Field("float", 1.0, minimum=0.0, strict_min=True),
    "step": Field("float", 1e-3, minimum=0.0, strict_min=True),
    "exclude_radius": Field("float", 0.01, minimum=0.0),
    "m_grid": Field("ints", (4, 8, 16, 32, 64, 128, 256), minimum=1),
}

#: command-specific defaults layered over the schema defaults
COMMAND_DEFAULTS = {
    "fit": {"estimator": "lasso"},
    "ic": {"estimator": "ols", "n": 10000},
    "onestep": {"estimator": "onestep", "lambda_rule": "schedule",
                "lambda": 1.0},
    "mc-linearity": {"lambda_rule": "schedule", "lambda": 1.0},
    "mc-normality": {"n_grid": (5000,), "reps": 1000},
    "approx-check": {"lambda": 1.0},
    "rank-fit": {"lambda": 0.0},
}

TRUE_WORDS = {"1", "true", "yes", "on"}
FALSE_WORDS = {"0", "false", "no", "off"}


def _parse_value(key: str, raw: str):
    f = SCHEMA[key]
    try:
        if f.kind == "int":
            return int(raw)
        if f.kind == "float":
            return float(raw)
        if f.kind == "bool":
            low = raw.strip().lower()
            if low in TRUE_WORDS:
                return True
            if low in FALSE_WORDS:
                return False
            raise ValueError(raw)
        if f.kind == "ints":
            return tuple(int(s.strip()) for s in raw.split(","))
        if f.kind == "floats":
            return tuple(float(s.strip()) for s in raw.split(","))
        return raw.strip()
    except ValueError as e:
        raise ConfigError(f"config key {key!r}: cannot parse {raw!r} as {f.kind}") from e


def _format_value(key: str, value) -> str:
    f = SCHEMA[key]
    if f.kind == "float":
        return repr(float(value))
    if f.kind == "bool":
        return "true" if value else "false"
    if f.kind == "ints":
        return ",".join(str(int(v)) for v in value)
    if f.kind == "floats":
        return ",".join(repr(float(v)) for v in value)
    return str(value)


def _validate(key: str, value):
    f = SCHEMA[key]
    if f.choices and value not in f.choices:
        raise ConfigError(f"config key {key!r}: {value!r} not in {f.choices}")
    if f.minimum is not None and f.kind in ("int", "float"):
        if value < f.minimum or (f.strict_min and value == f.minimum):
            op = ">" if f.strict_min else ">="
            raise ConfigError(f"config key {key!r}: must be {op} {f.minimum}")
    if f.minimum is not None and f.kind == "ints":
        if any(v < f.minimum for v in value):
            raise ConfigError(f"config key {key!r}: entries must be >= {f.minimum}")
    if key == "n_grid":
        if len(value) == 0 or any(b <= a for a, b in zip(value, value[1:])):
            raise ConfigError("config key 'n_grid': must be ascending and nonempty")
    return value


def parse_config_file(path: str) -> dict:
    values = {}
    try:
        fh = open(path)
    except OSError as e:
        raise ConfigError(f"cannot read config file {path}: {e}") from e
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected `key = value`")
            key, _, val = line.partition("=")
            key = key.strip()
            if key not in SCHEMA:
                raise ConfigError(f"{path}:{lineno}: unknown config key {key!r}")
            values[key] = _parse_value(key, val.strip())
    return values


def _default_theta0(p: int) -> tuple:
    pattern = (2.0, -1.0)
    return tuple(pattern[j] if j < len(pattern) else 0.0 for j in range(p))


def resolve_config(command: str, file_values: dict, flag_values: dict) -> dict:
    cfg = {key: f.default for key, f in SCHEMA.items()}
    cfg.update(COMMAND_DEFAULTS.get(command, {}))
    cfg.update(file_values)
    cfg.update({k: v for k, v in flag_values.items() if v is not None})
    if cfg["theta0"] is None:
        cfg["theta0"] = _default_theta0(cfg["p"])
    if len(cfg["theta0"]) != cfg["p"]:
        raise ConfigError(
            f"config key 'theta0': length {len(cfg['theta0'])} does not match p={cfg['p']}")
    for key, value in cfg.items():
        _validate(key, value)
    return cfg


def write_echo(cfg: dict, path: str) -> None:
    lines = [f"{key} = {_format_value(key, cfg[key])}" for key in sorted(cfg)]
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def _build_spec(cfg: dict) -> LinearModelSpec:
    return LinearModelSpec(theta0=np.asarray(cfg["theta0"], dtype=float),
                           sigma=cfg["sigma"])


def _build_mc_config(cfg: dict) -> MCConfig:
    return MCConfig(spec=_build_spec(cfg), n_grid=cfg["n_grid"],
                    reps=cfg["reps"], estimator=cfg["estimator"],
                    lambda_rule=cfg["lambda_rule"], lambda_value=cfg["lambda"],
                    lambda2=cfg["lambda2"], m=cfg["m"], m_rule=cfg["m_rule"],
                    master_seed=cfg["seed"], feasible_psi=cfg["feasible_psi"],
                    onestep_penalty=cfg["onestep_penalty"],
                    cov_threshold=cfg["cov_threshold"],
                    fixed_design=cfg["fixed_design"], threads=cfg["threads"])


def _effective_lambda(cfg: dict) -> float:
    if cfg["lambda_rule"] == "schedule":
        return lambda_schedule(cfg["n"], cfg["p"], cfg["lambda"])
    return cfg["lambda"]


def _closed_form_fit(dataset: Dataset, theta: np.ndarray,
                     penalty: PenaltySpec) -> FitResult:
    cond = float(np.linalg.cond(dataset.X))
    return FitResult(theta_hat=theta,
                     objective=objective_value(dataset, penalty, theta),
                     iterations=1, converged=True,
                     active_set=tuple(int(j) for j in np.nonzero(theta)[0]),
                     design_condition=cond,
                     condition_warning=not np.isfinite(cond) or cond > 1e8)


def _fit_for(cfg: dict, dataset: Dataset, lam: float):
    est = cfg["estimator"]
    if est == "ols":
        theta, *_ = np.linalg.lstsq(dataset.X, dataset.Y, rcond=None)
        return _closed_form_fit(dataset, theta, PenaltySpec(kind="l1", lambda1=0.0))
    if est == "ridge":
        theta = ridge_init(dataset, cfg["lambda2"])
        return _closed_form_fit(dataset, theta,
                                PenaltySpec(kind="ridge", lambda2=cfg["lambda2"]))
    if est == "lasso":
        return lasso_cd(dataset, lam)
    if est == "en":
        return elastic_net(dataset, lam, cfg["lambda2"])
    if est == "adaptive":
        return adaptive_lasso(dataset, lam)[1]
    raise ConfigError(f"estimator {est!r} is not a direct fit "
                      f"(choose one of {FIT_ESTIMATORS})")


def _fit_result_dict(res: FitResult, lam: float) -> dict:
    return {"theta_hat": [float(v) for v in res.theta_hat],
            "objective": res.objective, "iterations": res.iterations,
            "converged": res.converged, "active_set": list(res.active_set),
            "design_condition": res.design_condition,
            "condition_warning": res.condition_warning, "lambda_used": lam}


def _ic_penalty(cfg: dict, lam: float) -> PenaltySpec:
    est = cfg["estimator"]
    if est == "ols":
        return PenaltySpec(kind="l1", lambda1=0.0)
    if est == "ridge":
        return PenaltySpec(kind="ridge", lambda2=cfg["lambda2"])
    if est == "en":
        return smooth_approx(PenaltySpec(kind="elastic_net", lambda1=lam,
                                         lambda2=cfg["lambda2"]), cfg["m"])
    return smooth_approx(PenaltySpec(kind="l1", lambda1=lam), cfg["m"])


def _cmd_fit(cfg: dict, outdir: str):
    spec = _build_spec(cfg)
    dataset = generate_linear_data(spec, cfg["n"], cfg["seed"])
    lam = _effective_lambda(cfg)
    res = _fit_for(cfg, dataset, lam)
    export_dataset_csv(dataset, os.path.join(outdir, "dataset.csv"))
    return _fit_result_dict(res, lam), {}


def _cmd_ic(cfg: dict, outdir: str):
    spec = _build_spec(cfg)
    dataset = generate_linear_data(spec, cfg["n"], cfg["seed"])
    lam = _effective_lambda(cfg)
    if cfg["estimator"] == "adaptive":
        fits = adaptive_lasso(dataset, lam)
        ics = adaptive_lasso_ic_sample(dataset, fits, lam, m=cfg["m"])
    else:
        res = _fit_for(cfg, dataset, lam)
        ref = spec.theta0 if cfg["theta_ref"] == "true" else res.theta_hat
        ics = influence_curve(dataset, ref, _ic_penalty(cfg, lam))
    checks = ic_moment_checks(ics, spec)
    export_ic_csv(ics, os.path.join(outdir, "ic.csv"))
    export_dataset_csv(dataset, os.path.join(outdir, "dataset.csv"))
    results = {"jacobian_condition": ics.cond,
               "theta_ref": [float(v) for v in np.atleast_1d(ics.theta_ref)],
               "mean_psi": [float(v) for v in checks.mean_psi],
               "mean_psi_se": [float(v) for v in checks.mean_psi_se]}
    if checks.cond_iii_matrix is not None:
        results["cond_iii_matrix"] = checks.cond_iii_matrix.tolist()
    verdicts = {k: v for k, v in checks.verdicts.items() if v is not None}
    return results, verdicts


def _cmd_onestep(cfg: dict, outdir: str):
    spec = _build_spec(cfg)
    dataset = generate_linear_data(spec, cfg["n"], cfg["seed"])
    lam = _effective_lambda(cfg)
    if cfg["onestep_penalty"] == "ridge":
        pen = PenaltySpec(kind="ridge", lambda2=cfg["lambda2"])
        tilde = ridge_init(dataset, cfg["lambda2"])
        box_pen = pen
    else:
        pen = smooth_approx(PenaltySpec(kind="l1", lambda1=lam), cfg["m"])
        tilde = ridge_init(dataset, lam)
        box_pen = PenaltySpec(kind="l1", lambda1=lam)
    theta = one_step(tilde, dataset, pen)
    full = newton_zero(dataset, pen, tilde)
    box = parameter_box(dataset, box_pen)
    zsys = ZSystem(dataset=dataset, penalty=pen)
    export_dataset_csv(dataset, os.path.join(outdir, "dataset.csv"))
    results = {"theta_tilde": [float(v) for v in tilde],
               "theta_onestep": [float(v) for v in theta],
               "theta_full": [float(v) for v in full.theta_hat],
               "gap": float(np.linalg.norm(theta - full.theta_hat)),
               "z_norm_onestep": float(np.linalg.norm(empirical_z(zsys, theta))),
               "full_converged": full.converged,
               "box_bound": box.bound,
               "onestep_l1_norm": float(np.sum(np.abs(theta))),
               "lambda_used": lam}
    verdicts = {"box_interior": box.contains(theta, strict=True)}
    return results, verdicts


def _mc_outputs(report: MCReport, outdir: str):
    write_rows_csv(report.rows, os.path.join(outdir, "reps.csv"))
    return report_to_dict(report)


def _cmd_mc_linearity(cfg: dict, outdir: str):
    report = remainder_scaling_experiment(_build_mc_config(cfg))
    results = _mc_outputs(report, outdir)
    verdicts = {"linearity": report.verdicts["linearity"]}
    results["zero_remainder"] = report.verdicts["zero_remainder"]
    return results, verdicts


def _cmd_mc_normality(cfg: dict, outdir: str):
    report = normality_experiment(_build_mc_config(cfg))
    results = _mc_outputs(report, outdir)
    results["extra"].pop("sqrtn_dev_rows", None)
    return results, {"normality": report.verdicts["normality"]}


def _cmd_approx_check(cfg: dict, outdir: str):
    m_grid = cfg["m_grid"]
    if len(m_grid) < 2:
        raise ConfigError("config key 'm_grid': need at least 2 entries")
    reports = [sobolev_distance(m, cfg["lambda"], half_width=cfg["half_width"],
                                step=cfg["step"],
                                exclude_radius=cfg["exclude_radius"])
               for m in m_grid]
    with open(os.path.join(outdir, "sobolev.csv"), "w") as fh:
        fh.write(SOBOLEV_CSV_HEADER + "\n")
        for rep in reports:
            fh.write(rep.csv_row() + "\n")
    o0 = [r.order0 for r in reports]
    o1 = [r.order1 for r in reports]
    drop = o1[0] / o1[-1] if o1[-1] > 0 else math.inf
    results = {"m_grid": list(m_grid), "order0": o0, "order1": o1,
               "order2": [r.order2 for r in reports], "order1_drop": drop}
    verdicts = {"order0_strictly_decreasing": all(b < a for a, b in zip(o0, o0[1:])),
                "order1_strictly_decreasing": all(b < a for a, b in zip(o1, o1[1:])),
                "order1_drop_ge_100": drop >= 100.0}
    return results, verdicts


def _cmd_rank_fit(cfg: dict, outdir: str):
    spec = _build_spec(cfg)
    dataset = generate_linear_data(spec, cfg["n"], cfg["seed"])
    lam = _effective_lambda(cfg)
    pen = smooth_approx(PenaltySpec(kind="l1", lambda1=lam), cfg["m"]) if lam > 0 \
        else PenaltySpec(kind="l1", lambda1=0.0)
    theta, iters, converged = ranking_newton(dataset, pen)
    rz = RankingZSystem(dataset=dataset, penalty=pen)
    diff = 0.0
    for point in (theta, np.zeros(dataset.p)):
        delta = ranking_z(rz, point, method="fast") - ranking_z(rz, point, method="pairs")
        diff = max(diff, float(np.max(np.abs(delta))))
    export_dataset_csv(dataset, os.path.join(outdir, "dataset.csv"))
    results = {"theta_rank": [float(v) for v in theta], "iterations": iters,
               "converged": converged, "shortcut_max_abs_diff": diff,
               "lambda_used": lam}
    return results, {"shortcut_matches": diff <= 1e-10}


RUNNERS = {
    "fit": _cmd_fit,
    "ic": _cmd_ic,
    "onestep": _cmd_onestep,
    "mc-linearity": _cmd_mc_linearity,
    "mc-normality": _cmd_mc_normality,
    "approx-check": _cmd_approx_check,
    "rank-fit": _cmd_rank_fit,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="regmest",
        description="Regularized M-estimation: solvers, influence curves, "
                    "one-step estimators, and Monte Carlo asymptotics checks.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--out", required=True, help="output directory")
        sp.add_argument("--config", help="flat key = value config file")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--n", type=int)
        sp.add_argument("--p", type=int)
        sp.add_argument("--lambda", dest="lam", type=float)
        sp.add_argument("--lambda2", type=float)
        sp.add_argument("--m", type=int)
        sp.add_argument("--reps", type=int)
        sp.add_argument("--n-grid", dest="n_grid")
        sp.add_argument("--estimator")
        sp.add_argument("--threads", type=int)
    return ap


def _flag_values(args) -> dict:
    flags = {"seed": args.seed, "n": args.n, "p": args.p, "lambda": args.lam,
             "lambda2": args.lambda2, "m": args.m, "reps": args.reps,
             "estimator": args.estimator, "threads": args.threads}
    if args.n_grid is not None:
        flags["n_grid"] = _parse_value("n_grid", args.n_grid)
    return flags


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        file_values = parse_config_file(args.config) if args.config else {}
        cfg = resolve_config(args.command, file_values, _flag_values(args))
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    outdir = args.out
    os.makedirs(outdir, exist_ok=True)
    try:
        results, verdicts = RUNNERS[args.command](cfg, outdir)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except ValueError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except RuntimeError as e:
        print(f"experiment error: {e}", file=sys.stderr)
        return 1
    write_echo(cfg, os.path.join(outdir, "config.echo"))
    report = {"command": args.command,
              "config": {k: (list(v) if isinstance(v, tuple) else v)
                         for k, v in cfg.items()},
              "results": results, "verdicts": verdicts}
    with open(os.path.join(outdir, "report.json"), "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
        fh.write("\n")
    failing = sorted(k for k, v in verdicts.items() if v is False)
    if failing:
        print("FAIL: " + ", ".join(failing))
        return 1
    print("OK: " + ", ".join(f"{k}={v}" for k, v in sorted(verdicts.items()))
          if verdicts else "OK")
    return 0


if __name__ == "__main__":
    sys.exit(main())
