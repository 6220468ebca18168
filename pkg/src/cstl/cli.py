"""Command-line entry point.

One executable with a ``--command`` switch (simulate | fit | oracle | tune),
a flat key = value config file, and command-line overrides that win over the
file.  Every run writes a manifest of the fully resolved configuration next
to its outputs; re-running with ``--config <manifest>`` reproduces the
result files byte for byte.

Exit codes: 0 success, 1 usage/configuration error, 2 runtime error.
"""

import argparse
import sys
from dataclasses import dataclass, fields
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path

import numpy as np

from .admm import AdmmOptions
from .data import Dataset
from .estimators import CSTLRegressor
from .io import (
    ResultRow,
    ResultsTable,
    load_csv,
    load_vector_csv,
    read_config_file,
    write_manifest,
    write_matrix_csv,
    write_results,
    write_vector_csv,
)
from .lasso import LassoConfig
from .oracle import oracle_fit
from .simulate import METHODS, ScenarioSpec, run_replications
from .structure import build_transfer_structure
from .tuning import TuningGrid, bic_surface, mse
from .weights import DEFAULT_SCAD_A

COMMANDS = ("simulate", "fit", "oracle", "tune")


def _package_version() -> str:
    try:
        return version("cstl")
    except PackageNotFoundError:
        return "unknown"


class UsageError(ValueError):
    """Configuration problem; maps to exit code 1."""


@dataclass
class RunConfig:
    """Fully resolved run configuration (defaults < config file < CLI flags)."""

    command: str = None
    setting: str = None
    m: int = 0
    h: float = 0.0
    nt: int = 100
    ns: int = 200
    dt: int = 100
    ds: int = 100
    reps: int = 20
    seed: int = 0
    methods: str = "lasso,cstl,oracle"
    lambda0_grid: str = None
    lambda1_grid: str = None
    n_grid: int = 10
    rho0: float = 1.0
    rho1: float = None
    scad_a: float = DEFAULT_SCAD_A
    eps_fuse: float = 1e-4
    eps_abs: float = 1e-5
    max_admm_iter: int = 5000
    lasso_n_lambda: int = 50
    lasso_n_folds: int = 5
    target_csv: str = None
    source_csv: str = None
    test_csv: str = None
    response_column: str = None
    beta_true_csv: str = None
    theta_true_csv: str = None
    tol: float = 0.0
    split_fraction: float = 0.8
    repeats: int = 0
    standardize: bool = False
    augment_noise_feature: bool = False
    out: str = None
    version: str = None  # informational, recorded in manifests


_BOOL_STRINGS = {"true": True, "false": False, "1": True, "0": False,
                 "yes": True, "no": False}


def _coerce(name: str, value, target_type):
    if value is None or isinstance(value, target_type):
        return value
    text = str(value).strip()
    try:
        if target_type is bool:
            return _BOOL_STRINGS[text.lower()]
        return target_type(text)
    except (ValueError, KeyError):
        raise UsageError(f"invalid value for {name}: {value!r}") from None


def build_config(file_values: dict, cli_values: dict) -> RunConfig:
    """Merge config-file values and CLI overrides onto the defaults."""
    cfg = RunConfig()
    types = {f.name: f.type for f in fields(RunConfig)}
    for source in (file_values, cli_values):
        for key, value in source.items():
            if value is None:
                continue
            if key not in types:
                raise UsageError(f"unknown configuration key: {key}")
            setattr(cfg, key, _coerce(key, value, types[key]))
    if cfg.command is None:
        raise UsageError("missing required field: command")
    if cfg.command not in COMMANDS:
        raise UsageError(f"unknown command {cfg.command!r}; choose from {COMMANDS}")
    if cfg.out is None:
        raise UsageError("missing required field: out")
    if cfg.command == "simulate" and cfg.setting is None:
        raise UsageError("simulate requires: setting")
    if cfg.command in ("fit", "tune", "oracle"):
        for field_name in ("target_csv", "source_csv"):
            if getattr(cfg, field_name) is None:
                raise UsageError(f"{cfg.command} requires: {field_name}")
            if not Path(getattr(cfg, field_name)).exists():
                raise UsageError(f"{field_name} does not exist: {getattr(cfg, field_name)}")
    if cfg.command == "oracle":
        for field_name in ("beta_true_csv", "theta_true_csv"):
            if getattr(cfg, field_name) is None:
                raise UsageError(f"oracle requires: {field_name}")
            if not Path(getattr(cfg, field_name)).exists():
                raise UsageError(f"{field_name} does not exist: {getattr(cfg, field_name)}")
    return cfg


def _parse_grid(text: str):
    if text is None:
        return None
    try:
        values = tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise UsageError(f"malformed lambda grid: {text!r}") from None
    if not values:
        raise UsageError(f"empty lambda grid: {text!r}")
    return tuple(sorted(values, reverse=True))


def _grid_from_config(cfg: RunConfig, d_t: int, n_t: int) -> TuningGrid:
    default = TuningGrid.default(d_t, n_t, cfg.n_grid, cfg.eps_fuse)
    lam0 = _parse_grid(cfg.lambda0_grid) or default.lambda0_grid
    lam1 = _parse_grid(cfg.lambda1_grid) or default.lambda1_grid
    return TuningGrid(lambda0_grid=lam0, lambda1_grid=lam1, eps_fuse=cfg.eps_fuse)


def _lasso_config(cfg: RunConfig) -> LassoConfig:
    return LassoConfig(n_folds=cfg.lasso_n_folds, seed=cfg.seed,
                       standardize=cfg.standardize, n_lambda=cfg.lasso_n_lambda)


def _admm_options(cfg: RunConfig) -> AdmmOptions:
    return AdmmOptions(eps_abs=cfg.eps_abs, max_iter=cfg.max_admm_iter)


def _estimator(cfg: RunConfig, grid: TuningGrid) -> CSTLRegressor:
    return CSTLRegressor(
        lambda0_grid=grid.lambda0_grid, lambda1_grid=grid.lambda1_grid,
        eps_fuse=cfg.eps_fuse, scad_a=cfg.scad_a, rho0=cfg.rho0, rho1=cfg.rho1,
        eps_abs=cfg.eps_abs, max_admm_iter=cfg.max_admm_iter,
        lasso_n_lambda=cfg.lasso_n_lambda, lasso_n_folds=cfg.lasso_n_folds,
        standardize=cfg.standardize,
        augment_noise_feature=cfg.augment_noise_feature,
        random_state=cfg.seed,
    )


def _manifest_dict(cfg: RunConfig, grid: TuningGrid = None) -> dict:
    values = {f.name: getattr(cfg, f.name) for f in fields(RunConfig)}
    if grid is not None:
        values["lambda0_grid"] = ",".join(format(l, ".17g") for l in grid.lambda0_grid)
        values["lambda1_grid"] = ",".join(format(l, ".17g") for l in grid.lambda1_grid)
    values["version"] = _package_version()
    return values


def _cmd_simulate(cfg: RunConfig, out_dir: Path) -> None:
    spec = ScenarioSpec(setting_id=cfg.setting, n_t=cfg.nt, n_s=cfg.ns,
                        d_t=cfg.dt, d_s=cfg.ds, m_overlap=cfg.m, h=cfg.h,
                        seed=cfg.seed, replicates=cfg.reps)
    methods = tuple(m.strip() for m in cfg.methods.split(",") if m.strip())
    for method in methods:
        if method not in METHODS:
            raise UsageError(f"unknown method {method!r}; choose from {METHODS}")
    grid = _grid_from_config(cfg, spec.d_t, spec.n_t)
    table = run_replications(spec, methods=methods, grid=grid,
                             lasso_cfg=_lasso_config(cfg), admm_opts=_admm_options(cfg),
                             scad_a=cfg.scad_a, rho0=cfg.rho0, rho1=cfg.rho1)
    write_results(table, out_dir / "results.csv")
    write_manifest(_manifest_dict(cfg, grid), out_dir / "manifest.txt")


def _cmd_fit(cfg: RunConfig, out_dir: Path) -> None:
    target = load_csv(cfg.target_csv, cfg.response_column, domain_tag="target")
    source = load_csv(cfg.source_csv, cfg.response_column, domain_tag="source")
    grid = _grid_from_config(cfg, target.dim, target.n)

    est = _estimator(cfg, grid)
    est.fit(target.design, target.response, source.design, source.response)
    write_vector_csv(est.coef_, out_dir / "beta.csv", "beta")
    write_vector_csv(est.source_coef_, out_dir / "theta.csv", "theta")
    write_matrix_csv(est.pairwise_differences(), out_dir / "pairwise_abs_diff.csv")

    rows = []
    if cfg.test_csv is not None:
        test = load_csv(cfg.test_csv, cfg.response_column, domain_tag="target")
        rows.append(ResultRow(method="cstl", replicate=0,
                              mse=mse(est.coef_, test),
                              lambda0=est.lambda0_, lambda1=est.lambda1_,
                              iterations=est.n_iter_, converged=est.converged_))
    if cfg.repeats > 0:
        rows.extend(_split_protocol(cfg, target, source, grid))
    if rows:
        write_results(ResultsTable(rows=rows), out_dir / "results.csv")
    write_manifest(_manifest_dict(cfg, grid), out_dir / "manifest.txt")


def _split_protocol(cfg: RunConfig, target: Dataset, source: Dataset,
                    grid: TuningGrid) -> list:
    """Repeated train/holdout splits of the target; one MSE row per repeat."""
    if not 0.0 < cfg.split_fraction < 1.0:
        raise UsageError(f"split_fraction must be in (0, 1), got {cfg.split_fraction}")
    rng = np.random.default_rng(cfg.seed)
    n_train = int(round(cfg.split_fraction * target.n))
    if n_train == 0 or n_train == target.n:
        raise UsageError("split_fraction leaves an empty train or holdout set")
    rows = []
    for rep in range(cfg.repeats):
        perm = rng.permutation(target.n)
        train, hold = perm[:n_train], perm[n_train:]
        est = _estimator(cfg, grid)
        est.fit(target.design[train], target.response[train],
                source.design, source.response)
        holdout = Dataset(design=target.design[hold], response=target.response[hold],
                          domain_tag="target")
        rows.append(ResultRow(method="cstl", replicate=rep, mse=mse(est.coef_, holdout),
                              lambda0=est.lambda0_, lambda1=est.lambda1_,
                              iterations=est.n_iter_, converged=est.converged_))
    return rows


def _cmd_oracle(cfg: RunConfig, out_dir: Path) -> None:
    target = load_csv(cfg.target_csv, cfg.response_column, domain_tag="target")
    source = load_csv(cfg.source_csv, cfg.response_column, domain_tag="source")
    beta_true = load_vector_csv(cfg.beta_true_csv)
    theta_true = load_vector_csv(cfg.theta_true_csv)
    ts = build_transfer_structure(beta_true, theta_true, tol=cfg.tol)
    fit = oracle_fit(target, source, ts)
    write_vector_csv(fit.beta, out_dir / "beta.csv", "beta")
    write_vector_csv(fit.theta, out_dir / "theta.csv", "theta")
    write_vector_csv(fit.shared_values, out_dir / "shared_values.csv", "alpha")
    write_manifest(_manifest_dict(cfg), out_dir / "manifest.txt")


def _cmd_tune(cfg: RunConfig, out_dir: Path) -> None:
    target = load_csv(cfg.target_csv, cfg.response_column, domain_tag="target")
    source = load_csv(cfg.source_csv, cfg.response_column, domain_tag="source")
    grid = _grid_from_config(cfg, target.dim, target.n)
    rows = bic_surface(target, source, grid, scad_a=cfg.scad_a,
                       rho0=cfg.rho0, rho1=cfg.rho1,
                       admm_opts=_admm_options(cfg), lasso_cfg=_lasso_config(cfg))
    lines = ["lambda0,lambda1,bic,df,iterations,converged"]
    for row in rows:
        bic_cell = "NA" if row["bic"] is None else format(row["bic"], ".17g")
        lines.append(
            f"{row['lambda0']:.17g},{row['lambda1']:.17g},{bic_cell},"
            f"{row['df']},{row['iterations']},{'true' if row['converged'] else 'false'}"
        )
    (out_dir / "bic_surface.csv").write_text("\n".join(lines) + "\n")
    write_manifest(_manifest_dict(cfg, grid), out_dir / "manifest.txt")


def run_command(cfg: RunConfig) -> Path:
    """Execute the configured command; returns the output directory."""
    out_dir = Path(cfg.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    dispatch = {"simulate": _cmd_simulate, "fit": _cmd_fit,
                "oracle": _cmd_oracle, "tune": _cmd_tune}
    dispatch[cfg.command](cfg, out_dir)
    return out_dir


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="cstl", description=__doc__,
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    add = parser.add_argument
    add("--config", help="flat key = value configuration file")
    add("--command", choices=COMMANDS)
    add("--setting", help="scenario id (S1, S2, S3_noperm, S3_perm, S4, EX1, EX2)")
    add("--m", type=int, help="overlap parameter for S1/S2")
    add("--h", type=float, help="heterogeneity strength for S3")
    add("--nt", type=int, help="target sample size")
    add("--ns", type=int, help="source sample size")
    add("--dt", type=int, help="target dimension")
    add("--ds", type=int, help="source dimension")
    add("--reps", type=int, help="number of replicates")
    add("--seed", type=int)
    add("--methods", help="comma list from lasso,cstl,oracle")
    add("--lambda0-grid", dest="lambda0_grid", help="comma-separated penalty levels")
    add("--lambda1-grid", dest="lambda1_grid", help="comma-separated penalty levels")
    add("--n-grid", dest="n_grid", type=int, help="size of each default grid")
    add("--rho0", type=float)
    add("--rho1", type=float)
    add("--scad-a", dest="scad_a", type=float)
    add("--eps-fuse", dest="eps_fuse", type=float)
    add("--eps-abs", dest="eps_abs", type=float)
    add("--max-admm-iter", dest="max_admm_iter", type=int)
    add("--lasso-n-lambda", dest="lasso_n_lambda", type=int)
    add("--lasso-n-folds", dest="lasso_n_folds", type=int)
    add("--target-csv", dest="target_csv")
    add("--source-csv", dest="source_csv")
    add("--test-csv", dest="test_csv")
    add("--response-column", dest="response_column")
    add("--beta-true-csv", dest="beta_true_csv")
    add("--theta-true-csv", dest="theta_true_csv")
    add("--tol", type=float, help="equality tolerance when building the oracle structure")
    add("--split-fraction", dest="split_fraction", type=float)
    add("--repeats", type=int, help="repeated-split count for the fit protocol")
    add("--standardize", dest="standardize", action="store_const", const=True)
    add("--augment-noise-feature", dest="augment_noise_feature",
        action="store_const", const=True)
    add("--out", help="output directory")
    return parser


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        cli_values = {k: v for k, v in vars(args).items() if k != "config"}
        file_values = read_config_file(args.config) if args.config else {}
        cfg = build_config(file_values, cli_values)
    except UsageError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    try:
        run_command(cfg)
    except Exception as err:  # noqa: BLE001 - boundary: report and set exit code
        print(f"error: {err}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
