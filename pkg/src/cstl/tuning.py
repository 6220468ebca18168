"""Penalty-level selection by BIC, fused degrees of freedom, and error metrics."""

from dataclasses import dataclass

import numpy as np

from .admm import AdmmOptions, PooledSystem, admm_solve, build_factored_system, default_rho1
from .data import Dataset
from .lasso import LassoConfig, lasso_cv
from .weights import DEFAULT_SCAD_A, scad_weight_scheme

DEFAULT_EPS_FUSE = 1e-4


@dataclass(frozen=True)
class TuningGrid:
    """Descending candidate grids for (lambda0, lambda1) and the fuse gap for df."""

    lambda0_grid: tuple
    lambda1_grid: tuple
    eps_fuse: float = DEFAULT_EPS_FUSE

    def __post_init__(self):
        for name in ("lambda0_grid", "lambda1_grid"):
            grid = tuple(float(l) for l in getattr(self, name))
            if len(grid) == 0:
                raise ValueError(f"{name} must be nonempty")
            if any(l <= 0 for l in grid):
                raise ValueError(f"{name} entries must be positive")
            if any(a < b for a, b in zip(grid, grid[1:])):
                raise ValueError(f"{name} must be sorted descending")
            object.__setattr__(self, name, grid)
        if self.eps_fuse <= 0:
            raise ValueError(f"eps_fuse must be positive, got {self.eps_fuse}")

    @classmethod
    def default(cls, d_t: int, n_t: int, n_points: int = 10,
                eps_fuse: float = DEFAULT_EPS_FUSE) -> "TuningGrid":
        """10 log-spaced values in [0.01, 1.0] scaled by sqrt(log(d_t)/n_t)."""
        scale = np.sqrt(np.log(max(d_t, 2)) / n_t)
        grid = tuple(np.geomspace(1.0, 0.01, n_points) * scale)
        return cls(lambda0_grid=grid, lambda1_grid=grid, eps_fuse=eps_fuse)


@dataclass(frozen=True)
class FitResult:
    """Selected fit with its penalty levels and solver diagnostics."""

    beta: np.ndarray
    theta: np.ndarray
    objective: float
    lambda0: float
    lambda1: float
    bic: float
    converged: bool
    iterations: int


@dataclass(frozen=True)
class EvalReport:
    """Per-replicate evaluation record for one method."""

    sse: float
    mse: float
    method_tag: str
    replicate_id: int


def degrees_of_freedom(eta, eps_fuse: float = DEFAULT_EPS_FUSE) -> int:
    """Count distinct coefficient values in eta, fusing near-ties.

    Greedy diameter-capped clustering on the sorted values: a cluster closes
    once the next value exceeds its first by more than ``eps_fuse``, so two
    entries only count as one value when they genuinely agree to eps_fuse
    (gap-based single linkage would chain a dense cloud of distinct values
    into one cluster and undercount).  Clusters whose mean magnitude is at
    most eps_fuse form the excluded zero cluster.
    """
    if eps_fuse < 0:
        raise ValueError(f"eps_fuse must be nonnegative, got {eps_fuse}")
    values = np.sort(np.asarray(eta, dtype=float).ravel())
    if values.size == 0:
        return 0
    df = 0
    start = 0
    for i in range(1, values.size + 1):
        if i == values.size or values[i] - values[start] > eps_fuse:
            if abs(values[start:i].mean()) > eps_fuse:
                df += 1
            start = i
    return df


def bic(ps: PooledSystem, beta, theta, eps_fuse: float = DEFAULT_EPS_FUSE) -> float:
    """(N/2)[log of each normalized residual sum] + df * log(N), N = n_t + n_s."""
    _, _, n_t, n_s = ps.dims
    r_t = ps.y_target - ps.x_target @ beta
    r_s = ps.y_source - ps.x_source @ theta
    rss_t = float(r_t @ r_t)
    rss_s = float(r_s @ r_s)
    if rss_t <= 0 or rss_s <= 0:
        raise ValueError(
            "zero residual sum of squares; BIC is undefined (loosen the fit "
            "or adjust eps_fuse)"
        )
    N = n_t + n_s
    df = degrees_of_freedom(np.concatenate([beta, theta]), eps_fuse)
    return 0.5 * N * (np.log(rss_t) + np.log(rss_s)) + df * np.log(N)


def sse(beta_hat, beta_true) -> float:
    """Sum of squared estimation errors ||beta_hat - beta_true||^2."""
    beta_hat = np.asarray(beta_hat, dtype=float)
    beta_true = np.asarray(beta_true, dtype=float)
    if beta_hat.shape != beta_true.shape:
        raise ValueError(
            f"length mismatch: estimate has shape {beta_hat.shape}, "
            f"truth has shape {beta_true.shape}"
        )
    diff = beta_hat - beta_true
    return float(diff @ diff)


def mse(beta_hat, test: Dataset) -> float:
    """Mean squared prediction error of beta_hat on a held-out dataset."""
    if test.n == 0:
        raise ValueError("test set is empty")
    resid = test.response - test.design @ np.asarray(beta_hat, dtype=float)
    return float(resid @ resid / test.n)


def _resolve_inits(target, source, beta_init, theta_init, lasso_cfg):
    if beta_init is None or theta_init is None:
        cfg = lasso_cfg if lasso_cfg is not None else LassoConfig()
        if beta_init is None:
            beta_init = lasso_cv(target, cfg)[0].coef
        if theta_init is None:
            theta_init = lasso_cv(source, cfg)[0].coef
    return np.asarray(beta_init, dtype=float), np.asarray(theta_init, dtype=float)


def _scan_grid(ps, grid, beta_init, theta_init, scad_a, rho0, rho1, admm_opts):
    """Warm-start chained sweep over the grid, yielding each solve with its BIC.

    The factorization is built once and shared; weights are rebuilt per grid
    point because they depend on lambda through the SCAD thresholds.  A
    zero-residual BIC failure yields score None with the error message.
    """
    if rho1 is None:
        rho1 = default_rho1(ps.d_t, ps.d_s)
    system = build_factored_system(ps, rho0, rho1)
    eta0 = np.concatenate([beta_init, theta_init])
    state = None
    for lam0 in grid.lambda0_grid:
        for lam1 in grid.lambda1_grid:
            ws = scad_weight_scheme(beta_init, theta_init, lam0, lam1, scad_a)
            opts = AdmmOptions(eps_pri=admm_opts.eps_pri, eps_dual=admm_opts.eps_dual,
                               eps_abs=admm_opts.eps_abs, max_iter=admm_opts.max_iter,
                               warm_start=state)
            res = admm_solve(ps, ws, lam0, lam1, rho0, rho1, opts=opts,
                             system=system, eta0=eta0)
            state = res.state
            try:
                score, err = bic(ps, res.beta, res.theta, grid.eps_fuse), None
            except ValueError as exc:
                score, err = None, str(exc)
            yield lam0, lam1, res, score, err


def grid_search_cstl(target: Dataset, source: Dataset, grid: TuningGrid,
                     beta_init=None, theta_init=None, scad_a: float = DEFAULT_SCAD_A,
                     rho0: float = 1.0, rho1: float = None,
                     admm_opts: AdmmOptions = None,
                     lasso_cfg: LassoConfig = None) -> FitResult:
    """BIC-minimizing fit over the (lambda0, lambda1) grid.

    Solves are warm-started along the descending grid path.  Ties in BIC go
    to the larger lambda0, then the larger lambda1.  Initial estimates
    default to cross-validated Lasso fits per domain.
    """
    beta_init, theta_init = _resolve_inits(target, source, beta_init, theta_init, lasso_cfg)
    if admm_opts is None:
        admm_opts = AdmmOptions()
    ps = PooledSystem.from_datasets(target, source)
    best = None
    failures = []
    for lam0, lam1, res, score, err in _scan_grid(ps, grid, beta_init, theta_init,
                                                  scad_a, rho0, rho1, admm_opts):
        if score is None:
            failures.append((lam0, lam1, err))
            continue
        if best is None or score < best.bic:
            best = FitResult(beta=res.beta, theta=res.theta, objective=res.objective,
                             lambda0=lam0, lambda1=lam1, bic=score,
                             converged=res.converged, iterations=res.iterations)
    if best is None:
        raise RuntimeError(
            "every grid point failed: "
            + "; ".join(f"({l0:g},{l1:g}): {msg}" for l0, l1, msg in failures)
        )
    return best


def bic_surface(target: Dataset, source: Dataset, grid: TuningGrid,
                beta_init=None, theta_init=None, scad_a: float = DEFAULT_SCAD_A,
                rho0: float = 1.0, rho1: float = None,
                admm_opts: AdmmOptions = None,
                lasso_cfg: LassoConfig = None) -> list:
    """One record per grid point: penalty levels, BIC, df, and diagnostics."""
    beta_init, theta_init = _resolve_inits(target, source, beta_init, theta_init, lasso_cfg)
    if admm_opts is None:
        admm_opts = AdmmOptions()
    ps = PooledSystem.from_datasets(target, source)
    rows = []
    for lam0, lam1, res, score, _ in _scan_grid(ps, grid, beta_init, theta_init,
                                                scad_a, rho0, rho1, admm_opts):
        rows.append({
            "lambda0": lam0,
            "lambda1": lam1,
            "bic": score,
            "df": degrees_of_freedom(np.concatenate([res.beta, res.theta]), grid.eps_fuse),
            "iterations": res.iterations,
            "converged": res.converged,
        })
    return rows
