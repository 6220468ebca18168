"""Cyclic coordinate-descent Lasso under the (1/n)||y - Xb||^2 + lam*||b||_1 convention.

Used to produce the initial estimates feeding the data-driven weights, and
as the standalone baseline in experiments.  The sweep kernel runs on
precomputed Gram quantities and is numba-compiled; cross-validation warm
starts along the descending lambda path.
"""

from dataclasses import dataclass

import numpy as np
from numba import njit

from .data import Dataset, validate_dataset

DEFAULT_N_LAMBDA = 50
DEFAULT_LAMBDA_MIN_RATIO = 1e-3


@dataclass(frozen=True)
class LassoConfig:
    """Free parameters of the initializer.

    ``lambda_grid`` (descending) defaults to ``n_lambda`` log-spaced values
    from lambda_max = (2/n)||X'y||_inf down to ``lambda_min_ratio`` times it.
    ``standardize`` rescales columns to unit standard deviation (no centering;
    the model carries no intercept) and reports coefficients on the original
    scale.
    """

    lambda_grid: tuple = None
    n_folds: int = 5
    max_iter: int = 1000
    tol: float = 1e-7
    seed: int = 0
    standardize: bool = False
    n_lambda: int = DEFAULT_N_LAMBDA
    lambda_min_ratio: float = DEFAULT_LAMBDA_MIN_RATIO

    def __post_init__(self):
        if self.tol <= 0:
            raise ValueError(f"tol must be positive, got {self.tol}")
        if self.n_folds < 2:
            raise ValueError(f"n_folds must be at least 2, got {self.n_folds}")
        if self.lambda_grid is not None:
            grid = tuple(float(l) for l in self.lambda_grid)
            if any(l <= 0 for l in grid):
                raise ValueError("lambda_grid entries must be positive")
            if any(a < b for a, b in zip(grid, grid[1:])):
                raise ValueError("lambda_grid must be sorted descending")
            object.__setattr__(self, "lambda_grid", grid)


@dataclass(frozen=True)
class LassoFit:
    coef: np.ndarray
    lambda_: float
    n_iter: int
    converged: bool


@njit(cache=True)
def _cd_sweeps(gram, cty, b, lam, tol, max_iter):
    """Cyclic coordinate descent on (1/n)||y - Xb||^2 + lam ||b||_1.

    gram = (2/n) X'X and cty = (2/n) X'y; maintains g = gram @ b across
    updates.  Stops when the largest coordinate change in a sweep is <= tol.
    """
    d = b.shape[0]
    g = gram @ b
    for it in range(max_iter):
        max_delta = 0.0
        for j in range(d):
            gjj = gram[j, j]
            if gjj <= 0.0:
                continue
            rho = cty[j] - g[j] + gjj * b[j]
            if rho > lam:
                new = (rho - lam) / gjj
            elif rho < -lam:
                new = (rho + lam) / gjj
            else:
                new = 0.0
            step = new - b[j]
            if step != 0.0:
                b[j] = new
                for k in range(d):
                    g[k] += gram[k, j] * step
                if abs(step) > max_delta:
                    max_delta = abs(step)
        if max_delta <= tol:
            return it + 1, True
    return max_iter, False


def _gram_quantities(X, y):
    n = X.shape[0]
    return (2.0 / n) * (X.T @ X), (2.0 / n) * (X.T @ y)


def _column_scales(X):
    scales = X.std(axis=0)
    scales[scales == 0.0] = 1.0
    return scales


def lambda_max(X, y) -> float:
    """Smallest lambda at which the all-zero vector is optimal."""
    n = X.shape[0]
    return float(np.max(np.abs((2.0 / n) * (X.T @ y))))


def default_lambda_grid(X, y, n_lambda=DEFAULT_N_LAMBDA,
                        min_ratio=DEFAULT_LAMBDA_MIN_RATIO) -> np.ndarray:
    lam_max = lambda_max(X, y)
    if lam_max <= 0:
        lam_max = 1.0
    return np.geomspace(lam_max, lam_max * min_ratio, n_lambda)


def lasso_fit(ds: Dataset, lam: float, cfg: LassoConfig = LassoConfig()) -> LassoFit:
    """Fit at a single penalty level.  Non-convergence is flagged, not raised.

    lam = 0 is allowed and yields the unpenalized least-squares solution when
    the design has full column rank.
    """
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    validate_dataset(ds)
    X = ds.design
    scales = None
    if cfg.standardize:
        scales = _column_scales(X)
        X = X / scales
    gram, cty = _gram_quantities(X, ds.response)
    b = np.zeros(ds.dim)
    n_iter, converged = _cd_sweeps(gram, cty, b, float(lam), cfg.tol, cfg.max_iter)
    if scales is not None:
        b = b / scales
    return LassoFit(coef=b, lambda_=float(lam), n_iter=int(n_iter), converged=bool(converged))


def _path_fit(gram, cty, grid, tol, max_iter):
    """Warm-started coefficient path along a descending lambda grid."""
    d = cty.shape[0]
    b = np.zeros(d)
    coefs = np.empty((len(grid), d))
    for i, lam in enumerate(grid):
        _cd_sweeps(gram, cty, b, float(lam), tol, max_iter)
        coefs[i] = b
    return coefs


def lasso_cv(ds: Dataset, cfg: LassoConfig = LassoConfig()) -> tuple:
    """k-fold cross-validated fit; returns (LassoFit, chosen_lambda).

    Fold assignment is a seeded permutation split, so results are
    deterministic given ``cfg.seed``.  Ties in mean validation error go to
    the larger lambda.
    """
    validate_dataset(ds)
    n = ds.n
    if cfg.n_folds > n:
        raise ValueError(f"n_folds={cfg.n_folds} exceeds the sample size {n}")
    X = ds.design
    scales = None
    if cfg.standardize:
        scales = _column_scales(X)
        X = X / scales
    y = ds.response

    if cfg.lambda_grid is not None:
        grid = np.asarray(cfg.lambda_grid, dtype=float)
    else:
        grid = default_lambda_grid(X, y, cfg.n_lambda, cfg.lambda_min_ratio)
    if grid.size == 0:
        raise ValueError("lambda grid is empty")

    rng = np.random.default_rng(cfg.seed)
    fold_id = rng.permutation(n) % cfg.n_folds
    cv_sse = np.zeros(grid.size)
    for fold in range(cfg.n_folds):
        val = fold_id == fold
        X_tr, y_tr = X[~val], y[~val]
        X_va, y_va = X[val], y[val]
        gram, cty = _gram_quantities(X_tr, y_tr)
        coefs = _path_fit(gram, cty, grid, cfg.tol, cfg.max_iter)
        resid = y_va[None, :] - coefs @ X_va.T
        cv_sse += (resid ** 2).sum(axis=1)
    best = int(np.argmin(cv_sse / n))

    gram, cty = _gram_quantities(X, y)
    b = np.zeros(ds.dim)
    n_iter, converged = _cd_sweeps(gram, cty, b, float(grid[best]), cfg.tol, cfg.max_iter)
    if scales is not None:
        b = b / scales
    fit = LassoFit(coef=b, lambda_=float(grid[best]), n_iter=int(n_iter),
                   converged=bool(converged))
    return fit, float(grid[best])
