"""Scikit-learn style estimator wrapping the full pipeline.

Fit order: cross-validated Lasso on each domain for initial estimates,
SCAD-derivative weights rebuilt per grid point, the structured ADMM solve,
and BIC selection of (lambda0, lambda1).
"""

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin
from sklearn.utils.validation import check_is_fitted

from .admm import AdmmOptions
from .data import Dataset
from .lasso import LassoConfig, lasso_cv
from .tuning import DEFAULT_EPS_FUSE, TuningGrid, grid_search_cstl
from .validation import as_float_matrix, check_design_response, check_finite_matrix
from .weights import DEFAULT_SCAD_A


class CSTLRegressor(BaseEstimator, RegressorMixin):
    """Transfer-learning linear regression via all-pairs weighted fusion.

    Every target coefficient is compared against every source coefficient
    through a weighted l1 fusion penalty, so signal can transfer even when
    features are not semantically aligned across domains.

    Parameters
    ----------
    lambda0_grid, lambda1_grid : sequence of float, optional
        Descending candidate penalty levels.  Default: ``n_grid`` log-spaced
        values in [0.01, 1.0] scaled by sqrt(log(d_t)/n_t).
    n_grid : int
        Size of each default grid.
    eps_fuse : float
        Gap below which estimated coefficients count as fused in the BIC
        degrees of freedom.
    scad_a : float
        SCAD shape parameter (> 2) for the data-driven weights.
    rho0, rho1 : float
        ADMM penalty parameters for the sparsity and fusion splits; rho1
        defaults to the scale-aware 2 / (d_t + d_s).
    eps_abs : float
        Absolute ADMM stopping scale; tolerances are eps_abs * sqrt(dim).
    max_admm_iter : int
        Iteration cap per ADMM solve.
    lasso_n_lambda, lasso_n_folds, lasso_tol, lasso_max_iter : optional
        Controls for the cross-validated Lasso initializer.
    standardize : bool
        Rescale design columns to unit standard deviation inside the Lasso
        initializer (for unnormalized real data); initial estimates are
        reported on the original scale.
    augment_noise_feature : bool
        Append one seeded standard-normal noise column to the target design
        before fitting (its true coefficient is zero), which restores the
        implicit source sparsity penalty when every target coefficient is
        active.  The reported ``coef_`` excludes the extra column.
    random_state : int
        Seed for cross-validation folds and the optional noise column.

    Attributes
    ----------
    coef_ : ndarray of shape (d_t,)
        Estimated target coefficients.
    source_coef_ : ndarray of shape (d_s,)
        Estimated source coefficients.
    lambda0_, lambda1_ : float
        BIC-selected penalty levels.
    bic_, objective_ : float
        Score and objective value of the selected fit.
    n_iter_ : int
        ADMM iterations used by the selected fit.
    converged_ : bool
        Whether the selected solve met the residual stopping rule.
    init_coef_, init_source_coef_ : ndarray
        Lasso initial estimates that define the weights.
    """

    def __init__(self, lambda0_grid=None, lambda1_grid=None, n_grid=10,
                 eps_fuse=DEFAULT_EPS_FUSE, scad_a=DEFAULT_SCAD_A,
                 rho0=1.0, rho1=None, eps_abs=1e-5, max_admm_iter=5000,
                 lasso_n_lambda=50, lasso_n_folds=5, lasso_tol=1e-7,
                 lasso_max_iter=1000, standardize=False,
                 augment_noise_feature=False, random_state=0):
        self.lambda0_grid = lambda0_grid
        self.lambda1_grid = lambda1_grid
        self.n_grid = n_grid
        self.eps_fuse = eps_fuse
        self.scad_a = scad_a
        self.rho0 = rho0
        self.rho1 = rho1
        self.eps_abs = eps_abs
        self.max_admm_iter = max_admm_iter
        self.lasso_n_lambda = lasso_n_lambda
        self.lasso_n_folds = lasso_n_folds
        self.lasso_tol = lasso_tol
        self.lasso_max_iter = lasso_max_iter
        self.standardize = standardize
        self.augment_noise_feature = augment_noise_feature
        self.random_state = random_state

    def _grid(self, d_t, n_t):
        default = TuningGrid.default(d_t, n_t, self.n_grid, self.eps_fuse)
        lam0 = self.lambda0_grid if self.lambda0_grid is not None else default.lambda0_grid
        lam1 = self.lambda1_grid if self.lambda1_grid is not None else default.lambda1_grid
        return TuningGrid(lambda0_grid=tuple(lam0), lambda1_grid=tuple(lam1),
                          eps_fuse=self.eps_fuse)

    def fit(self, X, y, X_source=None, y_source=None):
        """Fit on target data (X, y) borrowing strength from the source pair."""
        if X_source is None or y_source is None:
            raise ValueError("CSTLRegressor.fit requires X_source and y_source")
        X, y = check_design_response(X, y, "X", "y")
        X_source, y_source = check_design_response(X_source, y_source,
                                                   "X_source", "y_source")
        d_t = X.shape[1]
        if self.augment_noise_feature:
            rng = np.random.default_rng(self.random_state)
            X = np.hstack([X, rng.standard_normal((X.shape[0], 1))])

        target = Dataset(design=X, response=y, domain_tag="target")
        source = Dataset(design=X_source, response=y_source, domain_tag="source")
        lasso_cfg = LassoConfig(n_folds=self.lasso_n_folds, max_iter=self.lasso_max_iter,
                                tol=self.lasso_tol, seed=self.random_state,
                                standardize=self.standardize,
                                n_lambda=self.lasso_n_lambda)
        beta_init = lasso_cv(target, lasso_cfg)[0].coef
        theta_init = lasso_cv(source, lasso_cfg)[0].coef

        fit = grid_search_cstl(
            target, source, self._grid(target.dim, target.n),
            beta_init=beta_init, theta_init=theta_init, scad_a=self.scad_a,
            rho0=self.rho0, rho1=self.rho1,
            admm_opts=AdmmOptions(eps_abs=self.eps_abs, max_iter=self.max_admm_iter),
        )

        self.coef_ = fit.beta[:d_t]
        self.noise_coef_ = float(fit.beta[d_t]) if self.augment_noise_feature else None
        self.source_coef_ = fit.theta
        self.lambda0_ = fit.lambda0
        self.lambda1_ = fit.lambda1
        self.bic_ = fit.bic
        self.objective_ = fit.objective
        self.n_iter_ = fit.iterations
        self.converged_ = fit.converged
        self.init_coef_ = beta_init[:d_t]
        self.init_source_coef_ = theta_init
        return self

    def predict(self, X):
        check_is_fitted(self, "coef_")
        X = as_float_matrix(X, "X")
        check_finite_matrix(X, "X")
        return X @ self.coef_

    def pairwise_differences(self):
        """|coef_[j] - source_coef_[l]| for every target-source pair."""
        check_is_fitted(self, "coef_")
        return np.abs(np.subtract.outer(self.coef_, self.source_coef_))
