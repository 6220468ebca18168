"""Closed-form oracle estimator under a known transfer structure.

The shared block is a least-squares fit of both responses on the compressed
(matching-matrix) designs after projecting out each domain's specific
columns; the specific blocks then regress the leftover residuals on their
own columns.  ``oracle_fit_reference`` solves the same constrained problem
by explicit reparameterization and one dense normal-equations solve; it is
kept as an independent cross-check.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from .data import Dataset, validate_dataset
from .structure import TransferStructure


@dataclass(frozen=True)
class OracleFit:
    """Estimates with the true structure imposed: exact zeros off-support and
    matching-matrix reconstruction of the shared blocks by construction."""

    beta: np.ndarray
    theta: np.ndarray
    shared_values: np.ndarray


def _solve_spd(A, b, block: str):
    try:
        return cho_solve(cho_factor(A, lower=True), b)
    except LinAlgError as err:
        raise ValueError(f"singular Gram matrix in the {block} block") from err


def _residualize(X_specific, M):
    """Apply (I - P) for the projection P onto the span of X_specific."""
    if X_specific.shape[1] == 0:
        return M
    coef = _solve_spd(X_specific.T @ X_specific, X_specific.T @ M, "projection")
    return M - X_specific @ coef


def _check_rank_conditions(ts: TransferStructure, n_t: int, n_s: int):
    m = ts.n_shared_values
    if m >= n_t:
        raise ValueError(f"rank condition violated: {m} shared values but only {n_t} target rows")
    if len(ts.target_specific) >= n_t:
        raise ValueError(
            f"rank condition violated: {len(ts.target_specific)} target-specific "
            f"columns but only {n_t} target rows"
        )
    if len(ts.source_specific) >= n_s:
        raise ValueError(
            f"rank condition violated: {len(ts.source_specific)} source-specific "
            f"columns but only {n_s} source rows"
        )


def _compressed_designs(target: Dataset, source: Dataset, ts: TransferStructure):
    xt_shared = target.design[:, list(ts.target_shared)] @ ts.match_target
    xs_shared = source.design[:, list(ts.source_shared)] @ ts.match_source
    xt_spec = target.design[:, list(ts.target_specific)]
    xs_spec = source.design[:, list(ts.source_specific)]
    return xt_shared, xs_shared, xt_spec, xs_spec


def _assemble(ts: TransferStructure, d_t: int, d_s: int, alpha, beta_spec, theta_spec):
    beta = np.zeros(d_t)
    theta = np.zeros(d_s)
    if ts.target_shared:
        beta[list(ts.target_shared)] = ts.match_target @ alpha
    if ts.source_shared:
        theta[list(ts.source_shared)] = ts.match_source @ alpha
    if ts.target_specific:
        beta[list(ts.target_specific)] = beta_spec
    if ts.source_specific:
        theta[list(ts.source_specific)] = theta_spec
    return OracleFit(beta=beta, theta=theta, shared_values=np.asarray(alpha, dtype=float))


def oracle_fit(target: Dataset, source: Dataset, ts: TransferStructure) -> OracleFit:
    """Oracle estimates via the two-stage closed form.

    Stage one solves for the m shared values from both domains with the
    specific columns projected out; stage two regresses each domain's
    residual response on its specific columns.  Singular Gram matrices are
    an error rather than a pseudo-inverse fallback.
    """
    validate_dataset(target)
    validate_dataset(source)
    n_t, n_s = target.n, source.n
    _check_rank_conditions(ts, n_t, n_s)
    xt_shared, xs_shared, xt_spec, xs_spec = _compressed_designs(target, source, ts)
    y_t, y_s = target.response, source.response
    m = ts.n_shared_values

    if m > 0:
        rt_shared = _residualize(xt_spec, xt_shared)
        rs_shared = _residualize(xs_spec, xs_shared)
        gram = xt_shared.T @ rt_shared / n_t + xs_shared.T @ rs_shared / n_s
        rhs = xt_shared.T @ _residualize(xt_spec, y_t) / n_t \
            + xs_shared.T @ _residualize(xs_spec, y_s) / n_s
        alpha = _solve_spd(gram, rhs, "shared")
    else:
        alpha = np.zeros(0)

    beta_spec = np.zeros(0)
    if xt_spec.shape[1] > 0:
        resid = y_t - xt_shared @ alpha if m > 0 else y_t
        beta_spec = _solve_spd(xt_spec.T @ xt_spec, xt_spec.T @ resid, "target-specific")
    theta_spec = np.zeros(0)
    if xs_spec.shape[1] > 0:
        resid = y_s - xs_shared @ alpha if m > 0 else y_s
        theta_spec = _solve_spd(xs_spec.T @ xs_spec, xs_spec.T @ resid, "source-specific")

    return _assemble(ts, target.dim, source.dim, alpha, beta_spec, theta_spec)


def oracle_fit_reference(target: Dataset, source: Dataset, ts: TransferStructure) -> OracleFit:
    """Reparameterized constrained least squares, a single dense solve.

    Free variables are the shared values followed by the target- and
    source-specific coefficients; the stacked design carries the 1/sqrt(n_k)
    loss scaling.  Test-time cross-check for :func:`oracle_fit`.
    """
    validate_dataset(target)
    validate_dataset(source)
    n_t, n_s = target.n, source.n
    _check_rank_conditions(ts, n_t, n_s)
    xt_shared, xs_shared, xt_spec, xs_spec = _compressed_designs(target, source, ts)
    m = ts.n_shared_values
    k_t, k_s = xt_spec.shape[1], xs_spec.shape[1]

    top = np.hstack([xt_shared, xt_spec, np.zeros((n_t, k_s))]) / np.sqrt(n_t)
    bottom = np.hstack([xs_shared, np.zeros((n_s, k_t)), xs_spec]) / np.sqrt(n_s)
    Z = np.vstack([top, bottom])
    y = np.concatenate([target.response / np.sqrt(n_t), source.response / np.sqrt(n_s)])
    if Z.shape[1] == 0:
        return _assemble(ts, target.dim, source.dim, np.zeros(0), np.zeros(0), np.zeros(0))
    free = _solve_spd(Z.T @ Z, Z.T @ y, "pooled")
    return _assemble(ts, target.dim, source.dim,
                     free[:m], free[m:m + k_t], free[m + k_t:])
