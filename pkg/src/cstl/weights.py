"""Adaptive weight schemes for the fusion objective.

Two constructions: the ideal 0/1 weights available when the true sparsity
pattern and transfer structure are known, and the data-driven weights built
from the SCAD penalty derivative evaluated at initial estimates.
"""

from dataclasses import dataclass

import numpy as np

from .structure import TransferStructure
from .validation import as_float_vector

IDEAL = "ideal"
SCAD = "scad"

DEFAULT_SCAD_A = 3.7


@dataclass(frozen=True)
class WeightScheme:
    """Feature weights w_j (length d_t) and pair weights w_jl (d_t x d_s), all in [0, 1]."""

    feature_weights: np.ndarray
    pair_weights: np.ndarray
    kind: str


def scad_derivative(t, lam: float, a: float = DEFAULT_SCAD_A):
    """SCAD penalty derivative p'_lam(|t|), magnitude convention.

    Piecewise: lam on [0, lam], linearly decaying (a*lam - |t|)/(a - 1) on
    (lam, a*lam], and 0 beyond a*lam.  Accepts scalars or arrays.
    """
    if lam <= 0:
        raise ValueError(f"lam must be positive, got {lam}")
    if a <= 2:
        raise ValueError(f"SCAD parameter a must exceed 2, got {a}")
    at = np.abs(np.asarray(t, dtype=float))
    out = np.where(
        at <= lam,
        lam,
        np.where(at <= a * lam, (a * lam - at) / (a - 1.0), 0.0),
    )
    return float(out) if np.isscalar(t) else out


def scad_weight_scheme(beta_init, theta_init, lambda0: float, lambda1: float,
                       a: float = DEFAULT_SCAD_A) -> WeightScheme:
    """Data-driven weights from initial estimates.

    w_j = p'_lambda0(|beta_init_j|) / lambda0 and
    w_jl = p'_lambda1(|beta_init_j - theta_init_l|) / lambda1, so small
    initial magnitudes/differences get weight near 1 and large ones weight 0.
    """
    beta_init = as_float_vector(beta_init, "beta_init")
    theta_init = as_float_vector(theta_init, "theta_init")
    feature = scad_derivative(np.abs(beta_init), lambda0, a) / lambda0
    pair = scad_derivative(np.abs(np.subtract.outer(beta_init, theta_init)), lambda1, a) / lambda1
    return WeightScheme(feature_weights=feature, pair_weights=pair, kind=SCAD)


def ideal_weight_scheme(ts: TransferStructure, d_t: int, d_s: int) -> WeightScheme:
    """Oracle 0/1 weights: penalize only inactive target coefficients and true pairs."""
    if ts.target_support and max(ts.target_support) >= d_t:
        raise ValueError(f"structure refers to target index {max(ts.target_support)} but d_t={d_t}")
    if ts.source_support and max(ts.source_support) >= d_s:
        raise ValueError(f"structure refers to source index {max(ts.source_support)} but d_s={d_s}")
    feature = np.ones(d_t)
    feature[list(ts.target_support)] = 0.0
    pair = np.zeros((d_t, d_s))
    for j, l in ts.pair_set:
        pair[j, l] = 1.0
    return WeightScheme(feature_weights=feature, pair_weights=pair, kind=IDEAL)
