"""Cross-domain transfer structure derived from true coefficient vectors.

The structure records which target/source coefficient pairs carry the same
value, splits both supports into shared and domain-specific parts, picks one
canonical target index per distinct shared value, and builds the binary
matching matrices that expand the canonical values back to the full shared
blocks.  All indices are stored 0-based; reports convert to 1-based.
"""

from dataclasses import dataclass

import numpy as np

from .validation import as_float_vector, check_finite_vector


@dataclass(frozen=True)
class TransferStructure:
    """Index sets and matching matrices linking two coefficient vectors.

    ``pair_set`` holds (j, l) pairs with beta[j] == theta[l] != 0 (up to the
    construction tolerance).  ``canonical`` lists one target index per
    distinct shared value, ascending, and ``match_target`` / ``match_source``
    are the |shared| x m binary matrices with exactly one 1 per row such that
    beta[target_shared] = match_target @ beta[canonical] (and analogously for
    the source) on the vectors used to build the structure.
    """

    pair_set: frozenset
    target_support: tuple
    source_support: tuple
    target_shared: tuple
    source_shared: tuple
    target_specific: tuple
    source_specific: tuple
    canonical: tuple
    match_target: np.ndarray
    match_source: np.ndarray

    @property
    def n_shared_values(self) -> int:
        """Number m of distinct shared coefficient values."""
        return len(self.canonical)


def _group_by_value(indices, values, tol):
    """Group indices whose values coincide up to ``tol``.

    Returns a list of groups, each a list of indices, ordered by the smallest
    index in the group.  With tol == 0 grouping is by exact equality; with
    tol > 0 values are merged single-linkage on the sorted value axis.
    """
    if len(indices) == 0:
        return []
    if tol == 0.0:
        groups = {}
        for j in indices:
            groups.setdefault(values[j], []).append(j)
        return sorted(groups.values(), key=min)
    order = sorted(indices, key=lambda j: values[j])
    groups = [[order[0]]]
    for j in order[1:]:
        if values[j] - values[groups[-1][-1]] <= tol:
            groups[-1].append(j)
        else:
            groups.append([j])
    return sorted(groups, key=min)


def build_transfer_structure(beta_true, theta_true, tol: float = 0.0) -> TransferStructure:
    """Derive the transfer structure from true coefficient vectors.

    A pair (j, l) is collected when |beta[j] - theta[l]| <= tol and
    |beta[j]| > tol; pairs of two (near-)zero coefficients are deliberately
    excluded since fusing zeros carries no information.  Supports are the
    indices with magnitude above tol.  With tol > 0 the matching-matrix
    reconstruction is exact only up to tol.
    """
    if tol < 0:
        raise ValueError(f"tol must be nonnegative, got {tol}")
    beta = as_float_vector(beta_true, "beta_true")
    theta = as_float_vector(theta_true, "theta_true")
    check_finite_vector(beta, "beta_true")
    check_finite_vector(theta, "theta_true")

    support_t = np.flatnonzero(np.abs(beta) > tol)
    support_s = np.flatnonzero(np.abs(theta) > tol)

    close = np.abs(np.subtract.outer(beta, theta)) <= tol
    close[np.abs(beta) <= tol, :] = False
    pair_set = frozenset((int(j), int(l)) for j, l in np.argwhere(close))

    in_support_s = np.zeros(theta.shape[0], dtype=bool)
    in_support_s[support_s] = True
    shared_t = sorted({j for (j, l) in pair_set if in_support_s[l]})
    shared_s = sorted({l for (j, l) in pair_set if in_support_s[l]})
    specific_t = sorted(int(j) for j in set(support_t) - set(shared_t))
    specific_s = sorted(int(l) for l in set(support_s) - set(shared_s))

    groups = _group_by_value(shared_t, beta, tol)
    canonical = tuple(min(g) for g in groups)
    alphas = np.array([beta[j] for j in canonical])
    m = len(canonical)

    match_t = np.zeros((len(shared_t), m))
    for i, j in enumerate(shared_t):
        for r, g in enumerate(groups):
            if j in g:
                match_t[i, r] = 1.0
                break
    match_s = np.zeros((len(shared_s), m))
    for i, l in enumerate(shared_s):
        match_s[i, int(np.argmin(np.abs(alphas - theta[l])))] = 1.0

    return TransferStructure(
        pair_set=pair_set,
        target_support=tuple(int(j) for j in support_t),
        source_support=tuple(int(l) for l in support_s),
        target_shared=tuple(shared_t),
        source_shared=tuple(shared_s),
        target_specific=tuple(specific_t),
        source_specific=tuple(specific_s),
        canonical=canonical,
        match_target=match_t,
        match_source=match_s,
    )
