"""Recovery metrics: congruence, component matching, aligned RMSE.

Rotation output has arbitrary column order and sign, so comparisons against
a target matrix first match columns one-to-one (Hungarian assignment on
absolute Tucker congruence) and flip signs, then evaluate congruence and
root-mean-square error on the aligned loadings.
"""

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import InvalidInputError, UndefinedCongruenceError

__all__ = [
    "Matching",
    "tucker_congruence",
    "match_components",
    "align",
    "mean_congruence",
    "rmse_loadings",
]


@dataclass(frozen=True)
class Matching:
    """One-to-one column alignment of a rotated matrix to a target.

    perm[j] is the rotated-matrix column assigned to target column j and
    signs[j] the factor (+1/-1) applied to it; per_component_c[j] is the
    congruence of the aligned pair (nonnegative by construction).
    """

    perm: np.ndarray
    signs: np.ndarray
    per_component_c: np.ndarray


def tucker_congruence(x, y):
    """Tucker's coefficient of congruence between two loading vectors:
    sum(x*y) / sqrt(sum(x^2) * sum(y^2)). Raises UndefinedCongruenceError
    for a zero vector.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape or x.size == 0:
        raise InvalidInputError("vectors must share a nonzero length")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidInputError("vectors must contain only finite values")
    nx = np.sqrt(np.sum(x * x))
    ny = np.sqrt(np.sum(y * y))
    if nx == 0.0 or ny == 0.0:
        raise UndefinedCongruenceError("congruence of a zero vector is undefined")
    return float(np.sum(x * y) / (nx * ny))


def _check_pair(loadings, target):
    loadings = np.asarray(loadings, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if loadings.ndim != 2 or loadings.shape != target.shape:
        raise InvalidInputError(
            f"shape mismatch: loadings {loadings.shape} vs target {target.shape}"
        )
    if not (np.all(np.isfinite(loadings)) and np.all(np.isfinite(target))):
        raise InvalidInputError("matrices must contain only finite values")
    return loadings, target


def match_components(loadings, target):
    """Assign rotated columns to target columns, maximizing total absolute
    congruence (Hungarian algorithm), and choose signs so every matched
    congruence is nonnegative.
    """
    loadings, target = _check_pair(loadings, target)
    k = loadings.shape[1]
    norm_l = np.sqrt(np.sum(loadings * loadings, axis=0))
    norm_t = np.sqrt(np.sum(target * target, axis=0))
    if np.any(norm_l == 0.0) or np.any(norm_t == 0.0):
        raise UndefinedCongruenceError("congruence of a zero column is undefined")
    c = (loadings.T @ target) / np.outer(norm_l, norm_t)
    row_ind, col_ind = linear_sum_assignment(-np.abs(c))
    perm = np.empty(k, dtype=np.intp)
    signs = np.empty(k)
    per_c = np.empty(k)
    for i, j in zip(row_ind, col_ind):
        perm[j] = i
        signs[j] = -1.0 if c[i, j] < 0 else 1.0
        per_c[j] = abs(c[i, j])
    return Matching(perm=perm, signs=signs, per_component_c=per_c)


def align(loadings, matching):
    """Apply a Matching: reorder columns to target order and flip signs."""
    loadings = np.asarray(loadings, dtype=np.float64)
    return loadings[:, matching.perm] * matching.signs


def mean_congruence(matching):
    """Mean matched congruence across components."""
    if not isinstance(matching, Matching):
        raise InvalidInputError("expected a Matching")
    return float(np.mean(matching.per_component_c))


def rmse_loadings(loadings, target, matching=None):
    """Root-mean-square difference over all m*k entries after alignment.

    With matching=None the columns are compared as given.
    """
    loadings, target = _check_pair(loadings, target)
    if matching is not None:
        loadings = align(loadings, matching)
    diff = loadings - target
    return float(np.sqrt(np.mean(diff * diff)))
