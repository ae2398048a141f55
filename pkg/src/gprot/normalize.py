"""Row normalization of loading matrices (Kaiser weighting).

Scales each variable's loading row to unit length before rotation so every
variable contributes equally to the criterion, then restores the original
row norms afterwards. Orthogonal rotation commutes with the row scaling, so
normalize -> rotate -> denormalize equals rotating the raw matrix by the
same T.
"""

import numpy as np

from .errors import InvalidInputError, ZeroCommunalityError
from .rotation import _as_loading_matrix

__all__ = ["kaiser_normalize", "kaiser_denormalize"]

_ROW_NORM_FLOOR = 1e-12


def kaiser_normalize(a):
    """Scale each row of `a` to unit Euclidean norm.

    Returns (normalized, scales) where scales holds the original row norms,
    so `normalized * scales[:, None]` reproduces `a`. Raises
    ZeroCommunalityError if any row norm is below 1e-12.
    """
    a = _as_loading_matrix(a)
    scales = np.sqrt(np.sum(a * a, axis=1))
    bad = np.flatnonzero(scales < _ROW_NORM_FLOOR)
    if bad.size:
        raise ZeroCommunalityError(
            f"row(s) {bad.tolist()} have norm < {_ROW_NORM_FLOOR:g}; "
            "cannot normalize zero-communality variables"
        )
    return a / scales[:, None], scales


def kaiser_denormalize(loadings, scales):
    """Undo kaiser_normalize: multiply each row by its stored norm."""
    loadings = _as_loading_matrix(loadings)
    scales = np.asarray(scales, dtype=np.float64)
    if scales.shape != (loadings.shape[0],):
        raise InvalidInputError(
            f"scales shape {scales.shape} does not match {loadings.shape[0]} rows"
        )
    if not np.all(np.isfinite(scales)) or np.any(scales <= 0):
        raise InvalidInputError("scales must be positive finite row norms")
    return loadings * scales[:, None]
