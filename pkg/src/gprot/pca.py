"""Correlation matrices and unrotated principal component loadings."""

import numpy as np

from .errors import DegenerateVariableError, InvalidCorrelationError, InvalidInputError

__all__ = ["correlation_matrix", "pca_loadings"]

_VAR_FLOOR = 1e-12


def correlation_matrix(x):
    """Pearson correlation matrix of an n x m data matrix (rows = cases).

    The result is exactly symmetric with a unit diagonal. A column with
    variance <= 1e-12 raises DegenerateVariableError.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2 or x.shape[1] < 1:
        raise InvalidInputError(f"need an n x m data matrix with n >= 2, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise InvalidInputError("data must contain only finite values")
    centered = x - x.mean(axis=0)
    var = np.mean(centered * centered, axis=0)
    bad = np.flatnonzero(var <= _VAR_FLOOR)
    if bad.size:
        raise DegenerateVariableError(
            f"column(s) {bad.tolist()} have (near) zero variance; correlation undefined"
        )
    z = centered / np.sqrt(var)
    r = (z.T @ z) / x.shape[0]
    r = 0.5 * (r + r.T)
    np.fill_diagonal(r, 1.0)
    return r


def _sign_fix(vec):
    # column sign convention: entry sum >= 0; on a near-zero sum the first
    # maximal-magnitude entry decides
    s = vec.sum()
    if abs(s) <= 1e-12:
        lead = vec[np.argmax(np.abs(vec))]
        return vec if lead >= 0 else -vec
    return vec if s > 0 else -vec


def pca_loadings(r, k):
    """Top-k principal component loadings of a correlation matrix.

    Column j is eigenvector_j * sqrt(eigenvalue_j) for the k largest
    eigenvalues in descending order. Exactly tied eigenvalues are ordered by
    descending lexicographic comparison of their sign-fixed eigenvectors, so
    the identity correlation matrix yields identity loadings. An eigenvalue
    below -1e-10 raises InvalidCorrelationError; tiny negative eigenvalues
    are clamped to zero.
    """
    r = np.asarray(r, dtype=np.float64)
    if r.ndim != 2 or r.shape[0] != r.shape[1]:
        raise InvalidInputError(f"correlation matrix must be square, got shape {r.shape}")
    m = r.shape[0]
    if not (1 <= k <= m):
        raise InvalidInputError(f"k must be in [1, {m}], got {k}")
    if not np.all(np.isfinite(r)):
        raise InvalidInputError("correlation matrix must contain only finite values")
    if np.max(np.abs(r - r.T)) > 1e-12:
        raise InvalidInputError("correlation matrix must be symmetric")

    eigvals, eigvecs = np.linalg.eigh(0.5 * (r + r.T))
    if eigvals[0] < -1e-10:
        raise InvalidCorrelationError(
            f"eigenvalue {eigvals[0]:.3e} < -1e-10; not a correlation matrix"
        )
    eigvals = np.clip(eigvals, 0.0, None)

    # descending by eigenvalue; stable so exact ties keep eigh order until
    # the lexicographic pass below
    order = np.argsort(-eigvals, kind="stable")
    eigvals = eigvals[order]
    eigvecs = eigvecs[:, order]
    vecs = [_sign_fix(eigvecs[:, j]) for j in range(m)]

    # reorder exact-tie groups by descending lexicographic entry comparison
    cols = list(range(m))
    start = 0
    while start < m:
        stop = start + 1
        while stop < m and eigvals[stop] == eigvals[start]:
            stop += 1
        if stop - start > 1:
            cols[start:stop] = sorted(
                cols[start:stop], key=lambda j: tuple(-vecs[j])
            )
        start = stop

    loadings = np.empty((m, k))
    for out_j, j in enumerate(cols[:k]):
        loadings[:, out_j] = vecs[j] * np.sqrt(eigvals[out_j])
    return loadings
