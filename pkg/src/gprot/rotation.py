"""Gradient projection rotation of component loading matrices.

Rotates an initial loading matrix A toward the Varimax criterion over the
orthogonal group: maximize v(A @ T) subject to T'T = I. The optimizer is
projected gradient descent on the minimized objective f = -v with step
halving and an SVD retraction back onto the orthogonal group.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import DegenerateProjectionError, InvalidInputError

__all__ = [
    "GprParams",
    "RotationSolution",
    "varimax_criterion",
    "varimax_gradient",
    "project_orthogonal",
    "gpr_rotate",
]

_ORTHO_TOL = 1e-8


@dataclass(frozen=True)
class GprParams:
    """Tuning parameters for gpr_rotate.

    alpha0 : initial step length (uncritical; the line search adapts it)
    max_iter : outer iteration cap
    grad_tol : convergence threshold on the projected-gradient Frobenius norm
    max_halvings : step halvings allowed per iteration before the point is
        treated as numerically stationary
    """

    alpha0: float = 1.0
    max_iter: int = 1000
    grad_tol: float = 1e-6
    max_halvings: int = 30

    def __post_init__(self):
        if not (np.isfinite(self.alpha0) and self.alpha0 > 0):
            raise InvalidInputError("alpha0 must be a positive finite number")
        if self.max_iter < 1:
            raise InvalidInputError("max_iter must be >= 1")
        if not (np.isfinite(self.grad_tol) and self.grad_tol > 0):
            raise InvalidInputError("grad_tol must be a positive finite number")
        if self.max_halvings < 1:
            raise InvalidInputError("max_halvings must be >= 1")


@dataclass(frozen=True)
class RotationSolution:
    """Result of one rotation run.

    loadings : rotated loading matrix, exactly the product A @ transform
    transform : orthogonal transformation matrix T
    f_value : final minimized objective, f = -v
    criterion_v : Varimax criterion of `loadings` (= -f_value)
    f_trace : accepted objective values, first entry f at the start point;
        strictly decreasing
    converged : True when the projected-gradient norm fell below grad_tol
        (or descent stalled within the halving cap, which is reported as
        convergence at a numerically stationary point)
    iterations : outer iterations performed
    """

    loadings: np.ndarray
    transform: np.ndarray
    f_value: float
    criterion_v: float
    f_trace: np.ndarray
    converged: bool
    iterations: int


def _as_loading_matrix(a, name="loadings"):
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] < 1 or a.shape[1] < 1:
        raise InvalidInputError(f"{name} must be a 2-D matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} must contain only finite values")
    return np.ascontiguousarray(a)


def varimax_criterion(loadings):
    """Varimax criterion v: mean over columns of the variance of squared
    loadings within the column. Larger is simpler structure.
    """
    a = _as_loading_matrix(loadings)
    f, _g = _kernels.varimax_fg(a)
    return float(-f)


def varimax_gradient(loadings):
    """Gradient of the minimized objective Q = -v with respect to the
    loadings, dQ/dLambda = -(4/(k*m)) * Lambda * (Lambda^2 - column means).
    """
    a = _as_loading_matrix(loadings)
    _f, g = _kernels.varimax_fg(a)
    return g


def project_orthogonal(m_matrix):
    """Nearest orthogonal matrix in Frobenius norm: U @ Vt from the SVD.

    Raises DegenerateProjectionError when the smallest singular value is
    below 1e-12 (the nearest orthogonal matrix is then not unique).
    """
    m = np.asarray(m_matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise InvalidInputError(f"expected a square matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise InvalidInputError("matrix must contain only finite values")
    u, sv, vt = np.linalg.svd(m)
    if sv[-1] < 1e-12:
        raise DegenerateProjectionError(
            f"smallest singular value {sv[-1]:.3e} < 1e-12; projection not unique"
        )
    return u @ vt


def _check_orthogonal(t, k, name="t0"):
    t = np.asarray(t, dtype=np.float64)
    if t.shape != (k, k):
        raise InvalidInputError(f"{name} must have shape ({k}, {k}), got {t.shape}")
    if not np.all(np.isfinite(t)):
        raise InvalidInputError(f"{name} must contain only finite values")
    err = np.linalg.norm(t.T @ t - np.eye(k))
    if err > _ORTHO_TOL:
        raise InvalidInputError(f"{name} is not orthogonal (||T'T - I||_F = {err:.3e})")
    return np.ascontiguousarray(t)


def gpr_rotate(a, t0=None, params=None):
    """Rotate loading matrix `a` toward the Varimax criterion by gradient
    projection, starting from transformation `t0` (identity by default).

    Each iteration projects the objective gradient onto the tangent space of
    the orthogonal group at T, steps along it, retracts via SVD, and accepts
    the step under a sufficient-decrease rule, halving the step length up to
    `max_halvings` times. Stops when the projected-gradient norm drops below
    grad_tol; hitting max_iter first returns converged=False with the best
    solution so far.

    Returns a RotationSolution.
    """
    a = _as_loading_matrix(a)
    m, k = a.shape
    if m < k:
        raise InvalidInputError(f"need at least as many rows as columns, got {a.shape}")
    if params is None:
        params = GprParams()
    if t0 is None:
        t0 = np.eye(k)
    t0 = _check_orthogonal(t0, k)
    t, f_trace, iterations, converged = _kernels.gpr(
        a, t0, params.alpha0, params.max_iter, params.grad_tol, params.max_halvings
    )
    f_value = float(f_trace[-1])
    return RotationSolution(
        loadings=a @ t,
        transform=t,
        f_value=f_value,
        criterion_v=-f_value,
        f_trace=f_trace,
        converged=bool(converged),
        iterations=int(iterations),
    )
