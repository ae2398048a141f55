"""Multi-start gradient projection rotation.

A single GPR run finds a local optimum of the Varimax criterion; running
from q random orthonormal starts and keeping the best-of-q solution finds
the global optimum with probability growing in q. Start sets are nested:
all q starts are drawn from the stream in index order before any rotation
runs, so the first q' starts of a larger run are byte-identical to a
smaller run with the same seed. That makes best-of-q exactly monotone in q
and lets one long run stand in for every smaller q.
"""

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .errors import InvalidInputError, NumericalError
from .rotation import GprParams, RotationSolution, _as_loading_matrix, gpr_rotate
from .seeding import as_generator

__all__ = [
    "StartSpec",
    "MultiStartResult",
    "random_orthonormal",
    "draw_starts",
    "rotate_from_starts",
    "run_random_starts",
    "multi_start_rotate",
    "adaptive_rotate",
]


@dataclass(frozen=True)
class StartSpec:
    """Start strategy: kind 'identity' or 'random'; q random starts."""

    kind: str = "random"
    q: int = 1

    def __post_init__(self):
        if self.kind not in ("identity", "random"):
            raise InvalidInputError(f"kind must be 'identity' or 'random', got {self.kind!r}")
        if self.kind == "random" and self.q < 1:
            raise InvalidInputError("q must be >= 1 for random starts")


@dataclass(frozen=True)
class MultiStartResult:
    """Best-of-q solution plus the criterion value of every start."""

    best: RotationSolution
    all_criteria: np.ndarray
    q_used: int


def random_orthonormal(k, rng):
    """Random orthogonal k x k matrix: standard-normal fill, QR, then each
    column flipped to the sign of its diagonal R entry (makes the
    distribution uniform over the orthogonal group).
    """
    if k < 1:
        raise InvalidInputError("k must be >= 1")
    rng = as_generator(rng)
    while True:
        x = rng.standard_normal((k, k))
        q, r = np.linalg.qr(x)
        d = np.diag(r)
        if np.all(np.abs(d) > 0):
            return np.ascontiguousarray(q * np.sign(d))
        # measure-zero rank deficiency: redraw


def draw_starts(k, q, rng):
    """Draw q start matrices from the stream in index order (so any prefix
    of a longer draw is byte-identical to a shorter one)."""
    rng = as_generator(rng)
    starts = np.empty((q, k, k))
    for i in range(q):
        starts[i] = random_orthonormal(k, rng)
    return starts


def rotate_from_starts(a, starts, params):
    """Rotate `a` from each given start. Returns (criteria, transforms);
    a start whose rotation fails numerically gets criterion -inf."""
    a = _as_loading_matrix(a)
    q, k = starts.shape[0], a.shape[1]
    criteria = np.empty(q)
    transforms = np.empty((q, k, k))
    for i in range(q):
        try:
            t, f_trace, _iters, _conv = _kernels.gpr(
                a, starts[i], params.alpha0, params.max_iter,
                params.grad_tol, params.max_halvings,
            )
            criteria[i] = -f_trace[-1]
            transforms[i] = t
        except (NumericalError, np.linalg.LinAlgError):
            criteria[i] = -np.inf
            transforms[i] = np.eye(k)
    return criteria, transforms


def run_random_starts(a, q, params, rng):
    """Rotate `a` from q nested random starts.

    Returns (criteria, transforms, starts): criterion_v per start (-inf for
    a start whose rotation failed numerically), the final transformation per
    start, and the start matrices themselves. Starts are all drawn before
    any rotation so prefixes are nested for a given stream.
    """
    a = _as_loading_matrix(a)
    starts = draw_starts(a.shape[1], q, rng)
    criteria, transforms = rotate_from_starts(a, starts, params)
    return criteria, transforms, starts


def _best_index(criteria):
    if not np.any(np.isfinite(criteria)):
        raise NumericalError("every start failed; no rotation solution available")
    return int(np.argmax(criteria))  # first occurrence wins ties


def multi_start_rotate(a, spec, params=None, rng=None):
    """Best-of-q rotation per StartSpec.

    kind='identity' runs a single rotation from T = I. kind='random' runs
    gpr_rotate from spec.q random orthonormal starts drawn from `rng` and
    returns the solution with maximal criterion_v (ties broken by first
    occurrence). A start that fails numerically is recorded with criterion
    -inf and excluded from the best.
    """
    a = _as_loading_matrix(a)
    if not isinstance(spec, StartSpec):
        raise InvalidInputError("spec must be a StartSpec")
    if params is None:
        params = GprParams()
    if spec.kind == "identity":
        best = gpr_rotate(a, np.eye(a.shape[1]), params)
        return MultiStartResult(
            best=best, all_criteria=np.array([best.criterion_v]), q_used=1
        )
    rng = as_generator(rng)
    criteria, _transforms, starts = run_random_starts(a, spec.q, params, rng)
    idx = _best_index(criteria)
    # re-run the winner to carry its full f_trace into the solution
    best = gpr_rotate(a, starts[idx], params)
    return MultiStartResult(best=best, all_criteria=criteria, q_used=spec.q)


def adaptive_rotate(a, schedule, eps_v, params=None, rng=None):
    """Multi-start rotation with stationarity stopping.

    Extends a nested start set along `schedule` (strictly increasing q
    values) and stops at the first consecutive pair whose best criterion
    improves by <= eps_v, returning the earlier point's best with q_used set
    to that schedule value. If no pair is stationary, returns the final
    point.
    """
    a = _as_loading_matrix(a)
    schedule = [int(s) for s in schedule]
    if len(schedule) == 0:
        raise InvalidInputError("schedule must be non-empty")
    if schedule[0] < 1 or any(b <= x for x, b in zip(schedule, schedule[1:])):
        raise InvalidInputError("schedule must be strictly increasing with first element >= 1")
    if not (np.isfinite(eps_v) and eps_v > 0):
        raise InvalidInputError("eps_v must be a positive finite number")
    if params is None:
        params = GprParams()
    rng = as_generator(rng)

    k = a.shape[1]
    q_max = schedule[-1]
    criteria = np.empty(q_max)
    starts = np.empty((q_max, k, k))
    drawn = 0

    def extend(q):
        nonlocal drawn
        for i in range(drawn, q):
            starts[i] = random_orthonormal(k, rng)
        for i in range(drawn, q):
            try:
                _t, f_trace, _iters, _conv = _kernels.gpr(
                    a, starts[i], params.alpha0, params.max_iter,
                    params.grad_tol, params.max_halvings,
                )
                criteria[i] = -f_trace[-1]
            except (NumericalError, np.linalg.LinAlgError):
                criteria[i] = -np.inf
        drawn = q

    def result_at(q):
        idx = _best_index(criteria[:q])
        best = gpr_rotate(a, starts[idx], params)
        return MultiStartResult(best=best, all_criteria=criteria[:q].copy(), q_used=q)

    extend(schedule[0])
    best_v = np.max(criteria[: schedule[0]])
    for prev_q, next_q in zip(schedule, schedule[1:]):
        extend(next_q)
        next_best = np.max(criteria[:next_q])
        if next_best - best_v <= eps_v:
            return result_at(prev_q)
        best_v = next_best
    return result_at(schedule[-1])
