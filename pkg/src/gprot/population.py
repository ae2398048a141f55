"""Finite populations with perfect orthogonal simple structure.

Builds an N-case population in three steps: draw z-standardized normal
data, orthogonalize it exactly by keeping all k+m principal component
scores (uncorrelated with unit variance in the finite population by
construction), then mix the first k scores as common factors and the rest
as unique factors: Z = F A' + d U with main loading a on six variables per
factor and d = sqrt(1 - a^2). Component analysis of Z then yields main
component loadings larger than a (component loadings absorb part of the
unique variance), which is the effect the back-check formula inverts.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientCasesError, InvalidInputError, NumericalError
from .pairwise import PairwiseParams, pairwise_varimax
from .pca import correlation_matrix, pca_loadings
from .seeding import as_generator

__all__ = [
    "PopulationSpec",
    "PopulationModel",
    "generate_population",
    "back_check_factor_loading",
    "draw_sample",
    "population_cache_key",
    "save_population",
    "load_population",
]


@dataclass(frozen=True)
class PopulationSpec:
    """k components, six variables each (m = 6k), main loading
    `main_loading` (default .50), `cases` population rows, RNG seed."""

    k: int
    cases: int
    main_loading: float = 0.5
    seed: int = 0

    @property
    def m(self):
        return 6 * self.k

    def __post_init__(self):
        if self.k < 1:
            raise InvalidInputError("k must be >= 1")
        if not (0.0 < self.main_loading < 1.0):
            raise InvalidInputError("main_loading must be in (0, 1)")
        if self.cases < self.m + self.k:
            raise InsufficientCasesError(
                f"need at least m + k = {self.m + self.k} cases, got {self.cases}"
            )


@dataclass(frozen=True)
class PopulationModel:
    """Generated population: the factor pattern used to mix it, the error
    loading d, the N x m data matrix, its correlation matrix, and the
    Varimax-rotated k-component loadings of the population data."""

    spec: PopulationSpec
    factor_pattern: np.ndarray
    error_loading: float
    data: np.ndarray
    correlation: np.ndarray
    component_loadings: np.ndarray


def _standardize(x):
    centered = x - x.mean(axis=0)
    sd = np.sqrt(np.mean(centered * centered, axis=0))
    if np.any(sd <= 0):
        raise NumericalError("degenerate column in generated data")
    return centered / sd


def generate_population(spec):
    """Generate a PopulationModel per the three-step mixing procedure."""
    if not isinstance(spec, PopulationSpec):
        raise InvalidInputError("spec must be a PopulationSpec")
    k, m, n_cases = spec.k, spec.m, spec.cases
    rng = np.random.default_rng(spec.seed)

    x = _standardize(rng.standard_normal((n_cases, k + m)))
    # full PCA scores: exactly uncorrelated, unit variance in this population
    r = (x.T @ x) / n_cases
    w, vecs = np.linalg.eigh(0.5 * (r + r.T))
    if w[0] <= 1e-12:
        raise NumericalError(
            "generated base data is rank deficient; increase the number of cases"
        )
    order = np.argsort(-w, kind="stable")
    scores = (x @ vecs[:, order]) / np.sqrt(w[order])

    f = scores[:, :k]
    u = scores[:, k:]
    pattern = np.zeros((m, k))
    for j in range(k):
        pattern[6 * j : 6 * j + 6, j] = spec.main_loading
    d = float(np.sqrt(1.0 - spec.main_loading**2))
    z = f @ pattern.T + d * u

    corr = correlation_matrix(z)
    unrotated = pca_loadings(corr, k)
    rotated = pairwise_varimax(unrotated, PairwiseParams(kaiser_normalize=True))
    return PopulationModel(
        spec=spec,
        factor_pattern=pattern,
        error_loading=d,
        data=z,
        correlation=corr,
        component_loadings=rotated.loadings,
    )


def back_check_factor_loading(a_star, h2, lambda_star):
    """Recover the factor loading implied by a population component loading.

    Component loadings a* overestimate factor loadings a because components
    absorb unique variance; the correction is
    a = sqrt(a*^2 * (1 - (1 - h2)/lambda_star)) with h2 the factor-model
    communality and lambda_star the component's eigenvalue. (Of the two
    typographic readings of the source formula, this is the one that maps
    a* = .612 back to a = .50 for the k=3 population; the alternative,
    with a* unsquared, returns .639 and is rejected.)
    """
    if not (np.isfinite(a_star) and np.isfinite(h2) and np.isfinite(lambda_star)):
        raise InvalidInputError("arguments must be finite")
    if lambda_star <= 0:
        raise InvalidInputError("lambda_star must be positive")
    if not (0.0 <= h2 <= 1.0):
        raise InvalidInputError("h2 must be in [0, 1]")
    val = a_star * a_star * (1.0 - (1.0 - h2) / lambda_star)
    if val < 0:
        raise InvalidInputError(
            f"square-root argument {val:.6g} is negative; inputs outside the "
            "formula's domain"
        )
    return float(np.sqrt(val))


def draw_sample(pop, n, rng):
    """Draw n rows without replacement from pop.data (deterministic for a
    given stream)."""
    if not isinstance(pop, PopulationModel):
        raise InvalidInputError("pop must be a PopulationModel")
    n_cases = pop.data.shape[0]
    if not (2 <= n <= n_cases):
        raise InvalidInputError(f"n must be in [2, {n_cases}], got {n}")
    rng = as_generator(rng)
    idx = rng.choice(n_cases, size=n, replace=False)
    return pop.data[idx]


def population_cache_key(spec):
    """Stable hash of the spec fields, used as the cache file stem."""
    text = (
        f"k={spec.k};cases={spec.cases};"
        f"main_loading={spec.main_loading!r};seed={spec.seed}"
    )
    return hashlib.sha256(text.encode("utf-8")).hexdigest()[:16]


def save_population(pop, path):
    """Persist a PopulationModel as .npz (spec fields + arrays)."""
    np.savez_compressed(
        path,
        k=pop.spec.k,
        cases=pop.spec.cases,
        main_loading=pop.spec.main_loading,
        seed=pop.spec.seed,
        factor_pattern=pop.factor_pattern,
        error_loading=pop.error_loading,
        data=pop.data,
        correlation=pop.correlation,
        component_loadings=pop.component_loadings,
    )


def load_population(path):
    """Load a PopulationModel saved by save_population."""
    with np.load(path) as z:
        spec = PopulationSpec(
            k=int(z["k"]),
            cases=int(z["cases"]),
            main_loading=float(z["main_loading"]),
            seed=int(z["seed"]),
        )
        return PopulationModel(
            spec=spec,
            factor_pattern=z["factor_pattern"],
            error_loading=float(z["error_loading"]),
            data=z["data"],
            correlation=z["correlation"],
            component_loadings=z["component_loadings"],
        )
