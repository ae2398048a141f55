"""Planar-rotation benchmark: closed-form angle oracle on two columns,
agreement with the gradient method, scale handling under row normalization."""

import numpy as np
import pytest

from gprot import (
    InvalidInputError,
    PairwiseParams,
    gpr_rotate,
    pairwise_varimax,
    varimax_criterion,
)
from gprot.multistart import random_orthonormal

from _matrices import perfect_criterion, perfect_loadings, random_loadings


class TestTwoColumnOracle:
    def test_at_least_as_good_as_dense_angle_grid(self):
        # varimax over two columns is a one-parameter problem; scan the
        # quarter period on a 1e-4 grid as the oracle
        rng = np.random.default_rng(67001)
        thetas = np.arange(0.0, np.pi / 2, 1e-4)
        for _ in range(10):
            a = random_loadings(12, 2, rng)
            sol = pairwise_varimax(a)
            best_grid = max(
                varimax_criterion(
                    a @ np.array(
                        [[np.cos(t), -np.sin(t)], [np.sin(t), np.cos(t)]]
                    )
                )
                for t in thetas
            )
            assert sol.criterion_v >= best_grid - 1e-6


class TestAgreementWithGradientMethod:
    def test_same_optimum_on_scrambled_perfect_structure(self):
        rng = np.random.default_rng(67002)
        for k in (2, 3, 4, 6):
            a = perfect_loadings(k) @ random_orthonormal(k, rng)
            pw = pairwise_varimax(a)
            gp = gpr_rotate(a, random_orthonormal(k, rng))
            assert pw.criterion_v == pytest.approx(gp.criterion_v, abs=1e-8)
            assert pw.criterion_v == pytest.approx(perfect_criterion(k), abs=1e-8)

    def test_same_optimum_on_noisy_matrices(self):
        rng = np.random.default_rng(67003)
        for _ in range(10):
            k = int(rng.integers(2, 6))
            a = perfect_loadings(k) @ random_orthonormal(k, rng)
            a = a + rng.normal(scale=0.05, size=a.shape)
            pw = pairwise_varimax(a)
            gp = gpr_rotate(a, random_orthonormal(k, rng))
            assert pw.criterion_v == pytest.approx(gp.criterion_v, abs=1e-7)


class TestSolutionContract:
    def test_transform_orthogonal_loadings_consistent(self):
        rng = np.random.default_rng(67004)
        for _ in range(10):
            a = random_loadings(15, 4, rng)
            sol = pairwise_varimax(a)
            assert np.allclose(sol.transform.T @ sol.transform, np.eye(4), atol=1e-10)
            assert np.array_equal(sol.loadings, a @ sol.transform)
            assert sol.criterion_v == pytest.approx(
                varimax_criterion(sol.loadings), abs=0
            )
            assert sol.converged
            assert sol.iterations >= 1

    def test_objective_trace_strictly_decreases(self):
        rng = np.random.default_rng(67005)
        for _ in range(10):
            a = random_loadings(15, 4, rng)
            sol = pairwise_varimax(a)
            assert np.all(np.diff(sol.f_trace) < 0)

    def test_row_normalized_output_is_original_scale(self):
        rng = np.random.default_rng(67006)
        a = perfect_loadings(3) @ random_orthonormal(3, rng)
        a = a + rng.normal(scale=0.03, size=a.shape)
        sol = pairwise_varimax(a, PairwiseParams(kaiser_normalize=True))
        in_norms = np.sqrt(np.sum(a * a, axis=1))
        out_norms = np.sqrt(np.sum(sol.loadings * sol.loadings, axis=1))
        assert np.allclose(in_norms, out_norms, atol=1e-12)
        assert sol.criterion_v == pytest.approx(
            varimax_criterion(sol.loadings), abs=0
        )

    def test_single_column_is_identity(self):
        a = np.array([[0.4], [0.8], [0.2]])
        sol = pairwise_varimax(a)
        assert np.array_equal(sol.transform, np.eye(1))
        assert np.array_equal(sol.loadings, a)
        assert sol.iterations == 0
        assert sol.converged

    def test_cycle_cap_reports_not_converged(self):
        rng = np.random.default_rng(67007)
        a = perfect_loadings(4) @ random_orthonormal(4, rng)
        sol = pairwise_varimax(a, PairwiseParams(max_cycles=1))
        assert sol.iterations == 1
        assert not sol.converged

    def test_validation(self):
        with pytest.raises(InvalidInputError):
            PairwiseParams(max_cycles=0)
        with pytest.raises(InvalidInputError):
            PairwiseParams(angle_tol=0.0)
        with pytest.raises(InvalidInputError):
            pairwise_varimax(np.ones((2, 3)))
