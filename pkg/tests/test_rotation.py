"""Rotation core: criterion and gradient oracles, descent and orthogonality
invariants, convergence semantics, input validation.

Derived oracle values were computed independently (closed forms and central
finite differences) before being compared against the implementation.
"""

import numpy as np
import pytest

from gprot import (
    DegenerateProjectionError,
    GprParams,
    InvalidInputError,
    gpr_rotate,
    match_components,
    mean_congruence,
    project_orthogonal,
    varimax_criterion,
    varimax_gradient,
)
from gprot.multistart import random_orthonormal

from _matrices import perfect_criterion, perfect_loadings, random_loadings


class TestVarimaxCriterion:
    def test_identity_two_by_two_exact(self):
        # columns of squares are [1,0] and [0,1]; each deviates +-.5 from its
        # mean, so v = (4 * .25) / (2 * 2) = .25 exactly
        assert varimax_criterion(np.eye(2)) == 0.25

    def test_perfect_structure_closed_form(self):
        for k in (2, 3, 6, 9, 12):
            v = varimax_criterion(perfect_loadings(k))
            assert v == pytest.approx(perfect_criterion(k), abs=1e-15)

    def test_perfect_structure_k3_frozen_value(self):
        # (2/9) * .61^4, frozen by hand before implementation
        v = varimax_criterion(perfect_loadings(3))
        assert v == pytest.approx(0.030768535555555556, abs=1e-16)

    def test_constant_squares_give_zero(self):
        a = np.full((10, 4), 0.5)
        assert varimax_criterion(a) == 0.0
        signs = np.where(np.arange(40).reshape(10, 4) % 3 == 0, -0.5, 0.5)
        assert varimax_criterion(signs) == 0.0

    def test_column_permutation_and_sign_invariance(self):
        rng = np.random.default_rng(61001)
        for _ in range(20):
            a = random_loadings(12, 4, rng)
            v = varimax_criterion(a)
            perm = rng.permutation(4)
            signs = rng.choice([-1.0, 1.0], size=4)
            assert varimax_criterion(a[:, perm] * signs) == pytest.approx(v, rel=1e-13)

    def test_rejects_bad_input(self):
        with pytest.raises(InvalidInputError):
            varimax_criterion(np.ones(5))
        with pytest.raises(InvalidInputError):
            varimax_criterion([[1.0, np.nan], [0.0, 1.0]])
        with pytest.raises(InvalidInputError):
            varimax_criterion(np.empty((0, 3)))


class TestVarimaxGradient:
    def test_matches_central_finite_differences(self):
        # oracle: (f(x+h) - f(x-h)) / 2h entry by entry on the objective -v
        rng = np.random.default_rng(61002)
        h = 1e-6
        for _ in range(30):
            m = int(rng.integers(4, 25))
            k = int(rng.integers(2, min(m, 9)))
            a = random_loadings(m, k, rng)
            g = varimax_gradient(a)
            fd = np.empty_like(a)
            for i in range(m):
                for j in range(k):
                    ap = a.copy()
                    am = a.copy()
                    ap[i, j] += h
                    am[i, j] -= h
                    fd[i, j] = (
                        -varimax_criterion(ap) + varimax_criterion(am)
                    ) / (2 * h)
            scale = max(1.0, float(np.max(np.abs(fd))))
            assert np.max(np.abs(g - fd)) / scale < 1e-6

    def test_zero_at_constant_squares(self):
        a = np.full((8, 3), 0.7)
        assert np.allclose(varimax_gradient(a), 0.0, atol=1e-15)


class TestProjectOrthogonal:
    def test_orthogonal_input_is_fixed_point(self):
        rng = np.random.default_rng(61003)
        for _ in range(10):
            t = random_orthonormal(4, rng)
            assert np.allclose(project_orthogonal(t), t, atol=1e-12)

    def test_two_by_two_against_dense_angle_grid(self):
        # oracle: nearest element of O(2) found by scanning rotations and
        # reflections on a 1e-4 angle grid
        rng = np.random.default_rng(61004)
        thetas = np.arange(0.0, 2 * np.pi, 1e-4)
        cos, sin = np.cos(thetas), np.sin(thetas)
        for _ in range(10):
            m = rng.normal(size=(2, 2))
            if abs(np.linalg.det(m)) < 1e-3:
                continue
            t = project_orthogonal(m)
            assert np.allclose(t.T @ t, np.eye(2), atol=1e-12)
            best = np.inf
            for family in ("rot", "ref"):
                if family == "rot":
                    d = (
                        (m[0, 0] - cos) ** 2 + (m[0, 1] + sin) ** 2
                        + (m[1, 0] - sin) ** 2 + (m[1, 1] - cos) ** 2
                    )
                else:
                    d = (
                        (m[0, 0] - cos) ** 2 + (m[0, 1] - sin) ** 2
                        + (m[1, 0] - sin) ** 2 + (m[1, 1] + cos) ** 2
                    )
                best = min(best, float(np.min(d)))
            assert np.sum((m - t) ** 2) <= best + 1e-6

    def test_singular_matrix_is_degenerate(self):
        with pytest.raises(DegenerateProjectionError):
            project_orthogonal(np.ones((3, 3)))

    def test_rejects_non_square(self):
        with pytest.raises(InvalidInputError):
            project_orthogonal(np.ones((2, 3)))


class TestGprParams:
    def test_defaults(self):
        p = GprParams()
        assert (p.alpha0, p.max_iter, p.grad_tol, p.max_halvings) == (
            1.0, 1000, 1e-6, 30,
        )

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"alpha0": 0.0},
            {"alpha0": -1.0},
            {"alpha0": np.inf},
            {"max_iter": 0},
            {"grad_tol": 0.0},
            {"grad_tol": np.nan},
            {"max_halvings": 0},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(InvalidInputError):
            GprParams(**kwargs)


class TestGprRotate:
    def test_loadings_are_input_times_transform(self):
        rng = np.random.default_rng(61005)
        a = perfect_loadings(3) @ random_orthonormal(3, rng)
        sol = gpr_rotate(a)
        assert np.array_equal(sol.loadings, a @ sol.transform)

    def test_transform_is_orthogonal(self):
        rng = np.random.default_rng(61006)
        for _ in range(25):
            k = int(rng.integers(2, 7))
            a = random_loadings(6 * k, k, rng)
            sol = gpr_rotate(a, random_orthonormal(k, rng))
            t = sol.transform
            assert np.linalg.norm(t.T @ t - np.eye(k)) < 1e-10

    def test_rotation_preserves_communalities(self):
        rng = np.random.default_rng(61007)
        for _ in range(25):
            k = int(rng.integers(2, 7))
            a = random_loadings(5 * k, k, rng)
            sol = gpr_rotate(a, random_orthonormal(k, rng))
            h_in = np.sum(a * a, axis=1)
            h_out = np.sum(sol.loadings * sol.loadings, axis=1)
            assert np.max(np.abs(h_in - h_out)) < 1e-10

    def test_objective_trace_strictly_decreases(self):
        rng = np.random.default_rng(61008)
        for _ in range(25):
            k = int(rng.integers(2, 7))
            a = random_loadings(6 * k, k, rng)
            t0 = random_orthonormal(k, rng)
            sol = gpr_rotate(a, t0)
            assert sol.f_trace[0] == pytest.approx(
                -varimax_criterion(a @ t0), abs=1e-12
            )
            assert np.all(np.diff(sol.f_trace) < 0)
            assert sol.f_value == sol.f_trace[-1]
            assert sol.criterion_v == -sol.f_value

    def test_recovers_scrambled_perfect_structure(self):
        rng = np.random.default_rng(61009)
        target = perfect_loadings(4)
        for _ in range(10):
            a = target @ random_orthonormal(4, rng)
            sol = gpr_rotate(a, random_orthonormal(4, rng))
            assert sol.converged
            assert sol.criterion_v == pytest.approx(perfect_criterion(4), abs=1e-9)
            c = mean_congruence(match_components(sol.loadings, target))
            assert c > 1 - 1e-8

    def test_already_optimal_start_stops_immediately(self):
        # at perfect structure the projected gradient is exactly zero, so the
        # start transform comes back untouched
        a = perfect_loadings(3)
        sol = gpr_rotate(a)
        assert sol.converged
        assert sol.iterations == 1
        assert len(sol.f_trace) == 1
        assert np.array_equal(sol.transform, np.eye(3))

    def test_iteration_cap_reports_not_converged(self):
        rng = np.random.default_rng(61010)
        a = perfect_loadings(3) @ random_orthonormal(3, rng)
        sol = gpr_rotate(a, random_orthonormal(3, rng), GprParams(max_iter=1))
        assert not sol.converged
        assert sol.iterations == 1

    def test_default_start_is_identity(self):
        rng = np.random.default_rng(61011)
        a = random_loadings(12, 3, rng)
        a_sol = gpr_rotate(a)
        b_sol = gpr_rotate(a, np.eye(3))
        assert np.array_equal(a_sol.transform, b_sol.transform)
        assert np.array_equal(a_sol.f_trace, b_sol.f_trace)

    def test_deterministic_for_fixed_inputs(self):
        rng = np.random.default_rng(61012)
        a = random_loadings(18, 3, rng)
        t0 = random_orthonormal(3, rng)
        s1 = gpr_rotate(a, t0)
        s2 = gpr_rotate(a, t0)
        assert np.array_equal(s1.transform, s2.transform)
        assert np.array_equal(s1.f_trace, s2.f_trace)
        assert s1.iterations == s2.iterations

    def test_rejects_bad_inputs(self):
        a = perfect_loadings(3)
        with pytest.raises(InvalidInputError):
            gpr_rotate(np.ones((2, 3)))  # fewer rows than columns
        with pytest.raises(InvalidInputError):
            gpr_rotate(a, np.ones((3, 3)))  # not orthogonal
        with pytest.raises(InvalidInputError):
            gpr_rotate(a, np.eye(4))  # wrong shape
        bad = a.copy()
        bad[0, 0] = np.inf
        with pytest.raises(InvalidInputError):
            gpr_rotate(bad)
