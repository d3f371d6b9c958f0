import numpy as np
import pytest

from hybridfit import linalg
from hybridfit.errors import RankError, ShapeError

# Coefficients of the two recorded plain polynomial fits of the case study,
# used here as ground truth for the least-squares path.
FIRST_ORDER_COEF = (208.423, -34.409, 36.616, 18.277)
SECOND_ORDER_COEF = (212.598, -34.274, 38.221, 21.697, 0.286, -2.362,
                     -6.333, -9.561, 13.288, 6.227)


def mp_defects(m: np.ndarray, g: np.ndarray) -> float:
    """Largest violation of the four Moore-Penrose conditions."""
    return max(
        np.max(np.abs(m @ g @ m - m), initial=0.0),
        np.max(np.abs(g @ m @ g - g), initial=0.0),
        np.max(np.abs((m @ g).T - m @ g), initial=0.0),
        np.max(np.abs((g @ m).T - g @ m), initial=0.0),
    )


class TestGeneralizedInverse:
    def test_identity(self):
        assert np.array_equal(linalg.generalized_inverse(np.eye(3)), np.eye(3))

    def test_zero(self):
        assert np.array_equal(
            linalg.generalized_inverse(np.zeros((4, 4))), np.zeros((4, 4))
        )

    def test_rank_one_diagonal(self):
        m = np.array([[2.0, 0.0], [0.0, 0.0]])
        g = linalg.generalized_inverse(m)
        assert np.allclose(g, [[0.5, 0.0], [0.0, 0.0]], atol=1e-14)
        assert mp_defects(m, g) < linalg.TOL_GINV

    def test_random_symmetric_psd(self, rng):
        for _ in range(25):
            n = rng.integers(2, 9)
            r = rng.integers(1, n + 1)
            a = rng.normal(size=(n, r))
            m = a @ a.T
            g = linalg.generalized_inverse(m)
            assert mp_defects(m, g) < linalg.TOL_GINV * max(1.0, np.abs(m).max())

    def test_rejects_non_square(self):
        with pytest.raises(ShapeError):
            linalg.generalized_inverse(np.ones((2, 3)))

    def test_rejects_asymmetric(self):
        with pytest.raises(ShapeError):
            linalg.generalized_inverse(np.array([[1.0, 2.0], [0.0, 1.0]]))


class TestProjector:
    def test_ones_column_gives_mean_projector(self):
        p = linalg.projector_onto_columns(np.ones((4, 1)))
        assert np.allclose(p.matrix, np.full((4, 4), 0.25), atol=1e-14)

    def test_invertible_matrix_gives_identity(self, rng):
        m = rng.normal(size=(5, 5)) + 5 * np.eye(5)
        p = linalg.projector_onto_columns(m)
        assert np.allclose(p.matrix, np.eye(5), atol=1e-10)

    def test_factorial_design_trace_equals_rank(self, factorial_design):
        p = linalg.projector_onto_columns(factorial_design.values)
        assert np.trace(p.matrix) == pytest.approx(4.0, abs=1e-10)
        assert p.is_valid()

    def test_projects_own_columns(self, rng):
        m = rng.normal(size=(8, 3))
        p = linalg.projector_onto_columns(m)
        assert np.allclose(p.matrix @ m, m, atol=1e-10)
        assert p.is_valid()

    def test_invariant_to_column_recombination(self, rng):
        m = rng.normal(size=(9, 4))
        c = rng.normal(size=(4, 4)) + 4 * np.eye(4)
        p1 = linalg.projector_onto_columns(m)
        p2 = linalg.projector_onto_columns(m @ c)
        assert np.allclose(p1.matrix, p2.matrix, atol=1e-9)

    def test_zero_matrix(self):
        p = linalg.projector_onto_columns(np.zeros((3, 2)))
        assert np.array_equal(p.matrix, np.zeros((3, 3)))


class TestRank:
    def test_rank_counts_singular_values(self):
        m = np.diag([1.0, 1e-3, 0.0])
        assert linalg.matrix_rank(m) == 2
        assert linalg.RankedMatrix.of(m).rank == 2

    def test_rank_respects_tolerance(self):
        m = np.diag([1.0, 1e-12])
        assert linalg.matrix_rank(m) == 1
        assert linalg.matrix_rank(m, tol=1e-14) == 2


class TestOlsSolve:
    def test_factorial_first_order_fit(self, factorial, factorial_design):
        coef = linalg.ols_solve(factorial_design.values, factorial.response)
        assert np.allclose(coef, FIRST_ORDER_COEF, atol=1e-3)

    def test_boxbehnken_second_order_fit(self, boxbehnken):
        from hybridfit import dataset

        design = dataset.build_design(dataset.code(boxbehnken), "second")
        coef = linalg.ols_solve(design.values, boxbehnken.response)
        assert np.allclose(coef, SECOND_ORDER_COEF, atol=1e-3)

    def test_identity_design_returns_y(self, rng):
        y = rng.normal(size=6)
        assert np.allclose(linalg.ols_solve(np.eye(6), y), y, atol=1e-12)

    def test_residual_orthogonal_to_columns(self, rng):
        x = rng.normal(size=(10, 3))
        y = rng.normal(size=10)
        coef = linalg.ols_solve(x, y)
        assert np.max(np.abs(x.T @ (y - x @ coef))) < 1e-9

    def test_rank_deficient_raises(self):
        x = np.column_stack([np.ones(5), np.ones(5)])
        with pytest.raises(RankError):
            linalg.ols_solve(x, np.zeros(5))

    def test_matches_generalized_inverse_path(self, rng):
        for _ in range(20):
            n, p = rng.integers(4, 13), rng.integers(1, 4)
            x = rng.normal(size=(n, p))
            y = rng.normal(size=n)
            coef = linalg.ols_solve(x, y)
            via_ginv = linalg.generalized_inverse(x.T @ x) @ (x.T @ y)
            assert np.allclose(coef, via_ginv, rtol=1e-9, atol=1e-12)


class TestGinvProperty:
    def test_design_recovery_on_random_low_rank(self, rng):
        # M (M'M)^- M'M = M for arbitrary rank
        for _ in range(30):
            n = int(rng.integers(2, 13))
            p = int(rng.integers(1, min(n, 7)))
            r = int(rng.integers(1, p + 1))
            m = rng.normal(size=(n, r)) @ rng.normal(size=(r, p))
            g = linalg.generalized_inverse(m.T @ m)
            assert np.allclose(m @ g @ (m.T @ m), m, atol=1e-8 * max(1.0, np.abs(m).max()))
