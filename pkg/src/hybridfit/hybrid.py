"""Regression that fuses a deterministic theory column with observed data.

The model scales a low-order polynomial in coded factors by the theoretical
response z computed for the same runs:

    y_i = z_i * (coef_0 + coef_1 * x_i1 + ...) + e_i.

Writing D = diag(z), the scaled model y = D X theta + e splits into the plain
polynomial part X theta plus the excess (D - I) X theta that the theory
scaling adds.  Stacking the two blocks side by side gives an augmented
least-squares system whose rank may fall short of its column count, so the
solver works through generalized inverses.  The solution is computed twice on
every call, once by the partitioned (block) route and once directly from the
augmented normal equations; the fitted values from the two routes must agree,
which guards the generalized-inverse algebra.

Setting z identically to one recovers ordinary multiple linear regression
exactly: the excess block vanishes and the excess coefficients are zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import DesignMatrix
from .errors import InconsistencyError, RankError, ShapeError
from .linalg import generalized_inverse, matrix_rank, projector_onto_columns

# Agreement required between the two solution routes, relative to the
# response scale.
CROSS_CHECK_TOL = 1e-8


@dataclass(frozen=True)
class TheoryVector:
    """Theory-model outputs for each run, in response units."""

    values: np.ndarray
    source_label: str = ""

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float).ravel()
        object.__setattr__(self, "values", values)
        if values.size == 0:
            raise ShapeError("theory vector is empty")
        if not np.all(np.isfinite(values)):
            raise ShapeError("theory vector has non-finite entries")

    def __len__(self) -> int:
        return int(self.values.size)


@dataclass(frozen=True)
class HybridSystem:
    """Assembled matrices of the augmented system, fixed by design + theory.

    ``excess`` is (diag(z) - I) X, the regressors the theory scaling adds
    beyond the plain polynomial.  ``excess_ortho`` is the part of that block
    the plain polynomial cannot explain (its residual after projecting onto
    the design columns); its rank is what the theory data genuinely add.
    """

    design: DesignMatrix
    theory: TheoryVector
    excess: np.ndarray          # (diag(z) - I) @ X
    augmented: np.ndarray       # [X | excess]
    excess_ortho: np.ndarray    # (I - P_X) @ excess
    proj_design: np.ndarray     # projector onto col(X)
    proj_excess: np.ndarray     # projector onto col(excess_ortho)
    rank: int                   # rank(X) + rank(excess_ortho)

    @property
    def n_runs(self) -> int:
        return self.design.n_rows

    @property
    def n_coef(self) -> int:
        """Coefficients per block (p + 1)."""
        return self.design.n_coef


@dataclass(frozen=True)
class HybridFit:
    """Solved system: coefficient blocks, error variance, covariances."""

    coef_design: np.ndarray     # block multiplying X
    coef_excess: np.ndarray     # block multiplying (diag(z) - I) X
    coef: np.ndarray            # the two blocks stacked; the canonical report
    fitted: np.ndarray
    residuals: np.ndarray
    sigma2: float | None        # residual-variance estimate; None if saturated
    coef_cov: np.ndarray | None
    fitted_cov: np.ndarray | None

    @property
    def saturated(self) -> bool:
        """True when the residual has no degrees of freedom."""
        return self.sigma2 is None

    @property
    def ss_residual(self) -> float:
        return float(self.residuals @ self.residuals)


def assemble(design: DesignMatrix, theory: TheoryVector) -> HybridSystem:
    """Build the augmented system for a design matrix and theory column."""
    if len(theory) != design.n_rows:
        raise ShapeError(
            f"{design.n_rows} design rows but {len(theory)} theory values"
        )
    x = design.values
    excess = (theory.values - 1.0)[:, None] * x
    augmented = np.hstack([x, excess])
    p_design = projector_onto_columns(x).matrix
    excess_ortho = excess - p_design @ excess
    p_excess = projector_onto_columns(excess_ortho).matrix
    rank = matrix_rank(x) + matrix_rank(excess_ortho)
    return HybridSystem(
        design=design,
        theory=theory,
        excess=excess,
        augmented=augmented,
        excess_ortho=excess_ortho,
        proj_design=p_design,
        proj_excess=p_excess,
        rank=rank,
    )


def _require_full_rank_design(sys: HybridSystem) -> None:
    if not sys.design.is_full_column_rank():
        raise RankError(
            "hybrid solve needs a full-column-rank design matrix; got shape "
            f"{sys.design.values.shape} with rank {matrix_rank(sys.design.values)}"
        )


def solve(sys: HybridSystem, y: np.ndarray) -> HybridFit:
    """Least-squares solution of the augmented system.

    The excess block is solved first against the orthogonalized excess
    columns (via the Moore-Penrose inverse, so a vanishing excess gives a
    zero block), then the design block picks up the remainder.  The direct
    normal-equations route is evaluated as a cross-check: both routes must
    produce the same fitted values, which is invariant to the choice of
    generalized inverse.
    """
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != sys.n_runs:
        raise ShapeError(f"{sys.n_runs} runs but {y.shape[0]} responses")
    _require_full_rank_design(sys)

    x = sys.design.values
    z_mat = sys.excess_ortho
    coef_excess = generalized_inverse(z_mat.T @ z_mat) @ (z_mat.T @ y)
    coef_design = np.linalg.solve(x.T @ x, x.T @ (y - sys.excess @ coef_excess))
    coef = np.concatenate([coef_design, coef_excess])
    fitted = sys.augmented @ coef

    direct = sys.augmented @ (
        generalized_inverse(sys.augmented.T @ sys.augmented)
        @ (sys.augmented.T @ y)
    )
    scale = max(1.0, float(np.max(np.abs(y))))
    gap = float(np.max(np.abs(direct - fitted)))
    if gap > CROSS_CHECK_TOL * scale:
        raise InconsistencyError(
            f"partitioned and direct solutions disagree on fitted values "
            f"by {gap:.3e} (scale {scale:.3e})"
        )

    residuals = y - fitted
    df_residual = sys.n_runs - sys.rank
    if df_residual > 0:
        sigma2 = float(residuals @ residuals) / df_residual
        coef_cov, _ = covariance_of_solution(sys, sigma2)
        fitted_cov = variance_of_fit(sys, sigma2)
    else:
        sigma2 = None
        coef_cov = None
        fitted_cov = None
    return HybridFit(
        coef_design=coef_design,
        coef_excess=coef_excess,
        coef=coef,
        fitted=fitted,
        residuals=residuals,
        sigma2=sigma2,
        coef_cov=coef_cov,
        fitted_cov=fitted_cov,
    )


def fitted_values(sys: HybridSystem, fit: HybridFit) -> np.ndarray:
    """Fitted values recomputed by projecting the observations onto the
    augmented column space; invariant to the generalized inverse used."""
    y = fit.fitted + fit.residuals
    return (sys.proj_design + sys.proj_excess) @ y


def alias_matrix(sys: HybridSystem) -> np.ndarray:
    """Bias operator on naive plain-polynomial estimates.

    When the true model carries the theory diagonal, the expected value of
    the ordinary least-squares estimate is theta plus this matrix times
    theta.  It is zero exactly when the theory column is identically one.
    """
    _require_full_rank_design(sys)
    x = sys.design.values
    return np.linalg.solve(x.T @ x, x.T @ sys.excess)


def covariance_of_solution(
    sys: HybridSystem, sigma2: float
) -> tuple[np.ndarray, np.ndarray]:
    """Covariance of the stacked coefficient vector, from the partitioned
    generalized inverse of the augmented normal equations.

    Returns the full 2(p+1) x 2(p+1) matrix and the off-diagonal
    (design block, excess block) cross-covariance.  When the augmented
    normal-equations matrix is invertible this equals its inverse times
    sigma2.
    """
    if sigma2 < 0.0:
        raise ShapeError(f"sigma2 must be nonnegative, got {sigma2}")
    _require_full_rank_design(sys)
    x = sys.design.values
    q = sys.excess_ortho.T @ sys.excess_ortho
    q_inv = generalized_inverse(q)
    g_inv = np.linalg.inv(x.T @ x)
    b = x.T @ sys.excess
    gb = g_inv @ b

    p1 = sys.n_coef
    r = np.empty((2 * p1, 2 * p1))
    r[:p1, :p1] = g_inv + gb @ q_inv @ gb.T
    r[:p1, p1:] = -gb @ q_inv
    r[p1:, :p1] = r[:p1, p1:].T
    r[p1:, p1:] = q_inv

    normal = sys.augmented.T @ sys.augmented
    cov = (r @ normal @ r.T) * sigma2
    cov = 0.5 * (cov + cov.T)
    return cov, cov[:p1, p1:]


def variance_of_fit(sys: HybridSystem, sigma2: float) -> np.ndarray:
    """Covariance of the fitted values: the sum of the two orthogonal
    projectors, scaled by sigma2."""
    if sigma2 < 0.0:
        raise ShapeError(f"sigma2 must be nonnegative, got {sigma2}")
    return (sys.proj_design + sys.proj_excess) * sigma2


def estimability_matrix(sys: HybridSystem) -> np.ndarray:
    """The idempotent matrix mapping the stacked parameter vector to what the
    solution actually estimates; the identity exactly when the augmented
    normal-equations matrix is invertible.  Exposed for inspection."""
    normal = sys.augmented.T @ sys.augmented
    return generalized_inverse(normal) @ normal
