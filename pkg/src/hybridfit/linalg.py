"""Rank-aware dense linear algebra used by every fitting routine.

All rank decisions in the package flow through :func:`matrix_rank` so that a
single relative tolerance governs what counts as numerically zero.  The
generalized inverse is realized as the Moore-Penrose pseudoinverse: every
downstream quantity (fitted values, residual sums of squares, projectors) is
invariant to the choice of generalized inverse, so the most stable
representative is used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import RankError, ShapeError

# Relative cutoff on singular values when deciding rank.
RANK_TOL = 1e-10

# Absolute tolerances for the self-checks on unit-scaled data.
TOL_SYM = 1e-8
TOL_IDEM = 1e-8
TOL_GINV = 1e-8


def matrix_rank(m: np.ndarray, tol: float = RANK_TOL) -> int:
    """Number of singular values above ``tol`` times the largest one."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.size == 0:
        return 0
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.sum(s > tol * s[0]))


@dataclass(frozen=True)
class RankedMatrix:
    """A matrix bundled with its numerical rank and the tolerance that
    produced it."""

    values: np.ndarray
    rank: int
    rank_tolerance: float = RANK_TOL

    @classmethod
    def of(cls, values: np.ndarray, tol: float = RANK_TOL) -> "RankedMatrix":
        values = np.atleast_2d(np.asarray(values, dtype=float))
        return cls(values=values, rank=matrix_rank(values, tol), rank_tolerance=tol)


@dataclass(frozen=True)
class Projector:
    """An orthogonal projector (symmetric, idempotent matrix)."""

    matrix: np.ndarray

    def symmetry_defect(self) -> float:
        return float(np.max(np.abs(self.matrix - self.matrix.T), initial=0.0))

    def idempotency_defect(self) -> float:
        return float(np.max(np.abs(self.matrix @ self.matrix - self.matrix), initial=0.0))

    def is_valid(self, tol_sym: float = TOL_SYM, tol_idem: float = TOL_IDEM) -> bool:
        return self.symmetry_defect() <= tol_sym and self.idempotency_defect() <= tol_idem


def generalized_inverse(m: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Moore-Penrose pseudoinverse of a square symmetric matrix.

    The result G satisfies M G M = M, G M G = G and the two symmetry
    conditions (M G and G M symmetric) to within roundoff.
    """
    m = np.asarray(m, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    scale = np.max(np.abs(m), initial=0.0)
    if np.max(np.abs(m - m.T), initial=0.0) > TOL_SYM * max(scale, 1.0):
        raise ShapeError("expected a symmetric matrix")
    if scale == 0.0:
        return np.zeros_like(m)
    g = np.linalg.pinv(m, rcond=tol, hermitian=True)
    # pinv of a symmetric matrix is symmetric; enforce exactly.
    return 0.5 * (g + g.T)


def projector_onto_columns(m: np.ndarray, tol: float = RANK_TOL) -> Projector:
    """Orthogonal projector onto the column space of ``m``.

    Equals M (M'M)^- M'; computed from an orthonormal basis of the column
    space so that trace(P) = rank(M) holds to roundoff.
    """
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.shape[1] < 1:
        raise ShapeError("need at least one column")
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    if m.size == 0 or s[0] == 0.0:
        return Projector(np.zeros((m.shape[0], m.shape[0])))
    basis = u[:, s > tol * s[0]]
    return Projector(basis @ basis.T)


def ols_solve(design: np.ndarray, y: np.ndarray, tol: float = RANK_TOL) -> np.ndarray:
    """Least-squares coefficients (X'X)^{-1} X'y for a full-column-rank design.

    Raises :class:`RankError` when the design is rank deficient; the
    generalized-inverse path for that case lives in :mod:`hybridfit.hybrid`.
    """
    x = np.atleast_2d(np.asarray(design, dtype=float))
    y = np.asarray(y, dtype=float).ravel()
    if x.shape[0] != y.shape[0]:
        raise ShapeError(f"{x.shape[0]} design rows but {y.shape[0]} responses")
    if matrix_rank(x, tol) < x.shape[1]:
        raise RankError(
            f"design matrix of shape {x.shape} is rank deficient "
            f"(rank {matrix_rank(x, tol)})"
        )
    coef, *_ = np.linalg.lstsq(x, y, rcond=None)
    return coef
