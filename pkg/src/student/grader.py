"""Residual grader that filters wrong student solutions."""
import numpy as np

from src.core.model import ArrayLike, DenseMatrix

GRADER_TOL_PAIRED: float = 1e-4
GRADER_TOL_BLOCKED: float = 1e-3


def grade(A: DenseMatrix, x: ArrayLike, b: ArrayLike, tol: float) -> bool:
    """True iff ``||A x - b||_inf <= tol * max(1, ||b||_inf)``."""
    rhs = np.asarray(b, dtype=float).reshape(-1)
    residual = np.asarray(A, dtype=float) @ np.asarray(x, dtype=float).reshape(-1) - rhs
    if not np.all(np.isfinite(residual)):
        return False
    return float(np.max(np.abs(residual), initial=0.0)) <= tol * max(1.0, float(np.max(np.abs(rhs), initial=0.0)))
