"""Basic matrix diagnostics: stable rank, sparsity counts, numerical rank, conditioning."""
import numpy as np

from src.core.model import ArrayLike, DenseMatrix, as_dense_matrix, as_vector
from src.errors import DomainError, ParameterError

RANK_REL_TOL: float = 1e-10


def stable_rank(M: DenseMatrix) -> float:
    """
    Returns ``||M||_F^2 / sigma_max(M)^2``.

    Raises:
        DomainError: If M is the zero matrix.
    """
    matrix = as_dense_matrix(M)
    if matrix.size == 0 or not np.any(matrix):
        raise DomainError("Stable rank is undefined for a zero matrix.")
    spectral = np.linalg.norm(matrix, 2)
    return float(np.linalg.norm(matrix, "fro") ** 2 / spectral**2)


def sparsity(v: ArrayLike, zero_tol: float = 0.0) -> int:
    """Counts entries with ``|v_i| > zero_tol`` (strict, so the count is monotone in the tolerance)."""
    if zero_tol < 0:
        raise ParameterError(f"zero_tol must be >= 0, got {zero_tol}.")
    return int(np.count_nonzero(np.abs(as_vector(v)) > zero_tol))


def singular_values(M: DenseMatrix) -> np.ndarray:
    matrix = as_dense_matrix(M)
    if matrix.size == 0:
        return np.zeros(0)
    return np.linalg.svd(matrix, compute_uv=False)


def numerical_rank(M: DenseMatrix, rel_tol: float = RANK_REL_TOL) -> int:
    """Counts singular values above ``rel_tol * sigma_max``."""
    sigma = singular_values(M)
    if sigma.size == 0 or sigma[0] == 0.0:
        return 0
    return int(np.count_nonzero(sigma > rel_tol * sigma[0]))


def condition_number(M: DenseMatrix) -> float:
    """Ratio of the largest to the smallest singular value; infinite for rank-deficient input."""
    sigma = singular_values(M)
    if sigma.size == 0 or sigma[-1] == 0.0:
        return float("inf")
    return float(sigma[0] / sigma[-1])
