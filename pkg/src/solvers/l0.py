"""
Brute-force l0 minimization by support enumeration.

This is the leaf oracle of the curriculum: only usable for small ``n`` or a
small ``max_support``.
"""
import itertools
import logging
from typing import Optional

import numpy as np

from src.core.model import ArrayLike, DenseMatrix, SparseVector, as_dense_matrix, as_vector
from src.errors import ParameterError
from utils.logger import get_logger

logger = get_logger("l0", log_level=logging.DEBUG)


def solve_l0_brute(
    A: DenseMatrix,
    b: ArrayLike,
    max_support: int,
    zero_tol: float = 1e-9,
    relative: bool = False,
) -> Optional[SparseVector]:
    """
    Finds a sparsest solution of ``A x = b`` among supports of size <= max_support.

    Supports are scanned by size 0, 1, 2, ... and lexicographically within a size,
    so the first feasible least-squares fit is the returned minimizer.

    Args:
        A (DenseMatrix): System matrix (m x n).
        b (ArrayLike): Right-hand side of length m.
        max_support (int): Largest support size to try.
        zero_tol (float): Feasibility tolerance, ``||A x - b||_inf <= zero_tol``.
        relative (bool): Use ``zero_tol * max(1, ||b||_inf)`` instead (leaf solver, split checks).

    Returns:
        Optional[SparseVector]: The minimizer, or None when no support within budget is feasible.

    Raises:
        ParameterError: If max_support is negative or exceeds n.
    """
    matrix = as_dense_matrix(A)
    rhs = as_vector(b, length=matrix.shape[0])
    n = matrix.shape[1]
    if not 0 <= max_support <= n:
        raise ParameterError(f"max_support must lie in [0, {n}], got {max_support}.")

    peak = float(np.max(np.abs(rhs), initial=0.0))
    tol = zero_tol * max(1.0, peak) if relative else zero_tol
    if peak <= tol:
        return SparseVector.zeros(n, zero_tol=0.0)

    for size in range(1, max_support + 1):
        for support in itertools.combinations(range(n), size):
            columns = matrix[:, support]
            coefficients = np.linalg.lstsq(columns, rhs, rcond=None)[0]
            if float(np.max(np.abs(columns @ coefficients - rhs))) > tol:
                continue
            if np.any(coefficients == 0.0):
                # A smaller support would already have been accepted.
                continue
            x = np.zeros(n)
            x[list(support)] = coefficients
            return SparseVector.from_dense(x, zero_tol=0.0)
    logger.debug(f"No solution with support <= {max_support} for a {matrix.shape[0]}x{n} system.")
    return None
