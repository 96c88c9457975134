"""Restricted isometry constants by exhaustive support enumeration."""
import itertools
import logging
import math

import numpy as np

from src.core.model import DenseMatrix, as_dense_matrix
from src.errors import BudgetExceededError, ParameterError
from utils.logger import get_logger

logger = get_logger("rip", log_level=logging.DEBUG)

DEFAULT_SUPPORT_BUDGET: int = 200_000


def rip_constant_brute(M: DenseMatrix, t: int, budget: int = DEFAULT_SUPPORT_BUDGET) -> float:
    """
    Computes ``delta_t = max_S max |lambda - 1|`` over the Gram eigenvalues of ``M_S``.

    Supports of size ``min(t, p)`` suffice because eigenvalues of a principal
    submatrix interlace those of the full Gram matrix.

    Args:
        M (DenseMatrix): m x p matrix.
        t (int): Sparsity order.
        budget (int): Largest number of supports to enumerate.

    Returns:
        float: The restricted isometry constant of order t.

    Raises:
        BudgetExceededError: If ``C(p, t)`` exceeds the budget.
    """
    matrix = as_dense_matrix(M)
    p = matrix.shape[1]
    if t < 1:
        raise ParameterError(f"Sparsity order t must be >= 1, got {t}.")
    size = min(t, p)
    count = math.comb(p, size)
    if count > budget:
        raise BudgetExceededError(f"RIP enumeration of order {t} over {p} columns", count, budget)

    gram = matrix.T @ matrix
    delta = 0.0
    for support in itertools.combinations(range(p), size):
        eigenvalues = np.linalg.eigvalsh(gram[np.ix_(support, support)])
        delta = max(delta, float(np.max(np.abs(eigenvalues - 1.0))))
    logger.debug(f"delta_{t} = {delta:.6f} over {count} supports.")
    return delta
