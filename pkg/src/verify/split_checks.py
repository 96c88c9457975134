"""Checks on a split ``S`` of a solution: independence of ``A S`` and l0 optimality of its columns."""
import logging
import math

import numpy as np

from src.core.diagnostics import numerical_rank, sparsity
from src.core.model import DenseMatrix, as_dense_matrix
from src.errors import BudgetExceededError, PartitionError
from src.solvers.l0 import solve_l0_brute
from utils.logger import get_logger

logger = get_logger("split_checks", log_level=logging.DEBUG)


def _check_disjoint_columns(S: DenseMatrix) -> None:
    overlap = np.count_nonzero(S != 0.0, axis=1)
    rows = np.flatnonzero(overlap > 1)
    if rows.size:
        raise PartitionError(f"Columns of S overlap on rows {rows.tolist()}.")


def check_split_independence(A: DenseMatrix, S: DenseMatrix) -> bool:
    """
    True iff ``A S`` has full column rank.

    Raises:
        PartitionError: If two columns of S share a non-zero row.
    """
    matrix = as_dense_matrix(A)
    split = as_dense_matrix(S, rows=matrix.shape[1])
    _check_disjoint_columns(split)
    return numerical_rank(matrix @ split) == split.shape[1]


def check_split_global_optimality(A: DenseMatrix, S: DenseMatrix, budget: int = 500_000) -> bool:
    """
    True iff every column ``S_k`` is a sparsest solution of ``A x = A S_k``.

    Args:
        A (DenseMatrix): System matrix (m x n), small n.
        S (DenseMatrix): Split with disjoint column supports.
        budget (int): Largest total number of supports to enumerate.

    Raises:
        PartitionError: If two columns of S share a non-zero row.
        BudgetExceededError: If the enumeration exceeds the budget.
    """
    matrix = as_dense_matrix(A)
    split = as_dense_matrix(S, rows=matrix.shape[1])
    _check_disjoint_columns(split)
    n = matrix.shape[1]
    sizes = [sparsity(split[:, k]) for k in range(split.shape[1])]
    count = sum(sum(math.comb(n, size) for size in range(s + 1)) for s in sizes)
    if count > budget:
        raise BudgetExceededError("Split optimality enumeration", count, budget)

    for k, s in enumerate(sizes):
        if s == 0:
            continue
        sparsest = solve_l0_brute(matrix, matrix @ split[:, k], max_support=s, relative=True)
        if sparsest is None or sparsest.sparsity() < s:
            logger.debug(f"Column {k} of the split is not a sparsest solution.")
            return False
    return True
