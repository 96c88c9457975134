"""Comparison of dictionaries up to column permutation and sign."""
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.core.model import DenseMatrix, as_dense_matrix


@dataclass(frozen=True)
class MatchResult:
    """
    Outcome of a signed-permutation match.

    ``permutation[j]`` is the column of X_true paired with column j of X_hat and
    ``signs[j]`` the sign applied to it. The result is falsy when some pair
    differs by more than the tolerance; ``max_error`` is reported either way.
    """
    permutation: Tuple[int, ...]
    signs: Tuple[int, ...]
    max_error: float
    matched: bool

    def __bool__(self) -> bool:
        return self.matched


def _unit_columns(matrix: DenseMatrix) -> DenseMatrix:
    norms = np.linalg.norm(matrix, axis=0)
    return matrix / np.where(norms == 0.0, 1.0, norms)


def match_up_to_signed_permutation(X_hat: DenseMatrix, X_true: DenseMatrix, tol: float) -> MatchResult:
    """
    Greedily pairs columns by largest absolute cosine and checks the pairs entrywise.

    Args:
        X_hat (DenseMatrix): Learned dictionary.
        X_true (DenseMatrix): Reference dictionary of the same shape.
        tol (float): Bound on ``||x_hat - sign * x_true||_inf`` after unit normalization.

    Returns:
        MatchResult: Pairing, signs, the largest pair error and the verdict.
    """
    learned = as_dense_matrix(X_hat)
    truth = as_dense_matrix(X_true)
    if learned.shape != truth.shape:
        return MatchResult(permutation=(), signs=(), max_error=float("inf"), matched=False)

    learned_unit = _unit_columns(learned)
    truth_unit = _unit_columns(truth)
    p = learned.shape[1]
    cosines = learned_unit.T @ truth_unit
    available = np.abs(cosines)
    permutation = [0] * p
    signs = [1] * p
    for _ in range(p):
        row, col = np.unravel_index(int(np.argmax(available)), available.shape)
        permutation[row] = int(col)
        signs[row] = -1 if cosines[row, col] < 0 else 1
        available[row, :] = -1.0
        available[:, col] = -1.0

    max_error = 0.0
    for j in range(p):
        error = float(np.max(np.abs(learned_unit[:, j] - signs[j] * truth_unit[:, permutation[j]]), initial=0.0))
        max_error = max(max_error, error)
    return MatchResult(
        permutation=tuple(permutation),
        signs=tuple(signs),
        max_error=max_error,
        matched=max_error <= tol,
    )
