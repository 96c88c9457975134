"""Orthogonal matching pursuit over a learned prior ``A X``."""
from typing import List, Optional

import numpy as np

from src.core.model import ArrayLike, DenseMatrix, SparseVector, as_dense_matrix, as_vector
from src.errors import ParameterError
from src.solvers.l1 import PriorSolution


def omp_prior(
    A: DenseMatrix,
    X: DenseMatrix,
    b: ArrayLike,
    max_steps: int,
    res_tol: float,
    residual_trace: Optional[List[float]] = None,
) -> PriorSolution:
    """
    Greedy search for a sparse ``z`` with ``A X z = b``.

    Each step selects ``j = argmax_j |X_j^T A^T (A X z - b)|`` (smallest index on
    ties, already selected indices excluded), adds it to the support and refits
    ``z`` by minimum-norm least squares on the support.

    Args:
        A (DenseMatrix): System matrix (m x n).
        X (DenseMatrix): Prior dictionary (n x p).
        b (ArrayLike): Right-hand side.
        max_steps (int): Maximum support size.
        res_tol (float): Stop once ``||A X z - b||_2 <= res_tol``.
        residual_trace (Optional[List[float]]): Receives the residual norm before each step and at the end.

    Returns:
        PriorSolution: ``(z, X z)``.
    """
    if max_steps < 0:
        raise ParameterError(f"max_steps must be >= 0, got {max_steps}.")
    matrix = as_dense_matrix(A)
    prior = as_dense_matrix(X, rows=matrix.shape[1])
    product = matrix @ prior
    rhs = as_vector(b, length=matrix.shape[0])
    p = product.shape[1]

    z = np.zeros(p)
    support: List[int] = []
    residual = product @ z - rhs
    trace = residual_trace if residual_trace is not None else []
    trace.append(float(np.linalg.norm(residual)))

    for _ in range(min(max_steps, p)):
        if trace[-1] <= res_tol:
            break
        scores = np.abs(product.T @ residual)
        scores[support] = -1.0
        support.append(int(np.argmax(scores)))
        coefficients = np.linalg.lstsq(product[:, support], rhs, rcond=None)[0]
        z = np.zeros(p)
        z[support] = coefficients
        residual = product @ z - rhs
        trace.append(float(np.linalg.norm(residual)))

    z_sparse = SparseVector.from_dense(z, zero_tol=0.0)
    return PriorSolution(z=z_sparse, x=SparseVector.from_dense(prior @ z, zero_tol=0.0))
