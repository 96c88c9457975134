"""Kernel bases and solver options shared by the iterative solvers."""
from dataclasses import dataclass

import numpy as np
from scipy.linalg import null_space

from src.core.model import DenseMatrix, as_dense_matrix
from src.errors import ParameterError

KERNEL_REL_TOL: float = 1e-10


@dataclass(frozen=True)
class SolverOptions:
    """Iteration controls for the kernel subgradient solver."""
    max_iters: int = 2000
    step_size: float = 1.0
    grad_tol: float = 1e-9
    zero_tol: float = 1e-6
    stall_iters: int = 10

    def __post_init__(self) -> None:
        if self.max_iters < 1:
            raise ParameterError(f"max_iters must be >= 1, got {self.max_iters}.")
        if not (np.isfinite(self.step_size) and self.step_size > 0):
            raise ParameterError(f"step_size must be positive, got {self.step_size}.")
        if not (np.isfinite(self.grad_tol) and self.grad_tol > 0):
            raise ParameterError(f"grad_tol must be positive, got {self.grad_tol}.")
        if not (np.isfinite(self.zero_tol) and self.zero_tol >= 0):
            raise ParameterError(f"zero_tol must be >= 0, got {self.zero_tol}.")
        if self.stall_iters < 1:
            raise ParameterError(f"stall_iters must be >= 1, got {self.stall_iters}.")


def kernel_basis(A: DenseMatrix) -> DenseMatrix:
    """
    Returns an orthonormal basis of ker(A) as the columns of N.

    Args:
        A (DenseMatrix): An m x n matrix.

    Returns:
        DenseMatrix: n x k matrix with orthonormal columns and ``A N ~ 0``; k may be 0.
    """
    matrix = as_dense_matrix(A)
    n = matrix.shape[1]
    if n == 0:
        return np.zeros((0, 0))
    if matrix.shape[0] == 0 or not np.any(matrix):
        return np.eye(n)
    return null_space(matrix, rcond=KERNEL_REL_TOL)
