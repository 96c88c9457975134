"""
l1 minimization by subgradient descent in the kernel of the system matrix.

Every feasible point is written as ``x = x0 + N v`` with ``x0`` the least-norm
solution and ``N`` an orthonormal kernel basis, so the iteration never leaves
the affine solution set. A least-squares polish on the detected support turns
the approximate minimizer into an exactly feasible sparse vector.
"""
import logging
from typing import List, NamedTuple, Optional

import numpy as np

from src.core.model import ArrayLike, DenseMatrix, SparseVector, as_dense_matrix, as_vector
from src.errors import InfeasibleSystemError
from src.solvers.kernel import SolverOptions, kernel_basis
from utils.logger import get_logger

logger = get_logger("l1", log_level=logging.DEBUG)

FEASIBILITY_TOL: float = 1e-8


class PriorSolution(NamedTuple):
    z: SparseVector
    x: SparseVector


def feasibility_tolerance(b: np.ndarray) -> float:
    return FEASIBILITY_TOL * max(1.0, float(np.max(np.abs(b), initial=0.0)))


def is_feasible(M: DenseMatrix, x: np.ndarray, b: np.ndarray) -> bool:
    return float(np.max(np.abs(M @ x - b), initial=0.0)) <= feasibility_tolerance(b)


def clamp_feasible(M: DenseMatrix, x: np.ndarray, b: np.ndarray, zero_tol: float) -> SparseVector:
    """Clamps entries with ``|x_i| <= zero_tol`` to zero unless that breaks feasibility."""
    clamped = np.where(np.abs(x) > zero_tol, x, 0.0)
    if is_feasible(M, clamped, b):
        return SparseVector.from_dense(clamped, zero_tol=zero_tol)
    return SparseVector.from_dense(x, zero_tol=0.0)


class KernelL1Solver:
    """
    Solves ``min ||x||_1 s.t. M x = b`` for many right-hand sides of one matrix.

    The kernel basis and the pseudo-inverse are computed once at construction.
    """

    def __init__(self, M: DenseMatrix, opts: Optional[SolverOptions] = None) -> None:
        self.M = as_dense_matrix(M)
        self.opts = opts if opts is not None else SolverOptions()
        self.N = kernel_basis(self.M)
        self.M_pinv = np.linalg.pinv(self.M) if self.M.size else np.zeros((self.M.shape[1], self.M.shape[0]))
        # Orthonormal columns give ||N||_2 = 1; kept general for an empty kernel.
        self.lipschitz = float(np.linalg.norm(self.N, 2) ** 2) if self.N.size else 1.0

    def particular_solution(self, b: np.ndarray) -> np.ndarray:
        """
        Returns the least-norm solution of ``M x = b``.

        Raises:
            InfeasibleSystemError: If the least-squares residual exceeds the feasibility tolerance.
        """
        x0 = self.M_pinv @ b
        residual = float(np.max(np.abs(self.M @ x0 - b), initial=0.0))
        if residual > feasibility_tolerance(b):
            raise InfeasibleSystemError("System has no solution", residual)
        return x0

    def _descend(self, x0: np.ndarray) -> np.ndarray:
        opts = self.opts
        k = self.N.shape[1]
        scale = float(np.linalg.norm(x0))
        if k == 0 or scale == 0.0:
            return x0

        v = np.zeros(k)
        best_v = v.copy()
        best_value = float(np.sum(np.abs(x0)))
        alpha = opts.step_size * scale / self.lipschitz
        floor = opts.grad_tol * max(1.0, scale)
        stall = 0

        for _ in range(opts.max_iters):
            x = x0 + self.N @ v
            g = self.N.T @ np.sign(x)
            g_norm = float(np.linalg.norm(g))
            if g_norm <= opts.grad_tol:
                break
            v = v - alpha * g / g_norm
            value = float(np.sum(np.abs(x0 + self.N @ v)))
            if value < best_value:
                best_value = value
                best_v = v.copy()
                stall = 0
            else:
                stall += 1
            if stall >= opts.stall_iters:
                alpha *= 0.5
                v = best_v.copy()
                stall = 0
                if alpha <= floor:
                    break
        return x0 + self.N @ best_v

    def _polish(self, x: np.ndarray, b: np.ndarray) -> List[np.ndarray]:
        candidates = []
        order = np.argsort(-np.abs(x), kind="stable")
        nonzero = int(np.count_nonzero(np.abs(x) > 0.0))
        for size in range(1, min(nonzero, self.M.shape[0]) + 1):
            support = np.sort(order[:size])
            refit = np.zeros_like(x)
            refit[support] = np.linalg.lstsq(self.M[:, support], b, rcond=None)[0]
            if is_feasible(self.M, refit, b):
                candidates.append(refit)
                break
        support = np.flatnonzero(np.abs(x) > self.opts.zero_tol)
        if support.size:
            refit = np.zeros_like(x)
            refit[support] = np.linalg.lstsq(self.M[:, support], b, rcond=None)[0]
            if is_feasible(self.M, refit, b):
                candidates.append(refit)
        return candidates

    def solve(self, b: ArrayLike) -> SparseVector:
        """
        Returns an approximate l1 minimizer that satisfies ``M x = b`` to the feasibility tolerance.

        Raises:
            InfeasibleSystemError: If the system has no solution.
        """
        rhs = as_vector(b, length=self.M.shape[0])
        x0 = self.particular_solution(rhs)
        if float(np.max(np.abs(rhs), initial=0.0)) == 0.0:
            return SparseVector.zeros(self.M.shape[1], zero_tol=self.opts.zero_tol)

        descended = self._descend(x0)
        best = clamp_feasible(self.M, descended, rhs, self.opts.zero_tol)
        for candidate in self._polish(descended, rhs):
            polished = clamp_feasible(self.M, candidate, rhs, self.opts.zero_tol)
            if not is_feasible(self.M, polished.to_dense(), rhs):
                continue
            gap = polished.l1_norm() - best.l1_norm()
            if gap < -1e-12 * max(1.0, best.l1_norm()):
                best = polished
            elif abs(gap) <= 1e-12 * max(1.0, best.l1_norm()) and polished.sparsity() < best.sparsity():
                best = polished
        if not is_feasible(self.M, best.to_dense(), rhs):
            best = SparseVector.from_dense(x0, zero_tol=0.0)
        return best


def solve_l1(A: DenseMatrix, b: ArrayLike, opts: Optional[SolverOptions] = None) -> SparseVector:
    """
    Minimizes ``||x||_1`` subject to ``A x = b``.

    Args:
        A (DenseMatrix): System matrix.
        b (ArrayLike): Right-hand side.
        opts (Optional[SolverOptions]): Iteration controls.

    Returns:
        SparseVector: Feasible solution, entries below ``opts.zero_tol`` clamped to zero.

    Raises:
        InfeasibleSystemError: If ``A x = b`` has no solution.
    """
    return KernelL1Solver(A, opts).solve(b)


def solve_l1_prior(A: DenseMatrix, X: DenseMatrix, b: ArrayLike, opts: Optional[SolverOptions] = None) -> PriorSolution:
    """
    Minimizes ``||z||_1`` subject to ``A X z = b`` and returns ``(z, X z)``.

    Raises:
        InfeasibleSystemError: If ``A X z = b`` has no solution.
    """
    matrix = as_dense_matrix(A)
    prior = as_dense_matrix(X, rows=matrix.shape[1])
    opts = opts if opts is not None else SolverOptions()
    z = KernelL1Solver(matrix @ prior, opts).solve(b)
    return PriorSolution(z=z, x=SparseVector.from_dense(prior @ z.to_dense(), zero_tol=0.0))
