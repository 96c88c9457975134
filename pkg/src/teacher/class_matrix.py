"""
Construction of a class matrix ``X = S Z^T + D R (I - Z Z^T)`` around a designated solution.

The deterministic part ``S Z^T`` places the split solution on one column per
block; the random part fills the remaining columns of every matched
``[J_l, K_l]`` block and vanishes on the deterministic columns, so
``X (Z 1) = x`` holds exactly.
"""
import logging
from typing import NamedTuple, Sequence

import numpy as np

from src.core.diagnostics import RANK_REL_TOL, numerical_rank
from src.core.model import BernoulliSubgaussianParams, DenseMatrix, SparseVector, as_dense_matrix
from src.core.rng import make_rng
from src.core.sampling import sample_bernoulli_subgaussian
from src.errors import ConstructionError, PartitionError, RankDeficiencyError
from src.teacher.split import split_support, validate_partition
from utils.logger import get_logger

logger = get_logger("class_matrix", log_level=logging.DEBUG)


class ClassMatrix(NamedTuple):
    X: DenseMatrix
    Z: DenseMatrix
    T: DenseMatrix
    D: np.ndarray


def orthogonalizing_preconditioner(M: DenseMatrix) -> DenseMatrix:
    """
    Returns T with ``T M`` having orthonormal columns and ``cond(T) == cond(M)``.

    With ``M = U diag(sigma) V^T`` the preconditioner is ``T = D U^T`` where
    ``D^-1 = diag(sigma_1, ..., sigma_q, sigma_q, ..., sigma_q)``.

    Args:
        M (DenseMatrix): m x q matrix with ``m >= q``.

    Returns:
        DenseMatrix: The m x m preconditioner.

    Raises:
        RankDeficiencyError: If M does not have full column rank.
    """
    matrix = as_dense_matrix(M)
    m, q = matrix.shape
    rank = numerical_rank(matrix)
    if m < q or rank < q:
        raise RankDeficiencyError("Preconditioner needs full column rank", measured_rank=rank, expected_rank=q)
    U, sigma, _ = np.linalg.svd(matrix, full_matrices=True)
    completion = np.full(m, sigma[-1])
    completion[:q] = sigma
    return (U / completion).T


def assemble_class_matrix(S: DenseMatrix, Z: DenseMatrix, R: DenseMatrix, D: np.ndarray) -> DenseMatrix:
    """Evaluates ``S Z^T + diag(D) R (I - Z Z^T)``."""
    projector = np.eye(Z.shape[0]) - Z @ Z.T
    return S @ Z.T + (np.asarray(D, dtype=float)[:, None] * R) @ projector


def unit_selection(p: int, indices: Sequence[int]) -> DenseMatrix:
    """p x len(indices) matrix whose column l is the unit vector ``e_{indices[l]}``."""
    Z = np.zeros((p, len(indices)))
    for column, index in enumerate(indices):
        Z[index, column] = 1.0
    return Z


def first_rank_drop(M: DenseMatrix) -> int:
    """Index of the first column that does not raise the numerical rank, or -1."""
    for column in range(M.shape[1]):
        if numerical_rank(M[:, : column + 1], RANK_REL_TOL) < column + 1:
            return column
    return -1


def build_class_matrix(
    A: DenseMatrix,
    x: SparseVector,
    partition_J: Sequence[Sequence[int]],
    partition_K: Sequence[Sequence[int]],
    p: int,
    params: BernoulliSubgaussianParams,
    seed: int,
    diagonal_scaling: bool = True,
) -> ClassMatrix:
    """
    Builds the class matrix of one curriculum level around ``x``.

    Args:
        A (DenseMatrix): System matrix (m x n).
        x (SparseVector): Designated solution of dimension n.
        partition_J (Sequence[Sequence[int]]): q disjoint row blocks covering supp(x).
        partition_K (Sequence[Sequence[int]]): q disjoint column blocks partitioning ``[0, p)``.
        p (int): Total column count.
        params (BernoulliSubgaussianParams): Law of the random blocks of R.
        seed (int): Seed of the ``class_matrix`` stream.
        diagonal_scaling (bool): Use ``D_j = ||(T A)_J||_F^-1``; otherwise ``D = 1``.

    Returns:
        ClassMatrix: ``(X, Z, T, D)`` with ``X Z 1 == x``.

    Raises:
        PartitionError: If the partitions are inconsistent.
        ConstructionError: If ``A S`` is rank deficient; names the first offending block.
    """
    matrix = as_dense_matrix(A, cols=x.dim)
    params.validate()
    blocks_J = validate_partition(partition_J, x.dim)
    blocks_K = validate_partition(partition_K, p)
    if len(blocks_J) != len(blocks_K):
        raise PartitionError(f"Got {len(blocks_J)} J blocks but {len(blocks_K)} K blocks.")
    if sum(len(block) for block in blocks_K) != p or any(not block for block in blocks_K):
        raise PartitionError(f"K blocks must be non-empty and partition [0, {p}).")

    try:
        S = split_support(x, blocks_J)
        norms = np.linalg.norm(S, axis=0)
        empty = np.flatnonzero(norms == 0.0)
        if empty.size:
            raise ConstructionError("Split column is zero", block=int(empty[0]))
        AS = matrix @ (S / norms)
        drop = first_rank_drop(AS)
        if drop >= 0:
            raise ConstructionError("A S is rank deficient", block=drop)
        T = orthogonalizing_preconditioner(AS)
    except (ConstructionError, RankDeficiencyError) as e:
        logger.error(f"Class matrix construction failed: {e}")
        raise

    D = np.ones(x.dim)
    if diagonal_scaling:
        TA = T @ matrix
        for block in blocks_J:
            block_norm = float(np.linalg.norm(TA[:, block]))
            if block_norm > 0.0:
                D[block] = 1.0 / block_norm

    rng = make_rng(seed, purpose="class_matrix")
    R = np.zeros((x.dim, p))
    for rows, cols in zip(blocks_J, blocks_K):
        R[np.ix_(rows, cols)] = sample_bernoulli_subgaussian(len(rows), len(cols), params, seed, rng=rng)

    Z = unit_selection(p, [block[0] for block in blocks_K])
    X = assemble_class_matrix(S, Z, R, D)
    logger.debug(f"Built class matrix {X.shape} with {len(blocks_J)} blocks.")
    return ClassMatrix(X=X, Z=Z, T=T, D=D)
