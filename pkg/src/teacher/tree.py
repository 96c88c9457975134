"""
Curriculum trees of problem classes.

Nodes are stored in heap order: the root has id 0 and node ``i`` has children
``2i + 1`` and ``2i + 2``. A leaf owns one column block ``K_l`` of the full class
matrix; an internal node combines its two children with the isometry
``(1/sqrt 2) [I; I]``, so every node matrix is ``X_full @ W`` for a matrix W
with orthonormal columns.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.diagnostics import condition_number, stable_rank
from src.core.model import BernoulliSubgaussianParams, DenseMatrix, SparseVector, as_dense_matrix
from src.errors import CurriculumError, DomainError, ParameterError
from src.teacher.class_matrix import build_class_matrix
from src.teacher.split import Partition, balanced_partition, split_support
from utils.logger import get_logger

logger = get_logger("tree", log_level=logging.DEBUG)

BINARY_GAMMA: int = 2


@dataclass
class ClassNode:
    """Teacher-side node: the class matrix ``X_true = X_full @ W`` and its bookkeeping."""
    id: int
    children: Tuple[int, ...]
    K_set: Tuple[int, ...]
    X_true: DenseMatrix
    W: DenseMatrix
    s_i: int
    depth: int

    @property
    def is_leaf(self) -> bool:
        return not self.children

    @property
    def p(self) -> int:
        return int(self.W.shape[1])


@dataclass
class CurriculumTree:
    """
    A learnable tree together with the teacher-side construction data.

    ``X_full`` is the concatenation of all leaf matrices and ``Z_full`` selects
    its deterministic columns, so ``X_full @ Z_full @ 1 == x``. ``T`` is the
    orthogonalizing preconditioner; samples are emitted for ``A``, not ``T A``.
    Both have the same kernel, so the student's kernel-l1 solutions do not change.
    """
    nodes: List[ClassNode]
    A: DenseMatrix
    x: SparseVector
    t: int
    tbar: int
    gamma: int
    partition_J: Partition
    partition_K: Partition
    X_full: DenseMatrix
    Z_full: DenseMatrix
    T: DenseMatrix
    D: np.ndarray
    root_id: int = 0
    variant: str = "generic"
    block_columns: int = 1
    premise: Dict[str, Any] = field(default_factory=dict)

    def node(self, node_id: int) -> ClassNode:
        if not 0 <= node_id < len(self.nodes):
            raise ParameterError(f"Tree has no node {node_id}.")
        return self.nodes[node_id]

    @property
    def depth(self) -> int:
        return max(node.depth for node in self.nodes)

    def leaves(self) -> List[ClassNode]:
        return [node for node in self.nodes if node.is_leaf]

    def post_order(self) -> List[int]:
        """Node ids with every child before its parent."""
        order: List[int] = []

        def visit(node_id: int) -> None:
            for child in self.nodes[node_id].children:
                visit(child)
            order.append(node_id)

        visit(self.root_id)
        return order


def heap_depth(node_id: int) -> int:
    return int(math.floor(math.log2(node_id + 1)))


def assemble_binary_tree(X_full: DenseMatrix, partition_K: Partition, leaf_support_size: int, depth: int) -> List[ClassNode]:
    """
    Builds the node list of a complete binary tree over the leaf column blocks.

    Args:
        X_full (DenseMatrix): Concatenated leaf matrices (n x p_total).
        partition_K (Partition): One equally sized column block per leaf, left to right.
        leaf_support_size (int): Column sparsity bound of a leaf.
        depth (int): Tree depth L; there are ``2^L`` leaves.

    Returns:
        List[ClassNode]: Nodes in heap order.
    """
    leaves = 2**depth
    if len(partition_K) != leaves:
        raise ParameterError(f"Depth {depth} needs {leaves} column blocks, got {len(partition_K)}.")
    widths = {len(block) for block in partition_K}
    if len(widths) != 1:
        raise ParameterError(f"Leaf column blocks must have equal width, got {sorted(widths)}.")

    p_total = X_full.shape[1]
    count = 2 ** (depth + 1) - 1
    first_leaf = leaves - 1
    W_of: Dict[int, DenseMatrix] = {}
    K_of: Dict[int, Tuple[int, ...]] = {}
    for node_id in range(count - 1, -1, -1):
        if node_id >= first_leaf:
            block = partition_K[node_id - first_leaf]
            W = np.zeros((p_total, len(block)))
            W[block, np.arange(len(block))] = 1.0
            K_of[node_id] = tuple(block)
        else:
            left, right = 2 * node_id + 1, 2 * node_id + 2
            W = (W_of[left] + W_of[right]) / math.sqrt(2.0)
            K_of[node_id] = K_of[left] + K_of[right]
        W_of[node_id] = W

    nodes = []
    for node_id in range(count):
        node_depth = heap_depth(node_id)
        children = () if node_id >= first_leaf else (2 * node_id + 1, 2 * node_id + 2)
        nodes.append(
            ClassNode(
                id=node_id,
                children=children,
                K_set=K_of[node_id],
                X_true=X_full @ W_of[node_id],
                W=W_of[node_id],
                s_i=leaf_support_size * 2 ** (depth - node_depth),
                depth=node_depth,
            )
        )
    return nodes


def premise_report(A: DenseMatrix, S: DenseMatrix, partition_J: Partition, depth: int, p: int, t: int, c: float) -> Dict[str, Any]:
    """
    Evaluates the stable-rank premise ``min_J srank(A_J) >= t cond(A S) (L + log(c p / t))``.

    Returns:
        Dict[str, Any]: The measured quantities and whether the inequality holds.
    """
    ranks = []
    for block in partition_J:
        try:
            ranks.append(stable_rank(A[:, block]))
        except DomainError:
            ranks.append(0.0)
    norms = np.linalg.norm(S, axis=0)
    kappa = condition_number(A @ (S / np.where(norms == 0.0, 1.0, norms)))
    required = t * kappa * (depth + math.log(max(c * p / t, 1e-300)))
    report = {
        "min_block_stable_rank": float(min(ranks)),
        "condition_AS": float(kappa),
        "required_stable_rank": float(required),
        "holds": bool(min(ranks) >= required),
    }
    if not report["holds"]:
        logger.warning(
            f"Stable-rank premise fails: min srank {report['min_block_stable_rank']:.2f} < {required:.2f}; building anyway."
        )
    return report


def build_curriculum_tree(
    A: DenseMatrix,
    x: SparseVector,
    L: int,
    per_leaf_p: int,
    t: int,
    params: BernoulliSubgaussianParams,
    seed: int,
    c: float = 1.0,
    partition_J: Optional[Sequence[Sequence[int]]] = None,
    diagonal_scaling: bool = True,
) -> CurriculumTree:
    """
    Builds a learnable binary tree whose root class contains ``x``.

    Args:
        A (DenseMatrix): System matrix (m x n).
        x (SparseVector): Designated solution.
        L (int): Depth; the tree has ``2^L`` leaves and ``2^(L+1) - 1`` nodes.
        per_leaf_p (int): Columns per leaf block.
        t (int): Class sparsity; must be even, ``tbar = t / 2``.
        params (BernoulliSubgaussianParams): Law of the random blocks.
        seed (int): Experiment seed.
        c (float): Theory constant used in the premise report.
        partition_J (Optional[Sequence[Sequence[int]]]): Split of supp(x); balanced by default.
        diagonal_scaling (bool): Passed to ``build_class_matrix``.

    Returns:
        CurriculumTree: The tree with ``t / tbar = 2`` and ``gamma = 2``.

    Raises:
        ParameterError: If t is odd or the dimensions are inconsistent.
        ConstructionError: If the split solution is not independent under A.
    """
    matrix = as_dense_matrix(A, cols=x.dim)
    if L < 0 or per_leaf_p < 1:
        raise ParameterError(f"Need L >= 0 and per_leaf_p >= 1, got L={L}, per_leaf_p={per_leaf_p}.")
    if t < 2 or t % 2:
        raise ParameterError(f"Binary trees need an even t >= 2, got t={t}.")
    q = 2**L
    try:
        blocks_J = [list(b) for b in partition_J] if partition_J is not None else balanced_partition(x.support, q)
        blocks_K = [list(range(l * per_leaf_p, (l + 1) * per_leaf_p)) for l in range(q)]
        p_total = q * per_leaf_p
        built = build_class_matrix(matrix, x, blocks_J, blocks_K, p_total, params, seed, diagonal_scaling)
        premise = premise_report(matrix, split_support(x, blocks_J), blocks_J, L, per_leaf_p, t, c)
        nodes = assemble_binary_tree(built.X, blocks_K, max(len(b) for b in blocks_J), L)
    except CurriculumError as e:
        logger.error(f"Curriculum tree construction (L={L}, seed={seed}) failed: {e}")
        raise

    tree = CurriculumTree(
        nodes=nodes,
        A=matrix,
        x=x,
        t=t,
        tbar=t // 2,
        gamma=BINARY_GAMMA,
        partition_J=blocks_J,
        partition_K=blocks_K,
        X_full=built.X,
        Z_full=built.Z,
        T=built.T,
        D=built.D,
        premise=premise,
    )
    logger.info(f"Built curriculum tree with {len(nodes)} nodes (L={L}, p_total={p_total}, seed={seed}).")
    return tree


def canonical_coefficients(tree: CurriculumTree, node_id: int) -> np.ndarray:
    """Returns ``z* = W^T (Z 1)``; for the root ``X_root z* == x``."""
    node = tree.node(node_id)
    return node.W.T @ tree.Z_full.sum(axis=1)
