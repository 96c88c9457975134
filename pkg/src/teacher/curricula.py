"""
Curricula on the signed 1-in-3-SAT model class ``A = [[A11 A12], [I I]]``.

* ``I``: contiguous row blocks, a {0,1} deterministic column per leaf and
  dense random +-1 entries everywhere else in the block.
* ``II``: variable pairs ``(i, i + n/2)`` are grouped per leaf; every column holds
  exactly one non-zero per covered pair, so each column is a global l0 minimizer.
* ``III``: as II, with the pairs further split into block columns; samples use
  at most one column per block column, which makes every sample globally minimal.

All three use ``D = I`` and +-1 random entries so that snapping recovers every
node exactly.
"""
import logging
from dataclasses import dataclass, fields
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.core.model import DenseMatrix, SparseVector
from src.core.rng import make_rng
from src.errors import ConstructionError, CurriculumError, ParameterError, RankDeficiencyError
from src.sat.instance import SatInstance, check_1in3_assignment, encode_assignment
from src.sat.reduction import reduce_1in3sat
from src.teacher.class_matrix import orthogonalizing_preconditioner, unit_selection
from src.teacher.split import Partition, balanced_partition, split_support
from src.teacher.tree import BINARY_GAMMA, CurriculumTree, assemble_binary_tree
from utils.logger import get_logger

logger = get_logger("curricula", log_level=logging.DEBUG)

VARIANTS: Tuple[str, ...] = ("I", "II", "III")


@dataclass(frozen=True)
class CurriculumDims:
    """Dimensions of a SAT-model curriculum; ``m`` and ``n`` are ignored when an instance is given."""
    m: int
    n: int
    per_leaf_p: int
    depth: int = 1
    upper_density: float = 0.3
    block_columns: int = 1

    @classmethod
    def from_dict(cls, values: Dict[str, Any], depth: Optional[int] = None) -> "CurriculumDims":
        known = {f.name for f in fields(cls)}
        kwargs = {key: value for key, value in values.items() if key in known}
        if depth is not None:
            kwargs["depth"] = depth
        return cls(**kwargs)


@dataclass
class PairedLayout:
    """Pair groups of the paired curricula: ``groups[c][l]`` lists the pairs of block column c in leaf l."""
    n_pairs: int
    groups: List[List[List[int]]]

    def rows(self, pairs: Sequence[int]) -> List[int]:
        return sorted([i for i in pairs] + [i + self.n_pairs for i in pairs])

    def leaf_rows(self, leaf: int) -> List[int]:
        return self.rows([i for column in self.groups for i in column[leaf]])


def identity_block_system(m: int, n: int, density: float, rng: np.random.Generator) -> DenseMatrix:
    """Random ``[[A11 A12], [I I]]`` with Bernoulli(density) {0,1} upper blocks."""
    if n % 2:
        raise ParameterError(f"n must be even for the identity-block model, got {n}.")
    pairs = n // 2
    upper = m - pairs
    if upper < 0:
        raise ParameterError(f"m={m} is smaller than the identity block of size {pairs}.")
    if not 0.0 <= density <= 1.0:
        raise ParameterError(f"upper_density must lie in [0, 1], got {density}.")
    top = (rng.random((upper, n)) < density).astype(float)
    return np.vstack([top, np.hstack([np.eye(pairs), np.eye(pairs)])])


def paired_layout(n_pairs: int, leaves: int, block_columns: int) -> PairedLayout:
    """Cuts the pairs into block-column groups, then each group into one contiguous run per leaf."""
    groups = []
    for column in balanced_partition(range(n_pairs), block_columns):
        groups.append(balanced_partition(column, leaves))
    return PairedLayout(n_pairs=n_pairs, groups=groups)


def paired_column(pairs: Sequence[int], n_pairs: int, n: int, rng: np.random.Generator) -> np.ndarray:
    """One random +-1 entry per pair, on the upper or the lower member."""
    column = np.zeros(n)
    for i in pairs:
        row = i if rng.random() < 0.5 else i + n_pairs
        column[row] = 1.0 if rng.random() < 0.5 else -1.0
    return column


def curriculum_solution(variant: str, n: int, rng: np.random.Generator, row_blocks: Partition) -> np.ndarray:
    """Random designated solution: one-hot per pair for II/III, {0,1} with a one in every block for I."""
    pairs = n // 2
    if variant != "I":
        y = rng.integers(0, 2, size=pairs).astype(float)
        return np.concatenate([y, 1.0 - y])
    x = rng.integers(0, 2, size=n).astype(float)
    for block in row_blocks:
        if not np.any(x[block]):
            x[block[0]] = 1.0
    return x


def build_sat_curriculum(
    variant: str,
    dims: CurriculumDims,
    seed: int,
    instance: Optional[SatInstance] = None,
    assignment: Optional[Sequence[bool]] = None,
    t: int = 4,
) -> CurriculumTree:
    """
    Builds a Curriculum I, II or III tree on the identity-block model class.

    Args:
        variant (str): ``I``, ``II`` or ``III``.
        dims (CurriculumDims): Dimensions, depth and block-column count.
        seed (int): Experiment seed (``curriculum`` stream).
        instance (Optional[SatInstance]): Use the reduction of this instance as A.
        assignment (Optional[Sequence[bool]]): Satisfying assignment; its encoding becomes x.
        t (int): Class sparsity recorded on the tree; ``tbar = t / 2``.

    Returns:
        CurriculumTree: A tree with ``D = I`` whose ``variant`` and ``block_columns`` drive sample emission.

    Raises:
        ParameterError: If the dimensions are inconsistent or the assignment does not satisfy the instance.
    """
    if variant not in VARIANTS:
        raise ParameterError(f"Unknown curriculum variant '{variant}', expected one of {VARIANTS}.")
    if t < 2 or t % 2:
        raise ParameterError(f"Binary trees need an even t >= 2, got t={t}.")
    block_columns = dims.block_columns if variant == "III" else 1
    leaves = 2**dims.depth
    if dims.per_leaf_p % block_columns:
        raise ParameterError(f"per_leaf_p={dims.per_leaf_p} is not divisible by block_columns={block_columns}.")
    cols_per_block = dims.per_leaf_p // block_columns
    rng = make_rng(seed, purpose="curriculum")

    try:
        if instance is not None:
            if assignment is None or not check_1in3_assignment(instance, assignment):
                raise ParameterError("A SAT-backed curriculum needs a satisfying assignment.")
            A = reduce_1in3sat(instance).A
            n = 2 * instance.n_vars
        else:
            A = identity_block_system(dims.m, dims.n, dims.upper_density, rng)
            n = dims.n
        pairs = n // 2
        p_total = leaves * dims.per_leaf_p
        blocks_K = [list(range(l * dims.per_leaf_p, (l + 1) * dims.per_leaf_p)) for l in range(leaves)]
        X_full = np.zeros((n, p_total))

        if variant == "I":
            blocks_J = balanced_partition(range(n), leaves)
            x = encode_assignment(assignment).to_dense() if instance is not None else curriculum_solution("I", n, rng, blocks_J)
            deterministic_blocks = blocks_J
            deterministic_columns = [block[0] for block in blocks_K]
            for leaf, (rows, cols) in enumerate(zip(blocks_J, blocks_K)):
                if not np.any(x[rows]):
                    raise ConstructionError("Deterministic column is zero", block=leaf)
                X_full[rows, cols[0]] = x[rows]
                X_full[np.ix_(rows, cols[1:])] = rng.choice(np.array([-1.0, 1.0]), size=(len(rows), len(cols) - 1))
        else:
            layout = paired_layout(pairs, leaves, block_columns)
            blocks_J = [layout.leaf_rows(leaf) for leaf in range(leaves)]
            x = encode_assignment(assignment).to_dense() if instance is not None else curriculum_solution(variant, n, rng, blocks_J)
            deterministic_blocks = []
            deterministic_columns = []
            for leaf, cols in enumerate(blocks_K):
                for c in range(block_columns):
                    group = layout.groups[c][leaf]
                    rows = layout.rows(group)
                    first = cols[c * cols_per_block]
                    X_full[rows, first] = x[rows]
                    deterministic_blocks.append(rows)
                    deterministic_columns.append(first)
                    for column in cols[c * cols_per_block + 1:(c + 1) * cols_per_block]:
                        X_full[:, column] = paired_column(group, pairs, n, rng)
    except CurriculumError as e:
        logger.error(f"Curriculum {variant} construction (seed={seed}) failed: {e}")
        raise

    solution = SparseVector.from_dense(x, zero_tol=0.0)
    Z_full = unit_selection(p_total, deterministic_columns)
    S = split_support(solution, deterministic_blocks)
    T = curriculum_preconditioner(A, S)
    nodes = assemble_binary_tree(X_full, blocks_K, max(len(rows) for rows in blocks_J), dims.depth)
    tree = CurriculumTree(
        nodes=nodes,
        A=A,
        x=solution,
        t=t,
        tbar=t // 2,
        gamma=BINARY_GAMMA,
        partition_J=blocks_J,
        partition_K=blocks_K,
        X_full=X_full,
        Z_full=Z_full,
        T=T,
        D=np.ones(n),
        variant=variant,
        block_columns=block_columns,
    )
    logger.info(f"Built Curriculum {variant} with {len(nodes)} nodes (A {A.shape}, p_total={p_total}, seed={seed}).")
    return tree


def curriculum_preconditioner(A: DenseMatrix, S: DenseMatrix) -> DenseMatrix:
    """Orthogonalizing preconditioner of ``A S``, or the identity when ``A S`` is rank deficient."""
    norms = np.linalg.norm(S, axis=0)
    try:
        return orthogonalizing_preconditioner(A @ (S / np.where(norms == 0.0, 1.0, norms)))
    except RankDeficiencyError as e:
        logger.warning(f"No orthogonalizing preconditioner for this curriculum, using the identity: {e}")
        return np.eye(A.shape[0])
