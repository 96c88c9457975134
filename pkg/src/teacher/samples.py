"""Per-node training samples ``b_l = A X_true z_l``."""
import logging
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from src.core.model import DenseMatrix
from src.core.rng import make_rng
from src.core.sampling import sample_training_coefficients
from src.teacher.split import balanced_partition
from src.teacher.tree import CurriculumTree
from utils.logger import get_logger

logger = get_logger("samples", log_level=logging.DEBUG)


@dataclass
class TrainingSet:
    """
    Right-hand sides of one node. Column l of ``B`` is ``b_l``; ``Z_true`` (p x q)
    holds the teacher's coefficients and never reaches the student.
    """
    node_id: int
    B: DenseMatrix
    q: int
    seed: int
    Z_true: Optional[DenseMatrix] = None

    @property
    def b_list(self) -> List[np.ndarray]:
        return [self.B[:, l] for l in range(self.B.shape[1])]

    @property
    def z_true_list(self) -> Optional[List[np.ndarray]]:
        if self.Z_true is None:
            return None
        return [self.Z_true[:, l] for l in range(self.Z_true.shape[1])]


def keep_one_per_block_column(Z: DenseMatrix, block_columns: int, rng: np.random.Generator) -> DenseMatrix:
    """Zeroes all but one uniformly chosen non-zero per block column in every sample."""
    p, q = Z.shape
    groups = [np.asarray(rows) for rows in balanced_partition(range(p), block_columns)]
    thinned = Z.copy()
    for l in range(q):
        for rows in groups:
            active = rows[thinned[rows, l] != 0.0]
            if active.size > 1:
                keep = active[rng.integers(active.size)]
                thinned[active[active != keep], l] = 0.0
    return thinned


def emit_training_samples(tree: CurriculumTree, node_id: int, q: int, seed: int) -> TrainingSet:
    """
    Draws q samples of a node with coefficients of rate ``tbar / (2p)``.

    Curriculum III trees additionally allow at most one non-zero coefficient
    per block column.

    Args:
        tree (CurriculumTree): Teacher tree.
        node_id (int): Node to sample.
        q (int): Number of samples.
        seed (int): Experiment seed; the stream is split by node.

    Returns:
        TrainingSet: ``B = A X_true Z_true``.
    """
    node = tree.node(node_id)
    Z = sample_training_coefficients(node.p, q, tree.tbar, seed, node_id=node_id)
    if tree.variant == "III":
        Z = keep_one_per_block_column(Z, tree.block_columns, make_rng(seed, node_id=node_id, purpose="curriculum"))
    B = tree.A @ (node.X_true @ Z)
    logger.debug(f"Emitted {q} samples for node {node_id} (mean sparsity {np.count_nonzero(Z) / max(q, 1):.2f}).")
    return TrainingSet(node_id=node_id, B=B, q=q, seed=seed, Z_true=Z)
