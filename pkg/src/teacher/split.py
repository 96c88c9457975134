"""Splitting a designated solution into disjoint support blocks."""
from typing import List, Sequence

import numpy as np

from src.core.model import DenseMatrix, SparseVector
from src.errors import ParameterError, PartitionError

Partition = List[List[int]]


def validate_partition(blocks: Sequence[Sequence[int]], dim: int) -> Partition:
    """
    Checks that the blocks are disjoint and inside ``[0, dim)``.

    Returns:
        Partition: The blocks as lists of ints.

    Raises:
        PartitionError: On an overlap or an out-of-range index.
    """
    seen = set()
    normalized: Partition = []
    for number, block in enumerate(blocks):
        members = [int(i) for i in block]
        for index in members:
            if not 0 <= index < dim:
                raise PartitionError(f"Block {number} holds index {index} outside [0, {dim}).")
            if index in seen:
                raise PartitionError(f"Index {index} appears in more than one block.")
            seen.add(index)
        normalized.append(members)
    return normalized


def split_support(x: SparseVector, partition_J: Sequence[Sequence[int]]) -> DenseMatrix:
    """
    Builds S with ``S[j, l] = x_j`` for ``j`` in block ``J_l`` and 0 elsewhere.

    Args:
        x (SparseVector): The designated solution.
        partition_J (Sequence[Sequence[int]]): Disjoint blocks covering supp(x).

    Returns:
        DenseMatrix: n x q matrix with ``S @ 1 == x``.

    Raises:
        PartitionError: If blocks overlap or a support index is not covered.
    """
    blocks = validate_partition(partition_J, x.dim)
    covered = {index for block in blocks for index in block}
    missing = [index for index in x.support if index not in covered]
    if missing:
        raise PartitionError(f"Support indices {missing} are not covered by the partition.")

    dense = x.to_dense()
    S = np.zeros((x.dim, len(blocks)))
    for column, block in enumerate(blocks):
        S[block, column] = dense[block]
    return S


def balanced_partition(indices: Sequence[int], q: int) -> Partition:
    """
    Cuts ``indices`` into q contiguous blocks of equal size; the last block absorbs the remainder.

    Raises:
        ParameterError: If q is not in ``[1, len(indices)]``.
    """
    members = [int(i) for i in indices]
    if not 1 <= q <= len(members):
        raise ParameterError(f"Cannot cut {len(members)} indices into {q} non-empty blocks.")
    size = len(members) // q
    blocks = [members[l * size:(l + 1) * size] for l in range(q - 1)]
    blocks.append(members[(q - 1) * size:])
    return blocks
