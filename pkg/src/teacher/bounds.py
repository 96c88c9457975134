"""Node-count bound for learnable trees."""
import math

from src.errors import DomainError, ParameterError


def tree_size_bound(s0: int, gamma: int, c: float, t: int, tbar: int) -> int:
    """
    Upper bound ``ceil(gamma * s0^(log gamma / log(c t / tbar)))`` on the node count.

    Args:
        s0 (int): Column sparsity at the root.
        gamma (int): Maximal number of children per node.
        c (float): Theory constant.
        t (int): Class sparsity.
        tbar (int): Easy-class sparsity.

    Raises:
        DomainError: If ``c t / tbar <= 1``.
    """
    if s0 < 1 or gamma < 1 or tbar <= 0:
        raise ParameterError(f"Need s0 >= 1, gamma >= 1 and tbar > 0, got s0={s0}, gamma={gamma}, tbar={tbar}.")
    ratio = c * t / tbar
    if ratio <= 1.0:
        raise DomainError(f"c * t / tbar = {ratio} must exceed 1.")
    value = gamma * s0 ** (math.log(gamma) / math.log(ratio))
    return int(math.ceil(value - 1e-9))


def binary_tree_node_count(depth: int) -> int:
    return 2 ** (depth + 1) - 1
