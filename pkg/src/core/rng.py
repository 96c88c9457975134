"""
Seedable random streams.

Every draw in the toolkit goes through ``make_rng``. A stream is identified by
the user seed plus an optional ``(node_id, purpose)`` pair, which is passed to
``numpy.random.SeedSequence`` as its spawn key, so teacher and student draws for
different nodes or purposes never share state.
"""
from typing import Dict, Optional

import numpy as np

from src.errors import ParameterError

PURPOSE_TAGS: Dict[str, int] = {
    "matrix": 1,
    "class_matrix": 2,
    "samples": 3,
    "dictionary": 4,
    "curriculum": 5,
    "expectation": 6,
    "monte_carlo": 7,
}

_NO_NODE: int = 2**31 - 1


def make_rng(seed: int, node_id: Optional[int] = None, purpose: Optional[str] = None) -> np.random.Generator:
    """
    Returns a reproducible generator for a (seed, node, purpose) stream.

    Args:
        seed (int): Non-negative user seed.
        node_id (Optional[int]): Tree node the draws belong to, if any.
        purpose (Optional[str]): One of ``PURPOSE_TAGS``.

    Returns:
        np.random.Generator: A PCG64 generator.

    Raises:
        ParameterError: If the seed is negative or the purpose is unknown.
    """
    if seed < 0:
        raise ParameterError(f"Seeds must be non-negative, got {seed}.")
    if node_id is None and purpose is None:
        return np.random.default_rng(np.random.SeedSequence(seed))
    if purpose is not None and purpose not in PURPOSE_TAGS:
        raise ParameterError(f"Unknown RNG purpose '{purpose}'.")
    spawn_key = (
        _NO_NODE if node_id is None else int(node_id),
        0 if purpose is None else PURPOSE_TAGS[purpose],
    )
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=spawn_key))
