"""Monte Carlo test of ``E ||A R u||^2 = ||A||_F^2 ||u||^2`` for i.i.d. mean-zero unit-variance R."""
import logging
import math
from typing import NamedTuple

import numpy as np

from src.core.model import ArrayLike, DenseMatrix, as_dense_matrix, as_vector
from src.core.rng import make_rng
from src.errors import ParameterError
from utils.logger import get_logger

logger = get_logger("expectation", log_level=logging.DEBUG)

MIN_TRIALS: int = 100
BATCH: int = 5_000


class ExpectationResult(NamedTuple):
    empirical: float
    expected: float
    z_score: float


def expectation_identity_test(
    A: DenseMatrix,
    u: ArrayLike,
    trials: int,
    seed: int,
    distribution: str = "rademacher",
) -> ExpectationResult:
    """
    Compares the empirical mean of ``||A R u||^2`` with ``||A||_F^2 ||u||^2``.

    Args:
        A (DenseMatrix): m x n matrix.
        u (ArrayLike): Vector of length k; R is n x k.
        trials (int): Number of draws of R, at least 100.
        seed (int): Seed of the ``expectation`` stream.
        distribution (str): ``rademacher`` or ``gaussian``.

    Returns:
        ExpectationResult: Empirical mean, closed form and ``(mean - expected) / (std / sqrt(trials))``.
        A zero sample deviation gives a z-score of 0 when the two agree.
    """
    if trials < MIN_TRIALS:
        raise ParameterError(f"Need at least {MIN_TRIALS} trials, got {trials}.")
    if distribution not in ("rademacher", "gaussian"):
        raise ParameterError(f"Unknown distribution '{distribution}'.")
    matrix = as_dense_matrix(A)
    vector = as_vector(u)
    n, k = matrix.shape[1], vector.shape[0]
    expected = float(np.linalg.norm(matrix) ** 2 * np.dot(vector, vector))
    rng = make_rng(seed, purpose="expectation")

    values = np.empty(trials)
    done = 0
    while done < trials:
        size = min(BATCH, trials - done)
        if distribution == "rademacher":
            R = rng.choice(np.array([-1.0, 1.0]), size=(size, n, k))
        else:
            R = rng.standard_normal((size, n, k))
        images = (R @ vector) @ matrix.T
        values[done:done + size] = np.sum(images**2, axis=1)
        done += size

    empirical = float(values.mean())
    deviation = float(values.std(ddof=1))
    if deviation == 0.0:
        z_score = 0.0 if math.isclose(empirical, expected, rel_tol=1e-12, abs_tol=1e-12) else math.inf
    else:
        z_score = (empirical - expected) / (deviation / math.sqrt(trials))
    logger.debug(f"E||ARu||^2: empirical {empirical:.6f}, expected {expected:.6f}, z {z_score:.3f}.")
    return ExpectationResult(empirical=empirical, expected=expected, z_score=z_score)
