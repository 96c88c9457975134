"""Random-matrix samplers for the Bernoulli-Subgaussian models."""
import logging
import math
from typing import Optional, Tuple

import numpy as np

from src.core.model import BernoulliSubgaussianParams, DenseMatrix
from src.core.rng import make_rng
from src.errors import ParameterError
from utils.logger import get_logger

logger = get_logger("sampling", log_level=logging.DEBUG)


def draw_subgaussian(rng: np.random.Generator, shape: Tuple[int, ...], params: BernoulliSubgaussianParams) -> np.ndarray:
    """Draws dense mean-zero entries with variance ``params.nu2`` from the chosen law."""
    nu = math.sqrt(params.nu2)
    if params.distribution == "rademacher":
        return nu * rng.choice(np.array([-1.0, 1.0]), size=shape)
    return rng.normal(0.0, nu, size=shape)


def sample_bernoulli_subgaussian(
    rows: int,
    cols: int,
    params: BernoulliSubgaussianParams,
    seed: int,
    rng: Optional[np.random.Generator] = None,
) -> DenseMatrix:
    """
    Samples ``M_jk = Omega_jk * R_jk`` with an i.i.d. Bernoulli(theta) mask.

    Args:
        rows (int): Row count.
        cols (int): Column count.
        params (BernoulliSubgaussianParams): Model parameters, validated first.
        seed (int): Seed of the ``matrix`` stream; ignored when ``rng`` is given.
        rng (Optional[np.random.Generator]): Explicit stream for callers that split their own.

    Returns:
        DenseMatrix: The sampled ``rows x cols`` matrix. Equal seeds give identical matrices.

    Raises:
        ParameterError: If the parameters are invalid.
    """
    params.validate()
    if rows < 0 or cols < 0:
        raise ParameterError(f"Dimensions must be non-negative, got {rows}x{cols}.")
    generator = rng if rng is not None else make_rng(seed, purpose="matrix")
    mask = generator.random((rows, cols)) < params.theta
    values = draw_subgaussian(generator, (rows, cols), params)
    return np.where(mask, values, 0.0)


def check_sample_size_assumption(p: int, q: int, tbar: float, c: float = 1.0) -> bool:
    """
    Reports the sample-model inequalities: q > c p^2 log^2 p and 2/p <= tbar/p <= c/sqrt(p).

    Returns:
        bool: True if all inequalities hold. Violations are logged, never raised.
    """
    holds = True
    if q <= p * p:
        logger.warning(f"Sample count q={q} does not exceed p^2={p * p}; factorization may fail.")
        holds = False
    log_p = math.log(p) if p > 1 else 0.0
    if q <= c * p * p * log_p * log_p:
        logger.debug(f"q={q} is below c*p^2*log^2(p)={c * p * p * log_p * log_p:.1f}.")
        holds = False
    if not 2.0 / p <= tbar / p <= c / math.sqrt(p):
        logger.debug(f"tbar/p={tbar / p:.3f} outside [2/p, c/sqrt(p)] = [{2.0 / p:.3f}, {c / math.sqrt(p):.3f}].")
        holds = False
    return holds


def sample_training_coefficients(
    p: int,
    q: int,
    tbar: float,
    seed: int,
    node_id: Optional[int] = None,
    distribution: str = "rademacher",
) -> DenseMatrix:
    """
    Samples the coefficient matrix Z (p x q) of the teacher's easy problems.

    Z is restricted Bernoulli-Subgaussian with rate ``tbar / (2p)``, so each
    column has expected sparsity ``tbar / 2``.

    Args:
        p (int): Number of dictionary columns.
        q (int): Number of samples.
        tbar (float): Easy-class sparsity.
        seed (int): Experiment seed.
        node_id (Optional[int]): Tree node, used to split the random stream.
        distribution (str): Restricted law, ``rademacher`` by default.

    Returns:
        DenseMatrix: The p x q coefficient matrix.

    Raises:
        ParameterError: If ``tbar > 2p`` or ``tbar <= 0``.
    """
    if p <= 0 or tbar <= 0:
        raise ParameterError(f"p and tbar must be positive, got p={p}, tbar={tbar}.")
    if tbar > 2 * p:
        raise ParameterError(f"tbar={tbar} exceeds 2p={2 * p}; the Bernoulli rate would exceed 1.")
    check_sample_size_assumption(p, q, tbar)
    params = BernoulliSubgaussianParams(theta=tbar / (2.0 * p), distribution=distribution, restricted=True)
    rng = make_rng(seed, node_id=node_id, purpose="samples")
    return sample_bernoulli_subgaussian(p, q, params, seed, rng=rng)
