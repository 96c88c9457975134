"""
Sparse factorization ``Y ~ X_bar Z_bar`` by l4-norm maximization over the orthogonal group.

The samples are whitened first; on whitened data the dictionary is an
orthogonal matrix up to scaling, and the rotation that makes the codes
sparsest maximizes ``||U Yw||_4^4``.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from src.core.diagnostics import RANK_REL_TOL
from src.core.model import DenseMatrix, as_dense_matrix
from src.core.rng import make_rng
from src.errors import DegenerateInputError, ParameterError, RankDeficiencyError
from utils.logger import get_logger

logger = get_logger("factorization", log_level=logging.DEBUG)


@dataclass(frozen=True)
class FactorizationOptions:
    iters: int = 300
    tol: float = 1e-10
    seed: int = 0
    fit_tol: float = 1e-6


@dataclass
class FactorizationResult:
    """Output of ``sparse_factor``; ``success`` is True when the relative fit is within ``fit_tol``."""
    X_bar: DenseMatrix
    Z_bar: DenseMatrix
    iterations: int
    objective_trace: List[float] = field(default_factory=list)
    fit_error: float = 0.0
    success: bool = True


def whiten(Y: DenseMatrix, p: int) -> Tuple[DenseMatrix, DenseMatrix]:
    """
    Whitens the rows of Y onto its top-p singular subspace.

    Only p of the n coordinates are whitened: student samples span the
    p-dimensional range of the node dictionary. No left preconditioner is involved.

    Args:
        Y (DenseMatrix): n x q sample matrix.
        p (int): Dictionary size.

    Returns:
        Tuple[DenseMatrix, DenseMatrix]: ``(Yw, Winv)`` with ``Yw Yw^T = q I`` (p x p)
        and ``Winv Yw`` the rank-p approximation of Y. When ``n == p`` the whitening
        is symmetric, so already-white input is returned unchanged.

    Raises:
        RankDeficiencyError: If the numerical rank of Y is below p.
    """
    samples = as_dense_matrix(Y)
    n, q = samples.shape
    if p < 1:
        raise ParameterError(f"Dictionary size p must be positive, got {p}.")
    U, sigma, Vt = np.linalg.svd(samples, full_matrices=False)
    rank = 0 if sigma.size == 0 or sigma[0] == 0.0 else int(np.count_nonzero(sigma > RANK_REL_TOL * sigma[0]))
    if rank < p:
        raise RankDeficiencyError("Sample matrix cannot be whitened", measured_rank=rank, expected_rank=p)

    root_q = math.sqrt(q)
    Up, sp, Vpt = U[:, :p], sigma[:p], Vt[:p, :]
    if n == p:
        Yw = root_q * (Up @ Vpt)
        Winv = (Up * sp) @ Up.T / root_q
    else:
        Yw = root_q * Vpt
        Winv = Up * sp / root_q
    return Yw, Winv


def random_orthogonal(p: int, seed: int) -> DenseMatrix:
    """Haar-distributed orthogonal matrix from the QR factorization of a gaussian matrix."""
    rng = make_rng(seed, purpose="dictionary")
    Q, R = np.linalg.qr(rng.standard_normal((p, p)))
    signs = np.sign(np.diag(R))
    signs[signs == 0] = 1.0
    return Q * signs


def l4_objective(U: DenseMatrix, Yw: DenseMatrix) -> float:
    return float(np.sum((U @ Yw) ** 4))


def polar_factor(G: DenseMatrix) -> DenseMatrix:
    """Orthogonal polar factor ``L R^T`` of ``G = L S R^T``."""
    if not np.any(G):
        raise DegenerateInputError("Polar factor of a zero matrix is undefined.")
    L, _, Rt = np.linalg.svd(G)
    return L @ Rt


def l4_maximize(
    Yw: DenseMatrix,
    iters: int,
    tol: float,
    seed: int,
    init: Optional[DenseMatrix] = None,
    objective_trace: Optional[List[float]] = None,
) -> DenseMatrix:
    """
    Runs the fixed-point iteration ``U <- Polar((U Yw)^3 Yw^T)``.

    Args:
        Yw (DenseMatrix): Whitened p x q samples.
        iters (int): Iteration budget.
        tol (float): Stop once ``||U_{k+1} - U_k||_F <= tol``.
        seed (int): Seed of the random orthogonal start.
        init (Optional[DenseMatrix]): Explicit start, used instead of the random one.
        objective_trace (Optional[List[float]]): Receives ``||U_k Yw||_4^4`` for every iterate.

    Returns:
        DenseMatrix: The orthogonal p x p matrix U.

    Raises:
        DegenerateInputError: If ``(U Yw)^3 Yw^T`` vanishes.
    """
    samples = as_dense_matrix(Yw)
    p = samples.shape[0]
    U = random_orthogonal(p, seed) if init is None else as_dense_matrix(init, rows=p, cols=p)
    trace = objective_trace if objective_trace is not None else []
    trace.append(l4_objective(U, samples))

    for _ in range(iters):
        U_next = polar_factor((U @ samples) ** 3 @ samples.T)
        step = float(np.linalg.norm(U_next - U))
        U = U_next
        trace.append(l4_objective(U, samples))
        if step <= tol:
            break
    return U


def sparse_factor(Y: DenseMatrix, p: int, opts: Optional[FactorizationOptions] = None) -> FactorizationResult:
    """
    Factorizes stacked solutions into a dictionary and sparse codes.

    Args:
        Y (DenseMatrix): n x q matrix of solutions.
        p (int): Dictionary size.
        opts (Optional[FactorizationOptions]): Iteration and fit controls.

    Returns:
        FactorizationResult: ``X_bar = Winv U^T`` (n x p) and ``Z_bar = U Yw`` (p x q).

    Raises:
        RankDeficiencyError: If Y has rank below p.
        DegenerateInputError: If the l4 iteration degenerates.
    """
    opts = opts if opts is not None else FactorizationOptions()
    samples = as_dense_matrix(Y)
    try:
        Yw, Winv = whiten(samples, p)
        trace: List[float] = []
        U = l4_maximize(Yw, opts.iters, opts.tol, opts.seed, objective_trace=trace)
    except (RankDeficiencyError, DegenerateInputError) as e:
        logger.error(f"Sparse factorization of a {samples.shape[0]}x{samples.shape[1]} sample matrix failed: {e}")
        raise

    X_bar = Winv @ U.T
    Z_bar = U @ Yw
    norm_y = float(np.linalg.norm(samples))
    fit_error = float(np.linalg.norm(samples - X_bar @ Z_bar)) / norm_y if norm_y > 0 else 0.0
    success = fit_error <= opts.fit_tol
    if not success:
        logger.warning(f"Factorization fit error {fit_error:.3e} exceeds fit_tol={opts.fit_tol:.1e}.")
    logger.debug(f"Factorized {samples.shape} into p={p} after {len(trace) - 1} iterations.")
    return FactorizationResult(
        X_bar=X_bar,
        Z_bar=Z_bar,
        iterations=len(trace) - 1,
        objective_trace=trace,
        fit_error=fit_error,
        success=success,
    )
