"""
Null space property checks.

``exact_small`` solves one linear program per support S (``|S| = t``) and sign
pattern sigma on S:

    minimize ||v_Sc||_1  s.t.  v = N w,  sigma * v_S >= 0,  sigma^T v_S = 1

The property of order t holds iff every optimum exceeds 1 (or the program is
infeasible). ``monte_carlo`` only searches for counterexamples.
"""
import itertools
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from src.core.model import DenseMatrix, as_dense_matrix
from src.core.rng import make_rng
from src.errors import BudgetExceededError, ParameterError
from src.solvers.kernel import kernel_basis
from utils.logger import get_logger

logger = get_logger("nsp", log_level=logging.DEBUG)

MODES = ("exact_small", "monte_carlo")
MAX_EXACT_KERNEL_DIM: int = 12
MAX_EXACT_COLUMNS: int = 20
STRICT_MARGIN: float = 1e-9


@dataclass
class NSPCertificate:
    """
    Evidence behind an NSP verdict.

    ``worst_ratio`` is the smallest ``||v_Sc||_1 / ||v_S||_1`` found; for
    ``monte_carlo`` a ``holds=True`` verdict only means no counterexample was found.
    """
    mode: str
    holds: bool
    cases_checked: int
    worst_ratio: float
    violating_vector: Optional[np.ndarray] = None
    note: str = ""


def _support_program(N: DenseMatrix, support: tuple, signs: np.ndarray):
    p, k = N.shape
    complement = [j for j in range(p) if j not in support]
    r = len(complement)
    N_S = N[list(support), :]
    N_C = N[complement, :]
    c = np.concatenate([np.zeros(k), np.ones(r)])
    rows = [np.hstack([-signs[:, None] * N_S, np.zeros((len(support), r))])]
    if r:
        rows.append(np.hstack([N_C, -np.eye(r)]))
        rows.append(np.hstack([-N_C, -np.eye(r)]))
    A_ub = np.vstack(rows)
    b_ub = np.zeros(A_ub.shape[0])
    A_eq = np.hstack([signs @ N_S, np.zeros(r)])[None, :]
    bounds = [(None, None)] * k + [(0, None)] * r
    return linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=[1.0], bounds=bounds, method="highs")


def nsp_check(
    M: DenseMatrix,
    t: int,
    mode: str = "exact_small",
    samples: int = 20_000,
    seed: int = 0,
    budget: int = 200_000,
) -> NSPCertificate:
    """
    Checks ``||v_S||_1 < ||v_Sc||_1`` for all ``0 != v in ker M`` and ``|S| <= t``.

    Args:
        M (DenseMatrix): m x p matrix.
        t (int): Order of the property.
        mode (str): ``exact_small`` or ``monte_carlo``.
        samples (int): Kernel directions drawn in ``monte_carlo`` mode.
        seed (int): Seed of the ``monte_carlo`` stream.
        budget (int): Largest number of linear programs in ``exact_small`` mode.

    Returns:
        NSPCertificate: Verdict and evidence.

    Raises:
        BudgetExceededError: If the exact check is too large.
    """
    if mode not in MODES:
        raise ParameterError(f"Unknown NSP mode '{mode}', expected one of {MODES}.")
    if t < 1:
        raise ParameterError(f"Order t must be >= 1, got {t}.")
    matrix = as_dense_matrix(M)
    N = kernel_basis(matrix)
    p, k = N.shape
    if k == 0:
        return NSPCertificate(mode=mode, holds=True, cases_checked=0, worst_ratio=float("inf"), note="trivial kernel")
    size = min(t, p)

    if mode == "monte_carlo":
        rng = make_rng(seed, purpose="monte_carlo")
        directions = N @ rng.standard_normal((k, samples))
        magnitudes = np.sort(np.abs(directions), axis=0)[::-1]
        head = magnitudes[:size].sum(axis=0)
        tail = magnitudes[size:].sum(axis=0)
        ratios = np.where(head > 0, tail / np.where(head > 0, head, 1.0), np.inf)
        worst = int(np.argmin(ratios))
        violated = bool(ratios[worst] <= 1.0 + STRICT_MARGIN)
        return NSPCertificate(
            mode=mode,
            holds=not violated,
            cases_checked=samples,
            worst_ratio=float(ratios[worst]),
            violating_vector=directions[:, worst].copy() if violated else None,
            note="counterexample found" if violated else "no counterexample found",
        )

    if k > MAX_EXACT_KERNEL_DIM or p > MAX_EXACT_COLUMNS:
        raise BudgetExceededError(f"Exact NSP check with kernel dimension {k} and {p} columns", k * p, MAX_EXACT_KERNEL_DIM * MAX_EXACT_COLUMNS)
    count = math.comb(p, size) * 2**size
    if count > budget:
        raise BudgetExceededError(f"Exact NSP check of order {t}", count, budget)

    worst_ratio = float("inf")
    witness = None
    for support in itertools.combinations(range(p), size):
        for pattern in itertools.product((1.0, -1.0), repeat=size):
            signs = np.array(pattern)
            result = _support_program(N, support, signs)
            if result.status != 0:
                continue
            if result.fun < worst_ratio:
                worst_ratio = float(result.fun)
                witness = N @ result.x[:k]
    holds = worst_ratio > 1.0 + STRICT_MARGIN
    logger.debug(f"Exact NSP order {t}: {count} programs, worst ratio {worst_ratio:.6f}.")
    return NSPCertificate(
        mode=mode,
        holds=holds,
        cases_checked=count,
        worst_ratio=worst_ratio,
        violating_vector=None if holds else witness,
        note="exact" if holds else "violating kernel vector found",
    )
