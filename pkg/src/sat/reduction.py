"""
Reduction of 1-in-3-SAT to sparse solutions of ``A x = 1``.

``A = [[C D], [I I]]``: row k of ``C`` (``D``) marks the positive (negated)
literals of clause k, and the identity rows force ``y_i + z_i = 1``. An
instance is satisfiable iff the system has an ``n_vars``-sparse solution.
"""
import logging
from typing import List, Optional, Sequence

import numpy as np

from src.core.model import ArrayLike, ProblemInstance, SparseVector, as_vector
from src.errors import ParameterError
from src.sat.instance import SatInstance, check_1in3_assignment, encode_assignment
from src.solvers.l0 import solve_l0_brute
from utils.logger import get_logger

logger = get_logger("reduction", log_level=logging.DEBUG)

ASSIGNMENT_ZERO_TOL: float = 1e-4


def reduce_1in3sat(inst: SatInstance) -> ProblemInstance:
    """
    Builds the (m + n) x 2n system of an instance with m clauses over n variables.

    Returns:
        ProblemInstance: ``A`` with entries in {0, 1} and ``b`` the all-ones vector.
    """
    n, m = inst.n_vars, inst.n_clauses
    A = np.zeros((m + n, 2 * n))
    for row, clause in enumerate(inst.clauses):
        for literal in clause:
            A[row, literal.var + (n if literal.negated else 0)] = 1.0
    A[m:, :n] = np.eye(n)
    A[m:, n:] = np.eye(n)
    return ProblemInstance(A=A, b=np.ones(m + n), labels={"n_vars": n, "n_clauses": m})


def solution_to_assignment(x: SparseVector, n_vars: int, zero_tol: float = ASSIGNMENT_ZERO_TOL) -> Optional[List[bool]]:
    """
    Reads an assignment off an ``n_vars``-sparse solution ``x = (y, z)``.

    Returns:
        Optional[List[bool]]: ``y`` as booleans if every pair holds exactly one 1 and one 0
        (within zero_tol), else None.
    """
    if x.dim != 2 * n_vars:
        raise ParameterError(f"Expected a vector of dimension {2 * n_vars}, got {x.dim}.")
    dense = x.to_dense()
    if int(np.count_nonzero(np.abs(dense) > zero_tol)) != n_vars:
        return None
    assignment = []
    for i in range(n_vars):
        y, z = dense[i], dense[i + n_vars]
        if abs(y - 1.0) <= zero_tol and abs(z) <= zero_tol:
            assignment.append(True)
        elif abs(y) <= zero_tol and abs(z - 1.0) <= zero_tol:
            assignment.append(False)
        else:
            return None
    return assignment


def is_global_l0_by_identity_block(x: SparseVector, b_lower: ArrayLike) -> bool:
    """True iff ``||x||_0 == ||b_lower||_0``, which certifies global l0 minimality for ``A = [[*], [I I]]``."""
    lower = as_vector(b_lower)
    return x.sparsity() == int(np.count_nonzero(np.abs(lower) > x.zero_tol))


def solve_by_reduction(inst: SatInstance) -> Optional[List[bool]]:
    """
    Decides an instance by searching an ``n_vars``-sparse solution of the reduced system.

    Returns:
        Optional[List[bool]]: A satisfying assignment, or None if the instance is unsatisfiable.
    """
    problem = reduce_1in3sat(inst)
    x = solve_l0_brute(problem.A, problem.b, max_support=inst.n_vars)
    if x is None:
        logger.debug(f"No {inst.n_vars}-sparse solution; instance is unsatisfiable.")
        return None
    assignment = solution_to_assignment(x, inst.n_vars)
    if assignment is None or not check_1in3_assignment(inst, assignment):
        logger.warning("Sparse solution did not decode to a satisfying assignment.")
        return None
    return assignment


def assignment_solution(inst: SatInstance, assignment: Sequence[bool]) -> ProblemInstance:
    """Reduced system with the encoded assignment attached as its known solution."""
    if not check_1in3_assignment(inst, assignment):
        raise ParameterError("Assignment does not satisfy the instance.")
    problem = reduce_1in3sat(inst)
    return ProblemInstance(A=problem.A, b=problem.b, known_solution=encode_assignment(assignment), labels=problem.labels)
