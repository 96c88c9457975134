"""
Student training: one node from solvable samples, and a whole tree leaf to root.

A node is trained by solving every sample, grading the solutions, stacking the
survivors and factorizing them into a dictionary of the node's width. Internal
nodes solve their samples with l1-with-prior over the concatenation of the
dictionaries learned for their children.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional

import numpy as np

from src.core.model import DenseMatrix, as_dense_matrix
from src.dictionary.factorization import FactorizationOptions, sparse_factor
from src.dictionary.scaling import DEFAULT_SNAP_THRESHOLD, scale_rip, scale_snap
from src.errors import CurriculumError, InsufficientDataError, ParameterError
from src.solvers.kernel import SolverOptions
from src.solvers.l0 import solve_l0_brute
from src.solvers.l1 import KernelL1Solver
from src.student.grader import grade
from src.student.view import StudentNode, StudentView
from utils.logger import get_logger

logger = get_logger("train", log_level=logging.DEBUG)

# solve(sample_index, b) -> x, or None when the solver gives up.
Solve = Callable[[int, np.ndarray], Optional[np.ndarray]]

LEAF_SOLVERS = ("brute", "given", "l1")
SCALES = ("snap", "rip")


@dataclass
class NodeTrainingReport:
    node_id: int
    q_attempted: int
    q_graded_ok: int
    X_learned: Optional[DenseMatrix] = None
    matched: Optional[bool] = None
    validate_fraction: float = 0.0
    status: str = "trained"
    error: Optional[str] = None
    fit_error: Optional[float] = None

    def to_dict(self) -> Dict[str, Any]:
        """JSON-ready fields; the learned matrix is reported by shape only."""
        return {
            "node_id": self.node_id,
            "q_attempted": self.q_attempted,
            "q_graded_ok": self.q_graded_ok,
            "validate_fraction": self.validate_fraction,
            "matched": self.matched,
            "status": self.status,
            "error": self.error,
            "fit_error": self.fit_error,
            "X_learned_shape": None if self.X_learned is None else list(self.X_learned.shape),
        }


@dataclass(frozen=True)
class SolverConfig:
    """Student-side solver and factorization settings shared by all nodes."""
    leaf_solver: str = "brute"
    brute_max_support: int = 4
    grader_tol: float = 1e-4
    scale: str = "snap"
    snap_threshold: float = DEFAULT_SNAP_THRESHOLD
    solver: SolverOptions = field(default_factory=SolverOptions)
    factorization: FactorizationOptions = field(default_factory=FactorizationOptions)

    def __post_init__(self) -> None:
        if self.leaf_solver not in LEAF_SOLVERS:
            raise ParameterError(f"Unknown leaf solver '{self.leaf_solver}', expected one of {LEAF_SOLVERS}.")
        if self.scale not in SCALES:
            raise ParameterError(f"Unknown scale '{self.scale}', expected one of {SCALES}.")


def train_node(
    A: DenseMatrix,
    samples: DenseMatrix,
    solve: Solve,
    p: int,
    scale: str,
    grader_tol: float,
    factor_opts: Optional[FactorizationOptions] = None,
    snap_threshold: float = DEFAULT_SNAP_THRESHOLD,
    node_id: int = 0,
) -> NodeTrainingReport:
    """
    Learns the dictionary of one node from its samples.

    Args:
        A (DenseMatrix): System matrix.
        samples (DenseMatrix): m x q right-hand sides, one per column.
        solve (Solve): Solver for a single sample; exceptions and None count as failures.
        p (int): Width of the node dictionary.
        scale (str): ``snap`` or ``rip``.
        grader_tol (float): Relative residual tolerance of the grader.
        factor_opts (Optional[FactorizationOptions]): Factorization controls.
        snap_threshold (float): Threshold of ``scale_snap``.
        node_id (int): Node id recorded in the report.

    Returns:
        NodeTrainingReport: Report with the scaled learned dictionary.

    Raises:
        InsufficientDataError: If fewer than p solutions pass the grader.
    """
    matrix = as_dense_matrix(A)
    B = as_dense_matrix(samples, rows=matrix.shape[0])
    q = B.shape[1]
    survivors: List[np.ndarray] = []
    for l in range(q):
        b = B[:, l]
        try:
            x = solve(l, b)
        except (CurriculumError, np.linalg.LinAlgError) as e:
            logger.debug(f"Node {node_id}: sample {l} solver failed: {e}")
            continue
        if x is not None and grade(matrix, x, b, grader_tol):
            survivors.append(np.asarray(x, dtype=float))

    if len(survivors) < p:
        e = InsufficientDataError(graded_ok=len(survivors), required=p, attempted=q)
        logger.error(f"Node {node_id}: {e}")
        raise e

    Y = np.column_stack(survivors)
    result = sparse_factor(Y, p, factor_opts)
    X = scale_snap(result.X_bar, snap_threshold) if scale == "snap" else scale_rip(result.X_bar, matrix)
    report = NodeTrainingReport(
        node_id=node_id,
        q_attempted=q,
        q_graded_ok=len(survivors),
        X_learned=X,
        validate_fraction=len(survivors) / q if q else 0.0,
        fit_error=result.fit_error,
    )
    logger.info(f"Node {node_id}: {report.q_graded_ok}/{q} samples graded ok, dictionary {X.shape}.")
    return report


def leaf_solve(A: DenseMatrix, node: StudentNode, config: SolverConfig) -> Solve:
    """Builds the leaf solver selected by ``config.leaf_solver``."""
    if config.leaf_solver == "given":
        if node.Y_given is None:
            raise ParameterError(f"Leaf {node.id} has no given solutions.")
        given = node.Y_given
        return lambda l, b: given[:, l]
    if config.leaf_solver == "l1":
        solver = KernelL1Solver(A, config.solver)
        return lambda l, b: solver.solve(b).to_dense()

    def brute(l: int, b: np.ndarray) -> Optional[np.ndarray]:
        x = solve_l0_brute(A, b, config.brute_max_support, relative=True)
        return None if x is None else x.to_dense()

    return brute


def prior_solve(A: DenseMatrix, X_child: DenseMatrix, config: SolverConfig) -> Solve:
    """l1-with-prior over the learned child dictionaries, returning ``x = X_child z``."""
    solver = KernelL1Solver(A @ X_child, config.solver)
    return lambda l, b: X_child @ solver.solve(b).to_dense()


def tree_train(view: StudentView, config: SolverConfig) -> Dict[int, NodeTrainingReport]:
    """
    Trains every node of a student view, children before parents.

    A node whose child did not train is reported as ``untrainable``; a node whose
    own training raises is reported as ``failed``. Traversal always continues.

    Returns:
        Dict[int, NodeTrainingReport]: Reports keyed by node id.
    """
    reports: Dict[int, NodeTrainingReport] = {}
    for node_id in view.post_order():
        node = view.nodes[node_id]
        q = node.B.shape[1]
        broken = [c for c in node.children if reports[c].status != "trained"]
        if broken:
            logger.warning(f"Node {node_id} is untrainable: children {broken} did not train.")
            reports[node_id] = NodeTrainingReport(
                node_id=node_id, q_attempted=q, q_graded_ok=0, status="untrainable",
                error=f"children {broken} not trained",
            )
            continue
        try:
            if node.is_leaf:
                solve = leaf_solve(view.A, node, config)
            else:
                X_child = np.hstack([reports[c].X_learned for c in node.children])
                solve = prior_solve(view.A, X_child, config)
            reports[node_id] = train_node(
                view.A, node.B, solve, node.p, config.scale, config.grader_tol,
                config.factorization, config.snap_threshold, node_id=node_id,
            )
        except CurriculumError as e:
            logger.error(f"Training node {node_id} failed: {e}")
            graded_ok = e.graded_ok if isinstance(e, InsufficientDataError) else 0
            reports[node_id] = NodeTrainingReport(
                node_id=node_id, q_attempted=q, q_graded_ok=graded_ok,
                validate_fraction=graded_ok / q if q else 0.0, status="failed", error=str(e),
            )
    return reports
