"""
What the student is allowed to see: the system matrix, the tree shape, the
per-node right-hand sides and, optionally, the leaf solutions the teacher
hands out. Teacher matrices (X_true, Z_true, T, D) never enter a view.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Tuple

from src.core.model import DenseMatrix
from src.errors import ParameterError
from src.teacher.samples import TrainingSet
from src.teacher.tree import CurriculumTree


@dataclass
class StudentNode:
    id: int
    children: Tuple[int, ...]
    p: int
    depth: int
    B: DenseMatrix
    Y_given: Optional[DenseMatrix] = None

    @property
    def is_leaf(self) -> bool:
        return not self.children


@dataclass
class StudentView:
    A: DenseMatrix
    nodes: Dict[int, StudentNode] = field(default_factory=dict)
    root_id: int = 0

    def post_order(self) -> List[int]:
        order: List[int] = []

        def visit(node_id: int) -> None:
            for child in self.nodes[node_id].children:
                visit(child)
            order.append(node_id)

        visit(self.root_id)
        return order


def make_student_view(
    tree: CurriculumTree,
    training_sets: Mapping[int, TrainingSet],
    include_leaf_solutions: bool = True,
) -> StudentView:
    """
    Copies the student-visible part of a tree.

    Args:
        tree (CurriculumTree): Teacher tree.
        training_sets (Mapping[int, TrainingSet]): Samples for every node.
        include_leaf_solutions (bool): Publish ``X_true Z_true`` for the leaves.

    Returns:
        StudentView: A view holding no teacher matrices.

    Raises:
        ParameterError: If a node has no training set.
    """
    view = StudentView(A=tree.A.copy(), root_id=tree.root_id)
    for node in tree.nodes:
        if node.id not in training_sets:
            raise ParameterError(f"No training set for node {node.id}.")
        samples = training_sets[node.id]
        given = None
        if include_leaf_solutions and node.is_leaf and samples.Z_true is not None:
            given = node.X_true @ samples.Z_true
        view.nodes[node.id] = StudentNode(
            id=node.id,
            children=node.children,
            p=node.p,
            depth=node.depth,
            B=samples.B.copy(),
            Y_given=given,
        )
    return view
