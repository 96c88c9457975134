import csv
import json
import logging
import os
from typing import Any, Dict, List, Tuple

import numpy as np

from src.core.model import DenseMatrix, SparseVector, as_dense_matrix
from src.errors import ParameterError
from src.sat.instance import SatInstance
from src.student.view import StudentNode, StudentView
from src.teacher.samples import TrainingSet
from src.teacher.tree import ClassNode, CurriculumTree
from utils.logger import get_logger

logger = get_logger("extract", log_level=logging.DEBUG)


def read_matrix_csv(path: str) -> DenseMatrix:
    """
    Reads a matrix written by ``write_matrix_csv``.

    Args:
        path (str): CSV file whose first line is ``rows,cols``.

    Returns:
        DenseMatrix: The matrix with the declared shape.

    Raises:
        FileNotFoundError: If the file does not exist.
        ParameterError: If the header or a row does not match the declared shape.
    """
    if not os.path.exists(path):
        logger.error(f"File not found: {path}")
        raise FileNotFoundError(f"Matrix file not found: {path}")
    try:
        with open(path, mode="r", newline="", encoding="utf-8") as csv_file:
            reader = csv.reader(csv_file)
            header = next(reader, None)
            if header is None or len(header) != 2:
                raise ParameterError(f"{path}: expected a 'rows,cols' header, got {header}")
            rows, cols = int(header[0]), int(header[1])
            body = list(reader)
        if len(body) != rows:
            raise ParameterError(f"{path}: header declares {rows} rows, found {len(body)}")
        if cols == 0:
            return np.zeros((rows, 0))
        for row_number, row in enumerate(body, start=1):
            if len(row) != cols:
                raise ParameterError(f"{path}: row {row_number} has {len(row)} values, expected {cols}")
        matrix = as_dense_matrix([[float(v) for v in row] for row in body], cols=cols) if rows else np.zeros((0, cols))
    except (ValueError, ParameterError) as e:
        logger.error(f"Reading matrix from {path} failed: {e}")
        raise ParameterError(str(e)) from e
    logger.debug(f"Read matrix {matrix.shape} from {path}")
    return matrix


def read_vector_csv(path: str) -> np.ndarray:
    return read_matrix_csv(path).reshape(-1)


def read_json(path: str) -> Dict[str, Any]:
    if not os.path.exists(path):
        logger.error(f"File not found: {path}")
        raise FileNotFoundError(f"JSON file not found: {path}")
    try:
        with open(path, "r", encoding="utf-8") as json_file:
            return json.load(json_file)
    except json.JSONDecodeError as e:
        logger.error(f"{path} is not valid JSON: {e}")
        raise


def read_dimacs(path: str) -> SatInstance:
    """
    Reads a 1-in-3-SAT instance in the ``p 1in3`` text format.

    Comment lines start with ``c``; every clause line holds three signed
    1-based literals followed by ``0``.

    Raises:
        FileNotFoundError: If the file does not exist.
        ParameterError: If the header is missing or a clause is malformed.
    """
    if not os.path.exists(path):
        logger.error(f"File not found: {path}")
        raise FileNotFoundError(f"SAT instance not found: {path}")
    n_vars = n_clauses = None
    clauses: List[List[int]] = []
    try:
        with open(path, "r", encoding="utf-8") as cnf_file:
            for line_number, line in enumerate(cnf_file, start=1):
                line = line.strip()
                if not line or line.startswith("c"):
                    continue
                if line.startswith("p"):
                    parts = line.split()
                    if len(parts) != 4 or parts[1] != "1in3":
                        raise ParameterError(f"line {line_number}: expected 'p 1in3 <vars> <clauses>', got '{line}'")
                    n_vars, n_clauses = int(parts[2]), int(parts[3])
                    continue
                if n_vars is None:
                    raise ParameterError(f"line {line_number}: clause before the 'p 1in3' header")
                literals = [int(token) for token in line.split()]
                if len(literals) != 4 or literals[-1] != 0:
                    raise ParameterError(f"line {line_number}: expected three literals and a terminating 0, got '{line}'")
                clauses.append(literals[:3])
        if n_vars is None:
            raise ParameterError("missing 'p 1in3' header")
        if len(clauses) != n_clauses:
            raise ParameterError(f"header declares {n_clauses} clauses, found {len(clauses)}")
        inst = SatInstance.from_signed(n_vars, clauses)
    except (ValueError, ParameterError) as e:
        logger.error(f"Reading SAT instance {path} failed: {e}")
        raise ParameterError(f"{path}: {e}") from e
    logger.info(f"Read SAT instance {path}: {inst.n_vars} vars, {inst.n_clauses} clauses")
    return inst


def read_tree(manifest_path: str) -> Tuple[CurriculumTree, Dict[int, TrainingSet]]:
    """
    Rebuilds a teacher tree from ``tree.teacher.json``.

    Returns:
        Tuple[CurriculumTree, Dict[int, TrainingSet]]: The tree and the stored
        sample coefficients (``B`` recomputed from ``A X Z``), keyed by node id.
    """
    base = os.path.dirname(manifest_path)
    try:
        manifest = read_json(manifest_path)
        if manifest.get("kind") != "teacher":
            raise ParameterError(f"{manifest_path} is not a teacher manifest")
        files = manifest["files"]
        A = read_matrix_csv(os.path.join(base, files["A"]))
        nodes: List[ClassNode] = []
        training_sets: Dict[int, TrainingSet] = {}
        for entry in sorted(manifest["nodes"], key=lambda item: item["id"]):
            node = ClassNode(
                id=int(entry["id"]),
                children=tuple(entry["children"]),
                K_set=tuple(entry["K_set"]),
                X_true=read_matrix_csv(os.path.join(base, entry["X"])),
                W=read_matrix_csv(os.path.join(base, entry["W"])),
                s_i=int(entry["s_i"]),
                depth=int(entry["depth"]),
            )
            nodes.append(node)
            if entry.get("Z"):
                Z = read_matrix_csv(os.path.join(base, entry["Z"]))
                training_sets[node.id] = TrainingSet(
                    node_id=node.id, B=A @ (node.X_true @ Z), q=int(entry["q"]), seed=int(entry["seed"]), Z_true=Z,
                )
        tree = CurriculumTree(
            nodes=nodes,
            A=A,
            x=SparseVector.from_dense(read_vector_csv(os.path.join(base, files["x"])), zero_tol=0.0),
            t=int(manifest["t"]),
            tbar=int(manifest["tbar"]),
            gamma=int(manifest["gamma"]),
            partition_J=[list(block) for block in manifest["partition_J"]],
            partition_K=[list(block) for block in manifest["partition_K"]],
            X_full=read_matrix_csv(os.path.join(base, files["X_full"])),
            Z_full=read_matrix_csv(os.path.join(base, files["Z_full"])),
            T=read_matrix_csv(os.path.join(base, files["T"])),
            D=read_vector_csv(os.path.join(base, files["D"])),
            root_id=int(manifest.get("root_id", 0)),
            variant=manifest.get("variant", "generic"),
            block_columns=int(manifest.get("block_columns", 1)),
            premise=manifest.get("premise", {}),
        )
    except KeyError as e:
        logger.error(f"Teacher manifest {manifest_path} misses field {e}")
        raise ParameterError(f"{manifest_path}: missing field {e}") from e
    except Exception as e:
        logger.error(f"Reading teacher tree {manifest_path} failed: {e}")
        raise
    logger.info(f"Read teacher tree with {len(tree.nodes)} nodes from {manifest_path}")
    return tree, training_sets


def read_student_view(manifest_path: str) -> StudentView:
    """Rebuilds a StudentView from ``tree.student.json``."""
    base = os.path.dirname(manifest_path)
    try:
        manifest = read_json(manifest_path)
        if manifest.get("kind") != "student":
            raise ParameterError(f"{manifest_path} is not a student manifest")
        view = StudentView(A=read_matrix_csv(os.path.join(base, manifest["A"])), root_id=int(manifest.get("root_id", 0)))
        for entry in manifest["nodes"]:
            view.nodes[int(entry["id"])] = StudentNode(
                id=int(entry["id"]),
                children=tuple(entry["children"]),
                p=int(entry["p"]),
                depth=int(entry["depth"]),
                B=read_matrix_csv(os.path.join(base, entry["B"])),
                Y_given=read_matrix_csv(os.path.join(base, entry["Y"])) if entry.get("Y") else None,
            )
    except KeyError as e:
        logger.error(f"Student manifest {manifest_path} misses field {e}")
        raise ParameterError(f"{manifest_path}: missing field {e}") from e
    except Exception as e:
        logger.error(f"Reading student view {manifest_path} failed: {e}")
        raise
    logger.info(f"Read student view with {len(view.nodes)} nodes from {manifest_path}")
    return view
