"""
Writers for matrices, SAT instances, tree manifests and reports.

Matrices go to CSV with a ``rows,cols`` header line and ``.17g`` values, so
reading a file back gives the exact same floats.
"""
import csv
import json
import logging
import os
from typing import Any, Dict, List, Mapping, Optional

import numpy as np

from src.core.model import ArrayLike, as_dense_matrix
from src.sat.instance import SatInstance
from src.student.view import StudentView
from src.teacher.samples import TrainingSet
from src.teacher.tree import CurriculumTree
from utils.logger import get_logger

logger = get_logger("load", log_level=logging.DEBUG)

TEACHER_MANIFEST: str = "tree.teacher.json"
STUDENT_MANIFEST: str = "tree.student.json"


def _ensure_parent(path: str) -> None:
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)


def write_matrix_csv(matrix: ArrayLike, path: str) -> None:
    """
    Writes a matrix as CSV; a 1-D input is stored as a column vector.

    Args:
        matrix (ArrayLike): Values to write.
        path (str): Target file; parent directories are created.
    """
    values = np.asarray(matrix, dtype=float)
    if values.ndim == 1:
        values = values.reshape(-1, 1)
    values = as_dense_matrix(values)
    try:
        _ensure_parent(path)
        with open(path, "w", newline="", encoding="utf-8") as csv_file:
            writer = csv.writer(csv_file)
            writer.writerow([values.shape[0], values.shape[1]])
            for row in values:
                writer.writerow([format(v, ".17g") for v in row])
    except OSError as e:
        logger.error(f"Failed to write matrix {values.shape} to {path}: {e}")
        raise
    logger.debug(f"Matrix {values.shape} written: {path}")


def write_json(data: Dict[str, Any], path: str) -> None:
    try:
        _ensure_parent(path)
        with open(path, "w", encoding="utf-8") as json_file:
            json.dump(data, json_file, indent=2, sort_keys=True)
            json_file.write("\n")
    except (OSError, TypeError) as e:
        logger.error(f"Failed to write JSON to {path}: {e}")
        raise
    logger.info(f"JSON file written: {path}")


def write_dimacs(inst: SatInstance, path: str, comment: Optional[str] = None) -> None:
    """Writes ``p 1in3 <vars> <clauses>`` followed by one ``0``-terminated clause per line."""
    try:
        _ensure_parent(path)
        with open(path, "w", encoding="utf-8") as cnf_file:
            if comment:
                for line in comment.splitlines():
                    cnf_file.write(f"c {line}\n")
            cnf_file.write(f"p 1in3 {inst.n_vars} {inst.n_clauses}\n")
            for clause in inst.to_signed():
                cnf_file.write(" ".join(str(lit) for lit in clause) + " 0\n")
    except OSError as e:
        logger.error(f"Failed to write SAT instance to {path}: {e}")
        raise
    logger.info(f"SAT instance written: {path} ({inst.n_vars} vars, {inst.n_clauses} clauses)")


def write_tree(tree: CurriculumTree, out_dir: str, training_sets: Optional[Mapping[int, TrainingSet]] = None) -> str:
    """
    Writes a teacher tree: ``tree.teacher.json`` plus one CSV per matrix.

    Args:
        tree (CurriculumTree): Tree to persist.
        out_dir (str): Output directory.
        training_sets (Optional[Mapping[int, TrainingSet]]): When given, the
            teacher-side coefficients are stored as ``Z_<id>.csv``.

    Returns:
        str: Path of the manifest.
    """
    try:
        os.makedirs(out_dir, exist_ok=True)
        files = {"A": "A.csv", "X_full": "X_full.csv", "Z_full": "Z_full.csv", "x": "x.csv", "T": "T.csv", "D": "D.csv"}
        write_matrix_csv(tree.A, os.path.join(out_dir, files["A"]))
        write_matrix_csv(tree.X_full, os.path.join(out_dir, files["X_full"]))
        write_matrix_csv(tree.Z_full, os.path.join(out_dir, files["Z_full"]))
        write_matrix_csv(tree.x.to_dense(), os.path.join(out_dir, files["x"]))
        write_matrix_csv(tree.T, os.path.join(out_dir, files["T"]))
        write_matrix_csv(tree.D, os.path.join(out_dir, files["D"]))

        nodes: List[Dict[str, Any]] = []
        for node in tree.nodes:
            entry = {
                "id": node.id,
                "children": list(node.children),
                "K_set": list(node.K_set),
                "s_i": node.s_i,
                "depth": node.depth,
                "p": node.p,
                "X": f"X_{node.id}.csv",
                "W": f"W_{node.id}.csv",
            }
            write_matrix_csv(node.X_true, os.path.join(out_dir, entry["X"]))
            write_matrix_csv(node.W, os.path.join(out_dir, entry["W"]))
            if training_sets and node.id in training_sets and training_sets[node.id].Z_true is not None:
                samples = training_sets[node.id]
                entry["Z"] = f"Z_{node.id}.csv"
                entry["q"] = samples.q
                entry["seed"] = samples.seed
                write_matrix_csv(samples.Z_true, os.path.join(out_dir, entry["Z"]))
            nodes.append(entry)

        manifest = {
            "kind": "teacher",
            "variant": tree.variant,
            "dims": {"m": int(tree.A.shape[0]), "n": int(tree.A.shape[1]), "p_total": int(tree.X_full.shape[1])},
            "t": tree.t,
            "tbar": tree.tbar,
            "gamma": tree.gamma,
            "root_id": tree.root_id,
            "block_columns": tree.block_columns,
            "partition_J": [list(map(int, block)) for block in tree.partition_J],
            "partition_K": [list(map(int, block)) for block in tree.partition_K],
            "premise": tree.premise,
            "files": files,
            "nodes": nodes,
        }
        path = os.path.join(out_dir, TEACHER_MANIFEST)
        write_json(manifest, path)
    except Exception as e:
        logger.error(f"Writing teacher tree to {out_dir} failed: {e}")
        raise
    logger.info(f"Teacher tree with {len(tree.nodes)} nodes written to {out_dir}")
    return path


def write_student_view(view: StudentView, out_dir: str) -> str:
    """Writes ``tree.student.json`` with ``A.csv``, ``B_<id>.csv`` and, for leaves with given solutions, ``Y_<id>.csv``."""
    try:
        os.makedirs(out_dir, exist_ok=True)
        write_matrix_csv(view.A, os.path.join(out_dir, "A.csv"))
        nodes = []
        for node_id in sorted(view.nodes):
            node = view.nodes[node_id]
            entry = {
                "id": node.id,
                "children": list(node.children),
                "p": node.p,
                "depth": node.depth,
                "B": f"B_{node.id}.csv",
                "Y": None,
            }
            write_matrix_csv(node.B, os.path.join(out_dir, entry["B"]))
            if node.Y_given is not None:
                entry["Y"] = f"Y_{node.id}.csv"
                write_matrix_csv(node.Y_given, os.path.join(out_dir, entry["Y"]))
            nodes.append(entry)
        path = os.path.join(out_dir, STUDENT_MANIFEST)
        write_json({"kind": "student", "A": "A.csv", "root_id": view.root_id, "nodes": nodes}, path)
    except Exception as e:
        logger.error(f"Writing student view to {out_dir} failed: {e}")
        raise
    return path


def write_report_csv(rows: List[Dict[str, Any]], path: str) -> None:
    """Writes report rows as a CSV table with the keys of the first row as header."""
    if not rows:
        logger.warning(f"No report rows available to write to {path}.")
        return
    fieldnames = list(rows[0].keys())
    try:
        _ensure_parent(path)
        with open(path, "w", newline="", encoding="utf-8") as csv_file:
            writer = csv.DictWriter(csv_file, fieldnames=fieldnames, quoting=csv.QUOTE_MINIMAL)
            writer.writeheader()
            writer.writerows(rows)
    except OSError as e:
        logger.error(f"Failed to write report table to {path}: {e}")
        raise
    logger.info(f"CSV file written: {path}")
