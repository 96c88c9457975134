"""Structural report of a constructed curriculum tree."""
import logging
from typing import Any, Dict, List

import numpy as np

from src.core.diagnostics import sparsity
from src.teacher.tree import CurriculumTree, canonical_coefficients
from src.verify.split_checks import check_split_independence
from utils.logger import get_logger

logger = get_logger("tree_checks", log_level=logging.DEBUG)


def verify_tree(tree: CurriculumTree) -> Dict[str, Any]:
    """
    Evaluates the construction identities of a tree.

    Returns:
        Dict[str, Any]: W isometry errors, root reconstruction error, Z properties,
        split independence, preconditioned orthonormality, sparsity bookkeeping
        and the stored premise report.
    """
    isometry: List[float] = []
    recombination: List[float] = []
    column_sparsity_ok = True
    bookkeeping_ok = True
    for node in tree.nodes:
        isometry.append(float(np.max(np.abs(node.W.T @ node.W - np.eye(node.p)), initial=0.0)))
        counts = [sparsity(node.X_true[:, j], 1e-12) for j in range(node.p)]
        column_sparsity_ok &= max(counts, default=0) <= node.s_i
        if node.children:
            stacked = np.hstack([tree.node(c).X_true for c in node.children])
            joined = stacked @ (np.vstack([np.eye(node.p)] * len(node.children)) / np.sqrt(len(node.children)))
            recombination.append(float(np.max(np.abs(joined - node.X_true), initial=0.0)))
            for child in node.children:
                bookkeeping_ok &= node.s_i * tree.tbar <= tree.node(child).s_i * tree.t

    root = tree.node(tree.root_id)
    z_star = canonical_coefficients(tree, tree.root_id)
    root_error = float(np.max(np.abs(root.X_true @ z_star - tree.x.to_dense()), initial=0.0))
    Z = tree.Z_full
    gram = Z.T @ Z
    projector = Z @ Z.T

    S = tree.X_full @ Z
    norms = np.linalg.norm(S, axis=0)
    TAS = tree.T @ tree.A @ (S / np.where(norms == 0.0, 1.0, norms))
    orthonormality = float(np.max(np.abs(TAS.T @ TAS - np.eye(S.shape[1])), initial=0.0))

    report = {
        "variant": tree.variant,
        "nodes": len(tree.nodes),
        "max_isometry_error": max(isometry),
        "max_recombination_error": max(recombination, default=0.0),
        "root_reconstruction_error": root_error,
        "z_gram_is_identity": bool(np.array_equal(gram, np.eye(gram.shape[0]))),
        "zzt_idempotent": bool(np.allclose(projector @ projector, projector, atol=0.0)),
        "split_independent": bool(check_split_independence(tree.A, S)),
        "preconditioned_orthonormality_error": orthonormality,
        "column_sparsity_within_bounds": bool(column_sparsity_ok),
        "sparsity_bookkeeping_holds": bool(bookkeeping_ok),
        "premise": tree.premise,
    }
    logger.info(f"Verified tree: isometry {report['max_isometry_error']:.1e}, root error {root_error:.1e}.")
    return report
