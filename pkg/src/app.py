from dotenv import load_dotenv
load_dotenv()
import argparse
import logging
import os
import sys
import time
from dataclasses import replace
from datetime import datetime, timezone
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from utils.logger import get_logger
from src.core.diagnostics import numerical_rank
from src.dictionary.matching import match_up_to_signed_permutation
from src.dictionary.scaling import scale_snap
from src.errors import BudgetExceededError, ConfigError, CurriculumError
from src.experiment.config import ExperimentConfig, load_experiment_config
from src.experiment.report import ExperimentReport, NodeEvaluation, aggregate_by_depth
from src.extract.extract import read_dimacs, read_student_view, read_tree
from src.load.load import write_dimacs, write_json, write_matrix_csv, write_report_csv, write_student_view, write_tree
from src.sat.instance import SatInstance, satisfiable_by_enumeration
from src.sat.reduction import reduce_1in3sat, solve_by_reduction
from src.student.train import NodeTrainingReport, tree_train
from src.student.view import make_student_view
from src.teacher.bounds import binary_tree_node_count, tree_size_bound
from src.teacher.curricula import build_sat_curriculum
from src.teacher.samples import TrainingSet, emit_training_samples
from src.teacher.tree import CurriculumTree
from src.verify.nsp import nsp_check
from src.verify.rip import rip_constant_brute
from src.verify.split_checks import check_split_global_optimality
from src.verify.tree_checks import verify_tree

logger = get_logger("app", log_level=logging.DEBUG)

EXIT_OK: int = 0
EXIT_CONFIG: int = 2
EXIT_PARTIAL: int = 3
EXIT_FAILURE: int = 4


def build_tree(config: ExperimentConfig, seed: int, instance: Optional[SatInstance] = None) -> CurriculumTree:
    """Builds the configured curriculum; a SAT instance is decided by enumeration to obtain its solution."""
    assignment = None
    if instance is not None:
        assignment = satisfiable_by_enumeration(instance)
        if assignment is None:
            raise CurriculumError("The SAT instance is unsatisfiable; no curriculum can contain a solution.")
    return build_sat_curriculum(config.variant, config.dims, seed, instance, assignment, t=config.t)


def emit_all_samples(tree: CurriculumTree, q: int, seed: int) -> Dict[int, TrainingSet]:
    return {node.id: emit_training_samples(tree, node.id, q, seed) for node in tree.nodes}


def child_rank(tree: CurriculumTree, node_id: int) -> Tuple[int, int]:
    """
    Width and numerical rank of ``A X_child``.

    For an internal node ``X_child`` is the concatenation of its children's
    matrices; a leaf reports its own matrix.
    """
    node = tree.node(node_id)
    if node.children:
        X_child = np.hstack([tree.node(c).X_true for c in node.children])
    else:
        X_child = node.X_true
    return int(X_child.shape[1]), numerical_rank(tree.A @ X_child)


def evaluate_node(
    tree: CurriculumTree, report: NodeTrainingReport, config: ExperimentConfig, seed: int
) -> NodeEvaluation:
    """Matches a trained node against the teacher's matrix after applying the same Scale to both."""
    node = tree.node(report.node_id)
    p_child, rank = child_rank(tree, node.id)
    matched = False
    max_error = None
    if report.X_learned is not None:
        truth = scale_snap(node.X_true, config.snap_threshold) if config.scale == "snap" else node.X_true
        result = match_up_to_signed_permutation(report.X_learned, truth, config.match_tol)
        matched = bool(result)
        max_error = float(result.max_error)
    report.matched = matched
    return NodeEvaluation(
        seed=seed,
        node_id=node.id,
        depth=node.depth,
        p_child=p_child,
        rank=rank,
        q_samples=report.q_attempted,
        validate_fraction=round(report.validate_fraction, 6),
        matched=matched,
        status=report.status,
        max_error=max_error,
    )


def run_seed(config: ExperimentConfig, seed: int) -> Tuple[CurriculumTree, List[NodeEvaluation]]:
    """Teacher builds and samples, student trains, evaluator matches; for one seed."""
    tree = build_tree(config, seed)
    training_sets = emit_all_samples(tree, config.q_samples, seed)
    view = make_student_view(tree, training_sets, include_leaf_solutions=config.leaf_solver == "given")
    solver_config = config.solver_config()
    solver_config = replace(solver_config, factorization=replace(solver_config.factorization, seed=seed))
    reports = tree_train(view, solver_config)
    evaluations = [evaluate_node(tree, reports[node_id], config, seed) for node_id in sorted(reports)]
    logger.debug(f"Seed {seed}: matched nodes {[e.node_id for e in evaluations if e.matched]}")
    return tree, evaluations


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    """
    Runs the configured curriculum for every seed and aggregates the results by depth.

    A seed whose construction or training raises is recorded under ``failures``
    and the remaining seeds still run. Rows are built from the seeds that ran.

    Args:
        config (ExperimentConfig): Validated configuration.

    Returns:
        ExperimentReport: Depth rows, per-node evaluations, failures and metadata.
    """
    started = time.perf_counter()
    logger.info(f"Starting experiment '{config.label}' over seeds {config.seeds}...")
    report = ExperimentReport(label=config.label, variant=config.variant, seeds=list(config.seeds), config=config.to_dict())
    shape: Optional[Tuple[int, int]] = None
    for seed in config.seeds:
        try:
            tree, evaluations = run_seed(config, seed)
        except (CurriculumError, np.linalg.LinAlgError) as e:
            logger.warning(f"Seed {seed} failed: {e}")
            report.failures.append({"seed": seed, "error": str(e)})
            continue
        shape = shape or (int(tree.A.shape[0]), int(tree.A.shape[1]))
        report.nodes.extend(evaluations)

    if shape is not None:
        report.rows = aggregate_by_depth(report.nodes, *shape)
    report.metadata = {
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "wall_time_s": round(time.perf_counter() - started, 3),
        "seeds_failed": len(report.failures),
    }
    logger.info(f"Experiment '{config.label}' finished: {len(report.failures)} of {len(config.seeds)} seeds failed.")
    return report


def _seed(args: argparse.Namespace, config: ExperimentConfig) -> int:
    return args.seed if args.seed is not None else config.seeds[0]


def cmd_gen_tree(args: argparse.Namespace) -> int:
    config = load_experiment_config(args.config, seed=args.seed)
    instance = read_dimacs(args.instance) if args.instance else None
    tree = build_tree(config, _seed(args, config), instance)
    path = write_tree(tree, args.out)
    print(f"Teacher tree written to {path}")
    return EXIT_OK


def cmd_gen_samples(args: argparse.Namespace) -> int:
    config = load_experiment_config(args.config, seed=args.seed)
    seed = _seed(args, config)
    tree, _ = read_tree(args.tree)
    training_sets = emit_all_samples(tree, config.q_samples, seed)
    write_tree(tree, args.out, training_sets)
    view = make_student_view(tree, training_sets, include_leaf_solutions=config.leaf_solver == "given")
    path = write_student_view(view, args.out)
    print(f"Student view written to {path}")
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    config = load_experiment_config(args.config, seed=args.seed)
    seed = _seed(args, config)
    started = time.perf_counter()
    view = read_student_view(args.student)
    solver_config = config.solver_config()
    solver_config = replace(solver_config, factorization=replace(solver_config.factorization, seed=seed))
    reports = tree_train(view, solver_config)
    for node_id, node_report in reports.items():
        if node_report.X_learned is not None:
            write_matrix_csv(node_report.X_learned, os.path.join(args.out, f"X_learned_{node_id}.csv"))
    rows = [reports[node_id].to_dict() for node_id in sorted(reports)]
    if args.format == "csv":
        write_report_csv(rows, os.path.join(args.out, "report.csv"))
    else:
        write_json(
            {
                "nodes": rows,
                "metadata": {
                    "seed": seed,
                    "grader_tol": config.grader_tol,
                    "match_tol": config.match_tol,
                    "wall_time_s": round(time.perf_counter() - started, 3),
                    "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
                },
            },
            os.path.join(args.out, "report.json"),
        )
    trained = sum(1 for r in reports.values() if r.status == "trained")
    print(f"Trained {trained}/{len(reports)} nodes; report written to {args.out}")
    return EXIT_OK if trained == len(reports) else EXIT_PARTIAL


def cmd_verify(args: argparse.Namespace) -> int:
    tree, _ = read_tree(args.tree)
    result = verify_tree(tree)
    S = tree.X_full @ tree.Z_full
    try:
        result["split_globally_optimal"] = check_split_global_optimality(tree.A, S)
    except BudgetExceededError as e:
        logger.warning(f"Skipping split optimality check: {e}")
        result["split_globally_optimal"] = None
    if args.order:
        root = tree.node(tree.root_id).X_true
        M = tree.A @ root
        norms = np.linalg.norm(M, axis=0)
        M = M / np.where(norms == 0.0, 1.0, norms)
        try:
            result["root_rip_constant"] = rip_constant_brute(M, args.order)
        except BudgetExceededError as e:
            logger.warning(f"Skipping RIP constant: {e}")
            result["root_rip_constant"] = None
        certificate = nsp_check(M, args.order, mode="monte_carlo", seed=args.seed or 0)
        result["root_nsp"] = {"holds": certificate.holds, "worst_ratio": certificate.worst_ratio, "note": certificate.note}
    write_json(result, os.path.join(args.out, "verify.json"))
    print(f"Verification report written to {os.path.join(args.out, 'verify.json')}")
    return EXIT_OK


def cmd_sat_reduce(args: argparse.Namespace) -> int:
    inst = read_dimacs(args.instance)
    problem = reduce_1in3sat(inst)
    write_matrix_csv(problem.A, os.path.join(args.out, "A.csv"))
    write_matrix_csv(problem.b, os.path.join(args.out, "b.csv"))
    write_json({"n_vars": inst.n_vars, "n_clauses": inst.n_clauses, "labels": problem.labels}, os.path.join(args.out, "reduction.json"))
    print(f"Reduced system {problem.A.shape} written to {args.out}")
    return EXIT_OK


def cmd_sat_solve(args: argparse.Namespace) -> int:
    inst = read_dimacs(args.instance)
    by_reduction = solve_by_reduction(inst)
    by_enumeration = satisfiable_by_enumeration(inst)
    result = {
        "satisfiable": by_reduction is not None,
        "assignment": by_reduction,
        "agrees_with_enumeration": (by_reduction is None) == (by_enumeration is None),
    }
    write_json(result, os.path.join(args.out, "solution.json"))
    print("SATISFIABLE" if result["satisfiable"] else "UNSATISFIABLE")
    return EXIT_OK if result["agrees_with_enumeration"] else EXIT_FAILURE


def cmd_experiment(args: argparse.Namespace) -> int:
    config = load_experiment_config(args.config, seed=args.seed)
    report = run_experiment(config)
    if args.format == "csv":
        write_report_csv([row.to_dict() for row in report.rows], os.path.join(args.out, "report.csv"))
    else:
        write_json(report.to_dict(), os.path.join(args.out, "report.json"))
    if not report.rows:
        print("Experiment failed for every seed.")
        return EXIT_FAILURE
    for row in report.rows:
        print(f"depth {row.depth}: rank {row.rank:.2f}, validate {row.validate_fraction:.2f}, recovered {row.recovered_tally}")
    return EXIT_PARTIAL if report.partial else EXIT_OK


def cmd_bound(args: argparse.Namespace) -> int:
    bound = tree_size_bound(args.s0, args.gamma, args.c, args.t, args.tbar)
    line = f"node-count bound: {bound}"
    if args.depth is not None:
        line += f" (binary tree of depth {args.depth} has {binary_tree_node_count(args.depth)} nodes)"
    print(line)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="sparse-curriculum", description="Curricula for sparse linear systems.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", default=None, help="Experiment config (default $CURRICULUM_CONFIG or utils/config.json).")
    common.add_argument("--seed", type=int, default=None, help="Overrides the seed list of the config.")
    common.add_argument("--out", default=os.getenv("CURRICULUM_OUT_DIR", "output"), help="Output directory.")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    sub = parser.add_subparsers(dest="command", required=True)

    gen_tree = sub.add_parser("gen-tree", parents=[common], help="Build a teacher tree.")
    gen_tree.add_argument("--instance", default=None, help="1-in-3-SAT instance backing the curriculum.")
    gen_tree.set_defaults(handler=cmd_gen_tree)

    gen_samples = sub.add_parser("gen-samples", parents=[common], help="Emit samples and a student view.")
    gen_samples.add_argument("--tree", required=True, help="Path of tree.teacher.json.")
    gen_samples.set_defaults(handler=cmd_gen_samples)

    train = sub.add_parser("train", parents=[common], help="Train a student view leaf to root.")
    train.add_argument("--student", required=True, help="Path of tree.student.json.")
    train.set_defaults(handler=cmd_train)

    verify = sub.add_parser("verify", parents=[common], help="Check the construction identities of a tree.")
    verify.add_argument("--tree", required=True, help="Path of tree.teacher.json.")
    verify.add_argument("--order", type=int, default=None, help="Also report RIP and NSP of the root of this order.")
    verify.set_defaults(handler=cmd_verify)

    sat_reduce = sub.add_parser("sat-reduce", parents=[common], help="Write the linear system of a SAT instance.")
    sat_reduce.add_argument("--instance", required=True)
    sat_reduce.set_defaults(handler=cmd_sat_reduce)

    sat_solve = sub.add_parser("sat-solve", parents=[common], help="Decide a SAT instance through its reduction.")
    sat_solve.add_argument("--instance", required=True)
    sat_solve.set_defaults(handler=cmd_sat_solve)

    experiment = sub.add_parser("experiment", parents=[common], help="Run all seeds and aggregate by depth.")
    experiment.set_defaults(handler=cmd_experiment)

    bound = sub.add_parser("bound", help="Evaluate the node-count bound of a learnable tree.")
    bound.add_argument("--s0", type=int, required=True)
    bound.add_argument("--gamma", type=int, default=2)
    bound.add_argument("--c", type=float, default=1.0)
    bound.add_argument("--t", type=int, required=True)
    bound.add_argument("--tbar", type=int, required=True)
    bound.add_argument("--depth", type=int, default=None)
    bound.set_defaults(handler=cmd_bound)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        print(f"Configuration error: {e}")
        return EXIT_CONFIG
    except Exception as e:
        logger.error(f"Command '{args.command}' failed: {e}")
        print(f"Command '{args.command}' failed: {e}")
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
