"""Tests for splits, class matrices, curriculum trees, the SAT-model curricula, sample emission and the size bound."""
import numpy as np
import pytest

from src.core.diagnostics import condition_number
from src.core.model import BernoulliSubgaussianParams, SparseVector
from src.errors import ConstructionError, DomainError, ParameterError, PartitionError, RankDeficiencyError
from src.sat.instance import planted_1in3_instance
from src.sat.reduction import is_global_l0_by_identity_block
from src.teacher.bounds import binary_tree_node_count, tree_size_bound
from src.teacher.class_matrix import build_class_matrix, orthogonalizing_preconditioner
from src.teacher.curricula import CurriculumDims, build_sat_curriculum, paired_layout
from src.teacher.samples import emit_training_samples, keep_one_per_block_column
from src.teacher.split import balanced_partition, split_support, validate_partition
from src.teacher.tree import build_curriculum_tree, canonical_coefficients
from utils.logger import get_logger

logger = get_logger("test_teacher")

PARAMS = BernoulliSubgaussianParams(theta=0.5)


@pytest.fixture
def planted_system():
    """A 12 x 20 gaussian system with a 6-sparse designated solution."""
    rng = np.random.default_rng(21)
    A = rng.standard_normal((12, 20))
    dense = np.zeros(20)
    dense[[1, 4, 7, 9, 13, 18]] = [1.0, -2.0, 0.5, 1.5, -1.0, 3.0]
    return A, SparseVector.from_dense(dense, zero_tol=0.0)


def test_balanced_partition_last_block_absorbs_remainder() -> None:
    """Seven indices in three blocks give sizes 2, 2, 3."""
    assert balanced_partition(range(7), 3) == [[0, 1], [2, 3], [4, 5, 6]]
    with pytest.raises(ParameterError):
        balanced_partition(range(2), 3)


def test_split_support_sums_to_solution(planted_system) -> None:
    """S @ 1 == x, with one block per column."""
    _, x = planted_system
    S = split_support(x, [[1, 4], [7, 9], [13, 18]])
    assert S.shape == (20, 3)
    assert np.array_equal(S.sum(axis=1), x.to_dense())


def test_split_support_rejects_bad_partitions(planted_system) -> None:
    """Uncovered support indices and overlapping blocks are partition errors."""
    _, x = planted_system
    with pytest.raises(PartitionError):
        split_support(x, [[1, 4], [7, 9]])
    with pytest.raises(PartitionError):
        validate_partition([[0, 1], [1, 2]], 5)
    with pytest.raises(PartitionError):
        validate_partition([[0, 7]], 5)


def test_orthogonalizing_preconditioner_properties() -> None:
    """T M has orthonormal columns and T keeps the condition number of M."""
    M = np.random.default_rng(3).standard_normal((7, 3))
    T = orthogonalizing_preconditioner(M)
    assert np.allclose((T @ M).T @ (T @ M), np.eye(3), atol=1e-10)
    assert condition_number(T) == pytest.approx(condition_number(M), rel=1e-8)
    with pytest.raises(RankDeficiencyError):
        orthogonalizing_preconditioner(np.ones((5, 2)))


def test_build_class_matrix_identities_over_seeds(planted_system) -> None:
    """Across 20 seeds: X (Z 1) = x, Z^T Z = I exactly and T A S_normalized is orthonormal."""
    A, x = planted_system
    partition_J = [[1, 4], [7, 9], [13, 18]]
    partition_K = [[0, 1, 2, 3], [4, 5, 6, 7], [8, 9, 10, 11]]
    S = split_support(x, partition_J)
    S_normalized = S / np.linalg.norm(S, axis=0)
    for seed in range(20):
        built = build_class_matrix(A, x, partition_J, partition_K, 12, PARAMS, seed)
        assert np.max(np.abs(built.X @ built.Z.sum(axis=1) - x.to_dense())) <= 1e-10, f"seed {seed}"
        assert np.array_equal(built.Z.T @ built.Z, np.eye(3)), f"seed {seed}"
        TAS = built.T @ A @ S_normalized
        assert np.max(np.abs(TAS.T @ TAS - np.eye(3))) <= 1e-9, f"seed {seed}"


def test_build_class_matrix_names_rank_deficient_block() -> None:
    """Two split columns with the same image under A make A S rank deficient at block 1."""
    A = np.array([[1.0, 1.0, 0.0], [0.0, 0.0, 1.0]])
    x = SparseVector.from_dense([1.0, 1.0, 0.0], zero_tol=0.0)
    with pytest.raises(ConstructionError) as info:
        build_class_matrix(A, x, [[0], [1]], [[0, 1], [2, 3]], 4, PARAMS, seed=0)
    assert info.value.block == 1


def test_build_curriculum_tree_structure(planted_system) -> None:
    """A depth-1 tree has three heap-ordered nodes and its root class contains x."""
    A, x = planted_system
    tree = build_curriculum_tree(A, x, L=1, per_leaf_p=4, t=4, params=PARAMS, seed=0)
    assert len(tree.nodes) == 3
    assert tree.post_order() == [1, 2, 0]
    root = tree.node(0)
    assert root.children == (1, 2)
    assert root.s_i == 2 * tree.node(1).s_i
    assert np.allclose(root.X_true @ canonical_coefficients(tree, 0), x.to_dense(), atol=1e-10)
    for node in tree.nodes:
        assert np.allclose(node.W.T @ node.W, np.eye(node.p), atol=1e-12)
    assert set(tree.premise) == {"min_block_stable_rank", "condition_AS", "required_stable_rank", "holds"}


def test_build_curriculum_tree_rejects_odd_t(planted_system) -> None:
    """Binary trees need t = 2 tbar."""
    A, x = planted_system
    with pytest.raises(ParameterError):
        build_curriculum_tree(A, x, L=1, per_leaf_p=4, t=3, params=PARAMS, seed=0)


def test_tree_size_bound_examples() -> None:
    """gamma = 2, c t / tbar = 2 gives the bound 2 s0; c t / tbar <= 1 is outside the domain."""
    assert tree_size_bound(s0=4, gamma=2, c=1.0, t=4, tbar=2) == 8
    with pytest.raises(DomainError):
        tree_size_bound(s0=4, gamma=2, c=0.5, t=4, tbar=2)


@pytest.mark.parametrize("depth", [1, 2, 3, 4])
def test_tree_size_bound_dominates_node_count(depth: int) -> None:
    """Every built binary tree has at most as many nodes as the bound allows."""
    rng = np.random.default_rng(depth)
    A = rng.standard_normal((24, 40))
    dense = np.zeros(40)
    dense[rng.choice(40, size=16, replace=False)] = 1.0 + rng.random(16)
    x = SparseVector.from_dense(dense, zero_tol=0.0)
    tree = build_curriculum_tree(A, x, L=depth, per_leaf_p=2, t=4, params=PARAMS, seed=depth)
    bound = tree_size_bound(tree.node(0).s_i, tree.gamma, 1.0, tree.t, tree.tbar)
    assert len(tree.nodes) == binary_tree_node_count(depth)
    assert bound >= len(tree.nodes), f"bound {bound} < {len(tree.nodes)} nodes at depth {depth}"


@pytest.fixture
def desk_dims() -> CurriculumDims:
    """The desk-scale dimensions of the shipped default config."""
    return CurriculumDims(m=24, n=32, per_leaf_p=14, depth=1)


def test_curriculum_i_places_solution_on_deterministic_columns(desk_dims: CurriculumDims) -> None:
    """Curriculum I: identity lower block, {0,1} solution and X_root z* = x."""
    tree = build_sat_curriculum("I", desk_dims, seed=0)
    assert tree.A.shape == (24, 32)
    assert np.array_equal(tree.A[8:, :16], np.eye(16)) and np.array_equal(tree.A[8:, 16:], np.eye(16))
    assert set(np.unique(tree.x.to_dense())).issubset({0.0, 1.0})
    root = tree.node(tree.root_id)
    assert np.allclose(root.X_true @ canonical_coefficients(tree, tree.root_id), tree.x.to_dense(), atol=1e-12)
    for leaf, rows in zip(tree.leaves(), tree.partition_J):
        assert np.array_equal(leaf.X_true[rows, 0], tree.x.to_dense()[rows])


def test_curriculum_ii_columns_hit_each_pair_once(desk_dims: CurriculumDims) -> None:
    """Every leaf column of Curriculum II has exactly one non-zero per covered pair."""
    tree = build_sat_curriculum("II", desk_dims, seed=1)
    pairs = 16
    layout = paired_layout(pairs, 2, 1)
    for l, leaf in enumerate(tree.leaves()):
        group = layout.groups[0][l]
        rows = layout.rows(group)
        outside = [r for r in range(32) if r not in rows]
        for j in range(leaf.p):
            column = leaf.X_true[:, j]
            assert not np.any(column[outside]), f"leaf {leaf.id} column {j} leaves its rows"
            for i in group:
                assert np.count_nonzero(column[[i, i + pairs]]) == 1


def test_sat_backed_curriculum_uses_reduction() -> None:
    """With an instance, A is its reduction and x encodes the planted assignment."""
    inst, assignment = planted_1in3_instance(n_vars=8, n_clauses=6, seed=2)
    dims = CurriculumDims(m=0, n=0, per_leaf_p=6, depth=1)
    tree = build_sat_curriculum("II", dims, seed=2, instance=inst, assignment=assignment)
    assert tree.A.shape == (14, 16)
    expected = np.array([1.0 if v else 0.0 for v in assignment] + [0.0 if v else 1.0 for v in assignment])
    assert np.array_equal(tree.x.to_dense(), expected)
    with pytest.raises(ParameterError):
        build_sat_curriculum("II", dims, seed=2, instance=inst, assignment=[not v for v in assignment])


def test_build_sat_curriculum_rejects_bad_input(desk_dims: CurriculumDims) -> None:
    """Unknown variants and odd n are parameter errors."""
    with pytest.raises(ParameterError):
        build_sat_curriculum("IV", desk_dims, seed=0)
    with pytest.raises(ParameterError):
        build_sat_curriculum("I", CurriculumDims(m=24, n=31, per_leaf_p=14), seed=0)


def test_emit_training_samples_is_seeded(desk_dims: CurriculumDims) -> None:
    """B = A X_true Z_true with shape m x q and a reproducible draw."""
    tree = build_sat_curriculum("I", desk_dims, seed=0)
    first = emit_training_samples(tree, 0, q=50, seed=3)
    second = emit_training_samples(tree, 0, q=50, seed=3)
    assert first.B.shape == (24, 50)
    assert np.allclose(first.B, tree.A @ tree.node(0).X_true @ first.Z_true)
    assert np.array_equal(first.B, second.B)
    assert len(first.b_list) == 50 and len(first.z_true_list) == 50


def test_curriculum_iii_samples_use_one_column_per_block_column() -> None:
    """Curriculum III samples have at most one non-zero coefficient per block column."""
    dims = CurriculumDims(m=24, n=32, per_leaf_p=12, depth=1, block_columns=3)
    tree = build_sat_curriculum("III", dims, seed=4)
    for node in tree.nodes:
        Z = emit_training_samples(tree, node.id, q=200, seed=4).Z_true
        width = node.p // 3
        for c in range(3):
            counts = np.count_nonzero(Z[c * width:(c + 1) * width, :], axis=0)
            assert counts.max() <= 1, f"node {node.id} block column {c}"


def test_curriculum_iii_with_one_block_column_keeps_one_coefficient() -> None:
    """With a single block column every Curriculum III sample uses at most one node column."""
    dims = CurriculumDims(m=24, n=32, per_leaf_p=12, depth=1, block_columns=1)
    tree = build_sat_curriculum("III", dims, seed=4)
    for node in tree.nodes:
        Z = emit_training_samples(tree, node.id, q=200, seed=4).Z_true
        assert np.count_nonzero(Z, axis=0).max() <= 1, f"node {node.id}"


def test_keep_one_per_block_column_covers_remainder_rows() -> None:
    """Seven rows in three block columns are grouped 2, 2, 3 and each group keeps one entry."""
    Z = np.ones((7, 20))
    thinned = keep_one_per_block_column(Z, 3, np.random.default_rng(0))
    for rows in balanced_partition(range(7), 3):
        assert np.all(np.count_nonzero(thinned[rows, :], axis=0) == 1), f"rows {rows}"
    assert np.all((thinned == 0.0) | (thinned == 1.0))


@pytest.mark.parametrize("block_columns", [1, 3])
def test_curriculum_iii_samples_are_globally_sparsest(block_columns: int) -> None:
    """Every Curriculum III sample solution has as many non-zeros as the identity-block part of b."""
    dims = CurriculumDims(m=24, n=32, per_leaf_p=12, depth=1, block_columns=block_columns)
    tree = build_sat_curriculum("III", dims, seed=6)
    pairs = tree.A.shape[1] // 2
    for node in tree.nodes:
        samples = emit_training_samples(tree, node.id, q=100, seed=6)
        for l in range(samples.q):
            x = SparseVector.from_dense(node.X_true @ samples.Z_true[:, l])
            assert is_global_l0_by_identity_block(x, samples.B[-pairs:, l]), f"node {node.id} sample {l}"
