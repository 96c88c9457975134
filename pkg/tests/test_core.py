"""Tests for the shared domain types, the seeded streams, the samplers and the matrix diagnostics."""
import logging

import numpy as np
import pytest

from src.core.diagnostics import condition_number, numerical_rank, sparsity, stable_rank
from src.core.model import BernoulliSubgaussianParams, ProblemInstance, SparseVector, as_dense_matrix
from src.core.rng import make_rng
from src.core.sampling import (
    check_sample_size_assumption,
    sample_bernoulli_subgaussian,
    sample_training_coefficients,
)
from src.errors import DomainError, ParameterError
from utils.logger import get_logger

logger = get_logger("test_core")


def test_make_rng_same_stream_is_reproducible() -> None:
    """Two generators for the same (seed, node, purpose) produce identical draws."""
    first = make_rng(7, node_id=3, purpose="samples").random(5)
    second = make_rng(7, node_id=3, purpose="samples").random(5)
    assert np.array_equal(first, second), "Equal stream keys must give equal draws."


def test_make_rng_streams_are_split_by_node_and_purpose() -> None:
    """Different nodes or purposes of one seed never share a stream."""
    base = make_rng(7, node_id=1, purpose="samples").random(5)
    other_node = make_rng(7, node_id=2, purpose="samples").random(5)
    other_purpose = make_rng(7, node_id=1, purpose="dictionary").random(5)
    assert not np.array_equal(base, other_node), "Node ids must split the stream."
    assert not np.array_equal(base, other_purpose), "Purposes must split the stream."


def test_make_rng_rejects_bad_input() -> None:
    """Negative seeds and unknown purposes are parameter errors."""
    with pytest.raises(ParameterError):
        make_rng(-1)
    with pytest.raises(ParameterError):
        make_rng(0, purpose="unknown")


def test_sparse_vector_from_dense_drops_small_entries() -> None:
    """from_dense keeps strictly larger magnitudes and round-trips the kept values."""
    x = SparseVector.from_dense([0.0, 2.0, 1e-9, -3.0], zero_tol=1e-6)
    assert x.support == (1, 3)
    assert x.values == (2.0, -3.0)
    assert x.sparsity() == 2
    assert x.l1_norm() == 5.0
    assert np.array_equal(x.to_dense(), np.array([0.0, 2.0, 0.0, -3.0]))


def test_sparse_vector_rejects_broken_invariants() -> None:
    """Unsorted supports and stored values at or below zero_tol are rejected."""
    with pytest.raises(ParameterError):
        SparseVector(dim=4, support=(2, 1), values=(1.0, 1.0))
    with pytest.raises(ParameterError):
        SparseVector(dim=4, support=(1,), values=(1e-9,), zero_tol=1e-6)
    with pytest.raises(ParameterError):
        SparseVector(dim=2, support=(2,), values=(1.0,))


def test_as_dense_matrix_checks_shape_and_finiteness() -> None:
    """A 1-D input becomes one row; wrong shapes and NaNs are parameter errors."""
    assert as_dense_matrix([1.0, 2.0]).shape == (1, 2)
    with pytest.raises(ParameterError):
        as_dense_matrix([[1.0, 2.0]], rows=2)
    with pytest.raises(ParameterError):
        as_dense_matrix([[np.nan]])


def test_params_validate_restricted_models() -> None:
    """Restricted rademacher needs nu2 <= 1; restricted gaussian needs nu2 == 1; theta must lie in (0, 1]."""
    BernoulliSubgaussianParams(theta=0.5).validate()
    BernoulliSubgaussianParams(theta=0.5, nu2=2.0, distribution="gaussian", restricted=False).validate()
    with pytest.raises(ParameterError):
        BernoulliSubgaussianParams(theta=0.0).validate()
    with pytest.raises(ParameterError):
        BernoulliSubgaussianParams(theta=0.5, nu2=2.0, distribution="gaussian").validate()
    with pytest.raises(ParameterError):
        BernoulliSubgaussianParams(theta=0.5, nu2=4.0).validate()


def test_sample_bernoulli_subgaussian_is_seeded_and_ternary() -> None:
    """Rademacher entries lie in {-1, 0, 1} and a seed fixes the matrix."""
    params = BernoulliSubgaussianParams(theta=0.3)
    first = sample_bernoulli_subgaussian(20, 30, params, seed=4)
    second = sample_bernoulli_subgaussian(20, 30, params, seed=4)
    assert np.array_equal(first, second), "Equal seeds must give identical matrices."
    assert set(np.unique(first)).issubset({-1.0, 0.0, 1.0})
    dense = sample_bernoulli_subgaussian(10, 10, BernoulliSubgaussianParams(theta=1.0), seed=0)
    assert np.count_nonzero(dense) == 100, "theta = 1 with rademacher entries has no zeros."


def test_sample_training_coefficients_rate_and_errors() -> None:
    """Coefficient density is close to tbar / (2p); tbar > 2p is rejected."""
    Z = sample_training_coefficients(p=10, q=20000, tbar=4, seed=1, node_id=0)
    density = np.count_nonzero(Z) / Z.size
    assert abs(density - 0.2) < 0.01, f"Expected density 0.2, got {density:.4f}."
    with pytest.raises(ParameterError):
        sample_training_coefficients(p=2, q=10, tbar=5, seed=0)


def test_check_sample_size_assumption_warns_for_small_q(caplog: pytest.LogCaptureFixture) -> None:
    """q <= p^2 is reported as a warning and returns False."""
    with caplog.at_level(logging.WARNING):
        assert check_sample_size_assumption(p=10, q=50, tbar=2) is False
    assert any("does not exceed p^2" in record.message for record in caplog.records)


def test_stable_rank_examples() -> None:
    """Identity has stable rank n, a rank-one matrix 1, and the zero matrix is outside the domain."""
    assert stable_rank(np.eye(4)) == pytest.approx(4.0)
    assert stable_rank(np.outer([1.0, 2.0], [3.0, 4.0, 5.0])) == pytest.approx(1.0)
    with pytest.raises(DomainError):
        stable_rank(np.zeros((3, 3)))


def test_sparsity_rank_and_condition_number() -> None:
    """sparsity is strict in the tolerance; rank-deficient matrices have infinite condition number."""
    assert sparsity([0.0, 1e-7, 1.0], zero_tol=1e-7) == 1
    assert sparsity([0.0, 1e-7, 1.0]) == 2
    M = np.array([[1.0, 2.0], [2.0, 4.0]])
    assert numerical_rank(M) == 1
    assert condition_number(M) == float("inf")
    assert condition_number(np.diag([2.0, 1.0])) == pytest.approx(2.0)


def test_problem_instance_checks_known_solution() -> None:
    """A known solution that does not solve the system is rejected."""
    A = np.eye(2)
    ProblemInstance(A=A, b=[1.0, 0.0], known_solution=SparseVector.from_dense([1.0, 0.0]))
    with pytest.raises(ParameterError):
        ProblemInstance(A=A, b=[1.0, 1.0], known_solution=SparseVector.from_dense([1.0, 0.0]))
