"""Tests for 1-in-3-SAT instances and their reduction to sparse solutions of a linear system."""
import csv

import numpy as np
import pytest

from data.generate_sat_instances import generate_instances
from src.core.model import SparseVector
from src.errors import ParameterError
from src.extract.extract import read_dimacs
from src.sat.instance import (
    Literal,
    SatInstance,
    check_1in3_assignment,
    encode_assignment,
    planted_1in3_instance,
    random_1in3_instance,
    satisfiable_by_enumeration,
)
from src.sat.reduction import (
    assignment_solution,
    is_global_l0_by_identity_block,
    reduce_1in3sat,
    solution_to_assignment,
    solve_by_reduction,
)
from utils.logger import get_logger

logger = get_logger("test_sat")


@pytest.fixture
def contradiction() -> SatInstance:
    """Exactly one of x1, x2, x3 true and exactly one false: unsatisfiable."""
    return SatInstance.from_signed(3, [[1, 2, 3], [-1, -2, -3]])


def test_literal_signed_round_trip() -> None:
    """Signed 1-based integers map to 0-based (var, negated) pairs and back."""
    assert Literal.from_signed(-2) == Literal(1, True)
    assert Literal(0, False).to_signed() == 1
    with pytest.raises(ParameterError):
        Literal.from_signed(0)


def test_sat_instance_validates_clauses() -> None:
    """Clauses must have three literals over three distinct existing variables."""
    with pytest.raises(ParameterError):
        SatInstance.from_signed(2, [[1, 2, 3]])
    with pytest.raises(ParameterError):
        SatInstance.from_signed(3, [[1, 2]])
    with pytest.raises(ParameterError):
        SatInstance.from_signed(3, [[1, 1, 2]])
    with pytest.raises(ParameterError):
        SatInstance.from_signed(3, [[1, -1, 2]])


def test_check_1in3_assignment_examples() -> None:
    """Exactly one true literal per clause is required; a wrong length is an error."""
    inst = SatInstance.from_signed(3, [[1, -2, 3]])
    assert check_1in3_assignment(inst, [True, True, False])
    assert not check_1in3_assignment(inst, [True, False, False])
    assert check_1in3_assignment(SatInstance(n_vars=2), [False, True]), "No clauses is vacuously true."
    with pytest.raises(ParameterError):
        check_1in3_assignment(inst, [True])


def test_enumeration_detects_unsatisfiable(contradiction: SatInstance) -> None:
    """The contradiction has no satisfying assignment."""
    assert satisfiable_by_enumeration(contradiction) is None


def test_reduce_1in3sat_layout() -> None:
    """Clause rows mark positive literals in the y block and negated ones in the z block."""
    problem = reduce_1in3sat(SatInstance.from_signed(3, [[1, -2, 3]]))
    assert problem.A.shape == (4, 6)
    assert np.array_equal(problem.A[0], [1.0, 0.0, 1.0, 0.0, 1.0, 0.0])
    assert np.array_equal(problem.A[1:, :3], np.eye(3))
    assert np.array_equal(problem.A[1:, 3:], np.eye(3))
    assert np.array_equal(problem.b, np.ones(4))


def test_encoded_assignment_solves_reduction() -> None:
    """A satisfying assignment encodes to an n-sparse solution that is globally l0-minimal."""
    inst, assignment = planted_1in3_instance(n_vars=6, n_clauses=5, seed=1)
    problem = assignment_solution(inst, assignment)
    x = problem.known_solution
    assert x.sparsity() == 6
    assert is_global_l0_by_identity_block(x, problem.b[inst.n_clauses:])
    assert solution_to_assignment(x, 6) == assignment


def test_solution_to_assignment_rejects_non_binary() -> None:
    """Fractional pairs do not decode and wrong dimensions are errors."""
    half = encode_assignment([True, False]).to_dense() * 0.5
    assert solution_to_assignment(SparseVector.from_dense(half, zero_tol=0.0), 2) is None
    with pytest.raises(ParameterError):
        solution_to_assignment(encode_assignment([True]), 2)


def test_solve_by_reduction_examples(contradiction: SatInstance) -> None:
    """Unsatisfiable instances give None; planted instances give a satisfying assignment."""
    assert solve_by_reduction(contradiction) is None
    inst, _ = planted_1in3_instance(n_vars=5, n_clauses=4, seed=7)
    found = solve_by_reduction(inst)
    assert found is not None and check_1in3_assignment(inst, found)


def test_random_instances_use_distinct_variables() -> None:
    """Each random clause mentions three different variables and a seed fixes the instance."""
    inst = random_1in3_instance(n_vars=5, n_clauses=20, seed=3)
    assert all(len({literal.var for literal in clause}) == 3 for clause in inst.clauses)
    assert inst.to_signed() == random_1in3_instance(n_vars=5, n_clauses=20, seed=3).to_signed()
    with pytest.raises(ParameterError):
        random_1in3_instance(n_vars=2, n_clauses=1, seed=0)


def test_planted_instances_are_satisfied() -> None:
    """The planted assignment satisfies its instance."""
    for seed in range(10):
        inst, assignment = planted_1in3_instance(n_vars=7, n_clauses=9, seed=seed)
        assert check_1in3_assignment(inst, assignment), f"seed {seed}"


@pytest.mark.slow
def test_reduction_agrees_with_enumeration() -> None:
    """On 100 small random instances, an n-sparse solution exists exactly when the instance is satisfiable."""
    rng = np.random.default_rng(2024)
    disagreements = []
    for k in range(100):
        n_vars = int(rng.integers(3, 7))
        n_clauses = int(rng.integers(1, 7))
        inst = random_1in3_instance(n_vars, n_clauses, seed=k)
        if (satisfiable_by_enumeration(inst) is None) != (solve_by_reduction(inst) is None):
            disagreements.append(k)
    assert not disagreements, f"Reduction disagrees with enumeration on instances {disagreements}"


def test_generate_instances_writes_index(tmp_path) -> None:
    """The batch script writes readable instances and marks planted ones satisfiable."""
    rows = generate_instances(str(tmp_path), count=4, n_vars=5, n_clauses=4, planted_rate=0.5, seed=11)
    assert [row["kind"] for row in rows] == ["planted", "planted", "random", "random"]
    assert all(row["satisfiable"] == "True" for row in rows[:2])
    with open(tmp_path / "index.csv", newline="", encoding="utf-8") as index_file:
        assert sum(1 for _ in csv.DictReader(index_file)) == 4
    assert read_dimacs(str(tmp_path / "instance_0000.cnf")).n_clauses == 4


def test_reduction_entries_are_binary() -> None:
    """Reductions of random instances only hold zeros and ones."""
    for seed in range(5):
        A = reduce_1in3sat(random_1in3_instance(n_vars=6, n_clauses=8, seed=seed)).A
        assert set(np.unique(A).tolist()) <= {0.0, 1.0}
