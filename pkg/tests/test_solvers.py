"""Tests for kernel bases, brute-force l0, kernel-subgradient l1, l1-with-prior and OMP."""
import numpy as np
import pytest
from scipy.optimize import linprog

from src.errors import InfeasibleSystemError, ParameterError
from src.solvers.kernel import SolverOptions, kernel_basis
from src.solvers.l0 import solve_l0_brute
from src.solvers.l1 import KernelL1Solver, solve_l1, solve_l1_prior
from src.solvers.omp import omp_prior
from utils.logger import get_logger

logger = get_logger("test_solvers")


@pytest.fixture
def wide_system() -> np.ndarray:
    """A seeded 6 x 10 gaussian matrix."""
    return np.random.default_rng(11).standard_normal((6, 10))


def test_kernel_basis_is_orthonormal_and_annihilated(wide_system: np.ndarray) -> None:
    """The basis spans ker(A): A N = 0 and N^T N = I with n - rank columns."""
    N = kernel_basis(wide_system)
    assert N.shape == (10, 4)
    assert np.allclose(wide_system @ N, 0.0, atol=1e-10)
    assert np.allclose(N.T @ N, np.eye(4), atol=1e-10)


def test_kernel_basis_of_zero_matrix_is_identity() -> None:
    """Every vector lies in the kernel of the zero matrix."""
    assert np.array_equal(kernel_basis(np.zeros((2, 3))), np.eye(3))


def test_solver_options_reject_bad_values() -> None:
    """Non-positive iteration controls are parameter errors."""
    with pytest.raises(ParameterError):
        SolverOptions(max_iters=0)
    with pytest.raises(ParameterError):
        SolverOptions(step_size=-1.0)


def test_solve_l0_brute_finds_sparsest_solution() -> None:
    """A 1-sparse right-hand side of the identity is found with support size 1."""
    x = solve_l0_brute(np.eye(3), [0.0, 2.0, 0.0], max_support=3)
    assert x is not None
    assert x.support == (1,)
    assert x.values == pytest.approx((2.0,))


def test_solve_l0_brute_returns_none_beyond_budget() -> None:
    """A 3-sparse solution is out of reach with max_support = 2."""
    assert solve_l0_brute(np.eye(3), [1.0, 1.0, 1.0], max_support=2) is None


def test_solve_l0_brute_zero_rhs_and_bad_budget() -> None:
    """b = 0 gives the zero vector; a budget above n is rejected."""
    x = solve_l0_brute(np.eye(3), [0.0, 0.0, 0.0], max_support=1)
    assert x is not None and x.sparsity() == 0
    with pytest.raises(ParameterError):
        solve_l0_brute(np.eye(3), [1.0, 0.0, 0.0], max_support=4)


def test_solve_l1_prefers_cheaper_column() -> None:
    """For x1 + 0.5 x2 = 1 the l1 minimizer is (1, 0)."""
    x = solve_l1(np.array([[1.0, 0.5]]), [1.0])
    assert x.support == (0,)
    assert x.values[0] == pytest.approx(1.0, abs=1e-8)


def test_solve_l1_rejects_inconsistent_system() -> None:
    """An inconsistent system raises with the residual attached."""
    with pytest.raises(InfeasibleSystemError) as info:
        solve_l1(np.array([[1.0, 0.0], [1.0, 0.0]]), [1.0, 2.0])
    assert info.value.residual > 0.0


def test_kernel_l1_solver_reuses_factorization(wide_system: np.ndarray) -> None:
    """One solver instance answers several right-hand sides feasibly."""
    solver = KernelL1Solver(wide_system)
    for seed in range(3):
        b = wide_system @ np.random.default_rng(seed).standard_normal(10)
        x = solver.solve(b)
        assert np.max(np.abs(wide_system @ x.to_dense() - b)) <= 1e-8 * max(1.0, np.max(np.abs(b)))


def test_solve_l1_prior_returns_code_and_solution() -> None:
    """With an injective prior the code is unique and x = X z."""
    X = np.array([[1.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    result = solve_l1_prior(np.eye(3), X, [1.0, 1.0, 0.0])
    assert np.allclose(result.z.to_dense(), [1.0, 0.0])
    assert np.allclose(result.x.to_dense(), [1.0, 1.0, 0.0])


def test_omp_prior_selects_largest_correlations() -> None:
    """OMP on the identity picks the largest entry first and stops at zero residual."""
    trace = []
    result = omp_prior(np.eye(4), np.eye(4), [0.0, 3.0, 0.0, -1.0], max_steps=4, res_tol=1e-12, residual_trace=trace)
    assert result.z.support == (1, 3)
    assert trace[0] == pytest.approx(np.sqrt(10.0))
    assert trace[-1] == pytest.approx(0.0, abs=1e-12)
    assert all(a >= b for a, b in zip(trace, trace[1:])), "Residuals must not increase."

    one_step = omp_prior(np.eye(4), np.eye(4), [0.0, 3.0, 0.0, -1.0], max_steps=1, res_tol=0.0)
    assert one_step.z.support == (1,)


@pytest.mark.slow
def test_solve_l1_matches_l0_on_gaussian_systems() -> None:
    """On 100 normalized 20 x 40 gaussian systems with 2-sparse solutions, l1 agrees with l0 at least 95 times."""
    agreements = 0
    for seed in range(100):
        rng = np.random.default_rng(1000 + seed)
        A = rng.standard_normal((20, 40)) / np.sqrt(20.0)
        x = np.zeros(40)
        x[rng.choice(40, size=2, replace=False)] = rng.choice([-1.0, 1.0], size=2) * (1.0 + rng.random(2))
        b = A @ x
        sparsest = solve_l0_brute(A, b, max_support=2)
        relaxed = solve_l1(A, b)
        if sparsest is not None and np.max(np.abs(relaxed.to_dense() - sparsest.to_dense())) <= 1e-4:
            agreements += 1
    logger.info(f"l1/l0 agreement: {agreements}/100")
    assert agreements >= 95, f"Only {agreements}/100 instances agreed."


def l1_optimum_by_linprog(A: np.ndarray, b: np.ndarray) -> float:
    """Optimal value of min 1^T (u + w) s.t. A (u - w) = b, u, w >= 0."""
    n = A.shape[1]
    result = linprog(np.ones(2 * n), A_eq=np.hstack([A, -A]), b_eq=b, bounds=[(0, None)] * (2 * n), method="highs")
    assert result.status == 0, result.message
    return float(result.fun)


def test_solve_l1_on_underdetermined_pair() -> None:
    """x1 + x2 = 2 has l1 optimum 2 on the whole segment between the endpoints."""
    x = solve_l1(np.array([[1.0, 1.0]]), [2.0])
    assert x.l1_norm() <= 2.0 + 1e-6
    assert sum(x.values) == pytest.approx(2.0)


def test_solve_l1_reaches_linear_programming_optimum() -> None:
    """On random 6 x 10 systems the l1 norm matches the HiGHS optimum in at least 8 of 10 seeds."""
    matches = 0
    for seed in range(10):
        rng = np.random.default_rng(300 + seed)
        A = rng.standard_normal((6, 10))
        b = A @ np.where(rng.random(10) < 0.2, rng.standard_normal(10), 0.0) + 0.1 * A[:, 0]
        optimum = l1_optimum_by_linprog(A, b)
        if solve_l1(A, b).l1_norm() <= optimum * (1.0 + 1e-4) + 1e-8:
            matches += 1
    assert matches >= 8, f"l1 optimum reached in only {matches}/10 systems."


def test_solve_l0_brute_tolerance_is_absolute_unless_relative() -> None:
    """A 5e-5 residual on a right-hand side of size 1e6 passes only the relative bound."""
    A = np.array([[1.0], [1.0]])
    b = [1e6, 1e6 + 1e-4]
    assert solve_l0_brute(A, b, max_support=1) is None
    x = solve_l0_brute(A, b, max_support=1, relative=True)
    assert x is not None and x.support == (0,)
    assert x.values[0] == pytest.approx(1e6 + 5e-5)


@pytest.mark.parametrize("seed", range(10))
def test_omp_prior_recovers_two_sparse_codes(seed: int) -> None:
    """On a column-normalized 64 x 96 gaussian product, OMP finds the planted 2-sparse support in two steps."""
    rng = np.random.default_rng(500 + seed)
    A = rng.standard_normal((64, 96))
    A /= np.linalg.norm(A, axis=0)
    support = tuple(sorted(int(j) for j in rng.choice(96, size=2, replace=False)))
    z = np.zeros(96)
    z[list(support)] = rng.choice([-1.0, 1.0], size=2)
    result = omp_prior(A, np.eye(96), A @ z, max_steps=2, res_tol=1e-10)
    assert result.z.support == support
    assert np.allclose(result.z.to_dense(), z, atol=1e-10)
    sparsest = solve_l0_brute(A, A @ z, max_support=2)
    assert sparsest is not None and sparsest.support == support


def test_left_preconditioning_keeps_the_feasible_set() -> None:
    """An invertible T leaves the kernel and the least-norm solution of A x = b unchanged."""
    rng = np.random.default_rng(17)
    A = rng.standard_normal((6, 10))
    T = rng.standard_normal((6, 6)) + 4.0 * np.eye(6)
    b = A @ np.where(rng.random(10) < 0.3, 1.0, 0.0)
    plain, preconditioned = KernelL1Solver(A), KernelL1Solver(T @ A)
    assert np.allclose(plain.N @ plain.N.T, preconditioned.N @ preconditioned.N.T, atol=1e-10)
    assert np.allclose(plain.particular_solution(b), preconditioned.particular_solution(T @ b), atol=1e-10)
    x = preconditioned.solve(T @ b).to_dense()
    assert np.max(np.abs(A @ x - b)) <= 1e-6


def test_l1_prior_solves_at_least_as_often_as_plain_l1() -> None:
    """With a dictionary that contains the solutions, the prior solver recovers at least as many samples."""
    rng = np.random.default_rng(23)
    A = rng.standard_normal((8, 16))
    X = rng.choice([-1.0, 1.0], size=(16, 6))
    plain_hits = prior_hits = 0
    for _ in range(20):
        z = np.zeros(6)
        z[rng.integers(6)] = 1.0 + rng.random()
        x = X @ z
        b = A @ x
        if np.allclose(solve_l1(A, b).to_dense(), x, atol=1e-4):
            plain_hits += 1
        if np.allclose(solve_l1_prior(A, X, b).x.to_dense(), x, atol=1e-4):
            prior_hits += 1
    logger.info(f"prior {prior_hits}/20, plain {plain_hits}/20")
    assert prior_hits >= plain_hits
    assert prior_hits >= 15
