"""
Domain types shared by every stage: dense matrices, sparse vectors,
Bernoulli-Subgaussian parameters and linear problem instances.

Dense matrices are plain two-dimensional ``numpy`` float arrays; ``as_dense_matrix``
is the single validation point for them.
"""
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence, Tuple, Union

import numpy as np

from src.errors import ParameterError

DEFAULT_ZERO_TOL: float = 1e-6

DenseMatrix = np.ndarray
ArrayLike = Union[np.ndarray, Sequence[float], Sequence[Sequence[float]]]

DISTRIBUTIONS: Tuple[str, ...] = ("gaussian", "rademacher")


def as_dense_matrix(values: ArrayLike, rows: Optional[int] = None, cols: Optional[int] = None) -> DenseMatrix:
    """
    Converts input into a finite two-dimensional float matrix.

    Args:
        values: Nested sequence or array. A 1-D input is read as a single row.
        rows (Optional[int]): Expected row count, checked when given.
        cols (Optional[int]): Expected column count, checked when given.

    Returns:
        DenseMatrix: A float64 array with ``ndim == 2``.

    Raises:
        ParameterError: If the shape does not match or an entry is not finite.
    """
    matrix = np.array(values, dtype=float)
    if matrix.ndim == 1:
        matrix = matrix.reshape(1, -1)
    if matrix.ndim != 2:
        raise ParameterError(f"Expected a 2-D matrix, got {matrix.ndim} dimensions.")
    if rows is not None and matrix.shape[0] != rows:
        raise ParameterError(f"Expected {rows} rows, got {matrix.shape[0]}.")
    if cols is not None and matrix.shape[1] != cols:
        raise ParameterError(f"Expected {cols} columns, got {matrix.shape[1]}.")
    if not np.all(np.isfinite(matrix)):
        raise ParameterError("Matrix contains non-finite entries.")
    return matrix


def as_vector(values: ArrayLike, length: Optional[int] = None) -> np.ndarray:
    """Converts input into a finite 1-D float vector, optionally checking its length."""
    vector = np.asarray(values, dtype=float).reshape(-1)
    if length is not None and vector.shape[0] != length:
        raise ParameterError(f"Expected a vector of length {length}, got {vector.shape[0]}.")
    if not np.all(np.isfinite(vector)):
        raise ParameterError("Vector contains non-finite entries.")
    return vector


@dataclass(frozen=True)
class SparseVector:
    """
    Index/value representation of a vector with an explicit zero threshold.

    Invariants: support strictly increasing and inside ``[0, dim)``; every stored
    value has magnitude strictly above ``zero_tol``.
    """
    dim: int
    support: Tuple[int, ...]
    values: Tuple[float, ...]
    zero_tol: float = DEFAULT_ZERO_TOL

    def __post_init__(self) -> None:
        if self.dim < 0:
            raise ParameterError(f"Dimension must be non-negative, got {self.dim}.")
        if self.zero_tol < 0:
            raise ParameterError(f"zero_tol must be >= 0, got {self.zero_tol}.")
        if len(self.support) != len(self.values):
            raise ParameterError("Support and values must have equal length.")
        previous = -1
        for index in self.support:
            if index <= previous or index >= self.dim:
                raise ParameterError(f"Support must be strictly increasing and below {self.dim}: {self.support}")
            previous = index
        for value in self.values:
            if not np.isfinite(value) or abs(value) <= self.zero_tol:
                raise ParameterError(f"Stored value {value} is not above zero_tol={self.zero_tol}.")

    @classmethod
    def from_dense(cls, vector: ArrayLike, zero_tol: float = DEFAULT_ZERO_TOL) -> "SparseVector":
        """Keeps the entries with ``|v_i| > zero_tol``; everything else becomes an exact zero."""
        dense = as_vector(vector)
        support = np.flatnonzero(np.abs(dense) > zero_tol)
        return cls(
            dim=int(dense.shape[0]),
            support=tuple(int(i) for i in support),
            values=tuple(float(dense[i]) for i in support),
            zero_tol=zero_tol,
        )

    @classmethod
    def zeros(cls, dim: int, zero_tol: float = DEFAULT_ZERO_TOL) -> "SparseVector":
        return cls(dim=dim, support=(), values=(), zero_tol=zero_tol)

    def to_dense(self) -> np.ndarray:
        dense = np.zeros(self.dim)
        if self.support:
            dense[list(self.support)] = self.values
        return dense

    def sparsity(self) -> int:
        return len(self.support)

    def l1_norm(self) -> float:
        return float(np.sum(np.abs(self.values)))


@dataclass(frozen=True)
class BernoulliSubgaussianParams:
    """
    Parameters of the entrywise model ``M_jk = Omega_jk * R_jk``: Bernoulli mask with
    rate ``theta`` and a mean-zero subgaussian law with variance ``nu2``.
    """
    theta: float
    nu2: float = 1.0
    psi2_bound: float = 1.0
    restricted: bool = True
    distribution: str = "rademacher"

    def validate(self) -> None:
        """
        Checks the model constraints.

        Raises:
            ParameterError: If theta is outside (0, 1], the variance is not positive,
                the distribution is unknown, or a restricted model violates
                P(R=0)=0, E|R| in [1/10, 1], E R^2 <= 1.
        """
        if not 0.0 < self.theta <= 1.0:
            raise ParameterError(f"theta must lie in (0, 1], got {self.theta}.")
        if self.nu2 <= 0.0:
            raise ParameterError(f"Variance nu2 must be positive, got {self.nu2}.")
        if self.distribution not in DISTRIBUTIONS:
            raise ParameterError(f"Unknown distribution '{self.distribution}', expected one of {DISTRIBUTIONS}.")
        if not self.restricted:
            return
        nu = float(np.sqrt(self.nu2))
        if self.distribution == "gaussian":
            # Restricted gaussian entries must be standard normal.
            if not np.isclose(self.nu2, 1.0, rtol=0.0, atol=1e-12):
                raise ParameterError(f"Restricted gaussian model requires nu2 = 1, got {self.nu2}.")
            return
        mean_abs = nu
        if not (0.1 <= mean_abs <= 1.0 and self.nu2 <= 1.0):
            raise ParameterError(
                f"Restricted rademacher model requires E|R| in [0.1, 1] and E R^2 <= 1, got nu2={self.nu2}."
            )


@dataclass
class ProblemInstance:
    """A linear system ``A x = b`` with an optional known solution."""
    A: DenseMatrix
    b: np.ndarray
    known_solution: Optional[SparseVector] = None
    labels: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.A = as_dense_matrix(self.A)
        self.b = as_vector(self.b, length=self.A.shape[0])
        if self.known_solution is not None:
            if self.known_solution.dim != self.A.shape[1]:
                raise ParameterError("Known solution dimension does not match the column count of A.")
            residual = np.max(np.abs(self.A @ self.known_solution.to_dense() - self.b), initial=0.0)
            scale = max(1.0, float(np.max(np.abs(self.b), initial=0.0)))
            if residual > 1e-9 * scale:
                raise ParameterError(f"Known solution does not solve the system (residual {residual:.3e}).")


def supports_disjoint(blocks: Iterable[Iterable[int]]) -> bool:
    """True if no index appears in two blocks."""
    seen = set()
    for block in blocks:
        for index in block:
            if index in seen:
                return False
            seen.add(index)
    return True
