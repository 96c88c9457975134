"""Exception hierarchy shared by every package under src/."""
from typing import Optional


class CurriculumError(Exception):
    """Base class for all errors raised by the curriculum toolkit."""


class ParameterError(CurriculumError, ValueError):
    """A parameter is outside its admissible range."""


class PartitionError(ParameterError):
    """Index partitions overlap, miss indices, or reference out-of-range entries."""


class DomainError(CurriculumError, ValueError):
    """The input lies outside the domain of a mathematical operation (e.g. a zero matrix)."""


class RankDeficiencyError(CurriculumError):
    """A matrix has smaller numerical rank than the operation requires."""

    def __init__(self, message: str, measured_rank: int, expected_rank: int) -> None:
        super().__init__(f"{message} (measured rank {measured_rank}, expected {expected_rank})")
        self.measured_rank = measured_rank
        self.expected_rank = expected_rank


class ConstructionError(CurriculumError):
    """The teacher could not build a class matrix; names the block that broke it."""

    def __init__(self, message: str, block: Optional[int] = None) -> None:
        super().__init__(message if block is None else f"{message} (block {block})")
        self.block = block


class InfeasibleSystemError(CurriculumError):
    """The linear system has no solution within tolerance."""

    def __init__(self, message: str, residual: float) -> None:
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


class DegenerateInputError(CurriculumError):
    """An iteration received input for which it is undefined."""


class InsufficientDataError(CurriculumError):
    """Too few graded samples survived to factorize."""

    def __init__(self, graded_ok: int, required: int, attempted: int) -> None:
        super().__init__(
            f"Only {graded_ok} of {attempted} samples passed grading; at least {required} are required."
        )
        self.graded_ok = graded_ok
        self.required = required
        self.attempted = attempted


class BudgetExceededError(CurriculumError):
    """An exhaustive enumeration would exceed its budget."""

    def __init__(self, what: str, count: int, budget: int) -> None:
        super().__init__(f"{what}: {count} cases exceed the budget of {budget}")
        self.count = count
        self.budget = budget


class ConfigError(CurriculumError):
    """Configuration file or field is missing or invalid."""
