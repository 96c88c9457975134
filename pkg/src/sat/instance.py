"""
1-in-3-SAT instances: model, assignment checks, random generation and enumeration.

Literals are ``(var, negated)`` pairs with a 0-based variable index; files use
DIMACS-style signed 1-based integers.
"""
import itertools
from dataclasses import dataclass, field
from typing import List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from src.core.model import SparseVector
from src.core.rng import make_rng
from src.errors import ParameterError


class Literal(NamedTuple):
    var: int
    negated: bool = False

    def value(self, assignment: Sequence[bool]) -> bool:
        return bool(assignment[self.var]) != self.negated

    def to_signed(self) -> int:
        return -(self.var + 1) if self.negated else self.var + 1

    @classmethod
    def from_signed(cls, literal: int) -> "Literal":
        if literal == 0:
            raise ParameterError("Literal 0 is reserved as the clause terminator.")
        return cls(var=abs(literal) - 1, negated=literal < 0)


Clause = Tuple[Literal, Literal, Literal]


@dataclass
class SatInstance:
    """Clauses of three literals on distinct variables out of ``n_vars`` boolean variables."""
    n_vars: int
    clauses: List[Clause] = field(default_factory=list)

    def __post_init__(self) -> None:
        if self.n_vars < 0:
            raise ParameterError(f"n_vars must be non-negative, got {self.n_vars}.")
        normalized = []
        for number, clause in enumerate(self.clauses):
            literals = tuple(Literal(int(lit[0]), bool(lit[1])) for lit in clause)
            if len(literals) != 3:
                raise ParameterError(f"Clause {number} has {len(literals)} literals, expected 3.")
            for literal in literals:
                if not 0 <= literal.var < self.n_vars:
                    raise ParameterError(f"Clause {number} references variable {literal.var} >= {self.n_vars}.")
            if len({literal.var for literal in literals}) != 3:
                raise ParameterError(f"Clause {number} repeats a variable; the reduction needs three distinct variables.")
            normalized.append(literals)
        self.clauses = normalized

    @property
    def n_clauses(self) -> int:
        return len(self.clauses)

    @classmethod
    def from_signed(cls, n_vars: int, clauses: Sequence[Sequence[int]]) -> "SatInstance":
        """Builds an instance from 1-based signed integers, e.g. ``[[1, -2, 3]]``."""
        return cls(n_vars=n_vars, clauses=[tuple(Literal.from_signed(lit) for lit in clause) for clause in clauses])

    def to_signed(self) -> List[List[int]]:
        return [[literal.to_signed() for literal in clause] for clause in self.clauses]


def check_1in3_assignment(inst: SatInstance, assignment: Sequence[bool]) -> bool:
    """True iff every clause has exactly one true literal; vacuously true without clauses."""
    if len(assignment) != inst.n_vars:
        raise ParameterError(f"Assignment has length {len(assignment)}, expected {inst.n_vars}.")
    return all(sum(literal.value(assignment) for literal in clause) == 1 for clause in inst.clauses)


def satisfiable_by_enumeration(inst: SatInstance) -> Optional[List[bool]]:
    """Returns the first satisfying assignment in lexicographic order (False before True), or None."""
    for values in itertools.product((False, True), repeat=inst.n_vars):
        if check_1in3_assignment(inst, values):
            return list(values)
    return None


def random_1in3_instance(n_vars: int, n_clauses: int, seed: int) -> SatInstance:
    """
    Draws clauses of three distinct variables with random polarities.

    Raises:
        ParameterError: If fewer than three variables are available.
    """
    if n_vars < 3:
        raise ParameterError(f"Clauses need three distinct variables, got n_vars={n_vars}.")
    rng = make_rng(seed, purpose="matrix")
    clauses = []
    for _ in range(n_clauses):
        variables = rng.choice(n_vars, size=3, replace=False)
        negations = rng.random(3) < 0.5
        clauses.append(tuple(Literal(int(v), bool(neg)) for v, neg in zip(variables, negations)))
    return SatInstance(n_vars=n_vars, clauses=clauses)


def planted_1in3_instance(n_vars: int, n_clauses: int, seed: int) -> Tuple[SatInstance, List[bool]]:
    """
    Draws a random assignment first, then clauses in which exactly one literal is true under it.

    Returns:
        Tuple[SatInstance, List[bool]]: The instance and its planted solution.
    """
    if n_vars < 3:
        raise ParameterError(f"Clauses need three distinct variables, got n_vars={n_vars}.")
    rng = make_rng(seed, purpose="matrix")
    assignment = [bool(v) for v in rng.random(n_vars) < 0.5]
    clauses = []
    for _ in range(n_clauses):
        variables = rng.choice(n_vars, size=3, replace=False)
        true_position = int(rng.integers(3))
        clauses.append(tuple(
            Literal(int(v), not assignment[v] if k == true_position else assignment[v])
            for k, v in enumerate(variables)
        ))
    return SatInstance(n_vars=n_vars, clauses=clauses), assignment


def encode_assignment(assignment: Sequence[bool]) -> SparseVector:
    """Encodes an assignment as ``x = (y, z)`` with ``y_i = assignment_i`` and ``z_i = 1 - y_i``."""
    y = np.array([1.0 if value else 0.0 for value in assignment])
    return SparseVector.from_dense(np.concatenate([y, 1.0 - y]), zero_tol=0.0)
