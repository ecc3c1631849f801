"""Dense two-phase simplex for the small linear programs the engine builds.

Every program is a minimisation. Pivoting follows Bland's rule: the entering
column is the lowest-index column with a negative reduced cost and ties in the
ratio test go to the lowest-index basic variable, so optima are reproducible.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional, Sequence

import numpy as np

from utils.errors import InvalidModelError
from utils.logger import Logger

logger = Logger(__name__)

PIVOT_TOLERANCE = 1e-11
FEASIBILITY_TOLERANCE = 1e-9


class Relation(Enum):
    LE = "<="
    EQ = "="
    GE = ">="

    def flipped(self) -> "Relation":
        return {Relation.LE: Relation.GE, Relation.GE: Relation.LE, Relation.EQ: Relation.EQ}[self]


class LPStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True, eq=False)
class LinearConstraint:
    coefficients: np.ndarray
    relation: Relation
    rhs: float

    def __post_init__(self):
        coefficients = np.array(self.coefficients, dtype=float).reshape(-1)
        coefficients.flags.writeable = False
        object.__setattr__(self, "coefficients", coefficients)
        object.__setattr__(self, "relation", Relation(self.relation))
        object.__setattr__(self, "rhs", float(self.rhs))
        if not (np.all(np.isfinite(coefficients)) and np.isfinite(self.rhs)):
            raise InvalidModelError("Linear constraint has non-finite coefficients")

    def holds(self, x: np.ndarray, tol: float = FEASIBILITY_TOLERANCE) -> bool:
        lhs = float(self.coefficients @ x)
        if self.relation is Relation.LE:
            return lhs <= self.rhs + tol
        if self.relation is Relation.GE:
            return lhs >= self.rhs - tol
        return abs(lhs - self.rhs) <= tol


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """minimise objective · x subject to the constraints."""

    objective: np.ndarray
    constraints: tuple
    nonnegative: Optional[tuple] = None

    def __post_init__(self):
        objective = np.array(self.objective, dtype=float).reshape(-1)
        object.__setattr__(self, "objective", objective)
        object.__setattr__(self, "constraints", tuple(self.constraints))
        n = objective.shape[0]
        nonnegative = (True,) * n if self.nonnegative is None else tuple(bool(flag) for flag in self.nonnegative)
        object.__setattr__(self, "nonnegative", nonnegative)
        if len(nonnegative) != n:
            raise InvalidModelError(f"Expected {n} non-negativity flags, got {len(nonnegative)}")
        for row, constraint in enumerate(self.constraints):
            if constraint.coefficients.shape[0] != n:
                raise InvalidModelError(
                    f"Constraint {row} has {constraint.coefficients.shape[0]} coefficients, expected {n}"
                )
        if not np.all(np.isfinite(objective)):
            raise InvalidModelError("Objective has non-finite coefficients")

    @property
    def n_variables(self) -> int:
        return self.objective.shape[0]


@dataclass(frozen=True, eq=False)
class LPResult:
    status: LPStatus
    value: Optional[float] = None
    x: Optional[np.ndarray] = None
    iterations: int = 0
    basis: tuple = field(default=())

    @property
    def is_optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


def _set_objective(tableau: np.ndarray, basis: list, costs: np.ndarray) -> None:
    tableau[-1, :] = 0.0
    tableau[-1, : costs.shape[0]] = costs
    for row, column in enumerate(basis):
        if tableau[-1, column] != 0.0:
            tableau[-1, :] -= tableau[-1, column] * tableau[row, :]


def _pivot(tableau: np.ndarray, row: int, column: int) -> None:
    tableau[row, :] /= tableau[row, column]
    for other in range(tableau.shape[0]):
        if other != row and tableau[other, column] != 0.0:
            tableau[other, :] -= tableau[other, column] * tableau[row, :]


def _simplex(tableau: np.ndarray, basis: list, n_columns: int, max_iterations: int) -> tuple:
    """Run Bland-rule pivots. Returns (status, iterations)."""
    m = tableau.shape[0] - 1
    for iteration in range(max_iterations):
        reduced = tableau[-1, :n_columns]
        candidates = np.flatnonzero(reduced < -PIVOT_TOLERANCE)
        if candidates.size == 0:
            return LPStatus.OPTIMAL, iteration
        column = int(candidates[0])

        entries = tableau[:m, column]
        rows = np.flatnonzero(entries > PIVOT_TOLERANCE)
        if rows.size == 0:
            return LPStatus.UNBOUNDED, iteration

        ratios = tableau[rows, -1] / entries[rows]
        best = ratios.min()
        tied = rows[ratios <= best + PIVOT_TOLERANCE]
        row = int(min(tied, key=lambda r: basis[r]))
        _pivot(tableau, row, column)
        basis[row] = column
    raise RuntimeError(f"Simplex did not terminate within {max_iterations} pivots")


def solve_lp(lp: LinearProgram, max_iterations: int = 10_000) -> LPResult:
    """Solve ``lp`` with the two-phase simplex method.

    Free variables are split into positive and negative parts. The returned
    status is always one of optimal, infeasible or unbounded; nothing is raised
    for model outcomes.
    """
    n = lp.n_variables
    free = [j for j, flag in enumerate(lp.nonnegative) if not flag]
    structural = n + len(free)

    rows = []
    rhs = []
    relations = []
    for constraint in lp.constraints:
        coefficients = np.concatenate([constraint.coefficients, -constraint.coefficients[free]])
        b = constraint.rhs
        relation = constraint.relation
        if b < 0:
            coefficients, b, relation = -coefficients, -b, relation.flipped()
        rows.append(coefficients)
        rhs.append(b)
        relations.append(relation)
    costs = np.concatenate([lp.objective, -lp.objective[free]])
    m = len(rows)

    extra_columns = []
    basis = []
    artificial = []
    column = structural
    for i, relation in enumerate(relations):
        unit = np.zeros(m)
        unit[i] = 1.0
        if relation is Relation.LE:
            extra_columns.append(unit)
            basis.append(column)
            column += 1
        else:
            if relation is Relation.GE:
                extra_columns.append(-unit)
                column += 1
            extra_columns.append(unit)
            basis.append(column)
            artificial.append(column)
            column += 1
    total = column

    tableau = np.zeros((m + 1, total + 1))
    if m:
        tableau[:m, :structural] = np.vstack(rows)
        if extra_columns:
            tableau[:m, structural:total] = np.column_stack(extra_columns)
        tableau[:m, -1] = rhs

    iterations = 0
    if artificial:
        phase_one = np.zeros(total)
        phase_one[artificial] = 1.0
        _set_objective(tableau, basis, phase_one)
        _, used = _simplex(tableau, basis, total, max_iterations)
        iterations += used
        infeasibility = -tableau[-1, -1]
        if infeasibility > FEASIBILITY_TOLERANCE:
            logger.debug(f"Phase I ended with infeasibility {infeasibility:.3e}")
            return LPResult(LPStatus.INFEASIBLE, iterations=iterations)

        artificial_set = set(artificial)
        row = 0
        while row < len(basis):
            if basis[row] in artificial_set:
                candidates = [
                    j for j in range(total)
                    if j not in artificial_set and abs(tableau[row, j]) > PIVOT_TOLERANCE
                ]
                if candidates:
                    _pivot(tableau, row, candidates[0])
                    basis[row] = candidates[0]
                else:
                    # Redundant equality row
                    tableau = np.delete(tableau, row, axis=0)
                    del basis[row]
                    continue
            row += 1

        keep = [j for j in range(total) if j not in artificial_set]
        remap = {old: new for new, old in enumerate(keep)}
        tableau = np.hstack([tableau[:, keep], tableau[:, -1:]])
        basis = [remap[j] for j in basis]
        total = len(keep)

    _set_objective(tableau, basis, np.concatenate([costs, np.zeros(total - structural)]))
    status, used = _simplex(tableau, basis, total, max_iterations)
    iterations += used
    if status is LPStatus.UNBOUNDED:
        return LPResult(LPStatus.UNBOUNDED, iterations=iterations)

    solution = np.zeros(total)
    for row, column in enumerate(basis):
        solution[column] = tableau[row, -1]
    solution = np.where(np.abs(solution) < PIVOT_TOLERANCE, 0.0, solution)
    x = solution[:n].copy()
    if free:
        x[free] -= solution[n:structural]
    value = float(lp.objective @ x)
    logger.debug(f"LP solved: {m} rows, {n} variables, value {value:.12g}, {iterations} pivots")
    return LPResult(LPStatus.OPTIMAL, value=value, x=x, iterations=iterations, basis=tuple(basis))


def simplex_constraint(n: int) -> LinearConstraint:
    """The normalisation row sum(p) = 1 of a mass function on ``n`` elements."""
    return LinearConstraint(np.ones(n), Relation.EQ, 1.0)


def feasible_point(n: int, constraints: Sequence[LinearConstraint]) -> LPResult:
    return solve_lp(LinearProgram(np.zeros(n), tuple(constraints)))
