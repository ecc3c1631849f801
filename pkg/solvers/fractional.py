from dataclasses import dataclass
from typing import Optional

import numpy as np

from solvers.linear_program import LinearConstraint, LinearProgram, LPStatus, Relation, solve_lp
from utils.errors import InfeasibleModelError, InvalidModelError
from utils.logger import Logger

logger = Logger(__name__)


@dataclass(frozen=True, eq=False)
class FractionalProgram:
    """minimise (a · p + alpha) / (b · p + beta) over a polytope of non-negative p.

    The denominator must be strictly positive on the whole polytope.
    """

    numerator: np.ndarray
    numerator_constant: float
    denominator: np.ndarray
    denominator_constant: float
    constraints: tuple

    def __post_init__(self):
        numerator = np.asarray(self.numerator, dtype=float).reshape(-1)
        denominator = np.asarray(self.denominator, dtype=float).reshape(-1)
        if numerator.shape != denominator.shape:
            raise InvalidModelError(
                f"Numerator has {numerator.shape[0]} coefficients, denominator {denominator.shape[0]}"
            )
        object.__setattr__(self, "numerator", numerator)
        object.__setattr__(self, "denominator", denominator)
        object.__setattr__(self, "numerator_constant", float(self.numerator_constant))
        object.__setattr__(self, "denominator_constant", float(self.denominator_constant))
        object.__setattr__(self, "constraints", tuple(self.constraints))

    @property
    def n_variables(self) -> int:
        return self.numerator.shape[0]

    def ratio(self, p: np.ndarray) -> float:
        return float(
            (self.numerator @ p + self.numerator_constant) / (self.denominator @ p + self.denominator_constant)
        )


@dataclass(frozen=True, eq=False)
class RatioResult:
    value: float
    argument: np.ndarray
    scale: Optional[float] = None


def min_ratio(fp: FractionalProgram) -> RatioResult:
    """Charnes-Cooper: substitute y = t·p with t > 0 and fix the denominator to 1.

    The constraints A·p (rel) c become A·y − c·t (rel) 0 and the normalisation
    b·y + beta·t = 1 is added, which turns the ratio into the linear objective
    a·y + alpha·t.
    """
    n = fp.n_variables
    rows = [
        LinearConstraint(np.append(constraint.coefficients, -constraint.rhs), constraint.relation, 0.0)
        for constraint in fp.constraints
    ]
    rows.append(LinearConstraint(np.append(fp.denominator, fp.denominator_constant), Relation.EQ, 1.0))
    lp = LinearProgram(np.append(fp.numerator, fp.numerator_constant), tuple(rows))

    result = solve_lp(lp)
    if result.status is LPStatus.INFEASIBLE:
        raise InfeasibleModelError("Fractional program has an empty feasible polytope")
    if result.status is LPStatus.UNBOUNDED:
        raise InvalidModelError("Fractional program is unbounded; is the denominator positive on the polytope?")

    t = float(result.x[n])
    if t <= 0:
        raise InvalidModelError("Charnes-Cooper scale vanished; the feasible polytope is unbounded")
    argument = result.x[:n] / t
    logger.debug(f"Charnes-Cooper optimum {result.value:.12g} at scale t={t:.6g}")
    return RatioResult(value=float(result.value), argument=argument, scale=t)
