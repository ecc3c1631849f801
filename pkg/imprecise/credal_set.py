"""Credal sets: closed convex sets of mass functions and their lower envelopes.

Four representations share one interface. ``lower_argmin`` returns the lower
prevision of a value vector together with a mass function attaining it, which
the conditioning code uses to walk the piecewise-affine envelopes exactly.
"""

import itertools
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Hashable, Iterable, Optional, Sequence

import numpy as np

from imprecise.spaces import FiniteSpace, Gamble, MassFunction, require_same_space
from solvers.linear_program import (
    LinearConstraint,
    LinearProgram,
    LPStatus,
    Relation,
    feasible_point,
    simplex_constraint,
    solve_lp,
)
from utils.config import get_settings
from utils.errors import EnumerationCapExceeded, InfeasibleModelError, InvalidModelError
from utils.logger import Logger

logger = Logger(__name__)

MAX_INTERVAL_PERMUTATIONS = 40320


def _dedupe(points: Iterable[np.ndarray], decimals: int = 12) -> list:
    seen = set()
    unique = []
    for point in points:
        key = tuple(np.round(point, decimals) + 0.0)
        if key not in seen:
            seen.add(key)
            unique.append(point)
    return unique


class CredalSet(ABC):
    space: FiniteSpace

    @abstractmethod
    def lower_argmin(self, values: np.ndarray) -> tuple:
        """Return ``(min_p p·values, p)`` over the set."""

    @abstractmethod
    def extreme_points(self) -> list:
        """Extreme mass functions as arrays in element order."""

    def lower(self, f: Gamble) -> float:
        require_same_space(self.space, f.space)
        return float(self.lower_argmin(f.values)[0])

    def upper(self, f: Gamble) -> float:
        return -self.lower(-f)

    def lower_probability(self, subset: Iterable[Hashable]) -> float:
        return self.lower(Gamble.indicator(self.space, subset))

    def upper_probability(self, subset: Iterable[Hashable]) -> float:
        return self.upper(Gamble.indicator(self.space, subset))

    def probability_bounds(self, element: Hashable) -> tuple:
        return self.lower_probability([element]), self.upper_probability([element])

    def vertices(self) -> list:
        return [MassFunction(self.space, point) for point in self.extreme_points()]


@dataclass(frozen=True, eq=False)
class LinearPrevision(CredalSet):
    mass: MassFunction

    @property
    def space(self) -> FiniteSpace:
        return self.mass.space

    def lower_argmin(self, values: np.ndarray) -> tuple:
        return float(self.mass.probs @ values), np.array(self.mass.probs)

    def extreme_points(self) -> list:
        return [np.array(self.mass.probs)]

    def probability_bounds(self, element: Hashable) -> tuple:
        p = self.mass[element]
        return p, p


@dataclass(frozen=True, eq=False)
class VertexCredalSet(CredalSet):
    """Convex hull of finitely many mass functions."""

    space: FiniteSpace
    points: tuple

    def __post_init__(self):
        points = tuple(self.points)
        if not points:
            raise InvalidModelError(f"Vertex credal set on '{self.space.name}' has no vertices")
        for point in points:
            require_same_space(self.space, point.space)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "_matrix", np.vstack([point.probs for point in points]))

    @classmethod
    def from_arrays(cls, space: FiniteSpace, arrays: Sequence[Sequence[float]]) -> "VertexCredalSet":
        return cls(space, tuple(MassFunction(space, array) for array in arrays))

    def lower_argmin(self, values: np.ndarray) -> tuple:
        expectations = self._matrix @ values
        best = int(np.argmin(expectations))
        return float(expectations[best]), np.array(self._matrix[best])

    def extreme_points(self) -> list:
        return _dedupe(np.array(row) for row in self._matrix)

    def probability_bounds(self, element: Hashable) -> tuple:
        column = self._matrix[:, self.space.index(element)]
        return float(column.min()), float(column.max())


@dataclass(frozen=True, eq=False)
class IntervalCredalSet(CredalSet):
    """Mass functions with l(x) <= p(x) <= u(x); the bounds must be reachable."""

    space: FiniteSpace
    lower_bounds: np.ndarray
    upper_bounds: np.ndarray

    def __post_init__(self):
        lower = np.array(self.lower_bounds, dtype=float).reshape(-1)
        upper = np.array(self.upper_bounds, dtype=float).reshape(-1)
        if lower.shape[0] != len(self.space) or upper.shape[0] != len(self.space):
            raise InvalidModelError(f"Interval bounds on '{self.space.name}' need {len(self.space)} entries each")
        if not reachability_check(lower, upper):
            raise InvalidModelError(
                f"Probability intervals on '{self.space.name}' are not reachable: "
                f"lower={lower.tolist()} upper={upper.tolist()}"
            )
        lower.flags.writeable = False
        upper.flags.writeable = False
        object.__setattr__(self, "lower_bounds", lower)
        object.__setattr__(self, "upper_bounds", upper)

    def _allocate(self, order: Iterable[int]) -> np.ndarray:
        p = np.array(self.lower_bounds)
        remaining = 1.0 - math.fsum(self.lower_bounds)
        for position in order:
            if remaining <= 0:
                break
            added = min(self.upper_bounds[position] - self.lower_bounds[position], remaining)
            p[position] += added
            remaining -= added
        return p

    def lower_argmin(self, values: np.ndarray) -> tuple:
        # 2-monotone closed form: free mass goes to the smallest values first
        p = self._allocate(np.argsort(values, kind="stable"))
        return float(p @ values), p

    def extreme_points(self) -> list:
        n = len(self.space)
        if math.factorial(n) > MAX_INTERVAL_PERMUTATIONS:
            raise EnumerationCapExceeded(
                f"interval vertices on '{self.space.name}'", math.factorial(n), MAX_INTERVAL_PERMUTATIONS
            )
        return _dedupe(self._allocate(order) for order in itertools.permutations(range(n)))

    def probability_bounds(self, element: Hashable) -> tuple:
        position = self.space.index(element)
        return float(self.lower_bounds[position]), float(self.upper_bounds[position])


@dataclass(frozen=True, eq=False)
class PolytopeCredalSet(CredalSet):
    """Mass functions satisfying linear constraints on the probability coordinates.

    Non-negativity and normalisation are always added implicitly.
    """

    space: FiniteSpace
    constraints: tuple

    def __post_init__(self):
        constraints = tuple(self.constraints)
        for constraint in constraints:
            if constraint.coefficients.shape[0] != len(self.space):
                raise InvalidModelError(
                    f"Polytope constraint on '{self.space.name}' has {constraint.coefficients.shape[0]} "
                    f"coefficients, expected {len(self.space)}"
                )
        object.__setattr__(self, "constraints", constraints)
        if not feasible_point(len(self.space), self.full_constraints).is_optimal:
            raise InfeasibleModelError(f"Polytope credal set on '{self.space.name}' is empty")

    @property
    def full_constraints(self) -> tuple:
        return self.constraints + (simplex_constraint(len(self.space)),)

    def with_margin(self, margin: float) -> "PolytopeCredalSet":
        """The same polytope intersected with p(x) >= margin for every x."""
        extra = tuple(
            LinearConstraint(np.eye(len(self.space))[position], Relation.GE, margin)
            for position in range(len(self.space))
        )
        return PolytopeCredalSet(self.space, self.constraints + extra)

    def lower_argmin(self, values: np.ndarray) -> tuple:
        result = solve_lp(LinearProgram(values, self.full_constraints))
        if result.status is not LPStatus.OPTIMAL:
            raise InfeasibleModelError(
                f"Polytope credal set on '{self.space.name}' gave LP status {result.status.value}"
            )
        return float(result.value), result.x

    def extreme_points(self, cap: Optional[int] = None) -> list:
        """Vertices by enumerating active constraint sets; only sensible for small spaces."""
        n = len(self.space)
        cap = get_settings().oracle_cap if cap is None else cap
        equalities = [c for c in self.full_constraints if c.relation is Relation.EQ]
        inequalities = [c for c in self.full_constraints if c.relation is not Relation.EQ]
        inequalities += [LinearConstraint(row, Relation.GE, 0.0) for row in np.eye(n)]
        equality_rank = np.linalg.matrix_rank(np.vstack([c.coefficients for c in equalities]))
        needed = max(n - int(equality_rank), 0)
        count = math.comb(len(inequalities), needed)
        if count > cap:
            raise EnumerationCapExceeded(f"polytope vertices on '{self.space.name}'", count, cap)

        points = []
        for active in itertools.combinations(inequalities, needed):
            rows = equalities + list(active)
            matrix = np.vstack([c.coefficients for c in rows])
            rhs = np.array([c.rhs for c in rows])
            if np.linalg.matrix_rank(matrix) < n:
                continue
            point, *_ = np.linalg.lstsq(matrix, rhs, rcond=None)
            if all(c.holds(point) for c in inequalities) and all(c.holds(point) for c in equalities):
                points.append(np.where(np.abs(point) < 1e-12, 0.0, point))
        return _dedupe(points)

    def probability_bounds(self, element: Hashable) -> tuple:
        unit = self.space.mask([element]).astype(float)
        lower = self.lower_argmin(unit)[0]
        upper = -self.lower_argmin(-unit)[0]
        return lower, upper


def eval_lower(cs: CredalSet, f: Gamble) -> float:
    return cs.lower(f)


def eval_upper(cs: CredalSet, f: Gamble) -> float:
    return cs.upper(f)


def reachability_check(lower: Sequence[float], upper: Sequence[float], tol: Optional[float] = None) -> bool:
    """Whether probability intervals are non-empty and every bound is attained."""
    tol = get_settings().tolerance if tol is None else tol
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    if lower.shape != upper.shape or lower.ndim != 1:
        raise InvalidModelError(f"Malformed interval bounds: {lower.tolist()} / {upper.tolist()}")
    if np.any(lower < -tol) or np.any(upper > 1 + tol) or np.any(lower > upper + tol):
        raise InvalidModelError(f"Interval bounds must satisfy 0 <= lower <= upper <= 1: {lower.tolist()} / {upper.tolist()}")

    total_lower = math.fsum(lower)
    total_upper = math.fsum(upper)
    if total_lower > 1 + tol or total_upper < 1 - tol:
        return False
    for position in range(lower.shape[0]):
        if lower[position] + (total_upper - upper[position]) < 1 - tol:
            return False
        if upper[position] + (total_lower - lower[position]) > 1 + tol:
            return False
    return True


def make_reachable(lower: Sequence[float], upper: Sequence[float]) -> tuple:
    """Tighten non-empty probability intervals to the reachable ones with the same credal set."""
    lower = np.asarray(lower, dtype=float)
    upper = np.asarray(upper, dtype=float)
    total_lower = math.fsum(lower)
    total_upper = math.fsum(upper)
    if total_lower > 1 + get_settings().tolerance or total_upper < 1 - get_settings().tolerance:
        raise InvalidModelError(f"Probability intervals are empty: lower={lower.tolist()} upper={upper.tolist()}")
    tight_lower = np.maximum(lower, 1.0 - (total_upper - upper))
    tight_upper = np.minimum(upper, 1.0 - (total_lower - lower))
    return np.clip(tight_lower, 0.0, 1.0), np.clip(tight_upper, 0.0, 1.0)


def vacuous(space: FiniteSpace, subset: Optional[Iterable[Hashable]] = None) -> VertexCredalSet:
    """All mass functions concentrated on ``subset`` (the whole space by default)."""
    support = list(space.elements if subset is None else subset)
    if not support:
        raise InvalidModelError(f"Vacuous credal set on '{space.name}' needs a non-empty subset")
    return VertexCredalSet(space, tuple(MassFunction.degenerate(space, element) for element in support))
