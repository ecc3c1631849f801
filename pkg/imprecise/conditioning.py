"""Conditioning lower previsions.

Updated values are roots of functions of the form
``g(mu) = lower prevision of an integrand that is piecewise affine in mu``.
The lower envelope of such functions is concave and non-increasing, so the
greatest root is found by Newton steps from the right: at each step the mass
function attaining the envelope gives a piecewise-affine majorant whose own
root is computed exactly.
"""

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Callable, Hashable, Optional, Protocol, Sequence

import numpy as np

from imprecise.credal_set import CredalSet, LinearPrevision
from imprecise.spaces import FiniteSpace, Gamble, MassFunction, coordinate_event, lift, require_same_space
from utils.errors import InvalidModelError, PreconditionError, RootNotFoundError, SpaceMismatchError
from utils.logger import Logger

logger = Logger(__name__)

ROOT_TOLERANCE = 1e-12
MAX_ROOT_ITERATIONS = 10_000


class Envelope(Protocol):
    def __call__(self, mu: float) -> float: ...

    def member_root(self, mu: float, breakpoints: Sequence[float]) -> float: ...


def _piecewise_root(func: Callable[[float], float], mu: float, value_at_mu: float, breakpoints: Sequence[float]) -> float:
    """Greatest root below ``mu`` of a non-increasing function affine between breakpoints."""
    right, right_value = mu, value_at_mu
    for point in sorted((b for b in breakpoints if b < mu), reverse=True):
        value = func(point)
        if value >= 0:
            return point + value * (right - point) / (value - right_value)
        right, right_value = point, value
    raise RootNotFoundError(f"No root below the smallest breakpoint {right!r}")


@dataclass(frozen=True)
class AffineEnvelope:
    """g(mu) = min_k (intercepts[k] - slopes[k] * mu) with positive slopes."""

    intercepts: tuple
    slopes: tuple

    def __post_init__(self):
        if len(self.intercepts) != len(self.slopes) or not self.intercepts:
            raise InvalidModelError("Affine envelope needs matching, non-empty intercepts and slopes")
        if any(slope <= 0 for slope in self.slopes):
            raise InvalidModelError("Affine envelope slopes must be positive")

    def _values(self, mu: float) -> np.ndarray:
        return np.asarray(self.intercepts, dtype=float) - np.asarray(self.slopes, dtype=float) * mu

    def __call__(self, mu: float) -> float:
        return float(self._values(mu).min())

    def member_root(self, mu: float, breakpoints: Sequence[float]) -> float:
        best = int(np.argmin(self._values(mu)))
        return self.intercepts[best] / self.slopes[best]


class PrevisionEnvelope:
    """g(mu) = lower prevision of ``integrand(mu)``; integrand must be piecewise affine in mu."""

    def __init__(self, prevision, integrand: Callable[[float], np.ndarray]):
        self.prevision = prevision
        self.integrand = integrand
        self.evaluations = 0

    def __call__(self, mu: float) -> float:
        self.evaluations += 1
        return float(self.prevision.lower_argmin(self.integrand(mu))[0])

    def member_root(self, mu: float, breakpoints: Sequence[float]) -> float:
        value, member = self.prevision.lower_argmin(self.integrand(mu))
        self.evaluations += 1
        return _piecewise_root(lambda m: float(member @ self.integrand(m)), mu, float(value), breakpoints)


def greatest_root(g: Envelope, breakpoints: Sequence[float], tol: float = ROOT_TOLERANCE) -> float:
    """Greatest mu with g(mu) >= 0 for a concave non-increasing piecewise-affine g.

    The kinks of g and of every member function must lie in ``breakpoints``.
    """
    points = sorted(set(float(b) for b in breakpoints))
    if not points:
        raise InvalidModelError("greatest_root needs at least one breakpoint")
    if g(points[0]) < -tol:
        raise RootNotFoundError(f"g is negative at the smallest breakpoint {points[0]!r}")

    mu = points[-1] + 1.0
    value = g(mu)
    if value >= -tol:
        raise RootNotFoundError(f"g is non-negative above the largest breakpoint {points[-1]!r}")

    for iteration in range(MAX_ROOT_ITERATIONS):
        candidate = g.member_root(mu, points)
        if candidate >= mu:
            logger.debug(f"Root search stalled at {mu!r} after {iteration} steps")
            return mu
        mu = candidate
        value = g(mu)
        if value >= -tol:
            logger.debug(f"Root {mu!r} found after {iteration + 1} steps")
            return mu
    raise RootNotFoundError(f"Root search did not converge in {MAX_ROOT_ITERATIONS} steps")


@dataclass(frozen=True)
class ConditionalFamily:
    """One credal set over ``conditioned`` for every element of ``conditioning``.

    ``members`` may be any mapping, so families over large conditioning spaces
    can build their members lazily.
    """

    conditioning: FiniteSpace
    conditioned: FiniteSpace
    members: Mapping

    def __post_init__(self):
        if isinstance(self.members, dict):
            missing = [element for element in self.conditioning if element not in self.members]
            if missing:
                raise InvalidModelError(
                    f"Conditional family on '{self.conditioned.name}' has no member for {missing[:5]}"
                )
            for key, member in self.members.items():
                require_same_space(self.conditioned, member.space)

    def member(self, key: Hashable):
        try:
            return self.members[key]
        except KeyError:
            raise SpaceMismatchError(
                f"'{key}' is not an element of conditioning space '{self.conditioning.name}'"
            ) from None

    def lower(self, key: Hashable, f: Gamble) -> float:
        return self.member(key).lower(f)


class JointLowerPrevision:
    """A lower prevision on a product space.

    Either wraps a credal set over the product or composes a marginal with
    conditional families (marginal extension), evaluated innermost-first. In
    the nested form the product elements are tuples with the marginal
    coordinate first.
    """

    def __init__(self, space: FiniteSpace, credal_set: Optional[CredalSet] = None, levels: Sequence = ()):
        if credal_set is None and not levels:
            raise InvalidModelError("A joint lower prevision needs a credal set or a nested composition")
        if credal_set is not None:
            require_same_space(space, credal_set.space)
        self.space = space
        self.credal_set = credal_set
        self.levels = tuple(levels)
        self._shape = tuple(len(level.space if i == 0 else level.conditioned) for i, level in enumerate(self.levels))

    @classmethod
    def from_credal_set(cls, credal_set: CredalSet) -> "JointLowerPrevision":
        return cls(credal_set.space, credal_set=credal_set)

    @classmethod
    def from_mass(cls, mass: MassFunction) -> "JointLowerPrevision":
        return cls(mass.space, credal_set=LinearPrevision(mass))

    @property
    def is_nested(self) -> bool:
        return self.credal_set is None

    def _level_spaces(self) -> list:
        return [self.levels[0].space] + [family.conditioned for family in self.levels[1:]]

    def lower_argmin(self, values: np.ndarray) -> tuple:
        if not self.is_nested:
            return self.credal_set.lower_argmin(values)

        spaces = self._level_spaces()
        table = np.asarray(values, dtype=float).reshape(self._shape)
        selections = []
        # Innermost level first; each pass collapses the last axis
        for depth in range(len(self.levels) - 1, 0, -1):
            family = self.levels[depth]
            prefix_shape = table.shape[:-1]
            collapsed = np.empty(prefix_shape)
            chosen = np.empty(table.shape)
            for prefix in np.ndindex(*prefix_shape):
                elements = tuple(spaces[k].elements[i] for k, i in enumerate(prefix))
                key = elements[0] if len(elements) == 1 else elements
                value, member = family.member(key).lower_argmin(table[prefix])
                collapsed[prefix] = value
                chosen[prefix] = member
            selections.append(chosen)
            table = collapsed

        value, marginal = self.levels[0].lower_argmin(table)
        mass = np.asarray(marginal, dtype=float)
        for chosen in reversed(selections):
            mass = mass[..., np.newaxis] * chosen
        return float(value), mass.reshape(-1)

    def lower(self, h: Gamble) -> float:
        require_same_space(self.space, h.space)
        return float(self.lower_argmin(h.values)[0])

    def upper(self, h: Gamble) -> float:
        return -self.lower(-h)

    def lower_probability(self, mask: np.ndarray) -> float:
        return float(self.lower_argmin(np.asarray(mask, dtype=float))[0])

    def upper_probability(self, mask: np.ndarray) -> float:
        return -float(self.lower_argmin(-np.asarray(mask, dtype=float))[0])

    def marginal_lower(self, g: Gamble, axis: int) -> float:
        return self.lower(lift(g, self.space, axis))


def marginal_extension2(marginal: CredalSet, family: ConditionalFamily) -> JointLowerPrevision:
    """Smallest coherent joint with the given marginal and conditional family."""
    require_same_space(marginal.space, family.conditioning)
    space = FiniteSpace.product(marginal.space, family.conditioned)
    return JointLowerPrevision(space, levels=(marginal, family))


def marginal_extension3(
    marginal: CredalSet, cond_xy: ConditionalFamily, cond_xyz: ConditionalFamily
) -> JointLowerPrevision:
    require_same_space(marginal.space, cond_xy.conditioning)
    pairs = FiniteSpace.product(marginal.space, cond_xy.conditioned)
    if set(pairs.elements) != set(cond_xyz.conditioning.elements):
        raise SpaceMismatchError(
            f"Third-level family must be conditioned on '{marginal.space.name}' x '{cond_xy.conditioned.name}'"
        )
    space = FiniteSpace.product(marginal.space, cond_xy.conditioned, cond_xyz.conditioned)
    return JointLowerPrevision(space, levels=(marginal, cond_xy, cond_xyz))


def gbr_conditional(joint: JointLowerPrevision, y: Hashable, h: Gamble, axis: int = -1) -> float:
    """Value of the Generalised Bayes Rule conditional on ``coordinate[axis] == y``."""
    require_same_space(joint.space, h.space)
    event = coordinate_event(joint.space, axis, y)
    if not event.any():
        raise SpaceMismatchError(f"No element of '{joint.space.name}' has coordinate {y!r}")
    lower_event = joint.lower_probability(event)
    if lower_event <= 0:
        raise PreconditionError(
            f"Conditioning event {y!r} has lower probability {lower_event!r}; use regular or natural extension"
        )
    values = h.values
    envelope = PrevisionEnvelope(joint, lambda mu: np.where(event, values - mu, 0.0))
    return greatest_root(envelope, values[event])


def observation_integrand(f: Gamble, forcing: np.ndarray, compatible: np.ndarray) -> Callable[[float], np.ndarray]:
    """mu -> I_forcing max(f - mu, 0) + I_compatible min(f - mu, 0)."""
    values = f.values

    def integrand(mu: float) -> np.ndarray:
        shifted = values - mu
        return np.where(forcing, np.maximum(shifted, 0.0), 0.0) + np.where(compatible, np.minimum(shifted, 0.0), 0.0)

    return integrand


def is_vacuous_update(prior: CredalSet, mvm, o: Hashable) -> bool:
    """Whether the observation has zero upper probability, so updating is vacuous."""
    return prior.upper_probability(mvm.compatible(o)) <= 0


def regular_extension_obs(prior: CredalSet, mvm, o: Hashable, f: Gamble) -> float:
    require_same_space(prior.space, mvm.state_space)
    require_same_space(prior.space, f.space)
    compatible = mvm.compatible(o)
    if is_vacuous_update(prior, mvm, o):
        logger.warning(f"Observation {o!r} has zero upper probability; returning the vacuous update")
        return f.min()
    forcing_mask = prior.space.mask(mvm.forcing(o))
    compatible_mask = prior.space.mask(compatible)
    envelope = PrevisionEnvelope(prior, observation_integrand(f, forcing_mask, compatible_mask))
    return greatest_root(envelope, f.values)


def natural_extension_obs(prior: CredalSet, mvm, o: Hashable, f: Gamble) -> float:
    require_same_space(prior.space, mvm.state_space)
    require_same_space(prior.space, f.space)
    forcing = mvm.forcing(o)
    if not forcing or prior.lower_probability(forcing) <= 0:
        logger.info(f"Observation {o!r} is not forced with positive lower probability; natural extension is vacuous")
        return f.min()
    return regular_extension_obs(prior, mvm, o, f)


def bisection_root(g: Callable[[float], float], low: float, high: float, resolution: float = 1e-12) -> float:
    """Greatest root of a non-increasing g on [low, high] by bisection, for cross-checks."""
    if g(low) < 0:
        raise RootNotFoundError(f"g is negative at {low!r}")
    while high - low > resolution:
        middle = 0.5 * (low + high)
        if g(middle) >= 0:
            low = middle
        else:
            high = middle
    return low
