"""Incomplete observations: multi-valued maps, missing data and the updating rules built on them."""

import itertools
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterator, Mapping, Optional, Sequence

import numpy as np

from imprecise.conditioning import (
    ConditionalFamily,
    JointLowerPrevision,
    PrevisionEnvelope,
    greatest_root,
    marginal_extension2,
)
from imprecise.credal_set import CredalSet, VertexCredalSet, vacuous
from imprecise.spaces import FiniteSpace, Gamble, MassFunction, require_same_space
from utils.config import get_settings
from utils.errors import (
    AssumptionViolatedError,
    EnumerationCapExceeded,
    InvalidModelError,
    PreconditionError,
    SpaceMismatchError,
)
from utils.logger import Logger

logger = Logger(__name__)

MISSING = "*"


@dataclass(frozen=True)
class MultiValuedMap:
    """Gamma: each state maps to the non-empty set of observations it can produce."""

    state_space: FiniteSpace
    obs_space: FiniteSpace
    gamma: Mapping

    def __post_init__(self):
        images = {}
        for state in self.state_space:
            if state not in self.gamma:
                raise InvalidModelError(f"Multi-valued map has no image for state {state!r}")
            image = frozenset(self.gamma[state])
            if not image:
                raise InvalidModelError(f"Multi-valued map sends state {state!r} to the empty set")
            for o in image:
                self.obs_space.index(o)
            images[state] = image
        unknown = set(self.gamma) - set(self.state_space.elements)
        if unknown:
            raise SpaceMismatchError(f"Multi-valued map has images for unknown states {sorted(map(str, unknown))}")
        unreachable = [o for o in self.obs_space if not any(o in image for image in images.values())]
        if unreachable:
            raise InvalidModelError(
                f"Observations {unreachable} cannot be produced by any state; remove them from '{self.obs_space.name}'"
            )
        object.__setattr__(self, "gamma", images)

    @classmethod
    def identity(cls, space: FiniteSpace) -> "MultiValuedMap":
        return cls(space, space, {x: {x} for x in space})

    def image(self, state: Hashable) -> frozenset:
        self.state_space.index(state)
        return self.gamma[state]

    def compatible(self, o: Hashable) -> frozenset:
        self.obs_space.index(o)
        return frozenset(x for x in self.state_space if o in self.gamma[x])

    def forcing(self, o: Hashable) -> frozenset:
        self.obs_space.index(o)
        return frozenset(x for x in self.state_space if self.gamma[x] == frozenset([o]))

    def as_family(self) -> ConditionalFamily:
        """Vacuous conditionals over each Gamma(x): nothing is known about the mechanism."""
        members = {x: vacuous(self.obs_space, sorted(self.gamma[x], key=self.obs_space.index)) for x in self.state_space}
        return ConditionalFamily(self.state_space, self.obs_space, members)

    def joint(self, prior: CredalSet) -> JointLowerPrevision:
        return marginal_extension2(prior, self.as_family())


@dataclass(frozen=True)
class MissingnessPattern:
    """Which attributes are observed (with their values) and which are missing."""

    attributes: tuple
    observed: Mapping = field(default_factory=dict)

    def __post_init__(self):
        attributes = tuple(self.attributes)
        names = [space.name for space in attributes]
        observed = {}
        for key, value in dict(self.observed).items():
            position = names.index(key) if isinstance(key, str) and key in names else key
            if not isinstance(position, int) or not 0 <= position < len(attributes):
                raise SpaceMismatchError(f"Unknown attribute {key!r}; attributes are {names}")
            attributes[position].index(value)
            observed[position] = value
        object.__setattr__(self, "attributes", attributes)
        object.__setattr__(self, "observed", observed)

    @property
    def missing(self) -> tuple:
        return tuple(i for i in range(len(self.attributes)) if i not in self.observed)

    @property
    def completion_count(self) -> int:
        return math.prod(len(self.attributes[i]) for i in self.missing)

    def completions(self, cap: Optional[int] = None) -> Iterator[tuple]:
        """Every full attribute tuple consistent with the observed part."""
        cap = get_settings().enumeration_cap if cap is None else cap
        if self.completion_count > cap:
            raise EnumerationCapExceeded("completions of the missing attributes", self.completion_count, cap)
        missing = self.missing
        for values in itertools.product(*(self.attributes[i].elements for i in missing)):
            full = dict(self.observed)
            full.update(zip(missing, values))
            yield tuple(full[i] for i in range(len(self.attributes)))

    def observation(self) -> tuple:
        return tuple(self.observed.get(i, MISSING) for i in range(len(self.attributes)))


class MissingDataMap:
    """The multi-valued map of missing data: a state can be seen with any subset of its attributes hidden.

    The observation space is never materialised; observations are attribute
    tuples with ``MISSING`` in the hidden positions.
    """

    def __init__(self, attributes: Sequence[FiniteSpace]):
        self.attributes = tuple(attributes)

    @cached_property
    def state_space(self) -> FiniteSpace:
        return FiniteSpace.product(*self.attributes)

    def pattern(self, o: Sequence) -> MissingnessPattern:
        if len(o) != len(self.attributes):
            raise SpaceMismatchError(f"Observation {o!r} has {len(o)} attributes, expected {len(self.attributes)}")
        return MissingnessPattern(self.attributes, {i: value for i, value in enumerate(o) if value != MISSING})

    def image(self, state: Sequence) -> Iterator[tuple]:
        for hidden in itertools.product((False, True), repeat=len(self.attributes)):
            yield tuple(MISSING if hide else value for value, hide in zip(state, hidden))

    def compatible(self, o: Sequence) -> frozenset:
        return frozenset(self.pattern(o).completions())

    def forcing(self, o: Sequence) -> frozenset:
        # Every state can also be seen with all attributes hidden
        self.pattern(o)
        return frozenset()


def compatible_states(mvm, o: Hashable) -> frozenset:
    return mvm.compatible(o)


def forcing_states(mvm, o: Hashable) -> frozenset:
    return mvm.forcing(o)


def naive_ok(mvm, o: Hashable) -> bool:
    """Naive updating is justified when every state compatible with o can only produce o."""
    return mvm.forcing(o) == mvm.compatible(o)


def naive_update(prior: MassFunction, mvm, o: Hashable, f: Gamble) -> float:
    """Condition the precise prior on the compatible states, as if the mechanism were CAR."""
    require_same_space(prior.space, f.space)
    mask = prior.space.mask(mvm.compatible(o))
    mass = float(prior.probs[mask].sum())
    if mass <= 0:
        raise PreconditionError(f"Observation {o!r} has zero prior probability")
    return float(prior.probs[mask] @ f.values[mask]) / mass


def car_posterior(prior: CredalSet, mvm, o: Hashable, f: Gamble) -> float:
    """Lower envelope of the per-vertex Bayes conditionals on the compatible states."""
    require_same_space(prior.space, f.space)
    compatible = mvm.compatible(o)
    lower_mass = prior.lower_probability(compatible)
    if lower_mass <= 0:
        raise PreconditionError(f"Observation {o!r} has lower probability {lower_mass!r}; CAR posterior undefined")
    mask = prior.space.mask(compatible)
    values = f.values
    envelope = PrevisionEnvelope(prior, lambda mu: np.where(mask, values - mu, 0.0))
    return greatest_root(envelope, values[mask])


def vacuous_posterior(prior: CredalSet, mvm, o: Hashable, f: Gamble) -> float:
    """The update when no state forces o and every compatible state is possible."""
    require_same_space(prior.space, f.space)
    if mvm.forcing(o):
        raise AssumptionViolatedError(f"Observation {o!r} is forced by {sorted(map(str, mvm.forcing(o)))}")
    compatible = mvm.compatible(o)
    for state in compatible:
        if prior.upper_probability([state]) <= 0:
            raise AssumptionViolatedError(f"State {state!r} compatible with {o!r} has zero upper probability")
    return f.min_over(compatible)


def observation_posterior(prior: CredalSet, mvm, o: Hashable, cap: Optional[int] = None) -> VertexCredalSet:
    """Posterior credal set of the regular extension as explicit vertices.

    Vertices are the conditionals p(.|A) for every extreme prior p and every A
    with forcing(o) <= A <= compatible(o) and p(A) > 0.
    """
    cap = get_settings().oracle_cap if cap is None else cap
    space = prior.space
    forcing = mvm.forcing(o)
    optional = sorted(mvm.compatible(o) - forcing, key=space.index)
    points = prior.extreme_points()
    count = len(points) * 2 ** len(optional)
    if count > cap:
        raise EnumerationCapExceeded("posterior vertices", count, cap)

    conditionals = []
    for point in points:
        for size in range(len(optional) + 1):
            for extra in itertools.combinations(optional, size):
                mask = space.mask(forcing.union(extra))
                mass = float(point[mask].sum())
                if mass > 0:
                    conditional = np.where(mask, point, 0.0) / mass
                    conditionals.append(MassFunction(space, conditional))
    if not conditionals:
        logger.warning(f"Observation {o!r} has zero upper probability; posterior is vacuous")
        return vacuous(space)
    return VertexCredalSet(space, tuple(conditionals))


def cur_posterior(cond: ConditionalFamily, pattern: MissingnessPattern, f: Gamble, cap: Optional[int] = None) -> float:
    """Conservative updating: the minimum over completions of the conditional lower previsions.

    Assumes the missingness of the attributes is irrelevant to the class once
    the attributes are known; that assumption cannot be checked from data.
    """
    require_same_space(cond.conditioned, f.space)
    values = [cond.lower(completion, f) for completion in pattern.completions(cap)]
    if not values:
        raise PreconditionError("The missingness pattern has no completions")
    return min(values)


def cur_classify(cond: ConditionalFamily, pattern: MissingnessPattern, cap: Optional[int] = None) -> list:
    """Classes not dominated under the conservative updating rule.

    c' dominates c'' when the lower conditional prevision of I_c' - I_c'' is
    positive for every completion.
    """
    classes = cond.conditioned
    completions = list(pattern.completions(cap))
    dominated = set()
    for better in classes:
        for worse in classes:
            if better == worse or worse in dominated:
                continue
            difference = Gamble.indicator(classes, [better]) - Gamble.indicator(classes, [worse])
            if min(cond.lower(completion, difference) for completion in completions) > 0:
                dominated.add(worse)
    return [label for label in classes if label not in dominated]
