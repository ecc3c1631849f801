"""Decision making with lower previsions: strict preference and maximality."""

from dataclasses import dataclass, field
from typing import Hashable, Mapping

from imprecise.spaces import Gamble, require_same_space
from utils.config import get_settings
from utils.errors import PreconditionError
from utils.logger import Logger

logger = Logger(__name__)

EQUIVALENT = "equivalent"
INCOMPARABLE = "incomparable"


def strict_preference(cs, fa: Gamble, fb: Gamble) -> bool:
    """a is strictly preferred to b iff the lower prevision of fa - fb is positive.

    ``cs`` is anything with a ``lower`` method on gambles (credal sets,
    joint lower previsions). No tolerance is applied to the threshold.
    """
    require_same_space(fa.space, fb.space)
    return cs.lower(fa - fb) > 0


def almost_preference(cs, fa: Gamble, fb: Gamble) -> bool:
    require_same_space(fa.space, fb.space)
    return cs.lower(fa - fb) >= 0


@dataclass
class MaximalityResult:
    maximal: list
    preferences: set = field(default_factory=set)
    relations: dict = field(default_factory=dict)

    def relation(self, first: Hashable, second: Hashable) -> str:
        return self.relations.get((first, second)) or self.relations[(second, first)]


def maximal_actions(cs, rewards: Mapping[Hashable, Gamble]) -> MaximalityResult:
    """Undominated actions under strict preference, in the order given.

    Every surviving pair is labelled equivalent when both differences have
    lower and upper prevision zero, and incomparable otherwise.
    """
    if not rewards:
        raise PreconditionError("maximal_actions needs at least one action")
    labels = list(rewards)
    first_space = rewards[labels[0]].space
    for label in labels[1:]:
        require_same_space(first_space, rewards[label].space)

    preferences = set()
    for a in labels:
        for b in labels:
            if a != b and strict_preference(cs, rewards[a], rewards[b]):
                preferences.add((a, b))

    dominated = {b for (_, b) in preferences}
    maximal = [label for label in labels if label not in dominated]

    tol = get_settings().tolerance
    relations = {}
    for i, a in enumerate(maximal):
        for b in maximal[i + 1:]:
            difference = rewards[a] - rewards[b]
            bounds = (cs.lower(difference), cs.upper(difference))
            relations[(a, b)] = EQUIVALENT if all(abs(value) <= tol for value in bounds) else INCOMPARABLE

    logger.debug(f"Maximal actions {maximal} out of {labels}")
    return MaximalityResult(maximal=maximal, preferences=preferences, relations=relations)
