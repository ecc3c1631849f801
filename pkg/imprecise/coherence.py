from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence, Union

from imprecise.spaces import Gamble, require_same_space
from utils.config import get_settings
from utils.errors import InvalidModelError
from utils.logger import Logger

logger = Logger(__name__)

DEFAULT_SCALARS = (0.25, 0.5, 2.0, 3.0)


class CoherenceAxiom(Enum):
    ACCEPTS_SURE_GAINS = "L1"
    SUPER_ADDITIVITY = "L2"
    POSITIVE_HOMOGENEITY = "L3"
    SELF_CONJUGACY = "self-conjugacy"


@dataclass
class CoherenceReport:
    """Outcome of checking the coherence axioms on a finite gamble sample."""

    coherent: bool
    checked: int = 0
    axiom: Optional[CoherenceAxiom] = None
    witnesses: tuple = field(default_factory=tuple)
    message: str = ""

    def __bool__(self) -> bool:
        return self.coherent


def _as_callable(lower) -> Callable[[Gamble], float]:
    return lower.lower if hasattr(lower, "lower") else lower


def check_coherence(
    lower: Union[Callable[[Gamble], float], object],
    gambles: Sequence[Gamble],
    scalars: Sequence[float] = DEFAULT_SCALARS,
    tol: Optional[float] = None,
) -> CoherenceReport:
    """Check accepting sure gains, super-additivity and positive homogeneity.

    ``lower`` is either a callable gamble -> value or any object with a
    ``lower`` method. Super-additivity is checked on every unordered pair of
    the sample (including a gamble with itself). The first violation found is
    reported together with its witnesses.
    """
    tol = get_settings().tolerance if tol is None else tol
    evaluate = _as_callable(lower)
    gambles = list(gambles)
    if not gambles:
        return CoherenceReport(coherent=True)
    for other in gambles[1:]:
        require_same_space(gambles[0].space, other.space)
    if any(scalar <= 0 for scalar in scalars):
        raise InvalidModelError(f"Homogeneity scalars must be positive, got {list(scalars)}")

    values = [evaluate(f) for f in gambles]
    checked = 0

    for f, value in zip(gambles, values):
        checked += 1
        if value < f.min() - tol:
            return _violation(
                CoherenceAxiom.ACCEPTS_SURE_GAINS, checked, (f,),
                f"lower prevision {value!r} is below min f = {f.min()!r}",
            )

    for i, f in enumerate(gambles):
        for j in range(i, len(gambles)):
            g = gambles[j]
            checked += 1
            joint = evaluate(f + g)
            if joint < values[i] + values[j] - tol:
                return _violation(
                    CoherenceAxiom.SUPER_ADDITIVITY, checked, (f, g),
                    f"P(f+g) = {joint!r} < P(f) + P(g) = {values[i] + values[j]!r}",
                )

    for f, value in zip(gambles, values):
        for scalar in scalars:
            checked += 1
            scaled = evaluate(scalar * f)
            if abs(scaled - scalar * value) > tol * max(1.0, abs(scalar)):
                return _violation(
                    CoherenceAxiom.POSITIVE_HOMOGENEITY, checked, (f, scalar),
                    f"P({scalar}f) = {scaled!r} differs from {scalar} * P(f) = {scalar * value!r}",
                )

    logger.debug(f"Coherence check passed on {len(gambles)} gambles ({checked} checks)")
    return CoherenceReport(coherent=True, checked=checked)


def check_self_conjugacy(
    lower: Union[Callable[[Gamble], float], object],
    gambles: Sequence[Gamble],
    tol: float = 1e-12,
) -> CoherenceReport:
    """A linear prevision satisfies P(f) + P(-f) = 0 for every gamble."""
    evaluate = _as_callable(lower)
    for checked, f in enumerate(gambles, start=1):
        total = evaluate(f) + evaluate(-f)
        scale = max(1.0, float(abs(f.values).max()))
        if abs(total) > tol * scale:
            return _violation(
                CoherenceAxiom.SELF_CONJUGACY, checked, (f,),
                f"P(f) + P(-f) = {total!r}",
            )
    return CoherenceReport(coherent=True, checked=len(gambles))


def _violation(axiom: CoherenceAxiom, checked: int, witnesses: tuple, message: str) -> CoherenceReport:
    logger.debug(f"Coherence violation ({axiom.value}): {message}")
    return CoherenceReport(coherent=False, checked=checked, axiom=axiom, witnesses=witnesses, message=message)
