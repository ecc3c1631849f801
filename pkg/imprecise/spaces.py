import itertools
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, Optional

import numpy as np

from utils.config import get_settings
from utils.errors import InvalidModelError, SpaceMismatchError


def _frozen(values: Iterable[float]) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.flags.writeable = False
    return array


@dataclass(frozen=True)
class FiniteSpace:
    """A named finite possibility space.

    The order of ``elements`` is the indexing authority for every gamble and
    mass function defined on the space.
    """

    name: str
    elements: tuple
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        elements = tuple(self.elements)
        object.__setattr__(self, "elements", elements)
        if not elements:
            raise InvalidModelError(f"Space '{self.name}' has no elements")
        index = {element: position for position, element in enumerate(elements)}
        if len(index) != len(elements):
            raise InvalidModelError(f"Space '{self.name}' has duplicate elements: {elements}")
        object.__setattr__(self, "_index", index)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __contains__(self, element: Hashable) -> bool:
        return element in self._index

    def index(self, element: Hashable) -> int:
        try:
            return self._index[element]
        except KeyError:
            raise SpaceMismatchError(f"'{element}' is not an element of space '{self.name}'") from None

    def mask(self, subset: Iterable[Hashable]) -> np.ndarray:
        mask = np.zeros(len(self), dtype=bool)
        for element in subset:
            mask[self.index(element)] = True
        return mask

    def subset(self, mask: np.ndarray) -> frozenset:
        return frozenset(element for element, keep in zip(self.elements, mask) if keep)

    @classmethod
    def product(cls, *spaces: "FiniteSpace", name: Optional[str] = None) -> "FiniteSpace":
        """Cartesian product with tuple elements, last factor varying fastest."""
        if name is None:
            name = "x".join(space.name for space in spaces)
        return cls(name, tuple(itertools.product(*(space.elements for space in spaces))))


def require_same_space(first: FiniteSpace, second: FiniteSpace) -> None:
    if first != second:
        raise SpaceMismatchError(f"Space mismatch: '{first.name}' vs '{second.name}'")


@dataclass(frozen=True, eq=False)
class Gamble:
    """A bounded real-valued reward on a finite space."""

    space: FiniteSpace
    values: np.ndarray

    def __post_init__(self):
        values = _frozen(self.values).reshape(-1)
        if values.shape[0] != len(self.space):
            raise InvalidModelError(
                f"Gamble on '{self.space.name}' needs {len(self.space)} values, got {values.shape[0]}"
            )
        if not np.all(np.isfinite(values)):
            raise InvalidModelError(f"Gamble on '{self.space.name}' has non-finite values")
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(cls, space: FiniteSpace, values: Mapping[Hashable, float], default: float = 0.0) -> "Gamble":
        return cls(space, [values.get(element, default) for element in space.elements])

    @classmethod
    def from_function(cls, space: FiniteSpace, func: Callable[[Any], float]) -> "Gamble":
        return cls(space, [func(element) for element in space.elements])

    @classmethod
    def constant(cls, space: FiniteSpace, value: float) -> "Gamble":
        return cls(space, np.full(len(space), float(value)))

    @classmethod
    def indicator(cls, space: FiniteSpace, subset: Iterable[Hashable]) -> "Gamble":
        return cls(space, space.mask(subset).astype(float))

    def __getitem__(self, element: Hashable) -> float:
        return float(self.values[self.space.index(element)])

    def min(self) -> float:
        return float(self.values.min())

    def max(self) -> float:
        return float(self.values.max())

    def min_over(self, subset: Iterable[Hashable]) -> float:
        return float(self.values[self.space.mask(subset)].min())

    def max_over(self, subset: Iterable[Hashable]) -> float:
        return float(self.values[self.space.mask(subset)].max())

    def _combine(self, other, op) -> "Gamble":
        if isinstance(other, Gamble):
            require_same_space(self.space, other.space)
            return Gamble(self.space, op(self.values, other.values))
        return Gamble(self.space, op(self.values, float(other)))

    def __add__(self, other):
        return self._combine(other, np.add)

    __radd__ = __add__

    def __sub__(self, other):
        return self._combine(other, np.subtract)

    def __rsub__(self, other):
        return Gamble(self.space, float(other) - self.values)

    def __mul__(self, other):
        return self._combine(other, np.multiply)

    __rmul__ = __mul__

    def __neg__(self) -> "Gamble":
        return Gamble(self.space, -self.values)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Gamble):
            return NotImplemented
        return self.space == other.space and bool(np.array_equal(self.values, other.values))

    def __hash__(self) -> int:
        return hash((self.space, self.values.tobytes()))

    def __repr__(self) -> str:
        return f"Gamble({self.space.name}, {self.values.tolist()})"


@dataclass(frozen=True, eq=False)
class MassFunction:
    space: FiniteSpace
    probs: np.ndarray

    def __post_init__(self):
        probs = _frozen(self.probs).reshape(-1)
        if probs.shape[0] != len(self.space):
            raise InvalidModelError(
                f"Mass function on '{self.space.name}' needs {len(self.space)} values, got {probs.shape[0]}"
            )
        if np.any(probs < 0) or not np.all(np.isfinite(probs)):
            raise InvalidModelError(f"Mass function on '{self.space.name}' has negative entries: {probs.tolist()}")
        total = math.fsum(probs)
        if abs(total - 1.0) > get_settings().tolerance:
            raise InvalidModelError(f"Mass function on '{self.space.name}' sums to {total!r}, not 1")
        object.__setattr__(self, "probs", probs)

    @classmethod
    def from_mapping(cls, space: FiniteSpace, probs: Mapping[Hashable, float]) -> "MassFunction":
        return cls(space, [probs.get(element, 0.0) for element in space.elements])

    @classmethod
    def uniform(cls, space: FiniteSpace, support: Optional[Iterable[Hashable]] = None) -> "MassFunction":
        mask = np.ones(len(space), dtype=bool) if support is None else space.mask(support)
        return cls(space, mask / mask.sum())

    @classmethod
    def degenerate(cls, space: FiniteSpace, element: Hashable) -> "MassFunction":
        probs = np.zeros(len(space))
        probs[space.index(element)] = 1.0
        return cls(space, probs)

    def __getitem__(self, element: Hashable) -> float:
        return float(self.probs[self.space.index(element)])

    def expectation(self, f: Gamble) -> float:
        require_same_space(self.space, f.space)
        return float(self.probs @ f.values)

    def probability(self, subset: Iterable[Hashable]) -> float:
        return float(self.probs[self.space.mask(subset)].sum())

    def __eq__(self, other) -> bool:
        if not isinstance(other, MassFunction):
            return NotImplemented
        return self.space == other.space and bool(np.array_equal(self.probs, other.probs))

    def __hash__(self) -> int:
        return hash((self.space, self.probs.tobytes()))

    def __repr__(self) -> str:
        return f"MassFunction({self.space.name}, {self.probs.tolist()})"


def lift(f: Gamble, product: FiniteSpace, axis: int) -> Gamble:
    """Extend a gamble on one coordinate of a product space to the whole product."""
    return Gamble(product, [f[element[axis]] for element in product.elements])


def coordinate_event(product: FiniteSpace, axis: int, value: Hashable) -> np.ndarray:
    """Mask of the product elements whose ``axis`` coordinate equals ``value``."""
    return np.array([element[axis] == value for element in product.elements], dtype=bool)
