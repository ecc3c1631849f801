"""Directed acyclic structure shared by Bayesian and credal networks.

Conditional tables are indexed by parent configuration in row-major order:
the parent declared last varies fastest, states in declared order.
"""

import itertools
import math
from dataclasses import dataclass, field
from typing import Hashable, Iterator, Mapping, Sequence

import networkx as nx
import numpy as np

from imprecise.spaces import FiniteSpace
from utils.errors import InvalidModelError, SpaceMismatchError
from utils.matching import did_you_mean


@dataclass(frozen=True)
class NetworkStructure:
    variables: tuple
    parents: Mapping
    graph: nx.DiGraph = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        variables = tuple(self.variables)
        names = [space.name for space in variables]
        if len(set(names)) != len(names):
            raise InvalidModelError(f"Duplicate node names in {names}")
        parents = {}
        for name in names:
            declared = tuple(self.parents.get(name, ()))
            for parent in declared:
                if parent not in names:
                    raise InvalidModelError(f"Node '{name}' has unknown parent '{parent}'{did_you_mean(parent, names)}")
            if len(set(declared)) != len(declared):
                raise InvalidModelError(f"Node '{name}' lists a parent twice: {declared}")
            parents[name] = declared
        extra = set(self.parents) - set(names)
        if extra:
            raise InvalidModelError(f"Parents given for unknown nodes {sorted(extra)}")

        graph = nx.DiGraph()
        graph.add_nodes_from(names)
        graph.add_edges_from((parent, child) for child in names for parent in parents[child])
        if not nx.is_directed_acyclic_graph(graph):
            cycle = nx.find_cycle(graph)
            raise InvalidModelError(f"Network has a directed cycle: {cycle}")

        object.__setattr__(self, "variables", variables)
        object.__setattr__(self, "parents", parents)
        object.__setattr__(self, "graph", graph)
        object.__setattr__(self, "_spaces", dict(zip(names, variables)))
        object.__setattr__(self, "_order", {name: i for i, name in enumerate(names)})

    @property
    def names(self) -> tuple:
        return tuple(space.name for space in self.variables)

    def position(self, name: str) -> int:
        self.space(name)
        return self._order[name]

    def space(self, name: str) -> FiniteSpace:
        try:
            return self._spaces[name]
        except KeyError:
            raise SpaceMismatchError(f"Unknown node '{name}'{did_you_mean(name, self._spaces)}") from None

    def check_state(self, name: str, state: Hashable) -> None:
        space = self.space(name)
        if state not in space:
            raise SpaceMismatchError(
                f"'{state}' is not a state of node '{name}'{did_you_mean(state, map(str, space.elements))}"
            )

    def parents_of(self, name: str) -> tuple:
        self.space(name)
        return self.parents[name]

    def children_of(self, name: str) -> tuple:
        self.space(name)
        return tuple(child for child in self.names if name in self.parents[child])

    def topological_order(self) -> list:
        return list(nx.lexicographical_topological_sort(self.graph, key=self._order.get))

    def row_count(self, name: str) -> int:
        return math.prod(len(self.space(parent)) for parent in self.parents_of(name))

    def parent_configurations(self, name: str) -> Iterator[tuple]:
        """Parent value tuples in table row order."""
        return itertools.product(*(self.space(parent).elements for parent in self.parents_of(name)))

    def row_index(self, name: str, assignment: Mapping[str, Hashable]) -> int:
        parents = self.parents_of(name)
        if not parents:
            return 0
        indices = [self.space(parent).index(assignment[parent]) for parent in parents]
        shape = [len(self.space(parent)) for parent in parents]
        return int(np.ravel_multi_index(indices, shape))

    def check_assignment(self, assignment: Mapping[str, Hashable], nodes: Sequence[str] = ()) -> None:
        for name, state in assignment.items():
            self.check_state(name, state)
        missing = [name for name in nodes if name not in assignment]
        if missing:
            raise SpaceMismatchError(f"Assignment does not cover nodes {missing}")

    def assignments(self, nodes: Sequence[str]) -> Iterator[dict]:
        for values in itertools.product(*(self.space(name).elements for name in nodes)):
            yield dict(zip(nodes, values))

    def assignment_count(self, nodes: Sequence[str]) -> int:
        return math.prod(len(self.space(name)) for name in nodes)
