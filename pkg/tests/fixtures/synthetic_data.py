"""Seeded generators for random models and the small textbook examples used across the tests."""

import itertools
import sys
from pathlib import Path
from typing import Optional

import numpy as np

sys.path.append(str(Path(__file__).parent.parent.parent))

from cli.formats import bundled_network_path, load_network
from imprecise.credal_set import IntervalCredalSet, LinearPrevision, VertexCredalSet, make_reachable
from imprecise.observation import MultiValuedMap
from imprecise.spaces import FiniteSpace, Gamble, MassFunction
from networks.bayesnet import BayesNet
from networks.credalnet import CredalNet
from networks.dominance import EvidenceQuery
from networks.graph import is_singly_connected, markov_blanket_plus, remove_evidence_arcs
from networks.structure import NetworkStructure


def asia() -> BayesNet:
    return load_network(bundled_network_path("asia"))


def asia_widened() -> CredalNet:
    return load_network(bundled_network_path("asia_widened"))


def positive_mass(rng: np.random.Generator, size: int, floor: float = 0.05) -> np.ndarray:
    """A strictly positive probability vector bounded away from zero."""
    raw = rng.dirichlet(np.ones(size)) + floor
    return raw / raw.sum()


def random_space(rng: np.random.Generator, name: str, max_states: int = 3) -> FiniteSpace:
    size = int(rng.integers(2, max_states + 1))
    return FiniteSpace(name, tuple(f"{name.lower()}{i}" for i in range(size)))


def random_gamble(rng: np.random.Generator, space: FiniteSpace, scale: float = 10.0) -> Gamble:
    return Gamble(space, rng.uniform(-scale, scale, size=len(space)))


def random_structure(
    rng: np.random.Generator,
    max_nodes: int = 7,
    max_states: int = 3,
    max_parents: int = 3,
    arc_probability: float = 0.4,
) -> NetworkStructure:
    n = int(rng.integers(3, max_nodes + 1))
    names = [f"N{i}" for i in range(n)]
    variables = tuple(random_space(rng, name, max_states) for name in names)
    parents = {}
    for i, name in enumerate(names):
        candidates = [earlier for earlier in names[:i] if rng.random() < arc_probability]
        parents[name] = candidates[-max_parents:]
    return NetworkStructure(variables, parents)


def random_bayes_net(
    rng: np.random.Generator, max_nodes: int = 7, max_states: int = 3, arc_probability: float = 0.4
) -> BayesNet:
    structure = random_structure(rng, max_nodes, max_states, arc_probability=arc_probability)
    tables = {
        name: np.array([positive_mass(rng, len(structure.space(name))) for _ in range(structure.row_count(name))])
        for name in structure.names
    }
    return BayesNet(structure, tables, name="random")


def random_query(rng: np.random.Generator, structure: NetworkStructure, max_missing: Optional[int] = None) -> EvidenceQuery:
    """Random class node and a random subset of the other nodes observed at random states."""
    names = list(structure.names)
    class_node = names[int(rng.integers(len(names)))]
    evidence = {}
    others = [name for name in names if name != class_node]
    rng.shuffle(others)
    for position, name in enumerate(others):
        must_observe = max_missing is not None and len(others) - position > max_missing
        if must_observe or rng.random() < 0.5:
            states = structure.space(name).elements
            evidence[name] = states[int(rng.integers(len(states)))]
    ordered = {name: evidence[name] for name in names if name in evidence}
    return EvidenceQuery(class_node, ordered)


def blanket_singly_connected(structure: NetworkStructure, query: EvidenceQuery) -> bool:
    reduced = remove_evidence_arcs(structure.graph, query.evidence)
    return is_singly_connected(reduced, markov_blanket_plus(reduced, query.class_node))


def random_vertex_credal_net(
    rng: np.random.Generator,
    max_nodes: int = 5,
    max_states: int = 2,
    max_two_vertex_rows: int = 5,
) -> CredalNet:
    """Credal net with one or two vertices per row; at most ``max_two_vertex_rows`` rows have two."""
    structure = random_structure(rng, max_nodes, max_states, max_parents=2)
    slots = [(name, row) for name in structure.names for row in range(structure.row_count(name))]
    rng.shuffle(slots)
    doubled = set(slots[:max_two_vertex_rows])
    rows = {}
    for name in structure.names:
        space = structure.space(name)
        specs = []
        for row in range(structure.row_count(name)):
            count = 2 if (name, row) in doubled else 1
            specs.append(VertexCredalSet.from_arrays(space, [positive_mass(rng, len(space)) for _ in range(count)]))
        rows[name] = tuple(specs)
    return CredalNet(structure, rows, name="random-credal")


def random_vertex_prior(rng: np.random.Generator, space: FiniteSpace, max_vertices: int = 3) -> VertexCredalSet:
    count = int(rng.integers(1, max_vertices + 1))
    return VertexCredalSet.from_arrays(space, [positive_mass(rng, len(space)) for _ in range(count)])


def random_interval_prior(rng: np.random.Generator, space: FiniteSpace, width: float = 0.1) -> IntervalCredalSet:
    center = positive_mass(rng, len(space), floor=0.2)
    lower, upper = make_reachable(np.maximum(center - width, 0.01), np.minimum(center + width, 1.0))
    return IntervalCredalSet(space, lower, upper)


def random_mvm(rng: np.random.Generator, space: FiniteSpace, n_observations: int = 3) -> MultiValuedMap:
    """Random multi-valued map with every observation produced by some state."""
    observations = FiniteSpace("obs", tuple(f"o{i}" for i in range(n_observations)))
    gamma = {x: set() for x in space}
    states = list(space.elements)
    for i, o in enumerate(observations):
        gamma[states[i % len(states)]].add(o)
    for x in space:
        for o in observations:
            if rng.random() < 0.4:
                gamma[x].add(o)
        if not gamma[x]:
            gamma[x].add(observations.elements[int(rng.integers(n_observations))])
    return MultiValuedMap(space, observations, gamma)


def naive_ok_mvm(rng: np.random.Generator, space: FiniteSpace) -> tuple:
    """A coarsening where the returned observation is produced only by states that always produce it."""
    states = list(space.elements)
    rng.shuffle(states)
    cut = int(rng.integers(1, len(states)))
    block, rest = states[:cut], states[cut:]
    observations = FiniteSpace("obs", ("block", "rest", "other"))
    gamma = {x: {"block"} for x in block}
    for x in rest:
        gamma[x] = {"rest", "other"} if rng.random() < 0.5 else {"rest"}
    if not any("other" in image for image in gamma.values()):
        gamma[rest[0]] = {"rest", "other"}
    return MultiValuedMap(space, observations, gamma), "block"


def monty_hall_map(extended: bool = False) -> MultiValuedMap:
    doors = FiniteSpace("car", (1, 2, 3))
    if extended:
        return MultiValuedMap(doors, FiniteSpace("opened", (0, 2, 3)), {1: {0, 2, 3}, 2: {0, 3}, 3: {0, 2}})
    return MultiValuedMap(doors, FiniteSpace("opened", (2, 3)), {1: {2, 3}, 2: {3}, 3: {2}})


def three_prisoners_map() -> MultiValuedMap:
    """Prisoner a asks the warden to name one of b, c who will be executed."""
    pardoned = FiniteSpace("pardoned", ("a", "b", "c"))
    named = FiniteSpace("named", ("b", "c"))
    return MultiValuedMap(pardoned, named, {"a": {"b", "c"}, "b": {"c"}, "c": {"b"}})


def uniform_prior(space: FiniteSpace) -> LinearPrevision:
    return LinearPrevision(MassFunction.uniform(space))


def all_subsets(elements) -> list:
    elements = list(elements)
    return [set(combo) for size in range(len(elements) + 1) for combo in itertools.combinations(elements, size)]
