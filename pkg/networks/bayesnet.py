"""Bayesian networks with strictly positive conditional tables and their credal classifier."""

import math
from collections.abc import Mapping as MappingABC
from dataclasses import dataclass
from typing import Hashable, Iterator, Mapping, Optional

import networkx as nx
import numpy as np

from imprecise.conditioning import ConditionalFamily
from imprecise.credal_set import LinearPrevision
from imprecise.observation import MissingnessPattern
from imprecise.spaces import FiniteSpace, MassFunction
from networks.dominance import (
    DominanceReport,
    EvidenceQuery,
    PairwiseDominance,
    PosteriorInterval,
    classify_pairs,
    dominance_test,
)
from networks.dominance import mu_product as _mu_product
from networks.graph import markov_blanket_plus
from networks.structure import NetworkStructure
from utils.config import get_settings
from utils.errors import EnumerationCapExceeded, InvalidModelError
from utils.logger import Logger

logger = Logger(__name__)


@dataclass(frozen=True, eq=False)
class BayesNet:
    """Structure plus one table per node of shape (parent configurations, states)."""

    structure: NetworkStructure
    tables: Mapping
    name: str = "network"

    def __post_init__(self):
        tol = get_settings().tolerance
        tables = {}
        for node in self.structure.names:
            if node not in self.tables:
                raise InvalidModelError(f"Node '{node}' has no conditional table")
            table = np.array(self.tables[node], dtype=float)
            expected = (self.structure.row_count(node), len(self.structure.space(node)))
            if table.shape != expected:
                raise InvalidModelError(f"Table of '{node}' has shape {table.shape}, expected {expected}")
            for row, configuration in enumerate(self.structure.parent_configurations(node)):
                label = self._row_label(node, configuration)
                if np.any(table[row] <= 0):
                    raise InvalidModelError(f"Row {label} of '{node}' has non-positive entries: {table[row].tolist()}")
                total = math.fsum(table[row])
                if abs(total - 1.0) > tol:
                    raise InvalidModelError(f"Row {label} of '{node}' sums to {total!r}, not 1")
            table.flags.writeable = False
            tables[node] = table
        extra = set(self.tables) - set(self.structure.names)
        if extra:
            raise InvalidModelError(f"Tables given for unknown nodes {sorted(extra)}")
        object.__setattr__(self, "tables", tables)

    def _row_label(self, node: str, configuration: tuple) -> str:
        parents = self.structure.parents_of(node)
        if not parents:
            return "[]"
        return "[" + ", ".join(f"{parent}={value}" for parent, value in zip(parents, configuration)) + "]"

    def row(self, node: str, assignment: Mapping) -> np.ndarray:
        return self.tables[node][self.structure.row_index(node, assignment)]

    def probability(self, node: str, state: Hashable, assignment: Mapping) -> float:
        return float(self.row(node, assignment)[self.structure.space(node).index(state)])

    def cpt(self, node: str, configuration: tuple = ()) -> MassFunction:
        parents = self.structure.parents_of(node)
        return MassFunction(self.structure.space(node), self.row(node, dict(zip(parents, configuration))))


def joint_mass(net: BayesNet, assignment: Mapping) -> float:
    net.structure.check_assignment(assignment, net.structure.names)
    return math.prod(net.probability(node, assignment[node], assignment) for node in net.structure.names)


def _class_factor(net: BayesNet, class_node: str, better: Hashable, worse: Hashable):
    def factor(assignment: Mapping) -> float:
        return net.probability(class_node, better, assignment) / net.probability(class_node, worse, assignment)

    return factor


def _child_factor(net: BayesNet, class_node: str, better: Hashable, worse: Hashable):
    def factor(child: str, assignment: Mapping) -> float:
        state = assignment[child]
        numerator = net.probability(child, state, {**assignment, class_node: better})
        denominator = net.probability(child, state, {**assignment, class_node: worse})
        return numerator / denominator

    return factor


def mu_product(net: BayesNet, query: EvidenceQuery, better: Hashable, worse: Hashable, cutset_assignment: Mapping = None) -> float:
    """Ratio product for one loop-cutset assignment; the blanket must be singly connected."""
    query.validate(net.structure)
    fixed = {**query.evidence, **(cutset_assignment or {})}
    value, _, _ = _mu_product(
        net.structure,
        query.class_node,
        fixed,
        _class_factor(net, query.class_node, better, worse),
        _child_factor(net, query.class_node, better, worse),
    )
    return value


def credal_dominance(
    net: BayesNet, query: EvidenceQuery, better: Hashable, worse: Hashable, cap: Optional[int] = None
) -> PairwiseDominance:
    query.validate(net.structure)
    net.structure.check_state(query.class_node, better)
    net.structure.check_state(query.class_node, worse)
    return dominance_test(
        net.structure,
        query,
        better,
        worse,
        _class_factor(net, query.class_node, better, worse),
        _child_factor(net, query.class_node, better, worse),
        cap,
    )


def posterior_bounds(net: BayesNet, query: EvidenceQuery, cap: Optional[int] = None) -> dict:
    """[min, max] over completions of the missing nodes of p(c | e, r), for every class c.

    The class posterior given every other node depends only on the class
    node's Markov blanket, so only the missing blanket nodes are enumerated.
    """
    query.validate(net.structure)
    cap = get_settings().enumeration_cap if cap is None else cap
    structure = net.structure
    blanket = markov_blanket_plus(structure.graph, query.class_node)
    missing = [name for name in query.missing(structure) if name in blanket]
    count = structure.assignment_count(missing)
    if count > cap:
        raise EnumerationCapExceeded(f"completions over {missing}", count, cap)

    classes = structure.space(query.class_node).elements
    children = structure.children_of(query.class_node)
    low = np.full(len(classes), np.inf)
    high = np.full(len(classes), -np.inf)
    for completion in structure.assignments(missing):
        assignment = {**query.evidence, **completion}
        scores = np.empty(len(classes))
        for i, label in enumerate(classes):
            full = {**assignment, query.class_node: label}
            scores[i] = net.probability(query.class_node, label, full) * math.prod(
                net.probability(child, full[child], full) for child in children
            )
        posterior = scores / scores.sum()
        low = np.minimum(low, posterior)
        high = np.maximum(high, posterior)
    logger.debug(f"Posterior bounds over {count} completions of {missing}")
    return {label: (float(low[i]), float(high[i])) for i, label in enumerate(classes)}


def naive_posterior(net: BayesNet, query: EvidenceQuery, cap: Optional[int] = None) -> dict:
    """p(c | e) with the missing nodes summed out (as if they were missing at random).

    Nodes that are not ancestors of the class or evidence nodes sum out to one
    and are skipped.
    """
    query.validate(net.structure)
    cap = get_settings().enumeration_cap if cap is None else cap
    structure = net.structure
    relevant = {query.class_node, *query.evidence}
    for node in list(relevant):
        relevant |= nx.ancestors(structure.graph, node)
    missing = [name for name in query.missing(structure) if name in relevant]
    count = structure.assignment_count(missing) * len(structure.space(query.class_node))
    if count > cap:
        raise EnumerationCapExceeded(f"summation over {missing}", count, cap)

    nodes = [name for name in structure.names if name in relevant]
    classes = structure.space(query.class_node).elements
    totals = np.zeros(len(classes))
    for completion in structure.assignments(missing):
        for i, label in enumerate(classes):
            full = {**query.evidence, **completion, query.class_node: label}
            totals[i] += math.prod(net.probability(node, full[node], full) for node in nodes)
    posterior = totals / totals.sum()
    return {label: float(posterior[i]) for i, label in enumerate(classes)}


class _ClassPosteriors(MappingABC):
    """Lazy rows p(C | all other nodes), keyed by attribute tuples in declared order."""

    def __init__(self, net: BayesNet, class_node: str, attributes: tuple):
        self.net = net
        self.class_node = class_node
        self.attributes = attributes
        self.space = net.structure.space(class_node)

    def __getitem__(self, key: tuple) -> LinearPrevision:
        if len(key) != len(self.attributes):
            raise KeyError(key)
        assignment = dict(zip(self.attributes, key))
        for name, value in assignment.items():
            if value not in self.net.structure.space(name):
                raise KeyError(key)
        scores = []
        for label in self.space.elements:
            full = {**assignment, self.class_node: label}
            scores.append(joint_mass(self.net, full))
        scores = np.array(scores)
        return LinearPrevision(MassFunction(self.space, scores / scores.sum()))

    def __iter__(self) -> Iterator[tuple]:
        for values in self.net.structure.assignments(self.attributes):
            yield tuple(values[name] for name in self.attributes)

    def __len__(self) -> int:
        return self.net.structure.assignment_count(self.attributes)


def attribute_names(net: BayesNet, class_node: str) -> tuple:
    return tuple(name for name in net.structure.names if name != class_node)


def class_family(net: BayesNet, class_node: str, cap: Optional[int] = None) -> ConditionalFamily:
    """The precise conditionals of the class given every attribute configuration."""
    cap = get_settings().enumeration_cap if cap is None else cap
    attributes = attribute_names(net, class_node)
    count = net.structure.assignment_count(attributes)
    if count > cap:
        raise EnumerationCapExceeded("attribute configurations", count, cap)
    conditioning = FiniteSpace.product(*(net.structure.space(name) for name in attributes), name="attributes")
    return ConditionalFamily(conditioning, net.structure.space(class_node), _ClassPosteriors(net, class_node, attributes))


def evidence_pattern(net: BayesNet, query: EvidenceQuery) -> MissingnessPattern:
    attributes = attribute_names(net, query.class_node)
    spaces = tuple(net.structure.space(name) for name in attributes)
    observed = {attributes.index(name): value for name, value in query.evidence.items()}
    return MissingnessPattern(spaces, observed)


def classify(
    net: BayesNet,
    query: EvidenceQuery,
    bounds: bool = False,
    naive: bool = False,
    cap: Optional[int] = None,
) -> DominanceReport:
    query.validate(net.structure)
    report = classify_pairs(
        "bayesian",
        net.structure,
        query,
        lambda better, worse: credal_dominance(net, query, better, worse, cap),
    )
    if bounds:
        report.posterior_bounds = [
            PosteriorInterval(state=str(label), lower=low, upper=high)
            for label, (low, high) in posterior_bounds(net, query, cap).items()
        ]
    if naive:
        report.naive_posterior = {str(label): value for label, value in naive_posterior(net, query, cap).items()}
    return report

