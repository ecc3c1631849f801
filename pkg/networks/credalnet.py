"""Credal networks: one credal set per node and parent configuration, under strong independence.

Rows are specified separately, so the minimum of the completion ratio over
the strong extension is again a product of local minima: the class row
contributes its minimum ratio and every child contributes its lower
probability under c' divided by its upper probability under c''.
"""

from dataclasses import dataclass
from typing import Hashable, Mapping, Optional

import numpy as np

from imprecise.credal_set import (
    CredalSet,
    IntervalCredalSet,
    LinearPrevision,
    PolytopeCredalSet,
    VertexCredalSet,
    make_reachable,
    reachability_check,
)
from networks.bayesnet import BayesNet
from networks.dominance import DominanceReport, EvidenceQuery, PairwiseDominance, classify_pairs, dominance_test
from networks.dominance import mu_product as _mu_product
from networks.structure import NetworkStructure
from solvers.fractional import FractionalProgram, min_ratio
from utils.config import get_settings
from utils.errors import InvalidModelError, SpaceMismatchError
from utils.logger import Logger

logger = Logger(__name__)

__all__ = [
    "CredalNet",
    "reachability_check",
    "local_bounds",
    "min_local_ratio",
    "lmu_product",
    "credal_dominance_credal",
    "classify_credal",
    "from_bayes",
    "widen",
]


def _check_positive(spec: CredalSet, label: str, margin: float) -> CredalSet:
    if isinstance(spec, LinearPrevision):
        positive = bool(np.all(spec.mass.probs > 0))
    elif isinstance(spec, VertexCredalSet):
        positive = all(bool(np.all(point.probs > 0)) for point in spec.points)
    elif isinstance(spec, IntervalCredalSet):
        positive = bool(np.all(spec.lower_bounds > 0))
    elif isinstance(spec, PolytopeCredalSet):
        clipped = spec.with_margin(margin)
        logger.debug(f"Polytope row {label} restricted to p >= {margin}")
        return clipped
    else:
        raise InvalidModelError(f"Unsupported local credal set {type(spec).__name__} in row {label}")
    if not positive:
        raise InvalidModelError(f"Row {label} admits a mass function with a zero entry")
    return spec


@dataclass(frozen=True, eq=False)
class CredalNet:
    structure: NetworkStructure
    rows: Mapping
    name: str = "network"

    def __post_init__(self):
        margin = get_settings().polytope_margin
        rows = {}
        effective = {}
        for node in self.structure.names:
            if node not in self.rows:
                raise InvalidModelError(f"Node '{node}' has no local credal sets")
            specs = tuple(self.rows[node])
            if len(specs) != self.structure.row_count(node):
                raise InvalidModelError(
                    f"Node '{node}' has {len(specs)} rows, expected {self.structure.row_count(node)}"
                )
            space = self.structure.space(node)
            checked = []
            for configuration, spec in zip(self.structure.parent_configurations(node), specs):
                label = f"{node}{list(configuration)}"
                if spec.space != space:
                    raise SpaceMismatchError(f"Row {label} is defined on '{spec.space.name}', not '{space.name}'")
                checked.append(_check_positive(spec, label, margin))
            rows[node] = specs
            effective[node] = tuple(checked)
        extra = set(self.rows) - set(self.structure.names)
        if extra:
            raise InvalidModelError(f"Rows given for unknown nodes {sorted(extra)}")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_effective", effective)

    def local(self, node: str, assignment: Mapping) -> CredalSet:
        """The row in force for an assignment, with polytopes kept away from zero."""
        return self._effective[node][self.structure.row_index(node, assignment)]

    @property
    def effective_rows(self) -> dict:
        return dict(self._effective)

    @property
    def is_precise(self) -> bool:
        return all(isinstance(spec, LinearPrevision) for specs in self.rows.values() for spec in specs)


def local_bounds(spec: CredalSet, state: Hashable) -> tuple:
    """Lower and upper probability of a single state under a local credal set."""
    return spec.probability_bounds(state)


def min_local_ratio(spec: CredalSet, better: Hashable, worse: Hashable) -> float:
    """Exact minimum of p(better) / p(worse) over the local credal set."""
    i, j = spec.space.index(better), spec.space.index(worse)
    if i == j:
        return 1.0
    if isinstance(spec, LinearPrevision):
        return float(spec.mass.probs[i] / spec.mass.probs[j])
    if isinstance(spec, VertexCredalSet):
        return min(float(point.probs[i] / point.probs[j]) for point in spec.points)
    if isinstance(spec, IntervalCredalSet):
        # Reachable intervals attain both bounds in one mass function
        return float(spec.lower_bounds[i] / spec.upper_bounds[j])
    if isinstance(spec, PolytopeCredalSet):
        n = len(spec.space)
        program = FractionalProgram(np.eye(n)[i], 0.0, np.eye(n)[j], 0.0, spec.full_constraints)
        return min_ratio(program).value
    raise InvalidModelError(f"Unsupported local credal set {type(spec).__name__}")


def _class_factor(net: CredalNet, class_node: str, better: Hashable, worse: Hashable):
    def factor(assignment: Mapping) -> float:
        return min_local_ratio(net.local(class_node, assignment), better, worse)

    return factor


def _child_factor(net: CredalNet, class_node: str, better: Hashable, worse: Hashable):
    def factor(child: str, assignment: Mapping) -> float:
        state = assignment[child]
        lower, _ = local_bounds(net.local(child, {**assignment, class_node: better}), state)
        _, upper = local_bounds(net.local(child, {**assignment, class_node: worse}), state)
        return lower / upper

    return factor


def lmu_product(
    net: CredalNet, query: EvidenceQuery, better: Hashable, worse: Hashable, cutset_assignment: Mapping = None
) -> float:
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


def credal_dominance_credal(
    net: CredalNet, query: EvidenceQuery, better: Hashable, worse: Hashable, cap: Optional[int] = None
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


def classify_credal(net: CredalNet, query: EvidenceQuery, cap: Optional[int] = None) -> DominanceReport:
    query.validate(net.structure)
    return classify_pairs(
        "credal",
        net.structure,
        query,
        lambda better, worse: credal_dominance_credal(net, query, better, worse, cap),
    )


def from_bayes(net: BayesNet) -> CredalNet:
    """The degenerate credal network whose local sets are the Bayesian rows."""
    rows = {
        node: tuple(
            LinearPrevision(net.cpt(node, configuration))
            for configuration in net.structure.parent_configurations(node)
        )
        for node in net.structure.names
    }
    return CredalNet(net.structure, rows, name=net.name)


def widen(net: BayesNet, delta: float, floor: float = 1e-3) -> CredalNet:
    """Replace every row p by reachable intervals around [p - delta, p + delta].

    Lower bounds never drop below ``min(floor, p)`` so every row stays
    strictly positive and still contains p.
    """
    if delta < 0:
        raise InvalidModelError(f"Widening must be non-negative, got {delta}")
    rows = {}
    for node in net.structure.names:
        space = net.structure.space(node)
        specs = []
        for row in net.tables[node]:
            lower = np.maximum(row - delta, np.minimum(floor, row))
            upper = np.minimum(row + delta, 1.0)
            lower, upper = make_reachable(lower, upper)
            specs.append(IntervalCredalSet(space, lower, upper))
        rows[node] = tuple(specs)
    return CredalNet(net.structure, rows, name=f"{net.name}-widened")
