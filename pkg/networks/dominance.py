"""Credal-dominance testing shared by Bayesian and credal networks.

Class c' credal-dominates c'' when the ratio of their joint probabilities with
the evidence exceeds 1 for every completion of the missing nodes (and every
admissible local model). When the blanket of the class node is singly
connected after removing the arcs leaving the fixed nodes, that minimum
factorises: it is the product, over the class node and its children, of
local ratios minimised independently over their own free variables. Loops
are broken by conditioning on a loop cutset and taking the minimum over its
assignments.
"""

import math
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, List, Mapping, Optional

from pydantic import BaseModel, Field

from networks.graph import find_loop_cutset, is_singly_connected, markov_blanket_plus, remove_evidence_arcs
from networks.structure import NetworkStructure
from utils.config import get_settings
from utils.errors import EnumerationCapExceeded, PreconditionError
from utils.logger import Logger

logger = Logger(__name__)

EQUIVALENT = "equivalent"
INCOMPARABLE = "incomparable"


@dataclass(frozen=True)
class EvidenceQuery:
    class_node: str
    evidence: Mapping = field(default_factory=dict)

    def validate(self, structure: NetworkStructure) -> None:
        structure.space(self.class_node)
        if self.class_node in self.evidence:
            raise PreconditionError(f"Class node '{self.class_node}' cannot be part of the evidence")
        structure.check_assignment(self.evidence)

    def missing(self, structure: NetworkStructure) -> list:
        return [name for name in structure.names if name != self.class_node and name not in self.evidence]

    def describe(self) -> str:
        observed = ",".join(f"{name}={value}" for name, value in self.evidence.items())
        return f"{self.class_node}|{observed}" if observed else self.class_node


class CutsetProduct(BaseModel):
    assignment: Dict[str, str] = Field(default_factory=dict, description="Values of the loop-cutset nodes")
    value: float = Field(..., description="Product of the local ratio factors")
    factors: Dict[str, float] = Field(default_factory=dict, description="Minimised ratio factor per node")


class PairwiseDominance(BaseModel):
    better: str
    worse: str
    value: float = Field(..., description="Minimum ratio over completions; dominance iff > 1")
    dominates: bool
    cutset: List[str] = Field(default_factory=list)
    products: List[CutsetProduct] = Field(default_factory=list)
    evaluations: int = Field(0, description="Number of local ratios evaluated")


class PosteriorInterval(BaseModel):
    state: str
    lower: float
    upper: float


class DominanceReport(BaseModel):
    kind: str = Field(..., description="bayesian or credal")
    class_node: str
    evidence: Dict[str, str] = Field(default_factory=dict)
    classes: List[str]
    undominated: List[str]
    matrix: Dict[str, Dict[str, bool]] = Field(
        default_factory=dict, description="matrix[a][b] is true when a credal-dominates b"
    )
    relations: Dict[str, str] = Field(
        default_factory=dict, description="Relation between surviving classes, keyed 'a|b'"
    )
    pairs: List[PairwiseDominance] = Field(default_factory=list)
    posterior_bounds: Optional[List[PosteriorInterval]] = None
    naive_posterior: Optional[Dict[str, float]] = None
    notes: List[str] = Field(default_factory=list)

    def pair(self, better: str, worse: str) -> PairwiseDominance:
        for pair in self.pairs:
            if pair.better == better and pair.worse == worse:
                return pair
        raise KeyError(f"No dominance test recorded for {better} vs {worse}")


ClassFactor = Callable[[Mapping], float]
ChildFactor = Callable[[str, Mapping], float]


def check_singly_connected(structure: NetworkStructure, class_node: str, fixed: Mapping) -> None:
    reduced = remove_evidence_arcs(structure.graph, fixed)
    if not is_singly_connected(reduced, markov_blanket_plus(reduced, class_node)):
        raise PreconditionError(
            f"Blanket of '{class_node}' is not singly connected with {sorted(fixed)} fixed; condition on a loop cutset"
        )


def mu_product(
    structure: NetworkStructure,
    class_node: str,
    fixed: Mapping,
    class_factor: ClassFactor,
    child_factor: ChildFactor,
    check: bool = True,
) -> tuple:
    """Product of minimised local ratios with the nodes in ``fixed`` held at their values.

    Returns ``(product, factors by node, number of ratio evaluations)``.
    """
    if class_node in fixed:
        raise PreconditionError(f"Class node '{class_node}' cannot be fixed")
    if check:
        check_singly_connected(structure, class_node, fixed)

    factors = {}
    evaluations = 0

    free = [parent for parent in structure.parents_of(class_node) if parent not in fixed]
    best = math.inf
    for values in structure.assignments(free):
        best = min(best, class_factor({**fixed, **values}))
        evaluations += 1
    factors[class_node] = best

    for child in structure.children_of(class_node):
        scope = [child] + [parent for parent in structure.parents_of(child) if parent != class_node]
        free = [name for name in scope if name not in fixed]
        best = math.inf
        for values in structure.assignments(free):
            best = min(best, child_factor(child, {**fixed, **values}))
            evaluations += 1
        factors[child] = best

    return math.prod(factors.values()), factors, evaluations


def dominance_test(
    structure: NetworkStructure,
    query: EvidenceQuery,
    better: Hashable,
    worse: Hashable,
    class_factor: ClassFactor,
    child_factor: ChildFactor,
    cap: Optional[int] = None,
) -> PairwiseDominance:
    """Minimum over loop-cutset assignments of the ratio product; strict > 1 decides."""
    cap = get_settings().enumeration_cap if cap is None else cap
    cutset = find_loop_cutset(structure.graph, query.class_node, query.evidence)
    count = structure.assignment_count(cutset)
    if count > cap:
        raise EnumerationCapExceeded(f"loop-cutset assignments over {cutset}", count, cap)

    products = []
    evaluations = 0
    for assignment in structure.assignments(cutset):
        fixed = {**query.evidence, **assignment}
        value, factors, used = mu_product(structure, query.class_node, fixed, class_factor, child_factor, check=False)
        evaluations += used
        products.append(
            CutsetProduct(
                assignment={name: str(state) for name, state in assignment.items()},
                value=value,
                factors=factors,
            )
        )
        logger.debug(f"{better} vs {worse}, cutset {assignment}: product {value:.12g} factors {factors}")

    value = min(product.value for product in products)
    return PairwiseDominance(
        better=str(better),
        worse=str(worse),
        value=value,
        dominates=value > 1,
        cutset=list(cutset),
        products=products,
        evaluations=evaluations,
    )


def classify_pairs(
    kind: str,
    structure: NetworkStructure,
    query: EvidenceQuery,
    pair_test: Callable[[Hashable, Hashable], PairwiseDominance],
) -> DominanceReport:
    """Run the pairwise test on every ordered pair of classes and collect the undominated ones."""
    classes = list(structure.space(query.class_node).elements)
    token = logger.set_query(query.describe())
    try:
        pairs = [pair_test(better, worse) for better in classes for worse in classes if better != worse]
    finally:
        logger.reset_query(token)

    labels = [str(label) for label in classes]
    matrix = {label: {other: False for other in labels} for label in labels}
    for pair in pairs:
        matrix[pair.better][pair.worse] = pair.dominates
    undominated = [label for label in labels if not any(matrix[other][label] for other in labels)]

    tol = get_settings().tolerance
    values = {(pair.better, pair.worse): pair.value for pair in pairs}
    relations = {}
    for i, first in enumerate(undominated):
        for second in undominated[i + 1:]:
            both_one = all(abs(values[key] - 1.0) <= tol for key in ((first, second), (second, first)))
            relations[f"{first}|{second}"] = EQUIVALENT if both_one else INCOMPARABLE

    logger.info(f"Classified {query.describe()} ({kind}): undominated {undominated}")
    return DominanceReport(
        kind=kind,
        class_node=query.class_node,
        evidence={name: str(state) for name, state in query.evidence.items()},
        classes=labels,
        undominated=undominated,
        matrix=matrix,
        relations=relations,
        pairs=pairs,
    )
