"""Exhaustive reference implementations for cross-checking the fast paths.

Nothing here is clever: every completion, every vertex selection and every
selection of the observation mechanism is enumerated. Enumerations beyond
the cap raise instead of sampling.
"""

import itertools
import math
from typing import Hashable, Mapping, Optional

import numpy as np

from imprecise.credal_set import CredalSet
from imprecise.spaces import Gamble, require_same_space
from networks.bayesnet import BayesNet, joint_mass
from networks.credalnet import CredalNet
from networks.dominance import EvidenceQuery
from utils.config import get_settings
from utils.errors import EnumerationCapExceeded
from utils.logger import Logger

logger = Logger(__name__)


def _cap(cap: Optional[int]) -> int:
    return get_settings().oracle_cap if cap is None else cap


def brute_min_ratio(
    net: BayesNet, query: EvidenceQuery, better: Hashable, worse: Hashable, cap: Optional[int] = None
) -> float:
    """min over completions r of p(better, e, r) / p(worse, e, r) from full joint masses."""
    query.validate(net.structure)
    cap = _cap(cap)
    missing = query.missing(net.structure)
    count = net.structure.assignment_count(missing)
    if count > cap:
        raise EnumerationCapExceeded(f"completions over {missing}", count, cap)
    best = math.inf
    for completion in net.structure.assignments(missing):
        assignment = {**query.evidence, **completion}
        numerator = joint_mass(net, {**assignment, query.class_node: better})
        denominator = joint_mass(net, {**assignment, query.class_node: worse})
        best = min(best, numerator / denominator)
    return best


def _row_vertices(net: CredalNet) -> dict:
    return {
        node: [spec.extreme_points() for spec in specs]
        for node, specs in net.effective_rows.items()
    }


def brute_credal_min_ratio(
    net: CredalNet, query: EvidenceQuery, better: Hashable, worse: Hashable, cap: Optional[int] = None
) -> float:
    """min over completions and over vertex choices of every row the completion touches.

    For a completion the ratio reads one row per node under each class value;
    every combination of extreme points of those rows is tried, so this is the
    minimum over the strong extension.
    """
    query.validate(net.structure)
    cap = _cap(cap)
    structure = net.structure
    vertices = _row_vertices(net)
    missing = query.missing(structure)

    plans = []
    total = 0
    for completion in structure.assignments(missing):
        full_better = {**query.evidence, **completion, query.class_node: better}
        full_worse = {**query.evidence, **completion, query.class_node: worse}
        rows = sorted(
            {(node, structure.row_index(node, full_better)) for node in structure.names}
            | {(node, structure.row_index(node, full_worse)) for node in structure.names}
        )
        total += math.prod(len(vertices[node][row]) for node, row in rows)
        if total > cap:
            raise EnumerationCapExceeded("vertex combinations times completions", total, cap)
        plans.append((full_better, full_worse, rows))

    best = math.inf
    for full_better, full_worse, rows in plans:
        for choice in itertools.product(*(range(len(vertices[node][row])) for node, row in rows)):
            selected = {key: vertices[key[0]][key[1]][index] for key, index in zip(rows, choice)}
            numerator = 1.0
            denominator = 1.0
            for node in structure.names:
                space = structure.space(node)
                numerator *= selected[(node, structure.row_index(node, full_better))][space.index(full_better[node])]
                denominator *= selected[(node, structure.row_index(node, full_worse))][space.index(full_worse[node])]
            best = min(best, numerator / denominator)
    logger.debug(f"Brute-force credal ratio over {total} combinations: {best!r}")
    return best


def brute_regular_extension(prior: CredalSet, mvm, o: Hashable, f: Gamble, cap: Optional[int] = None) -> float:
    """inf over prior vertices p and selections s of Gamma of E_p[f | s(x) = o].

    Pairs with p(s(x) = o) = 0 are skipped; if every pair is skipped the
    observation has zero upper probability and the vacuous value is returned.
    """
    require_same_space(prior.space, f.space)
    cap = _cap(cap)
    space = prior.space
    images = [sorted(mvm.image(x), key=mvm.obs_space.index) for x in space]
    points = prior.extreme_points()
    count = len(points) * math.prod(len(image) for image in images)
    if count > cap:
        raise EnumerationCapExceeded("prior vertices times selections", count, cap)

    best = math.inf
    for selection in itertools.product(*images):
        mask = np.array([chosen == o for chosen in selection])
        for point in points:
            mass = float(point[mask].sum())
            if mass > 0:
                best = min(best, float(point[mask] @ f.values[mask]) / mass)
    if best == math.inf:
        return f.min()
    return best
