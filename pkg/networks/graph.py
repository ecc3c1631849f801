from typing import Hashable, Iterable

import networkx as nx

from utils.errors import SpaceMismatchError
from utils.logger import Logger

logger = Logger(__name__)


def markov_blanket_plus(graph: nx.DiGraph, node: Hashable) -> set:
    """The node together with its parents, children and the children's other parents."""
    if node not in graph:
        raise SpaceMismatchError(f"Unknown node '{node}'")
    blanket = {node}
    blanket.update(graph.predecessors(node))
    for child in graph.successors(node):
        blanket.add(child)
        blanket.update(graph.predecessors(child))
    return blanket


def remove_evidence_arcs(graph: nx.DiGraph, nodes: Iterable[Hashable]) -> nx.DiGraph:
    """Copy of the graph without the arcs leaving ``nodes``."""
    reduced = graph.copy()
    for node in nodes:
        reduced.remove_edges_from(list(graph.out_edges(node)))
    return reduced


def is_singly_connected(graph: nx.DiGraph, nodes: Iterable[Hashable] = None) -> bool:
    """Whether the undirected skeleton of the induced subgraph has no cycles."""
    subgraph = graph if nodes is None else graph.subgraph(nodes)
    if subgraph.number_of_nodes() == 0:
        return True
    return nx.is_forest(subgraph.to_undirected(as_view=True))


def find_loop_cutset(graph: nx.DiGraph, class_node: Hashable, evidence: Iterable[Hashable]) -> list:
    """Greedy loop cutset among the missing nodes of the class node's blanket.

    Repeatedly picks, among the non-evidence nodes on a cycle of the blanket's
    skeleton that still have an arc to another blanket node, the one of
    highest degree (ties go to the node declared first) and removes its
    out-arcs. The result is valid but not necessarily minimal.
    """
    evidence = set(evidence)
    order = {node: i for i, node in enumerate(graph.nodes)}
    reduced = remove_evidence_arcs(graph, evidence)
    cutset = []
    while True:
        blanket = markov_blanket_plus(reduced, class_node)
        if is_singly_connected(reduced, blanket):
            break
        skeleton = reduced.subgraph(blanket).to_undirected()
        on_cycle = set().union(*(set(cycle) for cycle in nx.cycle_basis(skeleton)))
        candidates = [
            node for node in on_cycle
            if node != class_node
            and node not in evidence
            and any(child in blanket for child in reduced.successors(node))
        ]
        chosen = min(candidates, key=lambda node: (-skeleton.degree(node), order[node]))
        cutset.append(chosen)
        reduced.remove_edges_from(list(reduced.out_edges(chosen)))
        logger.debug(f"Loop cutset for '{class_node}': added '{chosen}'")
    return sorted(cutset, key=order.get)


def is_valid_cutset(graph: nx.DiGraph, class_node: Hashable, evidence: Iterable[Hashable], cutset: Iterable[Hashable]) -> bool:
    cutset = set(cutset)
    if class_node in cutset:
        return False
    reduced = remove_evidence_arcs(graph, set(evidence) | cutset)
    return is_singly_connected(reduced, markov_blanket_plus(reduced, class_node))
