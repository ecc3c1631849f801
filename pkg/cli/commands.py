"""Command implementations behind the CLI.

Every command builds a pydantic report and renders it either as JSON or as a
plain-text table. Rendering is deterministic so repeated runs print the same
bytes.
"""

import json
from typing import Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, Field

from cli.formats import QueryFile, QueryOptions, load_network, load_query, network_schema
from networks.bayesnet import BayesNet, classify, naive_posterior, posterior_bounds, credal_dominance
from networks.credalnet import CredalNet, classify_credal, credal_dominance_credal
from networks.dominance import DominanceReport, EvidenceQuery, PairwiseDominance, PosteriorInterval
from utils.errors import ModelValidationError, NetworkFormatError, PreconditionError
from utils.logger import Logger

logger = Logger(__name__)

Network = Union[BayesNet, CredalNet]


class PosteriorReport(BaseModel):
    class_node: str
    evidence: Dict[str, str] = Field(default_factory=dict)
    intervals: List[PosteriorInterval]


class NaiveReport(BaseModel):
    class_node: str
    evidence: Dict[str, str] = Field(default_factory=dict)
    posterior: Dict[str, float]


class ValidationReport(BaseModel):
    name: str
    kind: str
    nodes: Dict[str, List[str]]
    parents: Dict[str, List[str]]
    rows: Dict[str, int] = Field(description="Number of table rows per node")
    precise: bool


def fmt(value: float) -> str:
    return f"{value:.12g}"


def parse_evidence(text: Optional[str]) -> Dict[str, str]:
    """Parse ``K=V,K=V`` into an ordered mapping."""
    evidence: Dict[str, str] = {}
    if not text:
        return evidence
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        name, sep, value = item.partition("=")
        if not sep or not name.strip() or not value.strip():
            raise NetworkFormatError(f"--evidence: expected K=V, got '{item}'")
        if name.strip() in evidence:
            raise NetworkFormatError(f"--evidence: node '{name.strip()}' given twice")
        evidence[name.strip()] = value.strip()
    return evidence


def _load(net: Optional[str]) -> Network:
    if not net:
        raise NetworkFormatError("no network file given (use --net)")
    try:
        return load_network(net)
    except FileNotFoundError:
        raise NetworkFormatError(f"network file '{net}' does not exist") from None


def resolve_query(
    net: Network,
    class_node: Optional[str] = None,
    evidence: Optional[str] = None,
    query: Optional[str] = None,
    cap: Optional[int] = None,
) -> Tuple[EvidenceQuery, QueryOptions]:
    """Merge a query file with command-line flags, flags taking precedence."""
    if query:
        try:
            spec = load_query(query)
        except FileNotFoundError:
            raise NetworkFormatError(f"query file '{query}' does not exist") from None
    else:
        if not class_node:
            raise ModelValidationError("no class node given (use --class or --query)")
        spec = QueryFile(class_node=class_node)

    options = spec.options.model_copy()
    if cap is not None:
        options.cap = cap
    merged = dict(spec.evidence)
    merged.update(parse_evidence(evidence))
    spec = QueryFile(class_node=class_node or spec.class_node, evidence=merged, options=options)
    return spec.to_query(net), options


def classify_report(
    net: Network,
    query: EvidenceQuery,
    bounds: bool = False,
    naive: bool = False,
    cap: Optional[int] = None,
) -> DominanceReport:
    if isinstance(net, BayesNet):
        return classify(net, query, bounds=bounds, naive=naive, cap=cap)
    report = classify_credal(net, query, cap=cap)
    if bounds or naive:
        report.notes.append("posterior bounds and the naive posterior are only computed for Bayesian networks")
    return report


def _require_bayesian(net: Network, what: str) -> BayesNet:
    if not isinstance(net, BayesNet):
        raise PreconditionError(f"{what} needs a Bayesian network; '{net.name}' is credal")
    return net


def run_classify(
    net: str,
    class_node: Optional[str] = None,
    evidence: Optional[str] = None,
    query: Optional[str] = None,
    cap: Optional[int] = None,
    bounds: bool = False,
    naive: bool = False,
    output: str = "table",
) -> str:
    model = _load(net)
    evidence_query, options = resolve_query(model, class_node, evidence, query, cap)
    report = classify_report(
        model,
        evidence_query,
        bounds=bounds or options.bounds,
        naive=naive or options.naive,
        cap=options.cap,
    )
    return render(report, output, title=f"{model.name} ({report.kind})")


def run_dominance(
    net: str,
    better: str,
    worse: str,
    class_node: Optional[str] = None,
    evidence: Optional[str] = None,
    query: Optional[str] = None,
    cap: Optional[int] = None,
    output: str = "table",
) -> str:
    model = _load(net)
    evidence_query, options = resolve_query(model, class_node, evidence, query, cap)
    if isinstance(model, BayesNet):
        result = credal_dominance(model, evidence_query, better, worse, options.cap)
    else:
        result = credal_dominance_credal(model, evidence_query, better, worse, options.cap)
    return render(result, output)


def run_posterior(
    net: str,
    class_node: Optional[str] = None,
    evidence: Optional[str] = None,
    query: Optional[str] = None,
    cap: Optional[int] = None,
    output: str = "table",
) -> str:
    model = _require_bayesian(_load(net), "posterior")
    evidence_query, options = resolve_query(model, class_node, evidence, query, cap)
    bounds = posterior_bounds(model, evidence_query, options.cap)
    report = PosteriorReport(
        class_node=evidence_query.class_node,
        evidence={name: str(value) for name, value in evidence_query.evidence.items()},
        intervals=[PosteriorInterval(state=str(label), lower=low, upper=high) for label, (low, high) in bounds.items()],
    )
    return render(report, output)


def run_naive(
    net: str,
    class_node: Optional[str] = None,
    evidence: Optional[str] = None,
    query: Optional[str] = None,
    cap: Optional[int] = None,
    output: str = "table",
) -> str:
    model = _require_bayesian(_load(net), "naive")
    evidence_query, options = resolve_query(model, class_node, evidence, query, cap)
    posterior = naive_posterior(model, evidence_query, options.cap)
    report = NaiveReport(
        class_node=evidence_query.class_node,
        evidence={name: str(value) for name, value in evidence_query.evidence.items()},
        posterior={str(label): value for label, value in posterior.items()},
    )
    return render(report, output)


def validation_report(model: Network) -> ValidationReport:
    structure = model.structure
    return ValidationReport(
        name=model.name,
        kind="bayesian" if isinstance(model, BayesNet) else "credal",
        nodes={name: [str(state) for state in structure.space(name).elements] for name in structure.names},
        parents={name: list(structure.parents_of(name)) for name in structure.names},
        rows={name: structure.row_count(name) for name in structure.names},
        precise=isinstance(model, BayesNet) or model.is_precise,
    )


def run_validate(net: Optional[str] = None, schema: bool = False, output: str = "table") -> str:
    if schema:
        return json.dumps(network_schema(), indent=2, sort_keys=True)
    return render(validation_report(_load(net)), output)


def run_demo(name: str, output: str = "table") -> str:
    if name == "asia":
        from demo.asia import asia_demo, format_asia_report

        report = asia_demo()
        return report.model_dump_json(indent=2) if output == "json" else format_asia_report(report)
    if name == "montyhall":
        from demo.monty_hall import format_monty_hall_report, monty_hall_demo

        report = monty_hall_demo()
        return report.model_dump_json(indent=2) if output == "json" else format_monty_hall_report(report)
    raise ModelValidationError(f"Unknown demo '{name}'; choose asia or montyhall")


def _format_dominance_report(report: DominanceReport, title: Optional[str]) -> List[str]:
    observed = ", ".join(f"{name}={value}" for name, value in report.evidence.items())
    lines = []
    if title:
        lines.append(f"Network: {title}")
    lines.append(f"Query: {report.class_node} | {observed or '(no evidence)'}")
    lines.append(f"Undominated: {', '.join(report.undominated)}")
    lines.append("")

    width = max(len(label) for label in report.classes) + 2
    lines.append("Dominance matrix (row dominates column)")
    lines.append(" " * width + "".join(label.ljust(width) for label in report.classes))
    for row in report.classes:
        cells = ["-" if row == column else ("yes" if report.matrix[row][column] else "no") for column in report.classes]
        lines.append(row.ljust(width) + "".join(cell.ljust(width) for cell in cells))
    lines.append("")

    lines.append("Pairwise tests")
    for pair in report.pairs:
        lines.extend(_format_pair(pair))
    if report.relations:
        lines.append("")
        lines.append("Relations between undominated classes")
        for key, relation in report.relations.items():
            first, second = key.split("|", 1)
            lines.append(f"  {first} / {second}: {relation}")
    if report.posterior_bounds is not None:
        lines.append("")
        lines.extend(_format_intervals(report.posterior_bounds))
    if report.naive_posterior is not None:
        lines.append("")
        lines.extend(_format_naive(report.naive_posterior))
    if report.notes:
        lines.append("")
        lines.append("Notes")
        lines.extend(f"  {note}" for note in report.notes)
    return lines


def _format_pair(pair: PairwiseDominance) -> List[str]:
    verdict = "dominates" if pair.dominates else "does not dominate"
    cutset = f", cutset [{', '.join(pair.cutset)}]" if pair.cutset else ""
    lines = [f"  {pair.better} vs {pair.worse}: min ratio {fmt(pair.value)} ({verdict}{cutset})"]
    for product in pair.products:
        assignment = ", ".join(f"{name}={value}" for name, value in product.assignment.items()) or "no cutset"
        factors = ", ".join(f"{name}={fmt(value)}" for name, value in product.factors.items())
        lines.append(f"    {assignment}: {fmt(product.value)} [{factors}]")
    return lines


def _format_intervals(intervals: List[PosteriorInterval]) -> List[str]:
    lines = ["Posterior bounds over completions"]
    for interval in intervals:
        lines.append(f"  {interval.state}: [{fmt(interval.lower)}, {fmt(interval.upper)}]")
    return lines


def _format_naive(posterior: Dict[str, float]) -> List[str]:
    lines = ["Naive posterior (missing at random)"]
    for label, value in posterior.items():
        lines.append(f"  {label}: {fmt(value)}")
    return lines


def render(report: BaseModel, output: str = "table", title: Optional[str] = None) -> str:
    """JSON or a plain-text table for any report this module produces."""
    if output == "json":
        return report.model_dump_json(indent=2)
    if isinstance(report, DominanceReport):
        lines = _format_dominance_report(report, title)
    elif isinstance(report, PairwiseDominance):
        lines = _format_pair(report)
    elif isinstance(report, PosteriorReport):
        observed = ", ".join(f"{name}={value}" for name, value in report.evidence.items())
        lines = [f"Query: {report.class_node} | {observed or '(no evidence)'}"] + _format_intervals(report.intervals)
    elif isinstance(report, NaiveReport):
        observed = ", ".join(f"{name}={value}" for name, value in report.evidence.items())
        lines = [f"Query: {report.class_node} | {observed or '(no evidence)'}"] + _format_naive(report.posterior)
    elif isinstance(report, ValidationReport):
        lines = [f"Network '{report.name}' ({report.kind}) is valid"]
        for name, states in report.nodes.items():
            parents = ", ".join(report.parents[name]) or "none"
            lines.append(f"  {name}: states {', '.join(states)}; parents {parents}; {report.rows[name]} rows")
    else:
        raise ValueError(f"No table layout for {type(report).__name__}")
    return "\n".join(lines)

