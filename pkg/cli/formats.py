"""JSON network and query files.

A network file lists nodes with their states, arcs as ``[parent, child]``
pairs and one table per node. The parents of a node are ordered as its arcs
are declared, and table rows enumerate parent configurations with the last
parent varying fastest. Bayesian rows are probability lists; credal rows are
objects carrying exactly one of ``probabilities``, ``vertices``,
``lower``/``upper`` or ``constraints``.
"""

import json
from pathlib import Path
from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from imprecise.credal_set import (
    CredalSet,
    IntervalCredalSet,
    LinearPrevision,
    PolytopeCredalSet,
    VertexCredalSet,
)
from imprecise.spaces import FiniteSpace, MassFunction
from networks.bayesnet import BayesNet
from networks.credalnet import CredalNet
from networks.dominance import EvidenceQuery
from networks.structure import NetworkStructure
from solvers.linear_program import LinearConstraint, Relation
from utils.errors import CredalError, ModelValidationError, NetworkFormatError
from utils.logger import Logger

logger = Logger(__name__)

FORMAT_VERSION = 1
DATABASE_DIR = Path(__file__).resolve().parent.parent / "database"


class NodeSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    name: str = Field(..., min_length=1)
    states: List[str] = Field(..., min_length=1)


class ConstraintSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    coefficients: List[float]
    relation: Literal["<=", "=", ">="]
    rhs: float


class RowSpec(BaseModel):
    """One local credal set; exactly one representation must be given."""

    model_config = ConfigDict(extra="forbid")

    probabilities: Optional[List[float]] = None
    vertices: Optional[List[List[float]]] = None
    lower: Optional[List[float]] = None
    upper: Optional[List[float]] = None
    constraints: Optional[List[ConstraintSpec]] = None

    @model_validator(mode="after")
    def _one_representation(self) -> "RowSpec":
        given = [
            name for name, present in (
                ("probabilities", self.probabilities is not None),
                ("vertices", self.vertices is not None),
                ("intervals", self.lower is not None or self.upper is not None),
                ("constraints", self.constraints is not None),
            ) if present
        ]
        if len(given) != 1:
            raise ValueError(f"a credal row needs exactly one representation, got {given or 'none'}")
        if (self.lower is None) != (self.upper is None):
            raise ValueError("interval rows need both 'lower' and 'upper'")
        return self


class TableSpec(BaseModel):
    model_config = ConfigDict(extra="forbid")

    node: str
    rows: List[Union[List[float], RowSpec]]


class NetworkFile(BaseModel):
    model_config = ConfigDict(extra="forbid")

    version: int = Field(FORMAT_VERSION, description="Format version")
    name: str = "network"
    kind: Literal["bayesian", "credal"] = "bayesian"
    nodes: List[NodeSpec]
    arcs: List[List[str]] = Field(default_factory=list, description="[parent, child] pairs")
    tables: List[TableSpec]

    @model_validator(mode="after")
    def _check_shape(self) -> "NetworkFile":
        if self.version != FORMAT_VERSION:
            raise ValueError(f"unsupported format version {self.version}, expected {FORMAT_VERSION}")
        for index, arc in enumerate(self.arcs):
            if len(arc) != 2:
                raise ValueError(f"arcs[{index}] must be a [parent, child] pair")
        if self.kind == "bayesian":
            for table in self.tables:
                if any(isinstance(row, RowSpec) for row in table.rows):
                    raise ValueError(f"table of '{table.node}': bayesian networks take plain probability rows")
        return self


class QueryOptions(BaseModel):
    model_config = ConfigDict(extra="forbid")

    bounds: bool = False
    naive: bool = False
    cap: Optional[int] = Field(None, ge=1)


class QueryFile(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    class_node: str = Field(..., alias="class")
    evidence: Dict[str, str] = Field(default_factory=dict)
    options: QueryOptions = Field(default_factory=QueryOptions)

    def to_query(self, net: Union[BayesNet, CredalNet]) -> EvidenceQuery:
        query = EvidenceQuery(self.class_node, dict(self.evidence))
        try:
            query.validate(net.structure)
        except CredalError as error:
            raise ModelValidationError(f"Invalid query: {error}") from error
        return query


def _format_validation_error(error: ValidationError) -> str:
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "<root>"
        lines.append(f"{location}: {item['msg']}")
    return "; ".join(lines)


def _load_json(text: str, what: str) -> dict:
    try:
        return json.loads(text)
    except json.JSONDecodeError as error:
        raise NetworkFormatError(f"{what}: line {error.lineno} column {error.colno}: {error.msg}") from None


def _row_to_credal_set(space: FiniteSpace, row: Union[List[float], RowSpec]) -> CredalSet:
    if isinstance(row, list):
        return LinearPrevision(MassFunction(space, row))
    if row.probabilities is not None:
        return LinearPrevision(MassFunction(space, row.probabilities))
    if row.vertices is not None:
        return VertexCredalSet.from_arrays(space, row.vertices)
    if row.lower is not None:
        return IntervalCredalSet(space, row.lower, row.upper)
    return PolytopeCredalSet(
        space,
        tuple(LinearConstraint(c.coefficients, Relation(c.relation), c.rhs) for c in row.constraints),
    )


def build_network(spec: NetworkFile) -> Union[BayesNet, CredalNet]:
    """Turn a parsed file into a validated model, naming the table that fails."""
    try:
        variables = [FiniteSpace(node.name, tuple(node.states)) for node in spec.nodes]
        parents: Dict[str, list] = {node.name: [] for node in spec.nodes}
        for parent, child in spec.arcs:
            if child not in parents:
                parents[child] = []
            parents[child].append(parent)
        structure = NetworkStructure(tuple(variables), parents)
    except CredalError as error:
        raise ModelValidationError(f"Network '{spec.name}': {error}") from error

    tables = {}
    for index, table in enumerate(spec.tables):
        if table.node in tables:
            raise ModelValidationError(f"tables[{index}]: duplicate table for node '{table.node}'")
        tables[table.node] = (index, table.rows)

    try:
        if spec.kind == "bayesian":
            net = BayesNet(structure, {node: rows for node, (_, rows) in tables.items()}, name=spec.name)
        else:
            rows = {}
            for node, (index, table_rows) in tables.items():
                space = structure.space(node)
                converted = []
                for row_index, row in enumerate(table_rows):
                    try:
                        converted.append(_row_to_credal_set(space, row))
                    except CredalError as error:
                        raise ModelValidationError(f"tables[{index}].rows[{row_index}] (node '{node}'): {error}") from error
                rows[node] = converted
            net = CredalNet(structure, rows, name=spec.name)
    except ModelValidationError:
        raise
    except CredalError as error:
        raise ModelValidationError(f"Network '{spec.name}': {error}") from error

    logger.info(f"Loaded {spec.kind} network '{spec.name}' with {len(structure.names)} nodes")
    return net


def parse_network_file(text: str) -> NetworkFile:
    data = _load_json(text, "network file")
    try:
        return NetworkFile.model_validate(data)
    except ValidationError as error:
        raise NetworkFormatError(f"network file: {_format_validation_error(error)}") from None


def parse_network(text: str) -> Union[BayesNet, CredalNet]:
    return build_network(parse_network_file(text))


def parse_query(text: str) -> QueryFile:
    data = _load_json(text, "query file")
    try:
        return QueryFile.model_validate(data)
    except ValidationError as error:
        raise NetworkFormatError(f"query file: {_format_validation_error(error)}") from None


def load_network(path: Union[str, Path]) -> Union[BayesNet, CredalNet]:
    return parse_network(Path(path).read_text(encoding="utf-8"))


def load_query(path: Union[str, Path]) -> QueryFile:
    return parse_query(Path(path).read_text(encoding="utf-8"))


def _credal_set_to_row(spec: CredalSet) -> RowSpec:
    if isinstance(spec, LinearPrevision):
        return RowSpec(probabilities=spec.mass.probs.tolist())
    if isinstance(spec, VertexCredalSet):
        return RowSpec(vertices=[point.probs.tolist() for point in spec.points])
    if isinstance(spec, IntervalCredalSet):
        return RowSpec(lower=spec.lower_bounds.tolist(), upper=spec.upper_bounds.tolist())
    return RowSpec(
        constraints=[
            ConstraintSpec(coefficients=c.coefficients.tolist(), relation=c.relation.value, rhs=c.rhs)
            for c in spec.constraints
        ]
    )


def to_network_file(net: Union[BayesNet, CredalNet]) -> NetworkFile:
    structure = net.structure
    nodes = [NodeSpec(name=space.name, states=[str(state) for state in space.elements]) for space in structure.variables]
    arcs = [[parent, child] for child in structure.names for parent in structure.parents_of(child)]
    if isinstance(net, BayesNet):
        tables = [TableSpec(node=node, rows=net.tables[node].tolist()) for node in structure.names]
        kind = "bayesian"
    else:
        tables = [
            TableSpec(node=node, rows=[_credal_set_to_row(spec) for spec in net.rows[node]])
            for node in structure.names
        ]
        kind = "credal"
    return NetworkFile(version=FORMAT_VERSION, name=net.name, kind=kind, nodes=nodes, arcs=arcs, tables=tables)


def serialize_network(net: Union[BayesNet, CredalNet]) -> str:
    return to_network_file(net).model_dump_json(indent=2, exclude_none=True)


def network_schema() -> dict:
    return NetworkFile.model_json_schema()


def bundled_network_path(name: str) -> Path:
    """Path of a network file shipped under ``database/``."""
    return DATABASE_DIR / f"{name}.json"
