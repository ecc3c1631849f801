"""
Doubling benchmark for credal-dominance classification.

The class node C has children X1..Xn; every Xi also has a missing root
co-parent Zi and, for i > 1, the previous child X(i-1) as a parent. All
children are observed, so the arcs between them are dropped and the blanket
of C stays singly connected. Doubling n should roughly double the work.
"""

import argparse
import json
import sys
import os
import time
from datetime import datetime
from pathlib import Path
from typing import List, Optional

import numpy as np
from pydantic import BaseModel

sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))

from imprecise.spaces import FiniteSpace
from networks.bayesnet import BayesNet, classify
from networks.dominance import EvidenceQuery
from networks.structure import NetworkStructure
from utils.logger import Logger

logger = Logger(__name__)

DEFAULT_SIZES = (8, 16, 32, 64, 128)


class BenchmarkRow(BaseModel):
    children: int
    blanket_size: int
    evaluations: int
    seconds: float


def _binary(name: str) -> FiniteSpace:
    return FiniteSpace(name, (f"{name.lower()}1", f"{name.lower()}2"))


def chain_network(children: int, seed: int = 0) -> tuple:
    """The benchmark network with ``children`` observed children, and its query."""
    rng = np.random.default_rng(seed)
    variables = [_binary("C")]
    parents = {"C": []}
    for i in range(1, children + 1):
        variables.append(_binary(f"Z{i}"))
        variables.append(_binary(f"X{i}"))
        parents[f"Z{i}"] = []
        parents[f"X{i}"] = ["C", f"Z{i}"] + ([f"X{i - 1}"] if i > 1 else [])
    structure = NetworkStructure(tuple(variables), parents)

    tables = {}
    for name in structure.names:
        p = rng.uniform(0.1, 0.9, size=structure.row_count(name))
        tables[name] = np.column_stack([p, 1.0 - p])
    net = BayesNet(structure, tables, name=f"chain-{children}")

    evidence = {f"X{i}": f"x{i}1" if i % 2 else f"x{i}2" for i in range(1, children + 1)}
    return net, EvidenceQuery("C", evidence)


def measure(children: int, seed: int = 0) -> BenchmarkRow:
    net, query = chain_network(children, seed)
    start = time.perf_counter()
    report = classify(net, query)
    seconds = time.perf_counter() - start
    return BenchmarkRow(
        children=children,
        blanket_size=2 * children + 1,
        evaluations=sum(pair.evaluations for pair in report.pairs),
        seconds=seconds,
    )


def growth_ratios(rows: List[BenchmarkRow]) -> List[float]:
    """Evaluation growth between consecutive doublings; 4 would be quadratic."""
    return [later.evaluations / earlier.evaluations for earlier, later in zip(rows, rows[1:])]


def run(sizes=DEFAULT_SIZES, seed: int = 0) -> List[BenchmarkRow]:
    rows = []
    for children in sizes:
        row = measure(children, seed)
        logger.info(f"n={children}: {row.evaluations} evaluations in {row.seconds:.4f}s")
        rows.append(row)
    return rows


def main(argv: Optional[List[str]] = None) -> int:
    parser = argparse.ArgumentParser(description="Doubling benchmark for credal-dominance classification")
    parser.add_argument("--sizes", type=int, nargs="+", default=list(DEFAULT_SIZES))
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--output", type=Path, default=None, help="Write the rows as JSON to this file")
    args = parser.parse_args(argv)

    print("=" * 80)
    print("CREDAL DOMINANCE - DOUBLING BENCHMARK")
    print("=" * 80)
    print(f"Timestamp: {datetime.now().strftime('%Y-%m-%d %H:%M:%S')}")
    print()

    rows = run(sorted(args.sizes), args.seed)
    print(f"{'children':>10} {'|B+|':>8} {'evaluations':>12} {'seconds':>10}")
    for row in rows:
        print(f"{row.children:>10} {row.blanket_size:>8} {row.evaluations:>12} {row.seconds:>10.4f}")

    ratios = growth_ratios(rows)
    print()
    print("Growth per doubling: " + ", ".join(f"{ratio:.2f}" for ratio in ratios))
    subquadratic = all(ratio < 4.0 for ratio in ratios)
    print("Sub-quadratic growth" if subquadratic else "Growth is not sub-quadratic")

    if args.output:
        args.output.write_text(json.dumps([row.model_dump() for row in rows], indent=2), encoding="utf-8")
        print(f"Results saved to: {args.output}")
    return 0 if subquadratic else 1


if __name__ == "__main__":
    sys.exit(main())
