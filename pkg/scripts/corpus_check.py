#!/usr/bin/env python3
"""
corpus_check.py

Run the partition checks over every graph of the networkx graph atlas up to
a given order and report violations.

For each graph:
- the exact orbit partition refines the A1 and A1' partitions;
- A1' refines A1, and whenever A1 already equals the orbits, so does A1';
- A1' stabilizes within m² steps.

Usage
-----
    $ python3 -m scripts.corpus_check --max-order 6
    $ python3 -m scripts.corpus_check --max-order 5 --s-max 8
"""

import argparse
import sys
from dataclasses import dataclass, field
from typing import List

import networkx as nx
from loguru import logger

from src.core.errors import InternalConsistencyError
from src.core.graph_core import Graph, format_partition, from_networkx
from src.core.oracle import orbit_partition_bruteforce
from src.core.series_dynamics import TruncationPolicy, a1_partition
from src.core.symbolic_refine import row_partition, run_refinement


@dataclass
class CorpusReport:
    graphs: int = 0
    a1_exact: int = 0
    a1prime_exact: int = 0
    violations: List[str] = field(default_factory=list)


def atlas_graphs(max_order: int) -> List[Graph]:
    """Atlas graphs with 1..max_order vertices (the atlas stops at 7)."""
    if not 1 <= max_order <= 7:
        raise ValueError(f"the graph atlas covers orders 1..7, got {max_order}")
    return [from_networkx(G) for G in nx.graph_atlas_g() if 1 <= G.number_of_nodes() <= max_order]


def check_graph(index: int, g: Graph, s_max: int, report: CorpusReport) -> None:
    orbits = orbit_partition_bruteforce(g).partition
    a1 = a1_partition(g, TruncationPolicy(s_max=s_max))
    try:
        state, steps = run_refinement(g)
    except InternalConsistencyError as e:
        report.violations.append(f"#{index}: {e}")
        return
    a1prime = row_partition(state)
    report.graphs += 1
    report.a1_exact += a1 == orbits
    report.a1prime_exact += a1prime == orbits

    label = f"#{index} (n={g.n}, edges={g.edge_count})"
    if not orbits.refines(a1):
        report.violations.append(f"{label}: A1 splits an orbit: {format_partition(a1)}")
    if not orbits.refines(a1prime):
        report.violations.append(f"{label}: A1' splits an orbit: {format_partition(a1prime)}")
    if not a1prime.refines(a1):
        report.violations.append(f"{label}: A1' does not refine A1")
    if a1 == orbits and a1prime != orbits:
        report.violations.append(f"{label}: A1 exact but A1' is not")
    if steps > g.n * g.n:
        report.violations.append(f"{label}: {steps} refinement steps")


def run_corpus(max_order: int, s_max: int) -> CorpusReport:
    report = CorpusReport()
    for index, g in enumerate(atlas_graphs(max_order)):
        check_graph(index, g, s_max, report)
    return report


def main() -> None:
    """
    Entry point. Exits with status 1 when any violation is found.
    """
    logger.add("corpus_check.log", rotation="10 MB", level="INFO")
    parser = argparse.ArgumentParser(description="Partition checks over the graph atlas")
    parser.add_argument("--max-order", type=int, default=6, help="Largest vertex count")
    parser.add_argument("--s-max", type=int, default=8, help="A1 series truncation")
    args = parser.parse_args()

    report = run_corpus(args.max_order, args.s_max)
    logger.info(
        f"Checked {report.graphs} graphs: A1 exact on {report.a1_exact}, "
        f"A1' exact on {report.a1prime_exact}, {len(report.violations)} violations."
    )
    for line in report.violations:
        logger.error(line)
    print(
        f"graphs={report.graphs} a1_exact={report.a1_exact} "
        f"a1prime_exact={report.a1prime_exact} violations={len(report.violations)}"
    )
    if report.violations:
        sys.exit(1)


if __name__ == "__main__":
    main()
