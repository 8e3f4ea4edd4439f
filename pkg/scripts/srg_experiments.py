#!/usr/bin/env python3
"""
srg_experiments.py

Strongly regular graph experiments.

- Shrikhande vs the 4×4 rook's graph, both SRG(16,6,2,2), with A2 on A1'.
- The two SRG(25,12,5,6) Latin-square graphs with A2 on A1'.
- Distance signatures of the SRG(16,6,2,2) pair after simulation.
- A1' on the disjoint union of the SRG(16,6,2,2) pair and A1 with eight terms
  on the same union, both compared with the orbit partition (one class per
  component).

Observed verdicts are logged and written to a JSON report.

Usage
-----
    $ python3 -m scripts.srg_experiments --report srg_report.json
"""

import argparse
import json
from pathlib import Path
from typing import Any, Dict

from loguru import logger

from src.core.graph_core import Partition, format_partition
from src.core.graph_library import disjoint_union, rook, shrikhande, srg25_pair
from src.core.iso_extract import IsoVerdict, a2_decide
from src.core.numeric_sim import distance_signature, simulate
from src.core.reduction import make_partitioner
from src.core.series_dynamics import TruncationPolicy, a1_partition
from src.core.settings import load_settings
from src.core.symbolic_refine import a1prime_partition


def srg16_verdict() -> Dict[str, Any]:
    result = a2_decide(shrikhande(), rook(4), make_partitioner("a1prime"), load_settings())
    logger.info(f"Shrikhande vs rook: {result.verdict.value} ({result.reason})")
    return {"verdict": result.verdict.value, "reason": result.reason}


def srg25_verdict() -> Dict[str, Any]:
    first, second = srg25_pair()
    result = a2_decide(first, second, make_partitioner("a1prime"), load_settings())
    if result.verdict is IsoVerdict.YES:
        logger.error("A2 answered Yes on a non-isomorphic pair.")
    logger.info(f"SRG(25,12,5,6) pair: {result.verdict.value} ({result.reason})")
    return {"verdict": result.verdict.value, "reason": result.reason}


def srg16_signatures(t: float, dt: float) -> Dict[str, Any]:
    first = distance_signature(simulate(shrikhande(), t, dt))
    second = distance_signature(simulate(rook(4), t, dt))
    gap = float(abs(first - second).max())
    logger.info(f"Distance signatures at t={t} differ by {gap:.3e}.")
    return {"t": t, "dt": dt, "max_difference": gap}


def union_partition(s_max: int = 8) -> Dict[str, Any]:
    """A1' and A1 (truncated at `s_max`) on the union, against its two orbits."""
    union = disjoint_union(shrikhande(), rook(4))
    orbits = Partition((tuple(range(16)), tuple(range(16, 32))))
    partition = a1prime_partition(union)
    series = a1_partition(union, TruncationPolicy(s_max=s_max))
    if not partition.refines(series):
        logger.error("A1' does not refine A1 on the union.")
    achieved = partition == orbits
    logger.info(
        f"A1' on the union: {len(partition)} classes; orbit partition reached: {achieved}"
    )
    logger.info(f"A1 (s_max={s_max}) on the union: {len(series)} classes.")
    return {
        "partition": format_partition(partition),
        "orbit_partition_reached": achieved,
        "a1_partition": format_partition(series),
        "a1_s_max": s_max,
        "a1_orbit_partition_reached": series == orbits,
    }


def main() -> None:
    logger.add("srg_experiments.log", rotation="10 MB", level="INFO")
    parser = argparse.ArgumentParser(description="Strongly regular graph experiments")
    parser.add_argument("--report", type=Path, default=Path("srg_report.json"))
    parser.add_argument("--t", type=float, default=1.0, help="Signature time")
    parser.add_argument("--dt", type=float, default=1e-3, help="Simulator step")
    args = parser.parse_args()

    report = {
        "srg16_a2": srg16_verdict(),
        "srg25_a2": srg25_verdict(),
        "srg16_signatures": srg16_signatures(args.t, args.dt),
        "srg16_union": union_partition(),
    }
    args.report.write_text(json.dumps(report, indent=2), encoding="utf-8")
    logger.info(f"Wrote report to {args.report}")
    print(json.dumps(report, indent=2))


if __name__ == "__main__":
    main()
