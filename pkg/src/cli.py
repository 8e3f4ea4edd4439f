#!/usr/bin/env python3
"""
cli.py

Command-line entry point.

Subcommands
-----------
partition
    Vertex partition by A1, A1' or the exact orbit search.
iso
    Yes / No / Don't Know isomorphism decision with an explicit mapping.
series
    Exact series coefficients.
simulate
    Numeric trajectory with energy bookkeeping.

Inputs are file paths, `-` for stdin, or `--named NAME` from the graph
library. Exit status is 0 for any completed run (including "No" and
"Don't Know"), 2 for input, contract, configuration or singularity errors,
and 3 when an internal consistency check fails.

Usage
-----
    $ dyniso partition --named p3 --method oracle
    $ dyniso iso --named shrikhande --named rook4 --method a1prime
    $ dyniso series --named k2 --s-max 1 --output structured
    $ dyniso simulate --named k3 --t-end 1 --dt 1e-3
"""

import argparse
import json
import sys
from dataclasses import dataclass
from io import StringIO
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

from loguru import logger

from src.core.errors import DynisoError, InternalConsistencyError, SingularityError
from src.core.graph_core import (
    FORMATS,
    Graph,
    format_partition,
    is_doubly_connected,
    parse_graph,
    read_graph,
)
from src.core.graph_library import by_name
from src.core.iso_extract import IsoResult, IsoVerdict, a2_decide
from src.core.numeric_sim import DEFAULT_DT, distance_signature, trajectory, write_trajectory
from src.core.oracle import (
    MAX_ENUMERATION_ORDER,
    orbit_partition_bruteforce,
    orbit_partition_search,
)
from src.core.reduction import METHODS, make_partitioner
from src.core.series_dynamics import (
    TruncationPolicy,
    coefficient_records,
    partition_from_coefficients,
    series_up_to,
)
from src.core.settings import Settings, configure_logging, load_settings
from src.core.symbolic_refine import format_trace, row_partition, run_refinement

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


class UsageError(DynisoError, ValueError):
    """Invalid combination of command-line options."""


@dataclass(frozen=True)
class RunConfig:
    """
    Validated options shared by the subcommands.

    Attributes
    ----------
    method : str
        "a1", "a1prime" or "oracle".
    s_max : int or None
        Series truncation override.
    early_stop : bool
    dt, t_end : float
        Simulator step and horizon.
    sample_every : int
        Steps between trajectory samples.
    output : str
        "text" or "structured".
    fmt : str or None
        Input format; inferred from the file suffix when None.
    trace : bool
        Dump A1' per-step colorings.
    """

    method: str = "a1prime"
    s_max: Optional[int] = None
    early_stop: bool = False
    dt: float = DEFAULT_DT
    t_end: float = 1.0
    sample_every: int = 100
    output: str = "text"
    fmt: Optional[str] = None
    trace: bool = False

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise UsageError(f"--method must be one of {METHODS}")
        if self.s_max is not None and self.s_max < 0:
            raise UsageError("--s-max must be non-negative")
        if self.dt == 0:
            raise UsageError("--dt must be non-zero")
        if self.t_end != 0 and (self.t_end > 0) != (self.dt > 0):
            raise UsageError("--t-end and --dt must have the same sign")
        if self.sample_every < 1:
            raise UsageError("--sample-every must be at least 1")
        if self.output not in ("text", "structured"):
            raise UsageError("--output must be text or structured")
        if self.fmt is not None and self.fmt not in FORMATS + ("edge-list",):
            raise UsageError(f"--format must be one of {FORMATS}")
        if self.trace and self.method != "a1prime":
            raise UsageError("--trace is only available with --method a1prime")

    @property
    def policy(self) -> TruncationPolicy:
        return TruncationPolicy(self.s_max, self.early_stop)


def _infer_format(source: str, fmt: Optional[str]) -> str:
    if fmt is not None:
        return fmt
    if Path(source).suffix.lower() in (".g6", ".graph6"):
        return "graph6"
    return "edgelist"


def load_inputs(sources: Sequence[str], names: Sequence[str], fmt: Optional[str]) -> List[Graph]:
    """Graphs from paths (`-` is stdin) followed by library names."""
    graphs = []
    for source in sources:
        if source == "-":
            graphs.append(parse_graph(sys.stdin.read(), fmt or "edgelist"))
        else:
            graphs.append(read_graph(source, _infer_format(source, fmt)))
    graphs.extend(by_name(name) for name in names)
    return graphs


def _expect(graphs: List[Graph], count: int, command: str) -> None:
    if len(graphs) != count:
        raise UsageError(f"{command} expects {count} input graph(s), got {len(graphs)}")


def cmd_partition(g: Graph, config: RunConfig) -> str:
    if not is_doubly_connected(g):
        logger.warning(
            "Input graph is not doubly connected; the partition may not be meaningful."
        )
    meta: Dict[str, Any] = {"method": config.method, "n": g.n}
    trace_text = None
    if config.method == "a1":
        coeffs = series_up_to(g, config.policy)
        partition = partition_from_coefficients(coeffs)
        meta["terms"] = coeffs.terms
    elif config.method == "a1prime":
        if config.trace:
            state, steps, states = run_refinement(g, trace=True)
            trace_text = format_trace(states)
        else:
            state, steps = run_refinement(g)
        partition = row_partition(state)
        meta["steps"] = steps
    else:
        if g.n <= MAX_ENUMERATION_ORDER:
            orbits = orbit_partition_bruteforce(g)
            meta["group_size"] = orbits.group_size
        else:
            orbits = orbit_partition_search(g)
        partition = orbits.partition

    if config.output == "structured":
        record = {"partition": format_partition(partition), **meta}
        if g.labels is not None:
            record["labels"] = list(g.labels)
        if trace_text is not None:
            record["trace"] = trace_text
        return json.dumps(record)
    details = " ".join(f"{k}={v}" for k, v in meta.items())
    text = f"{format_partition(partition, g)}\n# {details}"
    if trace_text is not None:
        text += "\n" + trace_text.rstrip("\n")
    return text


def render_iso(result: IsoResult, g1: Graph, g2: Graph) -> str:
    if result.verdict is IsoVerdict.YES:
        mapping = " ".join(
            f"{g1.label_of(v)}->{g2.label_of(w)}" for v, w in enumerate(result.gamma)
        )
        return f"Yes\ngamma: {mapping}\n(isomorphism verified)"
    if result.verdict is IsoVerdict.NO:
        return f"No ({result.reason})"
    return "Don't Know"


def cmd_iso(g1: Graph, g2: Graph, config: RunConfig, settings: Settings) -> str:
    if g1.n != g2.n:
        result = IsoResult(IsoVerdict.NO, reason="order mismatch")
    else:
        partitioner = make_partitioner(config.method, config.policy)
        result = a2_decide(g1, g2, partitioner, settings)
    if config.output == "structured":
        return json.dumps(result.to_record())
    return render_iso(result, g1, g2)


def cmd_series(g: Graph, config: RunConfig) -> str:
    coeffs = series_up_to(g, config.policy)
    if config.output == "structured":
        return "\n".join(json.dumps(r) for r in coefficient_records(coeffs))
    blocks = []
    for name, matrices in (("A", coeffs.A), ("R", coeffs.R)):
        for n, matrix in enumerate(matrices):
            rows = [" ".join(str(x) for x in row) for row in matrix]
            blocks.append(f"{name}[{n}]:\n" + "\n".join(rows))
    return "\n\n".join(blocks)


def cmd_simulate(g: Graph, config: RunConfig, settings: Settings) -> str:
    rows = list(
        trajectory(
            g, config.t_end, config.dt, config.sample_every, floor=settings.distance_floor
        )
    )
    final_state = rows[-1][0]
    max_drift = max(report.drift for _, report in rows)
    signature = distance_signature(final_state).tolist()
    if config.output == "structured":
        return json.dumps(
            {
                "samples": [
                    {
                        "t": state.t,
                        "X": state.X.tolist(),
                        "kinetic": report.kinetic,
                        "potential": report.potential,
                        "total": report.total,
                        "drift": report.drift,
                    }
                    for state, report in rows
                ],
                "max_drift": max_drift,
                "signature": signature,
            }
        )

    buffer = StringIO()
    write_trajectory(rows, buffer)
    summary = " ".join(f"{d:.12g}" for d in signature)
    buffer.write(f"# max_drift={max_drift:.3e} signature: {summary}")
    return buffer.getvalue()


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dyniso",
        description="Graph isomorphism and automorphism partitioning via point-mass dynamics",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("inputs", nargs="*", help="Graph files, or - for stdin")
        p.add_argument("--named", action="append", default=[], help="Library graph name")
        p.add_argument("--format", dest="fmt", choices=FORMATS, help="Input format")
        p.add_argument("--output", choices=("text", "structured"), default="text")

    p = sub.add_parser("partition", help="Partition the vertices of one graph")
    common(p)
    p.add_argument("--method", choices=METHODS, default="a1prime")
    p.add_argument("--s-max", type=int, help="Series truncation (A1)")
    p.add_argument("--early-stop", action="store_true", help="Stop A1 once stable")
    p.add_argument("--trace", action="store_true", help="Dump A1' colorings per step")

    p = sub.add_parser("iso", help="Decide isomorphism of two graphs")
    common(p)
    p.add_argument("--method", choices=METHODS, default="a1prime")
    p.add_argument("--s-max", type=int, help="Series truncation (A1)")
    p.add_argument("--early-stop", action="store_true", help="Stop A1 once stable")

    p = sub.add_parser("series", help="Exact series coefficients")
    common(p)
    p.add_argument("--s-max", type=int, help="Last series index (default m²)")

    p = sub.add_parser("simulate", help="Numeric trajectory and energy")
    common(p)
    p.add_argument("--dt", type=float, default=DEFAULT_DT)
    p.add_argument("--t-end", type=float, default=1.0)
    p.add_argument("--sample-every", type=int, default=100)
    return parser


def _config_from(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        method=getattr(args, "method", "a1prime"),
        s_max=getattr(args, "s_max", None),
        early_stop=getattr(args, "early_stop", False),
        dt=getattr(args, "dt", DEFAULT_DT),
        t_end=getattr(args, "t_end", 1.0),
        sample_every=getattr(args, "sample_every", 100),
        output=args.output,
        fmt=args.fmt,
        trace=getattr(args, "trace", False),
    )


def run(argv: Optional[Sequence[str]] = None, settings: Optional[Settings] = None) -> str:
    """Parse arguments, dispatch, and return the rendered output."""
    args = build_parser().parse_args(argv)
    settings = settings or load_settings()
    config = _config_from(args)
    graphs = load_inputs(args.inputs, args.named, config.fmt)

    if args.command == "iso":
        _expect(graphs, 2, "iso")
        return cmd_iso(graphs[0], graphs[1], config, settings)
    _expect(graphs, 1, args.command)
    if args.command == "partition":
        return cmd_partition(graphs[0], config)
    if args.command == "series":
        return cmd_series(graphs[0], config)
    return cmd_simulate(graphs[0], config, settings)


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        settings = load_settings()
    except DynisoError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    configure_logging(settings)

    try:
        output = run(argv, settings)
    except InternalConsistencyError as e:
        logger.exception("Internal consistency check failed.")
        print(f"internal error: {e}", file=sys.stderr)
        return EXIT_INTERNAL
    except SingularityError as e:
        print(f"error: {e} (try a smaller --dt)", file=sys.stderr)
        return EXIT_INPUT
    except (DynisoError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    print(output)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
