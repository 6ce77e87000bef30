"""Command-line surface for deciding, measuring, scanning, and building.

Exit codes follow one convention everywhere so shell pipelines can branch
on feasibility: 0 means Feasible (or: property holds / object verified),
1 means Infeasible (or: property fails), 2 means the command itself
failed (unreadable file, malformed input, guard exceeded).

Porcelain schema (stable): with ``--porcelain`` every command prints
exactly one line of seven tab-separated fields

    command  schema-version  input-hash  result  elapsed-ms  nodes  maxflow-calls

where ``result`` is ``Feasible``/``Infeasible`` for decide and nz5, the
canonical atom-set string for capacity, ``true``/``false`` for predicate,
``snark``/``not-snark`` for check-snark, the graph6 string for build, and
``instances/disagreements/certificate-failures`` for scan.

The optional results cache (``--cache DIR``) is content-addressed: the
key is the SHA-256 hash of the command name, the semantically relevant
options, and the canonical serialisation of the labelled input (graph
isomorphism is deliberately not resolved).  Records are written with a
write-temp-then-rename discipline and are immutable once recorded;
certificates and reports are stored side by side with the decision.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import tempfile
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from .capacity import compute_capacity
from .construct import (
    APPENDIX_EXPANSION_SPLIT,
    build_appendix_snark,
    template_odd_cycle,
)
from .flow import EngineStats, certificate_lines, decide_faithful
from .graph import (
    CapacityGraph,
    chromatic_index_3,
    cyclic_edge_connectivity_at_least,
    girth,
    is_cubic,
    is_snark,
    read_capacity_graph,
    read_graph6,
    write_capacity_graph,
    write_graph6,
)
from .si5 import NZ5_INTEGERS, OPEN_14, OPEN_41, canonical_string, parse
from .wheels import (
    WheelTemplate,
    build_wheel,
    even_subgraph_from_rim,
    predicate_cfn5,
    scan,
)

__all__ = ["RunRecord", "main"]

_SCHEMA = 1


# ===========================================================================
# Run records and the results cache
# ===========================================================================


@dataclass(frozen=True)
class RunRecord:
    """One cached command outcome: decision plus reproduction data."""

    schema: int
    input_hash: str
    command: str
    decision: str
    certificate_ref: str | None
    elapsed_ms: float
    nodes: int
    maxflow_calls: int


def _input_key(command: str, serialisation: str, *extras: str) -> str:
    payload = "\n".join((command, *extras, serialisation))
    return hashlib.sha256(payload.encode()).hexdigest()


def _cache_paths(cache_dir: str, key: str) -> tuple[Path, Path]:
    base = Path(cache_dir)
    return base / f"{key}.json", base / f"{key}.cert"


def _cache_load(cache_dir: str, key: str) -> tuple[RunRecord, str | None] | None:
    record_path, cert_path = _cache_paths(cache_dir, key)
    if not record_path.exists():
        return None
    record = RunRecord(**json.loads(record_path.read_text()))
    cert = cert_path.read_text() if cert_path.exists() else None
    return record, cert


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name)
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _cache_store(cache_dir: str, key: str, record: RunRecord, cert: str | None) -> None:
    record_path, cert_path = _cache_paths(cache_dir, key)
    record_path.parent.mkdir(parents=True, exist_ok=True)
    if record_path.exists():
        return
    if cert is not None:
        _atomic_write(cert_path, cert)
    _atomic_write(record_path, json.dumps(asdict(record), indent=2) + "\n")


# ===========================================================================
# Shared input and output handling
# ===========================================================================


def _load_flow_input(path: str) -> tuple[CapacityGraph, str]:
    """Read a capacity graph, or a graph6 graph with every edge (1,4).

    Returns the parsed instance together with its canonical serialisation
    (the cache key material).
    """
    text = Path(path).read_text()
    stripped = text.strip()
    if stripped.startswith("cg"):
        cg = read_capacity_graph(text).validate()
        return cg, write_capacity_graph(cg)
    g = read_graph6(stripped)
    return CapacityGraph.uniform(g, OPEN_14), write_graph6(g)


def _porcelain_line(record: RunRecord) -> str:
    return (
        f"{record.command}\t{record.schema}\t{record.input_hash}\t"
        f"{record.decision}\t{record.elapsed_ms:.1f}\t{record.nodes}\t"
        f"{record.maxflow_calls}"
    )


def _emit(
    args: argparse.Namespace,
    record: RunRecord,
    human_lines: list[str],
    cert: str | None,
) -> None:
    if args.porcelain:
        print(_porcelain_line(record))
    else:
        for line in human_lines:
            print(line)
    if getattr(args, "certificate", False) and cert is not None:
        print(cert, end="" if cert.endswith("\n") else "\n")


def _finish(
    args: argparse.Namespace,
    command: str,
    key: str,
    decision: str,
    human_lines: list[str],
    started: float,
    stats: EngineStats,
    cert: str | None,
    exit_code: int,
) -> int:
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    record = RunRecord(
        schema=_SCHEMA,
        input_hash=key,
        command=command,
        decision=decision,
        certificate_ref=f"{key}.cert" if cert is not None else None,
        elapsed_ms=elapsed_ms,
        nodes=stats.nodes,
        maxflow_calls=stats.maxflow_calls,
    )
    if args.cache:
        _cache_store(args.cache, key, record, cert)
    _emit(args, record, human_lines, cert)
    return exit_code


# ===========================================================================
# Commands
# ===========================================================================


def _decide_like(args: argparse.Namespace, command: str) -> int:
    started = time.perf_counter()
    if command == "nz5":
        g = read_graph6(Path(args.path).read_text().strip())
        cg = CapacityGraph.uniform(g, NZ5_INTEGERS)
        serial = write_graph6(g)
    else:
        cg, serial = _load_flow_input(args.path)
    key = _input_key(command, serial, f"guard={args.guard_edges}")
    if args.cache:
        hit = _cache_load(args.cache, key)
        if hit is not None:
            record, cert = hit
            _emit(args, record, [record.decision], cert)
            return 0 if record.decision == "Feasible" else 1

    decision = decide_faithful(
        cg,
        guard_edges=args.guard_edges,
        guard_interval_edges=args.guard_edges,
    )
    if decision.feasible:
        cert = "\n".join(certificate_lines(cg, decision.assignment)) + "\n"
        return _finish(
            args, command, key, "Feasible", ["Feasible"], started,
            decision.stats, cert, 0,
        )
    return _finish(
        args, command, key, "Infeasible", ["Infeasible"], started,
        decision.stats, None, 1,
    )


def cmd_decide(args: argparse.Namespace) -> int:
    return _decide_like(args, "decide")


def cmd_nz5(args: argparse.Namespace) -> int:
    return _decide_like(args, "nz5")


def cmd_capacity(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    text = Path(args.path).read_text()
    piece = read_capacity_graph(text).validate()
    if piece.terminals is None:
        raise ValueError(
            "capacity needs a generalised edge with terminals: add a 't x y' line"
        )
    serial = write_capacity_graph(piece)
    key = _input_key("capacity", serial, f"guard={args.guard_edges}")
    if args.cache:
        hit = _cache_load(args.cache, key)
        if hit is not None:
            record, cert = hit
            _emit(args, record, [record.decision], cert)
            return 0

    result = compute_capacity(
        piece,
        guard_edges=args.guard_edges,
        guard_interval_edges=args.guard_edges,
    )
    decision = canonical_string(result.values)
    return _finish(
        args, "capacity", key, decision, [decision], started, result.stats,
        None, 0,
    )


def cmd_predicate(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    n = args.n
    mask = (1 << n) - 1 if args.j_mask == "rim" else int(args.j_mask, 0)
    a = parse(args.a)
    serial = f"wheel n={n} rim-mask={mask} A={canonical_string(a)}"
    key = _input_key("predicate", serial)
    if args.cache:
        hit = _cache_load(args.cache, key)
        if hit is not None:
            record, cert = hit
            _emit(args, record, [f"Phi_c >= 5: {record.decision}"], cert)
            return 1 if record.decision == "true" else 0

    wt = WheelTemplate(n, even_subgraph_from_rim(n, mask), a)
    value = predicate_cfn5(wt)
    decision = "true" if value else "false"
    return _finish(
        args, "predicate", key, decision, [f"Phi_c >= 5: {decision}"],
        started, EngineStats(), None, 1 if value else 0,
    )


def _scan_exit(decision: str) -> int:
    _, disagreements, failures = decision.split("/")
    return 0 if disagreements == "0" and failures == "0" else 1


def cmd_scan(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    serial = f"scan n_max={args.n_max}"
    key = _input_key("scan", serial)

    def deliver(record: RunRecord, report_text: str) -> int:
        if args.output:
            Path(args.output).write_text(report_text)
            human = [
                f"wrote {args.output}",
                report_text.splitlines()[-1],
            ]
        else:
            human = report_text.splitlines()
        _emit(args, record, human, None)
        return _scan_exit(record.decision)

    if args.cache:
        hit = _cache_load(args.cache, key)
        if hit is not None and hit[1] is not None:
            return deliver(*hit)

    report = scan(args.n_max, jobs=args.jobs)
    report_text = "\n".join(report.lines()) + "\n"
    decision = (
        f"{len(report.records)}/{len(report.disagreements)}"
        f"/{len(report.certificate_failures)}"
    )
    elapsed_ms = (time.perf_counter() - started) * 1000.0
    record = RunRecord(
        schema=_SCHEMA,
        input_hash=key,
        command="scan",
        decision=decision,
        certificate_ref=f"{key}.cert",
        elapsed_ms=elapsed_ms,
        nodes=0,
        maxflow_calls=0,
    )
    if args.cache:
        _cache_store(args.cache, key, record, report_text)
    return deliver(record, report_text)


def _snark_report(g) -> tuple[list[str], bool]:
    gi = girth(g)
    cubic = is_cubic(g)
    cyc4 = cyclic_edge_connectivity_at_least(g, 4)
    colourable = chromatic_index_3(g)
    verdict = is_snark(g)
    lines = [
        f"vertices {g.vertex_count}",
        f"edges {g.edge_count}",
        f"cubic {str(cubic).lower()}",
        f"girth {gi}",
        f"cyclically-4-edge-connected {str(cyc4).lower()}",
        f"three-edge-colourable {str(colourable).lower()}",
        f"snark {str(verdict).lower()}",
    ]
    return lines, verdict


def cmd_check_snark(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    g = read_graph6(Path(args.path).read_text().strip())
    serial = write_graph6(g)
    key = _input_key("check-snark", serial)
    if args.cache:
        hit = _cache_load(args.cache, key)
        if hit is not None and hit[1] is not None:
            record, cert = hit
            _emit(args, record, cert.splitlines(), None)
            return 0 if record.decision == "snark" else 1

    lines, verdict = _snark_report(g)
    decision = "snark" if verdict else "not-snark"
    return _finish(
        args, "check-snark", key, decision, lines, started, EngineStats(),
        "\n".join(lines) + "\n", 0 if verdict else 1,
    )


def cmd_build(args: argparse.Namespace) -> int:
    started = time.perf_counter()
    key = _input_key("build", f"target={args.target}")
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    g = build_appendix_snark()
    g6 = write_graph6(g)
    seed = template_odd_cycle(build_wheel(3), ("x1", "x2", "x3"), OPEN_41)
    report_lines, verdict = _snark_report(g)
    if not verdict:
        raise RuntimeError("appendix stage 'snark-check' failed")
    report_lines.append("template-decision Infeasible")
    for vertex in sorted(APPENDIX_EXPANSION_SPLIT):
        moved = " ".join(
            "-".join(str(part) for part in edge_id)
            for edge_id in sorted(APPENDIX_EXPANSION_SPLIT[vertex])
        )
        report_lines.append(f"expansion-split {vertex} {moved}")

    graph_path = out_dir / "appendix-snark.g6"
    template_path = out_dir / "appendix-template.cg"
    report_path = out_dir / "appendix-report.txt"
    _atomic_write(graph_path, g6 + "\n")
    _atomic_write(template_path, write_capacity_graph(seed.cg))
    _atomic_write(report_path, "\n".join(report_lines) + "\n")

    if args.cache:
        hit = _cache_load(args.cache, key)
        if hit is not None and hit[0].decision != g6:
            raise RuntimeError(
                "cache is immutable but the rebuilt graph differs from the "
                f"recorded decision (key {key})"
            )
    human = report_lines + [
        f"wrote {graph_path}",
        f"wrote {template_path}",
        f"wrote {report_path}",
    ]
    return _finish(
        args, "build", key, g6, human, started, EngineStats(), None, 0
    )


# ===========================================================================
# Argument parsing
# ===========================================================================


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fiveflow",
        description=(
            "Decide faithful-flow feasibility on capacity graphs, measure "
            "generalised edges, classify wheels, and build the 28-vertex "
            "snark with circular flow number 5."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--porcelain",
        action="store_true",
        help="print one machine-readable tab-separated line",
    )
    common.add_argument(
        "--cache",
        metavar="DIR",
        help="content-addressed results cache directory",
    )

    guards = argparse.ArgumentParser(add_help=False)
    guards.add_argument(
        "--guard-edges",
        type=int,
        default=40,
        metavar="N",
        help="refuse instances with more than N interval edges (default 40)",
    )

    decide = sub.add_parser(
        "decide",
        parents=[common, guards],
        help="decide a capacity graph (or graph6 with every edge (1,4))",
    )
    decide.add_argument("path", help="capacity-graph or graph6 file")
    decide.add_argument(
        "--certificate",
        action="store_true",
        help="print the verified flow when feasible",
    )
    decide.set_defaults(func=cmd_decide)

    capacity = sub.add_parser(
        "capacity",
        parents=[common, guards],
        help="compute the open 5-capacity of a generalised edge",
    )
    capacity.add_argument("path", help="capacity-graph file with terminals")
    capacity.set_defaults(func=cmd_capacity)

    predicate = sub.add_parser(
        "predicate",
        parents=[common],
        help="classify a capacity-annotated wheel without running the engine",
    )
    predicate.add_argument("n", type=int, help="rim length of the wheel")
    predicate.add_argument(
        "j_mask",
        help="'rim' or an integer bitmask of rim edges generating the even subgraph",
    )
    predicate.add_argument("a", help="capacity set, e.g. '(4,1)'")
    predicate.set_defaults(func=cmd_predicate)

    scan_cmd = sub.add_parser(
        "scan",
        parents=[common],
        help="compare the wheel classification against the engine",
    )
    scan_cmd.add_argument("n_max", type=int, help="largest rim length")
    scan_cmd.add_argument(
        "--jobs", type=int, default=1, metavar="N", help="worker processes"
    )
    scan_cmd.add_argument(
        "--output", metavar="PATH", help="write the report here instead of stdout"
    )
    scan_cmd.set_defaults(func=cmd_scan)

    build = sub.add_parser(
        "build",
        parents=[common],
        help="run a construction pipeline and write its outputs",
    )
    build.add_argument("target", choices=["appendix"], help="pipeline name")
    build.add_argument(
        "--out-dir", default=".", metavar="DIR", help="output directory"
    )
    build.set_defaults(func=cmd_build)

    check = sub.add_parser(
        "check-snark",
        parents=[common],
        help="verify cubicity, girth, cyclic connectivity, and colourability",
    )
    check.add_argument("path", help="graph6 file")
    check.set_defaults(func=cmd_check_snark)

    nz5 = sub.add_parser(
        "nz5",
        parents=[common, guards],
        help="decide a nowhere-zero integer 5-flow on a graph6 graph",
    )
    nz5.add_argument("path", help="graph6 file")
    nz5.add_argument(
        "--certificate",
        action="store_true",
        help="print the verified flow when feasible",
    )
    nz5.set_defaults(func=cmd_nz5)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
