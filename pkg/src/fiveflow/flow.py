"""Exact decision engine for capacity-faithful flows modulo 5.

Question decided: given a multigraph whose every edge e carries a set
sigma(e) of atoms on R/5Z, is there an assignment f of rational residues
with f(e) in sigma(e) for all e and exact mod-5 conservation at every
vertex (values signed relative to each edge's reference orientation)?

Method: enumerate one atom per edge.  A unit-interval atom k stands for
the value k + t with t in the open interval (0, 1); an integer-point atom
k stands for exactly k.  Once atoms are fixed, conservation at vertex v
reads (net t-outflow at v) = k_v for some integer k_v congruent mod 5 to
the net base inflow, and strictly between -(incoming interval count) and
+(outgoing interval count).  Each candidate demand vector (summing to
zero) leaves a transportation problem {A t = k, 0 <= t <= 1}; strict
feasibility (all t in the open interval) holds iff the closed problem is
feasible and stays feasible with each single t_e pinned to 0 and to 1:
the constraint matrix is an incidence matrix, hence totally unimodular,
so the per-coordinate extrema over the polytope are attained at integral
vertices, i.e. in {0, 1} - if no solution with t_e = 0 exists the whole
polytope sits at t_e = 1 and vice versa.  Averaging the 2m' integral
pinned witnesses yields a strictly interior rational point with
denominator 2m', which is returned as the certificate.

The independent oracle re-decides the same question by brute force on
the grid {i / (2m')} - complete precisely because of that denominator
bound - sharing no search logic with the engine.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

import numpy as np

from ._kernels import engine_search, oracle_search
from .graph import CapacityGraph, EdgeId, Multigraph
from .si5 import NZ5_INTEGERS, AtomKind, Mod5Rational, canonical_string

__all__ = [
    "CapacityGraph",
    "FlowAssignment",
    "EngineStats",
    "Feasible",
    "Infeasible",
    "Decision",
    "decide_faithful",
    "verify_flow",
    "oracle_decide",
    "decide_integer_nz5",
    "certificate_lines",
]


# ===========================================================================
# Result types
# ===========================================================================


@dataclass(frozen=True)
class FlowAssignment:
    """Signed edge values relative to reference orientations."""

    values: Mapping[EdgeId, Mod5Rational]

    def __post_init__(self) -> None:
        object.__setattr__(
            self,
            "values",
            {k: Mod5Rational(v) for k, v in dict(self.values).items()},
        )

    def value(self, edge_id: EdgeId) -> Mod5Rational:
        return self.values[edge_id]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class EngineStats:
    """Search-effort counters (zero for trivially decided instances)."""

    nodes: int = 0
    leaves: int = 0
    demand_vectors: int = 0
    maxflow_calls: int = 0

    def __add__(self, other: "EngineStats") -> "EngineStats":
        return EngineStats(
            self.nodes + other.nodes,
            self.leaves + other.leaves,
            self.demand_vectors + other.demand_vectors,
            self.maxflow_calls + other.maxflow_calls,
        )


@dataclass(frozen=True)
class Feasible:
    assignment: FlowAssignment
    stats: EngineStats = EngineStats()

    @property
    def feasible(self) -> bool:
        return True

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class Infeasible:
    stats: EngineStats = EngineStats()

    @property
    def feasible(self) -> bool:
        return False

    def __bool__(self) -> bool:
        return False


Decision = Union[Feasible, Infeasible]


def certificate_lines(cg: CapacityGraph, f: FlowAssignment) -> list[str]:
    """Serialise a flow as lines "f <edge id> <numerator>/<denominator>"."""
    out = []
    for e in cg.graph.edges:
        v = f.value(e.id).value
        out.append(f"f {e.id} {v.numerator}/{v.denominator}")
    return out


# ===========================================================================
# Verification (exact rational arithmetic, no engine machinery)
# ===========================================================================


def verify_flow(cg: CapacityGraph, f: FlowAssignment) -> bool:
    """Membership of every value plus exact mod-5 conservation everywhere."""
    g = cg.graph
    for e in g.edges:
        if e.id not in f.values:
            raise ValueError(f"assignment misses edge {e.id!r}")
        if not cg.sigma[e.id].contains(f.values[e.id]):
            return False
    net: dict = {v: Fraction(0) for v in g.vertices}
    for e in g.edges:
        x = f.values[e.id].value
        net[e.head] += x
        net[e.tail] -= x
    return all(total % 5 == 0 for total in net.values())


# ===========================================================================
# The engine
# ===========================================================================


def _search_order(g: Multigraph, atom_counts: dict[EdgeId, int]) -> list[int]:
    """Greedy order: fewest atoms first, prefer touching placed vertices."""
    m = len(g.edges)
    remaining = set(range(m))
    placed_vertices: set = set()
    order: list[int] = []
    while remaining:

        def key(i: int) -> tuple[int, int, int]:
            e = g.edges[i]
            adjacent = e.tail in placed_vertices or e.head in placed_vertices
            return (atom_counts[e.id], 0 if adjacent else 1, i)

        best = min(remaining, key=key)
        remaining.remove(best)
        order.append(best)
        placed_vertices.add(g.edges[best].tail)
        placed_vertices.add(g.edges[best].head)
    return order


def decide_faithful(
    cg: CapacityGraph,
    *,
    guard_edges: int = 64,
    guard_interval_edges: int = 40,
) -> Decision:
    """Exact decision with a verified certificate on the feasible side."""
    g = cg.graph
    for e in g.edges:
        if cg.sigma[e.id].is_empty():
            return Infeasible()
    m = len(g.edges)
    if m == 0:
        return Feasible(FlowAssignment({}))
    if m > guard_edges:
        raise ValueError(f"instance has {m} edges; guard is {guard_edges}")
    atoms = {e.id: cg.sigma[e.id].atoms() for e in g.edges}
    interval_capable = sum(
        1
        for e in g.edges
        if any(a.kind is AtomKind.UNIT_INTERVAL for a in atoms[e.id])
    )
    if interval_capable > guard_interval_edges:
        raise ValueError(
            f"instance has {interval_capable} interval-capable edges; "
            f"guard is {guard_interval_edges}"
        )

    order = _search_order(g, {eid: len(v) for eid, v in atoms.items()})
    ordered_edges = [g.edges[i] for i in order]
    vindex = {v: i for i, v in enumerate(g.vertices)}
    n_v = len(g.vertices)
    amax = max(len(atoms[e.id]) for e in ordered_edges)
    tails = np.fromiter((vindex[e.tail] for e in ordered_edges), np.int64, m)
    heads = np.fromiter((vindex[e.head] for e in ordered_edges), np.int64, m)
    acnt = np.fromiter((len(atoms[e.id]) for e in ordered_edges), np.int64, m)
    akind = np.zeros((m, amax), np.int64)
    aval = np.zeros((m, amax), np.int64)
    for p, e in enumerate(ordered_edges):
        for j, a in enumerate(atoms[e.id]):
            akind[p, j] = 0 if a.kind is AtomKind.UNIT_INTERVAL else 1
            aval[p, j] = a.index
    out_choice = np.zeros(m, np.int64)
    out_tnum = np.zeros(m, np.int64)
    stats_arr = np.zeros(4, np.int64)

    den = engine_search(
        n_v, tails, heads, acnt, akind, aval, out_choice, out_tnum, stats_arr
    )
    stats = EngineStats(*map(int, stats_arr))
    if den == 0:
        return Infeasible(stats)

    values: dict[EdgeId, Mod5Rational] = {}
    for p, e in enumerate(ordered_edges):
        a = atoms[e.id][out_choice[p]]
        if a.kind is AtomKind.UNIT_INTERVAL:
            values[e.id] = Mod5Rational(a.index + Fraction(int(out_tnum[p]), den))
        else:
            values[e.id] = Mod5Rational(a.index)
    assignment = FlowAssignment(values)
    assert verify_flow(cg, assignment), (
        "internal error: engine certificate failed verification on "
        f"{[(e.id, canonical_string(cg.sigma[e.id])) for e in g.edges]}"
    )
    return Feasible(assignment, stats)


def decide_integer_nz5(g: Multigraph, **guards: int) -> Decision:
    """Nowhere-zero integer flow modulo 5 (values in {1, 2, 3, 4})."""
    return decide_faithful(CapacityGraph.uniform(g, NZ5_INTEGERS), **guards)


# ===========================================================================
# Independent oracle
# ===========================================================================


def oracle_decide(cg: CapacityGraph, *, guard_interval_edges: int = 8) -> Decision:
    """Exhaustive grid search; agrees with decide_faithful by construction.

    For each atom assignment with m' interval atoms every candidate flow
    is scanned on the grid base + g/(2m'), g = 1 .. 2m'-1, testing exact
    conservation of the scaled integers base*2m' + g modulo 10m'.  The
    engine's certificates live on exactly this grid, so the two verdicts
    must coincide; no windows, demands, or max-flow machinery is shared.
    """
    g = cg.graph
    for e in g.edges:
        if cg.sigma[e.id].is_empty():
            return Infeasible()
    m = len(g.edges)
    if m == 0:
        return Feasible(FlowAssignment({}))
    atoms = [cg.sigma[e.id].atoms() for e in g.edges]
    interval_capable = sum(
        1 for alist in atoms if any(a.kind is AtomKind.UNIT_INTERVAL for a in alist)
    )
    if interval_capable > guard_interval_edges:
        raise ValueError(
            f"oracle guard: {interval_capable} interval-capable edges > "
            f"{guard_interval_edges}"
        )
    vindex = {v: i for i, v in enumerate(g.vertices)}
    n_v = len(g.vertices)
    assignments_tried = 0
    for chosen in itertools.product(*atoms):
        assignments_tried += 1
        interval_positions = [
            i for i, a in enumerate(chosen) if a.kind is AtomKind.UNIT_INTERVAL
        ]
        mi = len(interval_positions)
        scale = 2 * mi if mi else 1
        res0 = np.zeros(n_v, np.int64)
        icnt = np.zeros(n_v, np.int64)
        for e, a in zip(g.edges, chosen):
            base = a.index * scale
            res0[vindex[e.head]] += base
            res0[vindex[e.tail]] -= base
        tails_i = np.fromiter(
            (vindex[g.edges[i].tail] for i in interval_positions), np.int64, mi
        )
        heads_i = np.fromiter(
            (vindex[g.edges[i].head] for i in interval_positions), np.int64, mi
        )
        for i in interval_positions:
            icnt[vindex[g.edges[i].tail]] += 1
            icnt[vindex[g.edges[i].head]] += 1
        out_g = np.zeros(max(mi, 1), np.int64)
        if oracle_search(n_v, mi, tails_i, heads_i, scale, res0, icnt, out_g) == 1:
            values: dict[EdgeId, Mod5Rational] = {}
            grid = {pos: int(out_g[j]) for j, pos in enumerate(interval_positions)}
            for i, (e, a) in enumerate(zip(g.edges, chosen)):
                if i in grid:
                    values[e.id] = Mod5Rational(a.index + Fraction(grid[i], scale))
                else:
                    values[e.id] = Mod5Rational(a.index)
            assignment = FlowAssignment(values)
            assert verify_flow(cg, assignment), "oracle witness failed verification"
            return Feasible(assignment, EngineStats(nodes=assignments_tried))
    return Infeasible(EngineStats(nodes=assignments_tried))
