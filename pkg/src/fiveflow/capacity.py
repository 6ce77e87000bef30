"""Open 5-capacity of generalised edges: probing, composition, realisation.

A piece is a capacity graph with a distinguished terminal pair (x, y).  Its
open 5-capacity is the set of values v in R/5Z for which some faithful
assignment on the piece transfers net flow v from x to y, i.e. conservation
holds at every internal vertex while x sources and y sinks the amount v.
The set is computed exactly by closing the piece with a probe edge from y
back to x: a faithful flow on the closed instance whose probe edge carries
v exists precisely when the piece can transfer v.  Capacities are finite
unions of algebra atoms, so probing the ten atoms determines the whole set,
and negating a flow negates its transfer, so the result of a piece whose
own capacity sets are symmetric must come out symmetric - both structural
facts are asserted after every probe sweep rather than assumed.

Two composition laws connect gadget surgery to the interval algebra, and
the test suite exercises them as theorems rather than axioms: joining two
pieces end to end (series) intersects their capacities, while gluing them
terminal pair to terminal pair (parallel) adds them in the Minkowski sense.
realize_capacity runs a least-cost search over series/parallel expressions
in the three base pieces, algebraically predicting each expression's
capacity, and confirms any match by direct probing of the realised gadget
before reporting it.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Callable, Mapping, Union

from .flow import (
    CapacityGraph,
    EngineStats,
    FlowAssignment,
    decide_faithful,
)
from .graph import Edge, EdgeId, Multigraph, VertexId, _fresh_id, petersen_graph
from .si5 import (
    OPEN_14,
    OPEN_41,
    Atom,
    AtomSet,
    interval,
    parse,
    point,
)

__all__ = [
    "CapacityResult",
    "Realisation",
    "NotFoundWithinBudget",
    "augment_with_probe",
    "compute_capacity",
    "standard_edge",
    "k4_gadget",
    "petersen_minus_edge",
    "series",
    "parallel",
    "identify_terminals",
    "realize_capacity",
    "STANDARD_EDGE_CAPACITY",
    "K4_GADGET_CAPACITY",
    "PETERSEN_MINUS_EDGE_CAPACITY",
]


# Probe order: the five open unit intervals, then the five integer points.
_ALL_ATOMS: tuple[Atom, ...] = tuple(interval(k) for k in range(5)) + tuple(
    point(k) for k in range(5)
)


def _require_terminals(piece: CapacityGraph) -> tuple[VertexId, VertexId]:
    if piece.terminals is None:
        raise ValueError("piece has no terminal pair")
    return piece.terminals


# ===========================================================================
# Probing
# ===========================================================================


def augment_with_probe(
    piece: CapacityGraph, value: AtomSet, probe_id: EdgeId | None = None
) -> tuple[CapacityGraph, EdgeId]:
    """Close a piece with a probe edge y -> x restricted to ``value``.

    Conservation on the closed instance forces the probe to carry exactly
    the piece's net x -> y transfer, so the instance is feasible precisely
    when the piece can transfer some element of ``value``.  Returns the
    closed capacity graph together with the probe's edge id.
    """
    x, y = _require_terminals(piece)
    g = piece.graph
    used = {e.id for e in g.edges}
    pid = _fresh_id("probe" if probe_id is None else probe_id, used)
    closed = Multigraph(g.vertices, g.edges + (Edge(pid, y, x),))
    sigma = dict(piece.sigma)
    sigma[pid] = value
    return CapacityGraph(closed, sigma), pid


@dataclass(frozen=True)
class CapacityResult:
    """Capacity of a piece plus one verified witness flow per feasible atom.

    Witnesses are flows on the probed instance (piece plus probe edge
    ``probe_id``); restricted to the piece they transfer a value inside the
    witnessed atom from terminal x to terminal y.
    """

    values: AtomSet
    witnesses: Mapping[Atom, FlowAssignment]
    probe_id: EdgeId
    stats: EngineStats = field(default_factory=EngineStats)

    def __post_init__(self) -> None:
        object.__setattr__(self, "witnesses", dict(self.witnesses))


def compute_capacity(
    piece: CapacityGraph,
    *,
    guard_edges: int = 64,
    guard_interval_edges: int = 40,
) -> CapacityResult:
    """Determine a piece's open 5-capacity by probing all ten atoms.

    All ten atoms are probed independently - the symmetry of the outcome is
    asserted afterwards, keeping it a genuine cross-check on the engine
    rather than a baked-in shortcut.
    """
    found: list[Atom] = []
    witnesses: dict[Atom, FlowAssignment] = {}
    stats = EngineStats()
    probe_id: EdgeId = "probe"
    for atom in _ALL_ATOMS:
        closed, pid = augment_with_probe(piece, AtomSet.from_atoms([atom]))
        probe_id = pid
        decision = decide_faithful(
            closed,
            guard_edges=guard_edges,
            guard_interval_edges=guard_interval_edges,
        )
        stats = stats + decision.stats
        if decision.feasible:
            found.append(atom)
            witnesses[atom] = decision.assignment
    values = AtomSet.from_atoms(found)
    assert values.is_valid_union(), f"capacity {values} is not a valid union"
    assert values.is_symmetric(), f"capacity {values} is not symmetric"
    return CapacityResult(values, witnesses, probe_id, stats)


# ===========================================================================
# Base pieces
# ===========================================================================

# Capacities of the three base pieces.  Tests re-derive all three through
# compute_capacity; these constants exist so the realisation search can
# predict expression capacities without touching the flow engine.
STANDARD_EDGE_CAPACITY = OPEN_14
K4_GADGET_CAPACITY = parse("(2,3)u(3,2)")
PETERSEN_MINUS_EDGE_CAPACITY = OPEN_41


def standard_edge() -> CapacityGraph:
    """A single edge x -> y with capacity set (1,4)."""
    g = Multigraph((0, 1), (Edge(0, 0, 1),))
    return CapacityGraph(g, {0: OPEN_14}, terminals=(0, 1))


def k4_gadget() -> CapacityGraph:
    """K4 minus one edge, uniform capacity (1,4), terminals the missing pair."""
    pairs = [(0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    g = Multigraph.from_edges(pairs, vertices=range(4))
    return CapacityGraph.uniform(g, OPEN_14).with_terminals((0, 1))


def petersen_minus_edge() -> CapacityGraph:
    """The Petersen graph minus one edge, uniform capacity (1,4)."""
    p = petersen_graph()
    removed = p.edge(14)
    g = Multigraph(p.vertices, tuple(e for e in p.edges if e.id != 14))
    cg = CapacityGraph.uniform(g, OPEN_14)
    return cg.with_terminals((removed.tail, removed.head))


# ===========================================================================
# Composition
# ===========================================================================


def _compose(
    a: CapacityGraph,
    b: CapacityGraph,
    merges: list[tuple[tuple[str, VertexId], tuple[str, VertexId]]],
    terminal_reps: tuple[tuple[str, VertexId], tuple[str, VertexId]],
) -> CapacityGraph:
    """Glue disjoint namespaced copies of two pieces and relabel to ints.

    Vertices of ``a`` live in namespace ("a", v) and those of ``b`` in
    ("b", v); ``merges`` lists namespaced pairs to identify.  The merged
    vertex classes are renumbered 0..n-1 in order of first appearance (all
    of ``a``'s vertices, then ``b``'s) and edges are renumbered 0..m-1
    (``a``'s edges, then ``b``'s) with orientations preserved.
    """
    parent: dict[tuple[str, VertexId], tuple[str, VertexId]] = {}

    def find(v: tuple[str, VertexId]) -> tuple[str, VertexId]:
        root = v
        while parent.get(root, root) != root:
            root = parent[root]
        while parent.get(v, v) != v:
            parent[v], v = root, parent[v]
        return root

    for u, w in merges:
        parent[find(u)] = find(w)

    order: dict[tuple[str, VertexId], int] = {}
    for ns, piece in (("a", a), ("b", b)):
        for v in piece.graph.vertices:
            order.setdefault(find((ns, v)), len(order))

    def canon(ns: str, v: VertexId) -> int:
        return order[find((ns, v))]

    edges: list[Edge] = []
    sigma: dict[EdgeId, AtomSet] = {}
    for ns, piece in (("a", a), ("b", b)):
        for e in piece.graph.edges:
            eid = len(edges)
            edges.append(Edge(eid, canon(ns, e.tail), canon(ns, e.head)))
            sigma[eid] = piece.sigma[e.id]
    g = Multigraph(tuple(range(len(order))), tuple(edges))
    (ns_x, x), (ns_y, y) = terminal_reps
    return CapacityGraph(g, sigma, terminals=(canon(ns_x, x), canon(ns_y, y)))


def series(a: CapacityGraph, b: CapacityGraph) -> CapacityGraph:
    """Join two pieces end to end: y of ``a`` is identified with x of ``b``.

    The composite's terminals are x of ``a`` and y of ``b``; any transfer
    must pass through the shared vertex, so the composite capacity is the
    intersection of the operands' capacities.
    """
    xa, ya = _require_terminals(a)
    xb, yb = _require_terminals(b)
    return _compose(a, b, [(("a", ya), ("b", xb))], (("a", xa), ("b", yb)))


def parallel(a: CapacityGraph, b: CapacityGraph) -> CapacityGraph:
    """Glue two pieces terminal pair to terminal pair (x with x, y with y).

    Transfers through the two sides superpose, so the composite capacity is
    the Minkowski sum of the operands' capacities.
    """
    xa, ya = _require_terminals(a)
    xb, yb = _require_terminals(b)
    return _compose(
        a,
        b,
        [(("a", xa), ("b", xb)), (("a", ya), ("b", yb))],
        (("a", xa), ("a", ya)),
    )


def identify_terminals(piece: CapacityGraph) -> CapacityGraph:
    """Merge a piece's two terminals into one vertex (no probe edge).

    Conservation at the merged vertex is automatic once it holds at every
    other vertex, so the identified instance is feasible precisely when the
    piece's capacity is non-empty.  Raises ValueError when an edge joins
    the terminals, since merging would turn it into a loop; subdivide such
    an edge first.
    """
    x, y = _require_terminals(piece)
    g = piece.graph
    for e in g.edges:
        if {e.tail, e.head} == {x, y}:
            raise ValueError(
                f"edge {e.id!r} joins the terminals; subdivide it before"
                " identifying"
            )
    sub = {y: x}
    edges = tuple(
        Edge(e.id, sub.get(e.tail, e.tail), sub.get(e.head, e.head))
        for e in g.edges
    )
    vertices = tuple(v for v in g.vertices if v != y)
    return CapacityGraph(Multigraph(vertices, edges), dict(piece.sigma))


# ===========================================================================
# Realisation search
# ===========================================================================


@dataclass(frozen=True)
class Realisation:
    """A gadget whose probed capacity equals the requested target."""

    expression: str
    piece: CapacityGraph
    capacity: CapacityResult
    piece_count: int
    edge_count: int


@dataclass(frozen=True)
class NotFoundWithinBudget:
    """Honest failure: no expression within budget has the target capacity.

    ``reachable`` lists the canonical strings of every capacity that some
    in-budget expression attains, so a caller can see how close the search
    came.  When the reachable set is closed under both composition laws the
    target is unattainable at any budget, not merely at this one.
    """

    target: AtomSet
    max_pieces: int
    max_edges: int
    reachable: tuple[str, ...]


_Expr = Union[str, tuple[str, "_Expr", "_Expr"]]

_BASES: dict[str, tuple[Callable[[], CapacityGraph], AtomSet, int]] = {
    "standard_edge": (standard_edge, STANDARD_EDGE_CAPACITY, 1),
    "k4_gadget": (k4_gadget, K4_GADGET_CAPACITY, 5),
    "petersen_minus_edge": (petersen_minus_edge, PETERSEN_MINUS_EDGE_CAPACITY, 14),
}


def _expr_to_str(expr: _Expr) -> str:
    if isinstance(expr, str):
        return expr
    op, left, right = expr
    return f"{op}({_expr_to_str(left)}, {_expr_to_str(right)})"


def _build_expr(expr: _Expr) -> CapacityGraph:
    if isinstance(expr, str):
        return _BASES[expr][0]()
    op, left, right = expr
    combine = series if op == "series" else parallel
    return combine(_build_expr(left), _build_expr(right))


def realize_capacity(
    target: AtomSet,
    *,
    max_pieces: int = 6,
    max_edges: int = 32,
) -> Realisation | NotFoundWithinBudget:
    """Search for a gadget whose open 5-capacity equals ``target``.

    Least-cost search over series/parallel expressions in the three base
    pieces, ordered by piece count and then edge count.  Capacities of
    candidate expressions are predicted with the interval algebra (series
    intersects, parallel adds); the first expression predicted to hit the
    target is built and confirmed by direct probing before being returned,
    so a Realisation is always engine-verified.  Expressions larger than
    ``max_edges`` edges are not explored, which keeps every candidate
    within the default engine guards.
    """
    Cost = tuple[int, int]
    best: dict[int, tuple[Cost, _Expr]] = {}
    settled: dict[int, tuple[Cost, _Expr]] = {}
    heap: list[tuple[int, int, int, _Expr]] = []
    counter = 0
    for name, (_, cap, n_edges) in _BASES.items():
        cost = (1, n_edges)
        prev = best.get(cap.mask)
        if prev is None or cost < prev[0]:
            best[cap.mask] = (cost, name)
            counter += 1
            heapq.heappush(heap, (cost[0], cost[1], counter, name))

    def predicted(expr: _Expr) -> AtomSet:
        if isinstance(expr, str):
            return _BASES[expr][1]
        op, left, right = expr
        la, ra = predicted(left), predicted(right)
        return la.intersect(ra) if op == "series" else la.minkowski_sum(ra)

    while heap:
        pieces, n_edges, _, expr = heapq.heappop(heap)
        mask = predicted(expr).mask
        if mask in settled:
            continue
        settled[mask] = ((pieces, n_edges), expr)
        if mask == target.mask:
            piece = _build_expr(expr)
            result = compute_capacity(piece)
            assert result.values.mask == target.mask, (
                f"engine capacity {result.values} disagrees with the"
                f" algebraic prediction {target} for {_expr_to_str(expr)}"
            )
            return Realisation(
                expression=_expr_to_str(expr),
                piece=piece,
                capacity=result,
                piece_count=pieces,
                edge_count=n_edges,
            )
        for (op, rule) in (
            ("series", AtomSet.intersect),
            ("parallel", AtomSet.minkowski_sum),
        ):
            for other_mask, ((op_pieces, op_edges), other_expr) in list(
                settled.items()
            ):
                new_pieces = pieces + op_pieces
                new_edges = n_edges + op_edges
                if new_pieces > max_pieces or new_edges > max_edges:
                    continue
                new_mask = rule(AtomSet(mask), AtomSet(other_mask)).mask
                cost = (new_pieces, new_edges)
                prev = best.get(new_mask)
                if prev is not None and prev[0] <= cost:
                    continue
                new_expr: _Expr = (op, expr, other_expr)
                best[new_mask] = (cost, new_expr)
                counter += 1
                heapq.heappush(heap, (cost[0], cost[1], counter, new_expr))

    reachable = tuple(
        sorted(str(AtomSet(mask)) for mask in settled)
    )
    return NotFoundWithinBudget(target, max_pieces, max_edges, reachable)
