"""Multigraph core: surgery operations, snark-property checks, file formats.

Graphs are immutable values.  Vertices and edge ids are opaque hashable
objects; every edge records a reference orientation (tail, head) and all
signed flow values elsewhere in the package are relative to it.  Loops are
forbidden throughout (conservation leaves a loop's value unconstrained, so
they add nothing but special cases); parallel edges are fully supported.

Cyclic edge connectivity uses the cycle-contraction characterisation: a
minimum cycle-separating edge cut leaves a shortest - hence chordless -
cycle on each side, so the minimum over all vertex-disjoint chordless
cycle pairs of the minimum edge cut between their contractions is exactly
the cyclic edge connectivity; if no disjoint pair exists there is no
cycle-separating cut at all and every threshold passes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Iterator, Mapping, NamedTuple, Sequence

import numpy as np

from . import si5
from ._kernels import pair_mincut
from .si5 import AtomSet, ParseError

VertexId = Hashable
EdgeId = Hashable

__all__ = [
    "Edge",
    "Multigraph",
    "GeneralisedEdge",
    "CapacityGraph",
    "expand",
    "smooth",
    "subdivide",
    "girth",
    "is_cubic",
    "chromatic_index_3",
    "cyclic_edge_connectivity_at_least",
    "is_snark",
    "read_graph6",
    "write_graph6",
    "read_capacity_graph",
    "write_capacity_graph",
    "petersen_graph",
]


class Edge(NamedTuple):
    """One edge: opaque id plus the reference orientation (tail -> head)."""

    id: EdgeId
    tail: VertexId
    head: VertexId

    def other(self, v: VertexId) -> VertexId:
        if v == self.tail:
            return self.head
        if v == self.head:
            return self.tail
        raise ValueError(f"vertex {v!r} is not an endpoint of edge {self.id!r}")


# ===========================================================================
# Core type
# ===========================================================================


@dataclass(frozen=True)
class Multigraph:
    """Immutable multigraph with opaque ids and reference orientations.

    Invariants: no loops; vertex ids unique; edge ids unique; every edge
    endpoint is a listed vertex.
    """

    vertices: tuple[VertexId, ...]
    edges: tuple[Edge, ...]
    _incident: dict = field(
        default_factory=dict, compare=False, repr=False, hash=False
    )
    _by_id: dict = field(default_factory=dict, compare=False, repr=False, hash=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(
            self, "edges", tuple(Edge(*e) for e in self.edges)
        )
        vset = set(self.vertices)
        if len(vset) != len(self.vertices):
            raise ValueError("duplicate vertex id")
        incident: dict[VertexId, list[Edge]] = {v: [] for v in self.vertices}
        by_id: dict[EdgeId, Edge] = {}
        for e in self.edges:
            if e.tail == e.head:
                raise ValueError(f"loop at vertex {e.tail!r} (edge {e.id!r})")
            if e.id in by_id:
                raise ValueError(f"duplicate edge id {e.id!r}")
            if e.tail not in vset or e.head not in vset:
                raise ValueError(f"edge {e.id!r} has an endpoint outside the graph")
            by_id[e.id] = e
            incident[e.tail].append(e)
            incident[e.head].append(e)
        self._incident.update(incident)
        self._by_id.update(by_id)

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def from_edges(
        pairs: Iterable[tuple[VertexId, VertexId]],
        vertices: Iterable[VertexId] | None = None,
    ) -> "Multigraph":
        """Build a graph from (tail, head) pairs; edge ids are 0, 1, 2, ..."""
        edges = tuple(Edge(i, t, h) for i, (t, h) in enumerate(pairs))
        if vertices is None:
            seen: dict[VertexId, None] = {}
            for e in edges:
                seen.setdefault(e.tail)
                seen.setdefault(e.head)
            vertices = seen.keys()
        return Multigraph(tuple(vertices), edges)

    # -- queries ---------------------------------------------------------------

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def has_vertex(self, v: VertexId) -> bool:
        return v in self._incident

    def edge(self, edge_id: EdgeId) -> Edge:
        return self._by_id[edge_id]

    def incident_edges(self, v: VertexId) -> tuple[Edge, ...]:
        return tuple(self._incident[v])

    def degree(self, v: VertexId) -> int:
        return len(self._incident[v])

    def neighbours(self, v: VertexId) -> frozenset[VertexId]:
        return frozenset(e.other(v) for e in self._incident[v])

    def __iter__(self) -> Iterator[Edge]:
        return iter(self.edges)


@dataclass(frozen=True)
class GeneralisedEdge:
    """A graph with an ordered pair of distinct terminal vertices."""

    graph: Multigraph
    terminals: tuple[VertexId, VertexId]

    def __post_init__(self) -> None:
        x, y = self.terminals
        if x == y:
            raise ValueError("terminals must be distinct")
        if self.graph.vertex_count < 2:
            raise ValueError("a generalised edge needs at least two vertices")
        for t in (x, y):
            if not self.graph.has_vertex(t):
                raise ValueError(f"terminal {t!r} is not a vertex of the graph")


@dataclass(frozen=True)
class CapacityGraph:
    """A multigraph with a capacity set on every edge.

    The constructor only enforces coverage: every edge must carry an
    AtomSet.  Internal capacity probes deliberately use single-atom and
    hence asymmetric or non-valid-union values, so strictness is opt-in:
    call validate() to additionally require every value to be a valid
    symmetric union (done for all external inputs).
    """

    graph: Multigraph
    sigma: Mapping[EdgeId, AtomSet]
    terminals: tuple[VertexId, VertexId] | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "sigma", dict(self.sigma))
        for e in self.graph.edges:
            value = self.sigma.get(e.id)
            if not isinstance(value, AtomSet):
                raise ValueError(f"edge {e.id!r} has no capacity set")
        if self.terminals is not None:
            x, y = self.terminals
            if x == y or not (
                self.graph.has_vertex(x) and self.graph.has_vertex(y)
            ):
                raise ValueError("invalid terminal pair")

    def validate(self) -> "CapacityGraph":
        """Require every capacity value to be a valid symmetric union."""
        for e in self.graph.edges:
            s = self.sigma[e.id]
            if not s.is_valid_union():
                raise ValueError(
                    f"capacity of edge {e.id!r} is not a valid union: {s}"
                )
            if not s.is_symmetric():
                raise ValueError(f"capacity of edge {e.id!r} is not symmetric: {s}")
        return self

    @staticmethod
    def uniform(graph: Multigraph, sigma: AtomSet) -> "CapacityGraph":
        return CapacityGraph(graph, {e.id: sigma for e in graph.edges})

    def with_terminals(
        self, terminals: tuple[VertexId, VertexId] | None
    ) -> "CapacityGraph":
        return CapacityGraph(self.graph, self.sigma, terminals)


# ===========================================================================
# Surgery
# ===========================================================================


def _fresh_id(base: Hashable, used: set) -> Hashable:
    if base not in used:
        return base
    n = 1
    while (base, n) in used:
        n += 1
    return (base, n)


def expand(
    g: Multigraph,
    x: VertexId,
    k: Multigraph,
    attachment: Mapping[EdgeId, VertexId],
) -> Multigraph:
    """Replace vertex x of g by the graph k.

    Every edge of g incident to x is redirected (same id, same orientation)
    to the vertex of k named by ``attachment``.  Vertex and edge ids of k
    are kept when free and deterministically relabelled on collision.
    """
    if not g.has_vertex(x):
        raise ValueError(f"vertex {x!r} not present")
    incident = g.incident_edges(x)
    incident_ids = {e.id for e in incident}
    if set(attachment.keys()) != incident_ids:
        missing = incident_ids - set(attachment.keys())
        extra = set(attachment.keys()) - incident_ids
        raise ValueError(
            f"attachment must cover exactly the edges at {x!r} "
            f"(missing {sorted(map(repr, missing))}, extra {sorted(map(repr, extra))})"
        )
    for target in attachment.values():
        if not k.has_vertex(target):
            raise ValueError(f"attachment target {target!r} is not a vertex of k")

    kept_vertices = [v for v in g.vertices if v != x]
    used_v = set(kept_vertices)
    vmap: dict[VertexId, VertexId] = {}
    for v in k.vertices:
        vmap[v] = _fresh_id(v, used_v)
        used_v.add(vmap[v])

    kept_edges = [e for e in g.edges if x not in (e.tail, e.head)]
    used_e = {e.id for e in g.edges}
    new_edges: list[Edge] = list(kept_edges)
    for e in k.edges:
        eid = _fresh_id(e.id, used_e)
        used_e.add(eid)
        new_edges.append(Edge(eid, vmap[e.tail], vmap[e.head]))
    for e in incident:
        target = vmap[attachment[e.id]]
        if e.tail == x:
            new_edges.append(Edge(e.id, target, e.head))
        else:
            new_edges.append(Edge(e.id, e.tail, target))
    return Multigraph(tuple(kept_vertices) + tuple(vmap[v] for v in k.vertices),
                      tuple(new_edges))


def smooth(g: Multigraph, x: VertexId) -> Multigraph:
    """Remove a degree-2 vertex and join its two distinct neighbours."""
    if not g.has_vertex(x):
        raise ValueError(f"vertex {x!r} not present")
    inc = g.incident_edges(x)
    if len(inc) != 2:
        raise ValueError(f"vertex {x!r} has degree {len(inc)}, need exactly 2")
    e1, e2 = inc
    y, z = e1.other(x), e2.other(x)
    if y == z:
        raise ValueError(f"smoothing {x!r} would create a loop at {y!r}")
    used_e = {e.id for e in g.edges if e.id not in (e1.id, e2.id)}
    new_id = _fresh_id(e1.id, used_e)
    edges = tuple(e for e in g.edges if x not in (e.tail, e.head)) + (
        Edge(new_id, y, z),
    )
    return Multigraph(tuple(v for v in g.vertices if v != x), edges)


def subdivide(
    g: Multigraph, edge_id: EdgeId, new_vertex: VertexId | None = None
) -> Multigraph:
    """Replace an edge (t -> h) by a path t -> w -> h through a new vertex."""
    e = g.edge(edge_id)
    used_v = set(g.vertices)
    w = _fresh_id(("sub", edge_id) if new_vertex is None else new_vertex, used_v)
    used_e = {f.id for f in g.edges}
    second = _fresh_id((edge_id, "b"), used_e)
    edges = tuple(f for f in g.edges if f.id != edge_id) + (
        Edge(edge_id, e.tail, w),
        Edge(second, w, e.head),
    )
    return Multigraph(g.vertices + (w,), edges)


# ===========================================================================
# Structure checks
# ===========================================================================


def girth(g: Multigraph) -> int | None:
    """Length of a shortest cycle, or None for a forest (parallel pair -> 2)."""
    # A parallel pair is a 2-cycle and no shorter cycle exists (no loops).
    seen_pairs: set[frozenset] = set()
    for e in g.edges:
        pair = frozenset((e.tail, e.head))
        if pair in seen_pairs:
            return 2
        seen_pairs.add(pair)

    best: int | None = None
    index = {v: i for i, v in enumerate(g.vertices)}
    adj: list[list[tuple[int, int]]] = [[] for _ in g.vertices]
    for j, e in enumerate(g.edges):
        t, h = index[e.tail], index[e.head]
        adj[t].append((h, j))
        adj[h].append((t, j))
    n = len(g.vertices)
    dist = [0] * n
    parent_edge = [0] * n
    for root in range(n):
        for i in range(n):
            dist[i] = -1
        dist[root] = 0
        parent_edge[root] = -1
        queue = [root]
        qh = 0
        while qh < len(queue):
            u = queue[qh]
            qh += 1
            if best is not None and 2 * dist[u] >= best:
                break
            for w, j in adj[u]:
                if j == parent_edge[u]:
                    continue
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    parent_edge[w] = j
                    queue.append(w)
                else:
                    cycle = dist[u] + dist[w] + 1
                    if best is None or cycle < best:
                        best = cycle
    return best


def is_cubic(g: Multigraph) -> bool:
    return all(g.degree(v) == 3 for v in g.vertices)


def chromatic_index_3(g: Multigraph) -> bool:
    """Does a cubic graph admit a proper 3-edge-colouring?

    Exhaustive backtracking with fail-first edge selection: always colour
    an edge with the fewest colours free at its endpoints.
    """
    if not is_cubic(g):
        raise ValueError("chromatic_index_3 requires a cubic graph")
    m = len(g.edges)
    if m == 0:
        return True
    index = {v: i for i, v in enumerate(g.vertices)}
    ends = [(index[e.tail], index[e.head]) for e in g.edges]
    free = [0b111] * len(g.vertices)  # available colours per vertex
    colour = [-1] * m

    def pick() -> int:
        best_j, best_c = -1, 4
        for j in range(m):
            if colour[j] >= 0:
                continue
            t, h = ends[j]
            c = bin(free[t] & free[h]).count("1")
            if c < best_c:
                best_j, best_c = j, c
                if c == 0:
                    break
        return best_j

    def solve(remaining: int) -> bool:
        if remaining == 0:
            return True
        j = pick()
        t, h = ends[j]
        avail = free[t] & free[h]
        while avail:
            bit = avail & -avail
            avail ^= bit
            colour[j] = bit
            free[t] ^= bit
            free[h] ^= bit
            if solve(remaining - 1):
                return True
            free[t] ^= bit
            free[h] ^= bit
            colour[j] = -1
        return False

    return solve(m)


def _chordless_cycle_masks(g: Multigraph) -> list[int]:
    """Vertex bitmasks of all digons and all chordless cycles (length >= 3).

    Chordless paths are grown from their minimum vertex; a vertex adjacent
    to the start closes the cycle and is never extended past, so every
    chordless cycle is produced exactly once (direction fixed by requiring
    second vertex < last vertex).
    """
    index = {v: i for i, v in enumerate(g.vertices)}
    n = len(g.vertices)
    adj: list[set[int]] = [set() for _ in range(n)]
    masks: set[int] = set()
    pair_seen: set[frozenset[int]] = set()
    for e in g.edges:
        t, h = index[e.tail], index[e.head]
        pair = frozenset((t, h))
        if pair in pair_seen:
            masks.add((1 << t) | (1 << h))  # digon
        pair_seen.add(pair)
        adj[t].add(h)
        adj[h].add(t)

    for v0 in range(n):
        # DFS over chordless paths v0, v1, ..., last (all > v0 except v0).
        stack: list[tuple[list[int], int]] = []
        for v1 in sorted(adj[v0]):
            if v1 > v0:
                stack.append(([v0, v1], (1 << v0) | (1 << v1)))
        while stack:
            path, mask = stack.pop()
            last = path[-1]
            if len(path) >= 3 and v0 in adj[last]:
                # Closing edge found; extending would leave the chord
                # (v0, last), so record (once, via the direction canon).
                if path[1] < last:
                    masks.add(mask)
                continue
            for w in adj[last]:
                if w <= v0 or mask >> w & 1:
                    continue
                # w may touch the path only at `last` (and at v0 to close).
                if any(
                    (mask >> u & 1) and u != last and u != v0 for u in adj[w]
                ):
                    continue
                stack.append((path + [w], mask | (1 << w)))
    return sorted(masks)


def cyclic_edge_connectivity_at_least(g: Multigraph, k: int) -> bool:
    """Is every cycle-separating edge cut of a cubic graph of size >= k?

    True when no such cut exists at all.  Exact: contract each vertex-
    disjoint pair of chordless cycles and take minimum edge cuts.
    """
    if not is_cubic(g):
        raise ValueError("cyclic edge connectivity requires a cubic graph")
    if k <= 0:
        return True
    n = len(g.vertices)
    if n > 64:
        raise ValueError("cyclic edge connectivity limited to 64 vertices")
    masks = _chordless_cycle_masks(g)
    if len(masks) < 2:
        return True
    index = {v: i for i, v in enumerate(g.vertices)}
    tails = np.fromiter((index[e.tail] for e in g.edges), np.int64, len(g.edges))
    heads = np.fromiter((index[e.head] for e in g.edges), np.int64, len(g.edges))
    for i in range(len(masks)):
        for j in range(i + 1, len(masks)):
            if masks[i] & masks[j]:
                continue
            flow = pair_mincut(n, tails, heads, masks[i], masks[j], k)
            if flow < k:
                return False
    return True


def is_snark(g: Multigraph) -> bool:
    """Cubic, girth >= 5, cyclically 4-edge-connected, not 3-edge-colourable."""
    if not is_cubic(g):
        return False
    gi = girth(g)
    if gi is not None and gi < 5:
        return False
    if not cyclic_edge_connectivity_at_least(g, 4):
        return False
    return not chromatic_index_3(g)


# ===========================================================================
# graph6 codec (simple graphs only)
# ===========================================================================


def _g6_bytes_to_bits(data: bytes, offset: int) -> Iterator[int]:
    for b in data[offset:]:
        if not 63 <= b <= 126:
            raise ParseError(f"invalid graph6 byte {b}", offset)
        for shift in range(5, -1, -1):
            yield (b - 63) >> shift & 1
        offset += 1


def read_graph6(text: str) -> Multigraph:
    """Decode one graph6 line into a simple graph on vertices 0..n-1."""
    data = text.strip().encode("ascii")
    if data.startswith(b">>graph6<<"):
        data = data[len(b">>graph6<<"):]
    if not data:
        raise ParseError("empty graph6 input", 0)
    pos = 0
    if data[0] == 126:  # '~'
        if len(data) >= 4 and data[1] != 126:
            n = ((data[1] - 63) << 12) | ((data[2] - 63) << 6) | (data[3] - 63)
            pos = 4
        else:
            raise ParseError("graph6 sizes beyond 258047 not supported", 0)
    else:
        n = data[0] - 63
        pos = 1
    if n < 0 or (pos == 1 and n > 62):
        raise ParseError("invalid graph6 vertex count byte", 0)
    need = n * (n - 1) // 2
    bits = _g6_bytes_to_bits(data, pos)
    pairs: list[tuple[int, int]] = []
    got = 0
    try:
        for j in range(1, n):
            for i in range(j):
                if next(bits):
                    pairs.append((i, j))
                got += 1
    except StopIteration:
        raise ParseError(
            f"graph6 body too short: {got} of {need} bits", len(data)
        ) from None
    return Multigraph.from_edges(pairs, vertices=range(n))


def write_graph6(g: Multigraph) -> str:
    """Encode a simple graph as graph6; vertex order = listed order."""
    n = len(g.vertices)
    index = {v: i for i, v in enumerate(g.vertices)}
    seen: set[tuple[int, int]] = set()
    adj = [[False] * n for _ in range(n)]
    for e in g.edges:
        t, h = index[e.tail], index[e.head]
        key = (min(t, h), max(t, h))
        if key in seen:
            raise ValueError("graph6 supports simple graphs only (parallel edges)")
        seen.add(key)
        adj[t][h] = adj[h][t] = True
    if n <= 62:
        out = [n + 63]
    elif n <= 258047:
        out = [126, (n >> 12) + 63, (n >> 6 & 63) + 63, (n & 63) + 63]
    else:
        raise ValueError("graph too large for this graph6 writer")
    acc = 0
    nbits = 0
    for j in range(1, n):
        for i in range(j):
            acc = acc << 1 | int(adj[i][j])
            nbits += 1
            if nbits == 6:
                out.append(acc + 63)
                acc, nbits = 0, 0
    if nbits:
        out.append((acc << (6 - nbits)) + 63)
    return bytes(out).decode("ascii")


# ===========================================================================
# Capacity-graph text format
# ===========================================================================


def read_capacity_graph(text: str) -> CapacityGraph:
    """Parse the line-oriented capacity-graph format (header "cg 1")."""
    vertices: list[str] = []
    edges: list[Edge] = []
    sigma: dict[EdgeId, AtomSet] = {}
    terminals: tuple[str, str] | None = None
    lines = text.splitlines()
    header_seen = False
    for ln, raw in enumerate(lines, start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 4)
        if not header_seen:
            if parts[:2] != ["cg", "1"]:
                raise ParseError(f"line {ln}: expected header 'cg 1'", ln)
            header_seen = True
            continue
        kind = parts[0]
        if kind == "v":
            if len(parts) != 2:
                raise ParseError(f"line {ln}: expected 'v <id>'", ln)
            vertices.append(parts[1])
        elif kind == "e":
            if len(parts) != 5:
                raise ParseError(
                    f"line {ln}: expected 'e <id> <tail> <head> <sigma>'", ln
                )
            _, eid, tail, head, expr = parts
            try:
                value = si5.parse(expr)
            except ParseError as err:
                raise ParseError(f"line {ln}: bad capacity: {err}", ln) from None
            edges.append(Edge(eid, tail, head))
            sigma[eid] = value
        elif kind == "t":
            if len(parts) != 3:
                raise ParseError(f"line {ln}: expected 't <x> <y>'", ln)
            terminals = (parts[1], parts[2])
        else:
            raise ParseError(f"line {ln}: unknown record {kind!r}", ln)
    if not header_seen:
        raise ParseError("missing 'cg 1' header", 0)
    try:
        graph = Multigraph(tuple(vertices), tuple(edges))
        cg = CapacityGraph(graph, sigma, terminals=terminals).validate()
    except ParseError:
        raise
    except ValueError as err:
        raise ParseError(str(err), 0) from None
    return cg


def write_capacity_graph(cg: CapacityGraph) -> str:
    lines = ["cg 1"]
    for v in cg.graph.vertices:
        lines.append(f"v {v}")
    for e in cg.graph.edges:
        lines.append(f"e {e.id} {e.tail} {e.head} {si5.canonical_string(cg.sigma[e.id])}")
    if cg.terminals is not None:
        lines.append(f"t {cg.terminals[0]} {cg.terminals[1]}")
    return "\n".join(lines) + "\n"


# ===========================================================================
# Named graphs
# ===========================================================================


def petersen_graph() -> Multigraph:
    """The Petersen graph, labelled to round-trip as graph6 "IsP@OkWHG"."""
    pairs = [
        (0, 1), (0, 2), (0, 3), (1, 4), (1, 5), (2, 6), (2, 9), (3, 7),
        (3, 8), (4, 6), (4, 8), (5, 7), (5, 9), (6, 7), (8, 9),
    ]
    return Multigraph.from_edges(pairs, vertices=range(10))
