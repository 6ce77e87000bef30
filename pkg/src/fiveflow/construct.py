"""From capacity templates to concrete graphs with circular flow number 5.

A *template* is a capacity graph whose capacities alone force every
compatible flow out of existence: the engine certifies infeasibility at
construction time.  Substituting each constrained edge with a generalised
edge whose capacity is contained in the edge's capacity transfers the
obstruction to a concrete graph, because any faithful flow on the concrete
graph would restrict to a faithful flow on the template.

Three template shapes are provided:

* an odd cycle of measure-2 edges whose vertices each have exactly one
  neighbour off the cycle -- adjacent cycle edges must then alternate
  between the two unit intervals, which is impossible around an odd cycle;
* a path of edges with capacity inside ``(4,1)`` carrying a chord between
  two internal vertices at even distance, closing an odd cycle with the
  same alternation conflict;
* two such paths joined by a pair of cross edges whose attachment points
  sit at even distance on the first path and odd distance on the second.

The module ends with the complete pipeline producing the 28-vertex snark
obtained from a triangle of Petersen-minus-edge pieces: substitution on
the constrained triangle of a four-wheel-shaped seed, a 3/2 expansion of
the three degree-5 vertices, and smoothing of the leftover degree-2
vertices.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Mapping, Sequence

from .capacity import compute_capacity, petersen_minus_edge
from .flow import decide_faithful
from .graph import (
    CapacityGraph,
    Edge,
    EdgeId,
    Multigraph,
    VertexId,
    expand,
    girth,
    is_snark,
    smooth,
)
from .si5 import OPEN_14, OPEN_41, AtomSet, canonical_string, strip_points
from .wheels import build_wheel

__all__ = [
    "Template",
    "Realisation",
    "template_odd_cycle",
    "template_path",
    "template_two_paths",
    "substitute",
    "APPENDIX_EXPANSION_SPLIT",
    "find_expansion_split",
    "build_appendix_snark",
]


# ===========================================================================
# Templates
# ===========================================================================


@dataclass(frozen=True)
class Template:
    """An engine-certified infeasible capacity graph plus its provenance.

    Construction asserts that the flow engine reports Infeasible, so any
    graph assembled by substituting capacity-contained pieces on the
    template's edges inherits circular flow number at least 5.
    """

    cg: CapacityGraph
    provenance: str

    def __post_init__(self) -> None:
        decision = decide_faithful(self.cg)
        if decision.feasible:
            raise ValueError(
                f"template is not infeasible: {self.provenance}"
            )


def _path_edges(
    h: Multigraph, vertices: Sequence[VertexId], what: str, close: bool = False
) -> list[EdgeId]:
    """The unique edge ids along consecutive vertex pairs."""
    if len(set(vertices)) != len(vertices):
        raise ValueError(f"{what} repeats a vertex")
    for v in vertices:
        if not h.has_vertex(v):
            raise ValueError(f"{what} vertex {v!r} is not in the graph")
    pairs = list(zip(vertices, vertices[1:]))
    if close:
        pairs.append((vertices[-1], vertices[0]))
    ids = []
    for u, v in pairs:
        between = [
            e.id for e in h.incident_edges(u) if e.other(u) == v
        ]
        if len(between) != 1:
            raise ValueError(
                f"{what} needs exactly one edge between {u!r} and {v!r}, "
                f"found {len(between)}"
            )
        ids.append(between[0])
    return ids


def _sigma_on(
    h: Multigraph, marked: set[EdgeId], a: AtomSet
) -> dict[EdgeId, AtomSet]:
    return {e.id: (a if e.id in marked else OPEN_14) for e in h.edges}


def template_odd_cycle(
    h: Multigraph, cycle: Sequence[VertexId], a: AtomSet
) -> Template:
    """A template from an odd cycle of measure-2 edges.

    Every cycle vertex must have exactly one incident edge leaving the
    cycle; adjacent cycle edges are then forced to alternate between the
    two unit intervals of the capacity, which cannot close an odd cycle.
    """
    if len(cycle) < 3:
        raise ValueError(f"a cycle needs at least 3 vertices, got {len(cycle)}")
    if len(cycle) % 2 == 0:
        raise ValueError(f"the cycle must be odd, got length {len(cycle)}")
    if a.measure != 2:
        raise ValueError(
            f"the cycle capacity must have measure 2, got {a.measure}"
        )
    ids = _path_edges(h, cycle, "cycle", close=True)
    marked = set(ids)
    cycle_set = set(cycle)
    for v in cycle:
        off = [e for e in h.incident_edges(v) if e.id not in marked]
        if len(off) != 1:
            raise ValueError(
                f"cycle vertex {v!r} has {len(off)} off-cycle edges, need 1"
            )
        if off[0].other(v) in cycle_set:
            raise ValueError(
                f"cycle vertex {v!r} has a chord into the cycle"
            )
    cg = CapacityGraph(h, _sigma_on(h, marked, a))
    return Template(
        cg,
        f"odd cycle {'-'.join(map(str, cycle))} with capacity "
        f"{canonical_string(a)}",
    )


def _require_arc_capacity(a: AtomSet) -> None:
    if a.mask & ~OPEN_41.mask:
        raise ValueError(
            f"path capacity must be contained in (4,1), got {canonical_string(a)}"
        )
    if strip_points(a).measure != 2:
        raise ValueError(
            "path capacity must cover both unit intervals around 0, got "
            f"{canonical_string(a)}"
        )


def _check_internal_degrees(
    h: Multigraph, path: Sequence[VertexId], what: str
) -> None:
    for v in path[1:-1]:
        if h.degree(v) != 3:
            raise ValueError(
                f"{what} internal vertex {v!r} has degree {h.degree(v)}, need 3"
            )


def template_path(
    h: Multigraph, path: Sequence[VertexId], a: AtomSet
) -> Template:
    """A template from a constrained path with an even-distance chord.

    The path edges carry a capacity inside ``(4,1)``; a chord between two
    internal vertices an even number of steps apart closes an odd cycle,
    so the forced alternation around it cannot be consistent.
    """
    if len(path) < 4:
        raise ValueError(
            f"the path needs at least 4 vertices, got {len(path)}"
        )
    _require_arc_capacity(a)
    ids = _path_edges(h, path, "path")
    marked = set(ids)
    _check_internal_degrees(h, path, "path")
    position = {v: i for i, v in enumerate(path)}
    internal = set(path[1:-1])
    chord = None
    for e in h.edges:
        if e.id in marked:
            continue
        if e.tail in internal and e.head in internal:
            gap = abs(position[e.tail] - position[e.head])
            if gap % 2 == 0 and gap >= 2:
                chord = e
                break
    if chord is None:
        raise ValueError(
            "no chord joins two internal path vertices at even distance"
        )
    cg = CapacityGraph(h, _sigma_on(h, marked, a))
    return Template(
        cg,
        f"constrained path {'-'.join(map(str, path))} with chord "
        f"{chord.tail!r}-{chord.head!r} and capacity {canonical_string(a)}",
    )


def template_two_paths(
    h: Multigraph,
    path_one: Sequence[VertexId],
    path_two: Sequence[VertexId],
    a: AtomSet,
) -> Template:
    """A template from two constrained paths linked by two cross edges.

    The attachment points must sit at even distance on the first path and
    odd distance on the second: the first cross edge synchronises the two
    alternations and the parity mismatch then contradicts the second.
    """
    if set(path_one) & set(path_two):
        raise ValueError("the two paths must be vertex-disjoint")
    _require_arc_capacity(a)
    ids_one = _path_edges(h, path_one, "first path")
    ids_two = _path_edges(h, path_two, "second path")
    marked = set(ids_one) | set(ids_two)
    _check_internal_degrees(h, path_one, "first path")
    _check_internal_degrees(h, path_two, "second path")
    pos_one = {v: i for i, v in enumerate(path_one)}
    pos_two = {v: i for i, v in enumerate(path_two)}
    internal_one = set(path_one[1:-1])
    internal_two = set(path_two[1:-1])
    cross = []
    for e in h.edges:
        if e.id in marked:
            continue
        ends = {e.tail, e.head}
        if len(ends & internal_one) == 1 and len(ends & internal_two) == 1:
            cross.append(e)
    for first, second in combinations(cross, 2):
        u1 = first.tail if first.tail in internal_one else first.head
        u2 = first.other(u1)
        w1 = second.tail if second.tail in internal_one else second.head
        w2 = second.other(w1)
        if (
            abs(pos_one[u1] - pos_one[w1]) % 2 == 0
            and abs(pos_two[u2] - pos_two[w2]) % 2 == 1
        ):
            cg = CapacityGraph(h, _sigma_on(h, marked, a))
            return Template(
                cg,
                f"two constrained paths joined by {u1!r}-{u2!r} and "
                f"{w1!r}-{w2!r} with capacity {canonical_string(a)}",
            )
    raise ValueError(
        "no pair of cross edges meets the first path at even distance "
        "and the second at odd distance"
    )


# ===========================================================================
# Substitution
# ===========================================================================


@dataclass(frozen=True)
class Realisation:
    """Pieces to splice onto template edges.

    Maps edge ids to generalised edges carried as capacity graphs with
    terminals.  The map may be partial: unmapped edges stay as literal
    edges, which preserves the template guarantee exactly when their
    capacity contains the full wide interval ``(1,4)`` (a bare edge is a
    generalised edge of capacity ``(1,4)``).
    """

    pieces: Mapping[EdgeId, CapacityGraph]

    def __post_init__(self) -> None:
        object.__setattr__(self, "pieces", dict(self.pieces))
        for eid, piece in self.pieces.items():
            if piece.terminals is None:
                raise ValueError(f"piece for edge {eid!r} has no terminals")


_PIECE_CAPACITY_CACHE: dict[int, AtomSet] = {}


def _piece_capacity(piece: CapacityGraph) -> AtomSet:
    key = id(piece)
    if key not in _PIECE_CAPACITY_CACHE:
        _PIECE_CAPACITY_CACHE[key] = compute_capacity(piece).values
    return _PIECE_CAPACITY_CACHE[key]


def substitute(t: Template, r: Realisation) -> Multigraph:
    """Splice the realisation's pieces onto the template's edges.

    Every mapped piece must have its computed capacity contained in the
    capacity of the edge it replaces.  Piece vertices are relabelled as
    ``(edge id, piece vertex)`` pairs; terminals merge into the template
    edge's tail and head in order.
    """
    g = t.cg.graph
    unknown = set(r.pieces) - {e.id for e in g.edges}
    if unknown:
        raise ValueError(f"realisation maps non-template edges: {sorted(map(str, unknown))}")
    for eid, piece in r.pieces.items():
        cap = _piece_capacity(piece)
        allowed = t.cg.sigma[eid]
        if cap.mask & ~allowed.mask:
            raise ValueError(
                f"piece capacity {canonical_string(cap)} is not contained in "
                f"sigma({eid!r}) = {canonical_string(allowed)}"
            )
    vertices: list[VertexId] = list(g.vertices)
    edges: list[Edge] = []
    for e in g.edges:
        piece = r.pieces.get(e.id)
        if piece is None:
            edges.append(e)
            continue
        px, py = piece.terminals

        def rename(v: VertexId, eid=e.id, px=px, py=py, tail=e.tail, head=e.head):
            if v == px:
                return tail
            if v == py:
                return head
            return (eid, v)

        for pv in piece.graph.vertices:
            if pv != px and pv != py:
                vertices.append((e.id, pv))
        for pe in piece.graph.edges:
            edges.append(Edge((e.id, pe.id), rename(pe.tail), rename(pe.head)))
    return Multigraph(tuple(vertices), tuple(edges))


# ===========================================================================
# The 28-vertex snark pipeline
# ===========================================================================

# The 3/2 split used when expanding each degree-5 vertex: the listed two
# piece edges move to the degree-2 side (and are re-joined by smoothing),
# while the spoke and the remaining two piece edges form the new cubic
# vertex.  Splits keeping both moved edges inside one piece always close a
# 4-cycle after smoothing (two neighbours of a removed piece terminal get
# joined, and they already share a 3-path), so the recorded split takes
# one edge from each neighbouring piece.  It is the first fully verified
# candidate in the deterministic search of find_expansion_split.
APPENDIX_EXPANSION_SPLIT: dict[str, frozenset] = {
    "x1": frozenset({("r1", 8), ("r3", 6)}),
    "x2": frozenset({("r1", 6), ("r2", 8)}),
    "x3": frozenset({("r2", 6), ("r3", 8)}),
}


def _appendix_seed() -> Template:
    wheel = build_wheel(3)
    return template_odd_cycle(wheel, ("x1", "x2", "x3"), OPEN_41)


def _appendix_precursor() -> tuple[Template, Multigraph]:
    seed = _appendix_seed()
    piece = petersen_minus_edge()
    realisation = Realisation({"r1": piece, "r2": piece, "r3": piece})
    return seed, substitute(seed, realisation)


def _expand_and_smooth(
    g: Multigraph, v: VertexId, moved: frozenset
) -> Multigraph:
    """Split vertex v 3/2 per the moved-edge set, then smooth the 2-side."""
    keep, drop = f"{v}a", f"{v}b"
    incident = {e.id for e in g.incident_edges(v)}
    if not moved <= incident:
        raise ValueError(f"moved edges {sorted(map(str, moved))} not all at {v!r}")
    if len(moved) != 2 or len(incident) != 5:
        raise ValueError(f"expansion at {v!r} needs a 2-subset of 5 edges")
    attachment = {
        eid: (drop if eid in moved else keep) for eid in incident
    }
    g = expand(g, v, Multigraph((keep, drop), ()), attachment)
    return smooth(g, drop)


def find_expansion_split() -> dict[str, frozenset]:
    """Search the 3/2 expansion splits for the first verified snark.

    Iterates the six 2-subsets of non-spoke edges at each degree-5 vertex
    in deterministic order, prunes candidates below girth 5, and returns
    the first split whose result passes every snark check.
    """
    _, g = _appendix_precursor()
    rim = ("x1", "x2", "x3")
    options = []
    for v in rim:
        piece_edges = sorted(
            e.id for e in g.incident_edges(v) if not str(e.id).startswith("s")
        )
        options.append(
            [frozenset(pair) for pair in combinations(piece_edges, 2)]
        )
    for combo in product(*options):
        h = g
        for v, moved in zip(rim, combo):
            h = _expand_and_smooth(h, v, moved)
        gi = girth(h)
        if gi is not None and gi < 5:
            continue
        if is_snark(h):
            return dict(zip(rim, combo))
    raise ValueError("no expansion split yields a snark")


def build_appendix_snark() -> Multigraph:
    """The full pipeline to the 28-vertex cubic graph with circular flow
    number 5: seed template, three Petersen-minus-edge substitutions, 3/2
    expansions per the recorded split, and smoothing.

    Every stage failure aborts with the stage name; the result is checked
    to be a 28-vertex, 42-edge snark before it is returned.
    """
    try:
        seed, g = _appendix_precursor()
    except ValueError as exc:
        raise RuntimeError(f"appendix stage 'substitution' failed: {exc}") from exc
    if g.vertex_count != 28 or g.edge_count != 45:
        raise RuntimeError(
            "appendix stage 'substitution' failed: expected 28 vertices and "
            f"45 edges, got {g.vertex_count} and {g.edge_count}"
        )
    try:
        for v, moved in APPENDIX_EXPANSION_SPLIT.items():
            g = _expand_and_smooth(g, v, moved)
    except ValueError as exc:
        raise RuntimeError(f"appendix stage 'expansion' failed: {exc}") from exc
    if g.vertex_count != 28 or g.edge_count != 42:
        raise RuntimeError(
            "appendix stage 'expansion' failed: expected 28 vertices and 42 "
            f"edges, got {g.vertex_count} and {g.edge_count}"
        )
    if not is_snark(g):
        raise RuntimeError("appendix stage 'snark-check' failed")
    return g
