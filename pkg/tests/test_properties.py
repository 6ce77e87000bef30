"""Property-based suites: algebra laws, engine invariants, certificate
alternation, expansion monotonicity, and measure-preserving capacities."""

from __future__ import annotations

import random
from fractions import Fraction

import networkx as nx
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from fiveflow.construct import build_appendix_snark
from fiveflow.flow import decide_faithful, oracle_decide, verify_flow
from fiveflow.graph import (
    CapacityGraph,
    Edge,
    Multigraph,
    expand,
    girth,
    petersen_graph,
)
from fiveflow.si5 import (
    EMPTY,
    OPEN_14,
    OPEN_41,
    Atom,
    AtomKind,
    AtomSet,
    canonical_string,
    enumerate_si5,
    intersect,
    is_symmetric,
    is_valid_union,
    minkowski_sum,
    negate,
    parse,
    strip_points,
)
from fiveflow.wheels import (
    WheelTemplate,
    build_faithful_flow,
    build_wheel,
    enumerate_even_subgraphs,
    even_subgraph_from_rim,
    predicate_cfn5,
)

VALID = enumerate_si5()
NONEMPTY = tuple(a for a in VALID if not a.is_empty())
BOTH_ARCS_AROUND_ZERO = (OPEN_41, parse("(4,0)u(0,1)"))

valid_sets = st.sampled_from(VALID)
nonempty_sets = st.sampled_from(NONEMPTY)


def _atom_of(x: Fraction) -> Atom:
    """The partition atom containing a rational, reduced modulo 5."""
    x = x % 5
    if x.denominator == 1:
        return Atom(AtomKind.INTEGER_POINT, int(x))
    return Atom(AtomKind.UNIT_INTERVAL, int(x))


def _samples(atom: Atom) -> tuple[Fraction, ...]:
    """Grid points dense enough to witness every sum atom exactly."""
    k = atom.index
    if atom.kind is AtomKind.INTEGER_POINT:
        return (Fraction(k),)
    return (k + Fraction(1, 12), k + Fraction(1, 2), k + Fraction(11, 12))


@st.composite
def flow_instances(draw) -> CapacityGraph:
    """Small random loop-free multigraphs with valid nonempty capacities."""
    n = draw(st.integers(min_value=2, max_value=4))
    m = draw(st.integers(min_value=2, max_value=5))
    pairs = []
    for _ in range(m):
        t = draw(st.integers(0, n - 1))
        h = draw(st.integers(0, n - 1))
        if t == h:
            h = (h + 1) % n
        pairs.append((t, h))
    g = Multigraph.from_edges(pairs, vertices=range(n))
    sigma = {i: draw(nonempty_sets) for i in range(m)}
    return CapacityGraph(g, sigma)


# ===========================================================================
# Interval algebra laws
# ===========================================================================


class TestAlgebraLaws:
    @given(a=valid_sets, b=valid_sets)
    def test_sum_matches_the_pointwise_oracle(self, a, b):
        """Minkowski sums agree with exhaustive sums of grid rationals."""
        hit = set()
        for atom_a in a.atoms():
            for atom_b in b.atoms():
                for x in _samples(atom_a):
                    for y in _samples(atom_b):
                        hit.add(_atom_of(x + y))
        assert AtomSet.from_atoms(hit) == minkowski_sum(a, b)

    @given(a=valid_sets, b=valid_sets)
    def test_sum_commutes(self, a, b):
        assert minkowski_sum(a, b) == minkowski_sum(b, a)

    @given(a=valid_sets, b=valid_sets, c=valid_sets)
    def test_sum_associates(self, a, b, c):
        assert minkowski_sum(minkowski_sum(a, b), c) == minkowski_sum(
            a, minkowski_sum(b, c)
        )

    @given(a=valid_sets, b=valid_sets)
    def test_valid_sets_are_closed_under_sum_and_intersection(self, a, b):
        assert is_valid_union(minkowski_sum(a, b))
        assert is_valid_union(intersect(a, b))

    @given(a=valid_sets)
    def test_symmetric_sets_are_negation_fixed(self, a):
        assert is_symmetric(a)
        assert negate(a) == a

    @given(a=valid_sets, b=valid_sets)
    def test_negation_distributes_over_sums(self, a, b):
        assert negate(minkowski_sum(a, b)) == minkowski_sum(negate(a), negate(b))

    @given(a=valid_sets)
    def test_empty_absorbs(self, a):
        assert minkowski_sum(a, EMPTY) == EMPTY

    @given(a=valid_sets)
    def test_strip_points_properties(self, a):
        bare = strip_points(a)
        assert bare.mask & ~a.mask == 0
        assert bare.measure == a.measure
        assert strip_points(bare) == bare
        assert is_valid_union(bare)

    @given(a=valid_sets)
    def test_canonical_string_round_trips(self, a):
        assert parse(canonical_string(a)) == a


# ===========================================================================
# Engine invariants on random instances
# ===========================================================================


# Module-level so the acceptance suite can run the same exploration without
# hypothesis seeing two different bound-method executors.
@settings(max_examples=60, deadline=None)
@given(cg=flow_instances(), cuts=st.lists(valid_sets, min_size=5, max_size=5))
def check_subset_monotonicity(cg, cuts):
    """Shrinking every capacity can only lose feasibility."""
    smaller = CapacityGraph(
        cg.graph,
        {
            e.id: intersect(cg.sigma[e.id], cut)
            for e, cut in zip(cg.graph.edges, cuts)
        },
    )
    if decide_faithful(smaller).feasible:
        assert decide_faithful(cg).feasible


class TestEngineProperties:
    @settings(max_examples=60, deadline=None)
    @given(cg=flow_instances())
    def test_engine_agrees_with_the_oracle(self, cg):
        assert decide_faithful(cg).feasible == oracle_decide(cg).feasible

    @settings(max_examples=60, deadline=None)
    @given(cg=flow_instances())
    def test_feasible_decisions_carry_verified_certificates(self, cg):
        decision = decide_faithful(cg)
        if decision.feasible:
            assert verify_flow(cg, decision.assignment)

    @settings(max_examples=60, deadline=None)
    @given(cg=flow_instances(), flips=st.lists(st.booleans(), min_size=5, max_size=5))
    def test_orientation_independence(self, cg, flips):
        """Reversing reference orientations cannot change feasibility."""
        edges = [
            (e.head, e.tail) if flip else (e.tail, e.head)
            for e, flip in zip(cg.graph.edges, flips)
        ]
        flipped = CapacityGraph(
            Multigraph.from_edges(edges, vertices=cg.graph.vertices), cg.sigma
        )
        assert decide_faithful(flipped).feasible == decide_faithful(cg).feasible

    def test_subset_monotonicity(self):
        """Shrinking every capacity can only lose feasibility."""
        check_subset_monotonicity()


# ===========================================================================
# Alternation along constrained paths in built certificates
# ===========================================================================


@settings(max_examples=80, deadline=None)
@given(
    n=st.integers(min_value=3, max_value=8),
    mask=st.integers(min_value=1),
    a=st.sampled_from(BOTH_ARCS_AROUND_ZERO),
)
def check_rim_alternation(n, mask, a):
    """Adjacent rim values around zero flip between the two intervals."""
    mask %= 1 << n
    assume(mask != 0)
    wt = WheelTemplate(n, even_subgraph_from_rim(n, mask), a)
    assume(not predicate_cfn5(wt))
    flow = build_faithful_flow(wt)
    side = {}
    for i in range(1, n + 1):
        if mask >> (i - 1) & 1:
            v = flow.values[f"r{i}"].value
            assert 4 < v < 5 or 0 < v < 1
            side[i] = v > 4
    for i in range(1, n + 1):
        after = i % n + 1
        if i in side and after in side:
            assert side[i] != side[after]


class TestAlternation:
    def test_consecutive_constrained_rim_edges_alternate(self):
        """Adjacent rim values around zero flip between the two intervals."""
        check_rim_alternation()


# ===========================================================================
# Expansion monotonicity
# ===========================================================================


class TestExpansionMonotonicity:
    def test_fifty_random_expansions(self):
        """Replacing a vertex by a two-vertex graph never gains feasibility."""
        rng = random.Random(2026)
        pool = [
            (g, decide_faithful(CapacityGraph.uniform(g, OPEN_14)).feasible)
            for g in [build_wheel(k) for k in (3, 4, 5, 6)] + [petersen_graph()]
        ]
        informative = 0
        for _ in range(50):
            g, before = rng.choice(pool)
            x = rng.choice(sorted(g.vertices, key=str))
            internal = (
                (Edge("bridge", "ka", "kb"),) if rng.random() < 0.5 else ()
            )
            k = Multigraph(("ka", "kb"), internal)
            attachment = {
                e.id: rng.choice(("ka", "kb")) for e in g.incident_edges(x)
            }
            expanded = expand(g, x, k, attachment)
            after = decide_faithful(
                CapacityGraph.uniform(expanded, OPEN_14)
            ).feasible
            if after:
                assert before
                informative += 1
        assert informative > 0


# ===========================================================================
# Measure-preserving capacity changes on wheels
# ===========================================================================


class TestMeasurePreservation:
    def test_exhaustive_on_small_wheels(self):
        """Dropping or restoring boundary points never changes the decision."""
        for n in (3, 4, 5):
            for j in enumerate_even_subgraphs(n, up_to_symmetry=True):
                for a in NONEMPTY:
                    wt = WheelTemplate(n, j, a)
                    decided = decide_faithful(wt.capacity_graph()).feasible
                    bare = strip_points(a)
                    if bare != a:
                        stripped = WheelTemplate(n, j, bare)
                        assert (
                            decide_faithful(stripped.capacity_graph()).feasible
                            == decided
                        )
                    for mid in VALID:
                        if mid in (a, bare):
                            continue
                        if bare.mask & ~mid.mask or mid.mask & ~a.mask:
                            continue
                        between = WheelTemplate(n, j, mid)
                        assert (
                            decide_faithful(between.capacity_graph()).feasible
                            == decided
                        )


# ===========================================================================
# External girth oracle
# ===========================================================================


def _to_networkx(g: Multigraph) -> nx.Graph:
    h = nx.Graph()
    h.add_nodes_from(g.vertices)
    h.add_edges_from((e.tail, e.head) for e in g.edges)
    return h


class TestGirthCrossCheck:
    def test_named_graphs(self):
        for g, expected in (
            (petersen_graph(), 5),
            (build_wheel(3), 3),
            (build_wheel(7), 3),
            (build_appendix_snark(), 5),
        ):
            assert girth(g) == expected
            assert nx.girth(_to_networkx(g)) == expected

    def test_random_simple_graphs(self):
        rng = random.Random(7)
        for _ in range(30):
            n = rng.randint(4, 9)
            pairs = [
                (u, v)
                for u in range(n)
                for v in range(u + 1, n)
                if rng.random() < 0.35
            ]
            g = Multigraph.from_edges(pairs, vertices=range(n))
            mine = girth(g)
            other = nx.girth(_to_networkx(g))
            if mine is None:
                assert other == float("inf")
            else:
                assert mine == other


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
