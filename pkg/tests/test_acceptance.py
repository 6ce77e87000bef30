"""Acceptance criteria: one test and one printed pass/fail line per criterion.

Each criterion times its own work and pins the runtime budget where one is
specified; the printed line reports the outcome even under pytest's output
capture.
"""

from __future__ import annotations

import random
import time
from contextlib import contextmanager
from functools import lru_cache
from itertools import product

import pytest

from fiveflow.capacity import (
    compute_capacity,
    k4_gadget,
    petersen_minus_edge,
    standard_edge,
)
from fiveflow.construct import build_appendix_snark, template_odd_cycle
from fiveflow.flow import (
    decide_faithful,
    decide_integer_nz5,
    oracle_decide,
)
from fiveflow.graph import (
    CapacityGraph,
    Multigraph,
    chromatic_index_3,
    cyclic_edge_connectivity_at_least,
    girth,
    is_cubic,
    petersen_graph,
)
from fiveflow.si5 import (
    OPEN_14,
    OPEN_41,
    Atom,
    AtomKind,
    AtomSet,
    enumerate_si5,
    intersect,
    minkowski_sum,
)
from fiveflow.wheels import build_wheel, scan

ALL_21 = enumerate_si5()


@contextmanager
def criterion(capsys, index: int, label: str, budget: float | None = None):
    start = time.perf_counter()
    ok = False
    elapsed = 0.0
    try:
        yield
        elapsed = time.perf_counter() - start
        if budget is not None:
            assert elapsed < budget, f"runtime {elapsed:.2f}s exceeds {budget}s"
        ok = True
    finally:
        if ok:
            timing = f" ({elapsed:.2f}s" + (
                f" < {budget:.0f}s)" if budget is not None else ")"
            )
        else:
            timing = ""
        with capsys.disabled():
            print(f"[criterion {index}] {label}: {'PASS' if ok else 'FAIL'}{timing}")


@lru_cache(maxsize=None)
def _scan_8():
    return scan(8)


# ===========================================================================
# Independent brute-force census filter (criterion 1)
# ===========================================================================


def _brute_is_union_of_open_arcs(mask: int) -> bool:
    """A point atom can only appear as the interior of two joined intervals."""
    for k in range(5):
        if mask >> (5 + k) & 1:
            if not (mask >> ((k - 1) % 5) & 1 and mask >> k & 1):
                return False
    return True


def _brute_is_symmetric(mask: int) -> bool:
    """Negate atom by atom: U_k -> U_{4-k}, P_k -> P_{(5-k) mod 5}."""
    flipped = 0
    for k in range(5):
        if mask >> k & 1:
            flipped |= 1 << (4 - k)
        if mask >> (5 + k) & 1:
            flipped |= 1 << (5 + (5 - k) % 5)
    return flipped == mask


class TestCriterion1:
    def test_census_and_closure(self, capsys):
        """21 sets, matching the 1024-mask filter, closed under sum and meet."""
        with criterion(capsys, 1, "interval-set census and closure", budget=1.0):
            census = enumerate_si5()
            assert len(census) == 21
            brute = {
                mask
                for mask in range(1024)
                if _brute_is_union_of_open_arcs(mask) and _brute_is_symmetric(mask)
            }
            assert {a.mask for a in census} == brute
            members = set(census)
            for a in census:
                for b in census:
                    assert minkowski_sum(a, b) in members
                    assert intersect(a, b) in members


class TestCriterion2:
    def test_three_reference_capacities(self, capsys):
        """Standard edge, the K4 gadget, and Petersen minus an edge."""
        with criterion(capsys, 2, "reference capacities", budget=30.0):
            assert compute_capacity(standard_edge()).values == OPEN_14
            everything_but_two_points = AtomSet.from_atoms(
                atom
                for atom in (
                    [Atom(AtomKind.UNIT_INTERVAL, k) for k in range(5)]
                    + [Atom(AtomKind.INTEGER_POINT, k) for k in range(5)]
                )
                if not (atom.kind is AtomKind.INTEGER_POINT and atom.index in (2, 3))
            )
            assert compute_capacity(k4_gadget()).values == everything_but_two_points
            assert compute_capacity(petersen_minus_edge()).values == OPEN_41


class TestCriterion3:
    CONNECTED_CATALOG = (
        ((0, 1),),
        ((0, 1), (1, 2)),
        ((0, 1), (0, 1)),
        ((0, 1), (1, 2), (2, 3)),
        ((0, 1), (0, 2), (0, 3)),
        ((0, 1), (1, 2), (2, 0)),
        ((0, 1), (0, 1), (1, 2)),
        ((0, 1), (0, 1), (0, 1)),
    )

    def test_engine_matches_oracle(self, capsys):
        """Exhaustive up to three edges, then 500 random larger instances."""
        with criterion(capsys, 3, "engine/oracle equivalence", budget=300.0):
            for pairs in self.CONNECTED_CATALOG:
                g = Multigraph.from_edges(pairs)
                for sigma in product(ALL_21, repeat=len(pairs)):
                    cg = CapacityGraph(g, dict(enumerate(sigma)))
                    assert (
                        decide_faithful(cg).feasible == oracle_decide(cg).feasible
                    ), (pairs, tuple(map(str, sigma)))
            rng = random.Random(20260814)
            for _ in range(500):
                n = rng.randint(2, 5)
                m = rng.randint(4, 5)
                pairs = []
                while len(pairs) < m:
                    t, h = rng.randrange(n), rng.randrange(n)
                    if t != h:
                        pairs.append((t, h))
                g = Multigraph.from_edges(pairs, vertices=range(n))
                cg = CapacityGraph(g, {i: rng.choice(ALL_21) for i in range(m)})
                assert (
                    decide_faithful(cg).feasible == oracle_decide(cg).feasible
                ), (pairs, {k: str(v) for k, v in cg.sigma.items()})


class TestCriterion4:
    def test_scan_agrees_everywhere(self, capsys):
        """Classification equals the engine on every wheel instance to n=8."""
        with criterion(capsys, 4, "wheel scan to rim length 8", budget=1800.0):
            report = _scan_8()
            assert len(report.records) == 1460
            assert report.disagreements == ()

    def test_worker_count_does_not_matter(self, capsys):
        with criterion(capsys, 4, "wheel scan worker-count equality"):
            key = lambda rep: [
                (r.n, r.rim_mask, r.a, r.predicate, r.engine_feasible, r.certificate)
                for r in rep.records
            ]
            assert key(scan(8, jobs=2)) == key(_scan_8())


class TestCriterion5:
    def test_constructive_certificates_verify(self, capsys):
        """Every feasible scanned instance carries a verified built flow."""
        with criterion(capsys, 5, "constructive certificates"):
            report = _scan_8()
            feasible = [r for r in report.records if r.engine_feasible]
            assert feasible, "scan produced no feasible instances"
            assert report.certificate_failures == ()
            assert all(r.certificate == "verified" for r in feasible)


class TestCriterion6:
    def test_petersen_classification(self, capsys):
        """Open-interval infeasibility plus an integer 5-flow."""
        with criterion(capsys, 6, "Petersen classification", budget=10.0):
            g = petersen_graph()
            assert not decide_faithful(CapacityGraph.uniform(g, OPEN_14)).feasible
            assert decide_integer_nz5(g).feasible


class TestCriterion7:
    def test_snark_pipeline(self, capsys):
        """28 vertices, 42 edges, all snark checks, infeasible seed template."""
        with criterion(capsys, 7, "28-vertex snark pipeline", budget=120.0):
            g = build_appendix_snark()
            assert g.vertex_count == 28
            assert g.edge_count == 42
            assert is_cubic(g)
            assert girth(g) == 5
            assert cyclic_edge_connectivity_at_least(g, 4)
            assert not chromatic_index_3(g)
            seed = template_odd_cycle(build_wheel(3), ("x1", "x2", "x3"), OPEN_41)
            assert not decide_faithful(seed.cg).feasible


class TestCriterion8:
    def test_property_suites(self, capsys):
        """Alternation, two monotonicity laws, and measure preservation."""
        from test_properties import (
            TestExpansionMonotonicity,
            TestMeasurePreservation,
            check_rim_alternation,
            check_subset_monotonicity,
        )

        with criterion(capsys, 8, "property suites"):
            check_rim_alternation()
            check_subset_monotonicity()
            TestExpansionMonotonicity().test_fifty_random_expansions()
            TestMeasurePreservation().test_exhaustive_on_small_wheels()


if __name__ == "__main__":
    pytest.main([__file__, "-v"])
