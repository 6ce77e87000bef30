"""Wheels carrying an even capacity subgraph: fans, connectors, the exact
infeasibility predicate, constructive faithful flows, and the exhaustive
predicate-versus-engine scan.

Geometry and conventions
------------------------

``build_wheel(n)`` returns the wheel with hub ``c``, rim vertices
``x1..xn`` in clockwise order, rim edges ``ri = xi -> x(i+1)`` (indices
wrap around) and spokes ``si = c -> xi``.  An even subgraph ``J`` (every
vertex of even ``J``-degree) is determined by the set of rim edges it
contains: the spoke ``si`` belongs to ``J`` exactly when one of the two
rim edges at ``xi`` does, and the hub is automatically balanced.  The
capacity template carries a fixed symmetric set ``A`` on the ``J`` edges
and ``(1,4)`` everywhere else.

Every certificate here is written in *rim form*: choose one value per rim
edge; conservation forces each spoke value to be the difference of its two
neighbouring rim values, and the hub balances automatically because those
differences telescope around the rim.  The constructions below therefore
only ever state rim values; spokes are derived.

Fans and connectors
-------------------

A maximal run of ``J`` rim edges together with the two boundary spokes
(which are then forced into ``J``) forms a *fan*: an ``(l+1)``-cycle
through the hub spanning ``l`` rim vertices.  A maximal gap between fans
is a *connector*: ``m+1`` rim edges outside ``J`` with ``m`` interior rim
vertices whose spokes are also outside ``J``.  Fans and connectors
alternate around the rim and their spans re-sum to ``n``.
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from .flow import FlowAssignment, decide_faithful, verify_flow
from .graph import CapacityGraph, Multigraph
from .si5 import (
    OPEN_14,
    OPEN_23,
    OPEN_41,
    AtomSet,
    Mod5Rational,
    canonical_string,
    enumerate_si5,
    interval,
    strip_points,
)

__all__ = [
    "build_wheel",
    "even_subgraph_from_rim",
    "enumerate_even_subgraphs",
    "WheelTemplate",
    "Fan",
    "Connector",
    "RimCycle",
    "FanConnectorSeq",
    "decompose",
    "predicate_cfn5",
    "CertificateParams",
    "FAMILY_ARC41",
    "FAMILY_SPLIT",
    "FAMILY_MEASURE4",
    "build_faithful_flow",
    "ScanRecord",
    "ScanReport",
    "scan",
]

_HALF = Fraction(5, 2)
_U_MASK = {k: 1 << interval(k).bit for k in range(5)}
_U13 = _U_MASK[1] | _U_MASK[3]
_U123 = _U_MASK[1] | _U_MASK[2] | _U_MASK[3]
_U024 = _U_MASK[0] | _U_MASK[2] | _U_MASK[4]
_U04 = _U_MASK[0] | _U_MASK[4]


# ===========================================================================
# The wheel and its even subgraphs
# ===========================================================================


def build_wheel(n: int) -> Multigraph:
    """The wheel with hub ``c``, rim ``x1..xn``, rim edges ``r*``, spokes ``s*``."""
    if n < 2:
        raise ValueError(f"rim length must be at least 2, got {n}")
    vertices = ("c",) + tuple(f"x{i}" for i in range(1, n + 1))
    rims = tuple((f"r{i}", f"x{i}", f"x{i % n + 1}") for i in range(1, n + 1))
    spokes = tuple((f"s{i}", "c", f"x{i}") for i in range(1, n + 1))
    return Multigraph(vertices, rims + spokes)


def even_subgraph_from_rim(n: int, rim_mask: int) -> frozenset:
    """The even subgraph determined by a rim-edge subset (bit i-1 = ``ri``).

    Spokes join exactly at the rim vertices touched by an odd number of the
    chosen rim edges, which is the unique way to complete the subset to an
    even subgraph of the wheel.
    """
    if not 0 < rim_mask < 1 << n:
        raise ValueError(f"rim mask must be a nonempty subset: {rim_mask:#x}")
    ids = set()
    for i in range(1, n + 1):
        prev = rim_mask >> (i - 2) % n & 1
        here = rim_mask >> (i - 1) & 1
        if here:
            ids.add(f"r{i}")
        if prev ^ here:
            ids.add(f"s{i}")
    return frozenset(ids)


def _rotate_mask(n: int, mask: int, k: int) -> int:
    k %= n
    return ((mask << k) | (mask >> (n - k))) & ((1 << n) - 1)


def _reflect_mask(n: int, mask: int) -> int:
    out = 0
    for j in range(n):
        if mask >> j & 1:
            out |= 1 << (n - 1 - j)
    return out


def _dihedral_canonical(n: int, mask: int) -> int:
    """Smallest image of a rim mask under rotations and reflections."""
    best = mask
    refl = _reflect_mask(n, mask)
    for k in range(n):
        best = min(best, _rotate_mask(n, mask, k), _rotate_mask(n, refl, k))
    return best


def _rim_orbit_representatives(n: int) -> list[int]:
    return [
        m for m in range(1, 1 << n) if _dihedral_canonical(n, m) == m
    ]


def enumerate_even_subgraphs(n: int, up_to_symmetry: bool = False) -> list[frozenset]:
    """All nonempty even subgraphs of the wheel, one per rim-edge subset.

    The cycle space of the wheel has dimension ``n`` and every even
    subgraph is fixed by its rim-edge subset, so the nonempty count is
    ``2**n - 1``.  With ``up_to_symmetry`` one representative per orbit of
    the dihedral rim symmetry is returned.
    """
    if n < 3:
        raise ValueError(f"enumeration needs rim length at least 3, got {n}")
    if up_to_symmetry:
        masks = _rim_orbit_representatives(n)
    else:
        masks = list(range(1, 1 << n))
    return [even_subgraph_from_rim(n, m) for m in masks]


# ===========================================================================
# Template
# ===========================================================================


@dataclass(frozen=True)
class WheelTemplate:
    """A wheel, an even subgraph ``J`` of it, and the capacity ``A`` on ``J``.

    The implied capacity function is ``A`` on every ``J`` edge and the wide
    interval ``(1,4)`` on every other edge.
    """

    n: int
    J: frozenset
    A: AtomSet
    _graph: Multigraph = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "J", frozenset(self.J))
        g = build_wheel(self.n)
        object.__setattr__(self, "_graph", g)
        if not self.J:
            raise ValueError("J must be nonempty")
        unknown = self.J - {e.id for e in g.edges}
        if unknown:
            raise ValueError(f"J contains non-wheel edges: {sorted(unknown)}")
        degree = {v: 0 for v in g.vertices}
        for eid in self.J:
            e = g.edge(eid)
            degree[e.tail] += 1
            degree[e.head] += 1
        odd = sorted(str(v) for v, d in degree.items() if d % 2)
        if odd:
            raise ValueError(f"J has odd degree at {odd}")

    @property
    def graph(self) -> Multigraph:
        return self._graph

    @property
    def rim_mask(self) -> int:
        mask = 0
        for i in range(1, self.n + 1):
            if f"r{i}" in self.J:
                mask |= 1 << (i - 1)
        return mask

    def is_rim(self) -> bool:
        return self.rim_mask == (1 << self.n) - 1

    def sigma(self) -> dict:
        return {
            e.id: (self.A if e.id in self.J else OPEN_14)
            for e in self._graph.edges
        }

    def capacity_graph(self) -> CapacityGraph:
        return CapacityGraph(self._graph, self.sigma())


# ===========================================================================
# Decomposition
# ===========================================================================


@dataclass(frozen=True)
class Fan:
    """A maximal ``J`` run spanning ``l`` rim vertices plus its two spokes."""

    l: int

    def __post_init__(self) -> None:
        if self.l < 2:
            raise ValueError(f"a fan spans at least two rim vertices, got {self.l}")


@dataclass(frozen=True)
class Connector:
    """A maximal gap between fans with ``m`` interior rim vertices."""

    m: int

    def __post_init__(self) -> None:
        if self.m < 0:
            raise ValueError(f"connector length must be nonnegative, got {self.m}")


@dataclass(frozen=True)
class RimCycle:
    """Marker result: ``J`` is exactly the rim cycle."""


@dataclass(frozen=True)
class FanConnectorSeq:
    """Alternating cyclic sequence of fans and connectors, clockwise."""

    items: tuple[Union[Fan, Connector], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "items", tuple(self.items))
        if len(self.items) % 2:
            raise ValueError("fans and connectors must alternate cyclically")
        for i, item in enumerate(self.items):
            want = Fan if i % 2 == 0 else Connector
            if not isinstance(item, want):
                raise ValueError("sequence must alternate Fan, Connector, ...")


@dataclass(frozen=True)
class _Component:
    """Internal positioned component: rim edges first_edge..+edge_count-1."""

    kind: str  # "fan" | "conn"
    size: int  # l for fans, m for connectors
    first_edge: int
    edge_count: int


def _edge(n: int, e: int) -> int:
    return (e - 1) % n + 1


def _components(n: int, rim_mask: int) -> list[_Component]:
    """Alternating fan/connector list, anchored at the fan containing the
    lowest-indexed rim vertex."""
    full = (1 << n) - 1
    if not 0 < rim_mask < full:
        raise ValueError("decomposition needs a nonempty proper rim subset")

    def bit(i: int) -> int:
        return rim_mask >> (i - 1) % n & 1

    comps: list[_Component] = []
    for s in range(1, n + 1):
        if not (bit(s) and not bit(s - 1)):
            continue
        run = 1
        while bit(s + run):
            run += 1
        comps.append(_Component("fan", run + 1, s, run))
        gap = 1
        while not bit(s + run + gap):
            gap += 1
        comps.append(_Component("conn", gap - 1, _edge(n, s + run), gap))
    comps.sort(key=lambda c: c.first_edge)

    def fan_vertices(c: _Component) -> list[int]:
        return [_edge(n, c.first_edge + t) for t in range(c.size)]

    lowest = min(
        min(fan_vertices(c)) for c in comps if c.kind == "fan"
    )
    for i, c in enumerate(comps):
        if c.kind == "fan" and lowest in fan_vertices(c):
            return comps[i:] + comps[:i]
    raise AssertionError("unreachable: some fan contains the lowest rim vertex")


def decompose(wt: WheelTemplate) -> Union[FanConnectorSeq, RimCycle]:
    """Fan/connector structure of ``J``, clockwise from the anchor fan."""
    if wt.is_rim():
        return RimCycle()
    items: list[Union[Fan, Connector]] = []
    for c in _components(wt.n, wt.rim_mask):
        items.append(Fan(c.size) if c.kind == "fan" else Connector(c.size))
    return FanConnectorSeq(tuple(items))


# ===========================================================================
# Predicate
# ===========================================================================


def predicate_cfn5(wt: WheelTemplate) -> bool:
    """True exactly when no faithful flow exists for any graph in the family.

    The classification: the empty capacity and the middle interval
    ``(2,3)`` always fail; capacities inside ``(4,1)`` fail exactly for odd
    rim length without a connector of two or more interior vertices; the
    split pair ``(1,2)u(3,4)`` fails exactly on odd rims (the length-3 rim
    being a 3-cycle like the triangles through the hub); every capacity of
    measure three or more succeeds.
    """
    A = wt.A
    if A.is_empty():
        return True
    if A.mask == OPEN_23.mask:
        return True
    if A.mask & ~OPEN_41.mask == 0:
        if wt.n % 2 == 0:
            return False
        if wt.is_rim():
            return True
        return not any(
            c.kind == "conn" and c.size >= 2
            for c in _components(wt.n, wt.rim_mask)
        )
    if A.mask & ~_U13 == 0:
        if wt.n == 3:
            return len(wt.J) == 3
        return wt.n % 2 == 1 and wt.is_rim()
    return False


# ===========================================================================
# Certificate parameters
# ===========================================================================

FAMILY_ARC41 = "arc41"
FAMILY_SPLIT = "split"
FAMILY_MEASURE4 = "measure4"


@dataclass(frozen=True)
class CertificateParams:
    """Exact rational parameters behind the constructive flow families.

    ``family`` selects which invariant group is asserted at construction:

    * ``arc41`` -- flows for capacities inside ``(4,1)``: ``x, y`` in
      ``(1,2)``, ``z`` in ``(4,5)``, with ``x+z`` falling in ``(0,1)`` and
      ``x+2y`` in ``(1,4)`` modulo 5.
    * ``split`` -- flows for capacities inside ``(1,2)u(3,4)``: a single
      slack ``delta`` in ``(0,1/4)`` with ``x = 1+2*delta`` and
      ``y = 7/2+2*delta``; the length-1 connector repairs additionally
      need ``delta < 1/6`` and assert it where used.
    * ``measure4`` -- the odd-rim flow for capacities of measure at least
      four: ``x, z`` in ``(1,2)``, ``y = x+z`` in ``(3,4)``, and a twist
      ``alpha > 1`` with ``alpha+z`` in ``(1,4)`` and ``x-alpha`` in
      ``(0,1)``.

    ``epsilon`` is a reserved perturbation radius kept for interface
    completeness; no constructive branch consumes it.
    """

    x: Fraction = Fraction(6, 5)
    y: Fraction = Fraction(6, 5)
    z: Fraction = Fraction(22, 5)
    delta: Fraction = Fraction(1, 10)
    alpha: Fraction = Fraction(11, 10)
    epsilon: Fraction = Fraction(1, 10)
    family: str = FAMILY_ARC41

    def __post_init__(self) -> None:
        for name in ("x", "y", "z", "delta", "alpha", "epsilon"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))
        x, y, z = self.x, self.y, self.z
        if self.family == FAMILY_ARC41:
            assert 1 < x < 2 and 1 < y < 2 and 4 < z < 5
            assert 0 < (x + z) % 5 < 1
            assert 1 < (x + 2 * y) % 5 < 4
        elif self.family == FAMILY_SPLIT:
            assert 0 < self.delta < Fraction(1, 4)
            assert x == 1 + 2 * self.delta
            assert y == Fraction(7, 2) + 2 * self.delta
        elif self.family == FAMILY_MEASURE4:
            assert 1 < x < 2 and 1 < z < 2
            assert y == x + z and 3 < y < 4
            assert self.alpha > 1
            assert 1 < self.alpha + z < 4
            assert 0 < x - self.alpha < 1
        else:
            raise ValueError(f"unknown parameter family: {self.family!r}")
        assert self.epsilon > 0

    @staticmethod
    def for_arc41(
        x: Fraction = Fraction(6, 5),
        y: Fraction = Fraction(6, 5),
        z: Fraction = Fraction(22, 5),
    ) -> "CertificateParams":
        return CertificateParams(x=x, y=y, z=z, family=FAMILY_ARC41)

    @staticmethod
    def for_split(delta: Fraction = Fraction(1, 10)) -> "CertificateParams":
        delta = Fraction(delta)
        return CertificateParams(
            x=1 + 2 * delta,
            y=Fraction(7, 2) + 2 * delta,
            delta=delta,
            family=FAMILY_SPLIT,
        )

    @staticmethod
    def for_measure4(
        x: Fraction = Fraction(3, 2),
        z: Fraction = Fraction(8, 5),
        alpha: Fraction = Fraction(11, 10),
    ) -> "CertificateParams":
        x, z = Fraction(x), Fraction(z)
        return CertificateParams(
            x=x, y=x + z, z=z, alpha=Fraction(alpha), family=FAMILY_MEASURE4
        )


def _resolve(
    params: CertificateParams | None, family: str, **defaults: Fraction
) -> CertificateParams:
    if params is None:
        makers = {
            FAMILY_ARC41: CertificateParams.for_arc41,
            FAMILY_SPLIT: CertificateParams.for_split,
            FAMILY_MEASURE4: CertificateParams.for_measure4,
        }
        return makers[family](**defaults)
    if params.family != family:
        raise ValueError(
            f"params family {params.family!r} does not fit this template; "
            f"the routed construction needs {family!r}"
        )
    return params


# ===========================================================================
# Constructive flows, rim form
# ===========================================================================


def _rim_alternation_41(n: int, p: CertificateParams) -> dict[int, Fraction]:
    """Even rim inside ``(4,1)``: alternate ``z`` and ``z+x``; spokes ``+-x``."""
    return {i: (p.z if i % 2 == 1 else p.z + p.x) for i in range(1, n + 1)}


def _arc41_rim_odd(n: int, p: CertificateParams) -> dict[int, Fraction]:
    """Odd rim for capacities also covering the middle interval: one rim
    edge takes ``z+2x`` (landing in ``(2,3)``), absorbing the parity."""
    assert 2 < (p.z + 2 * p.x) % 5 < 3, "z + 2x must land in the middle interval"
    rim = {i: (p.z if i % 2 == 1 else p.z + p.x) for i in range(1, n)}
    rim[n] = p.z + 2 * p.x
    return rim


def _arc41_connector_pattern(
    m: int, flipped: bool, x: Fraction, y: Fraction
) -> list[Fraction]:
    """Connector rim values for the ``arc41`` compositions.

    Unflipped connectors keep the sign chain; flipped ones (length one, or
    one widened connector fixing the global parity) reverse it by ending on
    ``-x`` instead of ``x``.
    """
    if m == 0:
        return [x]
    if flipped:
        return [x if j % 2 == 0 else x + y for j in range(m)] + [-x]
    if m % 2 == 0:
        return [x if j % 2 == 0 else x + y for j in range(m + 1)]
    return [x if j % 2 == 0 else x + y for j in range(m - 1)] + [x + 2 * y, x]


def _arc_composition(
    wt: WheelTemplate, p: CertificateParams, modified: bool
) -> dict[int, Fraction]:
    """Component-by-component rim values for capacities around ``0``.

    Each fan at sign ``s`` alternates ``s*(z+x), s*z, ...`` over its rim
    edges; connector patterns bridge fans with values ``+-x`` so that the
    boundary spokes land on ``+-z`` and ``+-(x+z)``.  The sign flips after
    odd fans and after flipped connectors; the flips must cancel around the
    rim.  When they cannot (odd rim, no connector of length two or more),
    the ``modified`` variant lets the anchor fan's entry spoke absorb the
    leftover flip as the value ``z+2x`` inside the middle interval.
    """
    n = wt.n
    comps = _components(n, wt.rim_mask)
    flips = [
        (c.size % 2 == 1) if c.kind == "fan" else (c.size == 1) for c in comps
    ]
    if modified:
        assert sum(flips) % 2 == 1, "the modified entry needs an open sign chain"
        assert 2 < (p.z + 2 * p.x) % 5 < 3
    elif sum(flips) % 2 == 1:
        wide = next(
            i for i, c in enumerate(comps) if c.kind == "conn" and c.size >= 2
        )
        flips[wide] = True

    rim: dict[int, Fraction] = {}
    sign = 1
    for i, c in enumerate(comps):
        if c.kind == "fan":
            values = [p.z + p.x if j % 2 == 1 else p.z for j in range(1, c.size)]
        else:
            values = _arc41_connector_pattern(c.size, flips[i], p.x, p.y)
        for t, v in enumerate(values):
            rim[_edge(n, c.first_edge + t)] = sign * v
        if flips[i]:
            sign = -sign
    assert sign == (-1 if modified else 1)
    return rim


def _split_rim_even(n: int, p: CertificateParams) -> dict[int, Fraction]:
    """Even rim inside ``(1,2)u(3,4)``: alternate ``x`` and ``y``; every
    spoke becomes the self-negating value ``5/2``."""
    return {i: (p.x if i % 2 == 1 else p.y) for i in range(1, n + 1)}


def _open14_rim_odd(n: int) -> dict[int, Fraction]:
    """Odd rim with capacity covering ``(1,4)``'s three intervals."""
    rim = {i: (_HALF if i % 2 == 0 else Fraction(37, 10)) for i in range(2, n + 1)}
    rim[1] = Fraction(13, 10)
    return rim


def _measure4_rim_odd(n: int, p: CertificateParams) -> dict[int, Fraction]:
    """Odd rim for measure >= 4: alternate ``x, y`` and close with ``x-alpha``."""
    rim = {i: (p.x if i % 2 == 1 else p.y) for i in range(1, n)}
    rim[n] = p.x - p.alpha
    return rim


def _triangle_through_hub(wt: WheelTemplate) -> dict[int, Fraction]:
    """Length-3 rim whose ``J`` is a triangle through the hub, for measure
    >= 4 capacities: the fan rim edge takes a value in ``(1,2)`` and the
    two boundary spokes land in ``(0,1)`` and ``(1,2)``."""
    fan = _components(wt.n, wt.rim_mask)[0]
    a = fan.first_edge
    return {
        _edge(3, a): Fraction(3, 2),
        _edge(3, a + 1): Fraction(27, 10),
        _edge(3, a + 2): Fraction(13, 10),
    }


def _split_connector_pattern(m: int, x: Fraction, y: Fraction) -> list[Fraction]:
    """Connector rim values (length != 1) for the split-interval flows.

    Both ends sit on the self-negating ``5/2`` so the pattern joins fans of
    any phase; odd lengths detour through ``5/2 - x`` once.
    """
    if m == 0:
        return [_HALF]
    if m % 2 == 0:
        return [_HALF if j % 2 == 0 else y for j in range(m + 1)]
    head = [_HALF, y, _HALF - x]
    return head + [_HALF if (j - 3) % 2 == 0 else y for j in range(3, m + 1)]


def _split_general(wt: WheelTemplate, p: CertificateParams) -> dict[int, Fraction]:
    """Rim values for capacities inside ``(1,2)u(3,4)`` when ``J`` is a
    proper subgraph.

    Fan values come from one global alternation of ``x`` and ``y`` over the
    cyclic sequence of fan edges (entry spoke, rim edges, exit spoke for
    each fan in turn).  Interior fan spokes then differ by exactly ``5/2``,
    so connectors of length other than one can always meet fans with the
    self-negating value ``5/2`` regardless of phase.  Length-1 connectors
    would force a vanishing interior spoke, so they get a two-value seam
    repair nudging the adjacent fan spokes by ``delta + 1/2``; the repair
    needs the adjacent fan edges on opposite phases, which the global
    alternation guarantees at every seam except possibly the wrap-around.
    The wrap seam is placed on a connector of length other than one when
    one exists; otherwise the fan-edge count ``sum(l+1)`` decides: even
    counts close on their own, and odd counts donate the last rim edge of
    a preceding fan with more than two vertices (the all-two-fans case has
    its own assignment)."""
    n, d = wt.n, p.delta
    xh, yh = p.x, p.y
    comps = _components(n, wt.rim_mask)
    ms = [c.size for c in comps if c.kind == "conn"]
    if any(m == 1 for m in ms):
        assert d < Fraction(1, 6), "length-1 connector repairs need delta < 1/6"

    equal_seam = False
    if any(m != 1 for m in ms):
        ci = next(
            i for i, c in enumerate(comps) if c.kind == "conn" and c.size != 1
        )
        comps = comps[ci + 1 :] + comps[: ci + 1]
    elif n % 2 == 0:
        pass
    elif any(c.kind == "fan" and c.size > 2 for c in comps):
        fi = next(
            i for i, c in enumerate(comps) if c.kind == "fan" and c.size > 2
        )
        comps = comps[fi + 2 :] + comps[: fi + 2]
        equal_seam = True
    else:
        return _split_all_two_fans(wt, p, comps)

    rim: dict[int, Fraction] = {}
    term = 0
    exit_parity = 0
    for idx, c in enumerate(comps):
        if c.kind == "fan":
            for j in range(1, c.size):
                rim[_edge(n, c.first_edge + j - 1)] = (
                    xh if (term + j) % 2 == 0 else yh
                )
            exit_parity = (term + c.size) % 2
            term += c.size + 1
        elif c.size != 1:
            for t, v in enumerate(_split_connector_pattern(c.size, xh, yh)):
                rim[_edge(n, c.first_edge + t)] = v
        elif equal_seam and idx == len(comps) - 1:
            # Wrap seam with equal phases on both sides: the preceding
            # fan's last rim edge moves off the alternation to 3 + delta,
            # after which a fixed two-value gap closes the rim.
            assert exit_parity == 0
            prev = comps[idx - 1]
            assert prev.kind == "fan" and prev.size > 2
            rim[_edge(n, prev.first_edge + prev.edge_count - 1)] = 3 + d
            rim[_edge(n, c.first_edge)] = Fraction(3, 2) - 2 * d
            rim[_edge(n, c.first_edge + 1)] = _HALF
        else:
            # Opposite phases around a length-1 connector: shift both
            # boundary spokes by delta + 1/2 in matching directions.
            if exit_parity == 0:
                values = (2 - d, 3 + d)
            else:
                values = (3 + d, 2 - d)
            rim[_edge(n, c.first_edge)] = values[0]
            rim[_edge(n, c.first_edge + 1)] = values[1]
    return rim


def _split_all_two_fans(
    wt: WheelTemplate, p: CertificateParams, comps: list[_Component]
) -> dict[int, Fraction]:
    """Odd rim tiled by two-vertex fans and length-1 connectors.

    The rim length is ``3k`` with ``k`` odd, so the seam repairs cannot all
    pair up; one distinguished fan and its two neighbouring connectors
    take a fixed off-alternation assignment, and the remaining even count
    of fans alternates phases with the usual seam repair between them.
    """
    n, d = wt.n, p.delta
    xh, yh = p.x, p.y
    k = len(comps) // 2
    assert k >= 3 and k % 2 == 1, "the special assignment needs at least three fans"

    rim: dict[int, Fraction] = {}
    centre, right, left = comps[0], comps[1], comps[-1]
    rim[_edge(n, centre.first_edge)] = Fraction(13, 4)
    rim[_edge(n, left.first_edge)] = _HALF
    rim[_edge(n, left.first_edge + 1)] = Fraction(29, 20)
    rim[_edge(n, right.first_edge)] = Fraction(29, 20)
    rim[_edge(n, right.first_edge + 1)] = _HALF
    for j in range(1, k):
        fan = comps[2 * j]
        rim[_edge(n, fan.first_edge)] = yh if j % 2 == 1 else xh
    for j in range(1, k - 1):
        conn = comps[2 * j + 1]
        if j % 2 == 1:
            values = (2 - d, 3 + d)
        else:
            values = (3 + d, 2 - d)
        rim[_edge(n, conn.first_edge)] = values[0]
        rim[_edge(n, conn.first_edge + 1)] = values[1]
    return rim


def _rim_values(
    wt: WheelTemplate, params: CertificateParams | None
) -> dict[int, Fraction]:
    """Route a feasible template to its constructive family."""
    A, n = wt.A, wt.n
    stripped = strip_points(A).mask
    if A.measure >= 4:
        if wt.is_rim():
            if n % 2 == 1:
                return _measure4_rim_odd(n, _resolve(params, FAMILY_MEASURE4))
            return _split_rim_even(n, _resolve(params, FAMILY_SPLIT))
        if n == 3 and len(wt.J) == 3:
            return _triangle_through_hub(wt)
        return _split_general(wt, _resolve(params, FAMILY_SPLIT))
    if stripped == _U123:
        if n == 3:
            return {1: Fraction(13, 10), 2: _HALF, 3: Fraction(37, 10)}
        if wt.is_rim():
            if n % 2 == 1:
                return _open14_rim_odd(n)
            return _split_rim_even(n, _resolve(params, FAMILY_SPLIT))
        return _split_general(wt, _resolve(params, FAMILY_SPLIT))
    if stripped == _U024:
        if n % 2 == 0:
            p = _resolve(params, FAMILY_ARC41)
            if wt.is_rim():
                return _rim_alternation_41(n, p)
            return _arc_composition(wt, p, modified=False)
        if wt.is_rim():
            return _arc41_rim_odd(n, _resolve(params, FAMILY_ARC41, x=Fraction(3, 2)))
        comps = _components(n, wt.rim_mask)
        if any(c.kind == "conn" and c.size >= 2 for c in comps):
            return _arc_composition(wt, _resolve(params, FAMILY_ARC41), modified=False)
        p = _resolve(params, FAMILY_ARC41, x=Fraction(3, 2))
        return _arc_composition(wt, p, modified=True)
    if stripped and stripped & ~_U04 == 0:
        p = _resolve(params, FAMILY_ARC41)
        if wt.is_rim():
            return _rim_alternation_41(n, p)
        return _arc_composition(wt, p, modified=False)
    if A.mask == _U13:
        p = _resolve(params, FAMILY_SPLIT)
        if wt.is_rim():
            return _split_rim_even(n, p)
        return _split_general(wt, p)
    raise AssertionError(f"no constructive branch for capacity {A}")


def build_faithful_flow(
    wt: WheelTemplate, params: CertificateParams | None = None
) -> FlowAssignment:
    """A verified faithful flow for a feasible wheel template.

    The certificate is produced in rim form by the family routed from
    ``A``; spokes are the differences of neighbouring rim values.  The
    result always passes ``verify_flow`` against the implied capacities.
    """
    if wt.n == 2:
        raise ValueError("rim length 2 is classified by the predicate only")
    if predicate_cfn5(wt):
        raise ValueError("no faithful flow exists for this template")
    rim = _rim_values(wt, params)
    assert set(rim) == set(range(1, wt.n + 1))
    values: dict = {}
    for i in range(1, wt.n + 1):
        values[f"r{i}"] = Mod5Rational(rim[i])
        values[f"s{i}"] = Mod5Rational(rim[i] - rim[(i - 2) % wt.n + 1])
    flow = FlowAssignment(values)
    assert verify_flow(wt.capacity_graph(), flow), (
        f"internal error: constructed flow failed verification on "
        f"n={wt.n} rim_mask={wt.rim_mask:#x} A={canonical_string(wt.A)}"
    )
    return flow


# ===========================================================================
# Scan
# ===========================================================================


@dataclass(frozen=True)
class ScanRecord:
    """One template instance: identification, both verdicts, timing."""

    n: int
    rim_mask: str
    a: str
    predicate: bool
    engine_feasible: bool
    certificate: str
    elapsed: float

    @property
    def agrees(self) -> bool:
        return self.predicate != self.engine_feasible


@dataclass(frozen=True)
class ScanReport:
    """All scanned instances with agreement bookkeeping."""

    records: tuple[ScanRecord, ...]
    elapsed: float

    @property
    def disagreements(self) -> tuple[ScanRecord, ...]:
        return tuple(r for r in self.records if not r.agrees)

    @property
    def certificate_failures(self) -> tuple[ScanRecord, ...]:
        return tuple(
            r
            for r in self.records
            if r.engine_feasible and r.certificate != "verified"
        )

    def lines(self) -> list[str]:
        out = ["n\trim_mask\tA\tpredicate\tengine\tcertificate\tseconds"]
        for r in self.records:
            out.append(
                f"{r.n}\t{r.rim_mask}\t{r.a}\t{str(r.predicate).lower()}\t"
                f"{'Feasible' if r.engine_feasible else 'Infeasible'}\t"
                f"{r.certificate}\t{r.elapsed:.4f}"
            )
        out.append(
            f"instances={len(self.records)} "
            f"agreements={sum(r.agrees for r in self.records)} "
            f"disagreements={len(self.disagreements)} "
            f"certificate_failures={len(self.certificate_failures)} "
            f"elapsed={self.elapsed:.2f}s"
        )
        return out


def _mask_string(n: int, mask: int) -> str:
    return "".join("1" if mask >> i & 1 else "0" for i in range(n))


def _scan_instance(args: tuple[int, int, int]) -> ScanRecord:
    n, rim_mask, a_mask = args
    start = time.perf_counter()
    wt = WheelTemplate(n, even_subgraph_from_rim(n, rim_mask), AtomSet(a_mask))
    pred = predicate_cfn5(wt)
    decision = decide_faithful(wt.capacity_graph())
    certificate = "-"
    if decision.feasible:
        flow = build_faithful_flow(wt)
        certificate = (
            "verified" if verify_flow(wt.capacity_graph(), flow) else "failed"
        )
    return ScanRecord(
        n,
        _mask_string(n, rim_mask),
        canonical_string(wt.A),
        pred,
        decision.feasible,
        certificate,
        time.perf_counter() - start,
    )


def scan(n_max: int, *, jobs: int = 1) -> ScanReport:
    """Compare the predicate against the engine over every template with
    rim length up to ``n_max``: all rim subsets up to dihedral symmetry
    crossed with all 20 nonempty symmetric capacity sets.  Feasible
    instances additionally build and verify a constructive certificate.
    """
    if n_max < 3:
        raise ValueError(f"scan needs n_max >= 3, got {n_max}")
    census = [s.mask for s in enumerate_si5() if not s.is_empty()]
    instances = [
        (n, rim_mask, a_mask)
        for n in range(3, n_max + 1)
        for rim_mask in _rim_orbit_representatives(n)
        for a_mask in census
    ]
    start = time.perf_counter()
    if jobs <= 1:
        records = [_scan_instance(item) for item in instances]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            records = list(pool.map(_scan_instance, instances, chunksize=8))
    return ScanReport(tuple(records), time.perf_counter() - start)
