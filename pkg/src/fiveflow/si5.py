"""Exact algebra of symmetric interval unions on the circle of circumference 5.

The circle R/5Z is partitioned into ten atoms: five open unit intervals
``U_k = (k, k+1)`` and five integer points ``P_k = {k}``, indices mod 5.  A
subset built from atoms is

* a *valid union* if every present point is glued to both neighbouring unit
  intervals (``P_k`` present implies ``U_{k-1}`` and ``U_k`` present), and
* *symmetric* if it is closed under negation mod 5 (``U_k <-> U_{4-k}``,
  ``P_k <-> P_{(5-k) mod 5}``).

Exactly 21 atom sets are both valid and symmetric; they are the values the
edge-capacity operator can take.  This module provides the atom sets, exact
membership for rationals mod 5, Minkowski sums and intersections, negation,
a canonical text form with parser, and the census of the 21 sets.

Everything is exact: memberships take ``fractions.Fraction`` (or ints), and
sets are 10-bit masks.  No floats appear anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Iterable, Iterator, Union

__all__ = [
    "AtomKind",
    "Atom",
    "AtomSet",
    "Mod5Rational",
    "EMPTY",
    "FULL",
    "FULL_CIRCLE",
    "contains",
    "measure",
    "is_symmetric",
    "is_valid_union",
    "minkowski_sum",
    "intersect",
    "negate",
    "canonical_string",
    "parse",
    "maximal_intervals",
    "enumerate_si5",
    "interval",
    "point",
    "strip_points",
]

RationalLike = Union[int, Fraction, "Mod5Rational"]


# =============================================================================
# Atoms
# =============================================================================


class AtomKind(IntEnum):
    """The two species of atom on the circle."""

    UNIT_INTERVAL = 0
    """Open unit interval ``(k, k+1)``."""

    INTEGER_POINT = 1
    """Single integer point ``{k}``."""


@dataclass(frozen=True, order=True)
class Atom:
    """One atom of the circle partition: ``U_k`` or ``P_k`` with ``0 <= k < 5``."""

    kind: AtomKind
    index: int

    def __post_init__(self) -> None:
        if not 0 <= self.index < 5:
            raise ValueError(f"atom index must be in 0..4, got {self.index}")

    @property
    def bit(self) -> int:
        """Position of this atom in the 10-bit mask layout."""
        return self.index if self.kind is AtomKind.UNIT_INTERVAL else 5 + self.index

    def __str__(self) -> str:
        return (
            f"({self.index},{(self.index + 1) % 5})"
            if self.kind is AtomKind.UNIT_INTERVAL
            else f"{{{self.index}}}"
        )


def interval(k: int) -> Atom:
    """The open unit interval atom ``U_k = (k, k+1)``."""
    return Atom(AtomKind.UNIT_INTERVAL, k % 5)


def point(k: int) -> Atom:
    """The integer point atom ``P_k = {k}``."""
    return Atom(AtomKind.INTEGER_POINT, k % 5)


_ALL_ATOMS: tuple[Atom, ...] = tuple(interval(k) for k in range(5)) + tuple(
    point(k) for k in range(5)
)

# Mask layout: bit k (0..4) is U_k, bit 5+k is P_k.
_U_BITS = 0b0000011111
_P_BITS = 0b1111100000
_FULL_MASK = 0b1111111111


# =============================================================================
# Exact rationals modulo 5
# =============================================================================


class Mod5Rational:
    """An exact rational residue on the circle, normalised into ``[0, 5)``."""

    __slots__ = ("_value",)

    def __init__(self, value: RationalLike) -> None:
        if isinstance(value, Mod5Rational):
            frac = value._value
        else:
            frac = Fraction(value) % 5
        object.__setattr__(self, "_value", frac)

    @property
    def value(self) -> Fraction:
        """The canonical representative in ``[0, 5)``."""
        return self._value

    def __add__(self, other: RationalLike) -> "Mod5Rational":
        return Mod5Rational(self._value + Mod5Rational(other)._value)

    __radd__ = __add__

    def __sub__(self, other: RationalLike) -> "Mod5Rational":
        return Mod5Rational(self._value - Mod5Rational(other)._value)

    def __neg__(self) -> "Mod5Rational":
        return Mod5Rational(-self._value)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction, Mod5Rational)):
            return self._value == Mod5Rational(other)._value
        return NotImplemented

    def __hash__(self) -> int:
        return hash(("Mod5Rational", self._value))

    def is_integral(self) -> bool:
        return self._value.denominator == 1

    def __repr__(self) -> str:
        return f"Mod5Rational({self._value!s})"

    def __str__(self) -> str:
        return f"{self._value} (mod 5)"


def _atom_of(x: RationalLike) -> Atom:
    """The unique atom containing the residue ``x``."""
    v = Mod5Rational(x).value
    if v.denominator == 1:
        return point(int(v))
    return interval(int(v))  # floor of a non-integral value in [0, 5)


# =============================================================================
# Atom sets
# =============================================================================


@dataclass(frozen=True)
class AtomSet:
    """An arbitrary union of atoms, stored as a 10-bit mask.

    Valid symmetric sets (the 21-element census) are the payload of the
    theory; general masks are allowed so that plumbing such as single-atom
    probes and the integer-only constraint ``{1}u{2}u{3}u{4}`` can be
    expressed.
    """

    mask: int

    def __post_init__(self) -> None:
        if not 0 <= self.mask <= _FULL_MASK:
            raise ValueError(f"mask out of range: {self.mask:#x}")

    # -- constructors ---------------------------------------------------------

    @classmethod
    def from_atoms(cls, atoms: Iterable[Atom]) -> "AtomSet":
        m = 0
        for a in atoms:
            m |= 1 << a.bit
        return cls(m)

    @classmethod
    def open_arc(cls, a: int, b: int) -> "AtomSet":
        """The clockwise open arc ``(a, b)`` with integer endpoints mod 5.

        ``(a, b)`` contains the unit intervals ``U_a .. U_{b-1}`` and the
        interior integer points strictly between them.  ``(x, x)`` is the
        punctured circle, the complement of the single point ``x``.
        """
        a %= 5
        b %= 5
        m = 0
        k = a
        while True:
            m |= 1 << interval(k).bit
            k = (k + 1) % 5
            if k == b:
                break
            m |= 1 << point(k).bit
        return cls(m)

    # -- queries --------------------------------------------------------------

    def atoms(self) -> tuple[Atom, ...]:
        return tuple(a for a in _ALL_ATOMS if self.mask >> a.bit & 1)

    def has_atom(self, a: Atom) -> bool:
        return bool(self.mask >> a.bit & 1)

    def contains(self, x: RationalLike) -> bool:
        """Exact membership of the rational residue ``x``."""
        return self.has_atom(_atom_of(x))

    __contains__ = contains

    @property
    def measure(self) -> int:
        """Number of unit-interval atoms present (total length of the set)."""
        return (self.mask & _U_BITS).bit_count()

    def is_valid_union(self) -> bool:
        """True when every present point has both neighbouring intervals present."""
        for k in range(5):
            if self.mask >> point(k).bit & 1:
                if not (
                    self.mask >> interval((k - 1) % 5).bit & 1
                    and self.mask >> interval(k).bit & 1
                ):
                    return False
        return True

    def is_symmetric(self) -> bool:
        """True when the set is closed under negation mod 5."""
        return self.negate().mask == self.mask

    def is_empty(self) -> bool:
        return self.mask == 0

    def is_full(self) -> bool:
        return self.mask == _FULL_MASK

    def interval_only(self) -> bool:
        return self.mask & _P_BITS == 0

    # -- algebra ---------------------------------------------------------------

    def negate(self) -> "AtomSet":
        """Pointwise negation mod 5: ``U_k -> U_{4-k}``, ``P_k -> P_{(5-k) mod 5}``."""
        m = 0
        for k in range(5):
            if self.mask >> k & 1:  # U_k
                m |= 1 << (4 - k)
            if self.mask >> (5 + k) & 1:  # P_k
                m |= 1 << (5 + (5 - k) % 5)
        return AtomSet(m)

    __neg__ = negate

    def intersect(self, other: "AtomSet") -> "AtomSet":
        return AtomSet(self.mask & other.mask)

    __and__ = intersect

    def union(self, other: "AtomSet") -> "AtomSet":
        return AtomSet(self.mask | other.mask)

    __or__ = union

    def issubset(self, other: "AtomSet") -> bool:
        return self.mask & ~other.mask == 0

    def minkowski_sum(self, other: "AtomSet") -> "AtomSet":
        """Exact Minkowski sum ``{x + y : x in self, y in other}`` mod 5.

        Requires both operands to be valid symmetric unions (the census sets);
        the atom-level sum table is exact for arbitrary masks, but the public
        operation is specified on the census.
        """
        for s in (self, other):
            if not (s.is_valid_union() and s.is_symmetric()):
                raise ValueError(
                    "minkowski_sum requires valid symmetric operands, got "
                    f"{canonical_string(s)!r}"
                )
        return AtomSet(_minkowski_mask(self.mask, other.mask))

    __add__ = minkowski_sum

    def __str__(self) -> str:
        return canonical_string(self)

    def __repr__(self) -> str:
        return f"AtomSet({canonical_string(self)!r})"


def _minkowski_mask(ma: int, mb: int) -> int:
    """Atom-table Minkowski sum of two masks (no validity requirements)."""
    out = 0
    for i in range(5):
        for j in range(5):
            ushift = (i + j) % 5
            if ma >> i & 1 and mb >> j & 1:
                # (i,i+1) + (j,j+1) = (i+j, i+j+2): two intervals and the point between.
                out |= 1 << ushift
                out |= 1 << (5 + (i + j + 1) % 5)
                out |= 1 << ((i + j + 1) % 5)
            if ma >> i & 1 and mb >> (5 + j) & 1:
                out |= 1 << ushift  # U_i + P_j = U_{i+j}
            if ma >> (5 + i) & 1 and mb >> j & 1:
                out |= 1 << ushift  # P_i + U_j = U_{i+j}
            if ma >> (5 + i) & 1 and mb >> (5 + j) & 1:
                out |= 1 << (5 + ushift)  # P_i + P_j = P_{i+j}
    return out


EMPTY = AtomSet(0)
FULL = AtomSet(_FULL_MASK)

#: Marker returned by :func:`maximal_intervals` for the full circle, which has
#: no arc representation in the ``(a,b)`` grammar.
FULL_CIRCLE = "full"


# =============================================================================
# Canonical text form
# =============================================================================


def maximal_intervals(s: AtomSet) -> list:
    """Decompose ``s`` into the fewest clockwise integer arcs plus leftover points.

    Returns a list whose entries are ``(a, b)`` integer pairs (clockwise open
    arcs; ``(x, x)`` is the punctured circle) and, for atom sets that are not
    valid unions, bare integers for isolated points.  The full circle is the
    single marker :data:`FULL_CIRCLE` since it has no arc form.  Arcs are
    sorted by starting point.
    """
    if s.is_full():
        return [FULL_CIRCLE]
    if s.is_empty():
        return []
    # A run is a maximal circular block U_a, P_{a+1}, U_{a+1}, ..., U_{b-1}
    # in which every listed atom is present; runs break at any missing atom.
    present_u = [bool(s.mask >> k & 1) for k in range(5)]
    present_p = [bool(s.mask >> (5 + k) & 1) for k in range(5)]
    arcs: list[tuple[int, int]] = []
    covered_points: set[int] = set()
    # Find run starts: U_a present but the glue backwards (P_a and U_{a-1}) broken.
    # Run starts: U_a present but the glue backwards (P_a and U_{a-1}) broken.
    # A set with intervals but no start would have every interval glued to its
    # predecessor, i.e. all ten atoms present, which the full-circle case above
    # already handled.
    starts = [
        a
        for a in range(5)
        if present_u[a] and not (present_p[a] and present_u[(a - 1) % 5])
    ]
    for a in starts:
        b = a
        while True:
            b = (b + 1) % 5
            if not (present_p[b] and present_u[b]):
                break
            covered_points.add(b)
        arcs.append((a, b))
    arcs.sort()
    leftovers = [k for k in range(5) if present_p[k] and k not in covered_points]
    return arcs + sorted(leftovers)


def canonical_string(s: AtomSet) -> str:
    """Canonical text form: arc terms and point terms joined with ``u``.

    Grammar: ``empty`` | ``full`` | term (``u`` term)* with
    term := ``(a,b)`` | ``{k}``.  Valid unions never print point terms
    because every point is interior to an arc.
    """
    if s.is_empty():
        return "empty"
    if s.is_full():
        return "full"
    parts: list[str] = []
    for item in maximal_intervals(s):
        if isinstance(item, tuple):
            parts.append(f"({item[0]},{item[1]})")
        else:
            parts.append(f"{{{item}}}")
    return "u".join(parts)


class ParseError(ValueError):
    """Raised on malformed set expressions; carries the failing position."""

    def __init__(self, message: str, position: int) -> None:
        super().__init__(f"{message} (at position {position})")
        self.position = position


def parse(text: str) -> AtomSet:
    """Parse the canonical grammar back into an :class:`AtomSet`.

    Accepts ``empty``, ``full``, and ``u``-joined arc ``(a,b)`` / point
    ``{k}`` terms, with optional surrounding whitespace.  Raises
    :class:`ParseError` with the character position of the offending term.
    """
    stripped = text.strip()
    if stripped == "empty":
        return EMPTY
    if stripped == "full":
        return FULL
    if not stripped:
        raise ParseError("empty expression", 0)
    mask = 0
    pos = 0
    n = len(text)
    expecting_term = True
    while pos < n:
        if text[pos].isspace():
            pos += 1
            continue
        if not expecting_term:
            if text[pos] == "u":
                expecting_term = True
                pos += 1
                continue
            raise ParseError(f"expected 'u' separator, found {text[pos]!r}", pos)
        if text[pos] == "(":
            end = text.find(")", pos)
            if end < 0:
                raise ParseError("unterminated arc term", pos)
            body = text[pos + 1 : end]
            pieces = body.split(",")
            if len(pieces) != 2:
                raise ParseError(f"arc term needs two endpoints, got {body!r}", pos)
            try:
                a, b = (int(p.strip()) for p in pieces)
            except ValueError:
                raise ParseError(f"non-integer arc endpoint in {body!r}", pos) from None
            if not (0 <= a < 5 and 0 <= b < 5):
                raise ParseError(f"arc endpoints must be in 0..4, got ({a},{b})", pos)
            mask |= AtomSet.open_arc(a, b).mask
            pos = end + 1
        elif text[pos] == "{":
            end = text.find("}", pos)
            if end < 0:
                raise ParseError("unterminated point term", pos)
            body = text[pos + 1 : end].strip()
            try:
                k = int(body)
            except ValueError:
                raise ParseError(f"non-integer point {body!r}", pos) from None
            if not 0 <= k < 5:
                raise ParseError(f"point must be in 0..4, got {k}", pos)
            mask |= 1 << point(k).bit
            pos = end + 1
        else:
            raise ParseError(f"expected a term, found {text[pos]!r}", pos)
        expecting_term = False
    if expecting_term:
        raise ParseError("dangling 'u' separator", n)
    return AtomSet(mask)


# =============================================================================
# Census and module-level operation aliases
# =============================================================================


def enumerate_si5() -> tuple[AtomSet, ...]:
    """All atom sets that are valid unions and symmetric, in mask order.

    There are exactly 21; the census is the codomain of the capacity operator.
    """
    return tuple(
        AtomSet(m)
        for m in range(_FULL_MASK + 1)
        if AtomSet(m).is_valid_union() and AtomSet(m).is_symmetric()
    )


def strip_points(s: AtomSet) -> AtomSet:
    """Remove every integer-point atom, keeping the unit intervals."""
    return AtomSet(s.mask & _U_BITS)


def contains(s: AtomSet, x: RationalLike) -> bool:
    """Exact membership of the rational residue ``x`` in ``s``."""
    return s.contains(x)


def measure(s: AtomSet) -> int:
    """Number of unit intervals in ``s``."""
    return s.measure


def is_symmetric(s: AtomSet) -> bool:
    return s.is_symmetric()


def is_valid_union(s: AtomSet) -> bool:
    return s.is_valid_union()


def minkowski_sum(a: AtomSet, b: AtomSet) -> AtomSet:
    return a.minkowski_sum(b)


def intersect(a: AtomSet, b: AtomSet) -> AtomSet:
    return a.intersect(b)


def negate(s: AtomSet) -> AtomSet:
    return s.negate()


def _iter_census() -> Iterator[AtomSet]:
    yield from enumerate_si5()


# Frequently used sets.
OPEN_41 = AtomSet.open_arc(4, 1)  # (4,1): values within distance 1 of 0
OPEN_14 = AtomSet.open_arc(1, 4)  # (1,4): values at distance > 1 from 0
OPEN_23 = AtomSet.open_arc(2, 3)  # (2,3): the single middle interval
NZ5_INTEGERS = AtomSet.from_atoms(point(k) for k in (1, 2, 3, 4))
