"""Property shapes, patterns, and graph/pattern/shape relations.

A :class:`Shape` is an ordered vocabulary of datatype properties with
cardinality and datatype constraints plus or-groups (at least one member
property must be present).  A :class:`Pattern` is a subset of that
vocabulary, stored as a bitmask over the vocabulary order so subset tests
are O(1) over the full powerset.

Two levels of validity are distinguished deliberately:

* ``validates(g, shape)`` is graph-level: cardinalities, datatypes and
  or-groups all checked against the actual triples.
* ``pattern_is_shape_valid(p, shape)`` is pattern-level: only property
  presence is checked (mandatory properties and or-groups), which is the
  right notion when classifying patterns rather than graphs.

Everything here is immutable and pure.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from enum import Enum
from importlib import resources

from .turtle_light import DATE, GYEAR, STRING, DATATYPES, Graph, _DATE_RE, _YEAR_RE

MAX_VOCABULARY = 24


class UnknownPropertyError(ValueError):
    """A graph uses a property outside the shape vocabulary."""


class VocabularyTooLargeError(ValueError):
    """Refusing to enumerate a powerset beyond 2**MAX_VOCABULARY patterns."""


@dataclass(frozen=True)
class PropertyConstraint:
    name: str
    datatype: str = STRING
    min_count: int = 0
    max_count: int | None = 1

    def __post_init__(self):
        if self.datatype not in DATATYPES:
            raise ValueError(f"unknown datatype {self.datatype!r}")
        if self.min_count < 0:
            raise ValueError("min_count must be >= 0")
        if self.max_count is not None and self.max_count < self.min_count:
            raise ValueError("max_count must be >= min_count")


@dataclass(frozen=True)
class Shape:
    """Ordered property vocabulary with constraints and or-groups."""

    properties: tuple[PropertyConstraint, ...]
    or_groups: tuple[frozenset[str], ...] = ()
    name: str = "shape"

    def __post_init__(self):
        names = [p.name for p in self.properties]
        if len(set(names)) != len(names):
            raise ValueError("duplicate property in vocabulary")
        for group in self.or_groups:
            unknown = group - set(names)
            if unknown:
                raise ValueError(f"or-group members outside vocabulary: {unknown}")

    @property
    def property_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.properties)

    def __len__(self) -> int:
        return len(self.properties)

    def index(self, name: str) -> int:
        try:
            return self.property_names.index(name)
        except ValueError:
            raise UnknownPropertyError(f"property {name!r} not in shape vocabulary")

    def constraint(self, name: str) -> PropertyConstraint:
        return self.properties[self.index(name)]


@dataclass(frozen=True, order=True)
class Pattern:
    """A subset of the shape vocabulary, one bit per property."""

    bits: int
    width: int

    def __post_init__(self):
        if self.bits < 0 or self.bits >= (1 << self.width):
            raise ValueError(f"bits {self.bits:#x} out of range for width {self.width}")

    @classmethod
    def of(cls, shape: Shape, names) -> "Pattern":
        bits = 0
        for name in names:
            bits |= 1 << shape.index(name)
        return cls(bits, len(shape))

    def names(self, shape: Shape) -> tuple[str, ...]:
        if self.width != len(shape):
            raise ValueError("pattern width does not match shape")
        return tuple(
            name for i, name in enumerate(shape.property_names) if self.bits >> i & 1
        )

    def is_subset(self, other: "Pattern") -> bool:
        return self.width == other.width and self.bits & ~other.bits == 0

    def __len__(self) -> int:
        return bin(self.bits).count("1")


class MatchResult(Enum):
    EQUIVALENT = "equivalent"
    SUBSUMES = "subsumes"
    NEITHER = "neither"


def pattern_of(g: Graph, shape: Shape) -> Pattern:
    """The set of shape properties occurring in ``g`` (presence only:
    duplicates and object values are irrelevant)."""
    return Pattern.of(shape, g.predicates())


def powerset(shape: Shape) -> list[Pattern]:
    """All 2**|shape| patterns, in increasing bitmask order."""
    if len(shape) > MAX_VOCABULARY:
        raise VocabularyTooLargeError(
            f"{len(shape)} properties would enumerate 2**{len(shape)} patterns"
        )
    width = len(shape)
    return [Pattern(bits, width) for bits in range(1 << width)]


def matches(g: Graph, pattern: Pattern, shape: Shape) -> MatchResult:
    """Relate a graph's property set to a pattern: equivalent (equal),
    subsumes (strictly contained in the pattern), or neither."""
    gp = pattern_of(g, shape)
    if gp == pattern:
        return MatchResult.EQUIVALENT
    if gp.is_subset(pattern):
        return MatchResult.SUBSUMES
    return MatchResult.NEITHER


def _conforms(lexical: str, datatype: str) -> bool:
    if datatype == DATE:
        return bool(_DATE_RE.fullmatch(lexical))
    if datatype == GYEAR:
        return bool(_YEAR_RE.fullmatch(lexical))
    return True


def validates(g: Graph, shape: Shape) -> bool:
    """Graph-level validation: every property of ``g`` is in the vocabulary
    with its cardinality bounds respected and lexical forms conforming to
    the declared datatypes, and every or-group has at least one member
    present."""
    names = set(shape.property_names)
    if not g.predicates() <= names:
        return False
    for constraint in shape.properties:
        objects = g.objects_of(constraint.name)
        if len(objects) < constraint.min_count:
            return False
        if constraint.max_count is not None and len(objects) > constraint.max_count:
            return False
        if any(not _conforms(o.lexical, constraint.datatype) for o in objects):
            return False
    present = g.predicates()
    return all(group & present for group in shape.or_groups)


def names_shape_valid(names, shape: Shape) -> bool:
    """Pattern-level validity of a property-name set: all mandatory
    properties present, every or-group intersected, nothing outside the
    vocabulary."""
    names = frozenset(names)
    if not names <= set(shape.property_names):
        return False
    for constraint in shape.properties:
        if constraint.min_count >= 1 and constraint.name not in names:
            return False
    return all(group & names for group in shape.or_groups)


def pattern_is_shape_valid(pattern: Pattern, shape: Shape) -> bool:
    return names_shape_valid(pattern.names(shape), shape)


def realized_patterns(graphs, shape: Shape) -> set[Pattern]:
    """The distinct exact patterns realized by a collection of graphs."""
    return {pattern_of(g, shape) for g in graphs}


def pattern_frequencies(graphs, shape: Shape) -> list[tuple[Pattern, float, bool]]:
    """(pattern, relative frequency, pattern-level validity) triples, most
    frequent first; frequencies sum to 1.  Ties break on the bitmask so the
    ordering is deterministic."""
    counts: dict[Pattern, int] = {}
    total = 0
    for g in graphs:
        p = pattern_of(g, shape)
        counts[p] = counts.get(p, 0) + 1
        total += 1
    if not total:
        return []
    return [
        (p, n / total, pattern_is_shape_valid(p, shape))
        for p, n in sorted(counts.items(), key=lambda kv: (-kv[1], kv[0].bits))
    ]


def shape_from_dict(data: dict) -> Shape:
    properties = tuple(
        PropertyConstraint(
            name=p["name"],
            datatype=p.get("datatype", STRING),
            min_count=p.get("min_count", 0),
            max_count=p.get("max_count", 1),
        )
        for p in data["properties"]
    )
    or_groups = tuple(frozenset(g) for g in data.get("or_groups", []))
    return Shape(properties, or_groups, data.get("name", "shape"))


def load_shape(path=None) -> Shape:
    """Load a shape from a JSON file; with no path, the shipped default
    (the Person shape)."""
    if path is None:
        text = resources.files("shaperex.data").joinpath("person_shape.json").read_text(
            "utf-8"
        )
    else:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    return shape_from_dict(json.loads(text))
