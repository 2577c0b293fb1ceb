"""Reasoning over a vector space: analogies, associations, concepts, relations.

All operations work on unit-normalized rows so that additive arithmetic
is magnitude-safe and every result reduces to an exact nearest-neighbor
scan. A one-to-one relation is the displacement between unit rows,
learned as the mean displacement of its example pairs; chaining
relations is plain vector addition of displacements.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .embedding_store import ConceptVector, Provenance, VectorSpace
from .errors import (
    DimensionMismatchError,
    EmptyInputError,
    FormatError,
    UnknownTokenError,
    ZeroVectorError,
)
from .similarity import Index, Neighbor

EXCLUDE_INPUTS = "exclude-inputs"
NO_EXCLUSION = "none"
EXCLUSION_POLICIES = (EXCLUDE_INPUTS, NO_EXCLUSION)


@dataclass(frozen=True)
class WeightedTermSet:
    """Tokens with signed weights; the cue set for sums and concepts."""

    entries: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if not self.entries:
            raise EmptyInputError("weighted term set must be nonempty")
        if all(w == 0.0 for _, w in self.entries):
            raise ValueError("weights must not all be zero")

    @classmethod
    def of(cls, *entries: tuple[str, float]) -> "WeightedTermSet":
        return cls(tuple((t, float(w)) for t, w in entries))

    @classmethod
    def uniform(cls, tokens: Sequence[str]) -> "WeightedTermSet":
        """Equal weights 1/len(tokens), the default when none are given."""
        tokens = list(tokens)
        if not tokens:
            raise EmptyInputError("weighted term set must be nonempty")
        w = 1.0 / len(tokens)
        return cls(tuple((t, w) for t in tokens))

    def tokens(self) -> list[str]:
        return [t for t, _ in self.entries]


def _exact_sum(parts: tuple[np.ndarray, ...]) -> np.ndarray:
    # Per-component fsum keeps composition order-independent and exact.
    if len(parts) == 1:
        return parts[0].copy()
    stacked = np.stack(parts)
    return np.array(
        [math.fsum(stacked[:, j]) for j in range(stacked.shape[1])]
    )


@dataclass
class RelationVector:
    """A displacement between unit rows, learned from example pairs.

    `parts` keeps the summands of composed relations so that composing
    in any grouping yields bit-identical displacements.
    """

    displacement: np.ndarray
    support: tuple[tuple[str, str], ...]
    name: str | None = None
    parts: tuple[np.ndarray, ...] = field(default=())

    def __post_init__(self):
        if not self.parts:
            self.parts = (np.asarray(self.displacement, dtype=np.float64),)

    @property
    def dim(self) -> int:
        return int(self.displacement.shape[0])

    def support_tokens(self) -> set[str]:
        return {t for pair in self.support for t in pair}


def _unit_row(space: VectorSpace, token: str) -> np.ndarray:
    row = space.row(token)
    if row is None:
        raise UnknownTokenError(token)
    norm = np.linalg.norm(row)
    if norm == 0.0:
        raise ZeroVectorError(f"token {token!r} has a zero vector")
    return row / norm


def analogy(
    index: Index,
    a: str,
    b: str,
    c: str,
    k: int = 10,
    exclusion_policy: str = EXCLUDE_INPUTS,
) -> list[Neighbor]:
    """Solve a:b::c:? by ranking tokens near b + c - a (unit rows).

    The default policy excludes the three inputs from the results;
    with policy "none" the trivial identity a:b::a:b surfaces b itself
    at score 1.
    """
    if exclusion_policy not in EXCLUSION_POLICIES:
        raise ValueError(f"exclusion_policy must be one of {EXCLUSION_POLICIES}")
    query = index.unit_row(b) + index.unit_row(c) - index.unit_row(a)
    vector = ConceptVector(query, Provenance("analogy", f"{a}:{b}::{c}"))
    exclude = {a, b, c} if exclusion_policy == EXCLUDE_INPUTS else set()
    return index.nearest(vector, k=k, exclude=exclude)


def associate(index: Index, terms: WeightedTermSet, k: int = 10) -> list[Neighbor]:
    """Rank tokens near the weighted sum of the cue rows, cues excluded."""
    query = np.zeros(index.dim)
    for token, weight in terms.entries:
        query = query + weight * index.unit_row(token)
    vector = ConceptVector(
        query, Provenance("weighted-sum", "+".join(terms.tokens()))
    )
    return index.nearest(vector, k=k, exclude=set(terms.tokens()))


def build_concept(
    space: VectorSpace,
    positives: WeightedTermSet,
    negatives: WeightedTermSet | None = None,
) -> ConceptVector:
    """A unit concept vector pulled toward positives and away from negatives."""
    total = np.zeros(space.dim)
    for token, weight in positives.entries:
        total = total + weight * _unit_row(space, token)
    detail = "+".join(positives.tokens())
    if negatives is not None:
        for token, weight in negatives.entries:
            total = total - weight * _unit_row(space, token)
        detail += "-" + "-".join(negatives.tokens())
    norm = np.linalg.norm(total)
    if norm == 0.0:
        raise ZeroVectorError("concept terms cancel to the zero vector")
    return ConceptVector(total / norm, Provenance("weighted-sum", detail))


def learn_relation(
    space: VectorSpace,
    pairs: Sequence[tuple[str, str]],
    name: str | None = None,
) -> RelationVector:
    """Mean displacement unit(target) - unit(source) over the example pairs."""
    pairs = [(s, t) for s, t in pairs]
    if not pairs:
        raise EmptyInputError("relation needs at least one example pair")
    displacements = [
        _unit_row(space, target) - _unit_row(space, source)
        for source, target in pairs
    ]
    mean = np.mean(displacements, axis=0)
    return RelationVector(mean, tuple(pairs), name=name)


def apply_relation(
    index: Index, relation: RelationVector, source: str, k: int = 10
) -> list[Neighbor]:
    """Rank tokens near unit(source) + displacement.

    The source and every token in the relation's support pairs are
    excluded, so results are never just the training examples echoed
    back.
    """
    if relation.dim != index.dim:
        raise DimensionMismatchError(
            f"relation has dimension {relation.dim}, index has {index.dim}"
        )
    query = index.unit_row(source) + relation.displacement
    vector = ConceptVector(
        query,
        Provenance("relation-application", f"{relation.name or 'relation'}({source})"),
    )
    exclude = {source} | relation.support_tokens()
    return index.nearest(vector, k=k, exclude=exclude)


def compose_relations(r1: RelationVector, r2: RelationVector) -> RelationVector:
    """Chain two relations by adding their displacements."""
    if r1.dim != r2.dim:
        raise DimensionMismatchError(
            f"dimension mismatch: {r1.dim} vs {r2.dim}"
        )
    parts = r1.parts + r2.parts
    if r1.name and r2.name:
        name = f"{r1.name}+{r2.name}"
    else:
        name = r1.name or r2.name
    return RelationVector(
        _exact_sum(parts), r1.support + r2.support, name=name, parts=parts
    )


def negate_relation(relation: RelationVector) -> RelationVector:
    """The inverse displacement; support pairs flip direction."""
    parts = tuple(-p for p in relation.parts)
    return RelationVector(
        _exact_sum(parts),
        tuple((t, s) for s, t in relation.support),
        name=f"-{relation.name}" if relation.name else None,
        parts=parts,
    )


def serialize_relation(relation: RelationVector) -> bytes:
    """Two text lines: a header naming the relation and its support pairs,
    then the displacement in embedding row format."""
    name = relation.name or "unnamed"
    pairs = " ".join(f"{s}:{t}" for s, t in relation.support)
    header = f"relation {name} {pairs}".rstrip()
    comps = " ".join(repr(float(v)) for v in relation.displacement)
    return f"{header}\n{name} {comps}\n".encode("utf-8")


def parse_relation(data: bytes) -> RelationVector:
    lines = data.decode("utf-8").splitlines()
    if len(lines) < 2:
        raise FormatError("expected a header line and a vector line", line=1)
    head = lines[0].split(" ")
    if head[0] != "relation" or len(head) < 2:
        raise FormatError("header must start with 'relation <name>'", line=1)
    name = head[1]
    support = []
    for item in head[2:]:
        if not item:
            continue
        source, sep, target = item.partition(":")
        if not sep or not source or not target:
            raise FormatError(f"bad support pair {item!r}", line=1)
        support.append((source, target))
    fields = lines[1].split(" ")
    if len(fields) < 2:
        raise FormatError("vector line has no components", line=2)
    try:
        displacement = np.array([float(f) for f in fields[1:]], dtype=np.float64)
    except ValueError:
        raise FormatError("component is not a number", line=2) from None
    if not np.isfinite(displacement).all():
        raise FormatError("non-finite component", line=2)
    return RelationVector(displacement, tuple(support), name=name)
