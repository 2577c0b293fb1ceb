"""Exact top-k cosine search over a vector space.

The index is a full-scan scorer over unit-normalized rows, so cosine
reduces to a dot product and results are exact by construction. Ties
are broken by vocabulary order (earlier row wins), which keeps every
query reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .embedding_store import ConceptVector, VectorSpace
from .errors import DimensionMismatchError, UnknownTokenError, ZeroVectorError


@dataclass(frozen=True)
class Neighbor:
    token: str
    score: float


def _as_array(vector) -> np.ndarray:
    if isinstance(vector, ConceptVector):
        return vector.components
    return np.asarray(vector, dtype=np.float64)


def _unit(vector: np.ndarray) -> np.ndarray:
    norm = np.linalg.norm(vector)
    if norm == 0.0:
        raise ZeroVectorError("operation requires a nonzero vector")
    return vector / norm


def cosine(a, b) -> float:
    """Cosine similarity, clamped to [-1, 1] against rounding."""
    va, vb = _as_array(a), _as_array(b)
    if va.shape != vb.shape:
        raise DimensionMismatchError(
            f"dimension mismatch: {va.shape[0]} vs {vb.shape[0]}"
        )
    return float(np.clip(np.dot(_unit(va), _unit(vb)), -1.0, 1.0))


class Index:
    """Immutable exact-search index; safe for concurrent queries."""

    def __init__(self, space: VectorSpace):
        norms = np.linalg.norm(space.matrix, axis=1)
        zero = np.flatnonzero(norms == 0.0)
        if zero.size:
            raise ZeroVectorError(
                f"cannot index zero vector for token {space.vocab[int(zero[0])]!r}"
            )
        self._unit_matrix = space.matrix / norms[:, None]
        self._unit_matrix.flags.writeable = False
        self.space = space
        self.vocab = space.vocab
        self.dim = space.dim

    def __len__(self) -> int:
        return len(self.vocab)

    def __contains__(self, token: str) -> bool:
        return token in self.space

    def unit_row(self, token: str) -> np.ndarray:
        i = self.space.row_index(token)
        if i is None:
            raise UnknownTokenError(token)
        return self._unit_matrix[i]

    def nearest(
        self, query, k: int = 10, exclude: Iterable[str] = ()
    ) -> list[Neighbor]:
        """The k highest-cosine tokens not in exclude, best first.

        Fewer than k are returned only when the vocabulary (minus the
        exclusions) is exhausted.
        """
        if k < 1:
            raise ValueError("k must be at least 1")
        q = _as_array(query)
        if q.shape != (self.dim,):
            raise DimensionMismatchError(
                f"query has dimension {q.shape}, index has {self.dim}"
            )
        scores = np.clip(self._unit_matrix @ _unit(q), -1.0, 1.0)
        # Stable sort on descending score == tie-break by row order.
        order = np.argsort(-scores, kind="stable")
        excluded = {
            i for i in (self.space.row_index(t) for t in exclude) if i is not None
        }
        out: list[Neighbor] = []
        for i in order:
            if int(i) in excluded:
                continue
            out.append(Neighbor(self.vocab[int(i)], float(scores[i])))
            if len(out) == k:
                break
        return out


def build_index(space: VectorSpace) -> Index:
    return Index(space)
