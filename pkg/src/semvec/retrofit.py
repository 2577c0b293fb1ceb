"""Pull embedding rows toward a lexicon graph and measure what that breaks.

Retrofitting sweeps the graph nodes in vocabulary order, replacing each
row with the attachment-weighted average of its original vector and its
current neighbors. Each sweep is a contraction, so the iterates settle
onto the fixed point of the update equation. The preservation report
then compares analogy ranks before and after, because optimizing for
the graph's relations can silently distort the geometry that other,
unoptimized relations depend on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import analogy
from .embedding_store import RAW, UNIT, VectorSpace
from .errors import FormatError, SemvecError, UnknownTokenError
from .similarity import build_index


@dataclass
class LexiconGraph:
    """Undirected weighted synonym edges plus recorded antonym pairs.

    Antonym pairs are kept for concept building but never become
    retrofit edges; averaging would drag opposites together, which is
    the opposite of what an antonym entry asserts.
    """

    nodes: list[str]
    edges: list[tuple[str, str, float]]
    antonyms: list[tuple[str, str]]
    alpha: float = 1.0

    def resolve(self, space: VectorSpace) -> tuple[dict[int, list[tuple[int, float]]], int]:
        """Adjacency over row indices; nodes missing from the space are
        dropped and counted."""
        dropped = {n for n in self.nodes if n not in space}
        adjacency: dict[int, list[tuple[int, float]]] = {}
        for a, b, w in self.edges:
            if a in dropped or b in dropped:
                continue
            i, j = space.row_index(a), space.row_index(b)
            adjacency.setdefault(i, []).append((j, w))
            adjacency.setdefault(j, []).append((i, w))
        for node in self.nodes:
            if node not in dropped:
                adjacency.setdefault(space.row_index(node), [])
        return adjacency, len(dropped)


def parse_lexicon(data: bytes) -> LexiconGraph:
    """Parse "token<TAB>syn1,syn2<TAB>ant1,ant2" lines (antonym field optional).

    Synonym entries induce undirected weight-1 edges, deduplicated
    across reversed listings; self-loops are ignored.
    """
    nodes: list[str] = []
    node_set: set[str] = set()
    edge_set: set[tuple[str, str]] = set()
    antonym_set: set[tuple[str, str]] = set()

    def add_node(token: str) -> None:
        if token not in node_set:
            node_set.add(token)
            nodes.append(token)

    for lineno, raw in enumerate(data.decode("utf-8").splitlines(), start=1):
        if not raw.strip():
            continue
        fields = raw.split("\t")
        if len(fields) > 3:
            raise FormatError(f"expected at most 3 fields, found {len(fields)}", line=lineno)
        token = fields[0].strip()
        if not token:
            raise FormatError("empty token", line=lineno)
        add_node(token)
        synonyms = fields[1].split(",") if len(fields) > 1 else []
        antonyms = fields[2].split(",") if len(fields) > 2 else []
        for syn in (s.strip() for s in synonyms):
            if not syn or syn == token:
                continue
            add_node(syn)
            edge_set.add((min(token, syn), max(token, syn)))
        for ant in (a.strip() for a in antonyms):
            if not ant or ant == token:
                continue
            add_node(ant)
            antonym_set.add((min(token, ant), max(token, ant)))
    edges = [(a, b, 1.0) for a, b in sorted(edge_set)]
    return LexiconGraph(nodes, edges, sorted(antonym_set))


def retrofit(
    space: VectorSpace,
    graph: LexiconGraph,
    iterations: int = 10,
    tol: float = 1e-4,
) -> VectorSpace:
    """Iterate q_i <- (alpha q̂_i + sum_j beta_ij q_j) / (alpha + sum beta_ij).

    beta_ij is edge_weight / degree(i), sweeps run in vocabulary order,
    and iteration stops early once the largest row movement in a sweep
    drops below tol. Rows outside the graph are returned bit-identical;
    updated rows are the raw converged iterates (they satisfy the update
    equation directly; renormalize or reindex afterwards as needed).
    """
    if space.norm_state != UNIT:
        raise SemvecError("retrofit expects a unit-normalized space")
    if iterations < 1:
        raise ValueError("iterations must be at least 1")
    adjacency, _ = graph.resolve(space)
    matrix = space.matrix.copy()
    original = space.matrix
    degree = {i: len(nbrs) for i, nbrs in adjacency.items()}
    alpha = graph.alpha
    for _ in range(iterations):
        max_move = 0.0
        for i in sorted(adjacency):
            nbrs = adjacency[i]
            if not nbrs:
                continue
            beta = 1.0 / degree[i]
            total = alpha * original[i]
            beta_sum = 0.0
            for j, w in nbrs:
                total = total + (w * beta) * matrix[j]
                beta_sum += w * beta
            updated = total / (alpha + beta_sum)
            max_move = max(max_move, float(np.linalg.norm(updated - matrix[i])))
            matrix[i] = updated
        if max_move < tol:
            break
    return VectorSpace(space.vocab, matrix, RAW)


@dataclass(frozen=True)
class ProbeResult:
    probe: tuple[str, str, str, str]
    rank_before: int
    rank_after: int


@dataclass
class PreservationReport:
    """Per-probe analogy ranks before/after plus the aggregate shifts."""

    probes: list[ProbeResult]

    @property
    def degraded(self) -> int:
        return sum(1 for p in self.probes if p.rank_after > p.rank_before)

    @property
    def improved(self) -> int:
        return sum(1 for p in self.probes if p.rank_after < p.rank_before)

    @property
    def unchanged(self) -> int:
        return sum(1 for p in self.probes if p.rank_after == p.rank_before)

    @property
    def mrr_before(self) -> float:
        return float(np.mean([1.0 / p.rank_before for p in self.probes]))

    @property
    def mrr_after(self) -> float:
        return float(np.mean([1.0 / p.rank_after for p in self.probes]))

    def summary_lines(self) -> list[str]:
        return [
            f"probes={len(self.probes)}",
            f"degraded={self.degraded}",
            f"improved={self.improved}",
            f"unchanged={self.unchanged}",
            f"mrr_before={self.mrr_before!r}",
            f"mrr_after={self.mrr_after!r}",
        ]

    def table_lines(self) -> list[str]:
        lines = ["a\tb\tc\td\trank_before\trank_after"]
        for p in self.probes:
            a, b, c, d = p.probe
            lines.append(f"{a}\t{b}\t{c}\t{d}\t{p.rank_before}\t{p.rank_after}")
        return lines


def _answer_rank(index, a: str, b: str, c: str, answer: str) -> int:
    neighbors = analogy(index, a, b, c, k=len(index))
    for position, neighbor in enumerate(neighbors, start=1):
        if neighbor.token == answer:
            return position
    raise UnknownTokenError(answer)


def preservation_report(
    before: VectorSpace,
    after: VectorSpace,
    probes: list[tuple[str, str, str, str]],
    k: int | None = None,
) -> PreservationReport:
    """Rank each probe's answer in both spaces; k is accepted for symmetry
    with the query operations but ranking always scans the full vocabulary."""
    index_before = build_index(before)
    index_after = build_index(after)
    results = []
    for a, b, c, d in probes:
        for token in (a, b, c, d):
            if token not in before or token not in after:
                raise UnknownTokenError(token)
        if d in (a, b, c):
            raise SemvecError(f"probe answer {d!r} is one of its inputs")
        results.append(
            ProbeResult(
                (a, b, c, d),
                _answer_rank(index_before, a, b, c, d),
                _answer_rank(index_after, a, b, c, d),
            )
        )
    return PreservationReport(results)


def parse_probes(data: bytes) -> list[tuple[str, str, str, str]]:
    """Whitespace-separated "a b c d" lines; # starts a comment."""
    probes = []
    for lineno, raw in enumerate(data.decode("utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        if len(fields) != 4:
            raise FormatError(
                f"expected 4 tokens per probe, found {len(fields)}", line=lineno
            )
        probes.append((fields[0], fields[1], fields[2], fields[3]))
    return probes
