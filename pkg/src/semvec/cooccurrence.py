"""Train embeddings from raw text: windowed counts, reweighting, truncated SVD.

The pipeline is count -> weight -> factor. Counting produces a sparse
symmetric token-by-token matrix (windows never cross document
boundaries); weighting optionally rescales counts (log1p or PPMI) to
suppress frequency noise; the truncated SVD is a seeded randomized
subspace iteration, so the whole pipeline is a pure function of the
corpus bytes and the config.
"""

from __future__ import annotations

import re
import string
from collections import Counter
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

from .embedding_store import RAW, VectorSpace
from .errors import ConvergenceError, EmptyInputError, FormatError, SemvecError

WEIGHTINGS = ("raw", "log1p", "ppmi")

_STRIP = string.punctuation


def tokenize(text: str) -> list[str]:
    """Lowercased whitespace tokens with edge punctuation stripped."""
    out = []
    for chunk in text.lower().split():
        token = chunk.strip(_STRIP)
        if token:
            out.append(token)
    return out


@dataclass(frozen=True)
class TrainConfig:
    window: int = 2
    min_count: int = 1
    dim: int = 100
    weighting: str = "ppmi"
    svd_tol: float = 1e-6
    seed: int = 42

    def __post_init__(self):
        if self.window < 1:
            raise ValueError("window must be at least 1")
        if self.min_count < 1:
            raise ValueError("min_count must be at least 1")
        if self.dim < 1:
            raise ValueError("dim must be at least 1")
        if self.weighting not in WEIGHTINGS:
            raise ValueError(f"weighting must be one of {WEIGHTINGS}")
        if self.svd_tol <= 0:
            raise ValueError("svd_tol must be positive")


@dataclass
class CooccurrenceMatrix:
    """Sparse nonnegative counts keyed by (row, col); absent entries are 0."""

    vocab: list[str]
    counts: dict[tuple[int, int], float]

    def __post_init__(self):
        if any(v <= 0 for v in self.counts.values()):
            raise ValueError("stored counts must be positive")

    @property
    def size(self) -> int:
        return len(self.vocab)

    def total(self) -> float:
        return float(sum(self.counts.values()))

    def to_dense(self) -> np.ndarray:
        dense = np.zeros((self.size, self.size))
        for (i, j), c in self.counts.items():
            dense[i, j] = c
        return dense

    def to_csr(self) -> sparse.csr_matrix:
        if not self.counts:
            return sparse.csr_matrix((self.size, self.size))
        rows, cols, vals = zip(*((i, j, c) for (i, j), c in self.counts.items()))
        return sparse.csr_matrix(
            (vals, (rows, cols)), shape=(self.size, self.size)
        )


def count_cooccurrences(
    documents: Sequence[Sequence[str]], config: TrainConfig
) -> CooccurrenceMatrix:
    """Count symmetric windowed co-occurrences over tokenized documents.

    Tokens below min_count are dropped from the vocabulary before any
    pair is counted, and the surviving tokens of each document close
    ranks, so window offsets are positions in the filtered document.
    """
    freq: Counter[str] = Counter()
    order: list[str] = []
    seen: set[str] = set()
    for doc in documents:
        for token in doc:
            freq[token] += 1
            if token not in seen:
                seen.add(token)
                order.append(token)
    vocab = [t for t in order if freq[t] >= config.min_count]
    if not vocab:
        raise EmptyInputError("no token meets the min_count floor")
    index = {t: i for i, t in enumerate(vocab)}
    counts: dict[tuple[int, int], float] = {}
    for doc in documents:
        ids = [index[t] for t in doc if t in index]
        for pos, i in enumerate(ids):
            for offset in range(1, config.window + 1):
                if pos + offset >= len(ids):
                    break
                j = ids[pos + offset]
                counts[(i, j)] = counts.get((i, j), 0.0) + 1.0
                counts[(j, i)] = counts.get((j, i), 0.0) + 1.0
    return CooccurrenceMatrix(vocab, counts)


def weight_matrix(matrix: CooccurrenceMatrix, weighting: str) -> CooccurrenceMatrix:
    """Apply a count transform: raw (identity), log1p, or PPMI.

    PPMI entries that clip to zero are dropped so the sparse invariant
    (stored values strictly positive) is preserved.
    """
    if weighting not in WEIGHTINGS:
        raise ValueError(f"weighting must be one of {WEIGHTINGS}")
    if weighting == "raw":
        return CooccurrenceMatrix(list(matrix.vocab), dict(matrix.counts))
    if weighting == "log1p":
        return CooccurrenceMatrix(
            list(matrix.vocab),
            {key: float(np.log1p(c)) for key, c in matrix.counts.items()},
        )
    total = matrix.total()
    row_sums = np.zeros(matrix.size)
    col_sums = np.zeros(matrix.size)
    for (i, j), c in matrix.counts.items():
        row_sums[i] += c
        col_sums[j] += c
    weighted: dict[tuple[int, int], float] = {}
    for (i, j), c in matrix.counts.items():
        value = float(np.log(c * total / (row_sums[i] * col_sums[j])))
        if value > 0.0:
            weighted[(i, j)] = value
    return CooccurrenceMatrix(list(matrix.vocab), weighted)


def _orthonormal(block: np.ndarray) -> np.ndarray:
    q, _ = np.linalg.qr(block)
    return q


def truncated_svd(
    matrix,
    d: int,
    tol: float = 1e-6,
    seed: int = 0,
    max_iterations: int = 300,
    oversample: int = 10,
) -> tuple[np.ndarray, np.ndarray]:
    """Top-d singular triplets by seeded randomized subspace iteration.

    Accepts a CooccurrenceMatrix or a dense array. Power iterations run
    until the singular-value estimates change by less than tol relative
    to their current size, or fail with the last residual after
    max_iterations. Returns (left_factors, singular_values) with the
    factor columns orthonormal and the values nonincreasing.
    """
    if isinstance(matrix, CooccurrenceMatrix):
        a = matrix.to_csr()
    else:
        a = np.asarray(matrix, dtype=np.float64)
        if a.ndim != 2:
            raise ValueError("matrix must be two-dimensional")
    n_rows, n_cols = a.shape
    if d < 1:
        raise ValueError("d must be at least 1")
    if d > min(n_rows, n_cols):
        raise SemvecError(
            f"requested {d} factors from a {n_rows}x{n_cols} matrix"
        )
    if tol <= 0:
        raise ValueError("tol must be positive")
    a_t = a.T if not sparse.issparse(a) else a.T.tocsr()
    rng = np.random.default_rng(seed)
    width = min(n_cols, d + oversample)
    test = rng.standard_normal((n_cols, width))
    basis = _orthonormal(np.asarray(a @ test))
    previous = None
    residual = np.inf
    for _ in range(max_iterations):
        basis = _orthonormal(np.asarray(a @ _orthonormal(np.asarray(a_t @ basis))))
        projected = np.asarray(a_t @ basis).T
        estimates = np.linalg.svd(projected, compute_uv=False)[:d]
        if previous is not None:
            # Change measured relative to the spectrum scale, so exact zero
            # singular values (rank-deficient input) still converge.
            scale = max(float(estimates[0]), 1e-300)
            residual = float(np.max(np.abs(estimates - previous)) / scale)
            if residual < tol:
                small_left, values, _ = np.linalg.svd(projected, full_matrices=False)
                left = basis @ small_left
                return left[:, :d], values[:d]
        previous = estimates
    raise ConvergenceError(
        f"subspace iteration did not converge in {max_iterations} iterations",
        residual,
    )


def train(documents: Sequence[str], config: TrainConfig) -> VectorSpace:
    """Corpus text to embeddings: left factors scaled by sqrt singular values."""
    tokenized = [tokenize(doc) for doc in documents]
    counts = count_cooccurrences(tokenized, config)
    if config.dim > counts.size:
        raise SemvecError(
            f"dim {config.dim} exceeds effective vocabulary of {counts.size}"
        )
    weighted = weight_matrix(counts, config.weighting)
    left, values = truncated_svd(
        weighted, config.dim, tol=config.svd_tol, seed=config.seed
    )
    return VectorSpace(counts.vocab, left * np.sqrt(values), RAW)


def load_corpus(path) -> list[str]:
    """A directory of .txt files (one document each, sorted by name) or a
    single file with blank-line document separators."""
    path = Path(path)
    if path.is_dir():
        docs = [
            p.read_text(encoding="utf-8") for p in sorted(path.glob("*.txt"))
        ]
    else:
        text = path.read_text(encoding="utf-8")
        docs = re.split(r"\n\s*\n", text)
    docs = [d for d in (doc.strip() for doc in docs) if d]
    if not docs:
        raise EmptyInputError(f"no documents found under {path}")
    return docs


_CONFIG_COERCERS = {
    "window": int,
    "min_count": int,
    "dim": int,
    "weighting": str,
    "svd_tol": float,
    "seed": int,
}


def read_train_config(text: str, base: TrainConfig | None = None) -> TrainConfig:
    """Parse `key = value` lines (with # comments) into a TrainConfig."""
    config = base or TrainConfig()
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError("expected 'key = value'", line=lineno)
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip().strip("\"'")
        if key not in _CONFIG_COERCERS:
            raise FormatError(f"unknown config key {key!r}", line=lineno)
        try:
            overrides[key] = _CONFIG_COERCERS[key](value)
        except ValueError:
            raise FormatError(f"bad value for {key!r}", line=lineno) from None
    try:
        return replace(config, **overrides)
    except ValueError as exc:
        raise FormatError(str(exc)) from None
