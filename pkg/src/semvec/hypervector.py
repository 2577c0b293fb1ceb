"""Binary high-dimensional vector algebra over {0,1}^n.

Random points in this space concentrate at Hamming distance n/2 from
each other, while the majority-vote bundle of two points sits about n/4
from each of them; the statistics helpers below measure both effects
empirically. Vectors are bit-packed and immutable.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, EmptyInputError

# Bits set per byte value, for popcount over packed arrays.
_POPCOUNT = np.unpackbits(np.arange(256, dtype=np.uint8)[:, None], axis=1).sum(
    axis=1, dtype=np.int64
)


@dataclass(frozen=True)
class BinaryHypervector:
    """A fixed-width element of {0,1}^n, stored bit-packed."""

    packed: np.ndarray
    n: int

    @classmethod
    def from_bits(cls, bits) -> "BinaryHypervector":
        arr = np.asarray(bits, dtype=np.uint8)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("bits must be a nonempty one-dimensional sequence")
        if not np.isin(arr, (0, 1)).all():
            raise ValueError("bits must be 0 or 1")
        packed = np.packbits(arr)
        packed.flags.writeable = False
        return cls(packed, int(arr.size))

    def bits(self) -> np.ndarray:
        return np.unpackbits(self.packed)[: self.n]

    def popcount(self) -> int:
        return int(_POPCOUNT[self.packed].sum())

    def complement(self) -> "BinaryHypervector":
        return BinaryHypervector.from_bits(1 - self.bits())

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryHypervector):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.packed, other.packed)

    def __hash__(self):
        return hash((self.n, self.packed.tobytes()))


def random_hypervector(n: int, rng: np.random.Generator) -> BinaryHypervector:
    """Each bit an independent fair coin from the supplied generator."""
    if n < 1:
        raise ValueError("dimension n must be positive")
    return BinaryHypervector.from_bits(rng.integers(0, 2, size=n, dtype=np.uint8))


def hamming(a: BinaryHypervector, b: BinaryHypervector) -> int:
    """Number of positions where the two vectors differ."""
    if a.n != b.n:
        raise DimensionMismatchError(f"dimension mismatch: {a.n} vs {b.n}")
    return int(_POPCOUNT[np.bitwise_xor(a.packed, b.packed)].sum())


def bundle(vectors, tie_rng: np.random.Generator) -> BinaryHypervector:
    """Bitwise majority vote; even splits fall to a seeded coin per position.

    The coins are drawn once for all n positions, so the result depends
    on the multiset of inputs and the tie seed, not on list order.
    """
    vectors = list(vectors)
    if not vectors:
        raise EmptyInputError("bundle of an empty list")
    n = vectors[0].n
    for v in vectors[1:]:
        if v.n != n:
            raise DimensionMismatchError(f"dimension mismatch: {v.n} vs {n}")
    counts = np.zeros(n, dtype=np.int64)
    for v in vectors:
        counts += v.bits()
    coins = tie_rng.integers(0, 2, size=n, dtype=np.uint8)
    doubled = 2 * counts
    bits = np.where(doubled > len(vectors), 1, 0).astype(np.uint8)
    bits[doubled == len(vectors)] = coins[doubled == len(vectors)]
    return BinaryHypervector.from_bits(bits)


def sample_pair_distances(
    n: int, samples: int, rng: np.random.Generator
) -> np.ndarray:
    """Hamming distances of `samples` independently drawn random pairs."""
    if samples < 1:
        raise ValueError("samples must be positive")
    distances = np.empty(samples, dtype=np.int64)
    for i in range(samples):
        a = random_hypervector(n, rng)
        b = random_hypervector(n, rng)
        distances[i] = hamming(a, b)
    return distances


def distance_distribution_stats(
    n: int, samples: int, rng: np.random.Generator
) -> tuple[float, float]:
    """Empirical (mean, std) of pairwise distance over sampled random pairs."""
    if samples < 2:
        raise ValueError("need at least 2 samples for a standard deviation")
    distances = sample_pair_distances(n, samples, rng)
    return float(distances.mean()), float(distances.std(ddof=1))
