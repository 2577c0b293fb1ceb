"""Two-word paraphrase search: alliterative adjective-noun pairs and rhymes.

Candidate phrases are scored by the cosine between the averaged member
vectors and the query term, so a phrase like "anthropomorphic
automaton" can surface as a paraphrase of "robot". Rhyme detection uses
the perfect-rhyme rule over a pronouncing dictionary: two words rhyme
when some pronunciation pair shares an identical phoneme suffix from
the last primary-stressed phoneme onward.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass

import numpy as np

from .embedding_store import ConceptVector, Provenance
from .errors import EmptyInputError, FormatError, UnknownTokenError
from .similarity import Index

_VARIANT = re.compile(r"\(\d+\)$")


@dataclass
class PronunciationLexicon:
    """token -> list of pronunciations, each a list of phoneme strings."""

    entries: dict[str, list[list[str]]]

    def __contains__(self, word: str) -> bool:
        return word in self.entries

    def pronunciations(self, word: str) -> list[list[str]]:
        prons = self.entries.get(word)
        if prons is None:
            raise UnknownTokenError(word)
        return prons


def parse_pronunciations(data: bytes) -> PronunciationLexicon:
    """Parse dictionary lines "WORD  PH1 PH2 ...".

    Lines starting with ";;;" are comments; variant markers like
    "WORD(2)" fold into the base word's entry. Keys are lowercased.
    """
    entries: dict[str, list[list[str]]] = {}
    for lineno, raw in enumerate(data.decode("utf-8").splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith(";;;"):
            continue
        fields = line.split()
        if len(fields) < 2:
            raise FormatError("entry has no phonemes", line=lineno)
        word = _VARIANT.sub("", fields[0]).lower()
        if not word:
            raise FormatError("empty word", line=lineno)
        entries.setdefault(word, []).append(fields[1:])
    return PronunciationLexicon(entries)


def _rhyme_tail(pronunciation: list[str]) -> tuple[str, ...] | None:
    # Suffix from the last primary-stressed phoneme (stress digit 1).
    for i in range(len(pronunciation) - 1, -1, -1):
        if pronunciation[i].endswith("1"):
            return tuple(pronunciation[i:])
    return None


def rhymes(lexicon: PronunciationLexicon, w1: str, w2: str) -> bool:
    """Perfect rhyme: distinct words sharing a stressed-suffix in some
    pronunciation pair."""
    if w1 == w2:
        return False
    tails1 = {t for t in map(_rhyme_tail, lexicon.pronunciations(w1)) if t}
    tails2 = {t for t in map(_rhyme_tail, lexicon.pronunciations(w2)) if t}
    return bool(tails1 & tails2)


@dataclass
class PhraseCandidate:
    first: str
    second: str
    vector: ConceptVector
    score: float


def _score_pairs(
    index: Index, target: str, pairs: list[tuple[str, str]], k: int
) -> list[PhraseCandidate]:
    target_row = index.unit_row(target)
    candidates = []
    for first, second in pairs:
        mean = 0.5 * (index.unit_row(first) + index.unit_row(second))
        norm = np.linalg.norm(mean)
        if norm == 0.0:
            continue  # antipodal member rows cannot form a phrase vector
        unit_mean = mean / norm
        score = float(np.clip(np.dot(unit_mean, target_row), -1.0, 1.0))
        vector = ConceptVector(
            unit_mean, Provenance("weighted-sum", f"{first}+{second}")
        )
        candidates.append(PhraseCandidate(first, second, vector, score))
    candidates.sort(key=lambda c: (-c.score, c.first, c.second))
    return candidates[:k]


def generate_alliterative(
    index: Index,
    target: str,
    adjectives: list[str],
    nouns: list[str],
    letter: str,
    k: int = 10,
) -> list[PhraseCandidate]:
    """Score every adjective-noun pair whose words both start with `letter`."""
    if k < 1:
        raise ValueError("k must be at least 1")
    letter = letter.lower()
    adjectives = [a for a in adjectives if a.startswith(letter) and a in index]
    nouns = [n for n in nouns if n.startswith(letter) and n in index]
    pairs = [(a, n) for a in adjectives for n in nouns]
    if not pairs:
        raise EmptyInputError(
            f"no adjective-noun pairs starting with {letter!r} in the vocabulary"
        )
    return _score_pairs(index, target, pairs, k)


def generate_rhyming(
    index: Index,
    target: str,
    vocab_filter: list[str],
    lexicon: PronunciationLexicon,
    k: int = 10,
) -> list[PhraseCandidate]:
    """Score every unordered rhyming pair drawn from the filtered word list."""
    if k < 1:
        raise ValueError("k must be at least 1")
    words = []
    seen = set()
    for word in vocab_filter:
        if word in seen or word not in lexicon or word not in index:
            continue
        seen.add(word)
        words.append(word)
    pairs = [
        (min(a, b), max(a, b))
        for a, b in itertools.combinations(words, 2)
        if rhymes(lexicon, a, b)
    ]
    if not pairs:
        raise EmptyInputError("no rhyming pair in the filtered vocabulary")
    return _score_pairs(index, target, pairs, k)


def read_word_list(data: bytes) -> list[str]:
    """One token per line; # starts a comment."""
    words = []
    for raw in data.decode("utf-8").splitlines():
        word = raw.split("#", 1)[0].strip()
        if word:
            words.append(word)
    return words
