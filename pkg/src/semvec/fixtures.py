"""A hand-built space in which concepts are exact sums of primitives.

Each primitive gets its own orthogonal axis and every composite token is
the sum of its primitives (plus optional seeded noise), so analogy and
relation arithmetic have provable right answers here: bear:hiker::shark
resolves to snorkeler, the displacement learned from (snow, icy_roads)
carries rain to wet_roads, and chaining the two kitchen relations steps
from finger to knife. The space doubles as the default probe set for
retrofit preservation reports.
"""

from __future__ import annotations

import numpy as np

from .embedding_store import RAW, VectorSpace

PRIMITIVES = [
    "cold",
    "water",
    "precipitation",
    "frozen",
    "wet",
    "road",
    "woods",
    "sea",
    "predator",
    "tourist",
    "safety",
    "vehicle",
    "ocean",
    "france",
    "city",
    "fashion",
]

COMPOSITES = {
    "ice": ("cold", "water"),
    "snow": ("precipitation", "frozen"),
    "icy_roads": ("frozen", "road"),
    "rain": ("precipitation", "wet"),
    "wet_roads": ("wet", "road"),
    "bear": ("woods", "predator"),
    "hiker": ("woods", "tourist"),
    "shark": ("sea", "predator"),
    "snorkeler": ("sea", "tourist"),
    "seat_belt": ("road", "safety"),
    "car": ("road", "vehicle"),
    "life_preserver": ("ocean", "safety"),
    "boat": ("ocean", "vehicle"),
    "paris": ("france", "city", "fashion"),
}

# Two parallel location/tool chains on four dedicated axes. Within each
# chain the unit rows differ by exactly one axis step, so the relation
# learned from one chain applies exactly to the other.
_CHAIN_AXES = 4
_KITCHEN = {
    "finger": (-0.5, -0.5, 0),
    "cutting_board": (0.5, -0.5, 0),
    "knife": (0.5, 0.5, 0),
    "pan": (-0.5, -0.5, 1),
    "counter": (0.5, -0.5, 1),
    "spatula": (0.5, 0.5, 1),
}

DEFAULT_NOISE = 0.01
DEFAULT_SEED = 7

# Analogy probes (a, b, c, answer) that hold exactly on this space.
DEFAULT_PROBES = [
    ("bear", "hiker", "shark", "snorkeler"),
    ("seat_belt", "car", "life_preserver", "boat"),
    ("snow", "icy_roads", "rain", "wet_roads"),
    ("finger", "cutting_board", "pan", "counter"),
]

# Example pairs from which the two chainable kitchen relations are learned.
LOCATION_PAIRS = [("pan", "counter")]
TOOL_PAIRS = [("counter", "spatula")]


def build_compositional_space(
    noise: float = DEFAULT_NOISE, seed: int = DEFAULT_SEED
) -> VectorSpace:
    """Construct the fixture; noise=0 makes every identity bit-exact."""
    if noise < 0:
        raise ValueError("noise must be nonnegative")
    dim = len(PRIMITIVES) + _CHAIN_AXES
    axis = {token: i for i, token in enumerate(PRIMITIVES)}
    vocab: list[str] = []
    rows: list[np.ndarray] = []
    for token in PRIMITIVES:
        row = np.zeros(dim)
        row[axis[token]] = 1.0
        vocab.append(token)
        rows.append(row)
    for token, parts in COMPOSITES.items():
        row = np.zeros(dim)
        for part in parts:
            row[axis[part]] += 1.0
        vocab.append(token)
        rows.append(row)
    shared = np.sqrt(0.5)
    base = len(PRIMITIVES)
    for token, (step, order, chain) in _KITCHEN.items():
        row = np.zeros(dim)
        row[base] = step
        row[base + 1] = order
        row[base + 2 + chain] = shared
        vocab.append(token)
        rows.append(row)
    matrix = np.vstack(rows)
    if noise > 0:
        rng = np.random.default_rng(seed)
        jitter = rng.standard_normal(matrix.shape)
        jitter *= noise / np.linalg.norm(jitter, axis=1)[:, None]
        matrix = matrix + jitter
    return VectorSpace(vocab, matrix, RAW)
