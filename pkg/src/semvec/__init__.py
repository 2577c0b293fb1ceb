"""Semantic vector-space reasoning over word embeddings.

Load or train a space, index it, and query it: analogies, weighted
associations, concept construction with antonym separation, learnable
displacement relations and their chains, lexicon retrofitting with a
preservation report, binary hypervector statistics, and two-word
paraphrase search.
"""

from .algebra import (
    RelationVector,
    WeightedTermSet,
    analogy,
    apply_relation,
    associate,
    build_concept,
    compose_relations,
    learn_relation,
    negate_relation,
    parse_relation,
    serialize_relation,
)
from .cooccurrence import (
    CooccurrenceMatrix,
    TrainConfig,
    count_cooccurrences,
    load_corpus,
    tokenize,
    train,
    truncated_svd,
    weight_matrix,
)
from .embedding_store import (
    ConceptVector,
    Provenance,
    VectorSpace,
    detect_format,
    normalize,
    parse_binary_embeddings,
    parse_embeddings,
    parse_text_embeddings,
    write_embeddings,
)
from .errors import (
    ConvergenceError,
    DimensionMismatchError,
    DuplicateTokenError,
    EmptyInputError,
    FormatError,
    SemvecError,
    UnknownTokenError,
    ZeroVectorError,
)
from .fixtures import DEFAULT_PROBES, build_compositional_space
from .hypervector import (
    BinaryHypervector,
    bundle,
    distance_distribution_stats,
    hamming,
    random_hypervector,
    sample_pair_distances,
)
from .paraphrase import (
    PhraseCandidate,
    PronunciationLexicon,
    generate_alliterative,
    generate_rhyming,
    parse_pronunciations,
    read_word_list,
    rhymes,
)
from .retrofit import (
    LexiconGraph,
    PreservationReport,
    parse_lexicon,
    parse_probes,
    preservation_report,
    retrofit,
)
from .similarity import Index, Neighbor, build_index, cosine

__version__ = "0.1.0"
