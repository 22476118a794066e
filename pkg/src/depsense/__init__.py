"""depsense: contextualized word senses from dependency trees.

Static per-POS vector spaces are built from dependency-triple counts; a
word's sense in context is its static vector combined with the selectional
preference vectors of all dependencies it takes part in. A toy single-head
self-attention module provides the syntagmatic contrast, and an SVO
similarity harness compares the approaches against human judgments.
"""

from .attention import AttentionParams, TokenSequence, attention_weights, positional_encoding, self_attention
from .compose import (
    ContextualizedSense,
    ParadigmaticClass,
    SelectionalPreference,
    SlotQuery,
    contextualize_pair,
    contextualize_tree,
    paradigmatic_class,
    preference_vector,
    sentence_vector,
)
from .config import RunConfig
from .conllu import DependencyTree, Token, parse_conllu, parse_conllu_file
from .errors import DataFormatError, DepsenseError, MissingVocabError
from .evaluation import (
    EvalReport,
    SimilarityPair,
    SvoTriple,
    evaluate,
    load_dataset,
    paired_significance,
    spearman,
    svo_tree,
)
from .spaces import PosSpace, SpaceSet, add, build_ppmi_spaces, cosine, hadamard, l2_normalize, load_embeddings
from .triples import DependencyTriple, TripleCountTable, accumulate, extract_triples, load_counts, save_counts

__version__ = "0.1.0"
