"""Bundled synthetic corpora for demos, tests, and the evaluation harness.

Everything here is deterministic: the disambiguation corpus is a fixed
string, and the benchmark generator is fully driven by its seed.
"""

from __future__ import annotations

import numpy as np

from .evaluation import SimilarityPair, SvoTriple


def svo_block(subject: str, verb: str, obj: str) -> str:
    """One CoNLL-U sentence block for a subject-verb-object sentence."""
    return (
        f"1\t{subject.capitalize()}\t{subject}\tNOUN\t_\t_\t2\tnsubj\t_\t_\n"
        f"2\t{verb}\t{verb}\tVERB\t_\t_\t0\troot\t_\t_\n"
        f"3\t{obj}\t{obj}\tNOUN\t_\t_\t2\tobj\t_\t_\n"
    )


def svo_conllu(sentences: list[tuple[str, str, str]]) -> str:
    """CoNLL-U document for a list of (subject, verb, object) sentences."""
    return "\n".join(svo_block(s, v, o) for s, v, o in sentences) + "\n"


# Three verb neighbourhoods around the polysemous pair catch/ball: grabbing
# physical objects, contracting diseases, attending social events. "catch"
# takes objects from the first two clusters; "ball" is object of both
# grabbing and event verbs. Each cluster is a full verb x object design so
# that no single rare co-occurrence dominates the PPMI profiles, and the
# grabbing cluster is wide enough that catch's own disease contexts carry
# little weight inside any physical class.


def _full_product(verbs, objects, subjects) -> list[tuple[str, str, str]]:
    out = []
    i = 0
    for v in verbs:
        for o in objects:
            out.append((subjects[i % len(subjects)], v, o))
            i += 1
    return out


DISAMBIGUATION_SENTENCES: list[tuple[str, str, str]] = (
    _full_product(
        ["throw", "toss", "grasp", "kick", "bounce", "roll"],
        ["ball", "frisbee", "stone"],
        ["girl", "boy"],
    )
    + [
        ("girl", "catch", "ball"),
        ("boy", "catch", "frisbee"),
        ("girl", "catch", "stone"),
    ]
    + _full_product(
        ["contract", "have", "suffer", "develop", "fight", "nurse"],
        ["cold", "flu", "fever"],
        ["girl", "man"],
    )
    + [("man", "catch", "cold")]
    + _full_product(
        ["attend", "host"],
        ["ball", "party"],
        ["boy", "man"],
    )
)


def disambiguation_conllu() -> str:
    """The bundled ~20-sentence corpus behind the catch-ball/catch-cold demo."""
    return svo_conllu(DISAMBIGUATION_SENTENCES)


# --- engineered benchmark ---------------------------------------------------

def _cluster_vocab(n_clusters: int) -> tuple[list[list[str]], list[list[str]], list[list[str]]]:
    verbs = [[f"verb{c}{x}" for x in "abc"] for c in range(n_clusters)]
    objects = [[f"object{c}{x}" for x in "abcd"] for c in range(n_clusters)]
    subjects = [[f"agent{c}{x}" for x in "abcd"] for c in range(n_clusters)]
    return verbs, objects, subjects


def benchmark_corpus(
    seed: int = 42, n_pairs: int = 200, n_clusters: int = 8
) -> tuple[str, list[SimilarityPair]]:
    """Corpus + dataset where similarity is decidable only in context.

    Verbs come in sense clusters, each with its own objects and subjects.
    Ambiguous verbs straddle two clusters. Dataset pairs swap an ambiguous
    verb for an unambiguous one that either shares the sense selected by the
    object (high human score) or belongs to the other sense (low score).
    Static verb-verb cosine cannot separate the two cases; contextualized
    vectors can.
    """
    if n_clusters < 2:
        raise ValueError("need at least 2 clusters")
    rng = np.random.default_rng(seed)
    verbs, objects, subjects = _cluster_vocab(n_clusters)
    ambiguous = [f"pivot{i}" for i in range(n_clusters)]
    amb_clusters = {ambiguous[i]: (i, (i + 1) % n_clusters) for i in range(n_clusters)}

    sentences: list[tuple[str, str, str]] = []
    for c in range(n_clusters):
        cluster_verbs = list(verbs[c])
        for amb, (c1, c2) in amb_clusters.items():
            if c in (c1, c2):
                cluster_verbs.append(amb)
        for v in cluster_verbs:
            for j, o in enumerate(objects[c]):
                reps = int(rng.integers(1, 3))
                for r in range(reps):
                    s = subjects[c][(j + r) % len(subjects[c])]
                    sentences.append((s, v, o))

    pairs: list[SimilarityPair] = []
    for i in range(n_pairs):
        amb = ambiguous[int(rng.integers(0, n_clusters))]
        c1, c2 = amb_clusters[amb]
        if rng.integers(0, 2):
            target, other = c1, c2
        else:
            target, other = c2, c1
        obj = objects[target][int(rng.integers(0, len(objects[target])))]
        subj = subjects[target][int(rng.integers(0, len(subjects[target])))]
        if rng.integers(0, 2):
            verb2 = verbs[target][int(rng.integers(0, len(verbs[target])))]
            human = float(rng.uniform(5.5, 7.0))
        else:
            verb2 = verbs[other][int(rng.integers(0, len(verbs[other])))]
            human = float(rng.uniform(1.0, 2.5))
        pairs.append(
            SimilarityPair(
                expr1=SvoTriple(subj, amb, obj),
                expr2=SvoTriple(subj, verb2, obj),
                human_score=round(human, 2),
            )
        )
    return svo_conllu(sentences), pairs
