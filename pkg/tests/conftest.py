"""Shared fixtures: toy count tables, the bundled corpora, random generators."""

import numpy as np
import pytest

from depsense.conllu import parse_conllu
from depsense.spaces import build_ppmi_spaces
from depsense.toydata import benchmark_corpus, disambiguation_conllu
from depsense.triples import DependencyTriple, TripleCountTable, count_corpus

GIRL_CATCHES_BALL = """\
1\tThe\tthe\tDET\t_\t_\t2\tdet\t_\t_
2\tgirl\tgirl\tNOUN\t_\t_\t3\tnsubj\t_\t_
3\tcatches\tcatch\tVERB\t_\t_\t0\troot\t_\t_
4\ta\ta\tDET\t_\t_\t5\tdet\t_\t_
5\tball\tball\tNOUN\t_\t_\t3\tobj\t_\t_
"""


@pytest.fixture
def girl_catches_ball_tree():
    trees = parse_conllu(GIRL_CATCHES_BALL)
    assert len(trees) == 1
    return trees[0]


def make_table(entries: dict) -> TripleCountTable:
    table = TripleCountTable()
    for (hl, hp, rel, dl, dp), count in entries.items():
        table.add(DependencyTriple(hl, hp, rel, dl, dp), count)
    return table


@pytest.fixture
def ppmi_toy_table():
    """The 4-count table behind the hand-computed PPMI values."""
    return make_table(
        {
            ("catch", "VERB", "obj", "ball", "NOUN"): 2,
            ("throw", "VERB", "obj", "ball", "NOUN"): 1,
            ("catch", "VERB", "obj", "cold", "NOUN"): 1,
        }
    )


@pytest.fixture
def class_toy_table():
    """obj-triples catch->{ball:3, cold:1}, throw->{ball:2}."""
    return make_table(
        {
            ("catch", "VERB", "obj", "ball", "NOUN"): 3,
            ("catch", "VERB", "obj", "cold", "NOUN"): 1,
            ("throw", "VERB", "obj", "ball", "NOUN"): 2,
        }
    )


@pytest.fixture(scope="session")
def disambiguation():
    """(table, spaces) for the bundled catch-ball/catch-cold corpus."""
    trees = parse_conllu(disambiguation_conllu())
    table = count_corpus(trees)
    spaces = build_ppmi_spaces(table, min_count=1)
    return table, spaces


@pytest.fixture(scope="session")
def benchmark():
    """(pairs, table, spaces) for the engineered 200-pair benchmark."""
    conllu_text, pairs = benchmark_corpus(seed=42, n_pairs=200)
    table = count_corpus(parse_conllu(conllu_text))
    spaces = build_ppmi_spaces(table, min_count=1)
    return pairs, table, spaces


LEMMAS = [f"w{i}" for i in range(12)]
RELATIONS = ["nsubj", "obj", "amod", "advmod", "nmod"]
POS_PAIRS = {
    "nsubj": ("VERB", "NOUN"),
    "obj": ("VERB", "NOUN"),
    "amod": ("NOUN", "ADJ"),
    "advmod": ("VERB", "ADV"),
    "nmod": ("NOUN", "NOUN"),
}


def random_table(rng: np.random.Generator, max_triples: int = 50) -> TripleCountTable:
    """Small random count table over a fixed vocabulary."""
    table = TripleCountTable()
    n = int(rng.integers(1, max_triples + 1))
    for _ in range(n):
        rel = RELATIONS[int(rng.integers(0, len(RELATIONS)))]
        hp, dp = POS_PAIRS[rel]
        hl = LEMMAS[int(rng.integers(0, len(LEMMAS)))]
        dl = LEMMAS[int(rng.integers(0, len(LEMMAS)))]
        table.add(DependencyTriple(hl, hp, rel, dl, dp), int(rng.integers(1, 6)))
    return table
