"""Lexical dependency triples and their aggregate count table."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .conllu import LEXICAL_POS, DependencyTree
from .errors import DataFormatError

DEFAULT_RELATIONS = frozenset({"nsubj", "obj", "iobj", "amod", "advmod", "nmod"})

COUNTS_HEADER = "#depsense-counts v1"


@dataclass(frozen=True, order=True)
class DependencyTriple:
    """One counted edge: (head lemma, head POS, relation, dependent lemma, dependent POS)."""

    head_lemma: str
    head_pos: str
    relation: str
    dep_lemma: str
    dep_pos: str


@dataclass
class TripleCountTable:
    """Counts of dependency triples plus cached marginals.

    Marginals: per (head_lemma, head_pos, relation), per
    (relation, dep_lemma, dep_pos), and the grand total.
    """

    entries: dict[DependencyTriple, int] = field(default_factory=dict)
    head_marginals: dict[tuple[str, str, str], int] = field(default_factory=dict)
    dep_marginals: dict[tuple[str, str, str], int] = field(default_factory=dict)
    total: int = 0

    def add(self, triple: DependencyTriple, count: int = 1) -> None:
        if count < 1:
            raise ValueError(f"count must be positive, got {count}")
        self.entries[triple] = self.entries.get(triple, 0) + count
        hk = (triple.head_lemma, triple.head_pos, triple.relation)
        dk = (triple.relation, triple.dep_lemma, triple.dep_pos)
        self.head_marginals[hk] = self.head_marginals.get(hk, 0) + count
        self.dep_marginals[dk] = self.dep_marginals.get(dk, 0) + count
        self.total += count

    def merge(self, other: "TripleCountTable") -> None:
        """Entry-wise count addition; associative and commutative."""
        for triple, count in other.entries.items():
            self.add(triple, count)

    def count(self, triple: DependencyTriple) -> int:
        return self.entries.get(triple, 0)

    def head_marginal(self, head_lemma: str, head_pos: str, relation: str) -> int:
        return self.head_marginals.get((head_lemma, head_pos, relation), 0)

    def dep_marginal(self, relation: str, dep_lemma: str, dep_pos: str) -> int:
        return self.dep_marginals.get((relation, dep_lemma, dep_pos), 0)

    def __len__(self) -> int:
        return len(self.entries)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TripleCountTable):
            return NotImplemented
        return self.entries == other.entries


def extract_triples(
    tree: DependencyTree, relation_filter: Iterable[str] = DEFAULT_RELATIONS
) -> list[DependencyTriple]:
    """Triples for every edge whose relation passes the filter and whose
    endpoints are both lexical (NOUN/VERB/ADJ/ADV), in dependent order."""
    wanted = set(relation_filter)
    out = []
    for head, dep in tree.edges():
        if dep.deprel not in wanted:
            continue
        if head.upos not in LEXICAL_POS or dep.upos not in LEXICAL_POS:
            continue
        out.append(
            DependencyTriple(
                head_lemma=head.lemma,
                head_pos=head.upos,
                relation=dep.deprel,
                dep_lemma=dep.lemma,
                dep_pos=dep.upos,
            )
        )
    return out


def accumulate(triples: Iterable[DependencyTriple]) -> TripleCountTable:
    table = TripleCountTable()
    for triple, count in Counter(triples).items():
        table.add(triple, count)
    return table


def count_corpus(
    trees: Iterable[DependencyTree], relation_filter: Iterable[str] = DEFAULT_RELATIONS
) -> TripleCountTable:
    """Extract and accumulate over a whole corpus in one pass."""
    wanted = set(relation_filter)
    table = TripleCountTable()
    for tree in trees:
        for triple in extract_triples(tree, wanted):
            table.add(triple)
    return table


def save_counts(table: TripleCountTable, path) -> None:
    """Write the counts TSV, rows sorted for byte-identical reruns."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(COUNTS_HEADER + "\n")
        for triple in sorted(table.entries):
            count = table.entries[triple]
            fh.write(
                f"{triple.head_lemma}\t{triple.head_pos}\t{triple.relation}"
                f"\t{triple.dep_lemma}\t{triple.dep_pos}\t{count}\n"
            )


def load_counts(path) -> TripleCountTable:
    table = TripleCountTable()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 6:
                raise DataFormatError(f"{path}: row {line_no}: expected 6 columns, got {len(cols)}")
            try:
                count = int(cols[5])
            except ValueError:
                raise DataFormatError(f"{path}: row {line_no}: non-integer count {cols[5]!r}")
            if count < 1:
                raise DataFormatError(f"{path}: row {line_no}: non-positive count {count}")
            table.add(DependencyTriple(cols[0], cols[1], cols[2], cols[3], cols[4]), count)
    return table
