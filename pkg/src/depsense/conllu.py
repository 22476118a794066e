"""CoNLL-U reading: tokens, dependency trees, per-sentence error recovery."""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import IO, Iterable, Iterator

LEXICAL_POS = ("NOUN", "VERB", "ADJ", "ADV")
OTHER = "OTHER"

N_COLUMNS = 10


@dataclass(frozen=True)
class Token:
    """One syntactic word: 1-based index, lemma, coarse POS, head edge."""

    index: int
    form: str
    lemma: str
    upos: str
    head: int
    deprel: str

    def is_lexical(self) -> bool:
        return self.upos != OTHER


@dataclass(frozen=True)
class DependencyTree:
    tokens: tuple[Token, ...]
    root_index: int

    def token(self, index: int) -> Token:
        return self.tokens[index - 1]

    def edges(self) -> Iterator[tuple[Token, Token]]:
        """Yield (head, dependent) pairs for every non-root edge."""
        for tok in self.tokens:
            if tok.head != 0:
                yield self.tokens[tok.head - 1], tok


@dataclass
class ParseIssue:
    """Diagnostic for a sentence block that could not be turned into a tree."""

    line: int
    message: str

    def __str__(self) -> str:
        return f"line {self.line}: {self.message}"


class _BlockError(Exception):
    def __init__(self, line: int, message: str):
        super().__init__(message)
        self.line = line
        self.message = message


def normalize_upos(upos: str) -> str:
    return upos if upos in LEXICAL_POS else OTHER


def _build_tree(rows: list[tuple[int, list[str]]]) -> DependencyTree:
    """Validate one sentence block and assemble the tree.

    rows: (source line number, 10 columns) per syntactic-word line.
    """
    tokens = []
    expected = 1
    for line_no, cols in rows:
        try:
            index = int(cols[0])
        except ValueError:
            raise _BlockError(line_no, f"non-integer ID {cols[0]!r}")
        if index != expected:
            raise _BlockError(line_no, f"ID {index} out of sequence (expected {expected})")
        expected += 1
        try:
            head = int(cols[6])
        except ValueError:
            raise _BlockError(line_no, f"non-integer HEAD {cols[6]!r}")
        if head < 0:
            raise _BlockError(line_no, f"negative HEAD {head}")
        if head == index:
            raise _BlockError(line_no, f"token {index} is its own head")
        lemma = cols[2].lower()
        if not lemma or any(c.isspace() for c in lemma):
            raise _BlockError(line_no, f"empty or whitespace lemma {cols[2]!r}")
        tokens.append(
            Token(
                index=index,
                form=cols[1],
                lemma=lemma,
                upos=normalize_upos(cols[3]),
                head=head,
                deprel=cols[7],
            )
        )

    first_line = rows[0][0]
    n = len(tokens)
    roots = [t.index for t in tokens if t.head == 0]
    if len(roots) != 1:
        raise _BlockError(first_line, f"expected exactly one root, found {len(roots)}")
    for t in tokens:
        if t.head > n:
            raise _BlockError(first_line, f"token {t.index} has HEAD {t.head} beyond sentence")

    # Reachability from the root doubles as the cycle check.
    children: dict[int, list[int]] = {}
    for t in tokens:
        children.setdefault(t.head, []).append(t.index)
    seen: set[int] = set()
    stack = [roots[0]]
    while stack:
        i = stack.pop()
        seen.add(i)
        stack.extend(children.get(i, ()))
    if len(seen) != n:
        raise _BlockError(first_line, "head graph is not a tree (cycle or disconnected node)")

    return DependencyTree(tokens=tuple(tokens), root_index=roots[0])


def iter_trees(lines: Iterable[str], issues: list[ParseIssue] | None = None) -> Iterator[DependencyTree]:
    """Parse CoNLL-U lines into trees, one per sentence block.

    Multiword-token ranges ("3-4") and empty nodes ("5.1") are skipped.
    A malformed block is dropped and recorded in `issues` (if given);
    parsing continues with the next block.
    """
    rows: list[tuple[int, list[str]]] = []
    block_error: _BlockError | None = None

    def flush() -> DependencyTree | None:
        nonlocal rows, block_error
        err, pending = block_error, rows
        rows, block_error = [], None
        if err is None and not pending:
            return None
        try:
            if err is not None:
                raise err
            return _build_tree(pending)
        except _BlockError as exc:
            if issues is not None:
                issues.append(ParseIssue(line=exc.line, message=exc.message))
            return None

    for line_no, raw in enumerate(lines, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line.strip():
            tree = flush()
            if tree is not None:
                yield tree
            continue
        if line.startswith("#"):
            continue
        if block_error is not None:
            continue  # block already doomed; skim to its end
        cols = line.split("\t")
        if len(cols) != N_COLUMNS:
            block_error = _BlockError(line_no, f"expected {N_COLUMNS} columns, got {len(cols)}")
            continue
        if "-" in cols[0] or "." in cols[0]:
            continue  # multiword range / empty node
        rows.append((line_no, cols))
    tree = flush()
    if tree is not None:
        yield tree


def parse_conllu(source: str | bytes | IO, issues: list[ParseIssue] | None = None) -> list[DependencyTree]:
    """Parse a CoNLL-U document (text, bytes, or a line stream) into trees."""
    if isinstance(source, bytes):
        source = source.decode("utf-8")
    if isinstance(source, str):
        source = io.StringIO(source)
    return list(iter_trees(source, issues=issues))


def parse_conllu_file(path, issues: list[ParseIssue] | None = None) -> list[DependencyTree]:
    with open(path, encoding="utf-8") as fh:
        return list(iter_trees(fh, issues=issues))
