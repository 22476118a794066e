"""Per-part-of-speech vector spaces: PPMI construction, embedding I/O, arithmetic.

A context dimension is keyed (relation, slot, co-lemma, co-POS) where slot
names the side the *co-occurring* word fills (HEAD or DEPENDENT).
"""

from __future__ import annotations

import math
import os
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .conllu import LEXICAL_POS
from .errors import DataFormatError, MissingVocabError
from .triples import TripleCountTable

HEAD = "HEAD"
DEPENDENT = "DEPENDENT"

SPACE_HEADER = "#depsense-space v1"

ContextKey = tuple[str, str, str, str]  # (relation, slot, lemma, pos)


# --- vector arithmetic -------------------------------------------------------

def _check_lengths(v1: np.ndarray, v2: np.ndarray) -> None:
    if v1.shape != v2.shape:
        raise ValueError(f"vector length mismatch: {v1.shape} vs {v2.shape}")


def cosine(v1: np.ndarray, v2: np.ndarray) -> float:
    """Cosine similarity; 0.0 when either vector has zero norm.

    Inputs are pre-scaled by their largest component so the squared norms
    can neither underflow nor overflow.
    """
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    _check_lengths(v1, v2)
    m1 = np.max(np.abs(v1))
    m2 = np.max(np.abs(v2))
    if m1 == 0.0 or m2 == 0.0:
        return 0.0
    u1 = v1 / m1
    u2 = v2 / m2
    return float(np.dot(u1, u2) / (np.linalg.norm(u1) * np.linalg.norm(u2)))


def add(v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    _check_lengths(v1, v2)
    return v1 + v2


def hadamard(v1: np.ndarray, v2: np.ndarray) -> np.ndarray:
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    _check_lengths(v1, v2)
    return v1 * v2


def l2_normalize(v: np.ndarray) -> np.ndarray:
    """Unit-length copy of v; the zero vector stays zero.

    Pre-scaled by the largest component, like cosine, so tiny vectors
    (e.g. long hadamard chains) normalize without underflow.
    """
    v = np.asarray(v, dtype=float)
    m = np.max(np.abs(v)) if v.size else 0.0
    if m == 0.0:
        return v.copy()
    u = v / m
    return u / np.linalg.norm(u)


# --- spaces ------------------------------------------------------------------

@dataclass
class PosSpace:
    """Vector space for one lexical category.

    context_index is present for PPMI spaces (dimension -> context key)
    and None for externally loaded embeddings.
    """

    pos: str
    dim: int
    vocab: dict[str, np.ndarray] = field(default_factory=dict)
    context_index: list[ContextKey] | None = None
    duplicate_count: int = 0

    def __contains__(self, lemma: str) -> bool:
        return lemma in self.vocab

    def __len__(self) -> int:
        return len(self.vocab)

    def vector(self, lemma: str) -> np.ndarray:
        try:
            return self.vocab[lemma]
        except KeyError:
            raise MissingVocabError(lemma, self.pos) from None

    def validate(self) -> None:
        for lemma, vec in self.vocab.items():
            if vec.shape != (self.dim,):
                raise ValueError(f"{lemma}/{self.pos}: vector length {vec.shape} != dim {self.dim}")
            if not np.all(np.isfinite(vec)):
                raise ValueError(f"{lemma}/{self.pos}: non-finite component")
            if self.context_index is not None and np.any(vec < 0):
                raise ValueError(f"{lemma}/{self.pos}: negative PPMI component")


@dataclass
class SpaceSet:
    """One optional PosSpace per lexical category."""

    spaces: dict[str, PosSpace] = field(default_factory=dict)

    def get(self, pos: str) -> PosSpace | None:
        return self.spaces.get(pos)

    def space(self, pos: str) -> PosSpace:
        space = self.spaces.get(pos)
        if space is None:
            raise MissingVocabError("<any>", pos)
        return space

    def vector(self, lemma: str, pos: str) -> np.ndarray:
        space = self.spaces.get(pos)
        if space is None:
            raise MissingVocabError(lemma, pos)
        return space.vector(lemma)

    def has(self, lemma: str, pos: str) -> bool:
        space = self.spaces.get(pos)
        return space is not None and lemma in space


# --- PPMI construction -------------------------------------------------------

def pos_observations(table: TripleCountTable, pos: str) -> Counter:
    """Multiset of (word, context) pairs for words of the given POS.

    Each edge contributes one observation per side that carries this POS;
    the context records the opposite side.
    """
    obs: Counter = Counter()
    for t, count in table.entries.items():
        if t.head_pos == pos:
            obs[(t.head_lemma, (t.relation, DEPENDENT, t.dep_lemma, t.dep_pos))] += count
        if t.dep_pos == pos:
            obs[(t.dep_lemma, (t.relation, HEAD, t.head_lemma, t.head_pos))] += count
    return obs


def ppmi_value(n_wc: int, n_w: int, n_c: int, total: int) -> float:
    """max(0, ln(n(w,c) * N / (n(w) * n(c)))), 0 when any count is 0."""
    if n_wc == 0 or n_w == 0 or n_c == 0 or total == 0:
        return 0.0
    return max(0.0, math.log((n_wc * total) / (n_w * n_c)))


def build_ppmi_space(
    table: TripleCountTable, pos: str, min_count: int = 2, max_dims: int = 50_000
) -> PosSpace | None:
    """PPMI space for one category; None when nothing survives the filters."""
    obs = pos_observations(table, pos)
    if not obs:
        return None

    total = sum(obs.values())
    word_marginal: Counter = Counter()
    ctx_marginal: Counter = Counter()
    for (word, ctx), count in obs.items():
        word_marginal[word] += count
        ctx_marginal[ctx] += count

    kept = [c for c, freq in ctx_marginal.items() if freq >= min_count]
    kept.sort(key=lambda c: (-ctx_marginal[c], c))
    if len(kept) > max_dims:
        kept = kept[:max_dims]
    if not kept:
        return None
    ctx_pos = {c: i for i, c in enumerate(kept)}

    vectors: dict[str, np.ndarray] = {}
    for (word, ctx), count in obs.items():
        i = ctx_pos.get(ctx)
        if i is None:
            continue
        vec = vectors.get(word)
        if vec is None:
            vec = vectors[word] = np.zeros(len(kept))
        vec[i] = ppmi_value(count, word_marginal[word], ctx_marginal[ctx], total)

    vocab = {lemma: vectors[lemma] for lemma in sorted(vectors)}
    return PosSpace(pos=pos, dim=len(kept), vocab=vocab, context_index=list(kept))


def build_ppmi_spaces(
    table: TripleCountTable, min_count: int = 2, max_dims: int = 50_000
) -> SpaceSet:
    """PPMI spaces for all four lexical categories present in the table."""
    if len(table) == 0:
        raise DataFormatError("cannot build spaces from an empty count table")
    spaces = {}
    for pos in LEXICAL_POS:
        space = build_ppmi_space(table, pos, min_count=min_count, max_dims=max_dims)
        if space is not None:
            spaces[pos] = space
    return SpaceSet(spaces=spaces)


# --- word2vec-text embeddings ------------------------------------------------

def load_embeddings(path, pos: str) -> PosSpace:
    """Read word2vec text format: header "V d", then V rows "lemma v1 .. vd".

    Duplicate lemmas: last occurrence wins, counted in duplicate_count.
    """
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise DataFormatError(f"{path}: header must be 'V d', got {header!r}")
        try:
            n_words, dim = int(header[0]), int(header[1])
        except ValueError:
            raise DataFormatError(f"{path}: non-integer header fields {header!r}")
        vocab: dict[str, np.ndarray] = {}
        duplicates = 0
        for row_no, raw in enumerate(fh, start=2):
            parts = raw.split()
            if not parts:
                continue
            if len(parts) != dim + 1:
                raise DataFormatError(
                    f"{path}: row {row_no}: expected {dim} components, got {len(parts) - 1}"
                )
            lemma = parts[0]
            try:
                vec = np.array([float(x) for x in parts[1:]])
            except ValueError:
                raise DataFormatError(f"{path}: row {row_no}: non-numeric component")
            if lemma in vocab:
                duplicates += 1
            vocab[lemma] = vec
    if len(vocab) != n_words - duplicates:
        raise DataFormatError(
            f"{path}: header declares {n_words} rows, found {len(vocab) + duplicates}"
        )
    return PosSpace(pos=pos, dim=dim, vocab=vocab, duplicate_count=duplicates)


# --- persistence -------------------------------------------------------------

def _ctx_sidecar_path(path) -> str:
    return f"{path}.ctx"


def save_space(space: PosSpace, path) -> None:
    """Sparse TSV rows "lemma\\tdim:value,..." plus a .ctx sidecar for PPMI spaces."""
    header = f"{SPACE_HEADER} pos={space.pos} dim={space.dim}"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(header + "\n")
        for lemma in sorted(space.vocab):
            vec = space.vocab[lemma]
            cells = ",".join(f"{i}:{float(v)!r}" for i, v in enumerate(vec) if v != 0.0)
            fh.write(f"{lemma}\t{cells}\n")
    if space.context_index is not None:
        with open(_ctx_sidecar_path(path), "w", encoding="utf-8") as fh:
            fh.write(header + "\n")
            for i, (relation, slot, lemma, pos) in enumerate(space.context_index):
                fh.write(f"{i}\t{relation}\t{slot}\t{lemma}\t{pos}\n")


def _parse_space_header(line: str, path) -> tuple[str, int]:
    parts = line.strip().split()
    if len(parts) != 4 or " ".join(parts[:2]) != SPACE_HEADER:
        raise DataFormatError(f"{path}: bad header {line!r}")
    fields = dict(p.split("=", 1) for p in parts[2:])
    try:
        return fields["pos"], int(fields["dim"])
    except (KeyError, ValueError):
        raise DataFormatError(f"{path}: bad header fields {line!r}")


def load_space(path) -> PosSpace:
    with open(path, encoding="utf-8") as fh:
        pos, dim = _parse_space_header(fh.readline(), path)
        vocab: dict[str, np.ndarray] = {}
        for row_no, raw in enumerate(fh, start=2):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 2:
                raise DataFormatError(f"{path}: row {row_no}: expected 2 columns, got {len(cols)}")
            vec = np.zeros(dim)
            if cols[1]:
                for cell in cols[1].split(","):
                    i_str, _, v_str = cell.partition(":")
                    try:
                        i, v = int(i_str), float(v_str)
                    except ValueError:
                        raise DataFormatError(f"{path}: row {row_no}: bad cell {cell!r}")
                    if not 0 <= i < dim:
                        raise DataFormatError(f"{path}: row {row_no}: dimension {i} out of range")
                    vec[i] = v
            vocab[cols[0]] = vec

    context_index = None
    sidecar = _ctx_sidecar_path(path)
    if os.path.exists(sidecar):
        with open(sidecar, encoding="utf-8") as fh:
            _parse_space_header(fh.readline(), sidecar)
            context_index = [None] * dim
            for row_no, raw in enumerate(fh, start=2):
                line = raw.rstrip("\n")
                if not line:
                    continue
                cols = line.split("\t")
                if len(cols) != 5:
                    raise DataFormatError(f"{sidecar}: row {row_no}: expected 5 columns")
                i = int(cols[0])
                context_index[i] = (cols[1], cols[2], cols[3], cols[4])
            if any(c is None for c in context_index):
                raise DataFormatError(f"{sidecar}: missing dimensions in context index")
    return PosSpace(pos=pos, dim=dim, vocab=vocab, context_index=context_index)


def space_file_name(pos: str) -> str:
    return f"{pos.lower()}.space.tsv"


def save_spaceset(spaces: SpaceSet, directory) -> list[str]:
    """One file per category under `directory`; returns the paths written."""
    os.makedirs(directory, exist_ok=True)
    written = []
    for pos, space in sorted(spaces.spaces.items()):
        path = os.path.join(directory, space_file_name(pos))
        save_space(space, path)
        written.append(path)
    return written


def load_spaceset(directory) -> SpaceSet:
    spaces = {}
    for pos in LEXICAL_POS:
        path = os.path.join(directory, space_file_name(pos))
        if os.path.exists(path):
            spaces[pos] = load_space(path)
    if not spaces:
        raise DataFormatError(f"{directory}: no space files found")
    return SpaceSet(spaces=spaces)
