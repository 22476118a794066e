"""Desk-scale single-head self-attention, the syntagmatic contrast baseline.

One head, one layer, no training: static embeddings plus sinusoidal
positions are projected to query/key/value and mixed by softmax weights.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass

import numpy as np

from .errors import DataFormatError


def positional_encoding(position: int, dim: int) -> np.ndarray:
    """Sinusoidal encoding: pairs (sin, cos) of position / 10000^(2i/dim)."""
    if position < 0:
        raise ValueError(f"position must be >= 0, got {position}")
    if dim % 2 != 0:
        raise ValueError(f"dim must be even, got {dim}")
    out = np.empty(dim)
    i = np.arange(dim // 2)
    angle = position / np.power(10_000.0, 2 * i / dim)
    out[0::2] = np.sin(angle)
    out[1::2] = np.cos(angle)
    return out


@dataclass
class AttentionParams:
    """Projection matrices for one attention head."""

    dim_model: int
    dim_qk: int
    dim_v: int
    Wq: np.ndarray
    Wk: np.ndarray
    Wv: np.ndarray
    seed: int = 0

    def validate(self) -> None:
        if self.Wq.shape != (self.dim_model, self.dim_qk):
            raise ValueError(f"Wq shape {self.Wq.shape} != ({self.dim_model}, {self.dim_qk})")
        if self.Wk.shape != (self.dim_model, self.dim_qk):
            raise ValueError(f"Wk shape {self.Wk.shape} != ({self.dim_model}, {self.dim_qk})")
        if self.Wv.shape != (self.dim_model, self.dim_v):
            raise ValueError(f"Wv shape {self.Wv.shape} != ({self.dim_model}, {self.dim_v})")
        for name, m in (("Wq", self.Wq), ("Wk", self.Wk), ("Wv", self.Wv)):
            if not np.all(np.isfinite(m)):
                raise ValueError(f"{name} contains non-finite entries")

    @classmethod
    def random(cls, dim_model: int, dim_qk: int | None = None, dim_v: int | None = None,
               seed: int = 0) -> "AttentionParams":
        """Seeded uniform(-1/sqrt(dim_model), 1/sqrt(dim_model)) projections."""
        dim_qk = dim_model if dim_qk is None else dim_qk
        dim_v = dim_model if dim_v is None else dim_v
        rng = np.random.default_rng(seed)
        bound = 1.0 / np.sqrt(dim_model)
        params = cls(
            dim_model=dim_model,
            dim_qk=dim_qk,
            dim_v=dim_v,
            Wq=rng.uniform(-bound, bound, size=(dim_model, dim_qk)),
            Wk=rng.uniform(-bound, bound, size=(dim_model, dim_qk)),
            Wv=rng.uniform(-bound, bound, size=(dim_model, dim_v)),
            seed=seed,
        )
        params.validate()
        return params

    @classmethod
    def from_files(cls, q_path, k_path, v_path) -> "AttentionParams":
        """Externally trained projections in the matrix file format."""
        Wq = load_matrix(q_path)
        Wk = load_matrix(k_path)
        Wv = load_matrix(v_path)
        params = cls(
            dim_model=Wq.shape[0], dim_qk=Wq.shape[1], dim_v=Wv.shape[1],
            Wq=Wq, Wk=Wk, Wv=Wv,
        )
        params.validate()
        return params


class TokenSequence:
    """Ordered (lemma, static vector) pairs, plus positions when enabled."""

    def __init__(self, items: list[tuple[str, np.ndarray]], positional: bool = True):
        if not items:
            raise ValueError("empty token sequence")
        dims = {np.asarray(v).shape for _, v in items}
        if len(dims) != 1:
            raise ValueError(f"inconsistent embedding widths: {sorted(dims)}")
        self.lemmas = [lemma for lemma, _ in items]
        self.dim_model = int(np.asarray(items[0][1]).shape[0])
        self.positional = positional
        rows = []
        for position, (_, vec) in enumerate(items):
            vec = np.asarray(vec, dtype=float)
            if positional:
                vec = vec + positional_encoding(position, self.dim_model)
            rows.append(vec)
        self.inputs = np.stack(rows)

    def __len__(self) -> int:
        return len(self.lemmas)


def attention_weights(
    query: np.ndarray, keys: np.ndarray, scaled: bool = True, dim_qk: int | None = None
) -> np.ndarray:
    """Softmax over query-key dot products; rows are probability vectors."""
    query = np.asarray(query, dtype=float)
    keys = np.atleast_2d(np.asarray(keys, dtype=float))
    if keys.shape[0] == 0:
        raise ValueError("empty key list")
    if keys.shape[1] != query.shape[0]:
        raise ValueError(f"width mismatch: query {query.shape[0]}, keys {keys.shape[1]}")
    scores = keys @ query
    if scaled:
        scores = scores / np.sqrt(dim_qk if dim_qk is not None else query.shape[0])
    scores = scores - scores.max()  # stable softmax
    weights = np.exp(scores)
    return weights / weights.sum()


def self_attention(
    seq: TokenSequence,
    params: AttentionParams,
    scaled: bool = True,
    return_weights: bool = False,
):
    """Contextualized output per token: attention-weighted sum of values."""
    params.validate()
    if seq.dim_model != params.dim_model:
        raise ValueError(f"sequence width {seq.dim_model} != params dim_model {params.dim_model}")
    X = seq.inputs
    Q = X @ params.Wq
    K = X @ params.Wk
    V = X @ params.Wv
    weights = np.stack([
        attention_weights(Q[i], K, scaled=scaled, dim_qk=params.dim_qk) for i in range(len(seq))
    ])
    outputs = weights @ V
    if return_weights:
        return outputs, weights
    return outputs


def demo_embeddings(lemmas: list[str], dim: int, seed: int = 0) -> list[tuple[str, np.ndarray]]:
    """Reproducible per-lemma random embeddings for mechanism demos.

    The same (seed, lemma) always maps to the same vector, independent of
    the lemma's position in the list.
    """
    out = []
    for lemma in lemmas:
        digest = hashlib.sha256(f"{seed}:{lemma}".encode("utf-8")).digest()
        rng = np.random.default_rng(int.from_bytes(digest[:8], "big"))
        out.append((lemma, rng.uniform(-1.0, 1.0, size=dim)))
    return out


# --- matrix file format --------------------------------------------------------

def save_matrix(matrix: np.ndarray, path) -> None:
    """Text format: first line "rows cols", then row-major values."""
    matrix = np.atleast_2d(np.asarray(matrix, dtype=float))
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{matrix.shape[0]} {matrix.shape[1]}\n")
        for row in matrix:
            fh.write(" ".join(repr(float(v)) for v in row) + "\n")


def load_matrix(path) -> np.ndarray:
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise DataFormatError(f"{path}: matrix header must be 'rows cols'")
        try:
            rows, cols = int(header[0]), int(header[1])
        except ValueError:
            raise DataFormatError(f"{path}: non-integer matrix header {header!r}")
        values = []
        for raw in fh:
            values.extend(raw.split())
    if len(values) != rows * cols:
        raise DataFormatError(f"{path}: expected {rows * cols} values, found {len(values)}")
    try:
        data = np.array([float(v) for v in values])
    except ValueError:
        raise DataFormatError(f"{path}: non-numeric matrix value")
    return data.reshape(rows, cols)
