"""Pydantic request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field


class HealthResponse(BaseModel):
    status: str
    counts_entries: int
    counts_total: int
    spaces: dict[str, int]  # POS -> vocabulary size


class ClassMemberModel(BaseModel):
    rank: int
    lemma: str
    pos: str
    relevance: float


class ClassesRequest(BaseModel):
    anchor_lemma: str
    anchor_pos: str = Field(description="NOUN, VERB, ADJ or ADV")
    relation: str
    slot: str = Field(description="HEAD or DEPENDENT: the side the class fills")
    k: int | None = None
    relevance: str | None = Field(None, description="FREQ or PPMI")
    pos: str | None = Field(None, description="restrict members to this POS")


class ClassesResponse(BaseModel):
    anchor_lemma: str
    anchor_pos: str
    relation: str
    slot: str
    class_pos: str | None
    members: list[ClassMemberModel]


class TopContextModel(BaseModel):
    dim: int
    context: str
    weight: float


class SenseModel(BaseModel):
    token_index: int
    lemma: str
    pos: str
    applied: list[str]
    zeroed: bool
    top_contexts: list[TopContextModel]


class SentenceSensesModel(BaseModel):
    root_index: int
    senses: list[SenseModel]
    oov: list[str]


class ContextualizeRequest(BaseModel):
    conllu: str = Field(description="CoNLL-U text, one or more sentences")
    mode: str | None = None
    k: int | None = None
    fallback: str | None = None
    relevance: str | None = None
    top_n: int = 8


class ContextualizeResponse(BaseModel):
    sentences: list[SentenceSensesModel]
    parse_issues: list[str]


class TripleModel(BaseModel):
    subject: str
    verb: str
    object: str


class SimilarityRequest(BaseModel):
    expr1: TripleModel
    expr2: TripleModel
    model: str = "COMPOSITIONAL"
    mode: str | None = None
    k: int | None = None
    fallback: str | None = None
    relevance: str | None = None


class SimilarityResponse(BaseModel):
    model: str
    cosine: float
    score_1to7: float
    flags: list[str]  # "zero" (empty-class fallback) or "oov:<lemma>/<POS>"


class DatasetRowModel(BaseModel):
    expr1: TripleModel
    expr2: TripleModel
    human_score: float


class EvaluateRequest(BaseModel):
    model: str
    dataset_path: str | None = Field(None, description="server-side dataset TSV")
    pairs: list[DatasetRowModel] | None = Field(None, description="inline dataset")
    mode: str | None = None
    k: int | None = None
    fallback: str | None = None
    relevance: str | None = None


class PairRecordModel(BaseModel):
    expr1: str
    expr2: str
    human_score: float
    model_score: float
    flags: list[str]


class EvaluateResponse(BaseModel):
    model: str
    n_pairs: int
    spearman_rho: float
    zero_fallback_count: int
    oov_count: int
    records: list[PairRecordModel]


class AttentionDemoRequest(BaseModel):
    lemmas: list[str]
    dim_model: int = 16
    dim_qk: int | None = None
    dim_v: int | None = None
    seed: int | None = None
    scaled: bool = True
    positional: bool = True


class AttentionDemoResponse(BaseModel):
    lemmas: list[str]
    weights: list[list[float]]
    outputs: list[list[float]]
