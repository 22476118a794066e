"""FastAPI service wrapping the contextualization engine.

Counts and spaces are loaded once at startup; every endpoint is a thin
handler over the core package, and the handlers are plain functions so the
CLI can call them in-process without a server.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

from fastapi import FastAPI, HTTPException

from ..attention import AttentionParams, TokenSequence, demo_embeddings, self_attention
from ..compose import contextualize_tree, paradigmatic_class, top_dimensions
from ..compose import SlotQuery
from ..config import RunConfig, load_spaces, load_table
from ..conllu import parse_conllu
from ..errors import DepsenseError, MissingVocabError
from ..evaluation import SimilarityPair, SvoTriple, evaluate, load_dataset, make_scorer
from ..spaces import SpaceSet
from ..triples import TripleCountTable
from . import schemas


@dataclass
class Resources:
    config: RunConfig
    table: TripleCountTable
    spaces: SpaceSet


def load_resources(config: RunConfig) -> Resources:
    table = load_table(config)
    spaces = load_spaces(config, table)
    return Resources(config=config, table=table, spaces=spaces)


# --- handlers ------------------------------------------------------------------

def handle_classes(res: Resources, req: schemas.ClassesRequest) -> schemas.ClassesResponse:
    cfg = res.config
    query = SlotQuery(
        anchor_lemma=req.anchor_lemma,
        anchor_pos=req.anchor_pos.upper(),
        relation=req.relation,
        slot=req.slot.upper(),
    )
    cls = paradigmatic_class(
        res.table,
        query,
        k=req.k or cfg.k,
        relevance=(req.relevance or cfg.relevance).upper(),
        pos=req.pos.upper() if req.pos else None,
    )
    members = [
        schemas.ClassMemberModel(rank=i + 1, lemma=m.lemma, pos=m.pos, relevance=m.relevance)
        for i, m in enumerate(cls.members)
    ]
    return schemas.ClassesResponse(
        anchor_lemma=query.anchor_lemma,
        anchor_pos=query.anchor_pos,
        relation=query.relation,
        slot=query.slot,
        class_pos=cls.pos,
        members=members,
    )


def handle_contextualize(
    res: Resources, req: schemas.ContextualizeRequest
) -> schemas.ContextualizeResponse:
    cfg = res.config
    issues: list = []
    trees = parse_conllu(req.conllu, issues=issues)
    sentences = []
    for tree in trees:
        result = contextualize_tree(
            tree,
            res.table,
            res.spaces,
            mode=(req.mode or cfg.mode).upper(),
            k=req.k or cfg.k,
            fallback=(req.fallback or cfg.fallback).upper(),
            relevance=(req.relevance or cfg.relevance).upper(),
            relation_filter=cfg.relations,
        )
        senses = []
        for index in sorted(result.senses):
            sense = result.senses[index]
            space = res.spaces.get(sense.pos)
            tops = [
                schemas.TopContextModel(dim=dim, context=label, weight=weight)
                for dim, label, weight in top_dimensions(sense.vector, space, req.top_n)
            ]
            senses.append(
                schemas.SenseModel(
                    token_index=index,
                    lemma=sense.lemma,
                    pos=sense.pos,
                    applied=[a.describe() for a in sense.applied],
                    zeroed=sense.zeroed,
                    top_contexts=tops,
                )
            )
        sentences.append(
            schemas.SentenceSensesModel(
                root_index=result.root_index,
                senses=senses,
                oov=[f"{lemma}/{pos}@{index}" for index, lemma, pos in result.oov],
            )
        )
    return schemas.ContextualizeResponse(
        sentences=sentences, parse_issues=[str(i) for i in issues]
    )


def _scorer_options(res: Resources, req) -> dict:
    cfg = res.config
    return {
        "mode": (getattr(req, "mode", None) or cfg.mode).upper(),
        "k": getattr(req, "k", None) or cfg.k,
        "fallback": (getattr(req, "fallback", None) or cfg.fallback).upper(),
        "relevance": (getattr(req, "relevance", None) or cfg.relevance).upper(),
        "relation_filter": cfg.relations,
        "seed": cfg.seed,
    }


def handle_similarity(res: Resources, req: schemas.SimilarityRequest) -> schemas.SimilarityResponse:
    scorer = make_scorer(req.model, res.table, res.spaces, **_scorer_options(res, req))
    pair = SimilarityPair(
        expr1=SvoTriple(req.expr1.subject, req.expr1.verb, req.expr1.object),
        expr2=SvoTriple(req.expr2.subject, req.expr2.verb, req.expr2.object),
        human_score=1.0,  # placeholder; only the model score is of interest here
    )
    flags = []
    try:
        outcome = scorer.score(pair)
        value = outcome.value
        if outcome.zero_fallback:
            flags.append("zero")
    except MissingVocabError as exc:
        # mirror the evaluation harness: unscorable pairs report 0.0, flagged
        value = 0.0
        flags.append(f"oov:{exc.lemma}/{exc.pos}")
    return schemas.SimilarityResponse(
        model=req.model.upper(),
        cosine=value,
        score_1to7=value * 7.0,
        flags=flags,
    )


def handle_evaluate(res: Resources, req: schemas.EvaluateRequest) -> schemas.EvaluateResponse:
    if (req.dataset_path is None) == (req.pairs is None):
        raise ValueError("provide exactly one of dataset_path or pairs")
    if req.dataset_path is not None:
        if not os.path.exists(req.dataset_path):
            raise FileNotFoundError(f"dataset not found: {req.dataset_path}")
        dataset = load_dataset(req.dataset_path)
    else:
        dataset = [
            SimilarityPair(
                expr1=SvoTriple(row.expr1.subject, row.expr1.verb, row.expr1.object),
                expr2=SvoTriple(row.expr2.subject, row.expr2.verb, row.expr2.object),
                human_score=row.human_score,
            )
            for row in req.pairs
        ]
    scorer = make_scorer(req.model, res.table, res.spaces, **_scorer_options(res, req))
    report = evaluate(dataset, scorer, model=req.model.upper())
    return schemas.EvaluateResponse(
        model=report.model,
        n_pairs=report.n_pairs,
        spearman_rho=report.spearman_rho,
        zero_fallback_count=report.zero_fallback_count,
        oov_count=report.oov_count,
        records=[
            schemas.PairRecordModel(
                expr1=str(r.expr1),
                expr2=str(r.expr2),
                human_score=r.human_score,
                model_score=r.model_score,
                flags=r.flags,
            )
            for r in report.records
        ],
    )


def handle_attention_demo(
    req: schemas.AttentionDemoRequest, default_seed: int = 42
) -> schemas.AttentionDemoResponse:
    if not req.lemmas:
        raise ValueError("lemma list must not be empty")
    seed = req.seed if req.seed is not None else default_seed
    items = demo_embeddings(req.lemmas, req.dim_model, seed=seed)
    seq = TokenSequence(items, positional=req.positional)
    params = AttentionParams.random(req.dim_model, req.dim_qk, req.dim_v, seed=seed)
    outputs, weights = self_attention(seq, params, scaled=req.scaled, return_weights=True)
    return schemas.AttentionDemoResponse(
        lemmas=req.lemmas,
        weights=[[float(w) for w in row] for row in weights],
        outputs=[[float(v) for v in row] for row in outputs],
    )


# --- app wiring ------------------------------------------------------------------

def create_app(config: RunConfig | None = None, resources: Resources | None = None) -> FastAPI:
    """Build the service; resources load eagerly so startup fails fast."""
    if resources is None:
        if config is None:
            raise ValueError("create_app needs a config or preloaded resources")
        resources = load_resources(config)
    res = resources

    app = FastAPI(title="depsense", version="0.1.0")

    def _wrap(fn, *args):
        try:
            return fn(*args)
        except FileNotFoundError as exc:
            raise HTTPException(status_code=404, detail=str(exc))
        except (DepsenseError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(
            status="ok",
            counts_entries=len(res.table),
            counts_total=res.table.total,
            spaces={pos: len(space) for pos, space in sorted(res.spaces.spaces.items())},
        )

    @app.post("/classes", response_model=schemas.ClassesResponse)
    def classes(req: schemas.ClassesRequest):
        return _wrap(handle_classes, res, req)

    @app.post("/contextualize", response_model=schemas.ContextualizeResponse)
    def contextualize(req: schemas.ContextualizeRequest):
        return _wrap(handle_contextualize, res, req)

    @app.post("/similarity", response_model=schemas.SimilarityResponse)
    def similarity(req: schemas.SimilarityRequest):
        return _wrap(handle_similarity, res, req)

    @app.post("/evaluate", response_model=schemas.EvaluateResponse)
    def evaluate_endpoint(req: schemas.EvaluateRequest):
        return _wrap(handle_evaluate, res, req)

    @app.post("/attention-demo", response_model=schemas.AttentionDemoResponse)
    def attention_demo(req: schemas.AttentionDemoRequest):
        return _wrap(handle_attention_demo, req, res.config.seed)

    return app
