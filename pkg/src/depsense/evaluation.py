"""SVO similarity evaluation: datasets, pluggable scorers, rank statistics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats as scipy_stats

from .attention import AttentionParams, TokenSequence, self_attention
from .compose import FREQ, MULT, STRICT, sentence_vector
from .conllu import DependencyTree, Token
from .errors import DataFormatError, MissingVocabError
from .spaces import SpaceSet, cosine
from .triples import DEFAULT_RELATIONS, TripleCountTable

STATIC = "STATIC"
COMPOSITIONAL = "COMPOSITIONAL"
ATTENTION = "ATTENTION"

MODELS = (STATIC, COMPOSITIONAL, ATTENTION)

SCORE_MIN = 1.0
SCORE_MAX = 7.0


@dataclass(frozen=True)
class SvoTriple:
    subject: str
    verb: str
    object: str

    def __post_init__(self):
        for name in ("subject", "verb", "object"):
            value = getattr(self, name)
            if not value or any(c.isspace() for c in value):
                raise ValueError(f"{name} must be a non-empty whitespace-free lemma, got {value!r}")

    def __str__(self) -> str:
        return f"{self.subject} {self.verb} {self.object}"


@dataclass(frozen=True)
class SimilarityPair:
    expr1: SvoTriple
    expr2: SvoTriple
    human_score: float

    def __post_init__(self):
        if not SCORE_MIN <= self.human_score <= SCORE_MAX:
            raise ValueError(
                f"human score must be in [{SCORE_MIN}, {SCORE_MAX}], got {self.human_score}"
            )


@dataclass
class PairRecord:
    expr1: SvoTriple
    expr2: SvoTriple
    human_score: float
    model_score: float
    flags: list[str] = field(default_factory=list)


@dataclass
class EvalReport:
    n_pairs: int
    spearman_rho: float
    zero_fallback_count: int
    oov_count: int
    records: list[PairRecord]
    model: str = ""


# --- dataset I/O ---------------------------------------------------------------

def load_dataset(path) -> list[SimilarityPair]:
    """Read the 7-column TSV: s1 v1 o1 s2 v2 o2 human_score. '#' lines skipped."""
    pairs = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 7:
                raise DataFormatError(f"{path}: line {line_no}: expected 7 columns, got {len(cols)}")
            try:
                score = float(cols[6])
            except ValueError:
                raise DataFormatError(f"{path}: line {line_no}: non-numeric score {cols[6]!r}")
            try:
                pair = SimilarityPair(
                    expr1=SvoTriple(cols[0], cols[1], cols[2]),
                    expr2=SvoTriple(cols[3], cols[4], cols[5]),
                    human_score=score,
                )
            except ValueError as exc:
                raise DataFormatError(f"{path}: line {line_no}: {exc}")
            pairs.append(pair)
    return pairs


def save_dataset(pairs: list[SimilarityPair], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("#subject1\tverb1\tobject1\tsubject2\tverb2\tobject2\thuman_score\n")
        for p in pairs:
            fh.write(
                f"{p.expr1.subject}\t{p.expr1.verb}\t{p.expr1.object}"
                f"\t{p.expr2.subject}\t{p.expr2.verb}\t{p.expr2.object}"
                f"\t{p.human_score}\n"
            )


def load_gs2011(path) -> list[SimilarityPair]:
    """Converter stub for the annotator-per-row layout (verb/landmark columns).

    Expects a whitespace-separated header naming at least verb, subject,
    object and landmark plus a score column (input or score); per-annotator
    rows for the same pair are averaged.
    """
    with open(path, encoding="utf-8") as fh:
        header = fh.readline().split()
        lower = [h.lower() for h in header]
        try:
            i_verb = lower.index("verb")
            i_subj = lower.index("subject")
            i_obj = lower.index("object")
            i_land = lower.index("landmark")
        except ValueError:
            raise DataFormatError(f"{path}: header lacks verb/subject/object/landmark columns")
        i_score = None
        for name in ("input", "score"):
            if name in lower:
                i_score = lower.index(name)
                break
        if i_score is None:
            raise DataFormatError(f"{path}: header lacks a score column (input or score)")

        sums: dict[tuple, list[float]] = {}
        order: list[tuple] = []
        for line_no, raw in enumerate(fh, start=2):
            parts = raw.split()
            if not parts:
                continue
            if len(parts) != len(header):
                raise DataFormatError(f"{path}: line {line_no}: expected {len(header)} columns")
            key = (parts[i_subj], parts[i_verb], parts[i_obj], parts[i_land])
            try:
                score = float(parts[i_score])
            except ValueError:
                raise DataFormatError(f"{path}: line {line_no}: non-numeric score")
            if key not in sums:
                sums[key] = []
                order.append(key)
            sums[key].append(score)

    pairs = []
    for subj, verb, obj, landmark in order:
        scores = sums[(subj, verb, obj, landmark)]
        pairs.append(
            SimilarityPair(
                expr1=SvoTriple(subj, verb, obj),
                expr2=SvoTriple(subj, landmark, obj),
                human_score=sum(scores) / len(scores),
            )
        )
    return pairs


def svo_tree(t: SvoTriple) -> DependencyTree:
    """Materialize a triple as the two-edge tree nsubj(verb, subject), obj(verb, object)."""
    tokens = (
        Token(index=1, form=t.subject, lemma=t.subject, upos="NOUN", head=2, deprel="nsubj"),
        Token(index=2, form=t.verb, lemma=t.verb, upos="VERB", head=0, deprel="root"),
        Token(index=3, form=t.object, lemma=t.object, upos="NOUN", head=2, deprel="obj"),
    )
    return DependencyTree(tokens=tokens, root_index=2)


# --- rank statistics -------------------------------------------------------------

def average_ranks(values) -> np.ndarray:
    """1-based ranks; ties receive the average of their positions."""
    x = np.asarray(values, dtype=float)
    n = len(x)
    order = np.argsort(x, kind="stable")
    ranks = np.empty(n)
    i = 0
    while i < n:
        j = i
        while j + 1 < n and x[order[j + 1]] == x[order[i]]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Pearson correlation of average ranks."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape:
        raise ValueError(f"length mismatch: {x.shape} vs {y.shape}")
    if len(x) < 2:
        raise ValueError("need at least 2 observations")
    rx = average_ranks(x)
    ry = average_ranks(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    vx = float(np.dot(dx, dx))
    vy = float(np.dot(dy, dy))
    if vx == 0.0 or vy == 0.0:
        raise ValueError("zero rank variance: correlation undefined")
    return float(np.dot(dx, dy) / math.sqrt(vx * vy))


def paired_significance(scores_a, scores_b) -> tuple[float, float]:
    """Paired Student's t-test on per-pair differences; two-sided p-value.

    Identical sequences return (0.0, 1.0) by convention; a constant nonzero
    shift has zero difference variance and is an error.
    """
    a = np.asarray(scores_a, dtype=float)
    b = np.asarray(scores_b, dtype=float)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    n = len(a)
    if n < 2:
        raise ValueError("need at least 2 paired observations")
    d = a - b
    sd = float(d.std(ddof=1))
    if sd == 0.0:
        if float(d[0]) == 0.0:
            return 0.0, 1.0
        raise ValueError("zero variance of nonzero differences: t statistic undefined")
    t = float(d.mean() / (sd / math.sqrt(n)))
    p = float(2.0 * scipy_stats.t.sf(abs(t), df=n - 1))
    return t, p


# --- scorers ---------------------------------------------------------------------

@dataclass
class ScoreOutcome:
    value: float
    zero_fallback: bool = False


class StaticScorer:
    """Cosine of the two verbs' static vectors (variant: summed s+v+o vectors)."""

    def __init__(self, spaces: SpaceSet, variant: str = "verb"):
        if variant not in ("verb", "sum"):
            raise ValueError(f"variant must be 'verb' or 'sum', got {variant!r}")
        self.spaces = spaces
        self.variant = variant

    def _vector(self, expr: SvoTriple) -> np.ndarray:
        if self.variant == "verb":
            return self.spaces.vector(expr.verb, "VERB")
        s = self.spaces.vector(expr.subject, "NOUN")
        v = self.spaces.vector(expr.verb, "VERB")
        o = self.spaces.vector(expr.object, "NOUN")
        if not (s.shape == v.shape == o.shape):
            raise DataFormatError("summed static variant needs equal dims across POS spaces")
        return s + v + o

    def score(self, pair: SimilarityPair) -> ScoreOutcome:
        v1 = self._vector(pair.expr1)
        v2 = self._vector(pair.expr2)
        value = cosine(v1, v2)
        zero = not (v1.any() and v2.any())
        return ScoreOutcome(value=value, zero_fallback=zero)


class CompositionalScorer:
    """Cosine of the two root senses after tree contextualization."""

    def __init__(
        self,
        table: TripleCountTable,
        spaces: SpaceSet,
        mode: str = MULT,
        k: int = 10,
        fallback: str = STRICT,
        relevance: str = FREQ,
        relation_filter=DEFAULT_RELATIONS,
        weighted: bool = False,
    ):
        self.table = table
        self.spaces = spaces
        self.mode = mode
        self.k = k
        self.fallback = fallback
        self.relevance = relevance
        self.relation_filter = relation_filter
        self.weighted = weighted

    def _vector(self, expr: SvoTriple) -> np.ndarray:
        return sentence_vector(
            svo_tree(expr),
            self.table,
            self.spaces,
            mode=self.mode,
            k=self.k,
            fallback=self.fallback,
            relevance=self.relevance,
            relation_filter=self.relation_filter,
            weighted=self.weighted,
        )

    def score(self, pair: SimilarityPair) -> ScoreOutcome:
        v1 = self._vector(pair.expr1)
        v2 = self._vector(pair.expr2)
        value = cosine(v1, v2)
        zero = not (v1.any() and v2.any())
        return ScoreOutcome(value=value, zero_fallback=zero)


class AttentionScorer:
    """Cosine of the verb-position outputs of single-head self-attention.

    Needs equal vector widths across the POS spaces involved; projections are
    seeded once from the space width.
    """

    def __init__(self, spaces: SpaceSet, seed: int = 0, scaled: bool = True,
                 positional: bool = True, params: AttentionParams | None = None):
        self.spaces = spaces
        self.seed = seed
        self.scaled = scaled
        self.positional = positional
        self._params = params

    def _sequence(self, expr: SvoTriple) -> TokenSequence:
        items = [
            (expr.subject, self.spaces.vector(expr.subject, "NOUN")),
            (expr.verb, self.spaces.vector(expr.verb, "VERB")),
            (expr.object, self.spaces.vector(expr.object, "NOUN")),
        ]
        widths = {v.shape[0] for _, v in items}
        if len(widths) != 1:
            raise DataFormatError(
                f"attention scorer needs equal dims across POS spaces, got {sorted(widths)}"
            )
        return TokenSequence(items, positional=self.positional)

    def _root_output(self, expr: SvoTriple) -> np.ndarray:
        seq = self._sequence(expr)
        if self._params is None:
            self._params = AttentionParams.random(seq.dim_model, seed=self.seed)
        return self_attention(seq, self._params, scaled=self.scaled)[1]  # verb position

    def score(self, pair: SimilarityPair) -> ScoreOutcome:
        v1 = self._root_output(pair.expr1)
        v2 = self._root_output(pair.expr2)
        value = cosine(v1, v2)
        zero = not (v1.any() and v2.any())
        return ScoreOutcome(value=value, zero_fallback=zero)


def make_scorer(model: str, table: TripleCountTable | None, spaces: SpaceSet, **options):
    """Scorer factory for the three model names."""
    name = model.upper()
    if name == STATIC:
        return StaticScorer(spaces, variant=options.get("static_variant", "verb"))
    if name == COMPOSITIONAL:
        if table is None:
            raise ValueError("compositional scorer needs a count table")
        return CompositionalScorer(
            table,
            spaces,
            mode=options.get("mode", MULT),
            k=options.get("k", 10),
            fallback=options.get("fallback", STRICT),
            relevance=options.get("relevance", FREQ),
            relation_filter=options.get("relation_filter", DEFAULT_RELATIONS),
            weighted=options.get("weighted", False),
        )
    if name == ATTENTION:
        return AttentionScorer(
            spaces,
            seed=options.get("seed", 0),
            scaled=options.get("scaled", True),
            positional=options.get("positional", True),
        )
    raise ValueError(f"unknown model {model!r} (expected one of {', '.join(MODELS)})")


def score_pair(pair: SimilarityPair, scorer) -> float:
    return scorer.score(pair).value


# --- evaluation --------------------------------------------------------------------

def evaluate(dataset: list[SimilarityPair], scorer, model: str = "") -> EvalReport:
    """Score every pair and correlate with the human judgments.

    Duplicate (expr1, expr2) rows are averaged (per-annotator layout) before
    correlation. Out-of-vocabulary pairs score 0 and stay in the ranking.
    """
    grouped: dict[tuple[SvoTriple, SvoTriple], list[float]] = {}
    order: list[tuple[SvoTriple, SvoTriple]] = []
    for pair in dataset:
        key = (pair.expr1, pair.expr2)
        if key not in grouped:
            grouped[key] = []
            order.append(key)
        grouped[key].append(pair.human_score)

    records = []
    zero_fallbacks = 0
    oov = 0
    for expr1, expr2 in order:
        human = sum(grouped[(expr1, expr2)]) / len(grouped[(expr1, expr2)])
        pair = SimilarityPair(expr1=expr1, expr2=expr2, human_score=human)
        flags = []
        try:
            outcome = scorer.score(pair)
            value = outcome.value
            if outcome.zero_fallback:
                zero_fallbacks += 1
                flags.append("zero")
        except MissingVocabError as exc:
            value = 0.0
            oov += 1
            flags.append(f"oov:{exc.lemma}/{exc.pos}")
        records.append(
            PairRecord(expr1=expr1, expr2=expr2, human_score=human, model_score=value, flags=flags)
        )

    if not records:
        raise DataFormatError("no scoreable pairs in dataset")
    rho = spearman([r.human_score for r in records], [r.model_score for r in records])
    return EvalReport(
        n_pairs=len(records),
        spearman_rho=rho,
        zero_fallback_count=zero_fallbacks,
        oov_count=oov,
        records=records,
        model=model,
    )


def report_lines(report: EvalReport) -> list[str]:
    """Line-delimited structured records, one per pair."""
    lines = [
        "#depsense-report v1",
        f"#model={report.model}\tn_pairs={report.n_pairs}\tspearman_rho={report.spearman_rho:.6f}"
        f"\tzero_fallback={report.zero_fallback_count}\toov={report.oov_count}",
        "#expr1\texpr2\thuman\tmodel\tmodel_1to7\tflags",
    ]
    for r in report.records:
        lines.append(
            f"{r.expr1}\t{r.expr2}\t{r.human_score:.2f}\t{r.model_score:.6f}"
            f"\t{r.model_score * 7.0:.2f}\t{','.join(r.flags) or '-'}"
        )
    return lines


def report_table(report: EvalReport) -> str:
    """Human-readable summary table."""
    width1 = max([len(str(r.expr1)) for r in report.records] + [5])
    width2 = max([len(str(r.expr2)) for r in report.records] + [5])
    rows = [
        f"model: {report.model or '?'}   pairs: {report.n_pairs}   "
        f"spearman rho: {report.spearman_rho:.4f}   "
        f"zero-fallback: {report.zero_fallback_count}   oov: {report.oov_count}",
        f"{'expr1':<{width1}}  {'expr2':<{width2}}  human  model   (1-7)  flags",
    ]
    for r in report.records:
        rows.append(
            f"{str(r.expr1):<{width1}}  {str(r.expr2):<{width2}}  {r.human_score:5.2f}"
            f"  {r.model_score:6.3f}  {r.model_score * 7:5.2f}  {','.join(r.flags) or '-'}"
        )
    return "\n".join(rows)
