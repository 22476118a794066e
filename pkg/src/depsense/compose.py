"""Co-compositional contextualization over dependency trees.

Two syntactically related words restrict each other: each is combined with
the summed vector of the paradigmatic class that could fill its own slot,
anchored at the other word. The root's contextualized vector stands for
the whole expression.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .conllu import DependencyTree
from .errors import MissingVocabError
from .spaces import (
    DEPENDENT,
    HEAD,
    PosSpace,
    SpaceSet,
    add,
    hadamard,
    l2_normalize,
    pos_observations,
    ppmi_value,
)
from .triples import DEFAULT_RELATIONS, TripleCountTable

MULT = "MULT"
ADD = "ADD"

STRICT = "STRICT"
BACKOFF = "BACKOFF"

FREQ = "FREQ"
PPMI = "PPMI"


@dataclass(frozen=True)
class SlotQuery:
    """A fixed anchor word plus the open slot of one dependency relation."""

    anchor_lemma: str
    anchor_pos: str
    relation: str
    slot: str  # side the class fills: HEAD or DEPENDENT

    def __post_init__(self):
        if self.slot not in (HEAD, DEPENDENT):
            raise ValueError(f"slot must be HEAD or DEPENDENT, got {self.slot!r}")


@dataclass(frozen=True)
class ClassMember:
    lemma: str
    pos: str
    relevance: float


@dataclass
class ParadigmaticClass:
    """Ranked same-POS words attested in the open slot of a query."""

    query: SlotQuery
    members: list[ClassMember]
    k: int
    pos: str | None = None

    def __len__(self) -> int:
        return len(self.members)


@dataclass
class SelectionalPreference:
    """Dynamic vector: the (normalized) sum of a class's member vectors."""

    query: SlotQuery
    vector: np.ndarray
    member_count: int


@dataclass
class AppliedPreference:
    """Audit record of one contextualization step."""

    query: SlotQuery
    member_count: int

    def describe(self) -> str:
        q = self.query
        return f"<{q.anchor_lemma}/{q.anchor_pos} {q.relation} {q.slot} n={self.member_count}>"


@dataclass
class ContextualizedSense:
    lemma: str
    pos: str
    base: np.ndarray
    applied: list[AppliedPreference] = field(default_factory=list)
    vector: np.ndarray = None
    zeroed: bool = False

    def __post_init__(self):
        if self.vector is None:
            self.vector = self.base.copy()


@dataclass
class TreeSenses:
    """Contextualized senses per lexical token index, plus the root."""

    senses: dict[int, ContextualizedSense]
    root_index: int
    oov: list[tuple[int, str, str]] = field(default_factory=list)


def _slot_fillers(table: TripleCountTable, query: SlotQuery) -> dict[tuple[str, str], int]:
    """Raw co-occurrence counts of the words filling the query's open slot."""
    fillers: dict[tuple[str, str], int] = {}
    if query.slot == HEAD:
        for t, count in table.entries.items():
            if (
                t.relation == query.relation
                and t.dep_lemma == query.anchor_lemma
                and t.dep_pos == query.anchor_pos
            ):
                key = (t.head_lemma, t.head_pos)
                fillers[key] = fillers.get(key, 0) + count
    else:
        for t, count in table.entries.items():
            if (
                t.relation == query.relation
                and t.head_lemma == query.anchor_lemma
                and t.head_pos == query.anchor_pos
            ):
                key = (t.dep_lemma, t.dep_pos)
                fillers[key] = fillers.get(key, 0) + count
    return fillers


def _ppmi_relevance(
    table: TripleCountTable, query: SlotQuery, fillers: dict[tuple[str, str], int], pos: str
) -> dict[tuple[str, str], float]:
    """PPMI of each filler against the anchor context, within the filler's POS space."""
    obs = pos_observations(table, pos)
    total = sum(obs.values())
    word_marginal: dict[str, int] = {}
    ctx_marginal: dict[tuple, int] = {}
    for (word, ctx), count in obs.items():
        word_marginal[word] = word_marginal.get(word, 0) + count
        ctx_marginal[ctx] = ctx_marginal.get(ctx, 0) + count
    # The anchor sits on the side opposite the open slot.
    anchor_slot = DEPENDENT if query.slot == HEAD else HEAD
    ctx = (query.relation, anchor_slot, query.anchor_lemma, query.anchor_pos)
    out = {}
    for (lemma, fpos), count in fillers.items():
        if fpos != pos:
            continue
        out[(lemma, fpos)] = ppmi_value(
            count, word_marginal.get(lemma, 0), ctx_marginal.get(ctx, 0), total
        )
    return out


def paradigmatic_class(
    table: TripleCountTable,
    query: SlotQuery,
    k: int = 10,
    relevance: str = FREQ,
    pos: str | None = None,
) -> ParadigmaticClass:
    """Words attested in the query's open slot, ranked by relevance, truncated to k.

    Classes are single-POS. When `pos` is given only fillers of that POS are
    kept (the replacement reading: candidates must match the word they stand
    in for); otherwise the POS with the highest total count wins.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    fillers = _slot_fillers(table, query)
    if pos is not None:
        fillers = {key: c for key, c in fillers.items() if key[1] == pos}
        class_pos = pos
    elif fillers:
        by_pos: dict[str, int] = {}
        for (_, fpos), count in fillers.items():
            by_pos[fpos] = by_pos.get(fpos, 0) + count
        class_pos = min(by_pos, key=lambda p: (-by_pos[p], p))
        fillers = {key: c for key, c in fillers.items() if key[1] == class_pos}
    else:
        class_pos = None

    if relevance == PPMI and fillers:
        scores = _ppmi_relevance(table, query, fillers, class_pos)
    elif relevance == FREQ:
        scores = {key: float(c) for key, c in fillers.items()}
    elif relevance == PPMI:
        scores = {}
    else:
        raise ValueError(f"unknown relevance measure {relevance!r}")

    ranked = sorted(scores.items(), key=lambda item: (-item[1], item[0][0]))
    members = [ClassMember(lemma, fpos, score) for (lemma, fpos), score in ranked[:k]]
    return ParadigmaticClass(query=query, members=members, k=k, pos=class_pos)


def preference_vector(
    cls: ParadigmaticClass,
    spaces: SpaceSet,
    normalize: bool = True,
    weighted: bool = False,
) -> SelectionalPreference:
    """Sum the static vectors of the class members found in the slot's space.

    Missing members are skipped; member_count is the number actually summed.
    The result is L2-normalized when nonzero (unless normalize=False, which
    exposes the raw sum).
    """
    space = spaces.get(cls.pos) if cls.pos is not None else None
    if space is None:
        return SelectionalPreference(query=cls.query, vector=np.zeros(0), member_count=0)
    vec = np.zeros(space.dim)
    summed = 0
    for member in cls.members:
        mv = space.vocab.get(member.lemma)
        if mv is None:
            continue
        vec = vec + (mv * member.relevance if weighted else mv)
        summed += 1
    if normalize and summed > 0:
        vec = l2_normalize(vec)
    return SelectionalPreference(query=cls.query, vector=vec, member_count=summed)


def apply_preference(
    sense: ContextualizedSense,
    pref: SelectionalPreference,
    mode: str = MULT,
    fallback: str = STRICT,
) -> None:
    """Combine one selectional preference into a running sense vector.

    MULT renormalizes after each product (repeated hadamard underflows);
    ADD accumulates raw sums so edge order stays immaterial. A strict
    fallback on an empty class zeroes the sense for good.
    """
    if mode not in (MULT, ADD):
        raise ValueError(f"mode must be MULT or ADD, got {mode!r}")
    if fallback not in (STRICT, BACKOFF):
        raise ValueError(f"fallback must be STRICT or BACKOFF, got {fallback!r}")
    sense.applied.append(AppliedPreference(query=pref.query, member_count=pref.member_count))
    if sense.zeroed:
        return
    if pref.member_count == 0:
        if fallback == STRICT:
            sense.vector = np.zeros_like(sense.base)
            sense.zeroed = True
        return
    if mode == MULT:
        sense.vector = l2_normalize(hadamard(sense.vector, pref.vector))
        if not sense.vector.any():
            sense.zeroed = True
    else:
        sense.vector = add(sense.vector, pref.vector)


def contextualize_pair(
    w1: tuple[str, str],
    w2: tuple[str, str],
    relation: str,
    table: TripleCountTable,
    spaces: SpaceSet,
    mode: str = MULT,
    k: int = 10,
    fallback: str = STRICT,
    relevance: str = FREQ,
    weighted: bool = False,
) -> tuple[ContextualizedSense, ContextualizedSense]:
    """Mutually contextualize head w1 and dependent w2 linked by `relation`.

    The head is combined with the preference of the class that could replace
    it (anchored at the dependent), and vice versa.
    """
    lemma1, pos1 = w1
    lemma2, pos2 = w2
    sense1 = ContextualizedSense(lemma=lemma1, pos=pos1, base=spaces.vector(lemma1, pos1))
    sense2 = ContextualizedSense(lemma=lemma2, pos=pos2, base=spaces.vector(lemma2, pos2))

    cls1 = paradigmatic_class(
        table, SlotQuery(lemma2, pos2, relation, HEAD), k=k, relevance=relevance, pos=pos1
    )
    cls2 = paradigmatic_class(
        table, SlotQuery(lemma1, pos1, relation, DEPENDENT), k=k, relevance=relevance, pos=pos2
    )
    apply_preference(sense1, preference_vector(cls1, spaces, weighted=weighted), mode, fallback)
    apply_preference(sense2, preference_vector(cls2, spaces, weighted=weighted), mode, fallback)
    return sense1, sense2


def contextualize_tree(
    tree: DependencyTree,
    table: TripleCountTable,
    spaces: SpaceSet,
    mode: str = MULT,
    k: int = 10,
    fallback: str = STRICT,
    relevance: str = FREQ,
    relation_filter=DEFAULT_RELATIONS,
    weighted: bool = False,
) -> TreeSenses:
    """Contextualize every lexical token by all of its filtered dependencies.

    Under STRICT an out-of-vocabulary lexical token is a hard error; under
    BACKOFF it is omitted from the output and listed in `oov`; its partners
    are still contextualized, since classes come from the count table rather
    than from the missing vector.
    """
    senses: dict[int, ContextualizedSense] = {}
    oov: list[tuple[int, str, str]] = []
    for tok in tree.tokens:
        if not tok.is_lexical():
            continue
        try:
            base = spaces.vector(tok.lemma, tok.upos)
        except MissingVocabError:
            if fallback == STRICT:
                raise
            oov.append((tok.index, tok.lemma, tok.upos))
            continue
        senses[tok.index] = ContextualizedSense(lemma=tok.lemma, pos=tok.upos, base=base)

    wanted = set(relation_filter)
    edges = sorted(tree.edges(), key=lambda e: e[1].index)
    for head, dep in edges:
        if dep.deprel not in wanted:
            continue
        if not (head.is_lexical() and dep.is_lexical()):
            continue
        if head.index in senses:
            cls = paradigmatic_class(
                table,
                SlotQuery(dep.lemma, dep.upos, dep.deprel, HEAD),
                k=k,
                relevance=relevance,
                pos=head.upos,
            )
            pref = preference_vector(cls, spaces, weighted=weighted)
            apply_preference(senses[head.index], pref, mode, fallback)
        if dep.index in senses:
            cls = paradigmatic_class(
                table,
                SlotQuery(head.lemma, head.upos, dep.deprel, DEPENDENT),
                k=k,
                relevance=relevance,
                pos=dep.upos,
            )
            pref = preference_vector(cls, spaces, weighted=weighted)
            apply_preference(senses[dep.index], pref, mode, fallback)
    return TreeSenses(senses=senses, root_index=tree.root_index, oov=oov)


def sentence_vector(
    tree: DependencyTree,
    table: TripleCountTable,
    spaces: SpaceSet,
    mode: str = MULT,
    k: int = 10,
    fallback: str = STRICT,
    relevance: str = FREQ,
    relation_filter=DEFAULT_RELATIONS,
    weighted: bool = False,
) -> np.ndarray:
    """The root token's contextualized vector, standing for the sentence."""
    root = tree.token(tree.root_index)
    if not root.is_lexical():
        raise MissingVocabError(root.lemma, root.upos)
    result = contextualize_tree(
        tree,
        table,
        spaces,
        mode=mode,
        k=k,
        fallback=fallback,
        relevance=relevance,
        relation_filter=relation_filter,
        weighted=weighted,
    )
    sense = result.senses.get(tree.root_index)
    if sense is None:
        raise MissingVocabError(root.lemma, root.upos)
    return sense.vector


def top_dimensions(
    vector: np.ndarray, space: PosSpace | None, n: int = 8
) -> list[tuple[int, str, float]]:
    """Strongest |weight| dimensions, labelled via the space's context index."""
    order = np.argsort(-np.abs(vector))
    out = []
    for i in order[:n]:
        w = float(vector[i])
        if w == 0.0:
            break
        if space is not None and space.context_index is not None:
            rel, slot, lemma, pos = space.context_index[i]
            label = f"{rel}:{slot}:{lemma}/{pos}"
        else:
            label = str(int(i))
        out.append((int(i), label, w))
    return out
