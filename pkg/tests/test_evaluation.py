"""Datasets, rank statistics, scorers, and evaluation reports."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy import stats as scipy_stats

from depsense.errors import DataFormatError, MissingVocabError
from depsense.evaluation import (
    AttentionScorer,
    EvalReport,
    ScoreOutcome,
    SimilarityPair,
    StaticScorer,
    SvoTriple,
    average_ranks,
    evaluate,
    load_dataset,
    load_gs2011,
    make_scorer,
    paired_significance,
    report_lines,
    report_table,
    save_dataset,
    score_pair,
    spearman,
    svo_tree,
)
from depsense.spaces import PosSpace, SpaceSet
from depsense.triples import extract_triples

from conftest import make_table


def pair(s1, v1, o1, s2, v2, o2, score):
    return SimilarityPair(SvoTriple(s1, v1, o1), SvoTriple(s2, v2, o2), score)


def shared_dim_spaces(dim=4, seed=0):
    rng = np.random.default_rng(seed)
    nouns = {w: rng.uniform(0, 1, dim) for w in ["girl", "ball", "cold", "dog", "bone"]}
    verbs = {w: rng.uniform(0, 1, dim) for w in ["catch", "grasp", "chew"]}
    return SpaceSet(
        spaces={
            "NOUN": PosSpace(pos="NOUN", dim=dim, vocab=nouns),
            "VERB": PosSpace(pos="VERB", dim=dim, vocab=verbs),
        }
    )


# --- dataset I/O ------------------------------------------------------------------

def test_load_dataset(tmp_path):
    path = tmp_path / "d.tsv"
    path.write_text(
        "#subject1\tverb1\tobject1\tsubject2\tverb2\tobject2\thuman\n"
        "property\temploy\tbuy\tproperty\temploy\tpurchase\t7.0\n"
        "people\trun\tround\tpeople\tmove\tround\t3.3\n"
    )
    pairs = load_dataset(path)
    assert len(pairs) == 2
    assert pairs[0].human_score == 7.0
    assert pairs[0].expr1 == SvoTriple("property", "employ", "buy")
    assert pairs[1].expr2.verb == "move"


def test_load_dataset_empty(tmp_path):
    path = tmp_path / "d.tsv"
    path.write_text("")
    assert load_dataset(path) == []


def test_load_dataset_score_out_of_range(tmp_path):
    path = tmp_path / "d.tsv"
    path.write_text("a\tb\tc\td\te\tf\t8.0\n")
    with pytest.raises(DataFormatError, match="line 1"):
        load_dataset(path)


def test_load_dataset_arity(tmp_path):
    path = tmp_path / "d.tsv"
    path.write_text("a\tb\tc\t5.0\n")
    with pytest.raises(DataFormatError, match="7 columns"):
        load_dataset(path)


def test_dataset_round_trip(tmp_path):
    pairs = [pair("a", "b", "c", "a", "d", "c", 5.5), pair("x", "y", "z", "x", "w", "z", 2.0)]
    path = tmp_path / "d.tsv"
    save_dataset(pairs, path)
    assert load_dataset(path) == pairs


def test_gs2011_layout_averages_annotators(tmp_path):
    path = tmp_path / "gs.txt"
    path.write_text(
        "participant verb subject object landmark input hilo\n"
        "p1 provide system information supply 6 HIGH\n"
        "p2 provide system information supply 4 HIGH\n"
        "p1 meet system requirement visit 1 LOW\n"
    )
    pairs = load_gs2011(path)
    assert len(pairs) == 2
    assert pairs[0].expr1 == SvoTriple("system", "provide", "information")
    assert pairs[0].expr2 == SvoTriple("system", "supply", "information")
    assert pairs[0].human_score == 5.0
    assert pairs[1].human_score == 1.0


def test_gs2011_missing_columns(tmp_path):
    path = tmp_path / "gs.txt"
    path.write_text("a b c\n1 2 3\n")
    with pytest.raises(DataFormatError):
        load_gs2011(path)


def test_svo_tree_shape():
    tree = svo_tree(SvoTriple("girl", "catch", "ball"))
    assert tree.root_index == 2
    assert tree.token(2).upos == "VERB"
    triples = extract_triples(tree, {"nsubj", "obj"})
    assert len(triples) == 2
    assert {t.relation for t in triples} == {"nsubj", "obj"}


def test_svo_triple_validation():
    with pytest.raises(ValueError):
        SvoTriple("", "catch", "ball")
    with pytest.raises(ValueError):
        SvoTriple("a b", "catch", "ball")
    with pytest.raises(ValueError):
        SimilarityPair(SvoTriple("a", "b", "c"), SvoTriple("a", "b", "c"), 0.5)


# --- spearman ----------------------------------------------------------------------

def rank_formula_rho(x, y):
    """1 - 6*sum(d^2)/(n(n^2-1)); valid without ties."""
    rx = average_ranks(x)
    ry = average_ranks(y)
    d2 = float(np.sum((rx - ry) ** 2))
    n = len(x)
    return 1.0 - 6.0 * d2 / (n * (n * n - 1))


def test_spearman_monotone():
    x = [1.0, 2.0, 5.0, 9.0]
    assert spearman(x, [10, 20, 30, 40]) == pytest.approx(1.0, abs=1e-12)
    assert spearman(x, [40, 30, 20, 10]) == pytest.approx(-1.0, abs=1e-12)


def test_spearman_hand_value():
    assert spearman([1, 2, 3, 4], [1, 3, 2, 4]) == pytest.approx(0.8, abs=1e-12)


def test_spearman_matches_rank_formula_without_ties():
    rng = np.random.default_rng(8)
    for _ in range(100):
        n = int(rng.integers(3, 30))
        x = rng.permutation(n).astype(float)
        y = rng.permutation(n).astype(float)
        assert spearman(x, y) == pytest.approx(rank_formula_rho(x, y), abs=1e-13)


def test_spearman_ties_match_scipy():
    rng = np.random.default_rng(9)
    for _ in range(50):
        n = int(rng.integers(3, 25))
        x = rng.integers(0, 5, size=n).astype(float)
        y = rng.integers(0, 5, size=n).astype(float)
        try:
            mine = spearman(x, y)
        except ValueError:
            assert len(set(x.tolist())) == 1 or len(set(y.tolist())) == 1
            continue
        ref = scipy_stats.spearmanr(x, y).statistic
        assert mine == pytest.approx(ref, abs=1e-12)


def test_spearman_self_is_one():
    assert spearman([3, 1, 4, 1.5], [3, 1, 4, 1.5]) == pytest.approx(1.0, abs=1e-12)


def test_spearman_zero_variance_errors():
    with pytest.raises(ValueError, match="rank variance"):
        spearman([1, 1, 1], [1, 2, 3])


def test_spearman_length_checks():
    with pytest.raises(ValueError):
        spearman([1, 2], [1, 2, 3])
    with pytest.raises(ValueError):
        spearman([1], [2])


@given(st.lists(st.integers(-1000, 1000), min_size=3, max_size=20, unique=True))
def test_spearman_invariant_under_increasing_transform(values):
    x = np.array(values, dtype=float)
    y = np.arange(len(x), dtype=float)
    base = spearman(x, y)
    transformed = np.exp(x / 200.0)  # strictly increasing, injective on these ints
    assert spearman(transformed, y) == pytest.approx(base, abs=1e-9)


def test_average_ranks_ties():
    assert np.array_equal(average_ranks([10, 20, 20, 30]), np.array([1.0, 2.5, 2.5, 4.0]))


# --- paired significance --------------------------------------------------------------

def test_paired_identical_sequences():
    assert paired_significance([1.0, 2.0, 3.0], [1.0, 2.0, 3.0]) == (0.0, 1.0)


def test_paired_constant_shift_flagged():
    with pytest.raises(ValueError, match="zero variance"):
        paired_significance([1.0, 2.0, 3.0], [1.5, 2.5, 3.5])


def test_paired_textbook_oracle():
    a = np.array([5.1, 4.9, 6.0, 5.5, 5.8, 5.2])
    b = np.array([4.8, 5.0, 5.2, 5.3, 5.4, 4.9])
    t, p = paired_significance(a, b)
    d = a - b
    n = len(d)
    sd = math.sqrt(sum((x - d.mean()) ** 2 for x in d) / (n - 1))
    t_oracle = d.mean() / (sd / math.sqrt(n))
    assert t == pytest.approx(t_oracle, abs=1e-6)
    ref_t, ref_p = scipy_stats.ttest_rel(a, b)
    assert t == pytest.approx(ref_t, abs=1e-9)
    assert p == pytest.approx(ref_p, abs=1e-9)


def test_paired_length_checks():
    with pytest.raises(ValueError):
        paired_significance([1.0], [2.0])
    with pytest.raises(ValueError):
        paired_significance([1.0, 2.0], [1.0, 2.0, 3.0])


# --- scorers ---------------------------------------------------------------------------

def test_identical_exprs_score_one(disambiguation):
    table, spaces = disambiguation
    p = pair("girl", "catch", "ball", "girl", "catch", "ball", 7.0)
    for model in ("STATIC", "COMPOSITIONAL"):
        scorer = make_scorer(model, table, spaces)
        assert score_pair(p, scorer) == pytest.approx(1.0, abs=1e-9)
    attention = make_scorer("ATTENTION", None, shared_dim_spaces())
    assert score_pair(p, attention) == pytest.approx(1.0, abs=1e-9)


def test_static_ignores_arguments(disambiguation):
    table, spaces = disambiguation
    scorer = make_scorer("STATIC", table, spaces)
    p1 = pair("girl", "catch", "ball", "girl", "grasp", "ball", 7.0)
    p2 = pair("boy", "catch", "stone", "man", "grasp", "frisbee", 1.0)
    assert score_pair(p1, scorer) == score_pair(p2, scorer)


def test_static_sum_variant_differs(disambiguation):
    table, spaces = disambiguation
    verb_only = StaticScorer(spaces, variant="verb")
    summed = StaticScorer(spaces, variant="sum")
    p1 = pair("girl", "catch", "ball", "girl", "grasp", "ball", 7.0)
    p2 = pair("boy", "catch", "stone", "man", "grasp", "frisbee", 1.0)
    # verb-only collapses the two pairs; the summed variant needs equal dims
    assert verb_only.score(p1).value == verb_only.score(p2).value
    with pytest.raises(DataFormatError):
        summed.score(p1)  # PPMI spaces have different widths per POS
    uniform = shared_dim_spaces()
    s = StaticScorer(uniform, variant="sum")
    q1 = pair("girl", "catch", "ball", "girl", "grasp", "ball", 7.0)
    q2 = pair("dog", "catch", "bone", "dog", "grasp", "bone", 7.0)
    assert s.score(q1).value != s.score(q2).value


def test_score_pair_symmetry(disambiguation):
    table, spaces = disambiguation
    for model in ("STATIC", "COMPOSITIONAL"):
        scorer = make_scorer(model, table, spaces)
        a = pair("girl", "catch", "ball", "girl", "grasp", "ball", 4.0)
        b = pair("girl", "grasp", "ball", "girl", "catch", "ball", 4.0)
        assert score_pair(a, scorer) == pytest.approx(score_pair(b, scorer), abs=1e-12)


def test_attention_scorer_requires_uniform_dims(disambiguation):
    table, spaces = disambiguation
    scorer = AttentionScorer(spaces)
    with pytest.raises(DataFormatError):
        scorer.score(pair("girl", "catch", "ball", "girl", "grasp", "ball", 4.0))


def test_attention_scorer_deterministic():
    p = pair("girl", "catch", "ball", "dog", "chew", "bone", 4.0)
    a = AttentionScorer(shared_dim_spaces(), seed=7).score(p).value
    b = AttentionScorer(shared_dim_spaces(), seed=7).score(p).value
    assert a == b


def test_make_scorer_unknown_model(disambiguation):
    table, spaces = disambiguation
    with pytest.raises(ValueError, match="unknown model"):
        make_scorer("BERT", table, spaces)


def test_zero_fallback_scores_exactly_zero():
    spaces = SpaceSet(
        spaces={
            "VERB": PosSpace(pos="VERB", dim=2, vocab={"blip": np.ones(2)}),
            "NOUN": PosSpace(
                pos="NOUN", dim=2, vocab={"thing": np.array([1.0, 0.0]), "gadget": np.array([0.0, 1.0])}
            ),
        }
    )
    table = make_table(
        {
            ("blip", "VERB", "advmod", "fast", "ADV"): 1,
            ("red", "ADJ", "amod", "thing", "NOUN"): 1,
            ("red", "ADJ", "amod", "gadget", "NOUN"): 1,
        }
    )
    scorer = make_scorer("COMPOSITIONAL", table, spaces)
    outcome = scorer.score(pair("thing", "blip", "gadget", "thing", "blip", "gadget", 1.6))
    assert outcome.value == 0.0
    assert outcome.zero_fallback


# --- evaluation --------------------------------------------------------------------------

class FakeScorer:
    """Deterministic scores from a lookup, for harness-level tests."""

    def __init__(self, mapping):
        self.mapping = mapping

    def score(self, p):
        return ScoreOutcome(value=self.mapping[(str(p.expr1), str(p.expr2))])


def test_evaluate_monotone_scores_give_rho_one():
    pairs = [pair("a", "b", "c", "a", f"v{i}", "c", 1.0 + i * 0.5) for i in range(6)]
    mapping = {(str(p.expr1), str(p.expr2)): 0.1 * i for i, p in enumerate(pairs)}
    report = evaluate(pairs, FakeScorer(mapping))
    assert report.spearman_rho == pytest.approx(1.0, abs=1e-12)
    assert report.n_pairs == 6


def test_evaluate_matches_spearman_oracle():
    rng = np.random.default_rng(17)
    pairs = [pair("a", "b", "c", "a", f"v{i}", "c", float(1 + i % 7)) for i in range(10)]
    scores = rng.uniform(-1, 1, size=10)
    mapping = {(str(p.expr1), str(p.expr2)): float(s) for p, s in zip(pairs, scores)}
    report = evaluate(pairs, FakeScorer(mapping))
    expected = spearman([p.human_score for p in pairs], scores)
    assert report.spearman_rho == pytest.approx(expected, abs=1e-12)


def test_evaluate_counts_zero_fallback_and_scores_zero():
    spaces = SpaceSet(
        spaces={
            "VERB": PosSpace(
                pos="VERB",
                dim=2,
                vocab={"blip": np.ones(2), "hold": np.array([1.0, 0.3]), "grip": np.array([0.9, 0.4])},
            ),
            "NOUN": PosSpace(
                pos="NOUN",
                dim=2,
                vocab={
                    "thing": np.array([1.0, 0.0]),
                    "gadget": np.array([0.0, 1.0]),
                    "kid": np.array([0.7, 0.1]),
                    "cup": np.array([0.2, 0.8]),
                },
            ),
        }
    )
    table = make_table(
        {
            ("blip", "VERB", "advmod", "fast", "ADV"): 1,
            ("red", "ADJ", "amod", "thing", "NOUN"): 1,
            ("red", "ADJ", "amod", "gadget", "NOUN"): 1,
            ("hold", "VERB", "obj", "cup", "NOUN"): 2,
            ("grip", "VERB", "obj", "cup", "NOUN"): 1,
            ("hold", "VERB", "nsubj", "kid", "NOUN"): 2,
            ("grip", "VERB", "nsubj", "kid", "NOUN"): 1,
        }
    )
    dataset = [
        pair("kid", "hold", "cup", "kid", "grip", "cup", 6.5),
        pair("thing", "blip", "gadget", "thing", "blip", "gadget", 1.6),
    ]
    report = evaluate(dataset, make_scorer("COMPOSITIONAL", table, spaces))
    assert report.zero_fallback_count == 1
    assert report.records[1].model_score == 0.0
    assert "zero" in report.records[1].flags


def test_evaluate_counts_oov_as_zero(disambiguation):
    table, spaces = disambiguation
    dataset = [
        pair("girl", "catch", "ball", "girl", "grasp", "ball", 7.0),
        pair("girl", "zzz", "ball", "girl", "grasp", "ball", 1.0),
    ]
    report = evaluate(dataset, make_scorer("COMPOSITIONAL", table, spaces))
    assert report.oov_count == 1
    assert report.records[1].model_score == 0.0
    assert any(f.startswith("oov") for f in report.records[1].flags)


def test_evaluate_averages_duplicate_pairs():
    pairs = [
        pair("a", "b", "c", "a", "x", "c", 2.0),
        pair("a", "b", "c", "a", "x", "c", 6.0),
        pair("a", "b", "c", "a", "y", "c", 3.0),
    ]
    mapping = {("a b c", "a x c"): 0.9, ("a b c", "a y c"): 0.1}
    report = evaluate(pairs, FakeScorer(mapping))
    assert report.n_pairs == 2
    assert report.records[0].human_score == 4.0


def test_evaluate_empty_dataset_errors():
    with pytest.raises(DataFormatError, match="no scoreable pairs"):
        evaluate([], FakeScorer({}))


def test_evaluate_benchmark_ordering(benchmark):
    pairs, table, spaces = benchmark
    rho_static = evaluate(pairs, make_scorer("STATIC", table, spaces)).spearman_rho
    rho_comp = evaluate(pairs, make_scorer("COMPOSITIONAL", table, spaces)).spearman_rho
    assert rho_comp > rho_static + 0.15


def test_evaluate_deterministic(benchmark):
    pairs, table, spaces = benchmark
    r1 = evaluate(pairs, make_scorer("COMPOSITIONAL", table, spaces))
    r2 = evaluate(pairs, make_scorer("COMPOSITIONAL", table, spaces))
    assert r1.spearman_rho == r2.spearman_rho
    assert [r.model_score for r in r1.records] == [r.model_score for r in r2.records]


def test_report_rendering():
    records_pairs = [
        pair("a", "b", "c", "a", "x", "c", 2.0),
        pair("d", "e", "f", "d", "y", "f", 6.0),
    ]
    mapping = {("a b c", "a x c"): 0.5, ("d e f", "d y f"): 0.8}
    report = evaluate(records_pairs, FakeScorer(mapping), model="STATIC")
    lines = report_lines(report)
    assert lines[0].startswith("#depsense-report")
    assert "spearman_rho" in lines[1]
    assert lines[3].startswith("a b c\ta x c\t2.00\t0.500000\t3.50")
    table_text = report_table(report)
    assert "STATIC" in table_text
    assert "a b c" in table_text


def test_static_zero_vector_flagged():
    # a PPMI-clamped all-zero verb vector scores 0 on the static baseline
    spaces = SpaceSet(
        spaces={"VERB": PosSpace(pos="VERB", dim=2, vocab={"mumble": np.zeros(2), "talk": np.ones(2)})}
    )
    scorer = StaticScorer(spaces)
    outcome = scorer.score(pair("a", "mumble", "b", "a", "talk", "b", 3.0))
    assert outcome.value == 0.0
    assert outcome.zero_fallback
