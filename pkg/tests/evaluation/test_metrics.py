from fractions import Fraction
from typing import List
import math

import pytest
from hypothesis import given, settings, strategies as st

from src.errors import UndefinedMetricError
from src.evaluation.metrics import (
    evaluate_ranking, max_wss_at_recall, precision_at_recall, rank, ranking_evaluation,
    threshold_at_recall, wss_at_recall,
)
from src.models.schemas import RankedPrediction


def ranking(labels: List[int], scores: List[float] | None = None):
    """Documents d000, d001, ... in the given order; default scores descend with position."""
    scores = scores if scores is not None else [float(len(labels) - i) for i in range(len(labels))]
    predictions = [RankedPrediction(doc_id=f"d{i:03d}", score=score) for i, score in enumerate(scores)]
    return ranking_evaluation(predictions, {f"d{i:03d}": label for i, label in enumerate(labels)})


def oracle(labels: List[int], scores: List[float], recall: Fraction):
    order = sorted(range(len(labels)), key=lambda i: (-scores[i], i))
    ranked = [labels[i] for i in order]
    n, p = len(labels), sum(labels)
    needed = math.ceil(recall * p)
    for cut in range(1, n + 1):
        tp = sum(ranked[:cut])
        if tp >= needed:
            fp = cut - tp
            tn, fn = n - p - fp, p - tp
            return (tn + fn) / n - (1 - float(recall)), tp / cut
    raise AssertionError("unreachable")


TEN_WITH_HITS_AT_1_AND_4 = [1, 0, 0, 1, 0, 0, 0, 0, 0, 0]


def test_perfect_ranking_of_ten():
    evaluation = ranking([1, 1] + [0] * 8)
    confusion = threshold_at_recall(evaluation)
    assert (confusion.cut_index, confusion.tn, confusion.fn) == (2, 8, 0)
    assert precision_at_recall(evaluation) == 1.0


def test_worst_ranking_reads_everything():
    evaluation = ranking([0] * 8 + [1, 1])
    confusion = threshold_at_recall(evaluation)
    assert (confusion.cut_index, confusion.tn, confusion.fn) == (10, 0, 0)
    assert wss_at_recall(evaluation) == pytest.approx(-0.05)
    assert precision_at_recall(evaluation) == pytest.approx(2 / 10)


def test_hits_at_ranks_one_and_four():
    evaluation = ranking(TEN_WITH_HITS_AT_1_AND_4)
    confusion = threshold_at_recall(evaluation)
    assert (confusion.cut_index, confusion.tn, confusion.fn) == (4, 6, 0)
    assert wss_at_recall(evaluation) == pytest.approx(0.55)
    assert precision_at_recall(evaluation) == pytest.approx(0.5)


def test_perfect_ranking_with_five_percent_includes():
    assert wss_at_recall(ranking([1] * 5 + [0] * 95)) == pytest.approx(0.90)


@pytest.mark.parametrize("n,p,expected", [(2544, 41, 0.9347), (48638, 765, 0.9351), (503, 136, 0.6916)])
def test_max_wss_matches_published_maxima(n, p, expected):
    assert max_wss_at_recall(n, p) == pytest.approx(expected, abs=5e-5)


def test_no_includes_is_undefined():
    with pytest.raises(UndefinedMetricError):
        threshold_at_recall(ranking([0, 0, 0]))
    with pytest.raises(UndefinedMetricError):
        max_wss_at_recall(10, 0)
    with pytest.raises(UndefinedMetricError):
        max_wss_at_recall(10, 11)


@pytest.mark.parametrize("recall", [0.0, -0.1, 1.5])
def test_recall_level_must_be_a_fraction(recall):
    with pytest.raises(UndefinedMetricError):
        wss_at_recall(ranking(TEN_WITH_HITS_AT_1_AND_4), recall)


def test_full_recall_needs_every_include():
    assert threshold_at_recall(ranking(TEN_WITH_HITS_AT_1_AND_4), 1.0).cut_index == 4
    assert threshold_at_recall(ranking([1] * 19 + [0] + [1]), 0.95).cut_index == 19


def test_ties_fall_back_to_doc_id():
    predictions = [RankedPrediction(doc_id=d, score=0.5) for d in ("c", "a", "b")]
    assert [p.doc_id for p in rank(predictions)] == ["a", "b", "c"]


def test_ranking_must_cover_the_labels():
    with pytest.raises(ValueError):
        ranking_evaluation([RankedPrediction(doc_id="a", score=1.0)], {"a": 1, "b": 0})


def test_perfect_ranking_reaches_the_maximum():
    for n in range(1, 61):
        for p in range(1, n + 1):
            wss = wss_at_recall(ranking([1] * p + [0] * (n - p)))
            assert wss == pytest.approx(max_wss_at_recall(n, p), abs=1e-12)
    for p in (1, 19, 20, 21, 333, 999, 1000):
        assert wss_at_recall(ranking([1] * p + [0] * (1000 - p))) == pytest.approx(max_wss_at_recall(1000, p), abs=1e-12)


@st.composite
def scored_labels(draw):
    n = draw(st.integers(min_value=2, max_value=50))
    p = draw(st.integers(min_value=1, max_value=n // 2))
    labels = draw(st.permutations([1] * p + [0] * (n - p)))
    scores = draw(st.lists(st.integers(min_value=0, max_value=6), min_size=n, max_size=n))
    return list(labels), [float(s) for s in scores]


@settings(max_examples=1000, deadline=None)
@given(scored_labels())
def test_matches_brute_force_oracle(case):
    labels, scores = case
    evaluation = ranking(labels, scores)
    wss, precision = wss_at_recall(evaluation), precision_at_recall(evaluation)
    expected_wss, expected_precision = oracle(labels, scores, Fraction(95, 100))
    assert wss == pytest.approx(expected_wss, abs=1e-12)
    assert precision == pytest.approx(expected_precision, abs=1e-12)


@settings(max_examples=200, deadline=None)
@given(scored_labels())
def test_wss_is_bounded(case):
    labels, scores = case
    wss = wss_at_recall(ranking(labels, scores))
    assert -0.05 - 1e-12 <= wss <= max_wss_at_recall(len(labels), sum(labels)) + 1e-12


@settings(max_examples=200, deadline=None)
@given(scored_labels())
def test_monotone_rescoring_changes_nothing(case):
    labels, scores = case
    rescored = [3.0 * 2.0 ** s - 7.0 for s in scores]
    assert wss_at_recall(ranking(labels, rescored)) == wss_at_recall(ranking(labels, scores))


def test_evaluate_ranking_pairs_wss_with_precision():
    predictions = [RankedPrediction(doc_id=f"d{i:03d}", score=10.0 - i) for i in range(10)]
    labels = {f"d{i:03d}": label for i, label in enumerate(TEN_WITH_HITS_AT_1_AND_4)}
    assert evaluate_ranking(predictions[::-1], labels) == pytest.approx((0.55, 0.5))
