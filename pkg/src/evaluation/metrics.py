"""Ranking-based screening metrics at a fixed recall level."""
from typing import Dict, Iterable, List, Tuple
import math

import numpy as np

from src.errors import UndefinedMetricError
from src.evaluation.schemas import ConfusionAtThreshold, RankingEvaluation
from src.models.schemas import RankedPrediction

DEFAULT_RECALL = 0.95


def rank(predictions: Iterable[RankedPrediction]) -> List[RankedPrediction]:
    """Score descending; equal scores fall back to doc_id ascending."""
    return sorted(predictions, key=lambda prediction: (-prediction.score, prediction.doc_id))


def ranking_evaluation(predictions: Iterable[RankedPrediction], labels: Dict[str, int]) -> RankingEvaluation:
    return RankingEvaluation(ranked=rank(predictions), labels=labels)


def _check_recall(recall: float) -> None:
    if not 0.0 < recall <= 1.0:
        raise UndefinedMetricError(f"recall level must lie in (0, 1], got {recall}")


def required_positives(n_included: int, recall: float) -> int:
    # rounding first keeps r*P = 19.000000000000004 from demanding a 20th include
    return math.ceil(round(recall * n_included, 9))


def threshold_at_recall(evaluation: RankingEvaluation, recall: float = DEFAULT_RECALL) -> ConfusionAtThreshold:
    """Confusion counts at the shortest ranking prefix that reaches the recall level."""
    _check_recall(recall)
    n_total, n_included = evaluation.n_total, evaluation.n_included
    if n_included == 0:
        raise UndefinedMetricError("recall is undefined for a test set without included documents")

    hits = np.cumsum(evaluation.ranked_labels())
    cut = int(np.searchsorted(hits, required_positives(n_included, recall), side="left")) + 1
    tp = int(hits[cut - 1])
    fp = cut - tp
    return ConfusionAtThreshold(cut_index=cut, tp=tp, fp=fp, fn=n_included - tp, tn=n_total - n_included - fp)


def wss_at_recall(evaluation: RankingEvaluation, recall: float = DEFAULT_RECALL) -> float:
    confusion = threshold_at_recall(evaluation, recall)
    return (confusion.tn + confusion.fn) / confusion.n_total - (1.0 - recall)


def precision_at_recall(evaluation: RankingEvaluation, recall: float = DEFAULT_RECALL) -> float:
    confusion = threshold_at_recall(evaluation, recall)
    return confusion.tp / confusion.cut_index


def max_wss_at_recall(n_total: int, n_included: int, recall: float = DEFAULT_RECALL) -> float:
    """WSS of a perfect ranking; depends only on the class counts."""
    _check_recall(recall)
    if n_included <= 0:
        raise UndefinedMetricError("maximum WSS is undefined without included documents")
    if n_included > n_total:
        raise UndefinedMetricError(f"{n_included} included documents out of {n_total}")
    return (n_total - required_positives(n_included, recall)) / n_total - (1.0 - recall)


def evaluate_ranking(predictions: Iterable[RankedPrediction], labels: Dict[str, int],
                     recall: float = DEFAULT_RECALL) -> Tuple[float, float]:
    """(WSS, precision) at the recall level for one scored test set."""
    evaluation = ranking_evaluation(predictions, labels)
    return wss_at_recall(evaluation, recall), precision_at_recall(evaluation, recall)
