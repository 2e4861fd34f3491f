"""Stratified repeated two-fold cross-validation."""
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple
import logging
import time

import numpy as np

from src.corpus.schemas import Dataset, FeatureView
from src.errors import DatasetValidationError, FoldError
from src.evaluation.metrics import DEFAULT_RECALL, evaluate_ranking
from src.evaluation.schemas import CvPlan, FoldResult
from src.models.base import Screener
from src.nn.schemas import TrainConfig

logger = logging.getLogger(__name__)


def stratified_halves(doc_ids: Sequence[str], labels: Sequence[int], seed: int,
                      repetition: int) -> Tuple[List[int], List[int]]:
    """Split indices in two; each class is shuffled, then dealt alternately to the halves."""
    labels = np.asarray(labels)
    if len(doc_ids) != len(labels):
        raise DatasetValidationError(f"{len(doc_ids)} doc_ids but {len(labels)} labels")

    rng = np.random.default_rng(np.random.SeedSequence([seed, repetition]))
    dealt = []
    for label in (1, 0):
        members = np.flatnonzero(labels == label)
        if len(members) < 2:
            raise DatasetValidationError(
                f"class {label} has {len(members)} document(s); a stratified split needs at least 2"
            )
        dealt.extend(rng.permutation(members).tolist())
    # the deal continues across classes so odd strata do not pile up in one half
    return sorted(dealt[0::2]), sorted(dealt[1::2])


def fold_seed(seed: int, repetition: int, half: int) -> int:
    return int(np.random.SeedSequence([seed, repetition, half]).generate_state(1)[0])


def _run_fold(dataset: Dataset, factory: Callable[[], Screener], train_idx: List[int], test_idx: List[int],
              repetition: int, half: int, base_seed: int, train_config: Optional[TrainConfig],
              feature_view: Optional[FeatureView], model_name: Optional[str], recall: float) -> FoldResult:
    records = dataset.records
    try:
        screener = factory()
        if feature_view is not None:
            screener.feature_view = FeatureView(feature_view)
        seed = fold_seed(base_seed, repetition, half)
        config = (train_config.model_copy(update={"seed": seed}) if train_config is not None
                  else screener.default_train_config(seed))

        train_docs = [records[i] for i in train_idx]
        test_docs = [records[i] for i in test_idx]
        started = time.perf_counter()
        screener.train(train_docs, [doc.label for doc in train_docs], config)
        train_seconds = time.perf_counter() - started

        predictions = screener.score(test_docs)
        wss, precision = evaluate_ranking(predictions, {doc.doc_id: doc.label for doc in test_docs}, recall)
    except Exception as e:
        raise FoldError(repetition, half, e) from e

    name = model_name or screener.model_type
    logger.info(f"{dataset.name} {name} rep {repetition} half {half}: wss95 {wss:.4f}, train {train_seconds:.2f}s")
    return FoldResult(
        dataset=dataset.name, model=name, feature_view=screener.feature_view.value,
        repetition=repetition, half=half, wss95=wss, precision_at_95=precision,
        train_seconds=train_seconds, n_docs=len(records),
    )


def run_cv(
    dataset: Dataset,
    factory: Callable[[], Screener],
    plan: CvPlan = CvPlan(),
    train_config: Optional[TrainConfig] = None,
    feature_view: Optional[FeatureView] = None,
    workers: int = 1,
    model_name: Optional[str] = None,
    recall: float = DEFAULT_RECALL,
) -> List[FoldResult]:
    """Train on each half and test on the other, `plan.repetitions` times: 2 x repetitions results.

    Results come back ordered by (repetition, half) whatever the completion order.
    """
    doc_ids = [record.doc_id for record in dataset.records]
    labels = dataset.labels
    base_seed = train_config.seed if train_config is not None else plan.seed

    jobs = []
    for repetition in range(plan.repetitions):
        first, second = stratified_halves(doc_ids, labels, plan.seed, repetition)
        jobs.append((first, second, repetition, 0))
        jobs.append((second, first, repetition, 1))

    def run(job):
        train_idx, test_idx, repetition, half = job
        return _run_fold(dataset, factory, train_idx, test_idx, repetition, half, base_seed,
                         train_config, feature_view, model_name, recall)

    if workers <= 1:
        results = [run(job) for job in jobs]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    return sorted(results, key=lambda result: (result.repetition, result.half))
