from pathlib import Path
from typing import List, Optional, Tuple
import logging

import orjson

from src.config import RunConfig
from src.corpus.service import load_dataset, parse_manifest
from src.errors import FoldError, ScreenBenchException
from src.evaluation.cv import run_cv
from src.evaluation.report import (
    RAW_FILE, aggregate_report, load_reference, write_raw_csv, write_report,
)
from src.evaluation.schemas import BenchmarkReport, FailureRecord, FoldResult
from src.models.service import screener_factory
from src.textprep.service import parse_embedding_file

logger = logging.getLogger(__name__)

CONFIG_SNAPSHOT = "config.json"


def run_benchmark(config: RunConfig, workers: Optional[int] = None) -> Tuple[Optional[BenchmarkReport], Path]:
    """Cross-validate every (dataset, model, feature view) combination and write the run directory.

    A failing combination is recorded and the rest still run. Returns the report
    (None when nothing succeeded) and the run directory.
    """
    config.validate_resources()
    run = config.run
    workers = workers or run.workers
    plan = config.cv.model_copy(update={"seed": run.seed})
    run_dir = config.run_dir()
    run_dir.mkdir(parents=True, exist_ok=True)
    (run_dir / CONFIG_SNAPSHOT).write_bytes(
        orjson.dumps(config.model_dump(mode="json"), option=orjson.OPT_INDENT_2 | orjson.OPT_SORT_KEYS)
    )

    embeddings = None
    if "cnn" in run.models:
        embeddings = parse_embedding_file(run.embedding_path, config.cnn.embedding_dim)

    datasets = [load_dataset(parse_manifest(path), run.cache_dir) for path in run.manifests]
    results: List[FoldResult] = []
    failures: List[FailureRecord] = []
    for dataset in datasets:
        for model in run.models:
            for view in run.feature_views:
                logger.info(f"Benchmarking {model} on {dataset.name} ({view.value}), {plan.repetitions} repetitions")
                try:
                    factory = screener_factory(
                        model, view, dae_ff=config.dae_ff, cnn=config.cnn, fasttext=config.fasttext,
                        embeddings=embeddings,
                    )
                    results.extend(run_cv(dataset, factory, plan, feature_view=view, workers=workers,
                                          model_name=model))
                except ScreenBenchException as e:
                    cause = e.cause if isinstance(e, FoldError) else e
                    error_code = getattr(cause, "error_code", type(cause).__name__)
                    logger.error(f"{model} on {dataset.name} ({view.value}) failed: {e}", exc_info=True)
                    failures.append(FailureRecord(
                        dataset=dataset.name, model=model, feature_view=view.value,
                        error_code=error_code, message=str(e),
                    ))

    if not results:
        logger.error(f"Every combination failed; see {run_dir}")
        (run_dir / "failures.json").write_bytes(
            orjson.dumps([failure.model_dump() for failure in failures], option=orjson.OPT_INDENT_2)
        )
        return None, run_dir

    write_raw_csv(run_dir / RAW_FILE, results)
    reference = load_reference(run.reference_path) if run.reference_path else None
    report = aggregate_report(results, reference=reference, failures=failures)
    write_report(run_dir, report)
    return report, run_dir
