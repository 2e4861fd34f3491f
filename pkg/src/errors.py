from typing import Any, Callable, Dict, Type
from functools import wraps
import logging
import sys

import orjson
import typer

logger = logging.getLogger(__name__)

EXIT_PARTIAL_FAILURE = 1
EXIT_VALIDATION = 2


class ScreenBenchException(Exception):
    """This is the base class for all screenbench errors"""
    error_code = "screenbench_error"
    exit_code = EXIT_PARTIAL_FAILURE


class ManifestNotFound(ScreenBenchException):
    """A manifest path given on the command line or in a run config does not exist."""
    error_code = "manifest_not_found"
    exit_code = EXIT_VALIDATION

    def __init__(self, path):
        self.path = path
        super().__init__(f"Manifest not found: {path}")


class ManifestParseError(ScreenBenchException):
    """A manifest line is not of the form `doc_id,label`."""
    error_code = "manifest_parse_error"
    exit_code = EXIT_VALIDATION

    def __init__(self, path, line_number: int, reason: str):
        self.path = path
        self.line_number = line_number
        super().__init__(f"{path}:{line_number}: {reason}")


class DuplicateDocumentId(ScreenBenchException):
    """The same doc_id appears twice in one dataset."""
    error_code = "duplicate_doc_id"
    exit_code = EXIT_VALIDATION

    def __init__(self, doc_id: str, line_number: int | None = None):
        self.doc_id = doc_id
        where = f" (line {line_number})" if line_number is not None else ""
        super().__init__(f"Duplicate doc_id {doc_id}{where}")


class DatasetValidationError(ScreenBenchException):
    """A dataset is empty, single-class or inconsistent with its cache."""
    error_code = "invalid_dataset"
    exit_code = EXIT_VALIDATION


class FetchError(ScreenBenchException):
    """The literature API kept failing for a batch of ids after all retries."""
    error_code = "fetch_failed"
    exit_code = EXIT_PARTIAL_FAILURE

    def __init__(self, batch: list[str], reason: str):
        self.batch = list(batch)
        super().__init__(f"Fetching batch [{','.join(self.batch)}] failed: {reason}")


class EmbeddingParseError(ScreenBenchException):
    """An embedding file line has the wrong dimension or an unreadable number."""
    error_code = "embedding_parse_error"
    exit_code = EXIT_VALIDATION

    def __init__(self, path, line_number: int, reason: str):
        self.path = path
        self.line_number = line_number
        super().__init__(f"{path}:{line_number}: {reason}")


class VocabularyError(ScreenBenchException):
    """Vocabulary could not be built (empty corpus or everything under min_count)."""
    error_code = "empty_vocabulary"
    exit_code = EXIT_VALIDATION


class ShapeError(ScreenBenchException):
    """Tensor dimensions do not line up."""
    error_code = "shape_mismatch"


class NumericError(ScreenBenchException):
    """A loss or parameter became non-finite."""
    error_code = "non_finite"


class UndefinedMetricError(ScreenBenchException):
    """A recall-based metric was requested for a ranking without positives."""
    error_code = "undefined_metric"


class ModelValidationError(ScreenBenchException):
    """Training data or model state does not satisfy a model's preconditions."""
    error_code = "invalid_model_input"
    exit_code = EXIT_VALIDATION


class CheckpointError(ScreenBenchException):
    """A checkpoint file is truncated or does not match its header."""
    error_code = "bad_checkpoint"


class ConfigValidationError(ScreenBenchException):
    """The run config references missing files or selects nothing to run."""
    error_code = "invalid_config"
    exit_code = EXIT_VALIDATION


class FoldError(ScreenBenchException):
    """A model failed inside one cross-validation fold."""
    error_code = "fold_failed"

    def __init__(self, repetition: int, half: int, cause: Exception):
        self.repetition = repetition
        self.half = half
        self.cause = cause
        super().__init__(f"repetition {repetition}, half {half}: {cause}")


class ReportError(ScreenBenchException):
    """Nothing to aggregate, or a results file is malformed."""
    error_code = "invalid_report_input"
    exit_code = EXIT_VALIDATION


ExceptionHandler = Callable[[ScreenBenchException], int]


def create_exception_handler(exit_code: int, initial_detail: Dict[str, Any]) -> ExceptionHandler:
    def exception_handler(exc: ScreenBenchException) -> int:
        detail = {"message": str(exc), **initial_detail}
        sys.stderr.write(orjson.dumps(detail).decode() + "\n")
        sys.stderr.flush()
        return exit_code

    return exception_handler


def register_all_errors() -> Dict[Type[ScreenBenchException], ExceptionHandler]:
    handlers: Dict[Type[ScreenBenchException], ExceptionHandler] = {}

    handlers[ManifestNotFound] = create_exception_handler(
        exit_code=EXIT_VALIDATION,
        initial_detail={
            "error_code": ManifestNotFound.error_code,
            "resolution": "Check the manifest path; relative paths resolve against the working directory",
        },
    )

    handlers[ManifestParseError] = create_exception_handler(
        exit_code=EXIT_VALIDATION,
        initial_detail={
            "error_code": ManifestParseError.error_code,
            "resolution": "Every line after the `doc_id,label` header must be `<id>,<0|1>`",
        },
    )

    handlers[ConfigValidationError] = create_exception_handler(
        exit_code=EXIT_VALIDATION,
        initial_detail={
            "error_code": ConfigValidationError.error_code,
            "resolution": "Fix the run config or the SCREENBENCH_* environment overrides",
        },
    )

    handlers[FetchError] = create_exception_handler(
        exit_code=EXIT_PARTIAL_FAILURE,
        initial_detail={
            "error_code": FetchError.error_code,
            "resolution": "Already fetched records are cached; re-run the command to resume",
        },
    )

    # Everything else maps by its own class attributes.
    handlers[ScreenBenchException] = lambda exc: create_exception_handler(
        exit_code=exc.exit_code,
        initial_detail={"error_code": exc.error_code},
    )(exc)

    return handlers


EXCEPTION_HANDLERS = register_all_errors()


def handle_errors(command: Callable) -> Callable:
    """Turn screenbench exceptions raised by a CLI command into exit codes."""

    @wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except ScreenBenchException as exc:
            for klass in type(exc).__mro__:
                handler = EXCEPTION_HANDLERS.get(klass)
                if handler is not None:
                    logger.debug(f"{command.__name__} failed: {exc}", exc_info=True)
                    raise typer.Exit(code=handler(exc))
            raise

    return wrapper
